"""Restricted wreath products G wr Z^k and their normalized automorphisms.

Elements are pairs (sigma, z): a finitely supported map sigma from Z^k to G
plus a translation z. Automorphisms are kept in the normalized shape
(F, M, twist): point masses map by a_x -> (F a)_{M x + twist} and the
translation part by z -> M z; the twist never touches the quotient because
it acts as conjugation by a translation.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .abelian import FiniteAbelianGroup, GAutomorphism, GElement
from .errors import InputError
from .intmat import IntMatrix, Vector, vec_add, vec_neg

MAX_RANK = 16


@dataclass(frozen=True)
class Support:
    """Finitely supported map Z^k -> G, stored sorted with zero values dropped."""

    group: FiniteAbelianGroup
    k: int
    entries: tuple[tuple[Vector, GElement], ...]

    def __post_init__(self) -> None:
        positions = [pos for pos, _ in self.entries]
        if positions != sorted(set(positions)):
            raise InputError("support entries must be sorted by position without repeats")
        for pos, val in self.entries:
            if len(pos) != self.k:
                raise InputError(f"position {pos} does not have dimension {self.k}")
            if val.group != self.group:
                raise InputError("support value belongs to a different group")
            if val.is_zero():
                raise InputError("support must not store zero values")

    @classmethod
    def make(
        cls,
        group: FiniteAbelianGroup,
        k: int,
        pairs: Iterable[tuple[Sequence[int], GElement]] = (),
    ) -> "Support":
        acc: dict[Vector, GElement] = {}
        for pos, val in pairs:
            key = tuple(int(x) for x in pos)
            acc[key] = acc[key] + val if key in acc else val
        entries = tuple(
            (pos, val) for pos, val in sorted(acc.items()) if not val.is_zero()
        )
        return cls(group=group, k=k, entries=entries)

    def value_at(self, pos: Sequence[int]) -> GElement:
        key = tuple(int(x) for x in pos)
        for p, v in self.entries:
            if p == key:
                return v
        return self.group.zero()

    def positions(self) -> tuple[Vector, ...]:
        return tuple(pos for pos, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def shift(self, z: Sequence[int]) -> "Support":
        """Translate positions by z: the new map sends x to old(x - z)."""
        zt = tuple(int(x) for x in z)
        return Support(
            self.group,
            self.k,
            tuple((vec_add(pos, zt), val) for pos, val in self.entries),
        )

    def __add__(self, other: "Support") -> "Support":
        if other.group != self.group or other.k != self.k:
            raise InputError("cannot add supports over different ambient groups")
        return Support.make(
            self.group,
            self.k,
            list(self.entries) + list(other.entries),
        )

    def __neg__(self) -> "Support":
        return Support(
            self.group, self.k, tuple((pos, -val) for pos, val in self.entries)
        )

    def diameter_inf(self) -> int:
        """Max over coordinates of (max - min) of the support; 0 if near-empty."""
        if len(self.entries) < 2:
            return 0
        pts = self.positions()
        return max(
            max(p[i] for p in pts) - min(p[i] for p in pts) for i in range(self.k)
        )


@dataclass(frozen=True)
class WreathElement:
    """Pair (sigma, z) of a finite support and a translation vector."""

    sigma: Support
    z: Vector

    def __post_init__(self) -> None:
        if len(self.z) != self.sigma.k:
            raise InputError("translation dimension does not match the support")

    @classmethod
    def identity(cls, group: FiniteAbelianGroup, k: int) -> "WreathElement":
        return cls(Support.make(group, k), (0,) * k)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.sigma.group

    @property
    def k(self) -> int:
        return self.sigma.k

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        if other.group != self.group or other.k != self.k:
            raise InputError("cannot multiply elements of different wreath products")
        return WreathElement(self.sigma + other.sigma.shift(self.z), vec_add(self.z, other.z))

    def inverse(self) -> "WreathElement":
        nz = vec_neg(self.z)
        return WreathElement(-self.sigma.shift(nz), nz)

    def is_identity(self) -> bool:
        return self.sigma.is_zero() and all(x == 0 for x in self.z)


def point_mass(
    group: FiniteAbelianGroup, k: int, pos: Sequence[int], value: GElement
) -> WreathElement:
    """The element a_pos with trivial translation."""
    return WreathElement(Support.make(group, k, [(pos, value)]), (0,) * k)


def translation(group: FiniteAbelianGroup, z: Sequence[int]) -> WreathElement:
    return WreathElement(Support.make(group, len(z)), tuple(int(x) for x in z))


def shift(z: Sequence[int], s: Support) -> Support:
    return s.shift(z)


def multiply(g: WreathElement, h: WreathElement) -> WreathElement:
    return g * h


def inverse(g: WreathElement) -> WreathElement:
    return g.inverse()


@dataclass(frozen=True)
class WreathAutomorphism:
    """Normalized automorphism (F, M, twist) of G wr Z^k."""

    f: GAutomorphism
    m: IntMatrix
    twist: Vector = field(default=())

    def __post_init__(self) -> None:
        k = self.m.k
        if k > MAX_RANK:
            raise InputError(f"rank {k} exceeds the supported maximum {MAX_RANK}")
        if abs(self.m.det()) != 1:
            raise InputError(f"quotient matrix must be unimodular, det = {self.m.det()}")
        if self.twist == ():
            object.__setattr__(self, "twist", (0,) * k)
        if len(self.twist) != k:
            raise InputError("twist dimension does not match the matrix")

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.f.group

    @property
    def k(self) -> int:
        return self.m.k

    def apply_support(self, s: Support) -> Support:
        if s.group != self.group or s.k != self.k:
            raise InputError("support does not match the automorphism's wreath product")
        return Support.make(
            self.group,
            self.k,
            [
                (vec_add(self.m.apply(pos), self.twist), self.f.apply(val))
                for pos, val in s.entries
            ],
        )

    def apply(self, g: WreathElement) -> WreathElement:
        return WreathElement(self.apply_support(g.sigma), self.m.apply(g.z))

    def compose(self, other: "WreathAutomorphism") -> "WreathAutomorphism":
        """self after other; twists combine as m1 @ twist2 + twist1."""
        if other.group != self.group or other.k != self.k:
            raise InputError("cannot compose automorphisms of different wreath products")
        return WreathAutomorphism(
            f=self.f @ other.f,
            m=self.m @ other.m,
            twist=vec_add(self.m.apply(other.twist), self.twist),
        )

    def inverse(self) -> "WreathAutomorphism":
        from .intmat import unimodular_inverse

        minv = unimodular_inverse(self.m)
        return WreathAutomorphism(
            f=self.f.inverse(), m=minv, twist=vec_neg(minv.apply(self.twist))
        )

    def is_identity(self) -> bool:
        return (
            self.f.is_identity()
            and self.m.is_identity()
            and all(x == 0 for x in self.twist)
        )


def apply_automorphism(phi: WreathAutomorphism, g: WreathElement) -> WreathElement:
    return phi.apply(g)


def twisted_conjugate(
    g: WreathElement, x: WreathElement, phi: WreathAutomorphism
) -> WreathElement:
    """g . x . phi(g)^-1, the twisted conjugation action defining Reidemeister classes."""
    return g * x * phi.apply(g).inverse()


def random_element(
    rng: random.Random,
    group: FiniteAbelianGroup,
    k: int,
    max_points: int = 3,
    box: int = 4,
) -> WreathElement:
    """Seeded random element with a small support inside [-box, box]^k."""
    mods = group.coord_moduli()
    pairs = []
    for _ in range(rng.randint(0, max_points)):
        pos = tuple(rng.randint(-box, box) for _ in range(k))
        val = group.element_from_flat([rng.randrange(q) for q in mods])
        pairs.append((pos, val))
    z = tuple(rng.randint(-box, box) for _ in range(k))
    return WreathElement(Support.make(group, k, pairs), z)


def check_compatibility(
    f: GAutomorphism, m: IntMatrix, sample_count: int, seed: int = 0
) -> bool:
    """Sample point masses a_x and vectors z, and test that the induced map
    phi' satisfies phi'(alpha(z)(h)) = alpha(M z)(phi'(h)).

    Any (F, M) pair passes: the identity is structural for position-linear
    maps. The checker exists to guard refactorings of apply_support.
    """
    if sample_count < 1:
        raise InputError("sample_count must be >= 1")
    phi = WreathAutomorphism(f=f, m=m, twist=(0,) * m.k)
    group = f.group
    k = m.k
    rng = random.Random(seed)
    mods = group.coord_moduli()
    for _ in range(sample_count):
        x = tuple(rng.randint(-5, 5) for _ in range(k))
        z = tuple(rng.randint(-5, 5) for _ in range(k))
        val = group.element_from_flat([rng.randrange(q) for q in mods])
        h = Support.make(group, k, [(x, val)])
        left = phi.apply_support(h.shift(z))
        right = phi.apply_support(h).shift(m.apply(z))
        if left != right:
            return False
    return True


_ELEMENT_RE = re.compile(r"^\{(?P<support>[^}]*)\}\s*\|\s*z=\((?P<z>[^)]*)\)$")
_ENTRY_RE = re.compile(r"^\((?P<pos>[^)]*)\)->(?P<val>.*)$")


def format_element(g: WreathElement) -> str:
    """Render as ``{(x1 .. xk)->c1,c2; ...} | z=(z1 .. zk)``; round-trips exactly."""
    parts = []
    for pos, val in g.sigma.entries:
        pos_text = " ".join(str(x) for x in pos)
        val_text = ",".join(str(x) for x in val.flat())
        parts.append(f"({pos_text})->{val_text}")
    return "{" + "; ".join(parts) + "}" + " | z=(" + " ".join(str(x) for x in g.z) + ")"


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    out = []
    for tok in text.split():
        try:
            out.append(int(tok))
        except ValueError:
            raise InputError(f"bad integer {tok!r} in {what}") from None
    return tuple(out)


def parse_element(text: str, group: FiniteAbelianGroup, k: int) -> WreathElement:
    m = _ELEMENT_RE.match(text.strip())
    if not m:
        raise InputError(f"element text does not match '{{...}} | z=(...)': {text!r}")
    z = _parse_ints(m.group("z"), "translation")
    if len(z) != k:
        raise InputError(f"translation has {len(z)} coordinates, expected {k}")
    pairs = []
    support_text = m.group("support").strip()
    if support_text:
        for chunk in support_text.split(";"):
            chunk = chunk.strip()
            em = _ENTRY_RE.match(chunk)
            if not em:
                raise InputError(f"bad support entry {chunk!r}")
            pos = _parse_ints(em.group("pos"), "position")
            if len(pos) != k:
                raise InputError(f"position {pos} has wrong dimension, expected {k}")
            flat = []
            for tok in em.group("val").split(","):
                tok = tok.strip()
                try:
                    flat.append(int(tok))
                except ValueError:
                    raise InputError(f"bad value coordinate {tok!r}") from None
            pairs.append((pos, group.element_from_flat(flat)))
    return WreathElement(Support.make(group, k, pairs), z)
