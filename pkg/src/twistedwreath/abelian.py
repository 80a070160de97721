"""Finite abelian groups of shape (Z_{p^r})^d summed over primes, with block automorphisms.

A group is a list of components ``p^r:d`` meaning d copies of Z_{p^r}.
Endomorphisms act componentwise by d x d integer matrices mod p^r; such a
matrix is an automorphism exactly when its determinant is prime to p.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded, InputError
from .intmat import IntMatrix, smith_normal_form

MAX_MODULUS = 2**31

_COMPONENT_RE = re.compile(r"^(\d+)\^(\d+):(\d+)$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic Miller-Rabin for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupComponent:
    """d copies of the cyclic group of order p^r."""

    p: int
    r: int
    d: int

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise InputError(f"component base {self.p} is not prime")
        if self.r < 1 or self.d < 1:
            raise InputError(f"component {self.p}^{self.r}:{self.d} needs r >= 1 and d >= 1")
        if self.q > MAX_MODULUS:
            raise InputError(f"component modulus {self.p}^{self.r} exceeds {MAX_MODULUS}")

    @property
    def q(self) -> int:
        return self.p**self.r

    def format(self) -> str:
        return f"{self.p}^{self.r}:{self.d}"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct sum of components, canonically sorted by (p, r).

    The empty group (order 1) is constructible programmatically but has no
    text form.
    """

    components: tuple[GroupComponent, ...]

    def __post_init__(self) -> None:
        keys = [(c.p, c.r) for c in self.components]
        if keys != sorted(set(keys)):
            raise InputError("components must be sorted by (p, r) with no duplicates; use .of()")

    @classmethod
    def of(cls, triples: Iterable[tuple[int, int, int]]) -> "FiniteAbelianGroup":
        """Build from (p, r, d) triples, merging duplicates and sorting."""
        merged: dict[tuple[int, int], int] = {}
        for p, r, d in triples:
            merged[(p, r)] = merged.get((p, r), 0) + d
        comps = tuple(
            GroupComponent(p=p, r=r, d=d) for (p, r), d in sorted(merged.items())
        )
        return cls(comps)

    @classmethod
    def parse(cls, text: str) -> "FiniteAbelianGroup":
        """Parse e.g. ``"2^2:2,3^1:1"``; the empty string is rejected."""
        triples = []
        for part in text.split(","):
            part = part.strip()
            m = _COMPONENT_RE.match(part)
            if not m:
                raise InputError(f"bad group component {part!r} (expected p^r:d)")
            triples.append((int(m.group(1)), int(m.group(2)), int(m.group(3))))
        return cls.of(triples)

    def format(self) -> str:
        return ",".join(c.format() for c in self.components)

    def __str__(self) -> str:
        return self.format()

    @property
    def order(self) -> int:
        n = 1
        for c in self.components:
            n *= c.q**c.d
        return n

    @property
    def exponent(self) -> int:
        e = 1
        for c in self.components:
            e = e * c.q // gcd(e, c.q)
        return e

    def coord_moduli(self) -> tuple[int, ...]:
        """Modulus of every flat coordinate, component by component."""
        out = []
        for c in self.components:
            out.extend([c.q] * c.d)
        return tuple(out)

    def zero(self) -> "GElement":
        return GElement(self, tuple((0,) * c.d for c in self.components))

    def element(self, coords: Sequence[Sequence[int]]) -> "GElement":
        """Build an element, reducing every coordinate mod its modulus."""
        if len(coords) != len(self.components):
            raise InputError(
                f"expected {len(self.components)} coordinate blocks, got {len(coords)}"
            )
        reduced = []
        for c, block in zip(self.components, coords):
            if len(block) != c.d:
                raise InputError(f"component {c.format()} needs {c.d} coordinates")
            reduced.append(tuple(int(x) % c.q for x in block))
        return GElement(self, tuple(reduced))

    def element_from_flat(self, flat: Sequence[int]) -> "GElement":
        mods = self.coord_moduli()
        if len(flat) != len(mods):
            raise InputError(f"expected {len(mods)} flat coordinates, got {len(flat)}")
        coords = []
        pos = 0
        for c in self.components:
            coords.append(tuple(int(x) % c.q for x in flat[pos : pos + c.d]))
            pos += c.d
        return GElement(self, tuple(coords))

    def elements(self) -> Iterable["GElement"]:
        """All elements in lexicographic flat-coordinate order."""
        ranges = [range(q) for q in self.coord_moduli()]
        for flat in itertools.product(*ranges):
            yield self.element_from_flat(flat)


@dataclass(frozen=True)
class GElement:
    """Group element with reduced coordinates, one tuple per component."""

    group: FiniteAbelianGroup
    coords: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        comps = self.group.components
        if len(self.coords) != len(comps):
            raise InputError("coordinate block count does not match the group")
        for c, block in zip(comps, self.coords):
            if len(block) != c.d or any(not (0 <= x < c.q) for x in block):
                raise InputError(f"coordinates out of range for component {c.format()}")

    def __add__(self, other: "GElement") -> "GElement":
        if other.group != self.group:
            raise InputError("cannot add elements of different groups")
        return GElement(
            self.group,
            tuple(
                tuple((x + y) % c.q for x, y in zip(a, b))
                for c, a, b in zip(self.group.components, self.coords, other.coords)
            ),
        )

    def __neg__(self) -> "GElement":
        return GElement(
            self.group,
            tuple(
                tuple((-x) % c.q for x in a)
                for c, a in zip(self.group.components, self.coords)
            ),
        )

    def __sub__(self, other: "GElement") -> "GElement":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(x == 0 for block in self.coords for x in block)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for block in self.coords for x in block)


def _reduce_block(block: IntMatrix, q: int) -> IntMatrix:
    return IntMatrix.from_rows([[x % q for x in row] for row in block.rows])


def _block_det_unit(block: IntMatrix, p: int) -> bool:
    return block.det() % p != 0


def is_unit(a: int, q: int, p: int) -> bool:
    """Whether a is invertible mod q = p^r: equivalent to p not dividing a."""
    if q % p != 0:
        raise InputError(f"{q} is not a power of {p}")
    return a % p != 0


def f2_block(q: int) -> IntMatrix:
    """2x2 block [[0,1],[1,1]]; its square's and its own dets are units mod 2."""
    return _reduce_block(IntMatrix.from_rows([(0, 1), (1, 1)]), q)


def f3_block(q: int) -> IntMatrix:
    """3x3 block [[0,0,1],[0,1,1],[1,1,1]] with determinant -1."""
    return _reduce_block(IntMatrix.from_rows([(0, 0, 1), (0, 1, 1), (1, 1, 1)]), q)


def is_epimorphism(group: FiniteAbelianGroup, blocks: Sequence[IntMatrix]) -> bool:
    """Whether the componentwise blocks define a surjective endomorphism.

    For a finite group this is the same as bijectivity: every block's
    determinant must be a unit mod p.
    """
    if len(blocks) != len(group.components):
        raise InputError("block count does not match the group")
    for c, b in zip(group.components, blocks):
        if b.k != c.d:
            raise InputError(f"component {c.format()} needs a {c.d}x{c.d} block")
    return all(_block_det_unit(b, c.p) for c, b in zip(group.components, blocks))


@dataclass(frozen=True)
class GAutomorphism:
    """Automorphism acting componentwise by matrices reduced mod p^r."""

    group: FiniteAbelianGroup
    blocks: tuple[IntMatrix, ...]

    def __post_init__(self) -> None:
        comps = self.group.components
        if len(self.blocks) != len(comps):
            raise InputError("block count does not match the group")
        for c, b in zip(comps, self.blocks):
            if b.k != c.d:
                raise InputError(f"component {c.format()} needs a {c.d}x{c.d} block")
            if any(not (0 <= x < c.q) for row in b.rows for x in row):
                raise InputError(f"block for {c.format()} has unreduced entries")
            if not _block_det_unit(b, c.p):
                raise InputError(
                    f"block for {c.format()} has non-unit determinant {b.det() % c.q} mod {c.q}"
                )

    @classmethod
    def from_blocks(
        cls, group: FiniteAbelianGroup, blocks: Sequence[IntMatrix]
    ) -> "GAutomorphism":
        reduced = tuple(
            _reduce_block(b, c.q) for c, b in zip(group.components, blocks, strict=True)
        )
        return cls(group, reduced)

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "GAutomorphism":
        return cls(group, tuple(IntMatrix.identity(c.d) for c in group.components))

    @classmethod
    def scalar(cls, group: FiniteAbelianGroup, m: int) -> "GAutomorphism":
        """Multiplication by the same integer m on every coordinate."""
        return cls.from_blocks(
            group, [IntMatrix.from_rows([[m * (i == j) for j in range(c.d)] for i in range(c.d)]) for c in group.components]
        )

    def apply(self, g: GElement) -> GElement:
        if g.group != self.group:
            raise InputError("element group does not match the automorphism")
        return GElement(
            self.group,
            tuple(
                tuple(v % c.q for v in b.apply(block))
                for c, b, block in zip(self.group.components, self.blocks, g.coords)
            ),
        )

    def compose(self, other: "GAutomorphism") -> "GAutomorphism":
        """self after other: (self @ other)(x) == self(other(x))."""
        if other.group != self.group:
            raise InputError("cannot compose automorphisms of different groups")
        return GAutomorphism(
            self.group,
            tuple(
                _reduce_block(a @ b, c.q)
                for c, a, b in zip(self.group.components, self.blocks, other.blocks)
            ),
        )

    def __matmul__(self, other: "GAutomorphism") -> "GAutomorphism":
        return self.compose(other)

    def power(self, t: int) -> "GAutomorphism":
        if t < 0:
            return self.inverse().power(-t)
        result = GAutomorphism.identity(self.group)
        base = self
        while t:
            if t & 1:
                result = result @ base
            base = base @ base
            t >>= 1
        return result

    def inverse(self) -> "GAutomorphism":
        inv_blocks = []
        for c, b in zip(self.group.components, self.blocks):
            inv_blocks.append(_mat_inverse_mod(b, c.q))
        return GAutomorphism(self.group, tuple(inv_blocks))

    def is_identity(self) -> bool:
        return all(b.is_identity() for b in self.blocks)

    def order(self, bound: Optional[int] = None) -> int:
        """Multiplicative order; always finite since the group is finite."""
        limit = bound if bound is not None else 10**9
        p = self
        for t in range(1, limit + 1):
            if p.is_identity():
                return t
            p = p @ self
        raise CapExceeded(f"automorphism order exceeds bound {limit}")


def _mat_inverse_mod(b: IntMatrix, q: int) -> IntMatrix:
    """Inverse mod q via the adjugate; requires det to be a unit mod q."""
    d = b.det()
    try:
        dinv = pow(d, -1, q)
    except ValueError:
        raise InputError(f"determinant {d % q} is not invertible mod {q}") from None
    n = b.k
    if n == 1:
        return IntMatrix.from_rows([[dinv % q]])
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [b.rows[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            cof = IntMatrix.from_rows(minor).det()
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof * dinv % q
    return IntMatrix.from_rows(adj)


def matrix_power_mod(f: GAutomorphism, t: int) -> GAutomorphism:
    return f.power(t)


def _component_fixed_vectors(block: IntMatrix, q: int) -> list[tuple[int, ...]]:
    """All x mod q with block @ x == x mod q, via the integer Smith form."""
    d = block.k
    b = block - IntMatrix.identity(d)
    snf = smith_normal_form(b)
    steps = []
    for di in snf.diagonal:
        g = gcd(di % q, q) or q
        steps.append((q // g, g))
    out = []
    for choice in itertools.product(*[range(g) for _, g in steps]):
        y = [c * step for c, (step, _) in zip(choice, steps)]
        x = tuple(v % q for v in snf.v.apply(y))
        out.append(x)
    # distinct by construction (v is invertible mod q); sort for determinism
    out.sort()
    return out


def fixed_points(f: GAutomorphism, cap: int = 100000) -> tuple[GElement, ...]:
    """All fixed points of f, in sorted coordinate order."""
    group = f.group
    per_comp = []
    total = 1
    for c, b in zip(group.components, f.blocks):
        vecs = _component_fixed_vectors(b, c.q)
        total *= len(vecs)
        if total > cap:
            raise CapExceeded(f"fixed point count exceeds cap {cap}")
        per_comp.append(vecs)
    combos = sorted(itertools.product(*per_comp))
    return tuple(GElement(group, tuple(combo)) for combo in combos)


def nonzero_fixed_point(f: GAutomorphism) -> Optional[GElement]:
    """A deterministic nonzero fixed point of f, or None if only zero is fixed."""
    group = f.group
    zero = group.zero()
    for idx, (c, b) in enumerate(zip(group.components, f.blocks)):
        vecs = _component_fixed_vectors(b, c.q)
        nonzero = next((v for v in vecs if any(v)), None)
        if nonzero is not None:
            coords = list(zero.coords)
            coords[idx] = nonzero
            return GElement(group, tuple(coords))
    return None


def choose_m(p: int, r: int, e: int) -> Optional[int]:
    """Least m >= 2 with m^e and 1 - m^e both units mod p^r, or None.

    Unit-ness mod p^r only depends on residues mod p, so the search range
    [2, p^2) is exhaustive.
    """
    for m in range(2, p * p):
        if m % p != 0 and (1 - pow(m, e, p)) % p != 0:
            return m
    return None
