"""Independent ground truth on finite quotients G wr (Z_n)^k.

Elements of the finite wreath product are integer ids: id = sid * P + v,
where v indexes the translation part in (Z_n)^k (P = n^k positions, mixed
radix base n) and sid stacks the G-value of every position in mixed radix.
All group arithmetic runs vectorized over numpy arrays of ids.

Three independent counting routes are kept deliberately separate:

* union-find over the twisted conjugation graph (scipy connected components),
* twisted Burnside double counting (1/|G|) #{(g, x) : g x psi(g)^-1 = x},
* counting ordinary conjugacy classes fixed setwise by psi (the character
  count by the permutation lemma, with no character table).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .abelian import FiniteAbelianGroup, GAutomorphism, is_epimorphism
from .errors import CapExceeded, InputError
from .intmat import IntMatrix
from .verify import SigmaVerdict, classify_sigma_reidemeister
from .wreath import Support, WreathAutomorphism, WreathElement

ENUM_CAP = 2_000_000
BURNSIDE_CAP = 5_000
_CHUNK = 1 << 14


class FiniteWreath:
    """The finite wreath product G wr (Z_n)^k with id-based element arithmetic."""

    def __init__(
        self, group: FiniteAbelianGroup, n: int, k: int, cap: int = ENUM_CAP
    ) -> None:
        if n < 2:
            raise InputError(f"quotient modulus n must be >= 2, got {n}")
        if not (1 <= k <= 16):
            raise InputError(f"rank k must be in [1, 16], got {k}")
        positions = n**k
        order = group.order**positions * positions
        if order > cap:
            raise CapExceeded(
                f"|G wr (Z_{n})^{k}| = {order} exceeds the cap {cap}; "
                "reduce n, k, or the group, or raise the cap"
            )
        self.group = group
        self.n = n
        self.k = k
        self.P = positions
        self.g_order = group.order
        self.order = int(order)

        self._mods = np.array(group.coord_moduli(), dtype=np.int64)
        self.C = len(self._mods)
        self._npow = np.array([n**j for j in range(k)], dtype=np.int64)
        digits = np.empty((positions, k), dtype=np.int64)
        idx = np.arange(positions, dtype=np.int64)
        for j in range(k):
            digits[:, j] = (idx // self._npow[j]) % n
        self._pos_vecs = digits
        if self.C:
            self._gpow = np.array(
                [self.g_order**j for j in range(positions)], dtype=np.int64
            )
            self._gw = np.array(
                [int(np.prod(self._mods[:c])) for c in range(self.C)], dtype=np.int64
            )
            # (P, P) shift table is tiny here: nontrivial G forces P <= log2(cap)
            diffs = (self._pos_vecs[None, :, :] - self._pos_vecs[:, None, :]) % n
            self._shift = self._vindex(diffs).astype(np.int64)
        else:
            self._shift = None

    def _vindex(self, digits: np.ndarray) -> np.ndarray:
        return (digits * self._npow).sum(axis=-1)

    def _vadd(self, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
        return self._vindex((self._pos_vecs[v1] + self._pos_vecs[v2]) % self.n)

    def _vneg(self, v: np.ndarray) -> np.ndarray:
        return self._vindex((-self._pos_vecs[v]) % self.n)

    def all_ids(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def decode(self, ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """ids -> (coords of shape (N, P, C), translation indices of shape (N,))."""
        ids = np.asarray(ids, dtype=np.int64)
        v = ids % self.P
        if self.C == 0:
            return np.empty((len(ids), self.P, 0), dtype=np.int64), v
        sid = ids // self.P
        gidx = (sid[:, None] // self._gpow[None, :]) % self.g_order
        coords = (gidx[:, :, None] // self._gw[None, None, :]) % self._mods[None, None, :]
        return coords, v

    def encode(self, coords: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.C == 0:
            return np.asarray(v, dtype=np.int64).copy()
        gidx = (coords * self._gw[None, None, :]).sum(axis=2)
        sid = (gidx * self._gpow[None, :]).sum(axis=1)
        return sid * self.P + np.asarray(v, dtype=np.int64)

    def multiply(self, ca, va, cb, vb) -> tuple[np.ndarray, np.ndarray]:
        """(sigma1, v1)(sigma2, v2) = (sigma1 + shift_{v1} sigma2, v1 + v2)."""
        count = len(va)
        if self.C:
            idx = self._shift[va]
            shifted = cb[np.arange(count)[:, None], idx, :]
            coords = (ca + shifted) % self._mods
        else:
            coords = np.broadcast_to(ca, (count, self.P, 0))
        return coords, self._vadd(va, vb)

    def invert(self, c, v) -> tuple[np.ndarray, np.ndarray]:
        count = len(v)
        nv = self._vneg(v)
        if self.C:
            idx = self._shift[nv]
            gathered = c[np.arange(count)[:, None], idx, :]
            coords = (-gathered) % self._mods
        else:
            coords = np.broadcast_to(c, (count, self.P, 0))
        return coords, nv

    def generators(self) -> list[int]:
        """ids generating the group: translation basis vectors plus one point
        mass per G-coordinate at the origin (translations conjugate them to
        every position)."""
        gens = []
        for j in range(self.k):
            gens.append(int(self.n**j))
        zero = np.zeros((1, self.P, self.C), dtype=np.int64)
        for c in range(self.C):
            delta = zero.copy()
            delta[0, 0, c] = 1
            gens.append(int(self.encode(delta, np.zeros(1, dtype=np.int64))[0]))
        return gens

    def to_element(self, idx: int) -> WreathElement:
        coords, v = self.decode(np.array([idx], dtype=np.int64))
        pairs = []
        if self.C:
            for j in range(self.P):
                flat = coords[0, j]
                if flat.any():
                    pos = tuple(int(x) for x in self._pos_vecs[j])
                    pairs.append(
                        (pos, self.group.element_from_flat([int(x) for x in flat]))
                    )
        z = tuple(int(x) for x in self._pos_vecs[int(v[0])])
        return WreathElement(Support.make(self.group, self.k, pairs), z)

    def from_element(self, el: WreathElement) -> int:
        if el.group != self.group or el.k != self.k:
            raise InputError("element does not live in this wreath product")
        coords = np.zeros((1, self.P, self.C), dtype=np.int64)
        for pos, val in el.sigma.entries:
            j = int(self._vindex(np.array([p % self.n for p in pos], dtype=np.int64)))
            coords[0, j, :] = (coords[0, j, :] + np.array(val.flat())) % self._mods
        v = int(self._vindex(np.array([z % self.n for z in el.z], dtype=np.int64)))
        return int(self.encode(coords, np.array([v], dtype=np.int64))[0])


class FiniteAutomorphism:
    """Descent of a normalized automorphism to the finite quotient."""

    def __init__(self, gamma: FiniteWreath, phi: WreathAutomorphism) -> None:
        if phi.group != gamma.group or phi.k != gamma.k:
            raise InputError("automorphism does not match the finite wreath product")
        self.gamma = gamma
        self.phi = phi
        n = gamma.n
        pv = gamma._pos_vecs
        m_rows = np.array(phi.m.rows, dtype=np.int64)
        twist = np.array(phi.twist, dtype=np.int64)
        pos_map = gamma._vindex((pv @ m_rows.T + twist) % n)
        self._inv_pos_map = np.argsort(pos_map)
        self._v_map = gamma._vindex((pv @ m_rows.T) % n)
        self._blocks = [np.array(b.rows, dtype=np.int64) for b in phi.f.blocks]
        self._spans = []
        start = 0
        for comp in gamma.group.components:
            self._spans.append((start, start + comp.d, comp.q))
            start += comp.d

    @classmethod
    def identity(cls, gamma: FiniteWreath) -> "FiniteAutomorphism":
        phi = WreathAutomorphism(
            f=GAutomorphism.identity(gamma.group), m=IntMatrix.identity(gamma.k)
        )
        return cls(gamma, phi)

    def apply_parts(self, coords: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gamma = self.gamma
        if gamma.C:
            out = np.empty_like(coords)
            for blk, (lo, hi, q) in zip(self._blocks, self._spans):
                out[:, :, lo:hi] = coords[:, :, lo:hi] @ blk.T % q
            coords = out[:, self._inv_pos_map, :]
        return coords, self._v_map[v]

    def apply_ids(self, ids: np.ndarray) -> np.ndarray:
        gamma = self.gamma
        ids = np.asarray(ids, dtype=np.int64)
        out = np.empty_like(ids)
        for lo in range(0, len(ids), _CHUNK):
            chunk = ids[lo : lo + _CHUNK]
            coords, v = gamma.decode(chunk)
            coords, v = self.apply_parts(coords, v)
            out[lo : lo + _CHUNK] = gamma.encode(coords, v)
        return out


def descend(phi: WreathAutomorphism, n: int, cap: int = ENUM_CAP) -> FiniteAutomorphism:
    """Reduce a normalized automorphism mod n, building the finite quotient."""
    gamma = FiniteWreath(phi.group, n, phi.k, cap=cap)
    return FiniteAutomorphism(gamma, phi)


@dataclass(frozen=True, eq=False)
class TwistedClasses:
    count: int
    representatives: tuple[int, ...]
    labels: np.ndarray = field(repr=False)


def twisted_classes_bruteforce(
    gamma: FiniteWreath, psi: FiniteAutomorphism
) -> TwistedClasses:
    """Partition all of Gamma by x ~ g x psi(g)^-1 over a generating set of g.

    The relation generated by a generating set is the full twisted conjugacy
    relation (the maps x -> g x psi(g)^-1 compose like the group), so one
    connected-components sweep of the merge graph is exact.
    """
    order = gamma.order
    ids = gamma.all_ids()
    rows, cols = [], []
    for gen in gamma.generators():
        gc, gv = gamma.decode(np.array([gen], dtype=np.int64))
        wid = psi.apply_ids(np.array([gen], dtype=np.int64))
        wc, wv = gamma.decode(wid)
        wc, wv = gamma.invert(wc, wv)
        for lo in range(0, order, _CHUNK):
            chunk = ids[lo : lo + _CHUNK]
            xc, xv = gamma.decode(chunk)
            count = len(chunk)
            lc, lv = gamma.multiply(
                np.broadcast_to(gc, (count, gamma.P, gamma.C)),
                np.broadcast_to(gv, (count,)),
                xc,
                xv,
            )
            yc, yv = gamma.multiply(
                lc,
                lv,
                np.broadcast_to(wc, (count, gamma.P, gamma.C)),
                np.broadcast_to(wv, (count,)),
            )
            y = gamma.encode(yc, yv)
            rows.append(chunk.astype(np.int32))
            cols.append(y.astype(np.int32))
    graph = coo_matrix(
        (
            np.ones(sum(len(r) for r in rows), dtype=np.int8),
            (np.concatenate(rows), np.concatenate(cols)),
        ),
        shape=(order, order),
    ).tocsr()
    n_comp, labels = connected_components(graph, directed=False)
    reps = np.full(n_comp, order, dtype=np.int64)
    np.minimum.at(reps, labels, ids)
    return TwistedClasses(
        count=int(n_comp),
        representatives=tuple(int(r) for r in sorted(reps)),
        labels=labels,
    )


def burnside_count(
    gamma: FiniteWreath, psi: FiniteAutomorphism, cap: int = BURNSIDE_CAP
) -> int:
    """(1/|Gamma|) #{(g, x) : g x psi(g)^-1 = x}, an exact integer."""
    order = gamma.order
    if order > cap:
        raise CapExceeded(
            f"|Gamma| = {order} exceeds the pair-iteration cap {cap}"
        )
    ids = gamma.all_ids()
    xc, xv = gamma.decode(ids)
    psi_ids = psi.apply_ids(ids)
    total = 0
    for gid in range(order):
        gc, gv = gamma.decode(np.array([gid], dtype=np.int64))
        wc, wv = gamma.decode(psi_ids[gid : gid + 1])
        wc, wv = gamma.invert(wc, wv)
        lc, lv = gamma.multiply(
            np.broadcast_to(gc, (order, gamma.P, gamma.C)),
            np.broadcast_to(gv, (order,)),
            xc,
            xv,
        )
        yc, yv = gamma.multiply(
            lc,
            lv,
            np.broadcast_to(wc, (order, gamma.P, gamma.C)),
            np.broadcast_to(wv, (order,)),
        )
        y = gamma.encode(yc, yv)
        total += int((y == ids).sum())
    if total % order:
        raise AssertionError(
            f"Burnside total {total} is not divisible by |Gamma| = {order}: "
            "the group law is broken"
        )
    return total // order


def fixed_conjugacy_classes(gamma: FiniteWreath, psi: FiniteAutomorphism) -> int:
    """Number of ordinary conjugacy classes mapped to themselves by psi.

    psi permutes the ordinary classes, so a class is fixed exactly when the
    image of its representative lands back in it.
    """
    ordinary = twisted_classes_bruteforce(gamma, FiniteAutomorphism.identity(gamma))
    labels = ordinary.labels
    reps = np.array(ordinary.representatives, dtype=np.int64)
    images = psi.apply_ids(reps)
    return int((labels[images] == labels[reps]).sum())


def _base_twisted_labels(gamma: FiniteWreath, m: IntMatrix) -> np.ndarray:
    """Twisted classes of the induced map on (Z_n)^k: v ~ v + (E - M)c."""
    n, k, P = gamma.n, gamma.k, gamma.P
    m_rows = np.array(m.rows, dtype=np.int64)
    pv = gamma._pos_vecs
    step_maps = []
    for j in range(k):
        sv = (np.eye(k, dtype=np.int64)[j] - m_rows[:, j]) % n
        step_maps.append(gamma._vindex((pv + sv) % n))
        step_maps.append(gamma._vindex((pv - sv) % n))
    labels = np.full(P, -1, dtype=np.int64)
    nxt = 0
    for start in range(P):
        if labels[start] >= 0:
            continue
        frontier = np.array([start], dtype=np.int64)
        labels[start] = nxt
        while frontier.size:
            nbs = np.unique(np.concatenate([sm[frontier] for sm in step_maps]))
            nbs = nbs[labels[nbs] < 0]
            labels[nbs] = nxt
            frontier = nbs
        nxt += 1
    return labels


def _quotient_epi_verdicts_hold(gamma: FiniteWreath, phi: WreathAutomorphism) -> bool:
    """Mirror of the infinite-level orbit checks on (Z_n)^k: for every base
    class representative c and every realized cycle length L of
    u -> Mu + twist + c mod n, the blocks of F^L - E must all be units."""
    n = gamma.n
    m_rows = np.array(phi.m.rows, dtype=np.int64)
    twist = np.array(phi.twist, dtype=np.int64)
    base = _base_twisted_labels(gamma, phi.m)
    reps = [int(np.nonzero(base == lab)[0][0]) for lab in range(int(base.max()) + 1)]
    group = gamma.group
    for rep in reps:
        c_vec = gamma._pos_vecs[rep]
        seen = np.zeros(gamma.P, dtype=bool)
        lengths = set()
        for start in range(gamma.P):
            if seen[start]:
                continue
            cur = start
            cycle = []
            while not seen[cur]:
                seen[cur] = True
                cycle.append(cur)
                cur = int(gamma._vindex((gamma._pos_vecs[cur] @ m_rows.T + twist + c_vec) % n))
            lengths.add(len(cycle))
        for length in sorted(lengths):
            power = phi.f.power(length)
            blocks = [b - IntMatrix.identity(b.k) for b in power.blocks]
            if not is_epimorphism(group, blocks):
                return False
    return True


@dataclass(frozen=True)
class PullbackResult:
    """Outcome of the cylinder test: are twisted classes of Gamma exactly the
    preimages of the base classes on (Z_n)^k?

    `cylinder` is always computed exhaustively. `verdict` gates it behind the
    preconditions (the infinite-level classifier said One, and the orbit
    verdicts still hold mod n): "holds"/"fails" when they are met,
    "inconclusive" otherwise.
    """

    cylinder: bool
    verdict: str
    base_count: int
    class_count: int
    preconditions_ok: bool
    counterexample: Optional[tuple[WreathElement, WreathElement]]


def pullback_check(
    gamma: FiniteWreath,
    psi: FiniteAutomorphism,
    phi: Optional[WreathAutomorphism] = None,
) -> PullbackResult:
    """Exhaustively test the cylinder structure of twisted classes.

    The projection to (Z_n)^k sends twisted classes into base twisted
    classes, so the class partition always refines the preimage partition;
    the structure holds exactly when the counts agree. A counterexample is a
    pair with equal projections in different classes.
    """
    base_labels = _base_twisted_labels(gamma, psi.phi.m)
    base_count = int(base_labels.max()) + 1
    classes = twisted_classes_bruteforce(gamma, psi)
    ids = gamma.all_ids()
    vbase = base_labels[ids % gamma.P]
    cylinder = classes.count == base_count
    counterexample = None
    if not cylinder:
        # two elements over one base class in different twisted classes
        order_keys = np.lexsort((classes.labels, vbase))
        sorted_ids = ids[order_keys]
        sv = vbase[order_keys]
        sl = classes.labels[order_keys]
        split = np.nonzero((sv[1:] == sv[:-1]) & (sl[1:] != sl[:-1]))[0][0]
        counterexample = (
            gamma.to_element(int(sorted_ids[split])),
            gamma.to_element(int(sorted_ids[split + 1])),
        )
    pre_ok = False
    if phi is not None:
        try:
            verdict: SigmaVerdict = classify_sigma_reidemeister(phi)
            pre_ok = verdict.kind == "One" and _quotient_epi_verdicts_hold(gamma, phi)
        except InputError:
            pre_ok = False
    if pre_ok:
        verdict_text = "holds" if cylinder else "fails"
    else:
        verdict_text = "inconclusive"
    return PullbackResult(
        cylinder=cylinder,
        verdict=verdict_text,
        base_count=base_count,
        class_count=classes.count,
        preconditions_ok=pre_ok,
        counterexample=counterexample,
    )
