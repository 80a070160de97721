"""Build automorphisms of G wr Z^k with finitely many twisted conjugacy classes.

Three families, keyed by arithmetic conditions on G = sum of (Z_{p^r})^d
components and on k:

* case 1: every p in {2,3} component has d >= 2. Quotient map -identity,
  fiber map from [[0,1],[1,1]] / [[0,0,1],[0,1,1],[1,1,1]] blocks (p in
  {2,3}) or a scalar m with m^2, 1-m^2 units (p > 3). Predicts 2^k classes.
* case 2: no p = 2 component and k = 2t. Quotient map a direct sum of t
  copies of the order-3 matrix [[0,1],[-1,-1]], fiber scalars m with m^3,
  1-m^3 units. Predicts 3^t classes.
* case 3: k = 4s and every p = 2 component has d >= 2. Quotient map a direct
  sum of s copies of the order-5 companion matrix of x^4+x^3+x^2+x+1, fiber
  scalar p-1 for odd p and the paired blocks for p = 2. Predicts 5^s classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .abelian import (
    FiniteAbelianGroup,
    GAutomorphism,
    GroupComponent,
    choose_m,
    f2_block,
    f3_block,
)
from .errors import InputError
from .intmat import (
    IntMatrix,
    cokernel_order,
    companion_cyclotomic_5,
    direct_sum,
)
from .wreath import WreathAutomorphism


@dataclass(frozen=True)
class CaseDecision:
    case: int
    applicable: bool
    reason: str


@dataclass(frozen=True)
class CaseReport:
    group: FiniteAbelianGroup
    k: int
    decisions: tuple[CaseDecision, ...]

    @property
    def applicable_cases(self) -> tuple[int, ...]:
        return tuple(d.case for d in self.decisions if d.applicable)


@dataclass(frozen=True)
class Construction:
    case: int
    automorphism: WreathAutomorphism
    predicted_r: int
    block_layout: tuple[str, ...]

    def __post_init__(self) -> None:
        expected = cokernel_order(IntMatrix.identity(self.k) - self.automorphism.m)
        if expected != self.predicted_r:
            raise InputError(
                f"predicted class count {self.predicted_r} disagrees with the "
                f"quotient cokernel order {expected!r}"
            )
        if len(self.block_layout) != len(self.group.components):
            raise InputError("block layout must describe every component exactly once")

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.automorphism.group

    @property
    def k(self) -> int:
        return self.automorphism.k


def classify(group: FiniteAbelianGroup, k: int) -> CaseReport:
    """Evaluate each case hypothesis exactly, with one reason string per case."""
    if k < 1:
        raise InputError(f"rank k must be >= 1, got {k}")

    small = [c for c in group.components if c.p in (2, 3)]
    bad1 = [c for c in small if c.d < 2]
    if bad1:
        reason1 = "; ".join(f"component {c.format()} has multiplicity {c.d} < 2" for c in bad1)
        ok1 = False
    else:
        reason1 = (
            "every p in {2,3} component has multiplicity >= 2"
            if small
            else "no p in {2,3} components, nothing to constrain"
        )
        ok1 = True

    twos = [c for c in group.components if c.p == 2]
    problems2 = []
    if twos:
        problems2.append(f"p = 2 component {twos[0].format()} present")
    if k % 2:
        problems2.append(f"k = {k} is odd")
    ok2 = not problems2
    reason2 = (
        f"no p = 2 components and k = 2t with t = {k // 2}"
        if ok2
        else "; ".join(problems2)
    )

    problems3 = []
    if k % 4:
        problems3.append(f"k = {k} is not a multiple of 4")
    bad3 = [c for c in twos if c.d < 2]
    problems3.extend(f"component {c.format()} has multiplicity {c.d} < 2" for c in bad3)
    ok3 = not problems3
    reason3 = (
        f"k = 4s with s = {k // 4} and every p = 2 component has multiplicity >= 2"
        if ok3
        else "; ".join(problems3)
    )

    return CaseReport(
        group=group,
        k=k,
        decisions=(
            CaseDecision(1, ok1, reason1),
            CaseDecision(2, ok2, reason2),
            CaseDecision(3, ok3, reason3),
        ),
    )


def _paired_block(comp: GroupComponent, which_case: int) -> tuple[IntMatrix, str]:
    """Cover a p in {2,3} component of multiplicity d by 2x2/3x3 blocks.

    d = 2s uses s copies of the 2x2 block; d = 2s+1 uses s-1 copies plus one
    3x3 block. Requires d >= 2.
    """
    if comp.d < 2:
        raise InputError(
            f"case {which_case} needs multiplicity >= 2 for component {comp.format()}"
        )
    s = comp.d // 2
    if comp.d % 2 == 0:
        blocks = [f2_block(comp.q)] * s
    else:
        blocks = [f2_block(comp.q)] * (s - 1) + [f3_block(comp.q)]
    layout = f"{comp.format()} = " + " + ".join(
        "F2" if b.k == 2 else "F3" for b in blocks
    )
    return direct_sum(blocks), layout


def _scalar_block(comp: GroupComponent, m: int) -> tuple[IntMatrix, str]:
    block = IntMatrix.from_rows(
        [[(m % comp.q) * (i == j) for j in range(comp.d)] for i in range(comp.d)]
    )
    return block, f"{comp.format()} = scalar {m % comp.q}"


def build_case1(group: FiniteAbelianGroup, k: int) -> Construction:
    if k < 1:
        raise InputError(f"rank k must be >= 1, got {k}")
    blocks = []
    layout = []
    for comp in group.components:
        if comp.p in (2, 3):
            b, text = _paired_block(comp, which_case=1)
        else:
            m = choose_m(comp.p, comp.r, 2)
            assert m is not None, f"no valid scalar for {comp.format()} (impossible for p > 3)"
            b, text = _scalar_block(comp, m)
        blocks.append(b)
        layout.append(text)
    phi = WreathAutomorphism(
        f=GAutomorphism.from_blocks(group, blocks),
        m=-IntMatrix.identity(k),
    )
    return Construction(case=1, automorphism=phi, predicted_r=2**k, block_layout=tuple(layout))


def build_case2(group: FiniteAbelianGroup, k: int) -> Construction:
    if k < 1 or k % 2:
        raise InputError(f"case 2 needs even k, got {k}")
    blocks = []
    layout = []
    for comp in group.components:
        if comp.p == 2:
            raise InputError(
                f"case 2 excludes p = 2 components, found {comp.format()} "
                "(no scalar has both m^3 and 1-m^3 invertible mod 2)"
            )
        m = choose_m(comp.p, comp.r, 3)
        assert m is not None, f"no valid scalar for {comp.format()} (impossible for odd p)"
        b, text = _scalar_block(comp, m)
        blocks.append(b)
        layout.append(text)
    t = k // 2
    rot = IntMatrix.from_rows([(0, 1), (-1, -1)])
    phi = WreathAutomorphism(
        f=GAutomorphism.from_blocks(group, blocks),
        m=direct_sum([rot] * t),
    )
    return Construction(case=2, automorphism=phi, predicted_r=3**t, block_layout=tuple(layout))


def build_case3(group: FiniteAbelianGroup, k: int) -> Construction:
    if k < 1 or k % 4:
        raise InputError(f"case 3 needs k divisible by 4, got {k}")
    blocks = []
    layout = []
    for comp in group.components:
        if comp.p == 2:
            b, text = _paired_block(comp, which_case=3)
        else:
            b, text = _scalar_block(comp, comp.p - 1)
        blocks.append(b)
        layout.append(text)
    s = k // 4
    phi = WreathAutomorphism(
        f=GAutomorphism.from_blocks(group, blocks),
        m=direct_sum([companion_cyclotomic_5()] * s),
    )
    return Construction(case=3, automorphism=phi, predicted_r=5**s, block_layout=tuple(layout))


_BUILDERS = {1: build_case1, 2: build_case2, 3: build_case3}


def build(
    group: FiniteAbelianGroup, k: int, case: Optional[int] = None
) -> Construction:
    """Build the requested case, or the lowest-numbered applicable one."""
    report = classify(group, k)
    if case is None:
        applicable = report.applicable_cases
        if not applicable:
            reasons = "; ".join(
                f"case {d.case}: {d.reason}" for d in report.decisions
            )
            raise InputError(f"no case applies to {group.format()} with k = {k} ({reasons})")
        case = applicable[0]
    if case not in _BUILDERS:
        raise InputError(f"unknown case {case}, expected 1, 2, or 3")
    return _BUILDERS[case](group, k)
