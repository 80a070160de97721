"""Pure request -> response functions behind both the HTTP app and the CLI.

Handlers raise InputError for requests that cannot be satisfied and
CapExceeded when an enumeration would blow past its cap; the HTTP layer maps
those to 400 and 413, the CLI to exit codes 2 and 3.
"""

from __future__ import annotations

import time

from .. import __version__
from ..abelian import FiniteAbelianGroup, GAutomorphism
from ..construct import Construction, build, classify
from ..errors import CapExceeded, InputError
from ..intmat import INFINITE, IntMatrix
from ..oracle import (
    burnside_count,
    descend,
    fixed_conjugacy_classes,
    pullback_check,
    twisted_classes_bruteforce,
)
from ..verify import VerificationReport, full_verify
from ..wreath import (
    WreathAutomorphism,
    WreathElement,
    check_compatibility,
    format_element,
)
from .models import (
    AutomorphismModel,
    CaseDecisionModel,
    ClassifyRequest,
    ClassifyResponse,
    ComponentCheckModel,
    ConstructionModel,
    ConstructRequest,
    OracleRequest,
    OracleResponse,
    OrbitCheckModel,
    PullbackModel,
    QuotientReportModel,
    RepVerdictModel,
    ReportInput,
    ReportRequest,
    RunReport,
    VerifyRequest,
    VerifyResponse,
)

_SAMPLE_LIMIT = 10
_COMPAT_SAMPLES = 25


def _ext(value):
    return "infinite" if value is INFINITE else int(value)


def do_classify(req: ClassifyRequest) -> ClassifyResponse:
    group = FiniteAbelianGroup.parse(req.group)
    report = classify(group, req.k)
    return ClassifyResponse(
        group=group.format(),
        k=req.k,
        decisions=[
            CaseDecisionModel(case=d.case, applicable=d.applicable, reason=d.reason)
            for d in report.decisions
        ],
        applicable_cases=list(report.applicable_cases),
    )


def _construction_model(c: Construction) -> ConstructionModel:
    phi = c.automorphism
    return ConstructionModel(
        case=c.case,
        automorphism=AutomorphismModel(
            group=phi.group.format(),
            k=phi.k,
            f_blocks=[b.format() for b in phi.f.blocks],
            m=phi.m.format(),
            twist=list(phi.twist),
        ),
        predicted_r=c.predicted_r,
        block_layout=list(c.block_layout),
    )


def rebuild_construction(model: ConstructionModel) -> Construction:
    """Deserialize a construction artifact, validating every part."""
    group = FiniteAbelianGroup.parse(model.automorphism.group)
    blocks = [IntMatrix.parse(text) for text in model.automorphism.f_blocks]
    f = GAutomorphism.from_blocks(group, blocks)
    m = IntMatrix.parse(model.automorphism.m)
    if m.k != model.automorphism.k:
        raise InputError(
            f"quotient matrix is {m.k}x{m.k} but the artifact declares k = "
            f"{model.automorphism.k}"
        )
    phi = WreathAutomorphism(f=f, m=m, twist=tuple(model.automorphism.twist))
    return Construction(
        case=model.case,
        automorphism=phi,
        predicted_r=model.predicted_r,
        block_layout=tuple(model.block_layout),
    )


def do_construct(req: ConstructRequest) -> ConstructionModel:
    group = FiniteAbelianGroup.parse(req.group)
    return _construction_model(build(group, req.k, case=req.case))


def _verify_response(c: Construction, report: VerificationReport) -> VerifyResponse:
    k = c.k
    per = []
    for rv in report.per_rep:
        checks = [
            OrbitCheckModel(
                start=list(oc.start),
                points=[list(p) for p in oc.points],
                length=oc.length,
                epimorphic=oc.epimorphic,
                components=[
                    ComponentCheckModel(
                        p=cc.p,
                        r=cc.r,
                        d=cc.d,
                        det_assembled=cc.det_assembled,
                        det_power=cc.det_power,
                        unit=cc.unit,
                    )
                    for cc in oc.components
                ],
            )
            for oc in rv.orbit_checks
        ]
        witness = None
        if rv.witness is not None:
            witness = format_element(WreathElement(rv.witness, (0,) * k))
        per.append(
            RepVerdictModel(
                rep=list(rv.rep),
                verdict=rv.verdict,
                orbit_checks=checks,
                witness=witness,
            )
        )
    return VerifyResponse(
        group=c.group.format(),
        k=k,
        r_bar=_ext(report.r_bar),
        representatives=[list(r) for r in report.representatives],
        per_rep=per,
        r_total=_ext(report.r_total),
        certified=report.r_total is not INFINITE,
    )


def do_verify(req: VerifyRequest) -> VerifyResponse:
    c = rebuild_construction(req.construction)
    return _verify_response(c, full_verify(c))


def _quotient_counts(phi: WreathAutomorphism, n: int, cap: int):
    psi = descend(phi, n, cap=cap)
    gamma = psi.gamma
    classes = twisted_classes_bruteforce(gamma, psi)
    try:
        burnside = burnside_count(gamma, psi)
        note = None
    except CapExceeded as exc:
        burnside = None
        note = str(exc)
    fixed = fixed_conjugacy_classes(gamma, psi)
    agree = classes.count == fixed and (burnside is None or burnside == classes.count)
    return psi, classes, burnside, note, fixed, agree


def do_oracle(req: OracleRequest) -> OracleResponse:
    group = FiniteAbelianGroup.parse(req.group)
    c = build(group, req.k, case=req.case)
    started = time.perf_counter()
    psi, classes, burnside, note, fixed, agree = _quotient_counts(
        c.automorphism, req.n, req.cap
    )
    gamma = psi.gamma
    sample = [
        format_element(gamma.to_element(r))
        for r in classes.representatives[:_SAMPLE_LIMIT]
    ]
    return OracleResponse(
        group=group.format(),
        k=req.k,
        n=req.n,
        case=c.case,
        order=gamma.order,
        class_count=classes.count,
        burnside=burnside,
        burnside_note=note,
        fixed_class_count=fixed,
        counts_agree=agree,
        representative_sample=sample,
        timing_s=round(time.perf_counter() - started, 3),
    )


def _quotient_report(phi: WreathAutomorphism, n: int, cap: int) -> QuotientReportModel:
    psi, classes, burnside, note, fixed, agree = _quotient_counts(phi, n, cap)
    gamma = psi.gamma
    pull = pullback_check(gamma, psi, phi=phi)
    counterexample = None
    if pull.counterexample is not None:
        counterexample = [format_element(el) for el in pull.counterexample]
    return QuotientReportModel(
        n=n,
        order=gamma.order,
        class_count=classes.count,
        burnside=burnside,
        burnside_note=note,
        fixed_class_count=fixed,
        counts_agree=agree,
        pullback=PullbackModel(
            cylinder=pull.cylinder,
            verdict=pull.verdict,
            base_count=pull.base_count,
            class_count=pull.class_count,
            preconditions_ok=pull.preconditions_ok,
            counterexample=counterexample,
        ),
    )


def do_report(req: ReportRequest) -> RunReport:
    group = FiniteAbelianGroup.parse(req.group)
    classification = do_classify(ClassifyRequest(group=req.group, k=req.k))
    c = build(group, req.k, case=req.case)
    phi = c.automorphism
    compatibility_ok = check_compatibility(
        phi.f, phi.m, _COMPAT_SAMPLES, seed=req.seed
    )
    verification = full_verify(c)
    verify_model = _verify_response(c, verification)
    failures = []
    if not compatibility_ok:
        failures.append("compatibility: sampled automorphism identity failed")
    if not verify_model.certified:
        failures.append("verification: r_total is infinite")
    quotients = []
    for n in sorted(set(req.n)):
        q = _quotient_report(phi, n, req.cap)
        quotients.append(q)
        if not q.counts_agree:
            failures.append(
                f"oracle n={n}: counts disagree (classes={q.class_count}, "
                f"burnside={q.burnside}, fixed={q.fixed_class_count})"
            )
        if q.pullback.verdict != "holds":
            failures.append(f"pullback n={n}: verdict {q.pullback.verdict}")
    return RunReport(
        version=__version__,
        input=ReportInput(
            group=req.group,
            k=req.k,
            case=req.case,
            n=list(req.n),
            seed=req.seed,
            cap=req.cap,
        ),
        group_canonical=group.format(),
        classification=classification,
        construction=_construction_model(c),
        compatibility_samples=_COMPAT_SAMPLES,
        compatibility_ok=compatibility_ok,
        verification=verify_model,
        quotients=quotients,
        consistency_ok=not failures,
        failures=failures,
    )


HANDLERS = {
    "classify": (ClassifyRequest, do_classify),
    "construct": (ConstructRequest, do_construct),
    "verify": (VerifyRequest, do_verify),
    "oracle": (OracleRequest, do_oracle),
    "report": (ReportRequest, do_report),
}
