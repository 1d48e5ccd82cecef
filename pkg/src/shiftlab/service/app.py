"""FastAPI service exposing the certification core.

Every endpoint is a thin wrapper over a handler function; the CLI calls the
same handlers in-process.  Domain outcomes travel as response payloads,
structural problems map to HTTP 400 and infeasibility to HTTP 409.
"""
from __future__ import annotations

import math
from random import Random

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import serialize
from ..errors import (
    CycleError,
    EmptyFamily,
    EmptyForestError,
    DanglingParentError,
    ForklessInput,
    FrontierMismatch,
    HasLeaf,
    InfeasibleExtension,
    InvalidMomentSequence,
    MemberInfeasible,
    MemberNotExtendable,
    NotATree,
    NotProbability,
    NotProper,
    NotRootedTree,
    NotSubnormalInput,
    RootFork,
    ScaleOutOfRange,
    ShiftLabError,
    UnknownVertex,
    VertexCollision,
)
from ..forest import (
    backward_extend_tree,
    classify_forkless,
    components,
    power_k,
    rooted_sum,
)
from ..generators import random_nonforkless_tree
from ..hypo import check_hyponormal_power, check_power_hyponormal
from ..measures import MomentSeq, determinacy_guard, hankel_check, moments_of
from ..rationals import GaussianRational, parse_ratio
from ..shifts import (
    gauge_conjugation_defect,
    phase_gauge,
    shift_norm_sq,
    vertex_measure,
)
from ..subnormal import (
    check_subnormal,
    construct_backward_extension,
    join_at_depth,
    powerhypo_rooted_sum_extend,
    rooted_sum_extend,
)
from . import schemas as sm

INFEASIBLE_ERRORS = (
    InfeasibleExtension,
    MemberInfeasible,
    MemberNotExtendable,
    ForklessInput,
    RootFork,
    NotSubnormalInput,
    FrontierMismatch,
)

STRUCTURAL_ERRORS = (
    CycleError,
    DanglingParentError,
    EmptyForestError,
    UnknownVertex,
    VertexCollision,
    EmptyFamily,
    NotRootedTree,
    NotATree,
    NotProper,
    HasLeaf,
    NotProbability,
    InvalidMomentSequence,
    ScaleOutOfRange,
    ValueError,
)


def translate_error(exc: Exception) -> tuple[int, sm.ErrorResponse]:
    """Map a domain exception to (http status, error payload)."""
    witness = None
    if isinstance(exc, CycleError):
        witness = exc.witness
    elif isinstance(exc, (MemberInfeasible, MemberNotExtendable)):
        witness = exc.index
    if isinstance(exc, INFEASIBLE_ERRORS):
        return 409, sm.ErrorResponse(
            status="infeasible", error=type(exc).__name__, detail=str(exc), witness=witness
        )
    if isinstance(exc, STRUCTURAL_ERRORS):
        return 400, sm.ErrorResponse(
            status="error", error=type(exc).__name__, detail=str(exc), witness=witness
        )
    raise exc


def _forest(model: sm.ForestModel):
    return serialize.forest_from_json(model.model_dump())


def _shift(model: sm.ShiftModel):
    return serialize.shift_from_json(model.model_dump())


def _forest_response(forest, summary=None) -> sm.ForestResponse:
    return sm.ForestResponse(
        forest=sm.ForestModel(**serialize.forest_to_json(forest)),
        roots=list(forest.roots),
        components=len(components(forest)),
        summary=summary,
    )


def handle_forest_validate(req: sm.ForestValidateRequest) -> sm.ForestResponse:
    forest = _forest(req.forest)
    return _forest_response(forest, summary=f"{len(forest.vertices)} vertices")


def handle_forest_power(req: sm.ForestPowerRequest) -> sm.ForestResponse:
    forest = power_k(_forest(req.forest), req.k)
    return _forest_response(forest, summary=f"power {req.k}")


def handle_forest_rooted_sum(req: sm.ForestRootedSumRequest) -> sm.ForestResponse:
    trees = [_forest(m) for m in req.forests]
    return _forest_response(rooted_sum(trees, auto_prefix=req.auto_prefix), summary="rooted sum")


def handle_forest_backward(req: sm.ForestBackwardRequest) -> sm.ForestResponse:
    forest = backward_extend_tree(_forest(req.forest), req.k)
    return _forest_response(forest, summary=f"{req.k}-step backward extension")


def handle_forest_classify(req: sm.ForestClassifyRequest) -> sm.ClassifyResponse:
    kind = classify_forkless(_forest(req.forest), req.tailed_leaves)
    return sm.ClassifyResponse(kind=kind.kind, arms=kind.arms)


def handle_check(req: sm.CheckRequest) -> sm.CheckResponse:
    s = _shift(req.shift)
    mode = req.mode
    if req.property == "hyponormal":
        report = check_hyponormal_power(s, req.k)
        status = (
            "holds"
            if report.holds()
            else ("obstruction" if report.verdict == "leaf-obstruction" else "fails")
        )
        return sm.CheckResponse(
            status=status,
            property=req.property,
            witness=report.witness,
            reports=[serialize.hip_report_to_json(report, mode)],
        )
    if req.property == "power-hyponormal":
        result = check_power_hyponormal(s, req.k_max)
        failure = result.first_failure()
        if failure is None:
            status = "holds"
            witness = None
        elif failure.verdict == "leaf-obstruction":
            status = "obstruction"
            witness = failure.witness
        else:
            status = "fails"
            witness = failure.witness
        return sm.CheckResponse(
            status=status,
            property=req.property,
            witness=witness,
            reports=[serialize.hip_report_to_json(r, mode) for r in result.reports],
            all_k_certified=result.all_k_certified,
        )
    cert = check_subnormal(s)
    return sm.CheckResponse(
        status="holds" if cert.holds() else "fails",
        property=req.property,
        witness=cert.witness,
        certificate=serialize.subnormal_cert_to_json(cert, mode),
    )


def handle_extend_single(req: sm.ExtendSingleRequest) -> sm.ExtendResponse:
    s = _shift(req.shift)
    extended, plan = construct_backward_extension(s, req.k, req.scale)
    return sm.ExtendResponse(
        shift=serialize.shift_to_json(extended, req.mode),
        plan=serialize.plan_to_json(plan, req.mode),
    )


def handle_extend_rooted_sum(req: sm.ExtendRootedSumRequest) -> sm.ExtendResponse:
    members = [_shift(m) for m in req.shifts]
    res = rooted_sum_extend(members, req.k)
    return sm.ExtendResponse(
        shift=serialize.shift_to_json(res.shift, req.mode),
        theta_sq=[serialize.ratio_out(x, req.mode) for x in res.theta_sq],
    )


def handle_extend_join_depth(req: sm.ExtendJoinDepthRequest) -> sm.ExtendResponse:
    members = [_shift(m) for m in req.shifts]
    res = join_at_depth(members, _forest(req.envelope), req.k)
    return sm.ExtendResponse(
        shift=serialize.shift_to_json(res.shift, req.mode),
        frontier=list(res.frontier),
    )


def handle_extend_powerhypo(req: sm.ExtendPowerhypoRequest) -> sm.ExtendResponse:
    members = [(_shift(m.shift), m.ext_sq) for m in req.members]
    res = powerhypo_rooted_sum_extend(members, req.k_max, req.scales_sq)
    return sm.ExtendResponse(
        shift=serialize.shift_to_json(res.shift, req.mode),
        root_sq=[serialize.ratio_out(x, req.mode) for x in res.root_sq],
    )


def handle_counterexample(req: sm.CounterexampleRequest) -> sm.CounterexampleResponse:
    from ..hypo import make_counterexample

    if req.tree is not None:
        tree = _forest(req.tree)
    elif req.generate is not None:
        tree = random_nonforkless_tree(Random(req.seed), n_max=req.generate)
    else:
        raise ValueError("provide a tree or a generate size")
    ce = make_counterexample(tree, req.fork)
    first = check_hyponormal_power(ce.shift, 1)
    verification = {
        "hip_1": serialize.hip_report_to_json(first, req.mode)["hip"],
        "hip_1_max": serialize.ratio_out(max(first.values.values()), req.mode),
        "hip_2_at_v0": serialize.ratio_out(ce.hip2_at_v0, req.mode),
        "norm_sq": serialize.ratio_out(shift_norm_sq(ce.shift), req.mode),
    }
    return sm.CounterexampleResponse(
        shift=serialize.shift_to_json(ce.shift, req.mode),
        v0=ce.v0,
        v1=ce.v1,
        v2=ce.v2,
        beta=serialize.ratio_out(ce.beta, req.mode),
        grafted=ce.grafted,
        verification=verification,
    )


def handle_gauge(req: sm.GaugeRequest) -> sm.GaugeResponse:
    forest = _forest(req.forest)
    if req.mode == "exact":
        lam = {
            v: GaussianRational(parse_ratio(z.re), parse_ratio(z.im))
            for v, z in req.weights.items()
        }
        beta = phase_gauge(forest, lam, mode="exact")
        defect = gauge_conjugation_defect(forest, lam, beta, mode="exact")
        out = {
            v: sm.ComplexModel(
                re=serialize.ratio_out(b.re, "exact"), im=serialize.ratio_out(b.im, "exact")
            )
            for v, b in beta.items()
        }
        return sm.GaugeResponse(beta=out, verified=defect == 0, max_error=float(defect))
    lam = {v: complex(float(parse_ratio(z.re)), float(parse_ratio(z.im))) for v, z in req.weights.items()}
    beta = phase_gauge(forest, lam, mode="float")
    defect = gauge_conjugation_defect(forest, lam, beta, mode="float")
    out = {v: sm.ComplexModel(re=b.real, im=b.imag) for v, b in beta.items()}
    return sm.GaugeResponse(beta=out, verified=defect <= req.tolerance, max_error=defect)


def handle_moments(req: sm.MomentsRequest) -> sm.MomentsResponse:
    if (req.measure is None) == (req.shift is None):
        raise ValueError("provide exactly one of measure or shift")
    mode = req.mode
    if req.measure is not None:
        measure = serialize.measure_from_json(req.measure.model_dump())
        seq = moments_of(measure, req.n_max)
        neg = None
        if req.k_negative >= 1:
            val = measure.neg_moment(req.k_negative)
            neg = "inf" if val is math.inf else serialize.ratio_out(val, mode)
        return sm.MomentsResponse(
            moments=[serialize.ratio_out(x, mode) for x in seq.values],
            hankel=serialize.hankel_to_json(hankel_check(seq), mode),
            neg_moment=neg,
        )
    s = _shift(req.shift)
    if req.vertex is None:
        raise ValueError("shift moments need a vertex")
    seq = MomentSeq([s.moment(req.vertex, n) for n in range(req.n_max + 1)])
    report = vertex_measure(s, req.vertex)
    return sm.MomentsResponse(
        moments=[serialize.ratio_out(x, mode) for x in seq.values],
        hankel=serialize.hankel_to_json(hankel_check(seq), mode),
        determinate=determinacy_guard(seq, shift_norm_sq(s)),
        measure=serialize.measure_to_json(report.measure, mode) if report.feasible else None,
        defect=serialize.ratio_out(report.defect, mode) if report.feasible else None,
        feasible=report.feasible,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="shiftlab",
        description="Exact certification of weighted shifts on directed forests",
        version="0.1.0",
    )

    @app.exception_handler(ShiftLabError)
    async def _domain_error(_, exc: ShiftLabError):
        code, payload = translate_error(exc)
        return JSONResponse(status_code=code, content=payload.model_dump())

    @app.exception_handler(ValueError)
    async def _value_error(_, exc: ValueError):
        code, payload = translate_error(exc)
        return JSONResponse(status_code=code, content=payload.model_dump())

    @app.get("/health")
    def health():
        return {"status": "ok", "service": "shiftlab"}

    app.post("/forest/validate", response_model=sm.ForestResponse)(handle_forest_validate)
    app.post("/forest/power", response_model=sm.ForestResponse)(handle_forest_power)
    app.post("/forest/rooted-sum", response_model=sm.ForestResponse)(handle_forest_rooted_sum)
    app.post("/forest/backward", response_model=sm.ForestResponse)(handle_forest_backward)
    app.post("/forest/classify", response_model=sm.ClassifyResponse)(handle_forest_classify)
    app.post("/check", response_model=sm.CheckResponse)(handle_check)
    app.post("/extend/single", response_model=sm.ExtendResponse)(handle_extend_single)
    app.post("/extend/rooted-sum", response_model=sm.ExtendResponse)(handle_extend_rooted_sum)
    app.post("/extend/join-depth", response_model=sm.ExtendResponse)(handle_extend_join_depth)
    app.post("/extend/powerhypo", response_model=sm.ExtendResponse)(handle_extend_powerhypo)
    app.post("/counterexample", response_model=sm.CounterexampleResponse)(handle_counterexample)
    app.post("/gauge", response_model=sm.GaugeResponse)(handle_gauge)
    app.post("/moments", response_model=sm.MomentsResponse)(handle_moments)
    return app


app = create_app()
