"""Command-line client for the certification service.

Subcommands mirror the service endpoints one-to-one and call the same
handlers in-process, so results are available offline and byte-identical
to HTTP responses.  Exit codes: 0 the property holds / success, 2
structural problem or obstruction, 3 the property fails, 4 infeasible.
"""
from __future__ import annotations

import argparse
import json
import os
from typing import Any

from .errors import ShiftLabError
from .service import schemas as sm
from .service.app import (
    handle_check,
    handle_counterexample,
    handle_extend_join_depth,
    handle_extend_powerhypo,
    handle_extend_rooted_sum,
    handle_extend_single,
    handle_forest_backward,
    handle_forest_classify,
    handle_forest_power,
    handle_forest_rooted_sum,
    handle_forest_validate,
    handle_gauge,
    handle_moments,
    translate_error,
)

EXIT_OK = 0
EXIT_STRUCTURAL = 2
EXIT_FAILS = 3
EXIT_INFEASIBLE = 4

STATUS_EXIT = {
    "ok": EXIT_OK,
    "holds": EXIT_OK,
    "fails": EXIT_FAILS,
    "obstruction": EXIT_STRUCTURAL,
    "error": EXIT_STRUCTURAL,
    "infeasible": EXIT_INFEASIBLE,
}


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _finish(response, out: str | None) -> int:
    doc = response.model_dump(exclude_none=True)
    _emit(doc, out)
    return STATUS_EXIT.get(doc.get("status", "ok"), EXIT_OK)


def _forest_model(path: str) -> sm.ForestModel:
    return sm.ForestModel(**_read_json(path))


def _shift_model(path: str) -> sm.ShiftModel:
    return sm.ShiftModel(**_read_json(path))


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--mode",
        choices=["exact", "float"],
        default=os.environ.get("SHIFTLAB_MODE", "exact"),
        help="number formatting and comparison mode (default from SHIFTLAB_MODE)",
    )
    parser.add_argument("--tolerance", type=float, default=1e-9, help="float-mode tolerance")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized generation")
    parser.add_argument("--out", help="also write the JSON report to this file")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="shiftlab", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    p_forest = sub.add_parser("forest", help="forest-level operations")
    forest_sub = p_forest.add_subparsers(dest="subcommand", required=True)

    p = forest_sub.add_parser("validate", help="validate a forest JSON file")
    p.add_argument("forest")
    _common(p)

    p = forest_sub.add_parser("power", help="k-th power of a forest")
    p.add_argument("forest")
    p.add_argument("-k", type=int, required=True)
    _common(p)

    p = forest_sub.add_parser("rooted-sum", help="join rooted trees under a fresh root")
    p.add_argument("forests", nargs="+")
    p.add_argument("--no-prefix", action="store_true", help="keep vertex ids unprefixed")
    _common(p)

    p = forest_sub.add_parser("backward", help="k-step backward extension of a tree")
    p.add_argument("forest")
    p.add_argument("-k", type=int, required=True)
    _common(p)

    p = forest_sub.add_parser("classify", help="forkless classification of a tree")
    p.add_argument("forest")
    p.add_argument("--tailed", nargs="*", default=[], help="leaves with infinite continuations")
    _common(p)

    p = sub.add_parser("check", help="certify a property of a shift")
    p.add_argument("shift")
    p.add_argument("--property", required=True, choices=["hyponormal", "power-hyponormal", "subnormal"])
    p.add_argument("-k", type=int, default=1, help="power for the hyponormal check")
    p.add_argument("--kmax", type=int, default=4, help="largest power for power-hyponormal")
    _common(p)

    p_ext = sub.add_parser("extend", help="constructive backward extensions")
    ext_sub = p_ext.add_subparsers(dest="subcommand", required=True)

    p = ext_sub.add_parser("single", help="k-step backward extension of one shift")
    p.add_argument("shift")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--scale", help="scale C in (0, 1/C0], default 1/C0")
    _common(p)

    p = ext_sub.add_parser("rooted-sum", help="joint extension under a fresh root")
    p.add_argument("shifts", nargs="+")
    p.add_argument("-k", type=int, required=True)
    _common(p)

    p = ext_sub.add_parser("join-depth", help="fill a depth-k envelope over a family")
    p.add_argument("shifts", nargs="+")
    p.add_argument("--envelope", required=True)
    p.add_argument("-k", type=int, required=True)
    _common(p)

    p = ext_sub.add_parser("powerhypo", help="joint power-hyponormal one-step extension")
    p.add_argument("shifts", nargs="+")
    p.add_argument("--ext-sq", required=True, help="comma-separated member extension weights")
    p.add_argument("--kmax", type=int, default=4)
    _common(p)

    p = sub.add_parser("counterexample", help="hyponormal shift whose square fails")
    p.add_argument("tree", nargs="?", help="forest JSON of a forked tree")
    p.add_argument("--generate", type=int, help="generate a random forked tree of this size")
    p.add_argument("--fork", help="explicit fork vertex")
    _common(p)

    p = sub.add_parser("gauge", help="phases conjugating complex weights to moduli")
    p.add_argument("forest")
    p.add_argument("weights", help='JSON file {"vertex": {"re": .., "im": ..}}')
    _common(p)

    p = sub.add_parser("moments", help="moments, Hankel test, vertex measures")
    p.add_argument("--measure", help="measure JSON file")
    p.add_argument("--shift", help="shift JSON file")
    p.add_argument("--vertex", help="vertex for shift moments")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--neg", type=int, default=0, help="also report this inverse moment")
    _common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8421)
    return root


def _dispatch(args: argparse.Namespace) -> int:
    mode = getattr(args, "mode", "exact")
    out = getattr(args, "out", None)
    if args.command == "forest":
        if args.subcommand == "validate":
            return _finish(handle_forest_validate(sm.ForestValidateRequest(forest=_forest_model(args.forest))), out)
        if args.subcommand == "power":
            return _finish(handle_forest_power(sm.ForestPowerRequest(forest=_forest_model(args.forest), k=args.k)), out)
        if args.subcommand == "rooted-sum":
            req = sm.ForestRootedSumRequest(
                forests=[_forest_model(f) for f in args.forests], auto_prefix=not args.no_prefix
            )
            return _finish(handle_forest_rooted_sum(req), out)
        if args.subcommand == "backward":
            return _finish(handle_forest_backward(sm.ForestBackwardRequest(forest=_forest_model(args.forest), k=args.k)), out)
        req = sm.ForestClassifyRequest(forest=_forest_model(args.forest), tailed_leaves=args.tailed)
        return _finish(handle_forest_classify(req), out)
    if args.command == "check":
        req = sm.CheckRequest(
            shift=_shift_model(args.shift), property=args.property, k=args.k, k_max=args.kmax, mode=mode
        )
        return _finish(handle_check(req), out)
    if args.command == "extend":
        if args.subcommand == "single":
            req = sm.ExtendSingleRequest(shift=_shift_model(args.shift), k=args.k, scale=args.scale, mode=mode)
            return _finish(handle_extend_single(req), out)
        if args.subcommand == "rooted-sum":
            req = sm.ExtendRootedSumRequest(shifts=[_shift_model(f) for f in args.shifts], k=args.k, mode=mode)
            return _finish(handle_extend_rooted_sum(req), out)
        if args.subcommand == "join-depth":
            req = sm.ExtendJoinDepthRequest(
                shifts=[_shift_model(f) for f in args.shifts],
                envelope=_forest_model(args.envelope),
                k=args.k,
                mode=mode,
            )
            return _finish(handle_extend_join_depth(req), out)
        weights = [w.strip() for w in args.ext_sq.split(",")]
        if len(weights) != len(args.shifts):
            raise ValueError("--ext-sq needs one weight per shift")
        req = sm.ExtendPowerhypoRequest(
            members=[
                sm.PowerhypoMember(shift=_shift_model(f), ext_sq=w)
                for f, w in zip(args.shifts, weights)
            ],
            k_max=args.kmax,
            mode=mode,
        )
        return _finish(handle_extend_powerhypo(req), out)
    if args.command == "counterexample":
        req = sm.CounterexampleRequest(
            tree=_forest_model(args.tree) if args.tree else None,
            generate=args.generate,
            seed=args.seed,
            fork=args.fork,
            mode=mode,
        )
        return _finish(handle_counterexample(req), out)
    if args.command == "gauge":
        raw = _read_json(args.weights)
        req = sm.GaugeRequest(
            forest=_forest_model(args.forest),
            weights={v: sm.ComplexModel(**z) for v, z in raw.items()},
            mode=mode,
            tolerance=args.tolerance,
        )
        return _finish(handle_gauge(req), out)
    if args.command == "moments":
        req = sm.MomentsRequest(
            measure=sm.MeasureModel(**_read_json(args.measure)) if args.measure else None,
            shift=_shift_model(args.shift) if args.shift else None,
            vertex=args.vertex,
            n_max=args.nmax,
            k_negative=args.neg,
            mode=mode,
        )
        return _finish(handle_moments(req), out)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ShiftLabError, ValueError) as exc:
        _, payload = translate_error(exc)
        doc = payload.model_dump(exclude_none=True)
        _emit(doc, getattr(args, "out", None))
        return STATUS_EXIT[doc["status"]]
    except FileNotFoundError as exc:
        _emit({"status": "error", "error": "FileNotFound", "detail": str(exc)}, None)
        return EXIT_STRUCTURAL


if __name__ == "__main__":
    raise SystemExit(main())
