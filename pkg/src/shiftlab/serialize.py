"""Canonical JSON forms for forests, shifts, measures, reports and plans.

Rationals travel as "p/q" strings in exact mode and as floats (17
significant digits) in float mode; parsing accepts both.  Emitted documents
re-parse to equal values.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Mapping

from .forest import DirectedForest
from .measures import AtomicMeasure, HankelVerdict
from .rationals import format_ratio, parse_ratio
from .shifts import TailProfile, WeightedShift


def ratio_out(value: Fraction, mode: str = "exact"):
    return format_ratio(value, mode)


def excess_out(value, mode: str = "exact"):
    if value is None:
        return None
    if value is math.inf:
        return "inf"
    return ratio_out(value, mode)


def forest_to_json(f: DirectedForest) -> dict[str, Any]:
    return {"vertices": list(f.vertices), "parent": {v: f.parent[v] for v in f.vertices}}


def forest_from_json(doc: Mapping[str, Any]) -> DirectedForest:
    return DirectedForest(doc["vertices"], doc["parent"])


def tail_to_json(t: TailProfile, mode: str = "exact") -> dict[str, Any]:
    return {
        "prefix_sq": [ratio_out(x, mode) for x in t.prefix_sq],
        "constant_sq": ratio_out(t.constant_sq, mode),
    }


def tail_from_json(doc: Mapping[str, Any]) -> TailProfile:
    return TailProfile(doc.get("prefix_sq", ()), doc["constant_sq"])


def weights_to_json(s: WeightedShift, mode: str = "exact") -> dict[str, Any]:
    return {
        "sq": {v: ratio_out(s.sq[v], mode) for v in s.forest.vertices},
        "tails": {leaf: tail_to_json(s.tails[leaf], mode) for leaf in sorted(s.tails)},
    }


def shift_to_json(s: WeightedShift, mode: str = "exact") -> dict[str, Any]:
    doc = {"forest": forest_to_json(s.forest), "weights": weights_to_json(s, mode)}
    if s.allow_leaves:
        doc["allow_leaves"] = True
    return doc


def shift_from_json(doc: Mapping[str, Any]) -> WeightedShift:
    forest = forest_from_json(doc["forest"])
    weights = doc.get("weights", {})
    sq = {v: parse_ratio(x) for v, x in weights.get("sq", {}).items()}
    tails = {leaf: tail_from_json(t) for leaf, t in weights.get("tails", {}).items()}
    return WeightedShift(forest, sq, tails, allow_leaves=bool(doc.get("allow_leaves", False)))


def measure_to_json(m: AtomicMeasure, mode: str = "exact") -> dict[str, Any]:
    return {"atoms": [{"t": ratio_out(t, mode), "w": ratio_out(w, mode)} for t, w in m.atoms]}


def measure_from_json(doc: Mapping[str, Any]) -> AtomicMeasure:
    return AtomicMeasure([(a["t"], a["w"]) for a in doc.get("atoms", [])])


def hip_report_to_json(report, mode: str = "exact") -> dict[str, Any]:
    return {
        "k": report.k,
        "verdict": report.verdict,
        "witness": report.witness,
        "hip": {v: ratio_out(x, mode) for v, x in sorted(report.values.items())},
    }


def subnormal_cert_to_json(cert, mode: str = "exact") -> dict[str, Any]:
    doc: dict[str, Any] = {"verdict": cert.verdict}
    if cert.holds():
        doc["vertices"] = {
            v: {
                "measure": measure_to_json(cert.measures[v], mode),
                "defect": ratio_out(cert.defects[v], mode),
            }
            for v in sorted(cert.measures)
        }
    else:
        doc["witness"] = cert.witness
        doc["excess"] = excess_out(cert.excess, mode)
    return doc


def plan_to_json(plan, mode: str = "exact") -> dict[str, Any]:
    return {
        "k": plan.k,
        "edge_sq": [ratio_out(x, mode) for x in plan.edge_sq],
        "C": ratio_out(plan.scale, mode),
    }


def hankel_to_json(verdict: HankelVerdict, mode: str = "exact") -> dict[str, Any]:
    if verdict.consistent:
        return {"verdict": "consistent-up-to", "upto": verdict.upto}
    return {
        "verdict": "inconsistent",
        "witness_minor": verdict.witness_indices,
        "witness_det": ratio_out(verdict.witness_det, mode),
    }
