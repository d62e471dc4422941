"""JSON serialization for reports.

Rationals travel as "num/den" strings (integers as "k/1") so nothing is ever
coerced through floats; points and witnesses carry the ground-set size so
reports round-trip exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .measures import MeasureReport, SmoothDistribution
from .optkern import HittingSet, PackingWitness
from .poly import BitVec


def frac_to_str(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def frac_from_str(s: str) -> Fraction:
    return Fraction(s)


def measure_report_to_json(rep: MeasureReport) -> dict[str, Any]:
    n = rep.mbs_witness.n
    out: dict[str, Any] = {
        "n": n,
        "point": "global" if rep.point is None else rep.point.mask,
        "mbs": rep.mbs,
        "fmbs": frac_to_str(rep.fmbs),
        "fhsc": frac_to_str(rep.fhsc),
        "hsc": rep.hsc,
        "witnesses": {
            "packing": {
                "base": rep.mbs_witness.base,
                "blocks": list(rep.mbs_witness.blocks),
            },
            "hitting": rep.hsc_witness.mask,
            "distribution": None
            if rep.fmbs_distribution is None
            else [[m, frac_to_str(p)] for m, p in rep.fmbs_distribution.support],
            "cover_weights": [[e, frac_to_str(w)] for e, w in rep.fhsc_weights],
        },
    }
    if rep.argmax is not None:
        out["argmax"] = {k: v.mask for k, v in rep.argmax.items()}
    return out


def measure_report_from_json(data: dict[str, Any]) -> MeasureReport:
    n = data["n"]
    wit = data["witnesses"]
    dist = None
    if wit["distribution"] is not None:
        dist = SmoothDistribution.from_weights(
            n, [(m, frac_from_str(p)) for m, p in wit["distribution"]]
        )
    argmax = None
    if "argmax" in data:
        argmax = {k: BitVec(n, v) for k, v in data["argmax"].items()}
    return MeasureReport(
        point=None if data["point"] == "global" else BitVec(n, data["point"]),
        mbs=data["mbs"],
        fmbs=frac_from_str(data["fmbs"]),
        fhsc=frac_from_str(data["fhsc"]),
        hsc=data["hsc"],
        mbs_witness=PackingWitness(
            n, tuple(wit["packing"]["blocks"]), wit["packing"]["base"]
        ),
        hsc_witness=HittingSet(n, wit["hitting"]),
        fmbs_distribution=dist,
        fhsc_weights=tuple((e, frac_from_str(w)) for e, w in wit["cover_weights"]),
        argmax=argmax,
    )


def format_measure_report(rep: MeasureReport) -> str:
    lines = []
    point = "global" if rep.point is None else str(rep.point)
    lines.append(f"point:  {point}")
    lines.append(f"MBS:    {rep.mbs}")
    lines.append(f"FMBS:   {rep.fmbs}")
    lines.append(f"FHSC:   {rep.fhsc}")
    lines.append(f"HSC:    {rep.hsc}")
    blocks = ", ".join(str(b) for b in rep.mbs_witness.block_vecs()) or "-"
    lines.append(f"packing witness: {blocks}")
    lines.append(f"hitting set:     {BitVec(rep.hsc_witness.n, rep.hsc_witness.mask)}")
    if rep.argmax:
        arg = ", ".join(f"{k} at {v}" for k, v in sorted(rep.argmax.items()))
        lines.append(f"attained: {arg}")
    return "\n".join(lines)
