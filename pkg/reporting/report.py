"""
reporting/report.py

Analysis and info reports, as JSON documents or as a step-by-step text
narrative.

Responsibilities:
- Collect network numbers, kinetics class, CF-RM summary, verdict,
  witness and branch statistics into one AnalysisReport
- JSON: stable key order, rationals as strings, floats to 12 significant
  digits, validated against data/schemas/report.schema.json
- Text: partition table, shelvings, equation groups, witness tables

This module MUST:
- Never change a verdict; it only renders what the engine decided
- Emit "witness": null unless the verdict is multistationary
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from data.validation import REPORT_SCHEMA, validate_document
from engine.assembly import format_group
from engine.config_loader import AnalysisConfig
from engine.search import BranchRecord, Verdict, VerdictStatus, constraint_display
from errors import MsaError
from kinetics.cfrm import CfRmRecord, cf_subsets
from kinetics.system import KineticSystem, classify, is_rdk
from linalg.constraints import Relation, format_rational
from network.numbers import NetworkNumbers, network_numbers
from network.regularity import regularity_report

logger = logging.getLogger(__name__)

FORMATS = ("text", "json")

_NUMBER_ROWS = (
    ("species", "m"),
    ("complexes", "n"),
    ("reactant complexes", "n_r"),
    ("reactions", "r"),
    ("irreversible reactions", "r_irrev"),
    ("linkage classes", "l"),
    ("strong linkage classes", "sl"),
    ("terminal strong linkage classes", "t"),
    ("rank", "s"),
    ("deficiency", "deficiency"),
)


# ============================================================
# JSON NORMALIZATION
# ============================================================

def jsonable(value):
    """Fractions to strings, floats to 12 significant digits, recursively."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    return str(value)


def _dump(document) -> bytes:
    return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")


# ============================================================
# ANALYSIS REPORT
# ============================================================

@dataclass
class AnalysisReport:
    model: str
    system: KineticSystem
    numbers: NetworkNumbers
    kinetics: str
    verdict: Verdict
    cf_rm: Optional[CfRmRecord] = None
    original_numbers: Optional[NetworkNumbers] = None
    display: Optional[BranchRecord] = None
    config: AnalysisConfig = field(default_factory=AnalysisConfig)
    elapsed: Optional[float] = None

    def to_dict(self):
        species = self.system.network.species
        verdict = self.verdict
        cf_rm = None
        if self.cf_rm is not None and not self.cf_rm.is_identity:
            cf_rm = self.cf_rm.to_dict(species)
            cf_rm["original_deficiency"] = self.original_numbers.deficiency if self.original_numbers else None
            cf_rm["transformed_deficiency"] = self.numbers.deficiency
        witness = verdict.witness if verdict.status is VerdictStatus.MULTISTATIONARY else None
        out = {
            "model": self.model,
            "network": self.numbers.to_dict(),
            "kinetics": self.kinetics,
            "cf_rm": cf_rm,
            "verdict": {"status": verdict.status.value, "reason": verdict.reason},
            "signature": verdict.signature.to_dict() if verdict.signature else None,
            "witness": witness.to_dict() if witness else None,
            "verification": verdict.verification.to_dict() if verdict.verification else None,
            "branch": verdict.branch.to_dict() if verdict.branch else None,
            "display": self.display.to_dict() if self.display else None,
            "stats": verdict.stats.to_dict(),
            "config": self.config.to_dict(),
            "elapsed_seconds": self.elapsed,
        }
        if verdict.trace:
            out["trace"] = [{"step": step, "detail": detail} for step, detail in verdict.trace]
        return jsonable(out)


def build_report(
    model: str,
    original: KineticSystem,
    analyzed: KineticSystem,
    verdict: Verdict,
    *,
    cf_rm: Optional[CfRmRecord] = None,
    config: Optional[AnalysisConfig] = None,
    elapsed: Optional[float] = None,
    preferred_orientation=None,
) -> AnalysisReport:
    display = verdict.display
    if display is None and is_rdk(analyzed):
        try:
            display = constraint_display(analyzed, preferred_orientation)
        except MsaError as exc:
            logger.warning(f"DISPLAY SKIPPED | {exc}")
    transformed = cf_rm is not None and not cf_rm.is_identity
    return AnalysisReport(
        model=model,
        system=analyzed,
        numbers=network_numbers(analyzed.network),
        kinetics=classify(original).value,
        verdict=verdict,
        cf_rm=cf_rm,
        original_numbers=network_numbers(original.network) if transformed else None,
        display=display,
        config=config or AnalysisConfig(),
        elapsed=elapsed,
    )


# ============================================================
# TEXT
# ============================================================

def _numbers_lines(numbers: NetworkNumbers) -> list[str]:
    values = numbers.to_dict()
    return [f"  {label:<33}{values[key]}" for label, key in _NUMBER_ROWS]


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    fmt = "  " + "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines.extend(fmt.format(*[str(c) for c in row]) for row in rows)
    return [line.rstrip() for line in lines]


def _branch_lines(title: str, branch: BranchRecord) -> list[str]:
    data = branch.to_dict()
    lines = [title, f"  orientation: {', '.join(data['orientation'])}", "", "  EQUIVALENCE AND FUNDAMENTAL CLASSES"]
    rows = []
    for row in data["partition"]:
        rows.append([
            f"P{row['class']}",
            "{" + ", ".join(row["members"]) + "}",
            "{" + ", ".join(row["reactions"]) + "}",
            row["representative"] or "-",
            "reversible" if row["reversible"] else "nonreversible",
        ])
    lines.extend("  " + line for line in _table(["class", "P_i", "C_i", "W", "type"], rows))
    lines.append("")
    lines.append(f"  sign pattern (g, h) per class: {branch.pattern.format() or '-'}")
    if data["shelvings"]:
        lines.append("  shelving:")
        lines.extend(f"    {s}" for s in data["shelvings"])
    groups = branch.equation_groups()
    if groups:
        lines.append("  equations:")
        lines.extend(f"    {format_group(g)}" for g in groups)
    if data["templates"]:
        lines.append("  orderings of M:")
        lines.extend(f"    {', '.join(t)}" for t in data["templates"])
    others = [
        c for c in branch.constraints
        if not (c.relation is Relation.EQ and c.label.startswith("shelf:"))
    ]
    if others:
        lines.append("  inequalities and remaining equations:")
        lines.extend(f"    {c.format()}    [{c.label}]" for c in others)
    return lines


def _witness_lines(witness: dict) -> list[str]:
    species = witness["species"]
    rows = [
        [s, witness["mu"][s], witness["sigma"][s], f"{witness['c_double_star'][s]:.10g}", f"{witness['c_star'][s]:.10g}"]
        for s in species
    ]
    lines = ["WITNESS"]
    lines.extend(_table(["species", "mu", "sigma", "c**", "c*"], rows))
    lines.append("")
    rows = [[r, witness["kappa"][r], f"{witness['k'][r]:.10g}"] for r in witness["reactions"]]
    lines.extend(_table(["reaction", "kappa", "k"], rows))
    return lines


def render_text(report: AnalysisReport) -> str:
    data = report.to_dict()
    verdict = report.verdict
    lines = [f"MODEL {report.model}", "", "NETWORK NUMBERS"]
    lines.extend(_numbers_lines(report.numbers))
    lines.append("")
    lines.append(f"KINETICS {data['kinetics']}")
    if data["cf_rm"]:
        cf = data["cf_rm"]
        lines.append("CF-RM TRANSFORM")
        for rid, change in cf["transformed"].items():
            lines.append(f"  {rid}: {change['from']}  =>  {change['to']}")
        lines.append(f"  deficiency {cf['original_deficiency']} -> {cf['transformed_deficiency']}")
    lines.append("")

    if report.display is not None:
        lines.extend(_branch_lines("FIRST SHELVED BRANCH", report.display))
        lines.append("")
    if verdict.branch is not None and verdict.branch is not report.display:
        lines.extend(_branch_lines("DECIDING BRANCH", verdict.branch))
        lines.append("")

    lines.append(f"VERDICT {verdict.status.value} ({verdict.reason})")
    if data["signature"]:
        mu = ", ".join(f"{s}={v}" for s, v in data["signature"]["mu"].items())
        lines.append(f"  signature mu: {mu}")
    stats = data["stats"]
    lines.append(
        f"  orientations={stats['orientations']}  patterns={stats['patterns']}  "
        f"nodes={stats['nodes']}/{stats['budget']}  leaves={stats['leaves']}  "
        f"signatures={stats['signatures']}  pre_signatures={stats['pre_signatures']}"
    )
    lines.append("")

    if data["witness"]:
        lines.extend(_witness_lines(data["witness"]))
        lines.append("")
    if data["verification"]:
        v = data["verification"]
        lines.append(
            f"VERIFICATION {'pass' if v['pass'] else 'FAIL'}  residual(c*)={v['residual_c_star']:.3e}  "
            f"residual(c**)={v['residual_c_double_star']:.3e}  compat={v['compat_defect']:.3e}  tol={v['tol']}"
        )
        lines.append("")
    if data.get("trace"):
        lines.append("TRACE")
        lines.extend(f"  [{t['step']}] {t['detail']}" for t in data["trace"])
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def emit_report(report: AnalysisReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        document = report.to_dict()
        validate_document(document, REPORT_SCHEMA, error_cls=MsaError)
        return _dump(document)
    if fmt == "text":
        return render_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")


# ============================================================
# INFO
# ============================================================

def info_document(model: str, system: KineticSystem) -> dict:
    net = system.network
    kinetics = classify(system)
    nf = {}
    for y in net.reactant_complexes:
        _, count = cf_subsets(system, y)
        if count > 1:
            nf[y.format(net.species)] = count
    return jsonable({
        "model": model,
        "network": network_numbers(net).to_dict(),
        "kinetics": kinetics.value,
        "regularity": regularity_report(net).to_dict(),
        "nf_reactants": nf,
        "reactions": [net.format_reaction(j) for j in range(net.r)],
    })


def emit_info(document: dict, fmt: str = "text") -> bytes:
    if fmt == "json":
        return _dump(document)
    numbers = NetworkNumbers(**document["network"])
    reg = document["regularity"]
    lines = [f"MODEL {document['model']}", ""]
    lines.extend(f"  {r}" for r in document["reactions"])
    lines.extend(["", "NETWORK NUMBERS"])
    lines.extend(_numbers_lines(numbers))
    lines.extend(["", f"KINETICS {document['kinetics']}"])
    for y, count in document["nf_reactants"].items():
        lines.append(f"  NF-reactant {y}: N_R = {count}")
    lines.extend([
        "",
        "REGULARITY",
        f"  positive dependent   {reg['positive_dependent']}",
        f"  t-minimal            {reg['t_minimal']}",
        f"  cut-pair condition   {reg['cut_pair_condition']}",
    ])
    for first, second in reg["non_cut_pairs"]:
        lines.append(f"  non-cut pair ({first}, {second})")
    lines.append(f"  regular              {reg['regular']}")
    return ("\n".join(lines) + "\n").encode("utf-8")
