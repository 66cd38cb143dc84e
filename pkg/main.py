"""
MSA: multistationarity analysis for power-law kinetic systems

Responsibilities:
- Load models (builtin corpus or JSON files)
- info: network numbers, kinetics class, regularity
- transform: CF-RM for PL-NDK systems
- analyze: run the search and emit a text or JSON report
- verify: re-check a witness file against a model
- Record runs in the optional ledger

This file MUST:
- Not contain analysis logic
- Exit 0 when a verdict is decided, 2 when inconclusive, 1 on any error
"""

import argparse
import hashlib
import json
import logging
import sys
import time

from sqlalchemy.exc import SQLAlchemyError

# =========================
# DATA
# =========================

from data.models import emit_model, list_corpus, load_model

# =========================
# KINETICS
# =========================

from kinetics.cfrm import cf_rm_transform
from kinetics.system import is_rdk

# =========================
# ENGINE
# =========================

from engine.config_loader import get_analysis_config
from engine.search import analyze

# =========================
# VERIFICATION / REPORTING
# =========================

from verification.checks import check_witness
from reporting.report import build_report, emit_info, emit_report, info_document, jsonable

# =========================
# LEDGER
# =========================

from db import session as ledger
from db.models import utc_now
from db.repository import RunRepository, WitnessRepository

from errors import MsaError, WitnessError
from linalg.rational import as_fraction
from network.numbers import network_numbers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1

# ============================================================
# HELPERS
# ============================================================

def _csv(value):
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


def _rationals(value, what):
    items = _csv(value)
    if items is None:
        return None
    try:
        return [as_fraction(v) for v in items]
    except (TypeError, ValueError, ZeroDivisionError):
        raise MsaError(f"--{what} expects comma-separated numbers, got {value!r}") from None


def _write(payload: bytes):
    sys.stdout.buffer.write(payload)
    sys.stdout.flush()


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _prepare(loaded, keep=None):
    """RDK system to analyze, plus the CF-RM record when one was needed."""
    if is_rdk(loaded.system):
        return loaded.system, None
    transformed, record = cf_rm_transform(loaded.system, keep=keep)
    logger.info(f"CF-RM APPLIED | model={loaded.name} | moved={len(record.transformed)}")
    return transformed, record


# ============================================================
# COMMANDS
# ============================================================

def cmd_corpus(args):
    rows = list_corpus()
    if args.json:
        _write(json.dumps([{"name": n, "description": d} for n, d in rows], indent=2).encode() + b"\n")
        return EXIT_OK
    width = max(len(n) for n, _ in rows)
    for name, description in rows:
        print(f"{name:<{width}}  {description}")
    return EXIT_OK


def cmd_info(args):
    loaded = load_model(args.model)
    document = info_document(loaded.name, loaded.system)
    _write(emit_info(document, "json" if args.json else "text"))
    return EXIT_OK


def cmd_transform(args):
    loaded = load_model(args.model)
    transformed, record = cf_rm_transform(loaded.system, keep=_csv(args.keep))
    text = emit_model(
        transformed,
        f"{loaded.name}-cfrm" if not record.is_identity else loaded.name,
        description=loaded.description,
        orientation=loaded.orientation,
    )
    if not args.output:
        _write(text.encode("utf-8"))
        return EXIT_OK

    with open(args.output, "w", encoding="utf-8") as f:
        f.write(text)
    species = loaded.system.network.species
    if record.is_identity:
        print(f"{loaded.name}: already PL-RDK, written unchanged to {args.output}")
        return EXIT_OK
    for rid, change in record.to_dict(species)["transformed"].items():
        print(f"{rid}: {change['from']}  =>  {change['to']}")
    before = network_numbers(loaded.system.network).deficiency
    after = network_numbers(transformed.network).deficiency
    print(f"deficiency {before} -> {after}; written to {args.output}")
    return EXIT_OK


def cmd_analyze(args):
    loaded = load_model(args.model)
    config = get_analysis_config(args.config).with_overrides(
        max_branches=args.max_branches,
        tol=args.tol,
        p=as_fraction(args.p) if args.p is not None else None,
        trace=True if args.trace else None,
        explore_orientations=True if args.explore_orientations else None,
        run_prechecks=False if args.no_prechecks else None,
    )
    system, record = _prepare(loaded, keep=_csv(args.keep))
    orientation = _csv(args.orientation) or loaded.orientation

    started = utc_now()
    t0 = time.perf_counter()
    verdict = analyze(
        system,
        config,
        mu_hint=_rationals(args.mu_hint, "mu-hint"),
        sigma=_rationals(args.sigma, "sigma"),
        kappa=_rationals(args.kappa, "kappa"),
        preferred_orientation=orientation,
    )
    elapsed = time.perf_counter() - t0

    report = build_report(
        loaded.name, loaded.system, system, verdict,
        cf_rm=record, config=config, elapsed=elapsed, preferred_orientation=orientation,
    )
    _write(emit_report(report, "json" if args.json else "text"))
    _record(args, loaded, report, started)
    return verdict.exit_code


def _record(args, loaded, report, started):
    if args.db_url:
        ledger.configure(args.db_url)
    document = report.to_dict()
    try:
        with ledger.db_session() as session:
            if session is None:
                return
            run = RunRepository(session).record_run(
                model=loaded.name,
                model_digest=_digest(loaded.text),
                verdict=document["verdict"]["status"],
                reason=document["verdict"]["reason"],
                stats=document["stats"],
                started_at=started,
            )
            if document["witness"] is not None:
                WitnessRepository(session).attach_witness(
                    run_id=run.id,
                    witness=document["witness"],
                    verification=document["verification"],
                )
    except SQLAlchemyError as exc:
        logger.warning(f"LEDGER WRITE FAILED | model={loaded.name} | {exc}")


def _vector(section, names, what):
    if not isinstance(section, dict):
        raise WitnessError(f"witness field {what} must map names to values")
    missing = [n for n in names if n not in section]
    if missing:
        raise WitnessError(f"witness field {what} lacks {', '.join(missing)}")
    try:
        return [as_fraction(section[n]) for n in names]
    except (TypeError, ValueError, ZeroDivisionError):
        raise WitnessError(f"witness field {what} holds a non-numeric entry") from None


def read_witness(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as exc:
        raise WitnessError(f"cannot read witness {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise WitnessError(f"witness {path!r} is not JSON: {exc.msg} (line {exc.lineno})") from None
    if isinstance(document, dict) and "verdict" in document:
        document = document.get("witness")
        if document is None:
            raise WitnessError(f"report {path!r} carries no witness")
    if not isinstance(document, dict):
        raise WitnessError(f"witness {path!r} must be a JSON object")
    return document


def cmd_verify(args):
    loaded = load_model(args.model)
    witness = read_witness(args.witness)
    net = loaded.system.network
    species = list(net.species)
    reactions = [rx.id for rx in net.reactions]

    c_star = _vector(witness.get("c_star"), species, "c_star")
    c_double_star = _vector(witness.get("c_double_star"), species, "c_double_star")
    k = _vector(witness.get("k"), reactions, "k")
    sigma = _vector(witness["sigma"], species, "sigma") if "sigma" in witness else None

    config = get_analysis_config(args.config).with_overrides(tol=args.tol)
    # CF-RM keeps every reaction vector and kinetic row, so the original
    # system has the same species formation rate as its transform
    rated = loaded.system.with_rates(k)
    report = check_witness(rated, c_star, c_double_star, sigma=sigma, tol=config.tol)

    if args.json:
        _write(json.dumps(jsonable(report.to_dict()), sort_keys=True, indent=2).encode() + b"\n")
    else:
        print(
            f"{'PASS' if report.passed else 'FAIL'}  residual(c*)={report.residual_c_star:.3e}  "
            f"residual(c**)={report.residual_c_double_star:.3e}  "
            f"compat={report.compat_defect:.3e}  distinct={report.distinct}  tol={report.tol}"
        )
    return EXIT_OK if report.passed else EXIT_ERROR


COMMANDS = {
    "corpus": cmd_corpus,
    "info": cmd_info,
    "transform": cmd_transform,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
}

# ============================================================
# CLI
# ============================================================

def build_parser():
    parser = argparse.ArgumentParser(
        prog="msa",
        description="Decide the capacity for multiple equilibria of power-law kinetic systems.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--config", help="JSON analysis config (default: $MSA_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus", help="list the builtin models")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("info", help="network numbers, kinetics class and regularity")
    p.add_argument("model", help="builtin model name or model file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("transform", help="CF-RM transform of a PL-NDK model")
    p.add_argument("model")
    p.add_argument("-o", "--output", help="write the transformed model here (default: stdout)")
    p.add_argument("--keep", help="reaction ids whose CF-subset stays on its reactant")

    p = sub.add_parser("analyze", help="run the multistationarity search")
    p.add_argument("model")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-branches", type=int)
    p.add_argument("--sigma", help="comma-separated sigma in species order")
    p.add_argument("--mu-hint", help="comma-separated mu in species order")
    p.add_argument("--kappa", help="comma-separated kappa in reaction order")
    p.add_argument("--p", help="concentration for species with mu = 0 (rational)")
    p.add_argument("--tol", type=float, help="relative residual tolerance of the witness check")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--orientation", help="reverse reactions to orient by (comma-separated ids)")
    p.add_argument("--explore-orientations", action="store_true")
    p.add_argument("--no-prechecks", action="store_true")
    p.add_argument("--keep", help="CF-RM: reaction ids whose CF-subset stays on its reactant")
    p.add_argument("--db-url", help="SQLAlchemy URL of the run ledger (default: $MSA_DATABASE_URL)")

    p = sub.add_parser("verify", help="check a witness file against a model")
    p.add_argument("model")
    p.add_argument("--witness", required=True, help="witness JSON or an analyze --json report")
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s | %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except MsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception:
        logger.exception(f"UNEXPECTED FAILURE | command={args.command}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
