"""
data/models.py

Model files: JSON documents describing a power-law kinetic system with
human-readable reaction equations.

Responsibilities:
- Parse a model document into a KineticSystem (exact rationals throughout)
- Emit a system back to a document that re-parses to the identical system
- Resolve builtin corpus names to the shipped model files

This module MUST:
- Validate every document against data/schemas/model.schema.json
- Report JSON and equation syntax errors with line and column
- Keep species in declaration order, else first-appearance order
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from data.equations import parse_equation
from data.validation import MODEL_SCHEMA, validate_document
from errors import KineticsError, ModelSyntaxError, ModelValidationError, NetworkError
from kinetics.system import KineticSystem
from linalg.constraints import format_rational
from linalg.rational import as_fraction
from network.complexes import Complex
from network.reactions import ReactionSpec, build_network

logger = logging.getLogger(__name__)

CORPUS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus")

# ============================================================
# BUILTIN CORPUS
# ============================================================

BUILTIN_MODELS = {
    "ermog-yeast": {
        "file": "ermog-yeast.json",
        "description": "Yeast fermentation pathway (ERM0 representation), 13 irreversible reactions",
    },
    "heck-carbon": {
        "file": "heck-carbon.json",
        "description": "Terrestrial carbon recovery model with two reversible pairs",
    },
    "anderies": {
        "file": "anderies.json",
        "description": "Pre-industrial carbon cycle, three boxes",
    },
    "defone-cutpair": {
        "file": "defone-cutpair.json",
        "description": "Deficiency-one network with a non-cut pair (A1+A2, 2A3)",
    },
    "ndk-defone": {
        "file": "ndk-defone.json",
        "description": "Deficiency-one PL-NDK system needing the CF-RM transform",
    },
}


def list_corpus() -> list[tuple[str, str]]:
    return [(name, entry["description"]) for name, entry in BUILTIN_MODELS.items()]


@dataclass(frozen=True)
class LoadedModel:
    name: str
    system: KineticSystem
    description: str = ""
    orientation: Optional[tuple[str, ...]] = None
    source: Optional[str] = None
    text: str = field(default="", repr=False)


# ============================================================
# PARSE
# ============================================================

def _decode(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _line_of(text: str, needle: str) -> Optional[int]:
    pos = text.find(json.dumps(needle))
    if pos < 0:
        return None
    return text.count("\n", 0, pos) + 1


def _orders(entry: dict, key: str, rid: str, known: set) -> dict:
    orders = entry.get(key, {})
    unknown = [s for s in orders if s not in known]
    if unknown:
        raise ModelValidationError(
            f"unknown species in {key} of {rid}: {', '.join(sorted(unknown))}"
        )
    return {s: as_fraction(v) for s, v in orders.items()}


def read_model(text: str, *, source: Optional[str] = None) -> LoadedModel:
    """Parse a model document into a LoadedModel."""
    document = _decode(text)
    validate_document(document, MODEL_SCHEMA)

    specs: list[ReactionSpec] = []
    first_seen: list[str] = []
    entries = document["reactions"]
    for pos, entry in enumerate(entries):
        rid = entry.get("id", f"#{pos + 1}")
        eq = parse_equation(entry["equation"], line=_line_of(text, entry["equation"]))
        if "reversible" in entry and entry["reversible"] != eq.reversible:
            raise ModelValidationError(
                f"{rid}: reversible={entry['reversible']} contradicts arrow in {entry['equation']!r}"
            )
        if eq.reversible and "reverse_orders" not in entry:
            raise ModelValidationError(f"{rid}: reversible entry needs reverse_orders")
        if not eq.reversible and ("reverse_orders" in entry or "reverse_id" in entry):
            raise ModelValidationError(f"{rid}: reverse fields on an irreversible entry")
        for s in eq.species:
            if s not in first_seen:
                first_seen.append(s)
        try:
            specs.append(ReactionSpec(
                reactant=Complex.from_mapping(eq.reactant),
                product=Complex.from_mapping(eq.product),
                reversible=eq.reversible,
                id=entry.get("id"),
                reverse_id=entry.get("reverse_id"),
            ))
        except NetworkError as exc:
            raise ModelValidationError(f"{rid}: {exc}") from None

    declared = document.get("species")
    try:
        net = build_network(specs, species=declared if declared else first_seen)
    except NetworkError as exc:
        raise ModelValidationError(str(exc)) from None

    known = set(net.species)
    orders, rates = [], []
    for entry in entries:
        rid = entry.get("id", entry["equation"])
        orders.append(_orders(entry, "orders", rid, known))
        rates.append(entry.get("rate"))
        if "reverse_orders" in entry:
            orders.append(_orders(entry, "reverse_orders", rid, known))
            rates.append(entry.get("reverse_rate"))

    given = [v is not None for v in rates]
    if any(given) and not all(given):
        raise ModelValidationError("rate constants must be given for every reaction or for none")
    try:
        system = KineticSystem.from_orders(net, orders, rates if all(given) else None)
    except KineticsError as exc:
        raise ModelValidationError(str(exc)) from None

    orientation = document.get("orientation")
    if orientation:
        missing = [rid for rid in orientation if rid not in {rx.id for rx in net.reactions}]
        if missing:
            raise ModelValidationError(f"orientation names unknown reactions: {', '.join(missing)}")

    logger.info(
        f"MODEL PARSED | name={document['name']} | species={net.m} | reactions={net.r} | "
        f"rates={'yes' if system.k else 'no'}"
    )
    return LoadedModel(
        name=document["name"],
        system=system,
        description=document.get("description", ""),
        orientation=tuple(orientation) if orientation else None,
        source=source,
        text=text,
    )


def parse_model(text: str) -> KineticSystem:
    return read_model(text).system


# ============================================================
# EMIT
# ============================================================

def _orders_out(system: KineticSystem, j: int) -> dict[str, str]:
    return {s: format_rational(v) for s, v in system.orders(j).items()}


def model_document(
    system: KineticSystem,
    name: str,
    *,
    description: str = "",
    orientation=None,
) -> dict:
    net = system.network
    species = list(net.species)
    reactions = []
    for j, rx in enumerate(net.reactions):
        partner = net.reverse_index(j)
        if partner is not None and partner == j - 1:
            continue
        entry = {"id": rx.id}
        if partner == j + 1:
            entry["reverse_id"] = net.reactions[partner].id
            entry["equation"] = f"{rx.reactant.format(species)} <-> {rx.product.format(species)}"
            entry["orders"] = _orders_out(system, j)
            entry["reverse_orders"] = _orders_out(system, partner)
            if system.k is not None:
                entry["rate"] = format_rational(system.k[j])
                entry["reverse_rate"] = format_rational(system.k[partner])
        else:
            if partner is not None:
                logger.warning(f"MODEL EMIT | {rx.id} | reverse partner not adjacent, written unpaired")
            entry["equation"] = rx.format(species)
            entry["orders"] = _orders_out(system, j)
            if system.k is not None:
                entry["rate"] = format_rational(system.k[j])
        reactions.append(entry)

    document = {"name": name}
    if description:
        document["description"] = description
    document["species"] = species
    if orientation:
        document["orientation"] = list(orientation)
    document["reactions"] = reactions
    return document


def emit_model(system: KineticSystem, name: str, *, description: str = "", orientation=None) -> str:
    """JSON text that read_model turns back into `system`."""
    document = model_document(system, name, description=description, orientation=orientation)
    validate_document(document, MODEL_SCHEMA)
    return json.dumps(document, indent=2) + "\n"


# ============================================================
# LOAD
# ============================================================

def builtin_path(name: str) -> Optional[str]:
    entry = BUILTIN_MODELS.get(name)
    if entry is None:
        return None
    return os.path.join(CORPUS_DIR, entry["file"])


def load_model(path_or_name: str) -> LoadedModel:
    """A builtin corpus name, or a path to a model file."""
    path = builtin_path(path_or_name) or path_or_name
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ModelValidationError(f"cannot read model {path_or_name!r}: {exc.strerror}") from None
    return read_model(text, source=path)
