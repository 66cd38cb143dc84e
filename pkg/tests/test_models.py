import json
from fractions import Fraction

import pytest

from data.equations import parse_equation
from data.models import BUILTIN_MODELS, emit_model, list_corpus, load_model, parse_model, read_model
from data.validation import MODEL_SCHEMA, schema_errors
from errors import ModelSyntaxError, ModelValidationError

_CHAIN = {
    "name": "chain",
    "reactions": [
        {"id": "R1", "equation": "0 -> A", "orders": {}},
        {"id": "R2", "reverse_id": "R3", "equation": "A <-> 2B", "orders": {"A": "0.5"}, "reverse_orders": {"B": "1/3"}},
        {"id": "R4", "equation": "B -> 0", "orders": {"B": 1}},
    ],
}


def _text(document):
    return json.dumps(document, indent=2)


def _with(**changes):
    document = json.loads(json.dumps(_CHAIN))
    document.update(changes)
    return document


# ============================================================
# EQUATIONS
# ============================================================

def test_parse_equation_terms_and_arrow():
    eq = parse_equation("X1 + 2X5 -> X1 + X5")
    assert eq.reactant == {"X1": 1, "X5": 2}
    assert eq.product == {"X1": 1, "X5": 1}
    assert not eq.reversible
    assert eq.species == ("X1", "X5")


@pytest.mark.parametrize("text, reactant, product", [
    ("0 -> A", {}, {"A": 1}),
    ("0.5A -> 0", {"A": Fraction(1, 2)}, {}),
    ("1/2 A <-> B", {"A": Fraction(1, 2)}, {"B": 1}),
    ("A + A -> B", {"A": 2}, {"B": 1}),
])
def test_parse_equation_coefficients(text, reactant, product):
    eq = parse_equation(text)
    assert eq.reactant == reactant
    assert eq.product == product


@pytest.mark.parametrize("text", ["A => B", "A + -> B", "A -> B C", "2 -> A"])
def test_parse_equation_syntax_errors_carry_a_column(text):
    with pytest.raises(ModelSyntaxError) as info:
        parse_equation(text, line=7)
    assert info.value.line == 7
    assert info.value.column is not None


def test_parse_equation_rejects_negative_coefficient():
    with pytest.raises(ModelValidationError, match="negative coefficient"):
        parse_equation("A -> -2B")


# ============================================================
# MODEL FILES
# ============================================================

def test_read_model_expands_reversible_entries():
    loaded = read_model(_text(_CHAIN))
    net = loaded.system.network
    assert [rx.id for rx in net.reactions] == ["R1", "R2", "R3", "R4"]
    assert net.reaction("R3").reverse_of == "R2"
    assert net.species == ("A", "B")
    assert loaded.system.F[2] == (0, Fraction(1, 3))
    assert loaded.system.k is None


def test_declared_species_order_wins():
    system = parse_model(_text(_with(species=["B", "A"])))
    assert system.network.species == ("B", "A")


def test_invalid_json_reports_line_and_column():
    with pytest.raises(ModelSyntaxError) as info:
        read_model('{\n  "name": "x",\n  "reactions": [,]\n}')
    assert info.value.line == 3


def test_equation_errors_report_the_document_line():
    document = _with(reactions=[{"equation": "A => B", "orders": {}}])
    with pytest.raises(ModelSyntaxError) as info:
        read_model(_text(document))
    assert info.value.line == 5


@pytest.mark.parametrize("reactions, message", [
    ([{"equation": "A -> B", "orders": {"Z": 1}}], "unknown species"),
    ([{"equation": "A <-> B", "orders": {}}], "reverse_orders"),
    ([{"equation": "A -> B", "orders": {}, "reverse_orders": {}}], "irreversible"),
    ([{"equation": "A -> B", "reversible": True, "orders": {}}], "contradicts"),
    ([{"equation": "A -> A", "orders": {}}], "self-loop"),
    ([{"equation": "A -> B", "orders": {}, "rate": 1}, {"equation": "B -> A", "orders": {}}], "every reaction"),
])
def test_model_validation_errors(reactions, message):
    with pytest.raises(ModelValidationError, match=message):
        read_model(_text(_with(reactions=reactions)))


def test_schema_rejects_unknown_keys():
    assert schema_errors(_with(colour="red"), MODEL_SCHEMA)
    with pytest.raises(ModelValidationError):
        read_model(_text(_with(colour="red")))


def test_orientation_must_name_known_reactions():
    with pytest.raises(ModelValidationError, match="orientation"):
        read_model(_text(_with(orientation=["R9"])))


# ============================================================
# ROUND TRIP AND CORPUS
# ============================================================

@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_emitted_corpus_models_read_back_identically(name):
    loaded = load_model(name)
    text = emit_model(loaded.system, loaded.name, orientation=loaded.orientation)
    again = read_model(text)
    assert again.system == loaded.system
    assert again.orientation == loaded.orientation


def test_emit_folds_reversible_pairs():
    document = json.loads(emit_model(parse_model(_text(_CHAIN)), "chain"))
    assert [r["equation"] for r in document["reactions"]] == ["0 -> A", "A <-> 2B", "B -> 0"]
    assert document["reactions"][1]["reverse_orders"] == {"B": "1/3"}


def test_corpus_listing_and_unknown_names():
    assert [name for name, _ in list_corpus()] == list(BUILTIN_MODELS)
    assert len(BUILTIN_MODELS) == 5
    with pytest.raises(ModelValidationError, match="cannot read model"):
        load_model("no-such-model")


def test_heck_orders_are_exact():
    system = load_model("heck-carbon").system
    assert system.orders(0) == {"A1": Fraction(19975, 100), "A2": Fraction(-8603, 100)}
    assert load_model("heck-carbon").orientation == ("R4",)
