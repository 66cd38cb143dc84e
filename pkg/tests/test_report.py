import json
from fractions import Fraction

import pytest

from data.models import load_model
from data.validation import REPORT_SCHEMA, schema_errors
from engine.config_loader import AnalysisConfig
from engine.search import analyze
from kinetics.cfrm import cf_rm_transform
from reporting.report import build_report, emit_info, emit_report, info_document, jsonable, render_text


def _report(name, config=None, **kwargs):
    loaded = load_model(name)
    system, record = loaded.system, None
    if name == "ndk-defone":
        system, record = cf_rm_transform(loaded.system)
    verdict = analyze(system, config, preferred_orientation=loaded.orientation, **kwargs)
    return build_report(
        loaded.name, loaded.system, system, verdict,
        cf_rm=record, config=config, preferred_orientation=loaded.orientation,
    )


def test_jsonable_normalizes_numbers():
    assert jsonable({"a": Fraction(1, 4), "b": [Fraction(1, 3), 0.1 + 0.2], "c": None}) == {
        "a": "0.25", "b": ["1/3", 0.3], "c": None,
    }


def test_multistationary_report_is_schema_valid():
    document = json.loads(emit_report(_report("anderies"), "json"))
    assert schema_errors(document, REPORT_SCHEMA) == []
    assert document["verdict"]["status"] == "multistationary"
    witness = document["witness"]
    assert set(witness["c_star"]) == {"A1", "A2", "A3"}
    assert document["verification"]["pass"] is True


def test_monostationary_report_has_null_witness():
    document = json.loads(emit_report(_report("ermog-yeast", AnalysisConfig(run_prechecks=False)), "json"))
    assert schema_errors(document, REPORT_SCHEMA) == []
    assert document["verdict"]["status"] == "monostationary"
    assert document["witness"] is None
    assert document["network"]["deficiency"] == 7
    assert len(document["display"]["equation_groups"]) == 5


def test_cf_rm_summary_in_report():
    document = _report("ndk-defone").to_dict()
    assert document["kinetics"] == "PL-NDK"
    assert document["cf_rm"]["transformed"]["R3"] == {"from": "A1 -> 2A1", "to": "3A1 -> 4A1"}
    assert document["cf_rm"]["original_deficiency"] == 1
    assert document["cf_rm"]["transformed_deficiency"] == 2


def test_text_report_sections():
    text = render_text(_report("ermog-yeast", AnalysisConfig(run_prechecks=False)))
    for heading in ("NETWORK NUMBERS", "KINETICS PL-RDK", "FIRST SHELVED BRANCH", "VERDICT monostationary"):
        assert heading in text
    assert "0.7464*mu[X1] + 0.0243*mu[X5]" in text


def test_text_report_with_witness_and_trace():
    text = emit_report(_report("anderies", AnalysisConfig(trace=True)), "text").decode()
    assert "WITNESS" in text
    assert "VERIFICATION pass" in text
    assert "TRACE" in text


def test_unknown_format_is_rejected():
    with pytest.raises(ValueError, match="unknown report format"):
        emit_report(_report("anderies"), "yaml")


def test_info_document_for_ndk_model():
    document = info_document("ndk-defone", load_model("ndk-defone").system)
    assert document["kinetics"] == "PL-NDK"
    assert document["nf_reactants"] == {"A1": 2}
    assert document["regularity"]["positive_dependent"] is True
    text = emit_info(document).decode()
    assert "NF-reactant A1: N_R = 2" in text
    assert "R3: A1 -> 2A1" in text
