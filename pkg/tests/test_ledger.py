import pytest

from db import session as ledger
from db.models import AnalysisRun, WitnessRecord
from db.repository import RunRepository, WitnessRepository
from main import main

_WITNESS = {
    "mu": {"A": "1"},
    "sigma": {"A": "3"},
    "c_star": {"A": 4.0},
    "c_double_star": {"A": 1.0},
    "kappa": {"R1": "2"},
    "k": {"R1": 2.0},
}


@pytest.fixture
def memory_ledger(monkeypatch):
    monkeypatch.delenv("MSA_DATABASE_URL", raising=False)
    ledger.configure("sqlite://")
    yield
    ledger.configure(None)


def test_disabled_ledger_yields_none(monkeypatch):
    monkeypatch.delenv("MSA_DATABASE_URL", raising=False)
    ledger.configure(None)
    with ledger.db_session() as session:
        assert session is None


def test_record_and_fetch_runs(memory_ledger):
    with ledger.db_session() as session:
        runs = RunRepository(session)
        first = runs.record_run(model="m", model_digest="d1", verdict="monostationary")
        second = runs.record_run(
            model="m", model_digest="d2", verdict="multistationary",
            stats={"nodes": 12, "budget": 100},
        )
        WitnessRepository(session).attach_witness(
            run_id=second.id, witness=_WITNESS, verification={"pass": True, "residual_c_star": 0.0},
        )
        assert first.id != second.id

    with ledger.db_session() as session:
        runs = RunRepository(session)
        latest = runs.latest_for_model(model="m", model_digest="d1")
        assert latest.verdict == "monostationary"
        records = WitnessRepository(session).for_run(run_id=runs.latest_for_model(model="m", model_digest="d2").id)
        assert len(records) == 1
        assert records[0].passed is True
        assert session.query(AnalysisRun).count() == 2


def test_analyze_records_into_the_ledger(memory_ledger, capsys):
    assert main(["analyze", "anderies", "--json", "--db-url", "sqlite://"]) == 0
    capsys.readouterr()
    with ledger.db_session() as session:
        run = RunRepository(session).latest_for_model(model="anderies")
        assert run.verdict == "multistationary"
        assert run.nodes > 0
        assert session.query(WitnessRecord).filter(WitnessRecord.run_id == run.id).count() == 1
