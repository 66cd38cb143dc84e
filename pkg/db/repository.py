"""
db/repository.py

Repository layer for the analysis run ledger.
"""

import json
import logging

from db.models import AnalysisRun, WitnessRecord, utc_now

logger = logging.getLogger(__name__)


def _json(value) -> str:
    return json.dumps(value, sort_keys=True)


class RunRepository:
    def __init__(self, session):
        self.session = session

    def record_run(
        self,
        *,
        model,
        model_digest,
        verdict,
        reason=None,
        stats=None,
        started_at=None,
        finished_at=None
    ):
        stats = stats or {}
        run = AnalysisRun(
            model=model,
            model_digest=model_digest,
            verdict=verdict,
            reason=reason,
            orientations=stats.get("orientations", 0),
            patterns=stats.get("patterns", 0),
            nodes=stats.get("nodes", 0),
            leaves=stats.get("leaves", 0),
            budget=stats.get("budget", 0),
            started_at=started_at or utc_now(),
            finished_at=finished_at or utc_now()
        )
        self.session.add(run)
        self.session.flush()
        logger.info(f"RUN RECORDED | id={run.id} | model={model} | verdict={verdict}")
        return run

    def latest_for_model(self, *, model, model_digest=None):
        query = self.session.query(AnalysisRun).filter(AnalysisRun.model == model)
        if model_digest is not None:
            query = query.filter(AnalysisRun.model_digest == model_digest)
        return query.order_by(AnalysisRun.finished_at.desc(), AnalysisRun.id.desc()).first()


class WitnessRepository:
    def __init__(self, session):
        self.session = session

    def attach_witness(
        self,
        *,
        run_id,
        witness,
        verification=None
    ):
        """`witness` and `verification` are the JSON-ready report sections."""
        verification = verification or {}
        record = WitnessRecord(
            run_id=run_id,
            mu=_json(witness["mu"]),
            sigma=_json(witness["sigma"]),
            c_star=_json(witness["c_star"]),
            c_double_star=_json(witness["c_double_star"]),
            kappa=_json(witness["kappa"]),
            k=_json(witness["k"]),
            residual_c_star=verification.get("residual_c_star"),
            residual_c_double_star=verification.get("residual_c_double_star"),
            passed=bool(verification.get("pass", False))
        )
        self.session.add(record)
        self.session.flush()
        return record

    def for_run(self, *, run_id):
        return (
            self.session.query(WitnessRecord)
            .filter(WitnessRecord.run_id == run_id)
            .order_by(WitnessRecord.id)
            .all()
        )
