"""
db/models.py

SQLAlchemy ORM models for the analysis run ledger.
"""

from datetime import datetime, timezone

from sqlalchemy import (
    Boolean,
    Column,
    DateTime,
    Float,
    ForeignKey,
    Index,
    Integer,
    String,
    Text,
)
from sqlalchemy.orm import declarative_base, relationship

Base = declarative_base()


def utc_now():
    return datetime.now(timezone.utc)


class AnalysisRun(Base):
    __tablename__ = "analysis_runs"
    __table_args__ = (
        Index("ix_analysis_runs_model_time", "model", "finished_at"),
        Index("ix_analysis_runs_digest", "model_digest"),
    )

    id = Column(Integer, primary_key=True)
    model = Column(String, nullable=False)
    model_digest = Column(String(64), nullable=False)
    verdict = Column(String, nullable=False)
    reason = Column(String, nullable=True)
    orientations = Column(Integer, nullable=False, default=0)
    patterns = Column(Integer, nullable=False, default=0)
    nodes = Column(Integer, nullable=False, default=0)
    leaves = Column(Integer, nullable=False, default=0)
    budget = Column(Integer, nullable=False, default=0)
    started_at = Column(DateTime(timezone=True), nullable=False, default=utc_now)
    finished_at = Column(DateTime(timezone=True), nullable=False, default=utc_now)

    witnesses = relationship("WitnessRecord", back_populates="run", cascade="all, delete-orphan")


class WitnessRecord(Base):
    __tablename__ = "witness_records"
    __table_args__ = (
        Index("ix_witness_records_run", "run_id"),
    )

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("analysis_runs.id"), nullable=False)
    mu = Column(Text, nullable=False)
    sigma = Column(Text, nullable=False)
    c_star = Column(Text, nullable=False)
    c_double_star = Column(Text, nullable=False)
    kappa = Column(Text, nullable=False)
    k = Column(Text, nullable=False)
    residual_c_star = Column(Float, nullable=True)
    residual_c_double_star = Column(Float, nullable=True)
    passed = Column(Boolean, nullable=False, default=False)
    created_at = Column(DateTime(timezone=True), nullable=False, default=utc_now)

    run = relationship("AnalysisRun", back_populates="witnesses")
