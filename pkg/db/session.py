"""
db/session.py

SQLAlchemy engine/session helpers for the optional run ledger.
"""

import os
import logging
from contextlib import contextmanager

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from db.models import Base

logger = logging.getLogger(__name__)

_engine = None
_session_factory = None
_url_override = None


def configure(url=None):
    """Point the ledger at `url` (None falls back to MSA_DATABASE_URL)."""
    global _engine, _session_factory, _url_override
    if _engine is not None:
        _engine.dispose()
    _engine = None
    _session_factory = None
    _url_override = url


def get_database_url():
    return _url_override or os.getenv("MSA_DATABASE_URL")


def get_engine():
    global _engine
    if _engine is not None:
        return _engine

    url = get_database_url()
    if not url:
        logger.info("MSA_DATABASE_URL is not set; run ledger is disabled.")
        return None

    _engine = create_engine(
        url,
        pool_pre_ping=True
    )
    init_schema(_engine)
    return _engine


def init_schema(engine):
    Base.metadata.create_all(engine)
    logger.debug(f"LEDGER SCHEMA READY | url={engine.url.render_as_string(hide_password=True)}")


def get_session_factory():
    global _session_factory
    if _session_factory is not None:
        return _session_factory

    engine = get_engine()
    if engine is None:
        return None

    _session_factory = sessionmaker(
        bind=engine,
        autoflush=False,
        autocommit=False
    )
    return _session_factory


@contextmanager
def db_session():
    """
    Session-based DB access with safe commit/rollback.
    Yields None if the ledger is not configured, so callers can skip writes.
    """
    session_factory = get_session_factory()
    if session_factory is None:
        yield None
        return

    session = session_factory()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        logger.exception("DB session failed")
        raise
    finally:
        session.close()
