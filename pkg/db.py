# db.py
# Архив прогонов CLI: таблица runs (параметры и итог) и report_rows (строки отчёта).
# Синхронный SQLAlchemy; URL берётся из DATABASE_URL или флага --db.
from contextlib import contextmanager

from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine, func
from sqlalchemy.orm import declarative_base, relationship, sessionmaker

Base = declarative_base()


class Run(Base):
    __tablename__ = "runs"
    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String, nullable=False)
    config_json = Column(Text, nullable=False)
    created_at = Column(DateTime, server_default=func.now())
    passed = Column(Boolean, default=True)
    rows = relationship("ReportRowRecord", back_populates="run", cascade="all, delete-orphan")


class ReportRowRecord(Base):
    __tablename__ = "report_rows"
    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False)
    position = Column(Integer, nullable=False)
    operator = Column(String, nullable=True)
    n = Column(Integer, nullable=True)
    q = Column(Float, nullable=True)
    x = Column(Float, nullable=True)
    function = Column(String, nullable=True)
    norm = Column(String, nullable=True)
    value = Column(Float, nullable=True)
    reference = Column(Float, nullable=True)
    error = Column(Float, nullable=True)
    bound = Column(Float, nullable=True)
    slack = Column(Float, nullable=True)
    passed = Column(Boolean, default=True)
    run = relationship("Run", back_populates="rows")


_engines = {}


def get_engine(url: str):
    if url not in _engines:
        _engines[url] = create_engine(url, echo=False, future=True)
    return _engines[url]


@contextmanager
def get_session(url: str):
    session = sessionmaker(bind=get_engine(url), expire_on_commit=False)()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def init_db(url: str) -> None:
    Base.metadata.create_all(get_engine(url))
