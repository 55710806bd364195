from sqlalchemy import Column, String, DateTime, ForeignKey, Integer, Boolean, Float, JSON
from sqlalchemy.orm import relationship
from datetime import datetime
import uuid

from genbound.database import Base


def _uuid() -> str:
    return str(uuid.uuid4())


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(String(36), primary_key=True, default=_uuid)
    experiment = Column(String(64), nullable=False)
    grid = Column(JSON, nullable=False)
    seeds = Column(JSON, nullable=False)
    output_path = Column(String(1024), nullable=True)
    format = Column(String(8), nullable=False)

    # Outcome
    n_rows = Column(Integer, default=0)
    n_failed = Column(Integer, default=0)

    created_at = Column(DateTime, default=datetime.utcnow)

    # Relationships
    results = relationship("ResultRecord", back_populates="run", cascade="all, delete-orphan",
                           order_by="ResultRecord.position")

    def __repr__(self):
        return f"<ExperimentRun {self.experiment} ({self.n_failed}/{self.n_rows} failed)>"


class ResultRecord(Base):
    __tablename__ = "result_records"

    id = Column(String(36), primary_key=True, default=_uuid)
    run_id = Column(String(36), ForeignKey("experiment_runs.id", ondelete="CASCADE"), nullable=False)
    position = Column(Integer, nullable=False)  # row order in the emitted file

    experiment = Column(String(64), nullable=False)
    params = Column(JSON, nullable=False)
    measured = Column(Float, nullable=False)
    theoretical = Column(Float, nullable=False)
    passed = Column(Boolean, nullable=False)
    runtime_ms = Column(Float, default=0.0)

    run = relationship("ExperimentRun", back_populates="results")

    def __repr__(self):
        return f"<ResultRecord {self.experiment}#{self.position} passed={self.passed}>"
