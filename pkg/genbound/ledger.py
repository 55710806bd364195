"""Persist CLI runs and their rows."""
from typing import Sequence
import logging

from sqlalchemy.orm import Session

from genbound.models import ExperimentRun, ResultRecord
from genbound.schemas.experiment import ExperimentConfig, ResultRow

logger = logging.getLogger(__name__)


def record_run(db: Session, config: ExperimentConfig, rows: Sequence[ResultRow]) -> ExperimentRun:
    run = ExperimentRun(
        experiment=config.experiment.value,
        grid=config.grid,
        seeds=config.seeds,
        output_path=config.output_path,
        format=config.format.value,
        n_rows=len(rows),
        n_failed=sum(not row.passed for row in rows),
    )
    run.results = [
        ResultRecord(
            position=position,
            experiment=row.experiment,
            params=row.params,
            measured=row.measured,
            theoretical=row.theoretical,
            passed=row.passed,
            runtime_ms=row.runtime_ms,
        )
        for position, row in enumerate(rows)
    ]
    db.add(run)
    db.commit()
    db.refresh(run)
    logger.info("recorded run %s with %d rows", run.id, run.n_rows)
    return run
