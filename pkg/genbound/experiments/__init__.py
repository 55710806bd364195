from genbound.experiments import (
    bounds_eval, covering_verify, maurey_verify, rademacher_verify, decay_study, compare_trauger, gap_study
)
from genbound.schemas.experiment import ExperimentName

SUITES = {
    ExperimentName.BOUNDS_EVAL: bounds_eval,
    ExperimentName.COVERING_VERIFY: covering_verify,
    ExperimentName.MAUREY_VERIFY: maurey_verify,
    ExperimentName.RADEMACHER_VERIFY: rademacher_verify,
    ExperimentName.DECAY_STUDY: decay_study,
    ExperimentName.COMPARE_TRAUGER: compare_trauger,
    ExperimentName.GAP_STUDY: gap_study,
}

__all__ = [
    "bounds_eval", "covering_verify", "maurey_verify", "rademacher_verify", "decay_study",
    "compare_trauger", "gap_study", "SUITES",
]
