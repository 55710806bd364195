from genbound.models.run import ExperimentRun, ResultRecord

__all__ = [
    "ExperimentRun",
    "ResultRecord",
]
