from .experiment_runner import ExperimentReport, ExperimentRunner

__all__ = ["ExperimentReport", "ExperimentRunner"]
