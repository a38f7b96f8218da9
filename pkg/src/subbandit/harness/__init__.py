from .config import ExperimentConfig, load_config, parse_config, validate
from .results import emit_results, read_results_csv, results_csv, results_json
from .runner import RunResult, RoundLog, build_instance, run_cell, run_experiment, sweep

__all__ = [
    "ExperimentConfig", "load_config", "parse_config", "validate",
    "emit_results", "read_results_csv", "results_csv", "results_json",
    "RunResult", "RoundLog", "build_instance", "run_cell", "run_experiment", "sweep",
]
