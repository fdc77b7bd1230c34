"""Cryptanalysis workbench for arbitrated quantum signature protocols."""
from .errors import AQSError
from .harness import Report, ScenarioConfig, emit_report, run_scenario

__version__ = "0.1.0"

__all__ = ["AQSError", "Report", "ScenarioConfig", "emit_report", "run_scenario", "__version__"]
