"""Two-operator small-cell spectrum sharing simulator.

Spectrum is split into component carriers; two operators coordinate per
stage through a one-shot proposal game resolved by the minimum rule and a
repeated favor-exchange game with utility thresholds and a favor ledger.
"""

from .config import ScenarioConfig, scenario1, scenario2
from .harness import run_paired, run_simulation
from .ran import Operator

__version__ = "0.1.0"

__all__ = [
    "Operator",
    "ScenarioConfig",
    "run_paired",
    "run_simulation",
    "scenario1",
    "scenario2",
    "__version__",
]
