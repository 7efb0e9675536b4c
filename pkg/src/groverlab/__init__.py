"""Grover search laboratory on a dense state-vector simulator.

Modules:

* :mod:`groverlab.analytic` - closed-form rotation model.
* :mod:`groverlab.sv` - state vectors, oracles, diffusion, QFT, measurement.
* :mod:`groverlab.search` - known/unknown-count search and a classical baseline.
* :mod:`groverlab.amplify` - amplitude amplification and its eigen-structure.
* :mod:`groverlab.count` - amplitude estimation and quantum counting.
* :mod:`groverlab.lowerbound` - hybrid-argument lower-bound verifier.
* :mod:`groverlab.cli` - batch experiment runner.
"""

__version__ = "0.1.0"

from .analytic import RotationModel, critical_m, make_model, optimal_k, p_m, success_prob
from .sv import OracleSpec, StateVector, uniform_state
from .search import SearchOutcome, SearchParams, classical_baseline, search_known, search_unknown

__all__ = [
    "RotationModel", "make_model", "success_prob", "optimal_k", "p_m", "critical_m",
    "StateVector", "OracleSpec", "uniform_state",
    "SearchParams", "SearchOutcome", "search_known", "search_unknown", "classical_baseline",
]
