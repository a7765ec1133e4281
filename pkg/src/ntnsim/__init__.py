"""Link-budget, fading and outage/capacity simulation for GEO-rooted relay chains."""

from ntnsim.evaluator import (Estimate, EvaluationResult, SweepRow, SweepSpec, ergodic_capacity_mc,
                              evaluate, outage_analytic, outage_monte_carlo, sweep)
from ntnsim.fading import (ConvergenceError, NoFading, Rician, ShadowedRician,
                           exceedance_probability, sample_gain_db)
from ntnsim.geometry import slant_range
from ntnsim.linkbudget import HopBudget, af_end_to_end_snr, hop_snr_deterministic
from ntnsim.propagation import Environment, LinkEnvironment, LossBreakdown, total_path_loss
from ntnsim.scenarios import Band, ChainOptions, Configuration, Scenario, build_chain

__version__ = "0.1.0"

__all__ = [
    "Band", "ChainOptions", "Configuration", "ConvergenceError", "Environment", "Estimate",
    "EvaluationResult", "HopBudget", "LinkEnvironment", "LossBreakdown", "NoFading", "Rician",
    "Scenario", "ShadowedRician", "SweepRow", "SweepSpec", "af_end_to_end_snr", "build_chain",
    "ergodic_capacity_mc", "evaluate", "exceedance_probability", "hop_snr_deterministic",
    "outage_analytic", "outage_monte_carlo", "sample_gain_db", "slant_range", "sweep",
    "total_path_loss",
]
