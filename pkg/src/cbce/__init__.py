"""Parameter-free online learning for changing environments.

The library pairs a sleeping-experts coin-betting engine with restart
schedules over dyadic interval families, yielding meta algorithms that adapt
to shifts without learning rates or knowledge of the shift count, plus
baselines, regret evaluators, and a benchmark harness.
"""

from .betting import (
    WealthCheck,
    betting_fraction_from_potential,
    kt_betting_fraction,
    kt_log_potential,
    kt_potential,
    wealth_lower_bound_holds,
)
from .blackbox import (
    CoinBettingLea,
    MahalanobisMetric,
    OnlineGradientDescent,
    psd_project,
    scale_and_cap_loss,
    trace_norm,
)
from .envs import (
    LeaEnvironment,
    MetricEnvironment,
    gen_lea_environment,
    gen_metric_environment,
)
from .harness import (
    ExperimentConfig,
    run_experiment,
    simulate,
    verify_bounds,
)
from .intervals import (
    DataStreaming,
    GeometricCovering,
    Interval,
    ds_active,
    ds_interval_starting_at,
    ds_partition,
    gc_active,
    gc_partition,
    make_schedule,
)
from .meta import (
    Cbce,
    FixedShare,
    Saol,
    meta_regret_bound,
    paper_prior_weight,
    sa_regret_bound,
)
from .regret import (
    Trace,
    best_shifting_loss,
    decompose_regret,
    interval_regret,
    m_shift_regret,
    meta_regret_on,
    moving_mean,
    sa_regret,
    sa_to_mshift_bound,
    static_regret,
)
from .sleeping import BettorState, SleepingCoinBetting, sleeping_regret_bound

__version__ = "0.1.0"

__all__ = [
    "BettorState",
    "Cbce",
    "CoinBettingLea",
    "DataStreaming",
    "ExperimentConfig",
    "FixedShare",
    "GeometricCovering",
    "Interval",
    "LeaEnvironment",
    "MahalanobisMetric",
    "MetricEnvironment",
    "OnlineGradientDescent",
    "Saol",
    "SleepingCoinBetting",
    "Trace",
    "WealthCheck",
    "best_shifting_loss",
    "betting_fraction_from_potential",
    "decompose_regret",
    "ds_active",
    "ds_interval_starting_at",
    "ds_partition",
    "gc_active",
    "gc_partition",
    "gen_lea_environment",
    "gen_metric_environment",
    "interval_regret",
    "kt_betting_fraction",
    "kt_log_potential",
    "kt_potential",
    "m_shift_regret",
    "make_schedule",
    "meta_regret_bound",
    "meta_regret_on",
    "moving_mean",
    "paper_prior_weight",
    "psd_project",
    "run_experiment",
    "sa_regret",
    "sa_regret_bound",
    "sa_to_mshift_bound",
    "scale_and_cap_loss",
    "simulate",
    "sleeping_regret_bound",
    "static_regret",
    "trace_norm",
    "verify_bounds",
    "wealth_lower_bound_holds",
]
