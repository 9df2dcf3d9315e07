"""Tontine recovery schedules from a Riccati equation, finite-pool moment
ODEs, a discrete-period recursion, a stochastic-mortality expansion and a
Monte Carlo cross-check."""

__version__ = "0.1.0"

from .errors import (DegenerateDenominatorError, HazardCapError, InvalidConfigError, InvalidGammaError,  # noqa: E402
                     NegativeVarianceError, NoBracketError, NoConvergenceError,
                     NonFiniteError, OutOfRangeError, TontineError)
from .mortality import MortalityParams, cumulative_hazard, hazard, period_survival, survival  # noqa: E402
from .numerics import OdeGrid  # noqa: E402
from .riccati import (MarketParams, RecoverySchedule, infinite_pool_stddev, infinite_pool_z,  # noqa: E402
                      riccati_schedule_closed_form, riccati_schedule_ode)
from .pool import (PoolMoments, VarianceResult, extremal_iteration_solve, extremal_kappa1_schedule,  # noqa: E402
                   extremal_kappak_schedule, propagate_moments, propagate_variance, riccati_extremal_kappa)
from .discrete import DiscreteResult, DiscreteSpec, discrete_schedule  # noqa: E402
from .stochmort import (AsymptoticExpansion, StochMortParams, calibrate_rho, critical_gamma, expand,  # noqa: E402
                        log_utility_bar)
from .simulate import (CappedGBMHazard, Estimate, SimConfig, simulate_conditional_payout,  # noqa: E402
                       simulate_periodic, simulate_pool, simulate_stochastic_hazard, simulate_survivor_payout)
from ._accel import backend  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
