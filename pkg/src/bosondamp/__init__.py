"""Thermal damping of Fock-diagonal single-mode bosonic states.

Submodules: :mod:`specfun` (special functions), :mod:`states`,
:mod:`measures` (non-Gaussianity degrees), :mod:`dynamics`,
:mod:`quasiprob` (s-ordered densities), :mod:`verify` and :mod:`cli`.
"""

from .dynamics import (
    BathParams,
    RegimeLabel,
    classify_regime,
    damped_pats,
    damped_state_general,
    damped_state_zero_temp,
    entropy_max,
    entropy_trace,
    ode_oracle,
    overlap_damped_pats,
    purity_damped_pats,
    threshold_times,
)
from .errors import ConvergenceError, DomainError, TruncationError
from .measures import MeasureReport, delta_f, delta_hs, delta_re, report
from .quasiprob import RadialProfile, quasiprob_damped, quasiprob_pats, radial_profile
from .states import (
    FockDiagonalState,
    PatsParams,
    ThermalParams,
    fock_state,
    pats_state,
    thermal_state,
)

__version__ = "0.1.0"
