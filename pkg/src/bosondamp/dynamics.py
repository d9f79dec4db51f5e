"""Damping of a single bosonic mode by a thermal reservoir.

All numerics run on the dimensionless time ``gamma * t``; ``BathParams.gamma``
only converts between that and physical time. Evolved states come from the
closed-form Fock-basis solution, and :func:`ode_oracle` integrates the
diagonal master equation directly so the closed forms can be checked against
something that shares none of their algebra.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import minimize_scalar

from ._parallel import pmap
from .errors import TruncationError
from .specfun import binomial_pair_matrix, legendre, scaled2f1_poly
from .states import (
    DEFAULT_CUTOFF_TOL,
    FockDiagonalState,
    PatsParams,
    mean_photon,
    pats_state,
    thermal_cutoff,
    thermal_entropy,
    thermal_state,
    von_neumann_entropy,
)

ASYMPTOTIC_GT = 40.0
SAFETY_MARGIN = 10
RK4_STABILITY = 2.78  # RK4 stability boundary on the negative real axis

__all__ = [
    "BathParams",
    "RegimeLabel",
    "threshold_times",
    "classify_regime",
    "thermal_occupancy",
    "mean_photon_damped",
    "damped_state_general",
    "damped_state_zero_temp",
    "damped_pats",
    "damped_mean_pats",
    "overlap_damped_pats",
    "purity_damped_pats",
    "gaussian_purity_damped",
    "entropy_trace",
    "entropy_max",
    "ode_oracle",
    "rk4_step_limit",
]


@dataclass(frozen=True)
class BathParams:
    """Thermal reservoir: coupling ``gamma`` (1/time) and mean occupancy ``nbar_r``."""

    nbar_r: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")
        if not (self.nbar_r >= 0 and math.isfinite(self.nbar_r)):
            raise ValueError(f"nbar_r must be finite and >= 0, got {self.nbar_r}")

    def scaled(self, t):
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        return self.gamma * t


class RegimeLabel(enum.Enum):
    QUANTUM_SPEEDUP = "QuantumSpeedup"
    BOUND_UNIVERSAL = "BoundUniversal"
    CLASSICAL = "Classical"

    def __str__(self):
        return self.value


def threshold_times(bath):
    """Times after which the Wigner and the P function are non-negative.

    Both are properties of the bath alone. ``t_c`` is ``inf`` for a
    zero-temperature bath.
    """
    n = bath.nbar_r
    t_w = math.log1p(1.0 / (2.0 * n + 1.0)) / bath.gamma
    t_c = math.inf if n == 0 else math.log1p(1.0 / n) / bath.gamma
    return t_w, t_c


def classify_regime(bath, t):
    if t < 0:
        raise ValueError("time must be non-negative")
    t_w, t_c = threshold_times(bath)
    if t < t_w:
        return RegimeLabel.QUANTUM_SPEEDUP
    if t < t_c:
        return RegimeLabel.BOUND_UNIVERSAL
    return RegimeLabel.CLASSICAL


def thermal_occupancy(bath, t):
    """Thermal photons fed into the mode by time ``t``: ``nbar_r (1 - e^{-gamma t})``."""
    return bath.nbar_r * -math.expm1(-bath.scaled(t))


def mean_photon_damped(n0, bath, t):
    return n0 * math.exp(-bath.scaled(t)) + thermal_occupancy(bath, t)


def damped_mean_pats(params, bath, t):
    return mean_photon_damped(params.mean_photon, bath, t)


def _extrapolated_tail(rho):
    """Geometric extrapolation of the mass beyond the last entry."""
    last = rho[-1]
    prev = rho[-2] if rho.size > 1 else 0.0
    if last == 0.0:
        return 0.0
    if 0.0 < last < prev:
        r = last / prev
        return last * r / (1.0 - r)
    return math.inf


def _output_cutoff(mean_out, l_in, cutoff_tol):
    return max(l_in, thermal_cutoff(mean_out, cutoff_tol)) + SAFETY_MARGIN


def _evolve_with_kernel(kernel_fn, l_start, tail_in, cutoff_tol):
    """Grow the output cutoff until the extrapolated tail is below tolerance."""
    L = l_start
    for _ in range(40):
        rho = np.clip(kernel_fn(L), 0.0, None)
        trunc = _extrapolated_tail(rho)
        if trunc <= cutoff_tol:
            return FockDiagonalState(rho, tail_in + trunc)
        L = int(L * 1.5) + SAFETY_MARGIN
    raise TruncationError(f"evolved state did not reach tail {cutoff_tol} by cutoff {L}")


def damped_state_general(state, bath, t, cutoff_tol=DEFAULT_CUTOFF_TOL):
    """Damped photon-number distribution of an arbitrary Fock-diagonal input.

    ``rho_j(t) = sum_l p_l K(j, l)`` where ``K`` is the terminating-2F1 Fock
    propagator written with its prefactors absorbed, so it is finite down to
    ``t = 0``.
    """
    gt = bath.scaled(t)
    if state.tail_mass > cutoff_tol:
        raise TruncationError(
            f"input tail {state.tail_mass:.3e} already exceeds requested tolerance {cutoff_tol:.3e}"
        )
    if gt == 0.0:
        return state
    if bath.nbar_r == 0.0:
        return damped_state_zero_temp(state, math.exp(-gt), cutoff_tol)
    if gt >= ASYMPTOTIC_GT:
        return thermal_state(bath.nbar_r, cutoff_tol)
    e = math.exp(-gt)
    n_t = bath.nbar_r * -math.expm1(-gt)
    x = (bath.nbar_r + 1.0) * -math.expm1(-gt) / (n_t + 1.0)
    u = n_t / (n_t + 1.0)
    c = e / (n_t + 1.0) ** 2
    p = state.probs
    l_in = state.cutoff

    def kernel(L):
        K = binomial_pair_matrix(L, l_in, u, x, c)
        return (K @ p) / (n_t + 1.0)

    mean_out = mean_photon(state) * e + n_t
    return _evolve_with_kernel(kernel, _output_cutoff(mean_out, l_in, cutoff_tol), state.tail_mass, cutoff_tol)


def damped_state_zero_temp(state, decay, cutoff_tol=DEFAULT_CUTOFF_TOL):
    """Binomial thinning ``rho_j = sum_l C(l, j) p_l decay^j (1-decay)^(l-j)``.

    ``decay`` is ``e^{-gamma t}`` for a zero-temperature bath, or a detector
    efficiency for photon counting.
    """
    if not 0.0 <= decay <= 1.0:
        raise ValueError(f"decay must lie in [0, 1], got {decay}")
    if decay == 1.0:
        return state
    L = state.cutoff
    K = binomial_pair_matrix(L, L, 0.0, 1.0 - decay, decay)
    rho = np.clip(K @ state.probs, 0.0, None)
    return FockDiagonalState(rho, state.tail_mass)


def _pats_ingredients(params, bath, t):
    gt = bath.scaled(t)
    e = math.exp(-gt)
    one_minus_e = -math.expm1(-gt)
    n_t = bath.nbar_r * one_minus_e
    y = params.nbar * e + n_t
    return gt, e, one_minus_e, n_t, y


def damped_pats(params, bath, t, cutoff_tol=DEFAULT_CUTOFF_TOL):
    """Closed-form damped photon-added thermal state.

    The row ``K[M, j]`` of the absorbed 2F1 polynomial decays in ``j`` with
    ratios bounded by ``v (j+2)/(j+2-M)``, which yields a rigorous tail bound.
    """
    if not isinstance(params, PatsParams):
        raise TypeError("params must be PatsParams")
    gt, e, one_minus_e, n_t, y = _pats_ingredients(params, bath, t)
    if gt == 0.0:
        return pats_state(params, cutoff_tol)
    if gt >= ASYMPTOTIC_GT:
        return thermal_state(bath.nbar_r, cutoff_tol)
    M = params.m_added
    u = (bath.nbar_r + 1.0) * one_minus_e / (y + 1.0)
    v = y / (y + 1.0)
    c = (params.nbar + 1.0) * e / (y + 1.0) ** 2
    L = M + thermal_cutoff(y, cutoff_tol) + SAFETY_MARGIN
    for _ in range(40):
        rho = binomial_pair_matrix(M, L, u, v, c)[M] / (y + 1.0)
        r_next = v * (L + 2) / (L + 2 - M) if L + 2 > M else 0.0
        # the entry after the last one is bounded by r_{L+1} * rho_L
        if r_next < 1.0:
            nxt = rho[-1] * v * (L + 1) / (L + 1 - M) if L + 1 > M else 0.0
            tail = nxt / (1.0 - r_next)
            if tail <= cutoff_tol:
                return FockDiagonalState(rho, tail)
        L = int(L * 1.5) + SAFETY_MARGIN
    raise TruncationError(f"damped PATS did not reach tail {cutoff_tol} by cutoff {L}")


def overlap_damped_pats(params, bath, t):
    """``Tr[rho(t) rho_G(t)]`` for a damped photon-added thermal state."""
    gt, e, one_minus_e, n_t, y = _pats_ingredients(params, bath, t)
    n_t_mean = damped_mean_pats(params, bath, t)
    M = params.m_added
    num = n_t_mean + n_t + one_minus_e
    den = n_t_mean + n_t + params.nbar * e + 1.0
    return (num / den) ** M / den


def purity_damped_pats(params, bath, t, method="hypergeometric"):
    """Purity of a damped photon-added thermal state.

    ``method="hypergeometric"`` sums the terminating ``2F1(-M, -M; 1; .)``
    with its prefactor absorbed; ``method="legendre"`` goes through
    ``P_M``. The latter is singular when ``(n+1) e^{-gamma t}`` equals
    ``2 n_T + n e^{-gamma t} + 1 - e^{-gamma t}``.
    """
    gt, e, one_minus_e, n_t, y = _pats_ingredients(params, bath, t)
    M = params.m_added
    a = (params.nbar + 1.0) * e
    b = 2.0 * n_t + params.nbar * e + one_minus_e
    d = 2.0 * n_t + 2.0 * params.nbar * e + 1.0
    alpha = (a / d) ** 2
    beta = (b / d) ** 2
    if method == "hypergeometric":
        return scaled2f1_poly(M, M, alpha, beta) / d
    if method == "legendre":
        diff = alpha - beta
        if M == 0:
            return 1.0 / d
        if diff == 0.0:
            raise ZeroDivisionError("Legendre form is singular at this time")
        return diff**M * legendre(M, (alpha + beta) / diff) / d
    raise ValueError(f"unknown method {method!r}")


def gaussian_purity_damped(params, bath, t):
    return 1.0 / (2.0 * damped_mean_pats(params, bath, t) + 1.0)


def entropy_trace(params, bath, t_grid, cutoff_tol=DEFAULT_CUTOFF_TOL):
    """``(t, S(rho(t)), S(rho_G(t)))`` along ``t_grid``."""
    t_grid = [float(t) for t in t_grid]
    if any(t < 0 for t in t_grid) or t_grid != sorted(t_grid):
        raise ValueError("t_grid must be sorted and non-negative")

    def point(t):
        s = von_neumann_entropy(damped_pats(params, bath, t, cutoff_tol))
        return t, s, thermal_entropy(damped_mean_pats(params, bath, t))

    return pmap(point, t_grid)


def entropy_max(params, bath, tol_t=1e-5, cutoff_tol=DEFAULT_CUTOFF_TOL):
    """Interior maximum of the damped state's entropy, or ``None``.

    A 200-point log scan over ``gamma t`` in ``[1e-3, 40]`` locates the
    peak; bounded Brent refinement then pins it to ``tol_t``. A peak only
    counts if it sits strictly inside the window and rises above the
    asymptotic thermal entropy by more than round-off.
    """
    if tol_t <= 0:
        raise ValueError("tol_t must be positive")
    g = bath.gamma
    grid = np.logspace(-3, math.log10(ASYMPTOTIC_GT), 200)

    def entropy_at(gt):
        return von_neumann_entropy(damped_pats(params, bath, gt / g, cutoff_tol))

    values = np.array(pmap(entropy_at, grid))
    i = int(np.argmax(values))
    s_inf = thermal_entropy(bath.nbar_r)
    if i == 0 or i == grid.size - 1 or values[i] <= s_inf + 1e-9:
        return None
    res = minimize_scalar(
        lambda gt: -entropy_at(gt),
        bounds=(grid[i - 1], grid[i + 1]),
        method="bounded",
        options={"xatol": tol_t * g},
    )
    return res.x / g, -res.fun


def _rk4_rhs(p, j, nbar_r):
    # dp_j = (n+1)[(j+1)p_{j+1} - j p_j] + n[j p_{j-1} - (j+1) p_j]
    d = -((nbar_r + 1.0) * j + nbar_r * (j + 1.0)) * p
    d[:-1] += (nbar_r + 1.0) * j[1:] * p[1:]
    d[1:] += nbar_r * j[1:] * p[:-1]
    return d


def rk4_step_limit(cutoff, nbar_r):
    """Largest stable RK4 step (in ``gamma t``) for the truncated generator.

    The generator is a reversible birth-death matrix, so it is similar to a
    symmetric tridiagonal one whose extreme eigenvalue is cheap to get.
    """
    j = np.arange(cutoff + 1, dtype=float)
    diag = -((nbar_r + 1.0) * j + nbar_r * (j + 1.0))
    off = (j[:-1] + 1.0) * math.sqrt(nbar_r * (nbar_r + 1.0))
    lam = eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0]
    return RK4_STABILITY / abs(lam) if lam < 0 else math.inf


def ode_oracle(state, bath, t, dt, pad_tol=1e-22, leak_tol=1e-8):
    """Integrate the diagonal master equation with fixed-step classical RK4.

    ``dt`` is the largest step allowed, in units of ``1/gamma``. The actual
    step is the largest one not exceeding ``dt`` or 90% of the RK4 stability
    limit that lands exactly on ``t``. The Fock space is padded until the
    thermal tail at the larger of the input and reservoir means drops below
    ``pad_tol``. Probability leaking through the top level beyond
    ``leak_tol`` raises :class:`TruncationError`.
    """
    gt = bath.scaled(t)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = bath.nbar_r
    big = max(mean_photon(state), n)
    L = max(state.cutoff, thermal_cutoff(big, pad_tol) + 4 * SAFETY_MARGIN)
    p = state.padded(L + 1)
    if gt == 0.0:
        return FockDiagonalState(p, state.tail_mass)
    h_max = min(dt, 0.9 * rk4_step_limit(L, n))
    steps = max(1, math.ceil(gt / h_max - 1e-12))
    h = gt / steps
    j = np.arange(L + 1, dtype=float)
    for _ in range(steps):
        k1 = _rk4_rhs(p, j, n)
        k2 = _rk4_rhs(p + 0.5 * h * k1, j, n)
        k3 = _rk4_rhs(p + 0.5 * h * k2, j, n)
        k4 = _rk4_rhs(p + h * k3, j, n)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    total = math.fsum(p.tolist())
    leak = 1.0 - state.tail_mass - total
    if abs(leak) > leak_tol:
        raise TruncationError(f"probability drifted by {leak:.3e}; cutoff {L} too small")
    return FockDiagonalState(np.clip(p, 0.0, None), state.tail_mass + max(leak, 0.0))
