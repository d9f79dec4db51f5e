"""s-ordered quasiprobability densities of damped Fock-diagonal states.

The densities are phase invariant, so everything is a function of the radius
``|beta|``. Values are in units of ``1/pi`` per unit phase-space area, i.e.
they integrate to one against ``d^2 beta``.

Order parameter conventions: ``s = 1`` is the Glauber-Sudarshan P function,
``s = 0`` the Wigner function and ``s = -1`` the Husimi Q function.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._parallel import pmap
from .dynamics import damped_mean_pats, thermal_occupancy
from .errors import DomainError
from .specfun import scaled_laguerre_table
from .states import FockDiagonalState, PatsParams, mean_photon

P_FUNCTION = 1.0
WIGNER = 0.0
HUSIMI = -1.0
NEGATIVITY_THRESHOLD = -1e-12

__all__ = [
    "P_FUNCTION",
    "WIGNER",
    "HUSIMI",
    "RadialProfile",
    "BathShapeParams",
    "parse_order",
    "a_param",
    "b_param",
    "bath_shape",
    "quasiprob_damped",
    "quasiprob_pats",
    "radial_profile",
    "normalization_check",
    "negativity_transition_scan",
    "sign_change_bracket",
]


def parse_order(value):
    """Order parameter from ``'p'``, ``'wigner'``, ``'q'`` or a real ``<= 1``."""
    names = {"p": P_FUNCTION, "wigner": WIGNER, "w": WIGNER, "q": HUSIMI, "husimi": HUSIMI}
    if isinstance(value, str) and value.lower() in names:
        return names[value.lower()]
    s = float(value)
    if not s <= 1.0:
        raise ValueError(f"order parameter must be <= 1, got {s}")
    return s


def _check_order(s):
    if not (s <= 1.0 and math.isfinite(s)):
        raise ValueError(f"order parameter must be a finite real <= 1, got {s}")


@dataclass(frozen=True)
class BathShapeParams:
    a_param: float
    b_param: float


@dataclass(frozen=True, eq=False)
class RadialProfile:
    s: float
    gamma_t: float
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.shape != v.shape:
            raise ValueError("radii and values must have the same length")
        if not np.all(np.isfinite(v)):
            raise ArithmeticError("quasiprobability values are not finite")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    @property
    def min_value(self):
        return float(self.values.min())

    @property
    def first_negative_radius(self):
        neg = np.flatnonzero(self.values < NEGATIVITY_THRESHOLD)
        return float(self.radii[neg[0]]) if neg.size else None

    def sign_changes(self, floor=0.0):
        """Number of sign changes along the grid, ignoring ``|value| <= floor``."""
        v = self.values[np.abs(self.values) > floor]
        return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))

    def to_csv(self, header=None):
        neg = self.first_negative_radius
        lines = [
            f"# s={self.s:.12g} gamma_t={self.gamma_t:.12g} "
            f"min_value={self.min_value:.12g} "
            f"first_negative_radius={'none' if neg is None else format(neg, '.12g')}"
        ]
        if header:
            lines.insert(0, header)
        lines.append("r,value")
        lines.extend(f"{r:.12g},{v:.12g}" for r, v in zip(self.radii, self.values))
        return "\n".join(lines) + "\n"


def a_param(bath, t, s):
    """Universal bath parameter ``nbar_R + (1-s)/2 - (nbar_R+1) e^{-gamma t}``.

    Every damped density is pointwise non-negative once this is >= 0.
    """
    _check_order(s)
    return bath.nbar_r + 0.5 * (1.0 - s) - (bath.nbar_r + 1.0) * math.exp(-bath.scaled(t))


def b_param(params, bath, t, s):
    """State-dependent width ``n_T + (1-s)/2 + nbar e^{-gamma t}`` of a damped PATS density."""
    _check_order(s)
    return thermal_occupancy(bath, t) + 0.5 * (1.0 - s) + params.nbar * math.exp(-bath.scaled(t))


def bath_shape(params, bath, t, s):
    return BathShapeParams(a_param(bath, t, s), b_param(params, bath, t, s))


def _width(bath, t, s):
    return thermal_occupancy(bath, t) + 0.5 * (1.0 - s)


def quasiprob_damped(state, bath, t, s, radius, with_error=False):
    """Density at ``|beta| = radius`` of an arbitrary damped Fock-diagonal input.

    Sums ``p_l A^l L_l(-r^2 e^{-gamma t}/(D A)) / D^(l+1)`` over the input
    distribution, each bracket produced by the ``A``-scaled Laguerre recurrence
    so ``A = 0`` needs no special case. ``radius`` may be an array.

    The series is cut at the input's cutoff. With ``with_error=True`` a
    ``(value, error)`` pair is returned, where ``error`` extrapolates the
    last two terms geometrically (``inf`` if they are not decaying). For the
    P function at short times the series can converge much more slowly than
    the photon-number tail.
    """
    _check_order(s)
    d = _width(bath, t, s)
    if not d > 0:
        raise DomainError(
            f"s={s} density is distributional at gamma*t={bath.scaled(t)} (width {d} <= 0)"
        )
    r2 = np.asarray(radius, dtype=float) ** 2
    e = math.exp(-bath.scaled(t))
    a = a_param(bath, t, s) / d
    table = scaled_laguerre_table(state.cutoff, a, r2 * e / d**2)
    terms = state.probs.reshape((-1,) + (1,) * (table.ndim - 1)) * table
    envelope = np.exp(-r2 / d) / (math.pi * d)
    out = envelope * terms.sum(axis=0)
    if not with_error:
        return float(out) if out.ndim == 0 else out
    err = envelope * _series_tail(terms)
    if out.ndim == 0:
        return float(out), float(err)
    return out, err


def _series_tail(terms, window=4):
    """Geometric tail estimate from the envelope of the last terms.

    Laguerre terms oscillate, so single-term ratios are useless. The ratio
    is taken between the largest magnitudes of the last two windows of
    ``window`` non-zero terms.
    """
    mags = np.abs(terms)
    # skip trailing exact zeros (Fock inputs end exactly on their support)
    nz = np.flatnonzero(mags.reshape(mags.shape[0], -1).max(axis=1) > 0)
    if nz.size < 2 * window:
        return mags[nz].sum(axis=0) if nz.size else np.zeros(mags.shape[1:])
    recent = mags[nz[-window:]].max(axis=0)
    before = mags[nz[-2 * window : -window]].max(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(before > 0, (recent / before) ** (1.0 / window), np.inf)
        tail = np.where(r < 1.0, recent * r / (1.0 - r), np.inf)
    return np.where(recent == 0.0, 0.0, tail)


def quasiprob_pats(params, bath, t, s, radius):
    """Closed-form density of a damped photon-added thermal state."""
    _check_order(s)
    b = b_param(params, bath, t, s)
    if not b > 0:
        raise DomainError(
            f"s={s} density of {params} is distributional at gamma*t={bath.scaled(t)}"
        )
    r2 = np.asarray(radius, dtype=float) ** 2
    e = math.exp(-bath.scaled(t))
    a = a_param(bath, t, s) / b
    y = (params.nbar + 1.0) * e * r2 / b**2
    M = params.m_added
    bracket = scaled_laguerre_table(M, a, y)[M]
    out = np.exp(-r2 / b) * bracket / (math.pi * b)
    return float(out) if out.ndim == 0 else out


def _density_fn(source, bath, t, s):
    if isinstance(source, PatsParams):
        return lambda r: quasiprob_pats(source, bath, t, s, r)
    if isinstance(source, FockDiagonalState):
        return lambda r: quasiprob_damped(source, bath, t, s, r)
    raise TypeError("source must be a PatsParams or a FockDiagonalState")


def _mean_at(source, bath, t):
    if isinstance(source, PatsParams):
        return damped_mean_pats(source, bath, t)
    return mean_photon(source) * math.exp(-bath.scaled(t)) + thermal_occupancy(bath, t)


def default_r_max(source, bath, t):
    return 5.0 * math.sqrt(_mean_at(source, bath, t) + 1.0)


def radial_profile(source, bath, t, s, r_max=None, n_points=512):
    """Density on a uniform radial grid ``[0, r_max]``.

    ``source`` is either :class:`PatsParams` (closed form) or a
    :class:`FockDiagonalState` input to be damped.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    density = _density_fn(source, bath, t, s)
    if r_max is None:
        r_max = default_r_max(source, bath, t)
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    radii = np.linspace(0.0, r_max, n_points)
    values = density(radii)
    return RadialProfile(float(s), bath.scaled(t), radii, values)


def normalization_check(density, r_max, decay_tol=1e-14):
    """``2 pi \\int_0^{r_max} W(r) r dr`` by adaptive quadrature.

    ``density`` is a callable of the radius. Warns if it has not decayed
    below ``decay_tol`` at ``r_max``.
    """
    edge = abs(float(density(r_max)))
    if edge > decay_tol:
        warnings.warn(
            f"density is still {edge:.2e} at r_max={r_max}; normalization is truncated",
            RuntimeWarning,
            stacklevel=2,
        )
    val, _ = quad(lambda r: float(density(r)) * r, 0.0, r_max, limit=400, epsabs=1e-13, epsrel=1e-12)
    return 2.0 * math.pi * val


def negativity_transition_scan(params, bath, s, t_grid, r_max=None, n_points=512):
    """Minimum of the radial profile at each time of ``t_grid``.

    Times where the density is distributional (e.g. the P function of a Fock
    state at ``t = 0``) report ``nan``.
    """
    s = parse_order(s)
    if s not in (WIGNER, P_FUNCTION):
        raise ValueError("negativity scans are defined for the Wigner and P functions")

    def point(t):
        try:
            prof = radial_profile(params, bath, t, s, r_max, n_points)
        except DomainError:
            return float(t), math.nan
        return float(t), prof.min_value

    return pmap(point, list(t_grid))


def sign_change_bracket(scan, threshold=NEGATIVITY_THRESHOLD):
    """Consecutive times ``(t_neg, t_pos)`` where the minimum stops being negative."""
    for (t0, m0), (t1, m1) in zip(scan, scan[1:]):
        if m0 < threshold and m1 >= threshold:
            return t0, t1
    return None
