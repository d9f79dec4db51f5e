"""Fock-diagonal single-mode states.

A state is stored as its photon-number distribution ``p_0 .. p_L`` plus a
declared upper bound on the probability mass beyond ``L``. Constructors pick
``L`` from an analytic tail bound, never from a fixed size.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import TruncationError

DEFAULT_CUTOFF_TOL = 1e-20
MAX_CUTOFF = 10**6
NEGATIVE_SLACK = 1e-14
NORM_SLACK = 1e-10

__all__ = [
    "DEFAULT_CUTOFF_TOL",
    "FockDiagonalState",
    "PatsParams",
    "ThermalParams",
    "thermal_state",
    "thermal_probs",
    "pats_state",
    "fock_state",
    "mean_photon",
    "purity",
    "von_neumann_entropy",
    "thermal_entropy",
    "reference_gaussian",
]


@dataclass(frozen=True)
class ThermalParams:
    mean_occupancy: float

    def __post_init__(self):
        if not (self.mean_occupancy >= 0 and math.isfinite(self.mean_occupancy)):
            raise ValueError(f"mean occupancy must be finite and >= 0, got {self.mean_occupancy}")


@dataclass(frozen=True)
class PatsParams:
    """Photon-added thermal state: ``m_added`` photons on a thermal state of mean ``nbar``."""

    nbar: float
    m_added: int

    def __post_init__(self):
        if not (self.nbar >= 0 and math.isfinite(self.nbar)):
            raise ValueError(f"nbar must be finite and >= 0, got {self.nbar}")
        if int(self.m_added) != self.m_added or self.m_added < 0:
            raise ValueError(f"m_added must be a non-negative integer, got {self.m_added}")
        object.__setattr__(self, "m_added", int(self.m_added))

    @property
    def mean_photon(self):
        return self.nbar * (self.m_added + 1) + self.m_added


@dataclass(frozen=True, eq=False)
class FockDiagonalState:
    """Truncated photon-number distribution.

    ``tail_mass`` bounds the probability beyond ``cutoff``. Tiny negative
    round-off (above ``-1e-14``) is clamped to zero; anything more negative is
    rejected, as is a total that is not 1 within ``1e-10``.
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("a state needs at least one probability")
        if not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite")
        if p.min() < -NEGATIVE_SLACK:
            raise ValueError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        tail = float(self.tail_mass)
        if tail < 0:
            raise ValueError("tail_mass must be non-negative")
        total = math.fsum(p.tolist()) + tail
        if abs(total - 1.0) > NORM_SLACK:
            raise ValueError(f"probabilities plus tail sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "tail_mass", tail)

    @property
    def cutoff(self):
        return self.probs.size - 1

    def padded(self, size):
        """Probabilities zero-padded (or not truncated) to ``size`` entries."""
        if size <= self.probs.size:
            return np.array(self.probs[:size])
        return np.concatenate([self.probs, np.zeros(size - self.probs.size)])

    def to_dict(self):
        return {"probs": self.probs.tolist(), "tail_mass": self.tail_mass}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj):
        return cls(np.asarray(obj["probs"], dtype=float), float(obj.get("tail_mass", 0.0)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, FockDiagonalState):
            return NotImplemented
        return self.tail_mass == other.tail_mass and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.probs.tobytes(), self.tail_mass))

    def __repr__(self):
        return f"FockDiagonalState(cutoff={self.cutoff}, tail_mass={self.tail_mass:.3g})"


def _check_tol(cutoff_tol):
    if not 0.0 < cutoff_tol < 1.0:
        raise ValueError(f"cutoff_tol must lie in (0, 1), got {cutoff_tol}")


def thermal_probs(mean, size):
    """First ``size`` Bose-Einstein probabilities at mean occupancy ``mean``."""
    l = np.arange(size)
    if mean == 0:
        out = np.zeros(size)
        out[0] = 1.0
        return out
    q = mean / (mean + 1.0)
    return np.exp(l * math.log(q)) / (mean + 1.0)


def thermal_cutoff(mean, cutoff_tol, max_cutoff=MAX_CUTOFF):
    """Smallest ``L`` whose geometric tail ``q**(L+1)`` is below ``cutoff_tol``."""
    if mean == 0:
        return 0
    q = mean / (mean + 1.0)
    L = max(0, math.ceil(math.log(cutoff_tol) / math.log(q)) - 1)
    if L > max_cutoff:
        raise TruncationError(f"thermal mean {mean} needs cutoff {L} > {max_cutoff}")
    return L


def thermal_state(params, cutoff_tol=DEFAULT_CUTOFF_TOL, max_cutoff=MAX_CUTOFF):
    """Thermal state truncated where its analytic tail drops below ``cutoff_tol``.

    ``params`` may be a :class:`ThermalParams` or a bare mean occupancy.
    """
    if not isinstance(params, ThermalParams):
        params = ThermalParams(float(params))
    _check_tol(cutoff_tol)
    mean = params.mean_occupancy
    L = thermal_cutoff(mean, cutoff_tol, max_cutoff)
    tail = 0.0 if mean == 0 else (mean / (mean + 1.0)) ** (L + 1)
    return FockDiagonalState(thermal_probs(mean, L + 1), tail)


def fock_state(n):
    p = np.zeros(n + 1)
    p[n] = 1.0
    return FockDiagonalState(p, 0.0)


def pats_state(params, cutoff_tol=DEFAULT_CUTOFF_TOL, max_cutoff=MAX_CUTOFF):
    """Photon-added thermal state.

    ``p_l = C(l, M) nbar^(l-M) / (nbar+1)^(l+1)`` for ``l >= M``. Entries are
    built from the ratio ``p_{l+1}/p_l = q (l+1)/(l+1-M)``, and the tail past
    ``L`` is bounded by ``p_{L+1} / (1 - r_{L+1})`` since the ratios decrease.
    """
    _check_tol(cutoff_tol)
    nbar, M = params.nbar, params.m_added
    if nbar == 0:
        return fock_state(M)
    q = nbar / (nbar + 1.0)
    logs = [-(M + 1) * math.log1p(nbar)]  # log p_M
    l = M
    while True:
        ratio = q * (l + 1) / (l + 1 - M)
        log_next = logs[-1] + math.log(ratio)
        r_next = q * (l + 2) / (l + 2 - M)
        if r_next < 1.0:
            tail = math.exp(log_next) / (1.0 - r_next)
            if tail <= cutoff_tol:
                break
        logs.append(log_next)
        l += 1
        if l > max_cutoff:
            raise TruncationError(f"{params} needs cutoff beyond {max_cutoff}")
    p = np.zeros(l + 1)
    p[M:] = np.exp(np.array(logs))
    return FockDiagonalState(p, tail)


def mean_photon(state):
    p = state.probs
    return math.fsum((np.arange(p.size) * p).tolist())


def purity(state):
    return math.fsum((state.probs**2).tolist())


def von_neumann_entropy(state):
    """Entropy in nats, with ``0 ln 0 = 0``."""
    return 0.0 - math.fsum(xlogy(state.probs, state.probs).tolist())


def thermal_entropy(mean):
    """``(N+1) ln(N+1) - N ln N``: entropy of a thermal state with mean ``N``."""
    return float(xlogy(mean + 1.0, mean + 1.0) - xlogy(mean, mean))


def reference_gaussian(state):
    """Thermal parameters of the Gaussian state sharing ``state``'s first two moments."""
    return ThermalParams(mean_photon(state))
