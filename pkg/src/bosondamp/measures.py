"""Distance-type non-Gaussianity degrees of Fock-diagonal states.

A Fock-diagonal state commutes with its Gaussian reference (the thermal state
of equal mean photon number), so the fidelity reduces to the classical
Bhattacharyya overlap of the two photon-number distributions.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .states import (
    mean_photon,
    purity,
    thermal_entropy,
    thermal_probs,
    von_neumann_entropy,
)

RE_SLACK = 1e-12

CSV_COLUMNS = ("gamma_t", "delta_hs", "delta_re", "delta_f", "mean_n", "purity", "entropy")

__all__ = ["MeasureReport", "delta_hs", "delta_re", "delta_f", "report", "CSV_COLUMNS"]


@dataclass(frozen=True)
class MeasureReport:
    time: float
    delta_hs: float
    delta_re: float
    delta_f: float
    mean_photon: float
    purity: float
    entropy: float

    def to_dict(self):
        d = asdict(self)
        return {
            "gamma_t": d["time"],
            "delta_hs": d["delta_hs"],
            "delta_re": d["delta_re"],
            "delta_f": d["delta_f"],
            "mean_n": d["mean_photon"],
            "purity": d["purity"],
            "entropy": d["entropy"],
        }

    def to_row(self, fmt="{:.12g}"):
        return ",".join(fmt.format(v) for v in self.to_dict().values())


def _reference(state):
    n = mean_photon(state)
    return n, thermal_probs(n, state.probs.size)


def delta_hs(state):
    """Hilbert-Schmidt degree, normalized by twice the state's purity."""
    n, s = _reference(state)
    p = state.probs
    overlap = math.fsum((p * s).tolist())
    return _clamp(0.5 * (1.0 + (1.0 / (2.0 * n + 1.0) - 2.0 * overlap) / purity(state)))


def delta_re(state):
    """Relative-entropy degree ``S(rho_G) - S(rho)``, in nats."""
    value = thermal_entropy(mean_photon(state)) - von_neumann_entropy(state)
    return _clamp(value)


def delta_f(state):
    """Bures (fidelity) degree ``1 - sum_l sqrt(p_l s_l)``."""
    _, s = _reference(state)
    terms = np.sqrt(state.probs * s)
    terms = np.sort(terms)[::-1]
    return _clamp(1.0 - math.fsum(terms.tolist()))


def _clamp(value):
    # round-off may push a vanishing degree just below zero
    if value < -RE_SLACK:
        raise ArithmeticError(f"non-Gaussianity degree came out negative ({value:.3e})")
    return max(value, 0.0)


def report(state, time=0.0):
    return MeasureReport(
        time=float(time),
        delta_hs=delta_hs(state),
        delta_re=delta_re(state),
        delta_f=delta_f(state),
        mean_photon=mean_photon(state),
        purity=purity(state),
        entropy=von_neumann_entropy(state),
    )
