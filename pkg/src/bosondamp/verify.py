"""Self-check suite behind ``bosondamp verify``.

Each check compares a closed form against an independent route (partial
sums, brute-force sums over an evolved distribution, the RK4 integrator,
published benchmark numbers) and records the worst error it saw. Parameter
points come from an unscrambled Halton sequence, so runs are reproducible
without any random seed.
"""

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import comb, eval_laguerre, hyp2f1
from scipy.stats import qmc

from . import dynamics, measures, quasiprob, specfun, states
from .dynamics import BathParams
from .states import PatsParams

PUBLISHED_THRESHOLDS = {0.1: (0.606, 2.398), 5.0: (0.087, 0.182)}

# (M, <N>_0, S(rho_G), S(rho), gamma*t_max) at nbar = 0.5, nbar_R = 5
ENTROPY_TABLE = (
    (1, 2.0, 1.909, 1.372, None),
    (3, 5.0, 2.703, 1.824, None),
    (5, 8.0, 3.140, 2.078, 0.5562),
    (10, 15.5, 3.770, 2.429, 0.5538),
)
ENTROPY_TABLE_NBAR = 0.5
ENTROPY_TABLE_NBAR_R = 5.0

# The exact thermal entropy at <N> = 15.5 is 3.7724; the printed 3.770 is off
# by more than the rounding tolerance. Reported, not failed, by verify.
KNOWN_DISCREPANCIES = {("entropy_gaussian", 10)}

TRIANGLE_NBAR = (0.0, 0.5, 1.0)
TRIANGLE_M = (0, 1, 3, 5, 10)
TRIANGLE_NBAR_R = (0.1, 1.0, 5.0)
TRIANGLE_GT = (0.05, 0.2, 1.0, 3.0)


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    passed: bool
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        if not math.isfinite(d["max_error"]):
            d["max_error"] = str(d["max_error"])
        return d


def halton_points(n, bounds):
    """``n`` deterministic points in the box ``bounds = [(lo, hi), ...]``."""
    sampler = qmc.Halton(d=len(bounds), scramble=False)
    pts = sampler.random(n + 1)[1:]  # drop the origin
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return lo + pts * (hi - lo)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# --- partial-sum oracles -------------------------------------------------


# The oracles evaluate their summands with scipy, not with this package.


def partial_gn(n, a, u, z, terms=400):
    l = np.arange(n, n + terms)
    return math.fsum((comb(l, n) * u**l * hyp2f1(-l, a, 1.0, z)).tolist())


def partial_laguerre_sum(n, u, z, terms=400):
    l = np.arange(n, n + terms)
    return math.fsum((comb(l, n) * u**l * eval_laguerre(l, z)).tolist())


def partial_squared_sum(b, v, z, terms=400):
    return math.fsum(v**n * specfun.gauss2f1_poly(n, b, 1.0, z) ** 2 for n in range(terms))


def _max_rel(pairs):
    return max((_rel(a, b) for a, b in pairs), default=0.0)


def check_identities(npts):
    errors = {}
    pts = halton_points(npts, [(0, 15), (-0.99, 10)])
    errors["legendre_2f1"] = _max_rel(
        (
            specfun.legendre(int(m), z),
            ((z + 1) / 2) ** int(m) * specfun.gauss2f1_poly(int(m), -int(m), 1.0, (z - 1) / (z + 1)),
        )
        for m, z in pts
    )
    pts = halton_points(npts, [(0, 6), (-3, 3), (0.05, 0.5), (0.0, 1.0)])
    errors["generating_gn"] = _max_rel(
        (specfun.gen_sum_gn(int(n), a, u, z), partial_gn(int(n), a, u, z)) for n, a, u, z in pts
    )
    pts = halton_points(npts, [(0, 6), (0.05, 0.5), (0.0, 3.0)])
    errors["laguerre_generating"] = _max_rel(
        (specfun.laguerre_gen_sum(int(n), u, z), partial_laguerre_sum(int(n), u, z)) for n, u, z in pts
    )
    pts = halton_points(npts, [(-2.0, 1.5), (0.5, 3.0), (1.2, 3.0), (0.05, 1.2)])
    errors["humbert"] = max(_rel(*specfun.humbert_check(a, c, x, z, 80)) for a, c, x, z in pts)
    pts = halton_points(npts, [(0, 5), (0.05, 0.5), (0.0, 1.0)])
    errors["squared_2f1"] = _max_rel(
        (specfun.squared2f1_sum(-int(m), v, z), partial_squared_sum(-int(m), v, z)) for m, v, z in pts
    )
    return errors


def check_thresholds():
    err = 0.0
    for n, (tw, tc) in PUBLISHED_THRESHOLDS.items():
        got = dynamics.threshold_times(BathParams(n))
        err = max(err, abs(got[0] - tw), abs(got[1] - tc))
    return err


def entropy_table_rows(cutoff_tol=states.DEFAULT_CUTOFF_TOL):
    """Computed rows ``(M, <N>_0, S(rho_G), S(rho), gamma*t_max or None)``."""
    bath = BathParams(ENTROPY_TABLE_NBAR_R)
    rows = []
    for M, *_ in ENTROPY_TABLE:
        params = PatsParams(ENTROPY_TABLE_NBAR, M)
        st = states.pats_state(params, cutoff_tol)
        if abs(states.mean_photon(st) - params.mean_photon) > 1e-10:
            raise ArithmeticError(f"truncated PATS mean drifted for M={M}")
        peak = dynamics.entropy_max(params, bath, tol_t=1e-5, cutoff_tol=cutoff_tol)
        rows.append(
            (
                M,
                params.mean_photon,
                states.thermal_entropy(params.mean_photon),
                states.von_neumann_entropy(st),
                None if peak is None else peak[0] * bath.gamma,
            )
        )
    return rows


def check_entropy_table():
    notes = []
    err = 0.0
    for got, ref in zip(entropy_table_rows(), ENTROPY_TABLE):
        M = ref[0]
        for key, g, r in zip(("mean_n0", "entropy_gaussian", "entropy", "gamma_t_max"), got[1:], ref[1:]):
            if r is None or g is None:
                if (r is None) != (g is None):
                    err = math.inf
                    notes.append(f"M={M} {key}: expected {r}, got {g}")
                continue
            e = abs(g - r)
            if (key, M) in KNOWN_DISCREPANCIES:
                notes.append(f"M={M} {key}: computed {g:.4f}, published {r} (known discrepancy)")
                continue
            err = max(err, e)
    return err, notes


def _grid(full):
    if full:
        return [
            (nb, M, nr, gt)
            for nb in TRIANGLE_NBAR
            for M in TRIANGLE_M
            for nr in TRIANGLE_NBAR_R
            for gt in TRIANGLE_GT
        ]
    return [(0.5, 3, 1.0, 0.2), (1.0, 5, 5.0, 1.0), (0.0, 1, 0.1, 3.0), (0.5, 10, 0.1, 0.05)]


def _diff(a, b):
    n = max(a.probs.size, b.probs.size)
    return float(np.abs(a.padded(n) - b.padded(n)).max())


def check_triangle(full, dt=1e-3):
    """Closed form vs general propagator vs RK4, trajectory by trajectory."""
    by_traj = {}
    for nb, M, nr, gt in _grid(full):
        by_traj.setdefault((nb, M, nr), []).append(gt)
    worst = 0.0
    for (nb, M, nr), gts in by_traj.items():
        params = PatsParams(nb, M)
        bath = BathParams(nr)
        start = states.pats_state(params)
        prev_t, cur = 0.0, start
        for gt in sorted(gts):
            cur = dynamics.ode_oracle(cur, bath, gt - prev_t, dt)
            prev_t = gt
            closed = dynamics.damped_pats(params, bath, gt)
            general = dynamics.damped_state_general(start, bath, gt)
            worst = max(worst, _diff(closed, general), _diff(closed, cur), _diff(general, cur))
    return worst


def check_functionals(full):
    worst = 0.0
    for nb, M, nr, gt in _grid(full):
        params = PatsParams(nb, M)
        bath = BathParams(nr)
        rho = dynamics.damped_pats(params, bath, gt)
        n_t = dynamics.damped_mean_pats(params, bath, gt)
        s = states.thermal_probs(n_t, rho.probs.size)
        brute_overlap = math.fsum((rho.probs * s).tolist())
        worst = max(
            worst,
            abs(dynamics.overlap_damped_pats(params, bath, gt) - brute_overlap),
            abs(dynamics.purity_damped_pats(params, bath, gt) - states.purity(rho)),
        )
    for nr in TRIANGLE_NBAR_R:
        params = PatsParams(0.5, 3)
        bath = BathParams(nr)
        target = 1.0 / (2 * nr + 1)
        worst = max(
            worst,
            abs(dynamics.overlap_damped_pats(params, bath, 40.0) - target),
            abs(dynamics.purity_damped_pats(params, bath, 40.0) - target),
        )
    return worst


def check_mean_law(full):
    worst = 0.0
    for nb, M, nr, gt in _grid(full):
        params = PatsParams(nb, M)
        bath = BathParams(nr)
        rho = dynamics.damped_pats(params, bath, gt)
        worst = max(worst, abs(states.mean_photon(rho) - dynamics.damped_mean_pats(params, bath, gt)))
    return worst


def check_quasiprob():
    worst = abs(quasiprob.quasiprob_pats(PatsParams(0.0, 1), BathParams(0.0), 0.0, 0.0, 0.0) + 2 / math.pi)
    radii = np.linspace(0.0, 4.0, 9)
    for nb, M, nr, gt, s in [
        (0.5, 2, 1.0, 0.3, 0.0),
        (1.0, 3, 0.1, 1.0, -1.0),
        (0.5, 1, 5.0, 0.5, 1.0),
        (0.3, 4, 1.0, 2.0, 0.0),
    ]:
        params = PatsParams(nb, M)
        bath = BathParams(nr)
        a = quasiprob.quasiprob_pats(params, bath, gt, s, radii)
        b = quasiprob.quasiprob_damped(states.pats_state(params), bath, gt, s, radii)
        worst = max(worst, float(np.abs(a - b).max()))
    return worst


def check_normalization():
    worst = 0.0
    for nb, M, nr, gt, s in [
        (0.0, 0, 0.0, 0.0, 0.0),
        (0.5, 5, 0.0, 0.0, 0.0),
        (1.0, 3, 0.1, 3.0, 1.0),
        (0.5, 2, 5.0, 0.5, -1.0),
    ]:
        params = PatsParams(nb, M)
        bath = BathParams(nr)
        r_max = 3.0 * quasiprob.default_r_max(params, bath, gt)
        val = quasiprob.normalization_check(
            lambda r: quasiprob.quasiprob_pats(params, bath, gt, s, r), r_max
        )
        worst = max(worst, abs(val - 1.0))
    return worst


def check_measures():
    st = states.fock_state(1)
    worst = max(
        abs(measures.delta_hs(st) - 5 / 12),
        abs(measures.delta_re(st) - 2 * math.log(2)),
        abs(measures.delta_f(st) - 0.5),
    )
    th = states.thermal_state(2.0)
    worst = max(worst, measures.delta_hs(th), measures.delta_re(th), measures.delta_f(th))
    return worst


def run(level="fast"):
    """Run the suite; returns ``(all_passed, [CheckResult, ...])``."""
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    full = level == "full"
    results = []

    def record(name, fn, tol):
        t0 = time.perf_counter()
        notes = []
        try:
            out = fn()
        except Exception as exc:  # a crash is a failed check, not a crash of the runner
            out = math.inf
            notes.append(f"{type(exc).__name__}: {exc}")
        if isinstance(out, tuple):
            out, notes = out[0], notes + list(out[1])
        results.append(
            CheckResult(name, float(out), tol, bool(out <= tol), time.perf_counter() - t0, notes)
        )

    record("thresholds", check_thresholds, 1e-3)
    record("entropy_table", check_entropy_table, 1e-3)
    record("measures_hand_values", check_measures, 1e-12)
    identity_errors = check_identities(50 if full else 10)
    for key, val in identity_errors.items():
        record(f"identity_{key}", lambda v=val: v, 1e-10)
    record("closed_form_functionals", lambda: check_functionals(full), 1e-10)
    record("mean_photon_law", lambda: check_mean_law(full), 1e-8)
    record("quasiprob_closed_vs_general", check_quasiprob, 1e-10)
    record("normalization", check_normalization, 1e-6)
    record("oracle_triangle", lambda: check_triangle(full), 1e-8)
    return all(r.passed for r in results), results
