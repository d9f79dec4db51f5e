"""Acceptance criteria, one test each.

Each test records a single PASS/FAIL line that is printed in the terminal
summary under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from bosondamp import cli, dynamics, measures, quasiprob, states, verify
from bosondamp.dynamics import BathParams
from bosondamp.states import PatsParams

TRAJECTORY_SETS = {"weak": (1.0, 0.1), "noisy": (0.5, 5.0)}  # (nbar, nbar_r)
FAMILY_M = (1, 3, 5, 10)


def test_threshold_times(criterion):
    published = {0.1: (0.606, 2.398), 5.0: (0.087, 0.182)}
    worst, slowest = 0.0, 0.0
    for nbar_r, (tw, tc) in published.items():
        t0 = time.perf_counter()
        got = dynamics.threshold_times(BathParams(nbar_r))
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(got[0] - tw), abs(got[1] - tc))
    ok = worst <= 1e-3 and slowest < 1e-3
    criterion(1, ok, f"max |error| {worst:.2e}, slowest call {slowest * 1e6:.1f} us")
    assert ok


def test_entropy_table(criterion):
    t0 = time.perf_counter()
    rows = verify.entropy_table_rows()
    elapsed = time.perf_counter() - t0
    misses = []
    for got, ref in zip(rows, verify.ENTROPY_TABLE):
        M = ref[0]
        if got[1] != ref[1]:
            misses.append(f"M={M} <N>0 {got[1]} vs {ref[1]}")
        for name, g, r in (("S(rho_G)", got[2], ref[2]), ("S(rho)", got[3], ref[3])):
            if abs(g - r) > 1e-3:
                misses.append(f"M={M} {name} {g:.4f} vs {r}")
        if (got[4] is None) != (ref[4] is None) or (ref[4] is not None and abs(got[4] - ref[4]) > 1e-3):
            misses.append(f"M={M} gamma_t_max {got[4]} vs {ref[4]}")
    ok = not misses and elapsed < 10
    criterion(2, ok, f"{elapsed:.1f} s; " + ("all 16 entries match" if not misses else "; ".join(misses)))
    assert elapsed < 10
    assert not misses, misses


def test_oracle_triangle(criterion):
    t0 = time.perf_counter()
    worst = verify.check_triangle(full=True)
    elapsed = time.perf_counter() - t0
    n = len(verify._grid(True))
    ok = worst <= 1e-8 and elapsed < 120
    criterion(3, ok, f"{n} grid points, max elementwise difference {worst:.2e}, {elapsed:.1f} s")
    assert n == 180
    assert ok


def test_closed_form_functionals(criterion):
    worst = verify.check_functionals(full=True)
    ok = worst <= 1e-10
    criterion(4, ok, f"overlap and purity vs brute-force sums and gamma t = 40 limit, max error {worst:.2e}")
    assert ok


def _wmin(params, bath, gt, s):
    return quasiprob.radial_profile(params, bath, gt, s, n_points=2048).min_value


def test_quasiprobability_thresholds(criterion):
    params = PatsParams(1.0, 3)
    details, ok = [], True
    for nbar_r in (0.1, 5.0):
        bath = BathParams(nbar_r)
        t_w, t_c = dynamics.threshold_times(bath)
        # same relative positions as gamma t = 0.58 and 0.64 around 0.606
        before, after = (0.58, 0.64) if nbar_r == 0.1 else (t_w * 0.58 / 0.606, t_w * 0.64 / 0.606)
        w_before, w_after = _wmin(params, bath, before, 0.0), _wmin(params, bath, after, 0.0)
        step = t_c / 240.0
        grid = t_c + step * np.arange(-5, 6) + step / 2
        bracket = quasiprob.sign_change_bracket(quasiprob.negativity_transition_scan(params, bath, 1.0, grid))
        here = w_before < -1e-9 and w_after >= -1e-12 and bracket is not None and bracket[0] <= t_c <= bracket[1]
        ok &= here
        details.append(
            f"nbar_R={nbar_r}: W({before:.4g})={w_before:.2e}, W({after:.4g})={w_after:.1e}, P bracket {bracket}"
        )
    criterion(5, ok, "; ".join(details))
    assert ok


def test_negativity_structure_at_t0(criterion):
    bath = BathParams(0.1)
    counts = {
        (nbar, M): quasiprob.radial_profile(PatsParams(nbar, M), bath, 0.0, 0.0).sign_changes()
        for nbar in (0.3, 1.0)
        for M in range(1, 7)
    }
    bad = {k: v for k, v in counts.items() if v != k[1]}
    origin = quasiprob.quasiprob_damped(states.fock_state(1), bath, 0.0, 0.0, 0.0)
    ok = not bad and abs(origin + 2 / math.pi) <= 1e-10
    criterion(6, ok, f"sign-change mismatches {bad or 'none'}; Fock-1 W(0) + 2/pi = {origin + 2 / math.pi:.1e}")
    assert ok


NORMALIZATION_CASES = [
    (PatsParams(0.0, 0), 0.0, 0.0, 0.0),
    (PatsParams(0.5, 1), 0.1, 0.0, 0.0),
    (PatsParams(1.0, 3), 0.1, 0.3, 0.0),
    (PatsParams(1.0, 10), 0.1, 1.0, 0.0),
    (PatsParams(0.5, 5), 5.0, 0.05, -1.0),
    (PatsParams(0.5, 10), 5.0, 0.5, -1.0),
    (PatsParams(1.0, 3), 0.1, 3.0, 1.0),
    (PatsParams(0.5, 2), 5.0, 0.2, 1.0),
    (PatsParams(0.3, 4), 1.0, 0.7, -0.5),
    (states.fock_state(2), 0.0, 0.4, 0.0),
    (states.pats_state(PatsParams(1.0, 2)), 1.0, 0.6, -1.0),
    (states.thermal_state(2.0), 0.5, 1.5, 0.5),
]


def test_normalization(criterion):
    worst = 0.0
    for source, nbar_r, gt, s in NORMALIZATION_CASES:
        bath = BathParams(nbar_r)
        f = quasiprob._density_fn(source, bath, gt, s)
        r_max = 3 * quasiprob.default_r_max(source, bath, gt)
        worst = max(worst, abs(quasiprob.normalization_check(f, r_max) - 1.0))
    ok = worst <= 1e-6
    criterion(7, ok, f"{len(NORMALIZATION_CASES)} (state, s, t) cases, max |mass - 1| {worst:.1e}")
    assert ok


def _trajectories(grid):
    out = {}
    for name, (nbar, nbar_r) in TRAJECTORY_SETS.items():
        bath = BathParams(nbar_r)
        for M in FAMILY_M:
            out[name, M] = [measures.report(dynamics.damped_pats(PatsParams(nbar, M), bath, t), t) for t in grid]
    return out


def test_measure_monotonicity(criterion):
    grid = np.linspace(0.0, 5.0, 100)
    traj = _trajectories(grid)
    rises = 0
    for reps in traj.values():
        for a, b in zip(reps, reps[1:]):
            rises += (b.delta_f > a.delta_f + 1e-9) + (b.delta_re > a.delta_re + 1e-9)
    disorder = 0
    for i in range(grid.size):
        for key in ("delta_f", "delta_re"):
            vals = [getattr(traj["weak", M][i], key) for M in FAMILY_M]
            disorder += sum(b < a for a, b in zip(vals, vals[1:]))
    ok = rises == 0 and disorder == 0
    criterion(8, ok, f"{len(traj)} trajectories x 100 points: {rises} increases, {disorder} ordering violations")
    assert ok


def test_emitted_curves(criterion, tmp_path, capsys):
    problems = []
    for name, (nbar, nbar_r) in TRAJECTORY_SETS.items():
        for M in FAMILY_M:
            path = tmp_path / f"{name}_{M}.csv"
            code = cli.main(
                ["evolve", "--nbar", str(nbar), "--m", str(M), "--nbar-r", str(nbar_r),
                 "--t-stop", "5", "--t-count", "100", "--out", str(path)]
            )
            capsys.readouterr()
            if code != 0:
                problems.append(f"{name} M={M}: exit {code}")
                continue
            lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
            cols = lines[0].split(",")
            data = np.array([[float(x) for x in l.split(",")[:-1]] for l in lines[1:]])
            col = {c: data[:, i] for i, c in enumerate(cols[:-1])}
            anchor = measures.report(states.pats_state(PatsParams(nbar, M)))
            for key in ("delta_hs", "delta_re", "delta_f"):
                series = col[key]
                if np.any(np.diff(series) > 1e-9):
                    problems.append(f"{name} M={M} {key} not monotone")
                if abs(series[0] - getattr(anchor, key)) > 1e-9:
                    problems.append(f"{name} M={M} {key} t=0 anchor off by {abs(series[0] - getattr(anchor, key)):.1e}")
                if not series[-1] < 0.05 * series[0]:
                    problems.append(f"{name} M={M} {key} has not decayed ({series[-1]:.3g} of {series[0]:.3g})")
            order = np.argsort(col["delta_f"], kind="stable")
            if np.any(np.diff(col["delta_re"][order]) < -1e-9):
                problems.append(f"{name} M={M} delta_RE vs delta_F not increasing")
    ok = not problems
    criterion(10, ok, "8 emitted trajectories; " + ("shapes, anchors, decay and cross-plot ok" if ok else "; ".join(problems)))
    assert ok, problems


def test_identity_suite(criterion):
    t0 = time.perf_counter()
    errors = verify.check_identities(50)
    elapsed = time.perf_counter() - t0
    worst = max(errors.values())
    ok = worst <= 1e-10 and elapsed < 10
    criterion(9, ok, f"5 identities x 50 points, max relative error {worst:.1e}, {elapsed:.2f} s")
    assert ok
