import math

import numpy as np
import pytest

from bosondamp import measures, states
from bosondamp.states import FockDiagonalState, PatsParams


class TestHandValues:
    def test_fock_one(self):
        st = states.fock_state(1)
        assert measures.delta_hs(st) == pytest.approx(5 / 12, abs=1e-14)
        assert measures.delta_re(st) == pytest.approx(2 * math.log(2), abs=1e-14)
        assert measures.delta_f(st) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("n", [0.0, 0.4, 3.0])
    def test_gaussian_states_are_zero(self, n):
        st = states.thermal_state(n)
        assert measures.delta_hs(st) == pytest.approx(0.0, abs=1e-13)
        assert measures.delta_re(st) == pytest.approx(0.0, abs=1e-12)
        assert measures.delta_f(st) == pytest.approx(0.0, abs=1e-13)

    def test_fock_n_relative_entropy(self):
        # a Fock state is pure, so delta_RE is the thermal entropy at <N> = n
        st = states.fock_state(4)
        assert measures.delta_re(st) == pytest.approx(states.thermal_entropy(4.0), rel=1e-13)


class TestAgainstBruteForce:
    """Independent evaluation through full density matrices."""

    def brute(self, p):
        n = float(np.dot(np.arange(p.size), p))
        L = 400
        pp = np.zeros(L)
        pp[: p.size] = p
        s = states.thermal_probs(n, L)
        rho, sig = np.diag(pp), np.diag(s)
        hs = 0.5 * np.trace((rho - sig) @ (rho - sig)) / np.trace(rho @ rho)
        # commuting operators: fidelity is the classical overlap, computed via matrix sqrt
        fid = np.trace(np.sqrt(np.sqrt(rho) @ sig @ np.sqrt(rho)))
        return hs, 1 - fid

    @pytest.mark.parametrize("nbar,M", [(0.5, 1), (1.0, 3), (0.3, 6)])
    def test_pats(self, nbar, M):
        st = states.pats_state(PatsParams(nbar, M))
        hs, df = self.brute(st.probs)
        assert measures.delta_hs(st) == pytest.approx(hs, abs=1e-12)
        assert measures.delta_f(st) == pytest.approx(df, abs=1e-12)


class TestReport:
    def test_fields_and_row(self):
        st = states.pats_state(PatsParams(0.5, 1))
        rep = measures.report(st, 0.25)
        d = rep.to_dict()
        assert tuple(d) == measures.CSV_COLUMNS
        assert d["gamma_t"] == 0.25
        assert d["mean_n"] == pytest.approx(2.0)
        assert d["entropy"] == pytest.approx(1.372, abs=1e-3)
        assert rep.to_row().split(",")[0] == "0.25"

    def test_ordering_in_m(self):
        vals = [measures.report(states.pats_state(PatsParams(1.0, M))) for M in (1, 3, 5, 10)]
        for a, b in zip(vals, vals[1:]):
            assert a.delta_f < b.delta_f
            assert a.delta_re < b.delta_re

    def test_truncation_robustness(self):
        p = PatsParams(1.0, 3)
        loose = measures.report(states.pats_state(p))
        tight = measures.report(states.pats_state(p, cutoff_tol=1e-24))
        for k in ("delta_hs", "delta_re", "delta_f"):
            assert getattr(loose, k) == pytest.approx(getattr(tight, k), abs=1e-10)

    def test_negative_degree_is_an_error(self):
        with pytest.raises(ArithmeticError):
            measures._clamp(-1e-6)
        assert measures._clamp(-1e-15) == 0.0

    def test_all_degrees_in_range(self):
        st = FockDiagonalState([0.2, 0.1, 0.7])
        rep = measures.report(st)
        assert 0 <= rep.delta_f <= 1
        assert 0 <= rep.delta_hs <= 1
        assert rep.delta_re >= 0


class TestCutoffDoubling:
    """Doubling the cutoff moves no measure by more than 1e-9 on the PATS grid."""

    @pytest.mark.parametrize("nbar", [0.0, 0.5, 1.0])
    @pytest.mark.parametrize("M", [0, 1, 3, 5, 10])
    def test_doubling(self, nbar, M):
        from scipy.stats import nbinom

        st = states.pats_state(PatsParams(nbar, M))
        L2 = 2 * st.cutoff + 1
        l = np.arange(L2 + 1)
        p = np.where(l >= M, nbinom.pmf(l - M, M + 1, 1.0 / (nbar + 1.0)), 0.0)
        doubled = FockDiagonalState(p, max(0.0, 1.0 - math.fsum(p.tolist())))
        a, b = measures.report(st), measures.report(doubled)
        for k in ("delta_hs", "delta_re", "delta_f"):
            assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-9)
