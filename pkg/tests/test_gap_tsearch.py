import numpy as np
import pytest

from ipo_rl.errors import ConfigError
from ipo_rl.gap import duality_gap_check
from ipo_rl.tsearch import Probe, TSearchFailure, TSearchResult, t_search


class TestGapCheck:
    def test_p_star_analytic(self):
        res = duality_gap_check(1, 10.0, resolution=401)
        assert res.p_star == pytest.approx(0.98, abs=1e-4)
        assert res.argmax_feasible[0] + res.argmax_feasible[1] == pytest.approx(
            1.0, abs=0.01)

    @pytest.mark.parametrize("m", [1, 2])
    @pytest.mark.parametrize("t", [10.0, 50.0, 100.0])
    def test_gap_within_bound(self, m, t):
        res = duality_gap_check(m, t, resolution=801)
        assert res.bound == m / t
        assert res.passed
        assert 0.0 <= res.gap <= res.bound + 2e-3

    def test_gap_shrinks_with_t(self):
        gaps = [duality_gap_check(1, t, resolution=801).gap
                for t in (5.0, 20.0, 80.0)]
        assert gaps[0] >= gaps[1] >= gaps[2]

    def test_implied_multipliers_positive(self):
        res = duality_gap_check(2, 50.0, resolution=801)
        assert len(res.lambdas) == 2
        assert all(l > 0.0 for l in res.lambdas)

    def test_barrier_argmax_strictly_feasible(self):
        res = duality_gap_check(1, 10.0, resolution=401)
        a1, a2 = res.argmax_barrier
        assert a1 + a2 - 1.0 < 0.0

    def test_invalid_args(self):
        with pytest.raises(ConfigError):
            duality_gap_check(1, 0.0)
        with pytest.raises(ConfigError):
            duality_gap_check(1, 10.0, resolution=2)
        with pytest.raises(ConfigError):
            duality_gap_check(3, 10.0)


def synthetic_probe(threshold, calls=None):
    """Feasible iff t <= threshold; mimics a monotone constraint curve."""
    def probe(t):
        if calls is not None:
            calls.append(t)
        return Probe(t=t, j_c=0.05 + 0.01 * (t - threshold), limit=0.05)
    return probe


class TestTSearch:
    def test_converges_near_threshold(self):
        res = t_search(synthetic_probe(37.0), 1.0, 100.0, budget=20, tol=0.25)
        assert isinstance(res, TSearchResult)
        assert res.recommended <= 37.0
        assert res.recommended >= 37.0 - 1.0  # within bracket resolution

    def test_recommended_probe_was_feasible(self):
        res = t_search(synthetic_probe(12.0), 1.0, 64.0, budget=15, tol=0.5)
        matching = [p for p in res.probes if p.t == res.recommended]
        assert matching and matching[0].feasible

    def test_all_feasible_returns_near_hi(self):
        res = t_search(synthetic_probe(1e9), 1.0, 100.0, budget=12, tol=0.5)
        assert res.recommended > 90.0

    def test_all_infeasible_raises_with_probes(self):
        with pytest.raises(TSearchFailure) as e:
            t_search(synthetic_probe(-1.0), 1.0, 100.0, budget=8, tol=0.5)
        assert len(e.value.probes) >= 1
        assert all(not p.feasible for p in e.value.probes)

    def test_degenerate_bracket_feasible(self):
        res = t_search(synthetic_probe(50.0), 20.0, 20.0, budget=3, tol=0.5)
        assert res.recommended == 20.0
        assert len(res.probes) == 1

    def test_degenerate_bracket_infeasible(self):
        with pytest.raises(TSearchFailure):
            t_search(synthetic_probe(5.0), 20.0, 20.0, budget=3, tol=0.5)

    def test_zero_budget(self):
        with pytest.raises(TSearchFailure):
            t_search(synthetic_probe(50.0), 1.0, 100.0, budget=0)

    def test_inverted_bracket(self):
        with pytest.raises(ConfigError):
            t_search(synthetic_probe(50.0), 100.0, 1.0, budget=5)

    def test_budget_respected(self):
        calls = []
        try:
            t_search(synthetic_probe(37.0, calls), 1.0, 1e6, budget=6, tol=1e-9)
        except TSearchFailure:
            pass
        assert len(calls) <= 6
