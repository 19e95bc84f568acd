import numpy as np
import pytest

from qksvm.errors import DegenerateError
from qksvm.stats import summarize, wilcoxon_signed_rank

from oracles import wilcoxon_enumeration


class TestWilcoxon:
    def test_single_nonzero_pair(self):
        a = np.array([1.0, 2.0, 3.0, 4.5])
        b = np.array([1.0, 2.0, 3.0, 4.0])
        result = wilcoxon_signed_rank(a, b)
        assert result.n_effective == 1
        assert result.p_value == 1.0
        assert result.method == "exact"

    def test_known_six_pair_case(self):
        # differences (+1,+2,+3,+4,+5,-6): W- = 6, two-sided exact p = 0.4375
        b = np.zeros(6)
        a = np.array([1.0, 2.0, 3.0, 4.0, 5.0, -6.0])
        result = wilcoxon_signed_rank(a, b)
        assert result.w_minus == 6.0
        assert result.statistic == 6.0
        assert result.p_value == pytest.approx(0.4375, abs=1e-12)
        assert result.p_value == pytest.approx(wilcoxon_enumeration(a, b), abs=1e-12)

    def test_antisymmetry(self, rng):
        a = rng.normal(size=12)
        b = rng.normal(size=12)
        forward = wilcoxon_signed_rank(a, b)
        backward = wilcoxon_signed_rank(b, a)
        assert forward.p_value == backward.p_value
        assert forward.w_plus == backward.w_minus
        assert forward.w_minus == backward.w_plus

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            n = int(rng.integers(2, 11))
            a = rng.normal(size=n)
            b = a.copy()
            # inject ties in |difference| and some zero differences
            diffs = rng.choice([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0], size=n)
            b = a - diffs
            if np.all(diffs == 0.0):
                continue
            result = wilcoxon_signed_rank(a, b)
            assert result.method == "exact"
            assert result.p_value == pytest.approx(
                wilcoxon_enumeration(a, b), abs=1e-12
            )

    def test_scale_invariance_of_ranks(self, rng):
        a = rng.normal(size=10)
        b = rng.normal(size=10)
        base = wilcoxon_signed_rank(a, b)
        scaled = wilcoxon_signed_rank(100.0 * a, 100.0 * b)
        assert scaled.statistic == base.statistic
        assert scaled.p_value == base.p_value

    def test_zero_differences_dropped(self):
        a = np.array([1.0, 5.0, 3.0, 7.0, 2.0])
        b = np.array([1.0, 4.0, 3.0, 9.0, 1.0])
        result = wilcoxon_signed_rank(a, b)
        assert result.n_effective == 3

    def test_all_zero_differences_degenerate(self):
        with pytest.raises(DegenerateError):
            wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0])

    def test_normal_approximation_branch(self, rng):
        a = rng.normal(size=40)
        b = rng.normal(size=40)
        result = wilcoxon_signed_rank(a, b)
        assert result.method == "normal"
        assert 0.0 <= result.p_value <= 1.0

    def test_normal_branch_near_exact_at_boundary(self):
        # at n just above the exact cutoff the approximation should be close
        # to the sign-flip distribution (computed by convolution)
        from scipy.stats import rankdata

        from qksvm.stats import _exact_p

        for seed in range(5):
            gen = np.random.default_rng(seed)
            a = gen.normal(size=26)
            b = gen.normal(size=26)
            approx = wilcoxon_signed_rank(a, b)
            assert approx.method == "normal"
            diff = a - b
            ranks = rankdata(np.abs(diff[diff != 0.0]))
            assert approx.p_value == pytest.approx(
                _exact_p(ranks, approx.statistic), abs=0.02
            )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            wilcoxon_signed_rank([1.0], [1.0, 2.0])


class TestSummarize:
    def test_two_values(self):
        mean, sd = summarize([0.0, 2.0])
        assert mean == 1.0
        assert sd == pytest.approx(np.sqrt(2.0))

    def test_constant_vector(self):
        mean, sd = summarize([3.0, 3.0, 3.0])
        assert mean == 3.0
        assert sd == 0.0

    def test_permutation_invariance(self, rng):
        values = rng.normal(size=15)
        mean_a, sd_a = summarize(values)
        mean_b, sd_b = summarize(values[rng.permutation(15)])
        assert mean_a == pytest.approx(mean_b, abs=1e-15)
        assert sd_a == pytest.approx(sd_b, abs=1e-15)

    def test_tabled_scale_values(self):
        # accuracy-like sample with mean ~0.778 and sd ~0.038
        rng = np.random.default_rng(1)
        values = np.clip(rng.normal(0.778, 0.038, size=20), 0, 1)
        mean, sd = summarize(values)
        assert mean == pytest.approx(np.mean(values), abs=1e-15)
        assert sd == pytest.approx(np.std(values, ddof=1), abs=1e-15)

    def test_too_short(self):
        with pytest.raises(ValueError):
            summarize([1.0])
