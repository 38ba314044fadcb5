"""
Unit Tests for Seeded Random Streams
Run with: pytest tests/ -v
"""

import numpy as np
import pytest
from scipy import stats

from affinity_sim.rng import STREAM_NAMES, derive_seed, gaussian, make_streams, permutation, uniform


# ============== FIXTURES ==============

@pytest.fixture
def stream():
    """Initialization substream for seed 42"""
    return make_streams(42).init


# ============== STREAM TESTS ==============

class TestStreams:
    """Tests for stream derivation and independence"""

    def test_same_seed_same_draws(self):
        """Two stream sets from one seed agree on every substream"""
        a, b = make_streams(42), make_streams(42)
        for name in STREAM_NAMES:
            draws_a = [uniform(getattr(a, name), 0.0, 1.0) for _ in range(1000)]
            draws_b = [uniform(getattr(b, name), 0.0, 1.0) for _ in range(1000)]
            assert draws_a == draws_b

    def test_different_seed_different_draws(self):
        """Neighbouring seeds give different sequences"""
        a, b = make_streams(42), make_streams(43)
        assert [uniform(a.init, 0, 1) for _ in range(10)] != [uniform(b.init, 0, 1) for _ in range(10)]

    def test_substreams_are_distinct(self):
        """Each purpose has its own sequence"""
        streams = make_streams(42)
        firsts = {uniform(getattr(streams, name), 0.0, 1.0) for name in STREAM_NAMES}
        assert len(firsts) == len(STREAM_NAMES)

    def test_draws_in_one_stream_do_not_shift_another(self):
        """Consuming perception draws leaves mortality untouched"""
        a, b = make_streams(7), make_streams(7)
        for _ in range(500):
            gaussian(a.perception, 0.0, 1.0)
        assert uniform(a.mortality, 0, 1) == uniform(b.mortality, 0, 1)

    def test_derive_seed_is_deterministic(self):
        """Derived seeds depend only on the master seed and key"""
        assert derive_seed(42, 0, 1) == derive_seed(42, 0, 1)
        assert derive_seed(42, 0, 1) != derive_seed(42, 1, 0)
        assert derive_seed(42, 0, 1) != derive_seed(43, 0, 1)
        assert 0 <= derive_seed(42, 3, 4) < 2**64


# ============== DISTRIBUTION TESTS ==============

class TestUniform:
    """Tests for uniform draws"""

    def test_degenerate_interval(self, stream):
        """lo == hi returns lo"""
        assert uniform(stream, 0.0, 0.0) == 0.0

    def test_inverted_interval(self, stream):
        """lo > hi is an error"""
        with pytest.raises(ValueError):
            uniform(stream, 1.0, 0.0)

    def test_moments(self, stream):
        """Mean 0.5 and std 0.2887 over 1e5 draws"""
        draws = np.array([uniform(stream, 0.0, 1.0) for _ in range(100_000)])
        assert draws.mean() == pytest.approx(0.5, abs=0.01)
        assert draws.std() == pytest.approx(0.2887, abs=0.01)
        assert draws.min() >= 0.0 and draws.max() < 1.0

    def test_bins_are_even(self, stream):
        """Chi-square test over ten equal bins"""
        draws = [uniform(stream, 0.0, 1.0) for _ in range(20_000)]
        counts, _ = np.histogram(draws, bins=10, range=(0.0, 1.0))
        assert stats.chisquare(counts).pvalue > 0.001


class TestGaussian:
    """Tests for Gaussian draws"""

    def test_zero_sd(self, stream):
        """sd == 0 returns the mean"""
        assert gaussian(stream, 0.3, 0.0) == 0.3

    def test_negative_sd(self, stream):
        """Negative sd is an error"""
        with pytest.raises(ValueError):
            gaussian(stream, 0.0, -0.1)

    def test_moments(self, stream):
        """Sample mean and sd match the requested distribution"""
        draws = np.array([gaussian(stream, 0.0, 0.05) for _ in range(100_000)])
        assert draws.mean() == pytest.approx(0.0, abs=0.001)
        assert draws.std() == pytest.approx(0.05, abs=0.002)


class TestPermutation:
    """Tests for random permutations"""

    def test_empty(self, stream):
        assert permutation(stream, 0) == []

    def test_single(self, stream):
        assert permutation(stream, 1) == [0]

    def test_is_permutation(self, stream):
        """Every index appears once"""
        assert sorted(permutation(stream, 100)) == list(range(100))

    def test_first_position_uniform(self, stream):
        """Each index is equally likely to come first"""
        firsts = [permutation(stream, 5)[0] for _ in range(10_000)]
        counts = np.bincount(firsts, minlength=5)
        assert stats.chisquare(counts).pvalue > 0.001
