"""
Unit Tests for Tiers and Parameter Models
Run with: pytest tests/ -v
"""

import pytest
from pydantic import ValidationError

from affinity_sim.models import (
    MetricsRow,
    Params,
    RunSummary,
    validate_params,
    with_overrides,
)
from affinity_sim.tiers import Tier, tier_band, tier_caps


# ============== FIXTURES ==============

@pytest.fixture
def zero_row():
    """Metrics row of an unlinked population"""
    return MetricsRow(
        step=0, density=0.0, mean_net_size=0.0, clustering=0.0,
        mean_affinity=0.5, std_affinity=0.29, low_outliers=100, high_outliers=0,
        links_strongest=0, links_strong=0, links_medium=0, links_weak=0, links_weakest=0,
    )


# ============== TIER TESTS ==============

class TestTiers:
    """Tests for tier ordering, caps and bands"""

    def test_ordering(self):
        """Lower ordinal is the stronger tie"""
        assert Tier.STRONGEST < Tier.STRONG < Tier.MEDIUM < Tier.WEAK < Tier.WEAKEST
        assert Tier.MEDIUM.stronger() is Tier.STRONG
        assert Tier.MEDIUM.weaker() is Tier.WEAK
        assert Tier.STRONGEST.stronger() is None
        assert Tier.WEAKEST.weaker() is None

    def test_labels(self):
        """Labels are lowercase names"""
        assert [tier.label for tier in Tier] == ["strongest", "strong", "medium", "weak", "weakest"]

    @pytest.mark.parametrize("max_network,expected", [
        (50, (2, 5, 10, 15, 20)),
        (0, (0, 0, 0, 0, 0)),
        (99, (4, 9, 19, 29, 39)),
        (9, (0, 0, 1, 2, 3)),
    ])
    def test_caps_use_floor(self, max_network, expected):
        """Caps are floor(percent * max_network / 100)"""
        assert tier_caps(max_network) == expected

    def test_caps_reject_negative(self):
        """Negative limits are an error"""
        with pytest.raises(ValueError):
            tier_caps(-1)

    def test_band_strongest(self):
        """Strongest band is a fifth of the radius"""
        lo, hi = tier_band(Tier.STRONGEST, 0.5, 0.2)
        assert lo == pytest.approx(0.46)
        assert hi == pytest.approx(0.54)

    def test_band_weakest(self):
        """Weakest band is the full radius"""
        lo, hi = tier_band(Tier.WEAKEST, 0.5, 0.2)
        assert lo == pytest.approx(0.30)
        assert hi == pytest.approx(0.70)

    def test_band_zero_radius(self):
        """Zero radius degenerates to a point"""
        assert tier_band(Tier.MEDIUM, 0.5, 0.0) == (0.5, 0.5)

    def test_band_not_clipped(self):
        """Bands may extend outside [0, 1]"""
        lo, hi = tier_band(Tier.WEAKEST, 0.05, 0.2)
        assert lo < 0.0
        assert hi == pytest.approx(0.25)


# ============== PARAMS TESTS ==============

class TestParams:
    """Tests for parameter defaults and invariants"""

    def test_defaults(self):
        """Defaults match the reference model configuration"""
        params = Params()
        assert params.max_profiles == 100
        assert params.max_network == 50
        assert params.distortion == 0.05
        assert params.max_change == 0.15
        assert params.aff_radius == 0.2
        assert params.people_dead == 5
        assert params.steps == 1000
        assert params.initial_affinity is None
        assert validate_params(params) == []

    def test_network_must_fit_population(self):
        """max_network = max_profiles is a violation on max_network"""
        violations = validate_params({"max_profiles": 10, "max_network": 10})
        assert [v.field for v in violations] == ["max_network"]

    def test_negative_radius(self):
        """Negative radius is a violation on aff_radius"""
        violations = validate_params({"aff_radius": -0.1})
        assert [v.field for v in violations] == ["aff_radius"]
        assert str(violations[0]).startswith("aff-radius:")

    def test_deaths_must_fit_population(self):
        """people_dead cannot exceed the population"""
        violations = validate_params({"max_profiles": 3, "max_network": 2, "people_dead": 4})
        assert [v.field for v in violations] == ["people_dead"]

    def test_single_profile_population(self):
        """A one-profile population is constructible"""
        params = Params(max_profiles=1, max_network=1, people_dead=0)
        assert params.max_profiles == 1

    def test_hyphenated_aliases(self):
        """Hyphenated and snake-case names both populate fields"""
        assert Params.model_validate({"aff-radius": 0.3}).aff_radius == 0.3
        assert Params(aff_radius=0.3).aff_radius == 0.3

    def test_unknown_field_rejected(self):
        """Extra keys are not accepted"""
        with pytest.raises(ValidationError):
            Params.model_validate({"affinity-radius": 0.3})

    def test_frozen(self):
        """Params cannot be mutated in place"""
        params = Params()
        with pytest.raises(ValidationError):
            params.seed = 7

    def test_with_overrides_validates(self):
        """Overrides produce a validated copy"""
        params = with_overrides(Params(), max_change=0.0)
        assert params.max_change == 0.0
        with pytest.raises(ValidationError):
            with_overrides(Params(), max_network=100)


# ============== RESULT RECORD TESTS ==============

class TestRunSummary:
    """Tests for run summary consistency"""

    def test_empty_horizon_reports_initial_row(self, zero_row):
        """With zero steps the final row is the initial row"""
        summary = RunSummary(
            params=Params(steps=0), seed=42, initial_row=zero_row,
            final_row=zero_row, time_series=[], deaths_per_step=[],
        )
        assert summary.final_row == summary.initial_row

    def test_series_length_must_match_steps(self, zero_row):
        """Time series has one row per step"""
        with pytest.raises(ValidationError):
            RunSummary(
                params=Params(steps=2), seed=42, initial_row=zero_row,
                final_row=zero_row, time_series=[zero_row], deaths_per_step=[0],
            )

    def test_tier_counts_property(self, zero_row):
        """Tier counts are ordered Strongest first"""
        row = zero_row.model_copy(update={"links_weakest": 3})
        assert row.tier_counts == (0, 0, 0, 0, 3)
        assert row.total_links == 3
