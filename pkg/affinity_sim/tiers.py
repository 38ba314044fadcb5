"""
Link Strength Tiers
Five-level tie scale with capacity caps and affinity bands
"""

from enum import IntEnum
from typing import Optional, Tuple


# Percent of maxNetwork each tier may hold, Strongest first.
# These sum to 105; the total out-degree cap is enforced separately.
CAPACITY_PERCENTS: Tuple[int, ...] = (5, 10, 20, 30, 40)

# Share of the affinity radius a perceived affinity must fall within
BAND_FRACTIONS: Tuple[float, ...] = (1 / 5, 2 / 5, 3 / 5, 4 / 5, 5 / 5)


class Tier(IntEnum):
    """Directed link strength; lower ordinal means a stronger tie"""

    STRONGEST = 0
    STRONG = 1
    MEDIUM = 2
    WEAK = 3
    WEAKEST = 4

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def band_fraction(self) -> float:
        return BAND_FRACTIONS[self]

    def stronger(self) -> Optional["Tier"]:
        """Next tier up, or None for Strongest"""
        return Tier(self - 1) if self > Tier.STRONGEST else None

    def weaker(self) -> Optional["Tier"]:
        """Next tier down, or None for Weakest"""
        return Tier(self + 1) if self < Tier.WEAKEST else None


def tier_caps(max_network: int) -> Tuple[int, ...]:
    """
    Per-tier out-link capacity for a personal network limit

    cap(t) = floor(percent(t) * max_network / 100), computed in integers so
    that e.g. 5% of 50 is exactly 2.
    """
    if max_network < 0:
        raise ValueError(f"max_network must be >= 0, got {max_network}")
    return tuple(max_network * pct // 100 for pct in CAPACITY_PERCENTS)


def tier_band(tier: Tier, own_affinity: float, aff_radius: float) -> Tuple[float, float]:
    """Closed interval of perceived affinities compatible with a tier (not clipped to [0,1])"""
    half_width = tier.band_fraction * aff_radius
    return own_affinity - half_width, own_affinity + half_width
