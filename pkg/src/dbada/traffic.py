"""Hourly user populations: mean profile plus zero-mean uniform fluctuation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MACRO_MEANS = (197, 170, 140, 110, 80, 50, 20, 5, 5)
HOTSPOT_MEANS = (1, 10, 20, 30, 40, 50, 60, 65, 65)


@dataclass(frozen=True)
class TrafficProfile:
    macro_means: tuple[int, ...]
    hotspot_means: tuple[int, ...]
    fluctuation_fraction: float = 0.2

    def __post_init__(self):
        if len(self.macro_means) != len(self.hotspot_means) or not self.macro_means:
            raise ValueError("macro_means and hotspot_means need the same non-zero length")
        if min(self.macro_means) < 0 or min(self.hotspot_means) < 0:
            raise ValueError("mean user counts must be non-negative")
        if not 0 <= self.fluctuation_fraction < 1:
            raise ValueError("fluctuation_fraction must lie in [0, 1)")

    @property
    def hours(self) -> int:
        return len(self.macro_means)


@dataclass(frozen=True)
class UserCounts:
    n_macro: int
    n_hotspot: int
    hour: int


def default_profile(fluctuation_fraction: float = 0.2) -> TrafficProfile:
    return TrafficProfile(MACRO_MEANS, HOTSPOT_MEANS, fluctuation_fraction)


def _fluctuate(mean, delta, rng):
    half = int(np.floor(delta * mean))
    return max(0, int(mean) + int(rng.integers(-half, half + 1)))


def user_counts(profile: TrafficProfile, hour: int,
                rng: np.random.Generator) -> UserCounts:
    """Draw ``N = mean + n`` with ``n`` uniform on ``[-floor(d*mean), floor(d*mean)]``.

    Counts are clamped at zero. ``hour`` is 0-based.
    """
    if not 0 <= hour < profile.hours:
        raise IndexError(f"hour {hour} outside profile of {profile.hours} hours")
    d = profile.fluctuation_fraction
    return UserCounts(
        n_macro=_fluctuate(profile.macro_means[hour], d, rng),
        n_hotspot=_fluctuate(profile.hotspot_means[hour], d, rng),
        hour=hour,
    )
