"""Per-drop rate statistics, per-scenario averages and DBADA improvement tables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsRecord:
    hour: int
    drop: int
    scenario: str
    sum_rate_bps: float
    median_rate_bps: float
    p10_rate_bps: float
    power_w: float
    n_users: int = 0
    state: str = ""
    objective: float = 0.0

    @property
    def empty(self) -> bool:
        return self.n_users == 0


@dataclass(frozen=True)
class ScenarioSummary:
    scenario: str
    avg_sum_rate: float
    avg_median_rate: float
    avg_p10_rate: float
    avg_power_w: float
    energy_per_sum: float
    energy_per_median: float
    energy_per_p10: float


@dataclass(frozen=True)
class Improvement:
    dbada: str
    baseline: str
    energy_per_sum_pct: float
    energy_per_median_pct: float
    energy_per_p10_pct: float


def percentile(rates, p: float) -> float:
    """Linear-interpolation percentile, rank ``1 + p (M - 1)`` on sorted data."""
    x = np.sort(np.asarray(rates, dtype=float))
    if x.size == 0:
        raise ValueError("percentile of an empty sequence")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    pos = p * (x.size - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, x.size - 1)
    return float(x[lo] + (pos - lo) * (x[hi] - x[lo]))


def drop_metrics(evaluation, hour: int, drop: int, label: str) -> MetricsRecord:
    rates = evaluation.rate_bps
    if len(rates) == 0:
        return MetricsRecord(hour, drop, label, 0.0, 0.0, 0.0,
                             evaluation.network_power_w, 0, str(evaluation.state),
                             evaluation.objective)
    return MetricsRecord(
        hour, drop, label,
        sum_rate_bps=float(np.sum(rates)),
        median_rate_bps=percentile(rates, 0.5),
        p10_rate_bps=percentile(rates, 0.1),
        power_w=float(evaluation.network_power_w),
        n_users=len(rates),
        state=str(evaluation.state),
        objective=float(evaluation.objective),
    )


def _ratio(num, den):
    return num / den if den > 0 else math.inf


def aggregate(records) -> ScenarioSummary:
    """Means over all records; energy-per-rate is mean power over mean rate."""
    records = sorted(records, key=lambda r: (r.hour, r.drop))
    if not records:
        raise ValueError("aggregate needs at least one record")
    labels = {r.scenario for r in records}
    if len(labels) != 1:
        raise ValueError(f"records mix scenarios: {sorted(labels)}")
    # math.fsum makes the mean independent of record order
    n = len(records)
    mean = {f: math.fsum(getattr(r, f) for r in records) / n
            for f in ("sum_rate_bps", "median_rate_bps", "p10_rate_bps", "power_w")}
    return ScenarioSummary(
        scenario=records[0].scenario,
        avg_sum_rate=mean["sum_rate_bps"],
        avg_median_rate=mean["median_rate_bps"],
        avg_p10_rate=mean["p10_rate_bps"],
        avg_power_w=mean["power_w"],
        energy_per_sum=_ratio(mean["power_w"], mean["sum_rate_bps"]),
        energy_per_median=_ratio(mean["power_w"], mean["median_rate_bps"]),
        energy_per_p10=_ratio(mean["power_w"], mean["p10_rate_bps"]),
    )


def improvement_pct(baseline: float, dbada: float) -> float:
    if baseline == 0:
        raise ZeroDivisionError("baseline metric is zero")
    return 100.0 * (baseline - dbada) / baseline


def improvement_table(dbada: ScenarioSummary, baselines) -> list[Improvement]:
    """Percent reduction of each energy-per-rate metric relative to each baseline.

    Positive means DBADA spends less energy per unit rate.
    """
    return [
        Improvement(
            dbada.scenario, b.scenario,
            improvement_pct(b.energy_per_sum, dbada.energy_per_sum),
            improvement_pct(b.energy_per_median, dbada.energy_per_median),
            improvement_pct(b.energy_per_p10, dbada.energy_per_p10),
        )
        for b in baselines
    ]
