"""Monte Carlo campaign: hours x drops x scenarios on paired random drops."""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .allocation import kkt_residual, marginal_utility
from .association import StateVector
from .config import SimulationConfig
from .metrics import (Improvement, MetricsRecord, ScenarioSummary, aggregate,
                      drop_metrics, improvement_table)
from .scenarios import (DBADA, PFS, StateEvaluation, evaluate_state,
                        run_scenario)
from .topology import build_layout, drop_users, link_gains
from .traffic import user_counts

log = logging.getLogger(__name__)

RECORD_FIELDS = ("hour", "drop", "scenario", "sum_rate_bps", "median_rate_bps",
                 "p10_rate_bps", "power_w")
SUMMARY_FIELDS = ("scenario", "avg_sum_rate", "avg_median_rate", "avg_p10_rate",
                  "avg_power_w", "energy_per_sum", "energy_per_median",
                  "energy_per_p10")
IMPROVEMENT_FIELDS = ("dbada", "baseline", "energy_per_sum_pct",
                      "energy_per_median_pct", "energy_per_p10_pct")


def drop_rng(seed: int, hour: int, drop: int) -> np.random.Generator:
    """Independent, reproducible stream for one (hour, drop) work item."""
    return np.random.default_rng(np.random.SeedSequence([seed, hour, drop]))


@dataclass
class DropAudit:
    """Solver and optimality checks gathered while evaluating one drop."""

    hour: int
    drop: int
    max_kkt_residual: float = 0.0
    max_budget_error: float = 0.0
    min_pfs_share_hz: float = math.inf
    solver_rows: int = 0
    # DBADA label -> (selected state, objective - all-idle objective)
    dominance: dict = field(default_factory=dict)

    def on_solve(self, w, snr_density, budget):
        """Check every row of a batched DBADA solve."""
        g = marginal_utility(w, snr_density)
        if w.shape[1] > 1:
            spread = (g.max(axis=1) - g.min(axis=1)) / g.min(axis=1)
            self.max_kkt_residual = max(self.max_kkt_residual, float(spread.max()))
        totals = np.array([math.fsum(row) for row in w])
        self.max_budget_error = max(self.max_budget_error,
                                    float(np.abs(totals - budget).max() / budget))
        self.min_pfs_share_hz = min(self.min_pfs_share_hz, float(w.min()))
        self.solver_rows += len(w)

    def check(self, evaluation: StateEvaluation, p_serving, params, pfs: bool):
        for alloc in evaluation.allocations:
            if len(alloc) == 0:
                continue
            total = math.fsum(alloc.bandwidth_hz)
            self.max_budget_error = max(
                self.max_budget_error,
                abs(total - alloc.pool_budget_hz) / max(alloc.pool_budget_hz, 1e-300))
            if pfs and alloc.pool_budget_hz > 0:
                self.solver_rows += 1
                self.min_pfs_share_hz = min(self.min_pfs_share_hz,
                                            float(alloc.bandwidth_hz.min()))
                self.max_kkt_residual = max(
                    self.max_kkt_residual,
                    kkt_residual(alloc, p_serving[alloc.users], params))


@dataclass
class DropResult:
    records: list
    audit: DropAudit


@dataclass
class CampaignResult:
    records: list
    summaries: list
    improvements: list
    audits: list

    def records_for(self, label):
        return [r for r in self.records if r.scenario == label]

    def summary(self, label) -> ScenarioSummary:
        return next(s for s in self.summaries if s.scenario == label)


def simulate_drop(config: SimulationConfig, hour: int, drop: int) -> DropResult:
    """Draw one drop and evaluate every configured scenario on it."""
    rng = drop_rng(config.seed, hour, drop)
    layout = build_layout(config.layout)
    counts = user_counts(config.traffic, hour, rng)
    users = drop_users(layout, counts.n_macro, counts.n_hotspot, rng)
    gains = link_gains(layout, users, config.macro, config.pico)
    audit = DropAudit(hour, drop)
    records = []
    for spec in config.scenarios:
        ev = run_scenario(spec, gains, config.rate, config.energy, tol=config.pfs_tol,
                          on_solve=audit.on_solve)
        p_serv = gains.received_power_w[np.arange(gains.n_users), ev.association.serving_bs]
        audit.check(ev, p_serv, config.rate, spec.scheduler == PFS)
        if spec.kind == DBADA:
            idle = evaluate_state(StateVector.all_idle(gains.n_picos), gains,
                                  config.rate, config.energy, spec.beta, config.pfs_tol)
            audit.dominance[spec.label] = (str(ev.state), ev.objective - idle.objective)
        records.append(drop_metrics(ev, hour, drop, spec.label))
    return DropResult(records, audit)


def _work(args):
    return simulate_drop(*args)


def run_campaign(config: SimulationConfig, workers: int | None = None) -> CampaignResult:
    """Evaluate all (hour, drop) items, then aggregate per scenario.

    Each item owns its random stream, so results do not depend on the
    worker count or completion order.
    """
    workers = config.workers if workers is None else workers
    items = [(config, h, d) for h in range(config.traffic.hours)
             for d in range(config.drops)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_work, items, chunksize=max(1, len(items) // (4 * workers))))
    else:
        results = []
        for i, item in enumerate(items):
            results.append(_work(item))
            if (i + 1) % max(1, config.drops) == 0:
                log.info("hour %d done (%d/%d drops)", item[1], i + 1, len(items))
    records = [r for res in results for r in res.records]
    summaries = [aggregate([r for r in records if r.scenario == spec.label])
                 for spec in config.scenarios]
    improvements = []
    baselines = [s for s, spec in zip(summaries, config.scenarios) if spec.kind != DBADA]
    for s, spec in zip(summaries, config.scenarios):
        if spec.kind == DBADA:
            improvements.extend(improvement_table(s, baselines))
    return CampaignResult(records, summaries, improvements, [r.audit for r in results])


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def _write_csv(path: Path, fields, rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(fields)
            for row in rows:
                w.writerow([_fmt(getattr(row, f)) for f in fields])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_outputs(records: list[MetricsRecord], summaries: list[ScenarioSummary],
                  table: list[Improvement], out_dir) -> list[Path]:
    """Write records.csv, summary.csv and improvement.csv into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc}") from exc
    paths = [out / "records.csv", out / "summary.csv", out / "improvement.csv"]
    _write_csv(paths[0], RECORD_FIELDS, records)
    _write_csv(paths[1], SUMMARY_FIELDS, summaries)
    _write_csv(paths[2], IMPROVEMENT_FIELDS, table)
    return paths
