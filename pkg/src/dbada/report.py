"""Hour-by-hour figures drawn from campaign records.

Figures go next to the CSV files; they never feed back into the numbers.
"""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# (record field, y label, scale, file stem)
PANELS = (
    ("power_w", "Network power [W]", 1.0, "energy_by_hour"),
    ("p10_rate_bps", "10-percentile rate [Mbit/s]", 1e-6, "p10_rate_by_hour"),
    ("median_rate_bps", "Median rate [Mbit/s]", 1e-6, "median_rate_by_hour"),
    ("sum_rate_bps", "Sum rate [Mbit/s]", 1e-6, "sum_rate_by_hour"),
)

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 7,
    "savefig.dpi": 150,
}


def hourly_means(records, field):
    """{scenario: (hours, mean value per hour)} in first-seen scenario order."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in records:
        acc[r.scenario][r.hour].append(getattr(r, field))
    out = {}
    for label, by_hour in acc.items():
        hours = sorted(by_hour)
        out[label] = (np.array(hours), np.array([np.mean(by_hour[h]) for h in hours]))
    return out


def _marker(label):
    if label.startswith("DBADA"):
        return dict(marker="o", linewidth=2.0)
    if label.startswith("MO"):
        return dict(marker="s", linestyle="--")
    return dict(marker=".", linestyle=":" if label.endswith("EA") else "-")


def render_figures(records, summaries, out_dir, fmt="png") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    with plt.rc_context(STYLE):
        for field, ylabel, scale, stem in PANELS:
            fig, ax = plt.subplots()
            for label, (hours, vals) in hourly_means(records, field).items():
                ax.plot(hours + 1, vals * scale, label=label, **_marker(label))
            ax.set_xlabel("Hour")
            ax.set_ylabel(ylabel)
            ax.legend(ncol=2)
            fig.tight_layout()
            path = out / f"{stem}.{fmt}"
            fig.savefig(path)
            plt.close(fig)
            written.append(path)

        if summaries:
            fig, axes = plt.subplots(1, 3, figsize=(9.6, 3.6), sharey=False)
            names = [s.scenario for s in summaries]
            x = np.arange(len(names))
            for ax, attr, title in zip(axes,
                                       ("energy_per_sum", "energy_per_median", "energy_per_p10"),
                                       ("Energy / sum rate", "Energy / median rate",
                                        "Energy / 10% rate")):
                ax.bar(x, [getattr(s, attr) * 1e6 for s in summaries], color="0.55")
                ax.set_xticks(x)
                ax.set_xticklabels(names, rotation=60, ha="right")
                ax.set_title(title)
            axes[0].set_ylabel("W per Mbit/s")
            fig.tight_layout()
            path = out / f"energy_per_rate.{fmt}"
            fig.savefig(path)
            plt.close(fig)
            written.append(path)
    return written
