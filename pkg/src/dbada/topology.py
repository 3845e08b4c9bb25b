"""Single-cell HetNet geometry, user drops and link budgets.

One sectorised macro site at the origin, K picos on a ring near the cell
edge, each pico centred on a circular HotSpot.  Distances are in metres;
path-loss formulas take kilometres.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MACRO = "macro"
PICO = "pico"


@dataclass(frozen=True)
class LayoutConfig:
    cell_radius_m: float = 500.0
    sectors_per_macro: int = 3
    hotspots: int = 6
    hotspot_fraction: float = 0.9
    hotspot_radius_m: float = 40.0
    min_dist_macro_m: float = 35.0
    min_dist_pico_m: float = 10.0


@dataclass(frozen=True)
class NetworkLayout:
    macro_position: np.ndarray
    sectors_per_macro: int
    pico_positions: np.ndarray  # (K, 2)
    hotspot_radius: float
    cell_radius: float
    min_dist_macro: float
    min_dist_pico: float

    @property
    def n_picos(self) -> int:
        return len(self.pico_positions)

    @property
    def bs_positions(self) -> np.ndarray:
        """Macro first (index 0), then picos 1..K."""
        return np.vstack([self.macro_position[None, :], self.pico_positions])


@dataclass(frozen=True)
class BaseStationParams:
    tier: str
    tx_power_dbm: float
    antenna_gain_dbi: float
    active_power_w: float
    idle_power_w: float

    def __post_init__(self):
        if self.tier not in (MACRO, PICO):
            raise ValueError(f"unknown tier {self.tier!r}")
        if not np.isfinite(self.tx_power_dbm):
            raise ValueError("tx_power_dbm must be finite")
        if not self.active_power_w > self.idle_power_w >= 0:
            raise ValueError("need active_power_w > idle_power_w >= 0")


MACRO_BS = BaseStationParams(MACRO, 46.0, 14.0, 390.0, 0.0)
PICO_BS = BaseStationParams(PICO, 30.0, 5.0, 9.0, 0.5)


@dataclass(frozen=True)
class UserSet:
    """User positions and where each was dropped.

    ``origin`` is -1 for the uniform macro-area population, otherwise the
    0-based HotSpot index.
    """

    positions: np.ndarray  # (N, 2)
    origin: np.ndarray  # (N,)

    def __len__(self):
        return len(self.positions)

    @property
    def origin_tags(self) -> list[str]:
        return ["uniform" if o < 0 else f"hotspot_{o}" for o in self.origin]


@dataclass(frozen=True)
class LinkGainTable:
    received_power_w: np.ndarray  # (N users, 1 + K base stations)

    @property
    def n_users(self) -> int:
        return self.received_power_w.shape[0]

    @property
    def n_picos(self) -> int:
        return self.received_power_w.shape[1] - 1


def build_layout(config: LayoutConfig = LayoutConfig()) -> NetworkLayout:
    """Place K picos on a ring of radius ``hotspot_fraction * cell_radius``.

    Pico ``i`` sits at azimuth ``2*pi*i/K``.
    """
    k = int(config.hotspots)
    r_cell = float(config.cell_radius_m)
    f = float(config.hotspot_fraction)
    r_hs = float(config.hotspot_radius_m)
    if k < 0:
        raise ValueError("hotspots must be >= 0")
    if config.sectors_per_macro < 1:
        raise ValueError("sectors_per_macro must be >= 1")
    if not 0 < f <= 1:
        raise ValueError("hotspot_fraction must lie in (0, 1]")
    if not r_hs > 0:
        raise ValueError("hotspot_radius_m must be positive")
    for name in ("min_dist_macro_m", "min_dist_pico_m"):
        d = getattr(config, name)
        if not 0 < d < r_cell:
            raise ValueError(f"{name} must lie in (0, cell_radius_m)")
    ring = f * r_cell
    if k and ring + r_hs > r_cell:
        raise ValueError(
            f"HotSpot disc leaves the cell: {ring:g} + {r_hs:g} > {r_cell:g}")
    if k and ring - r_hs < config.min_dist_macro_m:
        raise ValueError("HotSpot disc overlaps the macro exclusion disc")
    if k and config.min_dist_pico_m >= r_hs:
        raise ValueError("min_dist_pico_m must be smaller than hotspot_radius_m")
    az = 2 * np.pi * np.arange(k) / k if k else np.zeros(0)
    picos = np.column_stack([ring * np.cos(az), ring * np.sin(az)]).reshape(k, 2)
    return NetworkLayout(
        macro_position=np.zeros(2),
        sectors_per_macro=int(config.sectors_per_macro),
        pico_positions=picos,
        hotspot_radius=r_hs,
        cell_radius=r_cell,
        min_dist_macro=float(config.min_dist_macro_m),
        min_dist_pico=float(config.min_dist_pico_m),
    )


def _uniform_disc(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    t = 2 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def _respects_min_dist(layout, pts):
    ok = np.linalg.norm(pts - layout.macro_position, axis=1) >= layout.min_dist_macro
    if layout.n_picos:
        d = np.linalg.norm(pts[:, None, :] - layout.pico_positions[None], axis=2)
        ok &= (d >= layout.min_dist_pico).all(axis=1)
    return ok


def _rejection_sample(rng, n, draw, accept):
    out = np.empty((0, 2))
    while len(out) < n:
        cand = draw(n - len(out))
        out = np.vstack([out, cand[accept(cand)]])
    return out


def drop_users(layout: NetworkLayout, n_macro: int, n_hotspot: int,
               rng: np.random.Generator) -> UserSet:
    """Uniform users over the cell plus HotSpot users over the pico discs."""
    if n_macro < 0 or n_hotspot < 0:
        raise ValueError("user counts must be non-negative")
    if n_hotspot and not layout.n_picos:
        raise ValueError("HotSpot users requested but layout has no picos")
    uniform = _rejection_sample(
        rng, n_macro, lambda m: _uniform_disc(rng, m, layout.cell_radius),
        lambda p: _respects_min_dist(layout, p))
    if n_hotspot:
        which = rng.integers(0, layout.n_picos, size=n_hotspot)
        hs = np.empty((n_hotspot, 2))
        for i in range(layout.n_picos):
            idx = np.flatnonzero(which == i)
            centre = layout.pico_positions[i]
            hs[idx] = _rejection_sample(
                rng, len(idx),
                lambda m: centre + _uniform_disc(rng, m, layout.hotspot_radius),
                lambda p: _respects_min_dist(layout, p))
    else:
        which = np.zeros(0, dtype=int)
        hs = np.empty((0, 2))
    return UserSet(
        positions=np.vstack([uniform, hs]),
        origin=np.concatenate([np.full(n_macro, -1), which]).astype(int),
    )


def path_loss_db(tier: str, distance_km):
    """3GPP-style log-distance path loss, ``R`` in km."""
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    if tier == MACRO:
        return 128.1 + 37.6 * np.log10(d)
    if tier == PICO:
        return 140.7 + 36.7 * np.log10(d)
    raise ValueError(f"unknown tier {tier!r}")


def link_gains(layout: NetworkLayout, users: UserSet,
               macro: BaseStationParams = MACRO_BS,
               pico: BaseStationParams = PICO_BS) -> LinkGainTable:
    """Received power (W) of every user from every base station.

    Column 0 is the macro, column ``i`` pico ``i``.  The macro is one
    link-budget entity with its full antenna gain; sectors only enter the
    power accounting.
    """
    bs = layout.bs_positions
    d_km = np.linalg.norm(users.positions[:, None, :] - bs[None], axis=2) / 1000.0
    rx_dbm = np.empty_like(d_km)
    rx_dbm[:, 0] = macro.tx_power_dbm + macro.antenna_gain_dbi - path_loss_db(MACRO, d_km[:, 0])
    if layout.n_picos:
        rx_dbm[:, 1:] = (pico.tx_power_dbm + pico.antenna_gain_dbi
                         - path_loss_db(PICO, d_km[:, 1:]))
    return LinkGainTable(10.0 ** ((rx_dbm - 30.0) / 10.0))
