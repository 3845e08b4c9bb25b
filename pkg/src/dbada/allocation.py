"""Spectrum schedulers: equal allocation and proportional-fair (log utility).

Rates follow the Shannon form ``r = W * log2(1 + P / (N0 * W))`` in bit/s.
The proportional-fair scheduler maximises ``sum(ln r_n)`` over bandwidth
shares on a fixed budget by nested bisection on the KKT conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

DEFAULT_TOL = 1e-9
MAX_OUTER_ITER = 200
MAX_INNER_ITER = 200
# relative bracket width at which the inner inversion stops
_INNER_RTOL = 1e-12
_SERIES_CUTOFF = 1e-3


class ConvergenceError(RuntimeError):
    """Raised when a bisection loop exhausts its iteration cap."""


def dbm_to_w(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


@dataclass(frozen=True)
class RateParams:
    """Noise density N0 (W/Hz) and total system bandwidth W_T (Hz)."""

    noise_psd_w_per_hz: float = float(dbm_to_w(-174.0))
    total_bandwidth_hz: float = 100e6

    def __post_init__(self):
        if not self.noise_psd_w_per_hz > 0:
            raise ValueError("noise_psd_w_per_hz must be positive")
        if not self.total_bandwidth_hz > 0:
            raise ValueError("total_bandwidth_hz must be positive")


@dataclass(frozen=True)
class Allocation:
    """Bandwidth shares and rates for one scheduling pool.

    ``users`` holds the global user indices the entries refer to.
    """

    bandwidth_hz: np.ndarray
    rate_bps: np.ndarray
    pool_budget_hz: float
    users: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __len__(self):
        return len(self.bandwidth_hz)


def rate(w_hz, p_rx_w, noise_psd):
    """Shannon rate in bit/s; zero bandwidth gives zero rate."""
    w = np.asarray(w_hz, dtype=float)
    a = np.asarray(p_rx_w, dtype=float) / noise_psd
    with np.errstate(divide="ignore", invalid="ignore"):
        r = w * np.log1p(a / w) / np.log(2.0)
    r = np.where(w > 0, r, 0.0)
    return r if r.ndim else float(r)


def _h(x):
    # 1 - x / ((1+x) ln(1+x)), increasing from 0 (x -> 0) to 1 (x -> inf)
    x = np.asarray(x, dtype=float)
    small = x < _SERIES_CUTOFF
    xs = np.where(small, x, 1.0)
    xl = np.where(small, 1.0, x)
    # (1+x)ln(1+x) - x = sum_{k>=2} (-1)^k x^k / (k(k-1))
    num_s = xs**2 / 2 - xs**3 / 6 + xs**4 / 12 - xs**5 / 20
    den_s = (1 + xs) * np.log1p(xs)
    den_l = (1 + xl) * np.log1p(xl)
    return np.where(small, num_s / den_s, (den_l - xl) / den_l)


def marginal_utility(w_hz, snr_density_hz):
    """d ln(r)/dW for a user with ``P/N0 = snr_density_hz``.

    Closed form ``h(a/W) / W`` with ``h(x) = 1 - x / ((1+x) ln(1+x))``.
    Strictly decreasing in W, so it can be inverted by bisection.
    """
    w = np.asarray(w_hz, dtype=float)
    return _h(np.asarray(snr_density_hz, dtype=float) / w) / w


@njit(cache=True)
def _h_scalar(x):
    if x < _SERIES_CUTOFF:
        num = x * x / 2 - x**3 / 6 + x**4 / 12 - x**5 / 20
        return num / ((1 + x) * math.log1p(x))
    den = (1 + x) * math.log1p(x)
    return (den - x) / den


@njit(cache=True)
def _solve_rows(a, budgets, tol, out):
    """Nested bisection over each row of ``a``; returns 0, or -1/-2 on cap."""
    n_rows, n = a.shape
    wl = np.empty(n)
    wu = np.empty(n)
    lo_fin = np.empty(n)
    hi_fin = np.empty(n)
    for r in range(n_rows):
        budget = budgets[r]
        lam_lo = np.inf
        lam_hi = 0.0
        for k in range(n):
            g = _h_scalar(a[r, k] * n / budget) * n / budget
            lam_lo = min(lam_lo, g)
            lam_hi = max(lam_hi, g)
        # at lam_lo every W_k >= budget/n, at lam_hi every W_k <= budget/n;
        # W_k(lam) is bracketed by W_k(lam_hi) <= W_k(lam) <= W_k(lam_lo)
        for k in range(n):
            wl[k] = _h_scalar(a[r, k] * lam_hi) / lam_hi
            wu[k] = 1.0 / lam_lo
        converged = False
        for _ in range(MAX_OUTER_ITER):
            lam = math.sqrt(lam_lo * lam_hi)
            total = 0.0
            for k in range(n):
                ak = a[r, k]
                lo = max(wl[k], _h_scalar(ak * lam) / lam)
                hi = min(wu[k], 1.0 / lam)
                inner_ok = False
                for _ in range(MAX_INNER_ITER):
                    if hi <= lo * (1 + _INNER_RTOL):
                        inner_ok = True
                        break
                    mid = math.sqrt(lo * hi)
                    if _h_scalar(ak / mid) / mid > lam:
                        lo = mid
                    else:
                        hi = mid
                if not inner_ok:
                    return -2
                lo_fin[k] = lo
                hi_fin[k] = hi
                out[r, k] = math.sqrt(lo * hi)
                total += out[r, k]
            if abs(total - budget) <= tol * budget:
                scale = budget / total
                for k in range(n):
                    out[r, k] *= scale
                converged = True
                break
            if total > budget:
                lam_lo = lam
                for k in range(n):
                    wu[k] = hi_fin[k]
            else:
                lam_hi = lam
                for k in range(n):
                    wl[k] = lo_fin[k]
        if not converged:
            return -1
    return 0


def pfs_solve(snr_density_hz, budget_hz, tol=DEFAULT_TOL):
    """Batched proportional-fair shares.

    ``snr_density_hz`` is ``(..., N)`` holding ``P/N0`` per user; every row is
    solved independently. ``budget_hz`` is a scalar or one budget per row.
    Rows of the result sum to their budget (up to float rounding).
    """
    a = np.atleast_2d(np.asarray(snr_density_hz, dtype=float))
    shape = a.shape
    a = np.ascontiguousarray(a.reshape(-1, shape[-1]))
    budgets = np.broadcast_to(np.asarray(budget_hz, dtype=float).ravel(),
                              (a.shape[0],)).copy()
    if a.shape[1] == 0:
        raise ValueError("empty pool")
    if not np.all(budgets > 0):
        raise ValueError("budget must be positive")
    if not np.all(a > 0) or not np.all(np.isfinite(a)):
        raise ValueError("received powers must be positive and finite")
    out = np.empty_like(a)
    if a.shape[1] == 1:
        out[:, 0] = budgets
        return out.reshape(shape)
    status = _solve_rows(a, budgets, float(tol), out)
    if status == -1:
        raise ConvergenceError("outer bisection did not converge")
    if status == -2:
        raise ConvergenceError("inner bisection did not converge")
    return out.reshape(shape)


def pfs_objective(w_hz, p_rx_w, noise_psd):
    """Sum of natural-log rates (nats)."""
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(rate(w_hz, p_rx_w, noise_psd))))


def ea_allocate(p_rx_w, budget_hz, params: RateParams, users=None) -> Allocation:
    """Equal split of ``budget_hz`` over the pool."""
    p = np.asarray(p_rx_w, dtype=float)
    users = np.arange(len(p)) if users is None else np.asarray(users, dtype=int)
    if len(p) == 0:
        return Allocation(np.zeros(0), np.zeros(0), float(budget_hz), users)
    w = np.full(len(p), budget_hz / len(p))
    return Allocation(w, np.atleast_1d(rate(w, p, params.noise_psd_w_per_hz)),
                      float(budget_hz), users)


def pfs_allocate(p_rx_w, budget_hz, params: RateParams, tol=DEFAULT_TOL,
                 users=None) -> Allocation:
    """Proportional-fair allocation maximising ``sum(ln r_n)``.

    Parameters
    ----------
    p_rx_w : array_like
        Received signal power of each user in the pool (W).
    budget_hz : float
        Bandwidth shared by the pool.
    params : RateParams
        Supplies the noise density.
    tol : float
        Relative tolerance on the budget constraint before rescaling.

    Raises
    ------
    ConvergenceError
        If either bisection hits its iteration cap.
    """
    p = np.asarray(p_rx_w, dtype=float)
    users = np.arange(len(p)) if users is None else np.asarray(users, dtype=int)
    w = pfs_solve(p / params.noise_psd_w_per_hz, budget_hz, tol)[0]
    return Allocation(w, np.atleast_1d(rate(w, p, params.noise_psd_w_per_hz)),
                      float(budget_hz), users)


def kkt_residual(alloc: Allocation, p_rx_w, params: RateParams) -> float:
    """Largest relative spread of marginal utilities across the pool."""
    if len(alloc) < 2:
        return 0.0
    g = marginal_utility(alloc.bandwidth_hz,
                         np.asarray(p_rx_w, dtype=float) / params.noise_psd_w_per_hz)
    return float((g.max() - g.min()) / g.min())
