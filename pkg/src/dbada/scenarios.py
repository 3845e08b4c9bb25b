"""Objective evaluation, exhaustive DBADA search and the MO / PA baselines.

The objective of a pico state vector ``s`` is::

    sum_n ln(r_n) - beta * P_network(s)

where the rates come from a proportional-fair split of the whole system
bandwidth over all users, associated by max received power under ``s``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .allocation import (DEFAULT_TOL, Allocation, RateParams, ea_allocate,
                         pfs_allocate, pfs_solve, rate)
from .association import (AssociationMap, StateVector, associate,
                          serving_power)
from .topology import LinkGainTable

K_MAX = 20
TIE_ATOL = 1e-9
# states per batched solver call, bounds memory for large K
_CHUNK = 1024

MO, PA, DBADA = "MO", "PA", "DBADA"
PFS, EA = "PFS", "EA"


@dataclass(frozen=True)
class EnergyModel:
    macro_power_w: float = 390.0  # per sector
    sectors: int = 3
    pico_active_w: float = 9.0
    pico_idle_w: float = 0.5

    def __post_init__(self):
        if min(self.macro_power_w, self.sectors, self.pico_idle_w) < 0:
            raise ValueError("energy model entries must be non-negative")
        if not self.pico_active_w > self.pico_idle_w:
            raise ValueError("pico_active_w must exceed pico_idle_w")


@dataclass(frozen=True)
class StateEvaluation:
    state: StateVector
    association: AssociationMap
    allocations: tuple[Allocation, ...]
    utility_sum: float
    network_power_w: float
    objective: float
    n_users: int

    @property
    def allocation(self) -> Allocation:
        """The single network-wide pool (MO and DBADA evaluations)."""
        if len(self.allocations) != 1:
            raise AttributeError("evaluation has several scheduling pools")
        return self.allocations[0]

    def _per_user(self, attr):
        out = np.zeros(self.n_users)
        for alloc in self.allocations:
            out[alloc.users] = getattr(alloc, attr)
        return out

    @property
    def rate_bps(self) -> np.ndarray:
        return self._per_user("rate_bps")

    @property
    def bandwidth_hz(self) -> np.ndarray:
        return self._per_user("bandwidth_hz")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    scheduler: str = PFS
    alpha_percent: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in (MO, PA, DBADA):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.scheduler not in (PFS, EA):
            raise ValueError(f"unknown scheduler {self.scheduler!r}")
        if (self.alpha_percent is not None) != (self.kind == PA):
            raise ValueError("alpha_percent is required for PA and only for PA")
        if self.alpha_percent is not None and not 0 <= self.alpha_percent <= 100:
            raise ValueError("alpha_percent must lie in [0, 100]")
        if (self.beta is not None) != (self.kind == DBADA):
            raise ValueError("beta is required for DBADA and only for DBADA")
        if self.beta is not None and self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.kind == DBADA and self.scheduler != PFS:
            raise ValueError("DBADA always schedules with PFS")

    @property
    def label(self) -> str:
        if self.kind == MO:
            return f"MO/{self.scheduler}"
        if self.kind == PA:
            return f"PA{self.alpha_percent:g}/{self.scheduler}"
        return f"DBADA/beta={self.beta:g}"


_LABEL_RE = re.compile(r"^(MO|PA(\d+(?:\.\d+)?)%?)/(PFS|EA)$")


def parse_scenario(token: str, betas=(0.5,)) -> list[ScenarioSpec]:
    """Parse ``MO/PFS``, ``PA20/EA`` (``PA20%/EA``), ``DBADA`` or ``DBADA/beta=0.5``."""
    token = token.strip()
    if token.upper() == DBADA:
        return [ScenarioSpec(DBADA, beta=float(b)) for b in betas]
    m = re.match(r"^DBADA/beta=(.+)$", token)
    if m:
        return [ScenarioSpec(DBADA, beta=float(m.group(1)))]
    m = _LABEL_RE.match(token)
    if not m:
        raise ValueError(f"cannot parse scenario {token!r}")
    if m.group(2) is not None:
        return [ScenarioSpec(PA, m.group(3), alpha_percent=float(m.group(2)))]
    return [ScenarioSpec(MO, m.group(3))]


def network_power(state: StateVector, energy: EnergyModel) -> float:
    n_on = state.n_active
    return (energy.sectors * energy.macro_power_w + n_on * energy.pico_active_w
            + (len(state) - n_on) * energy.pico_idle_w)


def _utility(rates, rate_unit_bps):
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(np.asarray(rates) / rate_unit_bps)))


def _pool(scheduler, p_rx, budget, params, users, tol):
    if scheduler == EA or len(users) == 0:
        return ea_allocate(p_rx, budget, params, users=users)
    if budget <= 0:
        zeros = np.zeros(len(users))
        return Allocation(zeros, zeros.copy(), float(budget), users)
    return pfs_allocate(p_rx, budget, params, tol=tol, users=users)


def evaluate_state(state: StateVector, gains: LinkGainTable, params: RateParams,
                   energy: EnergyModel, beta: float, tol=DEFAULT_TOL,
                   rate_unit_bps=1.0) -> StateEvaluation:
    """Objective of one pico state with network-wide PFS over all users.

    ``rate_unit_bps`` sets the rate unit inside the log utility.
    """
    assoc = associate(gains, state)
    users = np.arange(gains.n_users)
    alloc = _pool(PFS, serving_power(gains, assoc), params.total_bandwidth_hz,
                  params, users, tol)
    util = _utility(alloc.rate_bps, rate_unit_bps)
    power = network_power(state, energy)
    return StateEvaluation(state, assoc, (alloc,), util, power,
                           util - beta * power, gains.n_users)


def _state_bits(k):
    n = 1 << k
    return ((np.arange(n)[:, None] >> (k - 1 - np.arange(k))[None, :]) & 1).astype(bool)


def state_utilities(gains: LinkGainTable, params: RateParams, tol=DEFAULT_TOL,
                    rate_unit_bps=1.0, on_solve=None):
    """Utility sum of every pico state, indexed by its integer bit pattern.

    States whose association coincides share one solver row.  ``on_solve``,
    if given, is called as ``on_solve(bandwidths, snr_density, budget)`` for
    every batch of solver rows.
    """
    k = gains.n_picos
    if k > K_MAX:
        raise ValueError(f"exhaustive search limited to K <= {K_MAX}, got {k}")
    bits = _state_bits(k)
    n_states = len(bits)
    if gains.n_users == 0:
        return np.zeros(n_states)
    p = gains.received_power_w
    util = np.empty(n_states)
    noise = params.noise_psd_w_per_hz
    for start in range(0, n_states, _CHUNK):
        b = bits[start:start + _CHUNK]
        cand = np.concatenate([np.ones((len(b), 1), bool), b], axis=1)
        masked = np.where(cand[:, None, :], p[None, :, :], -np.inf)
        serving = np.argmax(masked, axis=2)
        uniq, inverse = np.unique(serving, axis=0, return_inverse=True)
        p_serv = p[np.arange(gains.n_users)[None, :], uniq]
        w = pfs_solve(p_serv / noise, params.total_bandwidth_hz, tol)
        if on_solve is not None:
            on_solve(w, p_serv / noise, params.total_bandwidth_hz)
        u = np.array([_utility(rate(w[i], p_serv[i], noise), rate_unit_bps)
                      for i in range(len(uniq))])
        util[start:start + len(b)] = u[np.asarray(inverse).ravel()]
    return util


def select_state(objectives, k) -> StateVector:
    """Argmax with ties (within ``TIE_ATOL``) to fewer active picos, then lexicographic."""
    objectives = np.asarray(objectives)
    best = objectives.max()
    tied = np.flatnonzero(objectives >= best - TIE_ATOL)
    states = [StateVector.from_bits(int(i), k) for i in tied]
    return min(states, key=lambda s: (s.n_active, s.active))


def dbada_optimize(gains: LinkGainTable, params: RateParams, energy: EnergyModel,
                   beta: float, tol=DEFAULT_TOL, rate_unit_bps=1.0,
                   on_solve=None) -> StateEvaluation:
    """Exhaustive search over all 2^K pico states; the macro stays on."""
    k = gains.n_picos
    util = state_utilities(gains, params, tol, rate_unit_bps, on_solve)
    power = np.array([network_power(StateVector.from_bits(i, k), energy)
                      for i in range(len(util))])
    state = select_state(util - beta * power, k)
    return evaluate_state(state, gains, params, energy, beta, tol, rate_unit_bps)


def run_scenario(spec: ScenarioSpec, gains: LinkGainTable, params: RateParams,
                 energy: EnergyModel, tol=DEFAULT_TOL, beta=0.0,
                 on_solve=None) -> StateEvaluation:
    """Evaluate one scenario on a drop.

    ``beta`` only prices energy in the reported objective of MO and PA
    runs; DBADA uses the beta of its ScenarioSpec.
    """
    k = gains.n_picos
    if spec.kind == DBADA:
        return dbada_optimize(gains, params, energy, spec.beta, tol, on_solve=on_solve)
    w_t = params.total_bandwidth_hz
    if spec.kind == MO:
        state = StateVector.all_idle(k)
        assoc = associate(gains, state)
        pools = [(np.arange(gains.n_users), w_t)]
    else:
        state = StateVector.all_active(k)
        assoc = associate(gains, state)
        share = spec.alpha_percent / 100.0
        macro_users = assoc.users_of(0)
        pico_users = np.flatnonzero(assoc.serving_bs > 0)
        pools = [(macro_users, (1.0 - share) * w_t), (pico_users, share * w_t)]
    p_serv = serving_power(gains, assoc)
    allocs = tuple(_pool(spec.scheduler, p_serv[u], b, params, u, tol) for u, b in pools)
    util = _utility(np.concatenate([a.rate_bps for a in allocs]), 1.0)
    power = network_power(state, energy)
    return StateEvaluation(state, assoc, allocs, util, power, util - beta * power,
                           gains.n_users)
