"""Max-SNR user association under a pico Active/Idle state vector."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import LinkGainTable


@dataclass(frozen=True)
class StateVector:
    """Pico Active (1) / Idle (0) flags; the macro is always active."""

    active: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (0, 1) for v in self.active):
            raise ValueError("state entries must be 0 or 1")

    @classmethod
    def from_bits(cls, bits, k):
        """State from the integer ``bits``; pico ``i`` is bit ``k-1-i``."""
        return cls(tuple((bits >> (k - 1 - i)) & 1 for i in range(k)))

    @classmethod
    def all_idle(cls, k):
        return cls((0,) * k)

    @classmethod
    def all_active(cls, k):
        return cls((1,) * k)

    @property
    def n_active(self) -> int:
        return sum(self.active)

    def __len__(self):
        return len(self.active)

    def __str__(self):
        return "".join(map(str, self.active))


@dataclass(frozen=True)
class AssociationMap:
    serving_bs: np.ndarray  # per user; 0 = macro, i = pico i
    n_bs: int

    def users_of(self, bs: int) -> np.ndarray:
        return np.flatnonzero(self.serving_bs == bs)

    @property
    def bs_users(self) -> list[np.ndarray]:
        return [self.users_of(b) for b in range(self.n_bs)]


def candidate_mask(state: StateVector) -> np.ndarray:
    return np.concatenate([[True], np.asarray(state.active, dtype=bool)])


def associate(gains: LinkGainTable, state: StateVector) -> AssociationMap:
    """Serve each user from the strongest available BS; ties go to the lowest index."""
    if len(state) != gains.n_picos:
        raise ValueError(f"state has {len(state)} entries, layout has {gains.n_picos} picos")
    p = np.where(candidate_mask(state)[None, :], gains.received_power_w, -np.inf)
    # argmax returns the first maximum, i.e. the lowest BS index on ties
    serving = np.argmax(p, axis=1) if gains.n_users else np.zeros(0, dtype=int)
    return AssociationMap(serving.astype(int), gains.n_picos + 1)


def serving_power(gains: LinkGainTable, assoc: AssociationMap) -> np.ndarray:
    return gains.received_power_w[np.arange(gains.n_users), assoc.serving_bs]
