"""BS-RIS-UE association matrices."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from risdrl.errors import DimensionError, InfeasibleAssociationError

logger = logging.getLogger(__name__)


@dataclass
class AssociationMatrix:
    """Binary C = [c0, c_1..c_K]; c0 picks the RIS owner, c[:, k] the server of UE-k."""
    c0: np.ndarray      # (J,)
    c: np.ndarray       # (J, K)

    def __post_init__(self):
        self.c0 = np.asarray(self.c0, dtype=np.int8)
        self.c = np.asarray(self.c, dtype=np.int8)
        if self.c.ndim != 2 or self.c0.shape != (self.c.shape[0],):
            raise DimensionError(f"c0 {self.c0.shape} and c {self.c.shape} disagree")

    @classmethod
    def from_indices(cls, ris_bs: int | None, ue_bs: Sequence[int], num_bs: int) -> "AssociationMatrix":
        """Build from the RIS owner index (None for no RIS) and per-UE serving BS."""
        c0 = np.zeros(num_bs, dtype=np.int8)
        if ris_bs is not None:
            c0[ris_bs] = 1
        c = np.zeros((num_bs, len(ue_bs)), dtype=np.int8)
        c[np.asarray(ue_bs, dtype=int), np.arange(len(ue_bs))] = 1
        return cls(c0=c0, c=c)

    @property
    def num_bs(self) -> int:
        return self.c.shape[0]

    @property
    def num_ue(self) -> int:
        return self.c.shape[1]

    @property
    def ris_bs(self) -> int | None:
        owners = np.flatnonzero(self.c0)
        return int(owners[0]) if len(owners) else None

    @property
    def ue_bs(self) -> np.ndarray:
        """Serving BS per UE (first non-zero row; -1 if unserved)."""
        served = self.c.any(axis=0)
        return np.where(served, np.argmax(self.c, axis=0), -1)

    def served_by(self, bs_index: int) -> np.ndarray:
        """Q_j: indices of UEs associated with BS-j, ascending."""
        return np.flatnonzero(self.c[bs_index])

    def matrix(self) -> np.ndarray:
        """The full J x (1+K) matrix."""
        return np.column_stack([self.c0, self.c])

    def copy(self) -> "AssociationMatrix":
        return AssociationMatrix(c0=self.c0.copy(), c=self.c.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AssociationMatrix):
            return NotImplemented
        return np.array_equal(self.c0, other.c0) and np.array_equal(self.c, other.c)


def repair_association(assoc: AssociationMatrix, channel_norms: np.ndarray) -> AssociationMatrix:
    """Give every idle BS one UE, taken from BSs that serve two or more.

    Idle BSs are handled in ascending order; each takes the donor-served UE
    with the largest ``channel_norms[j, k]`` (lowest k on ties).
    """
    num_bs, num_ue = assoc.num_bs, assoc.num_ue
    if num_ue < num_bs:
        raise InfeasibleAssociationError(
            f"{num_ue} UEs cannot give each of {num_bs} BSs at least one user"
        )
    if channel_norms.shape != (num_bs, num_ue):
        raise DimensionError(f"channel_norms has shape {channel_norms.shape}, expected {(num_bs, num_ue)}")

    repaired = assoc.copy()
    for j in range(num_bs):
        if repaired.c[j].any():
            continue
        loads = repaired.c.sum(axis=1)
        ue_bs = repaired.ue_bs
        candidates = [k for k in range(num_ue) if ue_bs[k] >= 0 and loads[ue_bs[k]] >= 2]
        best = max(candidates, key=lambda k: (channel_norms[j, k], -k))
        logger.debug("Moving UE %d from BS %d to idle BS %d", best, ue_bs[best], j)
        repaired.c[:, best] = 0
        repaired.c[j, best] = 1
    return repaired


def enumerate_associations(num_bs: int, num_ue: int, strict: bool = False,
                           with_ris: bool = True) -> Iterator[AssociationMatrix]:
    """Every association satisfying one-server-per-UE and one RIS owner.

    ``strict`` also requires every BS to serve at least one UE. With
    ``with_ris=False`` the RIS column is left empty.
    """
    ris_choices = range(num_bs) if with_ris else (None,)
    for ris_bs in ris_choices:
        for ue_bs in itertools.product(range(num_bs), repeat=num_ue):
            if strict and len(set(ue_bs)) < num_bs:
                continue
            yield AssociationMatrix.from_indices(ris_bs, ue_bs, num_bs)
