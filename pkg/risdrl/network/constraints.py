"""Feasibility report for the sum-rate problem constraints."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from risdrl.network.association import AssociationMatrix
from risdrl.network.link import LinkBudget

_POWER_SLACK = 1e-9


@dataclass
class ConstraintReport:
    min_rate: bool          # every R_k >= R_min
    power: bool             # per-BS transmit power within budget
    single_server: bool     # each UE served by exactly one BS
    every_bs_serves: bool   # each BS serves at least one UE
    single_ris_owner: bool  # RIS owned by exactly one BS
    outage_ues: tuple[int, ...] = ()

    @property
    def all_ok(self) -> bool:
        return all((self.min_rate, self.power, self.single_server,
                    self.every_bs_serves, self.single_ris_owner))

    def violations(self) -> list[str]:
        names = {
            "min_rate": self.min_rate,
            "power": self.power,
            "single_server": self.single_server,
            "every_bs_serves": self.every_bs_serves,
            "single_ris_owner": self.single_ris_owner,
        }
        return [name for name, ok in names.items() if not ok]


def check_constraints(assoc: AssociationMatrix, budget: LinkBudget, r_min: float) -> ConstraintReport:
    """Evaluate every constraint; never raises."""
    outage = tuple(int(k) for k in np.flatnonzero(budget.rates < r_min))
    powers = budget.transmit_powers()
    limits = budget.power_budget if len(budget.power_budget) == len(powers) else np.full(len(powers), np.inf)
    return ConstraintReport(
        min_rate=not outage,
        power=bool(np.all(powers <= limits + _POWER_SLACK * np.maximum(limits, 1.0))),
        single_server=bool(np.all(assoc.c.sum(axis=0) == 1)),
        every_bs_serves=bool(np.all(assoc.c.sum(axis=1) >= 1)),
        single_ris_owner=int(assoc.c0.sum()) == 1,
        outage_ues=outage,
    )
