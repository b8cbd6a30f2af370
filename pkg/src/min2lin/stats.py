"""Counters threaded through the solvers for benchmarking and tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List


@dataclass
class SolveStats:
    lp_calls: int = 0
    lp_nodes: int = 0
    family_nodes: int = 0
    family_size: int = 0
    cut_nodes: int = 0
    mincsp_nodes: int = 0
    partitions_tried: int = 0
    dml_calls: int = 0
    alpha_tried: int = 0
    alpha_per_step: List[int] = field(default_factory=list)

    @property
    def nodes(self) -> int:
        """Aggregate branching effort across all subsystems."""
        return (self.lp_nodes + self.family_nodes + self.cut_nodes +
                self.mincsp_nodes + self.partitions_tried + self.alpha_tried)
