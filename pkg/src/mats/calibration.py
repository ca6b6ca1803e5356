"""Calibration of the dose-gap threshold tau2.

tau2 lives on the logit scale, where a fixed gap maps to different
response-rate differences depending on the low-dose rate p2:

    delta(tau2, p2) = inv_logit(tau2 + logit(p2)) - p2

The calibration picks the largest grid value of tau2 whose delta stays at or
below the clinically meaningful minimum gap for every plausible p2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import inv_logit, logit


def default_grid() -> tuple:
    """tau2 candidates 0.1, 0.2, ..., 1.5."""
    return tuple(round(0.1 * k, 10) for k in range(1, 16))


@dataclass(frozen=True)
class CalibrationRequest:
    """Inputs to the tau2 search: the minimum response-rate gap worth
    detecting, the plausible low-dose rates, and the candidate grid."""

    delta_target: float
    p2_candidates: tuple
    tau2_grid: tuple = field(default_factory=default_grid)

    def __post_init__(self):
        object.__setattr__(self, "p2_candidates", tuple(float(p) for p in self.p2_candidates))
        object.__setattr__(self, "tau2_grid", tuple(float(t) for t in self.tau2_grid))
        if not (0.0 < self.delta_target < 1.0):
            raise ValueError("delta_target must lie in (0, 1)")
        if len(self.p2_candidates) == 0:
            raise ValueError("p2_candidates must be non-empty")
        for p in self.p2_candidates:
            if not (0.0 < p < 1.0):
                raise ValueError(f"p2 candidates must lie in (0, 1), got {p}")
        if len(self.tau2_grid) == 0:
            raise ValueError("tau2_grid must be non-empty")
        if any(t <= 0 for t in self.tau2_grid):
            raise ValueError("tau2 grid values must be positive")
        if any(b <= a for a, b in zip(self.tau2_grid, self.tau2_grid[1:])):
            raise ValueError("tau2 grid must be strictly increasing")


def delta_from_tau2(tau2: float, p2: float) -> float:
    """Response-rate gap implied by a logit-scale gap tau2 at low-dose rate p2.

    Strictly increasing in tau2 for fixed p2, and always in (0, 1 - p2).
    """
    if tau2 <= 0.0:
        raise ValueError("tau2 must be > 0")
    return float(inv_logit(tau2 + logit(p2)) - p2)


def calibrate_tau2(req: CalibrationRequest) -> Optional[float]:
    """Largest grid tau2 with delta(tau2, p2) <= delta_target for every
    candidate p2; None when even the smallest grid value violates it.

    The comparison is inclusive, and because delta is increasing in tau2 the
    feasible grid values form a prefix, so the maximum is well-defined.
    """
    best = None
    for tau2 in req.tau2_grid:
        if all(delta_from_tau2(tau2, p2) <= req.delta_target for p2 in req.p2_candidates):
            best = tau2
        else:
            break
    return best


def curve_points(tau2_values: Sequence[float], p2_range: Sequence[float]) -> list:
    """Dense (tau2, p2, delta) table for plotting the calibration curves."""
    table = []
    for tau2 in tau2_values:
        for p2 in p2_range:
            table.append((float(tau2), float(p2), delta_from_tau2(tau2, p2)))
    return table


def calibration_table(req: CalibrationRequest) -> list:
    """Constraint table over the request's grid x candidates, with a
    per-tau2 feasibility flag."""
    rows = []
    for tau2 in req.tau2_grid:
        deltas = [delta_from_tau2(tau2, p2) for p2 in req.p2_candidates]
        rows.append({
            "tau2": float(tau2),
            "deltas": deltas,
            "feasible": all(d <= req.delta_target for d in deltas),
        })
    return rows
