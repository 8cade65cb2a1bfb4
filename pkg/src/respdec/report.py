"""Fit diagnostics shared by the iterative estimators."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FitReport:
    """Outcome of an iterative fit.

    ``objective`` is the final value of the criterion the fit maximizes or
    minimizes: the marginal log-likelihood for the item-response fit, the
    regularized squared error W for the factorization fit.  ``history``
    records the per-iteration internal objective; for the EM fit this is
    the penalized marginal log-likelihood (the quantity EM is guaranteed
    not to decrease), for the descent fit it is W per epoch.
    """

    iterations: int
    objective: float
    converged: bool
    max_change: float
    history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "objective": self.objective,
            "converged": self.converged,
            "max_change": self.max_change,
            "history": list(self.history),
        }
