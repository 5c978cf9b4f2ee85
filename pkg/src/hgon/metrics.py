"""Error metrics and trial aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .tensor import ProbabilityTensor, frobenius_sq_diff

__all__ = ["TrialSummary", "normalized_error", "summarize_trials"]


def normalized_error(theta_hat: ProbabilityTensor, theta_bar: ProbabilityTensor) -> float:
    """Squared Frobenius reconstruction error relative to the target's norm."""
    zero = ProbabilityTensor.constant(theta_bar.n, theta_bar.m, 0.0)
    denom = frobenius_sq_diff(theta_bar, zero)
    if denom == 0.0:
        raise ValueError("degenerate target: reference tensor is identically zero")
    return frobenius_sq_diff(theta_hat, theta_bar) / denom


@dataclass(frozen=True)
class TrialSummary:
    """Mean and standard error over independent trials."""

    mean: float
    std_error: float
    n_trials: int
    values: tuple


def summarize_trials(values: Sequence[float]) -> TrialSummary:
    """Aggregate per-trial values; needs at least two for a standard error."""
    values = tuple(float(v) for v in values)
    if len(values) == 0:
        raise ValueError("no trial values to aggregate")
    if len(values) < 2:
        raise ValueError("standard error needs at least 2 trials")
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return TrialSummary(mean, math.sqrt(var) / math.sqrt(n), n, values)
