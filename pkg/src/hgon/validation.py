"""Input validation helpers shared by the estimator-facing entry points."""

from __future__ import annotations

import numpy as np

__all__ = ["ensure_adjacency", "ensure_labels", "ensure_mask_shape", "ensure_unit"]


def ensure_adjacency(a) -> None:
    from .tensor import AdjacencyTensor

    if not isinstance(a, AdjacencyTensor):
        raise TypeError(f"expected AdjacencyTensor, got {type(a).__name__}")


def ensure_labels(z, n: int, k: int) -> np.ndarray:
    """Validate and normalize a community assignment to an int64 array."""
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (n,):
        raise ValueError(f"assignment must have shape ({n},), got {z.shape}")
    if len(z) and (z.min() < 0 or z.max() >= k):
        raise ValueError(f"assignment labels must lie in [0, {k}), got range "
                         f"[{z.min()}, {z.max()}]")
    return z


def ensure_mask_shape(mask, a) -> None:
    if (mask.n, mask.m) != (a.n, a.m):
        raise ValueError(
            f"mask shape ({mask.n},{mask.m}) does not match tensor ({a.n},{a.m})"
        )


def ensure_unit(x: float, name: str, *, open_left: bool = False) -> float:
    x = float(x)
    low_ok = x > 0.0 if open_left else x >= 0.0
    if not (low_ok and x <= 1.0):
        bracket = "(0, 1]" if open_left else "[0, 1]"
        raise ValueError(f"{name} must lie in {bracket}, got {x}")
    return x
