"""Per-bin statistics behind every confidence band this package draws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BinStat:
    x: float
    mean: float
    ci_half: float
    count: int


def ci95_half(values: np.ndarray) -> float:
    """Half-width of a 95% normal confidence interval; 0 below two samples."""
    if values.size < 2:
        return 0.0
    return float(1.96 * np.std(values, ddof=1) / math.sqrt(values.size))


def bin_stats(xs: np.ndarray, ys: np.ndarray) -> list[BinStat]:
    """Mean and CI of ``ys`` per distinct ``xs`` value, in ascending x order.

    Values within a bin keep their input order, so repeated aggregation of
    the same file reproduces the same floating-point results bit for bit.
    """
    out = []
    for x in np.unique(xs):
        members = ys[xs == x]
        out.append(
            BinStat(
                x=float(x),
                mean=float(np.mean(members)),
                ci_half=ci95_half(members),
                count=int(members.size),
            )
        )
    return out
