"""Rainflow cycle counting on state-of-charge traces.

Four-point stack counting: a range enclosed by both neighbouring ranges is a
full cycle; the residue left at the end is counted as half cycles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CycleRecord:
    dod: float
    mean_soc: float
    weight: float


def turning_points(trace) -> np.ndarray:
    """Alternating local extrema of ``trace``, endpoints included."""
    x = np.asarray(trace, dtype=float)
    if x.size == 0:
        raise ValueError("empty trace")
    keep = np.concatenate(([True], np.diff(x) != 0))
    x = x[keep]
    if x.size < 3:
        return x
    d = np.sign(np.diff(x))
    interior = np.nonzero(d[1:] != d[:-1])[0] + 1
    return np.concatenate(([x[0]], x[interior], [x[-1]]))


def extract_cycles(trace) -> list[CycleRecord]:
    x = np.asarray(trace, dtype=float)
    if x.size and (x.min() < 0 or x.max() > 1):
        raise ValueError("SOC trace values must lie in [0, 1]")
    cycles: list[CycleRecord] = []
    stack: list[float] = []
    for point in turning_points(x).tolist():
        stack.append(point)
        while len(stack) >= 4:
            a, b, c, d = stack[-4:]
            inner = abs(c - b)
            if inner <= abs(b - a) and inner <= abs(d - c):
                cycles.append(CycleRecord(inner, (b + c) / 2, 1.0))
                del stack[-3:-1]
            else:
                break
    for a, b in zip(stack[:-1], stack[1:]):
        cycles.append(CycleRecord(abs(b - a), (a + b) / 2, 0.5))
    return cycles


def cycle_arrays(cycles: list[CycleRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(dod, mean_soc, weight)`` columns of a cycle list."""
    if not cycles:
        empty = np.zeros(0)
        return empty, empty.copy(), empty.copy()
    arr = np.array([(c.dod, c.mean_soc, c.weight) for c in cycles], dtype=float)
    return arr[:, 0], arr[:, 1], arr[:, 2]
