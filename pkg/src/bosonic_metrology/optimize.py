"""Scalar maximization helpers: golden-section search with a unimodality
pre-scan, plus a dense-grid fallback for awkward objectives."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class NonUnimodalError(RuntimeError):
    """The pre-scan saw multiple local maxima; use grid_search_maximize."""


def _scan_grid(lo: float, hi: float, points: int, log: bool) -> np.ndarray:
    if log and lo > 0.0:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def _count_direction_changes(vals: np.ndarray) -> int:
    """Number of rises after the first fall, ignoring near-flat steps."""
    diffs = np.diff(vals)
    scale = max(np.abs(vals).max(), 1e-300)
    signs = [d for d in diffs if abs(d) > 1e-12 * scale]
    changes = 0
    for prev, cur in zip(signs, signs[1:]):
        if prev < 0 < cur:
            changes += 1
    return changes


def golden_section_maximize(fn: Callable[[float], float], lo: float,
                            hi: float, rel_tol: float = 1e-8,
                            prescan_points: int = 64,
                            log_prescan: bool = True) -> tuple[float, float]:
    """Locate the maximum of a unimodal ``fn`` on ``[lo, hi]``.

    A coarse pre-scan (default 64 log-spaced points) brackets the maximum
    and asserts a single-peak pattern; golden-section search then refines
    the bracket to relative width ``rel_tol``.

    Returns ``(x_star, fn(x_star))``.

    Raises:
        NonUnimodalError: if the pre-scan sees more than one local peak.
    """
    if not (hi > lo):
        raise ValueError("need hi > lo")
    ts = _scan_grid(lo, hi, prescan_points, log_prescan)
    vals = np.array([fn(t) for t in ts])
    if _count_direction_changes(vals) > 0:
        raise NonUnimodalError(
            "objective is not unimodal on the scan grid; "
            "fall back to grid_search_maximize()"
        )
    k = int(np.argmax(vals))
    a = ts[max(k - 1, 0)]
    b = ts[min(k + 1, len(ts) - 1)]
    if a == b:
        return float(a), float(vals[k])
    return _golden_refine(fn, float(a), float(b), rel_tol)


def _golden_refine(fn, a: float, b: float,
                   rel_tol: float) -> tuple[float, float]:
    h = b - a
    c = b - INV_PHI * h
    d = a + INV_PHI * h
    yc, yd = fn(c), fn(d)
    # iteration count for the requested relative bracket width
    scale = max(abs(a), abs(b), 1e-300)
    n = max(int(math.ceil(math.log(rel_tol * scale / h)
                          / math.log(INV_PHI))), 1)
    for _ in range(n):
        if yc >= yd:
            b, d, yd = d, c, yc
            h = b - a
            c = b - INV_PHI * h
            yc = fn(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + INV_PHI * h
            yd = fn(d)
    x = c if yc >= yd else d
    return float(x), float(max(yc, yd))


def grid_search_maximize(fn: Callable[[float], float], lo: float, hi: float,
                         points: int = 1024, rel_tol: float = 1e-8,
                         log_grid: bool = True) -> tuple[float, float]:
    """Dense-grid maximization with local golden refinement.

    Fallback for objectives that fail the unimodality pre-scan; refines
    around the best grid point without any shape assumption there.
    """
    ts = _scan_grid(lo, hi, points, log_grid)
    vals = np.array([fn(t) for t in ts])
    k = int(np.argmax(vals))
    a = ts[max(k - 1, 0)]
    b = ts[min(k + 1, len(ts) - 1)]
    if a == b:
        return float(ts[k]), float(vals[k])
    return _golden_refine(fn, float(a), float(b), rel_tol)
