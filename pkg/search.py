"""
Deterministic 1-D search helpers

A coarse scan over a fixed grid locates the best grid point; golden-section
refinement then polishes it inside the bracket formed by its two neighbours.
Everything here is derivative-free and reproducible: the same inputs always
visit the same points.
"""
import logging
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.optimize import golden

from errors import SearchBracketError

logger = logging.getLogger(__name__)

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - np.sqrt(5.0)) / 2.0


def scan(func: Callable[[float], float], grid: Sequence[float]) -> Tuple[int, np.ndarray]:
    """
    Evaluate func on every grid point.

    Returns:
        (index of the first minimal value, array of values)
    """
    values = np.array([func(float(x)) for x in grid], dtype=float)
    return int(np.argmin(values)), values


def bracket_minimum(func: Callable[[float], float],
                    grid: Sequence[float]) -> Tuple[float, float, float]:
    """
    Coarse scan that must end with an interior minimum.

    Raises:
        SearchBracketError: If the smallest value sits on either end of the grid
    """
    grid = np.asarray(grid, dtype=float)
    i, values = scan(func, grid)
    if i == 0 or i == len(grid) - 1 or not np.isfinite(values[i]):
        raise SearchBracketError("minimum not interior to scan", (float(grid[0]), float(grid[-1])))
    return float(grid[i - 1]), float(grid[i]), float(grid[i + 1])


def refine_minimum(func: Callable[[float], float],
                   grid: Sequence[float],
                   tol: float = 1e-10,
                   maxiter: int = 200) -> Tuple[float, float]:
    """
    Grid scan followed by golden-section refinement around the best point.

    The refined point is kept only if it strictly improves on the best grid
    point, so ties keep the first grid point that reached the minimum. Order the
    grid to express a tie-break preference.

    Returns:
        (argmin, minimum value)
    """
    grid = np.asarray(grid, dtype=float)
    i, values = scan(func, grid)
    best_x, best_f = float(grid[i]), float(values[i])

    interior = 0 < i < len(grid) - 1
    if interior and values[i] < values[i - 1] and values[i] < values[i + 1]:
        lo, hi = sorted((float(grid[i - 1]), float(grid[i + 1])))
        x, fx, _ = golden(func, brack=(lo, best_x, hi), tol=tol, maxiter=maxiter, full_output=True)
        if fx < best_f:
            return float(x), float(fx)
    return best_x, best_f


def refine_maximum(func: Callable[[float], float],
                   grid: Sequence[float],
                   tol: float = 1e-10,
                   maxiter: int = 200) -> Tuple[float, float]:
    """Maximising counterpart of refine_minimum"""
    x, neg = refine_minimum(lambda v: -func(v), grid, tol=tol, maxiter=maxiter)
    return x, -neg


def golden_minimize_array(func: Callable[[np.ndarray], np.ndarray],
                          lower: np.ndarray,
                          upper: np.ndarray,
                          iterations: int = 30) -> np.ndarray:
    """
    Elementwise golden-section search over many independent intervals.

    func maps an array of candidate points (one per interval) to an array of
    objective values. Each element shrinks its own interval by the golden
    ratio per iteration; the midpoint of the final interval is returned.
    """
    a = np.array(lower, dtype=float, copy=True)
    b = np.array(upper, dtype=float, copy=True)
    c = a + INV_PHI_SQ * (b - a)
    d = a + INV_PHI * (b - a)
    fc = func(c)
    fd = func(d)

    for _ in range(iterations):
        left = fc < fd
        # keep [a, d] where the left point wins, [c, b] otherwise
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_next = np.where(left, a + INV_PHI_SQ * (b - a), d)
        d_next = np.where(left, c, a + INV_PHI * (b - a))
        point = np.where(left, c_next, d_next)
        f_point = func(point)
        fc, fd = np.where(left, f_point, fd), np.where(left, fc, f_point)
        c, d = c_next, d_next

    return (a + b) / 2.0
