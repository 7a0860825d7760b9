"""Rectangular phase-space grids, 1-d slices and moment integrals."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad, trapezoid

from config.constants import (
    DEFAULT_GRID_MAX,
    DEFAULT_GRID_MIN,
    DEFAULT_GRID_POINTS,
    DEFAULT_MAX_WORKERS,
    DEFAULT_SLICE_POINTS,
)
from src.catgen.utils.errors import DomainError

PhaseFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]
QuadratureFunction = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class GridSpec:
    """Rectangular phase-space window sampled on n_x by n_p points, ends included."""

    x_min: float = DEFAULT_GRID_MIN
    x_max: float = DEFAULT_GRID_MAX
    p_min: float = DEFAULT_GRID_MIN
    p_max: float = DEFAULT_GRID_MAX
    n_x: int = DEFAULT_GRID_POINTS
    n_p: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.n_x < 2 or self.n_p < 2:
            raise DomainError(
                f"Grid needs at least 2 points per axis (got {self.n_x}x{self.n_p})"
            )
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise DomainError("Grid axes must be increasing")
        bounds = (self.x_min, self.x_max, self.p_min, self.p_max)
        if not all(math.isfinite(v) for v in bounds):
            raise DomainError("Grid bounds must be finite")

    @property
    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)


@dataclass(frozen=True, eq=False)
class Grid2D:
    """Sampled phase-space function; values[i, j] is taken at (x_i, p_j)."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int
    values: np.ndarray

    def __post_init__(self):
        GridSpec(self.x_min, self.x_max, self.p_min, self.p_max, self.n_x, self.n_p)
        values = np.array(self.values, dtype=float)
        if values.shape != (self.n_x, self.n_p):
            raise ValueError(
                f"Grid values shape {values.shape} != ({self.n_x}, {self.n_p})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Grid values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_spec(cls, spec: GridSpec, values: np.ndarray) -> "Grid2D":
        return cls(
            spec.x_min, spec.x_max, spec.p_min, spec.p_max, spec.n_x, spec.n_p, values
        )

    @property
    def spec(self) -> GridSpec:
        return GridSpec(
            self.x_min, self.x_max, self.p_min, self.p_max, self.n_x, self.n_p
        )

    @property
    def x_axis(self) -> np.ndarray:
        return self.spec.x_axis

    @property
    def p_axis(self) -> np.ndarray:
        return self.spec.p_axis

    def integral(self, weight: Optional[np.ndarray] = None) -> float:
        """Trapezoidal integral over dx dp, optionally of values * weight."""
        integrand = self.values if weight is None else self.values * weight
        return float(trapezoid(trapezoid(integrand, self.p_axis, axis=1), self.x_axis))

    def max_deviation(self, other: "Grid2D") -> float:
        """
        Largest pointwise |difference| against another grid.

        Args:
            other: Grid sampled on the same axes

        Returns:
            max |self - other| over all samples

        Raises:
            ValueError: If the axes differ
        """
        if self.spec != other.spec:
            raise ValueError("Grids are sampled on different axes")
        return float(np.max(np.abs(self.values - other.values)))

    def to_rows(self) -> List[list]:
        """Axis metadata header, then one row of p-samples per x."""
        rows: List[list] = [
            ["x_min", "x_max", "p_min", "p_max", "n_x", "n_p"],
            [self.x_min, self.x_max, self.p_min, self.p_max, self.n_x, self.n_p],
        ]
        rows.extend(list(row) for row in self.values)
        return rows


def _max_workers(max_workers: Optional[int]) -> int:
    if max_workers is not None:
        return max(1, max_workers)
    return max(1, int(os.getenv("CATGEN_MAX_WORKERS", DEFAULT_MAX_WORKERS)))


def eval_grid(
    func: PhaseFunction, spec: GridSpec, max_workers: Optional[int] = None
) -> Grid2D:
    """Evaluate func(x, p_axis) row by row on a thread pool.

    Rows are independent and written back by index, so the result does not
    depend on scheduling.
    """
    x_axis = spec.x_axis
    p_axis = spec.p_axis

    def evaluate_row(x: float) -> np.ndarray:
        return np.asarray(func(np.full_like(p_axis, x), p_axis), dtype=float)

    workers = min(_max_workers(max_workers), spec.n_x)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(evaluate_row, x_axis))
    return Grid2D.from_spec(spec, np.vstack(rows))


def quad_slice(
    func: QuadratureFunction,
    phi: float,
    x_min: float = DEFAULT_GRID_MIN,
    x_max: float = DEFAULT_GRID_MAX,
    n: int = DEFAULT_SLICE_POINTS,
) -> np.ndarray:
    """
    Sample a quadrature distribution along one phase.

    Args:
        func: Callable (x, phi) -> p(x, phi), vectorized over x
        phi: Quadrature phase
        x_min: Left end of the slice
        x_max: Right end of the slice
        n: Number of points, >= 2

    Returns:
        Array of shape (n, 2) with rows (x, p(x, phi))
    """
    if n < 2 or not x_min < x_max:
        raise DomainError(
            f"Slice needs n >= 2 and x_min < x_max (got {n}, [{x_min}, {x_max}])"
        )
    x = np.linspace(x_min, x_max, n)
    return np.column_stack([x, np.asarray(func(x, phi), dtype=float)])


def count_interior_minima(values: Sequence[float], rel_depth: float = 0.0) -> int:
    """Strict local minima away from the ends; with rel_depth > 0 a minimum only
    counts if both neighbouring maxima exceed it by that fraction of the peak."""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return 0
    inner = values[1:-1]
    is_min = (inner < values[:-2]) & (inner <= values[2:])
    candidates = np.nonzero(is_min)[0] + 1
    if rel_depth <= 0.0:
        return int(candidates.size)
    threshold = rel_depth * float(np.max(values))
    count = 0
    for idx in candidates:
        left = float(np.max(values[:idx]))
        right = float(np.max(values[idx + 1 :]))
        if min(left, right) - values[idx] > threshold:
            count += 1
    return count


# Photon-number moments: x^2 + p^2 = 2 |alpha|^2 and the ordering of each
# representation fixes the offset (symmetric +1/2, antinormal +1).


def moment_photon_number_wigner(grid: Grid2D) -> float:
    """<n> = integral of W (x^2 + p^2)/2 minus 1/2."""
    x, p = np.meshgrid(grid.x_axis, grid.p_axis, indexing="ij")
    return grid.integral(0.5 * (x**2 + p**2)) - 0.5


def moment_photon_number_husimi(grid: Grid2D) -> float:
    """<n> from Q; the antinormal ordering costs a full vacuum unit."""
    x, p = np.meshgrid(grid.x_axis, grid.p_axis, indexing="ij")
    return grid.integral(0.5 * (x**2 + p**2)) - 1.0


def moment_photon_number_quadrature(
    func: QuadratureFunction, limit: float = 2.0 * DEFAULT_GRID_MAX
) -> float:
    """(<x_0^2> + <x_pi/2^2>) / 2 - 1/2 by adaptive quadrature on [-limit, limit]."""
    second_moments = [
        quad(
            lambda x, phi=phi: x * x * float(func(x, phi)), -limit, limit, limit=200
        )[0]
        for phi in (0.0, 0.5 * math.pi)
    ]
    return 0.5 * sum(second_moments) - 0.5
