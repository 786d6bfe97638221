"""Periodic lattice-coordinate grids and finite-difference Wirtinger derivatives.

All sampling happens in lattice coordinates on [0, 1)^{2g}, mapped through the
period matrix to complex lifts, so periodicity is exact wrap-around and the
*dzbar* components of a derivative come from the 2g directional differences
via the inverse chart matrix of the torus.  Central differences at the grid
spacing are exact (to rounding) on functions affine in (z, zbar).

Functions that are not honest functions on the torus but shift by a constant
across each period (connection forms in an automorphy frame) are handled by
``seam_jumps``: value(c + e_d) = value(c) + jumps[d].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionTooCoarse, ShapeMismatch
from .torus import ComplexTorus

MIN_RESOLUTION = 4


def lattice_grid(resolution: int, dims: int) -> np.ndarray:
    """Nodes i/N of the periodic grid, shape (N,)*dims + (dims,)."""
    axes = [np.arange(resolution) / resolution] * dims
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass
class GridFunction:
    """Values sampled over the periodic lattice-coordinate grid of a torus.

    ``values`` has shape (N,)*2g + value_shape.  ``seam_jumps``, when present,
    has shape (2g,) + value_shape and gives the constant increment of the
    sampled function across one full period in each grid direction.
    """

    torus: ComplexTorus
    values: np.ndarray
    seam_jumps: np.ndarray | None = None
    periodic: bool = True
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values)
        dims = 2 * self.torus.genus
        if self.values.ndim < dims:
            raise ShapeMismatch("grid values must carry one axis per real dimension")
        n = self.values.shape[0]
        if self.values.shape[:dims] != (n,) * dims:
            raise ShapeMismatch("grid axes must share one resolution")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")
        if self.seam_jumps is not None:
            self.seam_jumps = np.asarray(self.seam_jumps)
            if self.seam_jumps.shape != (dims,) + self.value_shape:
                raise ShapeMismatch("seam jumps must have shape (2g,) + value_shape")

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def value_shape(self) -> tuple:
        return self.values.shape[2 * self.torus.genus :]

    @classmethod
    def sample(cls, torus: ComplexTorus, resolution: int, fn, measure_jumps: bool = False,
               label: str = "") -> "GridFunction":
        """Sample ``fn`` (vectorized over lifts, (..., g) -> (...,) + value_shape).

        With ``measure_jumps`` the constant period increments are measured from
        two evaluations per direction and attached as ``seam_jumps``.
        """
        if resolution < MIN_RESOLUTION:
            raise ResolutionTooCoarse(f"resolution {resolution} < {MIN_RESOLUTION}")
        coords = lattice_grid(resolution, 2 * torus.genus)
        values = np.asarray(fn(torus.lift_of_coords(coords)))
        jumps = measure_seam_jumps(torus, fn) if measure_jumps else None
        return cls(torus, values, seam_jumps=jumps, label=label)

    def mean(self) -> np.ndarray:
        """Average over the grid axes (pairwise summation, evaluation-order free)."""
        axes = tuple(range(2 * self.torus.genus))
        return np.mean(self.values, axis=axes)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def max_variation(self) -> float:
        return float(np.max(np.abs(self.values - self.mean())))


def measure_seam_jumps(torus: ComplexTorus, fn, check_tol: float = 1e-9) -> np.ndarray:
    """Measure constant period increments of ``fn``: f(z + lambda_d) - f(z).

    The increment is measured at two base points and must agree within
    ``check_tol``; non-constant seams are a misuse of the grid machinery.
    """
    dims = 2 * torus.genus
    base = np.vstack([np.zeros(dims), np.full(dims, 0.37)])
    f0 = np.asarray(fn(torus.lift_of_coords(base)))
    jumps = None
    for d in range(dims):
        shifted = base.copy()
        shifted[:, d] += 1.0
        fd = np.asarray(fn(torus.lift_of_coords(shifted))) - f0
        if jumps is None:
            jumps = np.zeros((dims,) + fd.shape[1:], dtype=fd.dtype)
        if np.max(np.abs(fd[0] - fd[1])) > check_tol * max(1.0, float(np.max(np.abs(fd)))):
            raise ValueError(f"period increment along direction {d} is not constant")
        jumps[d] = fd[0]
    return jumps


def _axis_slice(ndim: int, axis: int, index: int) -> tuple:
    sl = [slice(None)] * ndim
    sl[axis] = index
    return tuple(sl)


def _directional_differences(gf: GridFunction) -> np.ndarray:
    """Central differences along each grid direction, shape (2g,) + values.shape."""
    n = gf.resolution
    if n < MIN_RESOLUTION:
        raise ResolutionTooCoarse(f"resolution {n} < {MIN_RESOLUTION}")
    dims = 2 * gf.torus.genus
    vals = np.asarray(gf.values, dtype=complex)
    out = np.empty((dims,) + vals.shape, dtype=complex)
    scale = n / 2.0  # 1 / (2h) with h = 1/N
    for d in range(dims):
        fwd = np.roll(vals, -1, axis=d)
        bwd = np.roll(vals, 1, axis=d)
        if gf.seam_jumps is not None:
            fwd[_axis_slice(vals.ndim, d, n - 1)] += gf.seam_jumps[d]
            bwd[_axis_slice(vals.ndim, d, 0)] -= gf.seam_jumps[d]
        out[d] = (fwd - bwd) * scale
    return out


def _check_step(gf: GridFunction, h) -> None:
    if h is not None and not np.isclose(h, 1.0 / gf.resolution):
        raise ValueError("grid stencils run at the grid spacing; pass h=None or 1/N")


def dbar_fd(gf: GridFunction, h: float | None = None) -> GridFunction:
    """Per-node dzbar-derivative coefficients; appends one axis of length g.

    Output value_shape is value_shape + (g,), entry [..., k] = d(value)/dzbar_k.
    """
    _check_step(gf, h)
    diffs = _directional_differences(gf)
    out = np.einsum("kd,d...->...k", gf.torus.dzbar_rows, diffs)
    return GridFunction(gf.torus, out, periodic=gf.periodic, label=gf.label)


def dz_fd(gf: GridFunction, h: float | None = None) -> GridFunction:
    """Per-node dz-derivative coefficients; appends one axis of length g."""
    _check_step(gf, h)
    diffs = _directional_differences(gf)
    out = np.einsum("kd,d...->...k", gf.torus.dz_rows, diffs)
    return GridFunction(gf.torus, out, periodic=gf.periodic, label=gf.label)


def wirtinger_at(torus: ComplexTorus, fn, coords, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Stencil-evaluated (dz, dzbar) derivatives of ``fn`` at lattice coordinates.

    No periodicity is assumed: the stencil points are evaluated directly, so
    this is the right tool for chart-local data and for probing functions on
    product tori that are too large to grid.
    Returns two arrays of shape coords.shape[:-1] + value_shape + (g,).
    """
    coords = np.asarray(coords, dtype=float)
    dims = 2 * torus.genus
    if coords.shape[-1] != dims:
        raise ShapeMismatch(f"coordinate vectors must have length {dims}")
    diffs = None
    for d in range(dims):
        step = np.zeros(dims)
        step[d] = h
        fp = np.asarray(fn(torus.lift_of_coords(coords + step)), dtype=complex)
        fm = np.asarray(fn(torus.lift_of_coords(coords - step)), dtype=complex)
        if diffs is None:
            diffs = np.empty((dims,) + fp.shape, dtype=complex)
        diffs[d] = (fp - fm) / (2.0 * h)
    dz = np.einsum("kd,d...->...k", torus.dz_rows, diffs)
    dzbar = np.einsum("kd,d...->...k", torus.dzbar_rows, diffs)
    return dz, dzbar


def dbar_at(torus: ComplexTorus, fn, coords, h: float) -> np.ndarray:
    """dzbar part of :func:`wirtinger_at`."""
    return wirtinger_at(torus, fn, coords, h)[1]
