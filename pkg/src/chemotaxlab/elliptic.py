"""Discrete operator A = I - Laplacian with homogeneous Neumann conditions.

The grid is cell-centered on a rectangle, so the even-symmetric cosine
transform (DCT-II/DCT-III pair) diagonalizes the standard second-order
Neumann Laplacian exactly.  Solves are therefore direct: forward transform,
divide each mode by (1 + lambda_k), inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import NonFiniteInput, ValidationError


@dataclass(frozen=True)
class Grid:
    """Cell-centered rectangular grid in 1 or 2 space dimensions."""

    dim: int
    lengths: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError("dim", f"simulation grids support dim 1 or 2, got {self.dim}")
        if len(self.lengths) != self.dim or len(self.counts) != self.dim:
            raise ValidationError("grid", "lengths/counts must have one entry per axis")
        for L in self.lengths:
            if not (np.isfinite(L) and L > 0):
                raise ValidationError("lengths", f"axis length must be positive, got {L}")
        for n in self.counts:
            if n < 8:
                raise ValidationError("counts", f"need at least 8 cells per axis, got {n}")

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.counts))

    @property
    def measure(self) -> float:
        """|Omega|, the product of the axis lengths."""
        return float(np.prod(self.lengths))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.counts

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.counts))

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        h = self.spacing[axis]
        return (np.arange(self.counts[axis]) + 0.5) * h

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays broadcast to the full grid shape."""
        axes = [self.axis_nodes(a) for a in range(self.dim)]
        if self.dim == 1:
            return (axes[0],)
        return tuple(np.meshgrid(*axes, indexing="ij"))


@dataclass
class Field:
    """Scalar function sampled at the grid nodes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValidationError("field", f"values shape {self.values.shape} != grid {self.grid.shape}")

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "Field":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        return cls(grid, np.asarray(fn(*grid.meshes()), dtype=float))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def mean(self) -> float:
        return float(self.values.mean())


def _require_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput(f"{what} contains non-finite entries")


class SpectralNeumannOperator:
    """Transform plan for solving (I - alpha*Laplacian) w = rhs on one grid.

    The plan (the Laplacian eigenvalue array) is immutable after
    construction and can be shared across threads; each solve allocates its
    own scratch via scipy.fft.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        lam_axes = []
        for a in range(grid.dim):
            n = grid.counts[a]
            h = grid.spacing[a]
            k = np.arange(n)
            # eigenvalues of -Laplacian_h for the cell-centered Neumann stencil
            lam_axes.append((2.0 - 2.0 * np.cos(np.pi * k / n)) / h**2)
        if grid.dim == 1:
            self.lam = lam_axes[0]
        else:
            self.lam = lam_axes[0][:, None] + lam_axes[1][None, :]

    def solve_shifted(self, rhs: np.ndarray, alpha: float = 1.0) -> np.ndarray:
        """Return w with (I - alpha*Laplacian_h) w = rhs (alpha >= 0)."""
        coef = scipy.fft.dctn(rhs, type=2, norm="ortho")
        coef /= 1.0 + alpha * self.lam
        return scipy.fft.idctn(coef, type=2, norm="ortho")


_operator_cache: dict[Grid, SpectralNeumannOperator] = {}


def operator_for(grid: Grid) -> SpectralNeumannOperator:
    op = _operator_cache.get(grid)
    if op is None:
        op = SpectralNeumannOperator(grid)
        _operator_cache[grid] = op
    return op


def solve_A_inverse(u: Field) -> Field:
    """Solve the chemoattractant equation: (I - Laplacian_h) v = u.

    The zero mode has eigenvalue 0, so mean(v) = mean(u); the discrete
    operator is an M-matrix, so nonnegative u gives nonnegative v up to
    transform round-off.
    """
    _require_finite(u.values, "u")
    return Field(u.grid, operator_for(u.grid).solve_shifted(u.values, 1.0))


def _axis_central(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    # central differences; even reflection about the boundary faces makes
    # the first/last entries (v1-v0)/2h, the second-order value consistent
    # with a zero normal derivative at the wall
    g = np.empty_like(values)
    v = np.moveaxis(values, axis, 0)
    gm = np.moveaxis(g, axis, 0)
    gm[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    gm[0] = (v[1] - v[0]) / (2.0 * h)
    gm[-1] = (v[-1] - v[-2]) / (2.0 * h)
    return g


def gradient(v: Field) -> tuple[Field, ...]:
    """Node-sampled gradient, one Field per axis."""
    _require_finite(v.values, "v")
    hs = v.grid.spacing
    return tuple(Field(v.grid, _axis_central(v.values, a, hs[a])) for a in range(v.grid.dim))


def face_normal_gradient(v: Field, axis: int) -> np.ndarray:
    """Derivative of v across every face along one axis.

    Shape along `axis` is count+1; the two boundary faces are exactly zero
    (no flux through the wall), which is what the conservative chemotaxis
    flux uses.
    """
    _require_finite(v.values, "v")
    h = v.grid.spacing[axis]
    vv = np.moveaxis(v.values, axis, 0)
    shape = (vv.shape[0] + 1,) + vv.shape[1:]
    g = np.zeros(shape)
    g[1:-1] = (vv[1:] - vv[:-1]) / h
    return np.moveaxis(g, 0, axis)


def dense_shifted_operator(grid: Grid, alpha: float = 1.0) -> np.ndarray:
    """Assemble (I - alpha*Laplacian_h) densely. Test oracle for small grids only."""
    n = grid.n_nodes
    if n > 32 * 32:
        raise ValidationError("grid", "dense oracle restricted to grids of at most 32^2 nodes")
    A = np.eye(n)
    counts = grid.counts

    def flat(idx):
        if grid.dim == 1:
            return idx[0]
        return idx[0] * counts[1] + idx[1]

    for axis in range(grid.dim):
        h2 = grid.spacing[axis] ** 2
        for node in np.ndindex(*counts):
            i = flat(node)
            for nb in (-1, 1):
                j = list(node)
                j[axis] += nb
                if 0 <= j[axis] < counts[axis]:
                    A[i, flat(tuple(j))] -= alpha / h2
                    A[i, i] += alpha / h2
                # reflected neighbor falls back onto the node itself: no-op
    return A
