"""Vector and symmetric-tensor fields on periodic grids, and their operators.

Velocity-like fields keep paired physical/spectral representations; whichever
is absent is computed on demand and cached, so a field behaves as an immutable
value. Differential operators act by wavenumber multiplication in spectral
space. The Leray projection removes the gradient part of a field mode by mode,
which is how the pressure gradient is eliminated throughout this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, forward, inverse, tables


class GridMismatchError(ValueError):
    pass


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


# -- symmetric tensor component bookkeeping -----------------------------------

_PAIRS = {
    2: ((0, 0), (0, 1), (1, 1)),
    3: ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)),
}
_PAIR_INDEX = {
    d: {pair: idx for idx, pair in enumerate(pairs)} for d, pairs in _PAIRS.items()
}


def tensor_pairs(dim: int) -> tuple[tuple[int, int], ...]:
    """Stored (row, col) index pairs of the upper triangle, row-major."""
    return _PAIRS[dim]


def _offdiag_weights(dim: int) -> np.ndarray:
    """Frobenius weights: 1 on the diagonal, 2 off it (symmetry)."""
    return np.array([1.0 if i == j else 2.0 for i, j in _PAIRS[dim]])


class VectorField:
    """d-component field with lazily paired physical/spectral representations."""

    __slots__ = ("grid", "mean_zero", "_phys", "_spec")

    def __init__(self, grid: Grid, phys=None, spec=None, mean_zero: bool = False):
        if phys is None and spec is None:
            raise ValueError("need a physical or spectral representation")
        self.grid = grid
        self.mean_zero = bool(mean_zero)
        if phys is not None:
            phys = np.asarray(phys, dtype=float)
            if phys.shape != (grid.dim,) + grid.shape:
                raise GridMismatchError(
                    f"physical data shape {phys.shape} does not match grid {grid.shape}"
                )
        if spec is not None:
            spec = np.asarray(spec, dtype=complex)
            if spec.shape != (grid.dim,) + grid.spectral_shape:
                raise GridMismatchError(
                    f"spectral data shape {spec.shape} does not match grid"
                )
        self._phys = phys
        self._spec = spec

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_phys(cls, grid: Grid, phys, mean_zero: bool = False) -> "VectorField":
        return cls(grid, phys=phys, mean_zero=mean_zero)

    @classmethod
    def from_spec(cls, grid: Grid, spec, mean_zero: bool = False) -> "VectorField":
        f = cls(grid, spec=np.array(spec, dtype=complex), mean_zero=mean_zero)
        if mean_zero:
            f._spec[(slice(None),) + (0,) * grid.dim] = 0.0
        return f

    @classmethod
    def zero(cls, grid: Grid) -> "VectorField":
        return cls(grid, phys=np.zeros((grid.dim,) + grid.shape), mean_zero=True)

    # -- representations ------------------------------------------------------

    @property
    def phys(self) -> np.ndarray:
        if self._phys is None:
            self._phys = inverse(self.grid, self._spec)
        return self._phys

    @property
    def spec(self) -> np.ndarray:
        if self._spec is None:
            self._spec = forward(self.grid, self._phys)
            if self.mean_zero:
                self._spec[(slice(None),) + (0,) * self.grid.dim] = 0.0
        return self._spec

    def copy_spec(self) -> np.ndarray:
        return self.spec.copy()

    def mean(self) -> np.ndarray:
        axes = tuple(range(1, 1 + self.grid.dim))
        return self.phys.mean(axis=axes)


@dataclass
class SymTensorField:
    """Symmetric d x d tensor per node; only the upper triangle is stored.

    ``data`` has shape (n_pairs, *grid.shape) with pairs ordered as in
    :func:`tensor_pairs`.
    """

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        pairs = tensor_pairs(self.grid.dim)
        if self.data.shape != (len(pairs),) + self.grid.shape:
            raise GridMismatchError(
                f"tensor data shape {self.data.shape} does not match grid"
            )

    def component(self, i: int, j: int) -> np.ndarray:
        if i > j:
            i, j = j, i
        return self.data[_PAIR_INDEX[self.grid.dim][(i, j)]]

    def frobenius_sq(self) -> np.ndarray:
        """Pointwise squared Frobenius norm sum_ij T_ij^2."""
        w = _offdiag_weights(self.grid.dim).reshape((-1,) + (1,) * self.grid.dim)
        return np.sum(w * self.data * self.data, axis=0)

    def magnitude(self) -> np.ndarray:
        return np.sqrt(self.frobenius_sq())

    @classmethod
    def zero(cls, grid: Grid) -> "SymTensorField":
        return cls(grid, np.zeros((len(tensor_pairs(grid.dim)),) + grid.shape))


# -- transforms as free operations ---------------------------------------------

def to_spectral(u: VectorField) -> np.ndarray:
    return u.spec


def to_physical(spec: np.ndarray, grid: Grid, mean_zero: bool = False) -> VectorField:
    return VectorField.from_spec(grid, spec, mean_zero=mean_zero)


# -- differential operators -----------------------------------------------------

def gradient(u: VectorField) -> np.ndarray:
    """Full velocity gradient, shape (d, d, *grid.shape): grad[i, j] = d u_i / d x_j."""
    g = u.grid
    t = tables(g)
    spec = u.spec
    out = np.empty((g.dim, g.dim) + g.spectral_shape, dtype=complex)
    for j in range(g.dim):
        out[:, j] = 1j * t.k[j] * spec
    return inverse(g, out)


def symmetric_gradient(u: VectorField) -> SymTensorField:
    """Du = (grad u + grad u^T) / 2, computed spectrally."""
    g = u.grid
    t = tables(g)
    spec = u.spec
    pairs = tensor_pairs(g.dim)
    dspec = np.empty((len(pairs),) + g.spectral_shape, dtype=complex)
    for idx, (i, j) in enumerate(pairs):
        dspec[idx] = 0.5j * (t.k[i] * spec[j] + t.k[j] * spec[i])
    return SymTensorField(g, inverse(g, dspec))


def sym_tensor_divergence_spec(T: SymTensorField) -> np.ndarray:
    """Spectral row-wise divergence of a symmetric tensor: (div T)_i = d_j T_ij."""
    g = T.grid
    t = tables(g)
    tspec = forward(g, T.data)
    out = np.zeros((g.dim,) + g.spectral_shape, dtype=complex)
    idx = _PAIR_INDEX[g.dim]
    for i in range(g.dim):
        for j in range(g.dim):
            comp = idx[(i, j) if i <= j else (j, i)]
            out[i] += 1j * t.k[j] * tspec[comp]
    return out


def divergence(T: SymTensorField) -> VectorField:
    return VectorField.from_spec(T.grid, sym_tensor_divergence_spec(T))


def divergence_scalar(u: VectorField) -> np.ndarray:
    """div u as a physical scalar field."""
    g = u.grid
    t = tables(g)
    dspec = sum(1j * t.k[i] * u.spec[i] for i in range(g.dim))
    return inverse(g, dspec)


def divergence_residual_spec(u: VectorField) -> float:
    """max_xi |xi . uhat|, the cheap spectral divergence check."""
    g = u.grid
    t = tables(g)
    dspec = sum(1j * t.k[i] * u.spec[i] for i in range(g.dim))
    return float(np.max(np.abs(dspec)))


def project_spec(grid: Grid, spec: np.ndarray, pin_mean: bool = True) -> np.ndarray:
    """Leray projection in place-free form: uhat -> uhat - k (k.uhat)/|k|^2."""
    t = tables(grid)
    k2 = np.where(t.k2 > 0.0, t.k2, 1.0)
    kdotu = sum(t.k[i] * spec[i] for i in range(grid.dim))
    out = spec - np.stack([t.k[i] * kdotu / k2 for i in range(grid.dim)])
    if pin_mean:
        out[(slice(None),) + (0,) * grid.dim] = 0.0
    return out


def leray_project(u: VectorField) -> VectorField:
    return VectorField.from_spec(
        u.grid, project_spec(u.grid, u.spec, pin_mean=u.mean_zero), mean_zero=u.mean_zero
    )


def laplacian_spec(grid: Grid, spec: np.ndarray) -> np.ndarray:
    return -tables(grid).k2 * spec


# -- magnitudes and norms --------------------------------------------------------

def field_magnitude(f, grid: Grid | None = None) -> tuple[np.ndarray, Grid]:
    """Pointwise magnitude of a scalar array, stacked array, or field object."""
    if isinstance(f, VectorField):
        return np.sqrt(np.sum(f.phys * f.phys, axis=0)), f.grid
    if isinstance(f, SymTensorField):
        return f.magnitude(), f.grid
    arr = np.asarray(f, dtype=float)
    if grid is None:
        raise ValueError("grid required for raw arrays")
    if arr.shape == grid.shape:
        return np.abs(arr), grid
    if arr.ndim == grid.dim + 1 and arr.shape[1:] == grid.shape:
        return np.sqrt(np.sum(arr * arr, axis=0)), grid
    raise GridMismatchError(f"array shape {arr.shape} does not match grid {grid.shape}")


def lp_norm(f, q: float, grid: Grid | None = None) -> float:
    """L^q norm by the rectangle rule; q = inf gives the max over nodes."""
    mag, g = field_magnitude(f, grid)
    if q == np.inf:
        return float(np.max(mag))
    if q < 1.0:
        raise ValueError(f"exponent must be >= 1, got {q}")
    return float(np.sum(mag**q) * g.cell_volume) ** (1.0 / q)


def l2_norm_sq_spectral(u: VectorField) -> float:
    t = tables(u.grid)
    return float(np.sum(t.mult * np.sum(np.abs(u.spec) ** 2, axis=0)))


def h_seminorm(u: VectorField, order: int) -> float:
    """Spectral H^k seminorm, sqrt(sum |k|^(2 order) |uhat|^2), order in {1, 2}."""
    if order not in (1, 2):
        raise ValueError(f"seminorm order must be 1 or 2, got {order}")
    t = tables(u.grid)
    w = t.k2 if order == 1 else t.k2 * t.k2
    return float(np.sqrt(np.sum(t.mult * w * np.sum(np.abs(u.spec) ** 2, axis=0))))


def h1_norm(u: VectorField) -> float:
    return float(np.hypot(lp_norm(u, 2.0), h_seminorm(u, 1)))


def spectrum_magnitude(u: VectorField) -> np.ndarray:
    """Per-mode vector magnitude |uhat(xi)| on the spectral shape."""
    return np.sqrt(np.sum(np.abs(u.spec) ** 2, axis=0))


def low_ball_energy(u: VectorField, radius: float) -> float:
    """Energy sum of modes with |k| <= radius (Hermitian-weighted)."""
    t = tables(u.grid)
    ball = t.kmag <= radius
    amp2 = np.sum(np.abs(u.spec) ** 2, axis=0)
    return float(np.sum(t.mult[ball] * amp2[ball]))
