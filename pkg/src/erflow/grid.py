"""Uniform periodic grids and their spectral tables.

All fields in this package live on a uniform periodic box [0, L1) x ... x [0, Ld)
sampled with a power-of-two number of nodes per axis. Spectral coefficients use
the real-to-complex layout of ``rfftn`` (last axis halved) and a normalization
chosen so that the discrete Parseval identity reads

    sum_nodes |f|^2 * cell_volume  ==  sum_modes mult * |fhat|^2

where ``mult`` is 2 for modes whose conjugate partner is implicit and 1 on the
self-conjugate planes (last-axis index 0 and Nyquist).

Convention notes
----------------
* Wavenumbers are integer multiples of 2*pi/L per axis.
* The Nyquist plane is zeroed in the wavenumber tables used for differentiation
  and projection; fields are kept Nyquist-free by construction (initial data
  masks that plane and the 2/3 dealias mask excludes it), so this is a guard,
  not a model change.
* The dealias mask keeps integer frequencies |m_i| <= N_i // 3 on every axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as _fft

_FFT_WORKERS = 1


def set_fft_workers(n: int) -> None:
    """Set the worker count used by all transforms (recorded in run manifests)."""
    global _FFT_WORKERS
    if n < 1:
        raise ValueError(f"fft workers must be >= 1, got {n}")
    _FFT_WORKERS = int(n)


def fft_workers() -> int:
    return _FFT_WORKERS


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Descriptor of a uniform periodic box.

    Attributes
    ----------
    dim : spatial dimension, 2 or 3
    lengths : box edge length per axis
    nodes : node count per axis (power of two, >= 8)
    """

    dim: int
    lengths: tuple[float, ...]
    nodes: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        if len(self.lengths) != self.dim or len(self.nodes) != self.dim:
            raise ValueError("lengths and nodes must have one entry per axis")
        object.__setattr__(self, "lengths", tuple(float(L) for L in self.lengths))
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        for L in self.lengths:
            if not (L > 0.0):
                raise ValueError(f"box length must be positive, got {L}")
        for n in self.nodes:
            if n < 8 or not _is_power_of_two(n):
                raise ValueError(f"node count must be a power of two >= 8, got {n}")

    @classmethod
    def regular(cls, dim: int, length: float, nodes: int) -> "Grid":
        """Cubic box: same length and node count on every axis."""
        return cls(dim, (length,) * dim, (nodes,) * dim)

    # -- shapes and measures -------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.nodes

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        return self.nodes[:-1] + (self.nodes[-1] // 2 + 1,)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.nodes))

    @property
    def min_spacing(self) -> float:
        return min(self.spacing)

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)

    @property
    def cell_volume(self) -> float:
        return self.volume / self.num_nodes

    @property
    def num_nodes(self) -> int:
        return math.prod(self.nodes)

    def axes(self) -> tuple[np.ndarray, ...]:
        """Node coordinates per axis, x_j = j * spacing."""
        return tuple(
            np.arange(n) * (L / n) for L, n in zip(self.lengths, self.nodes)
        )

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(L / 2.0 for L in self.lengths)

    def box_time_window(self, fraction: float = 0.05) -> float:
        """Time horizon on which the periodic box mimics free space.

        Set by the decay time of the slowest nonzero mode: fraction * (L_min/2pi)^2.
        """
        lmin = min(self.lengths)
        return fraction * (lmin / (2.0 * math.pi)) ** 2


@dataclass(frozen=True)
class SpectralTables:
    """Precomputed wavenumber arrays for one grid (rfftn layout)."""

    k: tuple[np.ndarray, ...]  # signed wavenumbers per axis, Nyquist zeroed
    k2: np.ndarray             # |k|^2
    kmag: np.ndarray           # |k|
    mult: np.ndarray           # Hermitian multiplicity weight for spectral sums
    dealias: np.ndarray        # boolean 2/3-rule mask
    nonzero: np.ndarray        # boolean mask of modes with k != 0


@lru_cache(maxsize=32)
def tables(grid: Grid) -> SpectralTables:
    d = grid.dim
    shape = grid.spectral_shape
    ks = []
    for axis in range(d):
        n = grid.nodes[axis]
        L = grid.lengths[axis]
        if axis == d - 1:
            freqs = np.arange(n // 2 + 1, dtype=float)
            freqs[-1] = 0.0  # Nyquist carries no usable signal
        else:
            freqs = np.fft.fftfreq(n, d=1.0 / n)
            freqs[n // 2] = 0.0
        k1 = freqs * (2.0 * math.pi / L)
        expand = [1] * d
        expand[axis] = -1
        ks.append(k1.reshape(expand))
    k2 = sum(np.broadcast_to(k * k, shape).copy() for k in ks)
    kmag = np.sqrt(k2)

    mult = np.full(shape, 2.0)
    mult[..., 0] = 1.0
    mult[..., -1] = 1.0

    dealias = np.ones(shape, dtype=bool)
    for axis in range(d):
        n = grid.nodes[axis]
        if axis == d - 1:
            freqs = np.arange(n // 2 + 1)
        else:
            freqs = np.abs(np.fft.fftfreq(n, d=1.0 / n)).astype(int)
        keep = freqs <= n // 3
        expand = [1] * d
        expand[axis] = -1
        dealias &= keep.reshape(expand)

    nonzero = k2 > 0.0
    return SpectralTables(
        k=tuple(ks), k2=k2, kmag=kmag, mult=mult, dealias=dealias, nonzero=nonzero
    )


# -- transforms ---------------------------------------------------------------

def forward(grid: Grid, arr: np.ndarray) -> np.ndarray:
    """Real-to-complex transform of one or more stacked scalar fields.

    ``arr`` has shape (..., *grid.shape); the trailing ``dim`` axes are
    transformed. Output carries the Parseval-normalized coefficients.
    """
    axes = tuple(range(arr.ndim - grid.dim, arr.ndim))
    scale = math.sqrt(grid.volume) / grid.num_nodes
    return _fft.rfftn(arr, axes=axes, workers=_FFT_WORKERS) * scale


def inverse(grid: Grid, spec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`forward`; returns real fields of shape (..., *grid.shape)."""
    axes = tuple(range(spec.ndim - grid.dim, spec.ndim))
    scale = grid.num_nodes / math.sqrt(grid.volume)
    return _fft.irfftn(spec * scale, s=grid.shape, axes=axes, workers=_FFT_WORKERS)


def spectral_sum(grid: Grid, weights: np.ndarray | float, spec_sq: np.ndarray) -> float:
    """Hermitian-weighted sum of ``weights * spec_sq`` over stored modes.

    ``spec_sq`` is any real array on the spectral shape (typically |fhat|^2,
    possibly pre-summed over components).
    """
    t = tables(grid)
    return float(np.sum(t.mult * weights * spec_sq))
