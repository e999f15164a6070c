"""Nonlocal Coulomb sums on finite boxes.

Two routes to the potential Phi(x) = sum_{y != x} rho(y)/|x-y|:

* ``potential_direct`` — O(N^2) double sum, lexicographic source order with
  Neumaier-compensated accumulation.  This is the oracle.
* ``potential_fast``  — zero-padded circular convolution with the kernel
  table via real FFTs on a (2 L1) x (2 L2) x (2 L3) grid.  Free-space: no
  periodic aliasing, since the padded grid holds the full offset range.

The pairing D(f,g) = sum_{x != y} f(x) g(y) / |x-y| sums over ordered
pairs, exactly as the energy functionals are written; many references use
the half-normalized form instead.  K(0) = 0 encodes the x != y exclusion.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .grids import DensityGrid
from .lattice import DistanceKind


@dataclass(frozen=True)
class KernelTable:
    """K(v) = 1/|v| for lattice offsets v in [-w1,w1]x[-w2,w2]x[-w3,w3]."""

    kind: DistanceKind
    widths: tuple[int, int, int]
    values: np.ndarray  # shape (2 w1 + 1, 2 w2 + 1, 2 w3 + 1), K(0) = 0

    def at_offset(self, v: tuple[int, int, int]) -> float:
        w1, w2, w3 = self.widths
        return float(self.values[v[0] + w1, v[1] + w2, v[2] + w3])


def kernel_table(widths: tuple[int, int, int], kind: DistanceKind) -> KernelTable:
    w1, w2, w3 = widths
    ax = [np.arange(-w, w + 1, dtype=np.float64) for w in (w1, w2, w3)]
    X = ax[0][:, None, None]
    Y = ax[1][None, :, None]
    Z = ax[2][None, None, :]
    if kind is DistanceKind.EUCLIDEAN:
        dist = np.sqrt(X * X + Y * Y + Z * Z)
    else:
        dist = np.abs(X) + np.abs(Y) + np.abs(Z)
    with np.errstate(divide="ignore"):
        vals = 1.0 / dist
    vals[w1, w2, w3] = 0.0
    return KernelTable(kind, widths, vals)


def potential_direct(rho: DensityGrid, kind: DistanceKind) -> np.ndarray:
    """Phi on rho's box by the O(N^2) double sum (compensated accumulation)."""
    n1, n2, n3 = rho.box.dims
    table = kernel_table((n1 - 1, n2 - 1, n3 - 1), kind)
    K = table.values
    vals = rho.values
    acc = np.zeros(rho.box.dims)
    comp = np.zeros(rho.box.dims)
    w1, w2, w3 = n1 - 1, n2 - 1, n3 - 1
    for i in range(n1):
        for j in range(n2):
            for k in range(n3):
                r = vals[i, j, k]
                if r == 0.0:
                    continue
                # K(x - src) over the whole box is a contiguous kernel slice
                block = r * K[w1 - i : w1 - i + n1, w2 - j : w2 - j + n2, w3 - k : w3 - k + n3]
                t = acc + block
                comp += np.where(np.abs(acc) >= np.abs(block), (acc - t) + block, (block - t) + acc)
                acc = t
    return acc + comp


# kernel spectra for the fast path, keyed by (padded dims, kind)
_SPECTRUM_CACHE: dict[tuple[tuple[int, int, int], str], np.ndarray] = {}
_CACHE_LOCK = threading.Lock()

_MAX_FAST_CELLS = 200_000_000  # refuse padded grids beyond ~1.6 GB


def _kernel_spectrum(dims: tuple[int, int, int], kind: DistanceKind) -> np.ndarray:
    padded = tuple(2 * n for n in dims)
    key = (padded, kind.value)
    with _CACHE_LOCK:
        hit = _SPECTRUM_CACHE.get(key)
    if hit is not None:
        return hit
    if padded[0] * padded[1] * padded[2] > _MAX_FAST_CELLS:
        raise MemoryError(f"fast potential grid {padded} exceeds the size budget")
    wrapped = np.zeros(padded)
    table = kernel_table(tuple(n - 1 for n in dims), kind).values
    n1, n2, n3 = dims
    # offset v lives at index v mod 2n; slot n (offset +-n) is never addressed
    ix = np.arange(-(n1 - 1), n1) % padded[0]
    iy = np.arange(-(n2 - 1), n2) % padded[1]
    iz = np.arange(-(n3 - 1), n3) % padded[2]
    wrapped[np.ix_(ix, iy, iz)] = table
    spectrum = sfft.rfftn(wrapped)
    with _CACHE_LOCK:
        _SPECTRUM_CACHE[key] = spectrum
    return spectrum


def potential_fast(rho: DensityGrid, kind: DistanceKind) -> np.ndarray:
    """Same field as potential_direct, via zero-padded FFT convolution."""
    dims = rho.box.dims
    padded = tuple(2 * n for n in dims)
    spectrum = _kernel_spectrum(dims, kind)
    padded_rho = np.zeros(padded)
    padded_rho[: dims[0], : dims[1], : dims[2]] = rho.values
    conv = sfft.irfftn(sfft.rfftn(padded_rho) * spectrum, s=padded)
    return conv[: dims[0], : dims[1], : dims[2]].copy()


def pairing(
    f_sq: DensityGrid,
    g_sq: DensityGrid,
    kind: DistanceKind,
    method: str = "fast",
) -> float:
    """D(f,g) = sum_{x != y} f_sq(x) g_sq(y) / |x-y| over ordered pairs."""
    if f_sq.box != g_sq.box:
        raise ValueError(f"pairing needs a common box: {f_sq.box} vs {g_sq.box}")
    if method == "fast":
        phi_g = potential_fast(g_sq, kind)
    elif method == "direct":
        phi_g = potential_direct(g_sq, kind)
    else:
        raise ValueError(f"unknown method {method!r}")
    # every summand is >= 0; a negative result can only be FFT round-off
    return max(float(np.sum(f_sq.values * phi_g)), 0.0)
