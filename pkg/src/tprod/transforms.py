"""Diagonalizing transforms for the two block-convolution products.

The reflective-boundary product is diagonalized mode-wise by a *scaled*
cosine matrix C = diag(c1) Cbar, where Cbar is the orthogonal type-II
cosine matrix and c1 = 1 ./ Cbar[:, 1].  C itself is not orthogonal; the
fast path therefore runs the orthogonal cosine transform and applies the
diag(c1) scaling (or its inverse) explicitly.  The periodic-boundary
product uses the unnormalized Fourier transform with 1/n on the inverse.

The Gamma operator is the unit upper bidiagonal matrix mapping a kernel to
the first column of its Toeplitz-plus-Hankel convolution matrix; its
inverse preconditions kernels so the reflective product is associative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .core import mode_n_product

__all__ = [
    "DENSE_THRESHOLD",
    "DctBasis",
    "GammaOperator",
    "dct_basis",
    "gamma_apply",
    "gamma_solve",
    "apply_cosine_modes",
    "apply_fourier_modes",
]

# Mode lengths up to this use dense matrix-fiber products; longer modes go
# through the fast cosine routine.  Both paths agree to < 1e-10.
DENSE_THRESHOLD = 64


@dataclass(frozen=True)
class DctBasis:
    """Cosine transform triple for one mode length.

    cbar is orthogonal; c = diag(c1) cbar has an all-ones first row and an
    all-ones first column; cinv = cbar.T diag(1/c1).
    """

    n: int
    cbar: np.ndarray
    c1: np.ndarray
    c: np.ndarray
    cinv: np.ndarray


def _cbar_matrix(n: int) -> np.ndarray:
    i = np.arange(1, n + 1, dtype=np.float64)[:, None]
    j = np.arange(1, n + 1, dtype=np.float64)[None, :]
    scale = np.sqrt((2.0 - (i == 1.0)) / n)
    return scale * np.cos((i - 1.0) * (2.0 * j - 1.0) * np.pi / (2.0 * n))


def _c1_vector(n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.float64)
    first_col = np.sqrt((2.0 - (i == 0.0)) / n) * np.cos(i * np.pi / (2.0 * n))
    return 1.0 / first_col


def dct_basis(n: int) -> DctBasis:
    """Build the scaled cosine basis (Cbar, c1, C, C^-1) for mode length n."""
    if n < 1:
        raise ValueError("mode length must be >= 1")
    cbar = _cbar_matrix(n)
    c1 = _c1_vector(n)
    c = c1[:, None] * cbar
    cinv = cbar.T * (1.0 / c1)[None, :]
    return DctBasis(n=n, cbar=cbar, c1=c1, c=c, cinv=cinv)


@dataclass(frozen=True)
class GammaOperator:
    """Unit upper bidiagonal operator of a given length (implicit matrix)."""

    n: int


def gamma_apply(g: GammaOperator, v: np.ndarray) -> np.ndarray:
    """(Gamma v)[i] = v[i] + v[i+1], last entry unchanged."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"expected length-{g.n} vector, got shape {v.shape}")
    out = v.copy()
    out[:-1] += v[1:]
    return out


def gamma_solve(g: GammaOperator, v: np.ndarray) -> np.ndarray:
    """Invert gamma_apply by back-substitution."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"expected length-{g.n} vector, got shape {v.shape}")
    return _gamma_solve_along(v, 0)


def _gamma_apply_along(t: np.ndarray, axis: int) -> np.ndarray:
    out = t.copy()
    head = [slice(None)] * t.ndim
    tail = [slice(None)] * t.ndim
    head[axis] = slice(0, t.shape[axis] - 1)
    tail[axis] = slice(1, t.shape[axis])
    out[tuple(head)] += t[tuple(tail)]
    return out


def _gamma_solve_along(t: np.ndarray, axis: int) -> np.ndarray:
    # x[i] = sum_{j >= i} (-1)^(j-i) v[j]: signed reversed cumulative sum.
    n = t.shape[axis]
    signs_shape = [1] * t.ndim
    signs_shape[axis] = n
    signs = ((-1.0) ** np.arange(n)).reshape(signs_shape)
    w = t * signs
    acc = np.flip(np.cumsum(np.flip(w, axis=axis), axis=axis), axis=axis)
    return acc * signs


def _check_modes(t: np.ndarray, modes) -> list:
    modes = sorted(set(int(m) for m in modes))
    for m in modes:
        if not 1 <= m <= t.ndim:
            raise ValueError(f"mode {m} out of range for order-{t.ndim} tensor")
    return modes


def apply_cosine_modes(
    t: np.ndarray,
    modes,
    which: str,
    dense_threshold: int = DENSE_THRESHOLD,
) -> np.ndarray:
    """Apply Cbar, C, or C^-1 along each listed (1-based) mode, ascending.

    which: 'cbar' (orthogonal cosine), 'c' (scaled), or 'cinv' (inverse of
    the scaled matrix).
    """
    if which not in ("cbar", "c", "cinv"):
        raise ValueError(f"unknown cosine variant {which!r}")
    modes = _check_modes(t, modes)
    out = np.asarray(t, dtype=np.float64)
    for m in modes:
        n = out.shape[m - 1]
        if n <= dense_threshold:
            basis = dct_basis(n)
            mat = {"cbar": basis.cbar, "c": basis.c, "cinv": basis.cinv}[which]
            out = mode_n_product(mat, out, m)
        else:
            ax = m - 1
            shape = [1] * out.ndim
            shape[ax] = n
            c1 = _c1_vector(n).reshape(shape)
            if which == "cbar":
                out = sp_fft.dct(out, type=2, axis=ax, norm="ortho")
            elif which == "c":
                out = sp_fft.dct(out, type=2, axis=ax, norm="ortho") * c1
            else:
                out = sp_fft.idct(out / c1, type=2, axis=ax, norm="ortho")
    return np.ascontiguousarray(out)


def apply_fourier_modes(t: np.ndarray, modes, inverse: bool = False) -> np.ndarray:
    """Discrete Fourier transform along each listed (1-based) mode.

    The inverse carries the 1/n normalization so forward then inverse is
    the identity.  Always returns complex128.
    """
    modes = _check_modes(t, modes)
    out = np.asarray(t, dtype=np.complex128)
    for m in modes:
        if inverse:
            out = np.fft.ifft(out, axis=m - 1)
        else:
            out = np.fft.fft(out, axis=m - 1)
    return np.ascontiguousarray(out)
