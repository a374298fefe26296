"""Brute-force structured operators used as ground truth in tests.

Everything here materializes the full circulant / Toeplitz-plus-Hankel
structure and evaluates products by explicit contraction with fixed loop
order, so outputs are reproducible bit for bit.  These paths are
deliberately slow and memory-hungry; a guard refuses to instantiate
structured tensors beyond ``MAX_ORACLE_ELEMENTS`` entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iter_product
from math import prod

import numpy as np

from .core import as_tensor, contract
from .transforms import _gamma_solve_along

__all__ = [
    "MAX_ORACLE_ELEMENTS",
    "StructuredMatrix",
    "StructuredTensor",
    "build_circ",
    "build_toeplitz",
    "build_hankel",
    "build_th",
    "build_tcirc",
    "build_TH",
    "reflective_kernel",
    "oracle_tproduct",
    "oracle_tcproduct",
    "block_circulant_product",
]

MAX_ORACLE_ELEMENTS = 10_000_000


@dataclass(frozen=True)
class StructuredMatrix:
    kind: str  # circulant | toeplitz | hankel | toeplitz_hankel
    n: int
    dense: np.ndarray


@dataclass(frozen=True)
class StructuredTensor:
    kind: str  # tcirc | TH
    shape: tuple
    dense: np.ndarray


def _as_kernel_vector(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValueError("kernel vector must be non-empty")
    return a


def build_circ(a) -> StructuredMatrix:
    """Circulant matrix with first column ``a``: entry (i,j) is a[(i-j) mod n]."""
    a = _as_kernel_vector(a)
    n = a.size
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    dense = a[(i - j) % n]
    return StructuredMatrix(kind="circulant", n=n, dense=dense)


def build_toeplitz(a) -> StructuredMatrix:
    """Symmetric Toeplitz part: entry (i,j) is a[|i-j|]."""
    a = _as_kernel_vector(a)
    n = a.size
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    dense = a[np.abs(i - j)]
    return StructuredMatrix(kind="toeplitz", n=n, dense=dense)


def _hankel_index(i: int, j: int, n: int):
    """0-based Hankel source index for 1-based rule; None when the
    anti-diagonal delta kills the entry (i+j = n+1 in 1-based terms)."""
    s = i + j + 2  # 1-based i+j
    if s == n + 1:
        return None
    return s - 1 if s <= n else 2 * (n + 1) - s - 1


def build_hankel(a) -> StructuredMatrix:
    """Hankel part of the reflective-boundary convolution matrix."""
    a = _as_kernel_vector(a)
    n = a.size
    dense = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            h = _hankel_index(i, j, n)
            if h is not None:
                dense[i, j] = a[h]
    return StructuredMatrix(kind="hankel", n=n, dense=dense)


def build_th(a) -> StructuredMatrix:
    """Toeplitz-plus-Hankel matrix of the reflective-boundary convolution."""
    a = _as_kernel_vector(a)
    dense = build_toeplitz(a).dense + build_hankel(a).dense
    return StructuredMatrix(kind="toeplitz_hankel", n=a.size, dense=dense)


def _check_structured_size(shape) -> None:
    if prod(shape) > MAX_ORACLE_ELEMENTS:
        raise ValueError(
            f"structured tensor of shape {tuple(shape)} exceeds the "
            f"{MAX_ORACLE_ELEMENTS}-element oracle limit"
        )


def build_tcirc(a: np.ndarray) -> StructuredTensor:
    """Circulant structured tensor of the periodic block convolution.

    For order-N input (I1, n2..n_{N-1}, J) the result has modes
    (I1, n2..n_{N-1}, J, n2..n_{N-1}); the slice at row index i and column
    index j of each paired mode selects the kernel slice (i - j) mod n.
    """
    a = as_tensor(a)
    if a.ndim < 3:
        raise ValueError("build_tcirc requires order >= 3")
    mids = a.shape[1:-1]
    shape = a.shape + mids
    _check_structured_size(shape)
    dense = np.zeros(shape)
    for ii in _iter_product(*(range(n) for n in mids)):
        for jj in _iter_product(*(range(n) for n in mids)):
            kk = tuple((i - j) % n for i, j, n in zip(ii, jj, mids))
            dense[(slice(None), *ii, slice(None), *jj)] = a[(slice(None), *kk, slice(None))]
    return StructuredTensor(kind="tcirc", shape=shape, dense=dense)


def build_TH(ahat: np.ndarray) -> StructuredTensor:
    """Toeplitz-plus-Hankel structured tensor of the reflective block
    convolution, built from the Gamma-preconditioned kernel ``ahat``.

    Each paired middle mode contributes a Toeplitz index |i-j| and, unless
    suppressed by the anti-diagonal delta, a Hankel index; the entry sums
    the kernel over every per-mode combination of the two, which for one
    middle mode reduces to the classic Toep(a) + Hank(a) rule.
    """
    ahat = as_tensor(ahat)
    if ahat.ndim < 3:
        raise ValueError("build_TH requires order >= 3")
    mids = ahat.shape[1:-1]
    shape = ahat.shape + mids
    _check_structured_size(shape)
    dense = np.zeros(shape)
    for ii in _iter_product(*(range(n) for n in mids)):
        for jj in _iter_product(*(range(n) for n in mids)):
            options = []
            for i, j, n in zip(ii, jj, mids):
                opts = [abs(i - j)]
                h = _hankel_index(i, j, n)
                if h is not None:
                    opts.append(h)
                options.append(opts)
            block = np.zeros((ahat.shape[0], ahat.shape[-1]))
            for kk in _iter_product(*options):
                block = block + ahat[(slice(None), *kk, slice(None))]
            dense[(slice(None), *ii, slice(None), *jj)] = block
    return StructuredTensor(kind="TH", shape=shape, dense=dense)


def reflective_kernel(a: np.ndarray) -> np.ndarray:
    """Gamma-inverse applied along every middle mode of the kernel tensor."""
    a = as_tensor(a)
    out = a
    for ax in range(1, a.ndim - 1):
        out = _gamma_solve_along(out, ax)
    return out


def _oracle_product(structured: StructuredTensor, x: np.ndarray) -> np.ndarray:
    n = (len(structured.shape) + 2) // 2  # order of the operands
    modes_s = list(range(n, 2 * (n - 1) + 1))
    modes_x = list(range(1, n))
    return contract(structured.dense, x, modes_s, modes_x)


def _check_operands(a: np.ndarray, x: np.ndarray) -> None:
    if a.ndim != x.ndim:
        raise ValueError("operands must have equal order")
    if a.shape[1:-1] != x.shape[1:-1]:
        raise ValueError(f"middle shapes differ: {a.shape} vs {x.shape}")
    if a.shape[-1] != x.shape[0]:
        raise ValueError(f"inner dimensions do not conform: {a.shape} x {x.shape}")


def oracle_tproduct(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Periodic-boundary product by explicit circulant-tensor contraction."""
    a, x = as_tensor(a), as_tensor(x)
    _check_operands(a, x)
    if a.ndim == 2:
        return a @ x
    return _oracle_product(build_tcirc(a), x)


def oracle_tcproduct(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Reflective-boundary product by explicit TH-tensor contraction."""
    a, x = as_tensor(a), as_tensor(x)
    _check_operands(a, x)
    if a.ndim == 2:
        return a @ x
    return _oracle_product(build_TH(reflective_kernel(a)), x)


def block_circulant_product(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Order-3 periodic product via the unfolded block-circulant matrix."""
    a, x = as_tensor(a), as_tensor(x)
    _check_operands(a, x)
    if a.ndim != 3:
        raise ValueError("block-circulant cross-check is order-3 only")
    i1, n2, j = a.shape
    i3 = x.shape[-1]
    bcirc = np.zeros((i1 * n2, j * n2))
    for i in range(n2):
        for jj in range(n2):
            bcirc[i * i1 : (i + 1) * i1, jj * j : (jj + 1) * j] = a[:, (i - jj) % n2, :]
    unf_x = np.concatenate([x[:, i, :] for i in range(n2)], axis=0)
    unf_y = bcirc @ unf_x
    y = np.zeros((i1, n2, i3))
    for i in range(n2):
        y[:, i, :] = unf_y[i * i1 : (i + 1) * i1, :]
    return y
