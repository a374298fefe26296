"""SVD-type decompositions under both products, truncation, double filtering.

A decomposition is computed slice-wise in the transform domain: every
middle-index slice of the transformed tensor gets an ordinary matrix SVD,
and the factor tensors are transformed back.  For the periodic kind the
slices at mirrored frequencies are complex conjugates of each other (real
input), so only canonical representatives are factorized and the mirrors
are filled in by conjugation, which also guarantees exactly real spatial
factors.

Determinism: singular vectors are sign-fixed so the largest-magnitude
entry of each left vector is positive (real positive for complex slices).
At exactly tied or zero singular values only subspaces are well defined;
tests compare projectors there, never individual vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import prod

import numpy as np

from .core import as_tensor, t_transpose, tc_transpose
from .products import (
    ProductKind,
    from_transform,
    product,
    to_transform,
    transform_slicewise,
)

__all__ = [
    "TcFactors",
    "tcsvd",
    "tsvd",
    "truncate",
    "double_filter",
    "reconstruct",
    "to_domain",
    "slice_singular_values",
]


@dataclass(frozen=True)
class TcFactors:
    """Decomposition triple A = U * S * V^T with bookkeeping.

    ``domain`` is 'spatial' or 'transform'; transform-domain periodic
    factors are complex128, everything else float64.  ``trunc_k`` /
    ``trunc_l`` record SVD-rank and frequency-cutoff filtering.
    """

    kind: ProductKind
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    domain: str = "spatial"
    trunc_k: int | None = None
    trunc_l: int | None = None

    @property
    def middle(self) -> tuple:
        return tuple(self.u.shape[1:-1])


def _mirror_flat(mids: tuple) -> np.ndarray:
    """Flat index of the per-mode negated (mod n) middle multi-index."""
    if not mids:
        return np.zeros(1, dtype=np.intp)
    grid = np.arange(prod(mids)).reshape(mids)
    for ax, n in enumerate(mids):
        grid = np.roll(np.flip(grid, axis=ax), 1, axis=ax)
    return grid.ravel()


def _fix_signs(u: np.ndarray, vh: np.ndarray):
    """Make the largest-magnitude entry of each left vector real positive."""
    coupled = min(u.shape[-2], vh.shape[-1])

    def leading_factor(vectors):
        # vectors: (..., dim, count); unit-modulus factor per column
        idx = np.argmax(np.abs(vectors), axis=-2)
        lead = np.take_along_axis(vectors, idx[..., None, :], axis=-2)[..., 0, :]
        if np.iscomplexobj(vectors):
            mag = np.abs(lead)
            return np.where(mag == 0, 1.0 + 0j, np.conj(lead) / np.where(mag == 0, 1.0, mag))
        return np.where(lead < 0, -1.0, 1.0)

    f = leading_factor(u)
    u = u * f[..., None, :]
    g = np.ones(vh.shape[:-2] + (vh.shape[-2],), dtype=vh.dtype)
    g[..., :coupled] = np.conj(f[..., :coupled])
    vh = vh * g[..., :, None]
    if vh.shape[-2] > coupled:
        # rows beyond the singular pairs are only defined up to sign
        extra = vh[..., coupled:, :]
        h = leading_factor(np.swapaxes(extra, -1, -2))
        vh = vh.copy()
        vh[..., coupled:, :] = extra * h[..., :, None]
    return u, vh


def _svd_stack(stack: np.ndarray, kind: ProductKind, mirror: np.ndarray | None,
               full_matrices: bool):
    """Batched SVD of a (B, p, q) slice stack with deterministic signs.

    For the periodic kind ``mirror`` permutes the stack onto conjugate
    slices; only canonical representatives are factorized.
    """
    b, p, q = stack.shape
    m = min(p, q)
    ru = p if full_matrices else m
    rv = q if full_matrices else m
    s = np.empty((b, m))
    if kind is ProductKind.TC:
        u, s, vh = np.linalg.svd(stack, full_matrices=full_matrices)
        u, vh = _fix_signs(u, vh)
        return u, s, vh
    u = np.empty((b, p, ru), dtype=np.complex128)
    vh = np.empty((b, rv, q), dtype=np.complex128)
    ids = np.arange(b)
    self_idx = np.flatnonzero(ids == mirror)
    pair_idx = np.flatnonzero(ids < mirror)
    if self_idx.size:
        us, ss, vhs = np.linalg.svd(stack[self_idx].real, full_matrices=full_matrices)
        us, vhs = _fix_signs(us, vhs)
        u[self_idx], s[self_idx], vh[self_idx] = us, ss, vhs
    if pair_idx.size:
        up, sp, vhp = np.linalg.svd(stack[pair_idx], full_matrices=full_matrices)
        up, vhp = _fix_signs(up, vhp)
        u[pair_idx], s[pair_idx], vh[pair_idx] = up, sp, vhp
        mir = mirror[pair_idx]
        u[mir], s[mir], vh[mir] = np.conj(up), sp, np.conj(vhp)
    return u, s, vh


def _stack_to_tensor(stack: np.ndarray, mids: tuple) -> np.ndarray:
    # (B, p, r) -> (p, *mids, r)
    out = np.moveaxis(stack, 0, 1)
    return np.ascontiguousarray(out.reshape(out.shape[0:1] + mids + out.shape[-1:]))


def _decompose(a: np.ndarray, kind: ProductKind, full_matrices: bool) -> TcFactors:
    a = as_tensor(a)
    if a.ndim < 2:
        raise ValueError("decomposition requires order >= 2")
    abar = to_transform(a, kind)
    mids = a.shape[1:-1]
    b = prod(mids) if mids else 1
    i1, iN = a.shape[0], a.shape[-1]
    stack = np.ascontiguousarray(np.moveaxis(abar.reshape(i1, b, iN), 1, 0))
    mirror = _mirror_flat(mids) if kind is ProductKind.T else None
    u, s, vh = _svd_stack(stack, kind, mirror, full_matrices)
    m = s.shape[-1]
    sbar = np.zeros((b, u.shape[-1], vh.shape[-2]))
    sbar[:, np.arange(m), np.arange(m)] = s
    ubar = _stack_to_tensor(u, mids)
    sbar = _stack_to_tensor(sbar, mids)
    vbar = _stack_to_tensor(np.conj(np.swapaxes(vh, -1, -2)), mids)
    factors = TcFactors(kind=kind, u=ubar, s=sbar, v=vbar, domain="transform")
    return to_domain(factors, "spatial")


def tcsvd(a: np.ndarray, full_matrices: bool = True) -> TcFactors:
    """Reflective-boundary (cosine) SVD; order-2 input reduces to matrix SVD."""
    return _decompose(a, ProductKind.TC, full_matrices)


def tsvd(a: np.ndarray, full_matrices: bool = True) -> TcFactors:
    """Periodic-boundary (Fourier) SVD with guaranteed-real spatial factors."""
    return _decompose(a, ProductKind.T, full_matrices)


def to_domain(f: TcFactors, domain: str) -> TcFactors:
    """Convert factors between 'spatial' and 'transform' representations."""
    if domain not in ("spatial", "transform"):
        raise ValueError(f"unknown domain {domain!r}")
    if domain == f.domain:
        return f
    if domain == "transform":
        conv = lambda t: to_transform(t, f.kind)  # noqa: E731
    else:
        conv = lambda t: from_transform(np.asarray(t, dtype=np.complex128)
                                        if f.kind is ProductKind.T else t, f.kind)  # noqa: E731
    return replace(f, u=conv(f.u), s=conv(f.s), v=conv(f.v), domain=domain)


def truncate(f: TcFactors, k: int) -> TcFactors:
    """Keep the leading k singular directions of every transform slice.

    Column selection touches only the first/last modes, so it commutes
    with the middle-mode transforms and works in either domain.
    """
    i1, iN = f.u.shape[0], f.v.shape[0]
    if not 1 <= k <= min(i1, iN):
        raise ValueError(f"rank {k} out of range 1..{min(i1, iN)}")
    if k > f.u.shape[-1]:
        raise ValueError(f"rank {k} exceeds stored factor width {f.u.shape[-1]}")
    nmid = f.u.ndim - 2
    skey = (slice(0, k),) + (slice(None),) * nmid + (slice(0, k),)
    return replace(f, u=np.ascontiguousarray(f.u[..., :k]),
                   s=np.ascontiguousarray(f.s[skey]),
                   v=np.ascontiguousarray(f.v[..., :k]),
                   trunc_k=k)


def _kept_mask(mids: tuple, l: int, kind: ProductKind) -> np.ndarray:
    """Flat boolean mask of middle slices kept by the frequency cutoff.

    Cosine slices are ordered low-to-high, so the kept set is a box of
    1-based indices <= l.  Fourier frequencies come in conjugate mirror
    pairs; both members of a pair share a folded index and are kept
    together so spatial factors stay real.
    """
    if not mids:
        return np.ones(1, dtype=bool)
    mask = np.ones(mids, dtype=bool)
    for ax, n in enumerate(mids):
        i = np.arange(n)
        kept = i < l if kind is ProductKind.TC else np.minimum(i, n - i) < l
        shape = [1] * len(mids)
        shape[ax] = n
        mask &= kept.reshape(shape)
    return mask.ravel()


def double_filter(a: np.ndarray, l: int, k: int, kind: ProductKind = ProductKind.TC) -> TcFactors:
    """Frequency cutoff plus rank truncation in one pass.

    Middle slices outside the cutoff ``l`` are zeroed; the rest are
    factorized and truncated at rank ``k``.  Factors come back in the
    transform domain with only the kept k columns stored.
    """
    kind = ProductKind.parse(kind)
    a = as_tensor(a)
    if a.ndim < 2:
        raise ValueError("double_filter requires order >= 2")
    mids = a.shape[1:-1]
    i1, iN = a.shape[0], a.shape[-1]
    max_mid = max(mids) if mids else 1
    if not 1 <= l <= max_mid:
        raise ValueError(f"frequency cutoff {l} out of range 1..{max_mid}")
    if not 1 <= k <= min(i1, iN):
        raise ValueError(f"rank {k} out of range 1..{min(i1, iN)}")
    abar = to_transform(a, kind)
    b = prod(mids) if mids else 1
    kept = np.flatnonzero(_kept_mask(mids, l, kind))
    stack = np.ascontiguousarray(
        np.moveaxis(abar.reshape(i1, b, iN), 1, 0)[kept]
    )
    if kind is ProductKind.T:
        mirror_all = _mirror_flat(mids)
        pos = np.full(b, -1)
        pos[kept] = np.arange(kept.size)
        mirror = pos[mirror_all[kept]]  # kept set is mirror-closed
    else:
        mirror = None
    u, s, vh = _svd_stack(stack, kind, mirror, full_matrices=False)
    dt = np.complex128 if kind is ProductKind.T else np.float64
    ubar = np.zeros((b, i1, k), dtype=dt)
    sbar = np.zeros((b, k, k))
    vbar = np.zeros((b, iN, k), dtype=dt)
    ubar[kept] = u[:, :, :k]
    diag = np.arange(k)
    kept_s = np.zeros((kept.size, k, k))
    kept_s[:, diag, diag] = s[:, :k]
    sbar[kept] = kept_s
    vbar[kept] = np.conj(np.swapaxes(vh, -1, -2))[:, :, :k]
    return TcFactors(
        kind=kind,
        u=_stack_to_tensor(ubar, mids),
        s=_stack_to_tensor(sbar.astype(np.float64), mids),
        v=_stack_to_tensor(vbar, mids),
        domain="transform",
        trunc_k=k,
        trunc_l=l,
    )


def reconstruct(f: TcFactors) -> np.ndarray:
    """Evaluate U * S * V^T with the product of ``f.kind``.

    Transform-domain factors multiply slice-wise and inverse-transform
    once; spatial factors go through the fast products.  Both routes give
    the same tensor up to rounding.
    """
    if f.domain == "transform":
        vt = np.conj(np.swapaxes(f.v, 0, -1))
        ybar = transform_slicewise(transform_slicewise(f.u, f.s), vt)
        return from_transform(ybar, f.kind)
    if f.domain != "spatial":
        raise ValueError(f"unknown factor domain {f.domain!r}")
    vt = tc_transpose(f.v) if f.kind is ProductKind.TC else t_transpose(f.v)
    return product(f.kind, product(f.kind, f.u, f.s), vt)


def slice_singular_values(f: TcFactors) -> np.ndarray:
    """Per-middle-slice singular values, shaped (middle..., min-rank)."""
    ft = to_domain(f, "transform")
    p, q = ft.s.shape[0], ft.s.shape[-1]
    m = min(p, q)
    b = prod(ft.middle) if ft.middle else 1
    s3 = ft.s.reshape(p, b, q)
    vals = s3[np.arange(m), :, np.arange(m)]  # (m, B)
    if np.iscomplexobj(vals):
        vals = vals.real  # periodic-kind transform S is real (mirror-symmetric)
    return np.ascontiguousarray(vals.T.reshape(ft.middle + (m,)))
