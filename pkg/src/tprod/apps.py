"""Applications: factor-storage compression, classification, clustering features.

Compression stores double-filtered decomposition factors either in the
transform domain (SFD) or the spatial domain (SMD).  The S factor is fused
into U (U*S is stored), so stored value counts for an order-3 tensor are
(I1+I3)*l*k for SFD and (I1+I3)*I2*k for SMD, with transform-domain
periodic factors counting twice (complex).  Periodic SFD archives store
one slice per conjugate frequency pair; the mirrors are reconstituted by
conjugation on decompress.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import prod

import numpy as np

from .core import as_tensor, t_transpose, tc_transpose
from .decomp import _kept_mask, _mirror_flat, double_filter
from .products import ProductKind, from_transform, product, to_transform, transform_slicewise

__all__ = [
    "ARCHIVE_MAGIC",
    "ARCHIVE_VERSION",
    "CompressedArchive",
    "compress",
    "decompress",
    "archive_to_bytes",
    "archive_from_bytes",
    "psnr",
    "ClassifierModel",
    "classifier_fit",
    "classifier_predict",
    "FeatureMatrix",
    "extract_features",
    "kmeans",
    "nmi",
]

ARCHIVE_MAGIC = b"TCSF"
ARCHIVE_VERSION = 1

_KIND_CODE = {ProductKind.T: 0, ProductKind.TC: 1}
_LAYOUT_CODE = {"sfd": 0, "smd": 1}


def _stored_slices(mids: tuple, l: int, kind: ProductKind) -> np.ndarray:
    """Flat middle indices serialized in an SFD payload, in lexicographic
    order.  Periodic archives keep one canonical member per conjugate pair."""
    kept = _kept_mask(mids, l, kind)
    ids = np.flatnonzero(kept)
    if kind is ProductKind.T:
        mirror = _mirror_flat(mids)
        ids = ids[ids <= mirror[ids]]
    return ids


@dataclass(frozen=True)
class CompressedArchive:
    """Serialized factor set with byte accounting.

    ``us`` and ``v`` hold the fused U*S factor and V.  SFD: transform-
    domain stored slices stacked along axis 1, shapes (I1, n_stored, k)
    and (IN, n_stored, k).  SMD: spatial tensors (I1, middle..., k) and
    (IN, middle..., k).
    """

    kind: ProductKind
    layout: str
    l: int
    k: int
    shape: tuple
    us: np.ndarray
    v: np.ndarray

    @property
    def value_count(self) -> int:
        return self.us.size + self.v.size

    @property
    def payload_bytes(self) -> int:
        width = 16 if np.iscomplexobj(self.us) else 8
        return self.value_count * width

    @property
    def header_bytes(self) -> int:
        return 16 + 8 * len(self.shape)

    @property
    def byte_count(self) -> int:
        return self.header_bytes + self.payload_bytes


def compress(a: np.ndarray, kind=ProductKind.TC, layout: str = "sfd",
             l: int | None = None, k: int = 1) -> CompressedArchive:
    """Double-filter ``a`` at (l, k) and pack the factors for storage."""
    kind = ProductKind.parse(kind)
    layout = layout.lower()
    if layout not in _LAYOUT_CODE:
        raise ValueError(f"unknown layout {layout!r} (expected 'sfd' or 'smd')")
    a = as_tensor(a)
    mids = a.shape[1:-1]
    if l is None:
        l = max(mids) if mids else 1
    f = double_filter(a, l, k, kind)
    us_bar = transform_slicewise(f.u, f.s.astype(f.u.dtype, copy=False))
    if layout == "smd":
        us = from_transform(us_bar, kind)
        v = from_transform(f.v, kind)
    else:
        stored = _stored_slices(mids, l, kind)
        b = prod(mids) if mids else 1
        us = np.ascontiguousarray(us_bar.reshape(a.shape[0], b, k)[:, stored, :])
        v = np.ascontiguousarray(f.v.reshape(a.shape[-1], b, k)[:, stored, :])
    return CompressedArchive(kind=kind, layout=layout, l=l, k=k,
                             shape=tuple(a.shape), us=us, v=v)


def decompress(ar: CompressedArchive) -> np.ndarray:
    """Reconstruct the tensor from an archive via its cheapest path."""
    if ar.layout == "smd":
        vt = tc_transpose(ar.v) if ar.kind is ProductKind.TC else t_transpose(ar.v)
        return product(ar.kind, ar.us, vt)
    mids = ar.shape[1:-1]
    b = prod(mids) if mids else 1
    i1, iN = ar.shape[0], ar.shape[-1]
    dt = np.complex128 if ar.kind is ProductKind.T else np.float64
    abar = np.zeros((i1, b, iN), dtype=dt)
    stored = _stored_slices(mids, ar.l, ar.kind)
    slices = np.matmul(np.moveaxis(ar.us, 1, 0),
                       np.conj(np.moveaxis(ar.v, 1, 0)).swapaxes(-1, -2))
    abar[:, stored, :] = np.moveaxis(slices, 0, 1)
    if ar.kind is ProductKind.T:
        mirror = _mirror_flat(mids)
        pair = stored[mirror[stored] != stored]
        abar[:, mirror[pair], :] = np.conj(abar[:, pair, :])
    return from_transform(abar.reshape((i1,) + mids + (iN,)), ar.kind)


def archive_to_bytes(ar: CompressedArchive) -> bytes:
    head = bytearray()
    head += ARCHIVE_MAGIC
    head += struct.pack("<BBBB", ARCHIVE_VERSION, _KIND_CODE[ar.kind],
                        _LAYOUT_CODE[ar.layout], len(ar.shape))
    head += struct.pack(f"<{len(ar.shape)}Q", *ar.shape)
    head += struct.pack("<II", ar.l, ar.k)
    if np.iscomplexobj(ar.us):
        payload = ar.us.astype("<c16").tobytes() + ar.v.astype("<c16").tobytes()
    else:
        payload = ar.us.astype("<f8").tobytes() + ar.v.astype("<f8").tobytes()
    return bytes(head) + payload


def archive_from_bytes(buf: bytes) -> CompressedArchive:
    if buf[:4] != ARCHIVE_MAGIC:
        raise ValueError(f"bad archive magic {buf[:4]!r}")
    if len(buf) < 16:
        raise ValueError("truncated archive header")
    version, kind_code, layout_code, order = struct.unpack("<BBBB", buf[4:8])
    if version != ARCHIVE_VERSION:
        raise ValueError(f"unsupported archive version {version}")
    if order < 2:
        raise ValueError("corrupt archive header")
    off = 8
    if len(buf) < off + 8 * order + 8:
        raise ValueError("truncated archive header")
    shape = struct.unpack(f"<{order}Q", buf[off:off + 8 * order])
    off += 8 * order
    l, k = struct.unpack("<II", buf[off:off + 8])
    off += 8
    kind = {v: k2 for k2, v in _KIND_CODE.items()}.get(kind_code)
    layout = {v: k2 for k2, v in _LAYOUT_CODE.items()}.get(layout_code)
    if kind is None or layout is None:
        raise ValueError("corrupt archive header")
    shape = tuple(int(n) for n in shape)
    mids = shape[1:-1]
    if layout == "smd":
        us_shape = (shape[0],) + mids + (k,)
        v_shape = (shape[-1],) + mids + (k,)
        dt = "<f8"
    else:
        n_stored = len(_stored_slices(mids, l, kind))
        us_shape = (shape[0], n_stored, k)
        v_shape = (shape[-1], n_stored, k)
        dt = "<c16" if kind is ProductKind.T else "<f8"
    n_us = prod(us_shape)
    n_v = prod(v_shape)
    width = 16 if dt == "<c16" else 8
    expected = off + (n_us + n_v) * width
    if len(buf) != expected:
        raise ValueError(f"payload size mismatch: expected {expected} bytes, got {len(buf)}")
    us = np.frombuffer(buf, dtype=dt, count=n_us, offset=off).reshape(us_shape)
    v = np.frombuffer(buf, dtype=dt, count=n_v, offset=off + n_us * width).reshape(v_shape)
    return CompressedArchive(kind=kind, layout=layout, l=int(l), k=int(k),
                             shape=shape, us=us.copy(), v=v.copy())


def psnr(reference: np.ndarray, test: np.ndarray, max_value: float) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the tensors coincide."""
    reference = np.asarray(reference, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if reference.shape != test.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {test.shape}")
    if max_value <= 0:
        raise ValueError("max_value must be positive")
    mse = float(np.mean((reference - test) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(max_value * max_value / mse))


@dataclass(frozen=True)
class ClassifierModel:
    """Nearest-subspace classifier state (samples along the last mode)."""

    kind: ProductKind
    mean: np.ndarray
    uk_bar: np.ndarray
    train_feat_bar: np.ndarray
    labels: np.ndarray
    k: int


def _project_bar(uk_bar: np.ndarray, tbar: np.ndarray) -> np.ndarray:
    return transform_slicewise(np.conj(np.swapaxes(uk_bar, 0, -1)), tbar)


def classifier_fit(train: np.ndarray, labels, k: int,
                   kind=ProductKind.TC) -> ClassifierModel:
    """Project mean-deviation training data onto the rank-k left basis."""
    kind = ProductKind.parse(kind)
    train = as_tensor(train)
    labels = np.asarray(labels)
    if labels.shape[0] != train.shape[-1]:
        raise ValueError(
            f"{labels.shape[0]} labels for {train.shape[-1]} training samples"
        )
    mids = train.shape[1:-1]
    if not 1 <= k <= min(train.shape[0], train.shape[-1]):
        raise ValueError(f"rank {k} out of range")
    mean = train.mean(axis=-1, keepdims=True)
    a = train - mean
    f = double_filter(a, max(mids) if mids else 1, k, kind)
    abar = to_transform(a, kind)
    feat = _project_bar(f.u, abar)
    return ClassifierModel(kind=kind, mean=mean, uk_bar=f.u,
                           train_feat_bar=feat, labels=labels, k=k)


def classifier_predict(model: ClassifierModel, test: np.ndarray) -> np.ndarray:
    """Label each test sample by its Frobenius-nearest projected training
    sample; ties go to the lowest training index."""
    test = as_tensor(test)
    if test.shape[:-1] != model.mean.shape[:-1]:
        raise ValueError(
            f"test shape {test.shape} does not match training shape "
            f"{model.mean.shape[:-1] + ('*',)}"
        )
    tbar = to_transform(test - model.mean, model.kind)
    jfeat = from_transform(_project_bar(model.uk_bar, tbar), model.kind)
    lfeat = from_transform(model.train_feat_bar, model.kind)
    lf = lfeat.reshape(-1, lfeat.shape[-1])
    jf = jfeat.reshape(-1, jfeat.shape[-1])
    d2 = (
        np.sum(lf * lf, axis=0)[:, None]
        + np.sum(jf * jf, axis=0)[None, :]
        - 2.0 * lf.T @ jf
    )
    return model.labels[np.argmin(d2, axis=0)]


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-sample rows of reduced transform-domain features."""

    rows: np.ndarray
    provenance: tuple


def extract_features(a: np.ndarray, k1) -> FeatureMatrix:
    """Reduced features via the truncated reflective-boundary SVD.

    ``k1`` is the SVD rank, optionally paired with a frequency cutoff as
    (rank, cutoff).  Samples run along the last mode; each sample's kept
    transform-domain projection is flattened into one row.
    """
    a = as_tensor(a)
    mids = a.shape[1:-1]
    if isinstance(k1, (tuple, list)):
        if not 1 <= len(k1) <= 2:
            raise ValueError("k1 must be rank or (rank, frequency cutoff)")
        k = int(k1[0])
        l = int(k1[1]) if len(k1) == 2 else (max(mids) if mids else 1)
    else:
        k = int(k1)
        l = max(mids) if mids else 1
    f = double_filter(a, l, k, ProductKind.TC)
    abar = to_transform(a, ProductKind.TC)
    feat = _project_bar(f.u, abar)  # (k, middle..., samples)
    b = prod(mids) if mids else 1
    kept = np.flatnonzero(_kept_mask(mids, l, ProductKind.TC))
    f3 = feat.reshape(k, b, a.shape[-1])[:, kept, :]
    rows = np.ascontiguousarray(f3.reshape(-1, a.shape[-1]).T)
    return FeatureMatrix(rows=rows, provenance=(k, l))


def kmeans(x, c: int, seed: int = 0, max_iter: int = 300) -> np.ndarray:
    """Lloyd iterations from seeded sampling of c distinct rows.

    Stops when assignments stop changing (or at ``max_iter``); empty
    clusters keep their previous center.
    """
    rows = np.asarray(getattr(x, "rows", x), dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("kmeans expects a non-empty (samples, features) matrix")
    n = rows.shape[0]
    if not 1 <= c <= n:
        raise ValueError(f"cluster count {c} out of range 1..{n}")
    rng = np.random.default_rng(seed)
    centers = rows[rng.choice(n, size=c, replace=False)].copy()
    sq_rows = np.sum(rows * rows, axis=1)
    assign = None
    for _ in range(max_iter):
        d2 = sq_rows[:, None] - 2.0 * rows @ centers.T + np.sum(centers * centers, axis=1)[None, :]
        new_assign = np.argmin(d2, axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(c):
            members = rows[assign == j]
            if members.shape[0]:
                centers[j] = members.mean(axis=0)
    return assign


def nmi(a, b) -> float:
    """Normalized mutual information I(a;b)/sqrt(H(a)H(b)), natural logs.

    Both partitions trivial counts as 1; one trivial partition gives 0.
    """
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size == 0 or a.size != b.size:
        raise ValueError("labelings must be non-empty and equally long")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    na, nb = ai.max() + 1, bi.max() + 1
    cont = np.zeros((na, nb))
    np.add.at(cont, (ai, bi), 1.0)
    pxy = cont / a.size
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    hx = float(-np.sum(px[px > 0] * np.log(px[px > 0])))
    hy = float(-np.sum(py[py > 0] * np.log(py[py > 0])))
    if hx == 0.0 and hy == 0.0:
        return 1.0
    if hx == 0.0 or hy == 0.0:
        return 0.0
    nz = pxy > 0
    mi = float(np.sum(pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz])))
    return float(np.clip(mi / np.sqrt(hx * hy), 0.0, 1.0))
