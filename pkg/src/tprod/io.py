"""File formats, IDX ingestion, and seeded synthetic generators.

Tensor files (magic ``TNSR``) store the shape and the canonical
last-index-fastest float64 payload verbatim, so write/read round trips
are bit-identical.  Random data comes from NumPy's PCG64 generator
(``numpy.random.default_rng``), whose output streams are stable across
platforms, so identical specs reproduce identical tensors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import prod

import numpy as np

from .apps import CompressedArchive, archive_from_bytes, archive_to_bytes
from .core import as_tensor
from .products import ProductKind, from_transform

__all__ = [
    "FormatError",
    "TENSOR_MAGIC",
    "TENSOR_VERSION",
    "write_tensor",
    "read_tensor",
    "write_archive",
    "read_archive",
    "read_idx",
    "SyntheticSpec",
    "gen_synthetic",
]

TENSOR_MAGIC = b"TNSR"
TENSOR_VERSION = 1

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


class FormatError(ValueError):
    """Malformed or truncated binary input."""


def write_tensor(path, t: np.ndarray) -> None:
    t = as_tensor(t)
    with open(path, "wb") as fh:
        fh.write(TENSOR_MAGIC)
        fh.write(struct.pack("<BB", TENSOR_VERSION, t.ndim))
        fh.write(struct.pack(f"<{t.ndim}Q", *t.shape))
        fh.write(t.astype("<f8", copy=False).tobytes())


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != TENSOR_MAGIC:
        raise FormatError(f"bad tensor magic {buf[:4]!r}")
    if len(buf) < 6:
        raise FormatError("truncated tensor header")
    version, order = struct.unpack("<BB", buf[4:6])
    if version != TENSOR_VERSION:
        raise FormatError(f"unsupported tensor file version {version}")
    off = 6 + 8 * order
    if len(buf) < off:
        raise FormatError("truncated tensor header")
    shape = struct.unpack(f"<{order}Q", buf[6:off])
    count = prod(shape)
    if len(buf) != off + 8 * count:
        raise FormatError(
            f"payload size mismatch: expected {8 * count} bytes, got {len(buf) - off}"
        )
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=off)
    return data.reshape(shape).copy()


def write_archive(path, ar: CompressedArchive) -> None:
    with open(path, "wb") as fh:
        fh.write(archive_to_bytes(ar))


def read_archive(path) -> CompressedArchive:
    with open(path, "rb") as fh:
        buf = fh.read()
    try:
        return archive_from_bytes(buf)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def read_idx(images_path, labels_path):
    """Read an IDX image/label pair into (rows x cols x samples, labels).

    Pixels are scaled from 0..255 to [0, 1]; samples are permuted to the
    last mode.
    """
    with open(images_path, "rb") as fh:
        head = fh.read(16)
        if len(head) < 16:
            raise FormatError("truncated IDX image header")
        magic, count, rows, cols = struct.unpack(">IIII", head)
        if magic != _IDX_IMAGES_MAGIC:
            raise FormatError(f"bad IDX image magic 0x{magic:08x}")
        raw = fh.read(count * rows * cols)
    if len(raw) != count * rows * cols:
        raise FormatError("truncated IDX image payload")
    with open(labels_path, "rb") as fh:
        head = fh.read(8)
        if len(head) < 8:
            raise FormatError("truncated IDX label header")
        magic, n_labels = struct.unpack(">II", head)
        if magic != _IDX_LABELS_MAGIC:
            raise FormatError(f"bad IDX label magic 0x{magic:08x}")
        labels = np.frombuffer(fh.read(n_labels), dtype=np.uint8)
    if labels.size != n_labels:
        raise FormatError("truncated IDX label payload")
    if n_labels != count:
        raise FormatError(f"{count} images but {n_labels} labels")
    images = np.frombuffer(raw, dtype=np.uint8).reshape(count, rows, cols)
    tensor = np.ascontiguousarray(images.transpose(1, 2, 0).astype(np.float64) / 255.0)
    return tensor, labels.copy()


@dataclass(frozen=True)
class SyntheticSpec:
    """Seeded generator spec; identical specs give bit-identical tensors."""

    shape: tuple
    kind: str  # gaussian | low_tubal_rank | blobs
    seed: int = 0
    rank: int | None = None
    clusters: int | None = None
    separation: float = 10.0


def _gen_low_tubal_rank(spec: SyntheticSpec, rng) -> np.ndarray:
    shape = spec.shape
    i1, iN = shape[0], shape[-1]
    r = spec.rank
    if r is None or not 1 <= r <= min(i1, iN):
        raise ValueError(f"rank must be in 1..{min(i1, iN)}")
    mids = shape[1:-1]
    b = prod(mids) if mids else 1
    q1 = np.linalg.qr(rng.standard_normal((b, i1, r)))[0]
    q2 = np.linalg.qr(rng.standard_normal((b, iN, r)))[0]
    sig = np.sort(rng.uniform(1.0, 2.0, size=(b, r)), axis=1)[:, ::-1]
    abar = np.matmul(q1 * sig[:, None, :], q2.swapaxes(-1, -2))
    abar = np.ascontiguousarray(np.moveaxis(abar, 0, 1)).reshape(shape)
    return from_transform(abar, ProductKind.TC)


def _gen_blobs(spec: SyntheticSpec, rng):
    shape = spec.shape
    c = spec.clusters
    n = shape[-1]
    if c is None or not 1 <= c <= n:
        raise ValueError(f"cluster count must be in 1..{n}")
    labels = np.arange(n) % c
    centers = spec.separation * rng.standard_normal((c,) + shape[:-1])
    data = rng.standard_normal(shape)
    data += np.moveaxis(centers[labels], 0, -1)
    return np.ascontiguousarray(data), labels


def gen_synthetic(spec: SyntheticSpec):
    """Generate (tensor, labels); labels are None except for blobs."""
    shape = tuple(int(n) for n in spec.shape)
    if len(shape) < 2 or any(n < 1 for n in shape):
        raise ValueError(f"invalid shape {shape}")
    spec = SyntheticSpec(shape=shape, kind=spec.kind, seed=spec.seed,
                         rank=spec.rank, clusters=spec.clusters,
                         separation=spec.separation)
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "gaussian":
        return rng.standard_normal(shape), None
    if spec.kind == "low_tubal_rank":
        return _gen_low_tubal_rank(spec, rng), None
    if spec.kind == "blobs":
        return _gen_blobs(spec, rng)
    raise ValueError(f"unknown synthetic kind {spec.kind!r}")
