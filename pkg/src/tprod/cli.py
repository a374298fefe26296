"""Command-line interface: decomposition, compression, classification,
clustering, synthetic data generation, and a CSV benchmark harness.

Exit codes: 0 success, 1 user error (bad arguments, malformed files,
out-of-range parameters), 2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
import time

import numpy as np

from . import backend
from .apps import (
    classifier_fit,
    classifier_predict,
    compress,
    decompress,
    extract_features,
    kmeans,
    nmi,
    psnr,
)
from .core import frob
from .decomp import double_filter, reconstruct
from .io import FormatError, SyntheticSpec, gen_synthetic, read_archive, read_idx, read_tensor, write_archive, write_tensor
from .products import ProductKind, product

BENCH_COLUMNS = ("method", "shape", "k", "l", "seconds", "bytes", "psnr", "frob_error")


def _parse_shape(text: str) -> tuple:
    try:
        shape = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"bad shape {text!r} (expected e.g. 100x40x100)") from None
    if len(shape) < 2 or any(n < 1 for n in shape):
        raise ValueError(f"bad shape {text!r}")
    return shape


def _shape_str(shape) -> str:
    return "x".join(str(n) for n in shape)


def _emit_csv(rows, path=None):
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        writer.writerows(rows)
    finally:
        if path:
            fh.close()


def _median_seconds(fn, repeats: int = 5) -> float:
    fn()  # warm-up
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _decomp_row(a, kind: ProductKind, k: int, l: int | None, timed: bool):
    mids = a.shape[1:-1]
    l_eff = l if l is not None else (max(mids) if mids else 1)
    run = lambda: double_filter(a, l_eff, k, kind)  # noqa: E731
    seconds = _median_seconds(run) if timed else _once_seconds(run)
    rec = reconstruct(double_filter(a, l_eff, k, kind))
    ar = compress(a, kind=kind, layout="sfd", l=l_eff, k=k)
    peak = float(np.max(np.abs(a))) or 1.0
    method = "tsvd" if kind is ProductKind.T else "tcsvd"
    return [
        method,
        _shape_str(a.shape),
        k,
        l_eff,
        f"{seconds:.6f}",
        ar.payload_bytes,
        f"{psnr(a, rec, peak):.4f}",
        f"{frob(a - rec):.6e}",
    ]


def _once_seconds(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _cmd_gen(args) -> int:
    spec = SyntheticSpec(
        shape=_parse_shape(args.shape),
        kind=args.kind,
        seed=args.seed,
        rank=args.rank,
        clusters=args.clusters,
        separation=args.sep,
    )
    tensor, labels = gen_synthetic(spec)
    write_tensor(args.out, tensor)
    print(f"wrote {args.out} shape {_shape_str(tensor.shape)}")
    if labels is not None:
        labels_path = args.out + ".labels"
        with open(labels_path, "w") as fh:
            fh.writelines(f"{lab}\n" for lab in labels)
        print(f"wrote {labels_path}")
    return 0


def _cmd_decomp(args, kind: ProductKind) -> int:
    a = read_tensor(args.tensor)
    k = args.rank if args.rank is not None else min(a.shape[0], a.shape[-1])
    row = _decomp_row(a, kind, k, args.freq, timed=False)
    if args.csv:
        _emit_csv([row])
    else:
        print(
            f"{row[0]} shape={row[1]} k={row[2]} l={row[3]} seconds={row[4]} "
            f"sfd_bytes={row[5]} psnr={row[6]} frob_error={row[7]}"
        )
    return 0


def _cmd_compress(args) -> int:
    a = read_tensor(args.tensor)
    ar = compress(a, kind=ProductKind.parse(args.kind), layout=args.layout,
                  l=args.freq, k=args.rank)
    write_archive(args.out, ar)
    print(f"wrote {args.out} ({ar.byte_count} bytes, payload {ar.payload_bytes})")
    return 0


def _cmd_decompress(args) -> int:
    ar = read_archive(args.archive)
    write_tensor(args.out, decompress(ar))
    print(f"wrote {args.out} shape {_shape_str(ar.shape)}")
    return 0


def _cmd_psnr(args) -> int:
    ref = read_tensor(args.reference)
    test = read_tensor(args.test)
    peak = args.max if args.max is not None else float(np.max(np.abs(ref)))
    if peak <= 0:
        peak = 1.0
    print(f"{psnr(ref, test, peak)}")
    return 0


def _cmd_classify(args) -> int:
    train, train_labels = read_idx(args.train_images, args.train_labels)
    test, test_labels = read_idx(args.test_images, args.test_labels)
    model = classifier_fit(train, train_labels, args.rank, kind=ProductKind.parse(args.kind))
    pred = classifier_predict(model, test)
    acc = float(np.mean(pred == test_labels))
    print(f"accuracy {acc:.6f}")
    return 0


def _cmd_cluster(args) -> int:
    a = read_tensor(args.tensor)
    k1 = (args.rank, args.freq) if args.freq is not None else args.rank
    feats = extract_features(a, k1)
    assign = kmeans(feats, args.clusters, seed=args.seed)
    if args.labels:
        with open(args.labels) as fh:
            truth = np.array([int(line.strip()) for line in fh if line.strip()])
        if truth.size != assign.size:
            raise ValueError(f"{truth.size} labels for {assign.size} samples")
        print(f"nmi {nmi(assign, truth):.6f}")
    else:
        print(" ".join(str(int(c)) for c in assign))
    return 0


def _bench_backends(a, kind: ProductKind, rows) -> None:
    x = np.random.default_rng(1).standard_normal((a.shape[-1],) + a.shape[1:-1] + (a.shape[0],))
    for name in backend.available_backends():
        backend.set_backend(name)
        seconds = _median_seconds(lambda: product(kind, a, x))
        method = ("tprod" if kind is ProductKind.T else "tcprod") + "@" + name
        rows.append([method, _shape_str(a.shape), "", "", f"{seconds:.6f}", "", "", ""])


def _cmd_bench(args) -> int:
    spec = SyntheticSpec(shape=_parse_shape(args.shape), kind="gaussian", seed=args.seed)
    a, _ = gen_synthetic(spec)
    kinds = [ProductKind.T, ProductKind.TC] if args.kind == "both" else [ProductKind.parse(args.kind)]
    rows = []
    if args.backends:
        previous = backend.active_backend()
        try:
            for kind in kinds:
                _bench_backends(a, kind, rows)
        finally:
            backend.set_backend(previous)
    else:
        k = args.rank if args.rank is not None else min(a.shape[0], a.shape[-1])
        for kind in kinds:
            rows.append(_decomp_row(a, kind, k, args.freq, timed=True))
    _emit_csv(rows, args.csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tprod",
        description="Tensor-tensor products and decompositions via block convolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded synthetic tensor file")
    p.add_argument("--shape", required=True)
    p.add_argument("--kind", choices=["gaussian", "low_tubal_rank", "blobs"], default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", "-k", type=int, default=None)
    p.add_argument("--clusters", type=int, default=None)
    p.add_argument("--sep", type=float, default=10.0)
    p.add_argument("--out", required=True)

    for name, help_text in (("tcsvd", "cosine-transform decomposition summary"),
                            ("tsvd", "Fourier-transform decomposition summary")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("tensor")
        p.add_argument("--rank", "-k", type=int, default=None)
        p.add_argument("--freq", "-l", type=int, default=None)
        p.add_argument("--csv", action="store_true")

    p = sub.add_parser("compress", help="write a compressed factor archive")
    p.add_argument("tensor")
    p.add_argument("--rank", "-k", type=int, required=True)
    p.add_argument("--freq", "-l", type=int, default=None)
    p.add_argument("--kind", choices=["t", "tc"], default="tc")
    p.add_argument("--layout", choices=["sfd", "smd"], default="sfd")
    p.add_argument("--out", required=True)

    p = sub.add_parser("decompress", help="reconstruct a tensor from an archive")
    p.add_argument("archive")
    p.add_argument("--out", required=True)

    p = sub.add_parser("psnr", help="PSNR between two tensor files")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--max", type=float, default=None)

    p = sub.add_parser("classify", help="nearest-subspace classification on IDX data")
    p.add_argument("--train-images", required=True)
    p.add_argument("--train-labels", required=True)
    p.add_argument("--test-images", required=True)
    p.add_argument("--test-labels", required=True)
    p.add_argument("--rank", "-k", type=int, required=True)
    p.add_argument("--kind", choices=["t", "tc"], default="tc")

    p = sub.add_parser("cluster", help="k-means on reduced features; NMI if labels given")
    p.add_argument("tensor")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--rank", "-k", type=int, required=True)
    p.add_argument("--freq", "-l", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels", default=None)

    p = sub.add_parser("bench", help="benchmark decompositions (or kernel backends) to CSV")
    p.add_argument("--shape", required=True)
    p.add_argument("--kind", choices=["t", "tc", "both"], default="both")
    p.add_argument("--rank", "-k", type=int, default=None)
    p.add_argument("--freq", "-l", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="CSV output path (default stdout)")
    p.add_argument("--backends", action="store_true",
                   help="compare compiled vs numpy kernels on the products")

    return parser


_COMMANDS = {
    "gen": _cmd_gen,
    "tcsvd": lambda args: _cmd_decomp(args, ProductKind.TC),
    "tsvd": lambda args: _cmd_decomp(args, ProductKind.T),
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "psnr": _cmd_psnr,
    "classify": _cmd_classify,
    "cluster": _cmd_cluster,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FormatError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
