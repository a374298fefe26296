"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run `pytest tests/test_acceptance.py -s` to see every line.  Criterion 8
is a soft criterion (hardware-dependent timing trend): a reversal prints
SOFT FAIL and a note instead of failing the suite.
"""

import statistics
import time

import numpy as np

from conftest import digits_idx_split
from tprod import apps, core, decomp, io, oracle, products, transforms
from tprod.products import ProductKind

TOL_ORACLE = 1e-10
TOL_PROPS = 1e-9


def _report(num: int, ok: bool, detail: str, soft: bool = False) -> bool:
    status = "PASS" if ok else ("SOFT FAIL (investigate)" if soft else "FAIL")
    print(f"criterion {num:2d}: {status} — {detail}")
    return ok


def test_criterion_1_diagonalization():
    rng = np.random.default_rng(1001)
    t0 = time.monotonic()
    worst = 0.0
    sizes = list(range(2, 33))
    for case in range(200):
        n = sizes[case % len(sizes)]
        a = rng.standard_normal(n)
        b = transforms.dct_basis(n)
        lam = b.c @ oracle.build_th(a).dense @ b.cinv
        diag = b.c @ transforms.gamma_apply(transforms.GammaOperator(n), a)
        worst = max(worst, float(np.max(np.abs(lam - np.diag(diag)))))
    elapsed = time.monotonic() - t0
    ok = worst < 1e-10 and elapsed < 5.0
    assert _report(1, ok, f"max |C Th(a) C^-1 - diag(C Gamma a)| = {worst:.2e}, {elapsed:.2f}s")


def _random_conformable(rng, order):
    dims = rng.integers(1, 6, size=order + 1)
    mids = tuple(int(d) for d in dims[1:order - 1])
    a = rng.standard_normal((int(dims[0]),) + mids + (int(dims[order - 1]),))
    x = rng.standard_normal((int(dims[order - 1]),) + mids + (int(dims[order]),))
    return a, x


def test_criterion_2_fast_oracle_equivalence():
    rng = np.random.default_rng(1002)
    t0 = time.monotonic()
    worst = 0.0
    for order in (3, 4):
        for _ in range(20):
            a, x = _random_conformable(rng, order)
            worst = max(worst, products.relative_error(
                oracle.oracle_tproduct(a, x), products.tproduct(a, x)))
            worst = max(worst, products.relative_error(
                oracle.oracle_tcproduct(a, x), products.tcproduct(a, x)))
    elapsed = time.monotonic() - t0
    ok = worst < TOL_ORACLE and elapsed < 30.0
    assert _report(2, ok, f"20+20 instances, both products, max rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_block_circulant_cross_check():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for _ in range(10):
        dims = rng.integers(1, 6, size=4)
        a = rng.standard_normal((int(dims[0]), int(dims[1]), int(dims[2])))
        x = rng.standard_normal((int(dims[2]), int(dims[1]), int(dims[3])))
        worst = max(worst, products.relative_error(
            oracle.block_circulant_product(a, x), products.tproduct(a, x)))
    ok = worst < TOL_ORACLE
    assert _report(3, ok, f"10 instances vs unfolded block-circulant matrix, max rel err {worst:.2e}")


def test_criterion_4_exact_reconstruction():
    rng = np.random.default_rng(1004)
    worst = 0.0
    for shape in ((6, 5), (4, 3, 5), (3, 2, 4, 5)):
        a = rng.standard_normal(shape)
        for fn in (decomp.tcsvd, decomp.tsvd):
            worst = max(worst, products.relative_error(a, decomp.reconstruct(fn(a))))
    m = rng.standard_normal((7, 5))
    ref = np.linalg.svd(m, compute_uv=False)
    sv_dev = max(
        float(np.max(np.abs(decomp.slice_singular_values(decomp.tcsvd(m)) - ref))),
        float(np.max(np.abs(decomp.slice_singular_values(decomp.tsvd(m)) - ref))),
    )
    ok = worst < 1e-10 and sv_dev < 1e-10
    assert _report(4, ok, f"orders 2/3/4 both kinds: max rel err {worst:.2e}; "
                          f"order-2 singular values vs reference {sv_dev:.2e}")


def test_criterion_5_orthogonality_and_diagonality():
    rng = np.random.default_rng(1005)
    worst_orth = 0.0
    worst_diag = 0.0
    for shape in ((4, 3, 5), (3, 4, 2, 4)):
        a = rng.standard_normal(shape)
        for fn, tr in ((decomp.tcsvd, core.tc_transpose), (decomp.tsvd, core.t_transpose)):
            f = fn(a)
            e_u = products.identity_tensor(f.kind, f.u.shape[-1], f.middle)
            e_v = products.identity_tensor(f.kind, f.v.shape[-1], f.middle)
            worst_orth = max(worst_orth,
                             float(np.max(np.abs(products.product(f.kind, tr(f.u), f.u) - e_u))),
                             float(np.max(np.abs(products.product(f.kind, tr(f.v), f.v) - e_v))))
            off = f.s.copy()
            for i in range(min(off.shape[0], off.shape[-1])):
                off[(i,) + (slice(None),) * (off.ndim - 2) + (i,)] = 0.0
            worst_diag = max(worst_diag,
                             float(np.max(np.abs(off))) / max(float(np.linalg.norm(f.s)), 1.0))
    ok = worst_orth < 1e-9 and worst_diag < 1e-10
    assert _report(5, ok, f"U'U=E / V'V=E dev {worst_orth:.2e}; "
                          f"{{1,N}}-diagonal residue {worst_diag:.2e}")


def test_criterion_6_low_rank_error_collapse():
    t0 = time.monotonic()
    spec = io.SyntheticSpec(shape=(100, 500, 100), kind="low_tubal_rank", seed=1006, rank=100)
    a, _ = io.gen_synthetic(spec)
    f = decomp.tcsvd(a, full_matrices=False)
    err_full = products.relative_error(a, decomp.reconstruct(decomp.truncate(f, 100)))
    err_half = products.relative_error(a, decomp.reconstruct(decomp.truncate(f, 50)))
    elapsed = time.monotonic() - t0
    ok = err_full < 1e-8 and err_half > 1e-3 and elapsed < 60.0
    assert _report(6, ok, f"100x500x100 per-slice rank 100: err(k=100)={err_full:.2e}, "
                          f"err(k=50)={err_half:.2e}, {elapsed:.1f}s")


def test_criterion_7_storage_accounting():
    rng = np.random.default_rng(1007)
    a = rng.standard_normal((100, 40, 100))
    ok = True
    tc = apps.compress(a, kind="tc", layout="sfd", l=10, k=5)
    t = apps.compress(a, kind="t", layout="sfd", l=10, k=5)
    ok &= tc.payload_bytes == 80_000
    ok &= t.payload_bytes == 160_000
    for l, k in ((10, 5), (5, 3), (20, 10), (2, 1), (15, 8)):
        sfd_tc = apps.compress(a, kind="tc", layout="sfd", l=l, k=k)
        sfd_t = apps.compress(a, kind="t", layout="sfd", l=l, k=k)
        ok &= sfd_tc.payload_bytes == (100 + 100) * l * k * 8
        ok &= sfd_t.payload_bytes == 2 * (100 + 100) * l * k * 8
        ok &= sfd_t.payload_bytes == 2 * sfd_tc.payload_bytes
        for kind in ("tc", "t"):
            smd = apps.compress(a, kind=kind, layout="smd", l=l, k=k)
            ok &= smd.payload_bytes == (100 + 100) * 40 * k * 8
    assert _report(7, bool(ok), "SFD tc 80,000 B / SFD t 160,000 B at (10,5); "
                                "5 (l,k) pairs match the value-count formulas")


def _median_seconds(fn, repeats=5):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def test_criterion_8_timing_trend():
    k = 8
    results = []
    for n in (64, 100):
        a = np.random.default_rng(1008).standard_normal((n, n, n))
        tc = _median_seconds(lambda: decomp.truncate(decomp.tcsvd(a, full_matrices=False), k))
        t = _median_seconds(lambda: decomp.truncate(decomp.tsvd(a, full_matrices=False), k))
        results.append((n, tc, t))
    ok = all(tc <= t for _, tc, t in results)
    detail = "; ".join(f"{n}^3: tcsvd {tc:.3f}s vs tsvd {t:.3f}s (x{t / tc:.2f})"
                       for n, tc, t in results)
    _report(8, ok, detail, soft=True)
    if not ok:
        print("criterion  8: note — hardware-dependent soft criterion; "
              "investigate BLAS threading and FFT plan caching before judging")
    assert all(tc > 0 and t > 0 for _, tc, t in results)


def test_criterion_9_classification_parity(tmp_path):
    t0 = time.monotonic()
    paths = digits_idx_split(tmp_path, n_train=1000, n_test=200, seed=42)
    train, train_labels = io.read_idx(*paths["train"])
    test, test_labels = io.read_idx(*paths["test"])
    k = 6
    acc = {}
    for kind in ("tc", "t"):
        model = apps.classifier_fit(train, train_labels, k, kind=kind)
        acc[kind] = float(np.mean(apps.classifier_predict(model, test) == test_labels))
    tr = train.reshape(-1, train.shape[-1])
    te = test.reshape(-1, test.shape[-1])
    d2 = (np.sum(tr * tr, axis=0)[:, None] + np.sum(te * te, axis=0)[None, :]
          - 2.0 * tr.T @ te)
    baseline = float(np.mean(train_labels[np.argmin(d2, axis=0)] == test_labels))
    elapsed = time.monotonic() - t0
    ok = (abs(acc["tc"] - acc["t"]) <= 0.02
          and acc["tc"] >= baseline - 0.05
          and acc["t"] >= baseline - 0.05
          and elapsed < 300.0)
    assert _report(9, ok, f"digits IDX 1000/200 at k={k}: tc {acc['tc']:.4f}, t {acc['t']:.4f}, "
                          f"raw 1NN {baseline:.4f}, {elapsed:.1f}s")


def test_criterion_10_clustering_sanity():
    spec = io.SyntheticSpec(shape=(6, 4, 80), kind="blobs", seed=1010, clusters=2,
                            separation=8.0)
    a, truth = io.gen_synthetic(spec)
    feats = apps.extract_features(a, (3, 2))
    score = apps.nmi(apps.kmeans(feats, 2, seed=1), truth)
    x = np.array([0, 0, 1, 1, 2, 2])
    y = np.array([1, 0, 0, 1, 2, 2])
    props = (apps.nmi(x, x) == 1.0
             and abs(apps.nmi(x, y) - apps.nmi(y, x)) < 1e-12
             and abs(apps.nmi(x, np.array([5, 5, 9, 9, 7, 7])) - 1.0) < 1e-12
             and apps.nmi(x, np.zeros_like(x)) == 0.0)
    ok = score > 0.9 and props
    assert _report(10, ok, f"2-blob NMI {score:.3f}; symmetry/permutation/identity properties hold")


def test_criterion_11_property_suites():
    rng = np.random.default_rng(1011)
    worst = {"assoc": 0.0, "bilin": 0.0, "ident": 0.0, "adjoint": 0.0, "energy": 0.0}
    for case in range(50):
        kind = ProductKind.T if case % 2 else ProductKind.TC
        prod = products.tproduct if kind is ProductKind.T else products.tcproduct

        dims = rng.integers(2, 5, size=4)
        mid = (int(rng.integers(2, 5)),)
        a = rng.standard_normal((int(dims[0]),) + mid + (int(dims[1]),))
        b = rng.standard_normal((int(dims[1]),) + mid + (int(dims[2]),))
        x = rng.standard_normal((int(dims[2]),) + mid + (int(dims[3]),))

        lhs = prod(prod(a, b), x)
        rhs = prod(a, prod(b, x))
        worst["assoc"] = max(worst["assoc"], float(np.max(np.abs(lhs - rhs))))

        a2 = rng.standard_normal(a.shape)
        al, be = float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))
        worst["bilin"] = max(worst["bilin"], float(np.max(np.abs(
            prod(al * a + be * a2, b) - al * prod(a, b) - be * prod(a2, b)))))

        e = products.identity_tensor(kind, a.shape[0], mid)
        worst["ident"] = max(worst["ident"], float(np.max(np.abs(prod(e, a) - a))))

        y = rng.standard_normal((a.shape[0],) + mid + (b.shape[-1],))
        lhs_adj = float(np.sum(products.tcproduct(a, b) * y))
        rhs_adj = float(np.sum(b * products.tcproduct(core.tc_transpose(a), y)))
        worst["adjoint"] = max(worst["adjoint"], abs(lhs_adj - rhs_adj))

        f = decomp.tcsvd(a) if kind is ProductKind.TC else decomp.tsvd(a)
        k = int(rng.integers(1, min(a.shape[0], a.shape[-1]) + 1))
        sv = decomp.slice_singular_values(f)
        abar = products.to_transform(a, kind)
        rbar = products.to_transform(decomp.reconstruct(decomp.truncate(f, k)), kind)
        err2 = float(np.sum(np.abs(abar - rbar) ** 2))
        pred = float(np.sum(sv[..., k:] ** 2))
        worst["energy"] = max(worst["energy"], abs(err2 - pred) / max(pred, 1.0))
    ok = all(v < TOL_PROPS for v in worst.values())
    assert _report(11, ok, "50-case suites: " + ", ".join(
        f"{name} {val:.2e}" for name, val in worst.items()))
