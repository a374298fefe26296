import numpy as np
import pytest

from tprod import core, decomp, products
from tprod.io import SyntheticSpec, gen_synthetic
from tprod.products import ProductKind

rng = np.random.default_rng(505)


def test_order2_reduces_to_matrix_svd():
    a = rng.standard_normal((4, 6))
    ref = np.linalg.svd(a, compute_uv=False)
    for fn in (decomp.tcsvd, decomp.tsvd):
        f = fn(a)
        sv = decomp.slice_singular_values(f)
        assert np.max(np.abs(sv - ref)) < 1e-10
        assert products.relative_error(a, decomp.reconstruct(f)) < 1e-10


def test_zero_tensor():
    a = np.zeros((3, 4, 5))
    f = decomp.tcsvd(a)
    assert np.max(np.abs(f.s)) == 0.0
    assert np.max(np.abs(decomp.reconstruct(f))) < 1e-14


def test_exact_reconstruction_orders_2_3_4():
    for shape in ((5, 4), (4, 3, 5), (3, 2, 4, 5)):
        a = rng.standard_normal(shape)
        for fn in (decomp.tcsvd, decomp.tsvd):
            f = fn(a)
            assert products.relative_error(a, decomp.reconstruct(f)) < 1e-10
            assert f.u.dtype == np.float64  # spatial factors are real


def test_orthogonality_both_kinds():
    a = rng.standard_normal((4, 3, 5))
    for fn, tr in ((decomp.tcsvd, core.tc_transpose), (decomp.tsvd, core.t_transpose)):
        f = fn(a)
        e_u = products.identity_tensor(f.kind, f.u.shape[-1], f.middle)
        e_v = products.identity_tensor(f.kind, f.v.shape[-1], f.middle)
        assert np.max(np.abs(products.product(f.kind, tr(f.u), f.u) - e_u)) < 1e-9
        assert np.max(np.abs(products.product(f.kind, tr(f.v), f.v) - e_v)) < 1e-9


def test_spatial_s_is_first_last_diagonal():
    a = rng.standard_normal((4, 3, 6))
    for fn in (decomp.tcsvd, decomp.tsvd):
        s = fn(a).s
        off = s.copy()
        for i in range(min(s.shape[0], s.shape[-1])):
            off[i, :, i] = 0.0
        assert np.max(np.abs(off)) < 1e-10 * max(np.linalg.norm(s), 1.0)


def test_transform_s_nonincreasing_nonnegative():
    a = rng.standard_normal((5, 4, 6))
    sv = decomp.slice_singular_values(decomp.tcsvd(a))
    assert np.all(sv >= 0)
    assert np.all(np.diff(sv, axis=-1) <= 1e-12)


def test_transform_slices_orthonormal():
    a = rng.standard_normal((4, 3, 5))
    f = decomp.to_domain(decomp.tcsvd(a), "transform")
    for i in range(3):
        u = f.u[:, i, :]
        v = f.v[:, i, :]
        assert np.max(np.abs(u.T @ u - np.eye(4))) < 1e-10
        assert np.max(np.abs(v.T @ v - np.eye(5))) < 1e-10


def test_middle_constant_tensor_single_frequency():
    base = rng.standard_normal((4, 1, 5))
    a = np.ascontiguousarray(np.broadcast_to(base, (4, 6, 5)))
    sv = decomp.slice_singular_values(decomp.tsvd(a))
    assert np.max(sv[1:]) < 1e-10  # only the zero-frequency slice survives
    assert np.max(sv[0]) > 0


def test_truncate_full_rank_unchanged():
    a = rng.standard_normal((4, 3, 5))
    f = decomp.tcsvd(a)
    fk = decomp.truncate(f, 4)
    assert products.relative_error(a, decomp.reconstruct(fk)) < 1e-10
    assert fk.trunc_k == 4


def test_truncate_low_rank_generator():
    spec = SyntheticSpec(shape=(6, 5, 7), kind="low_tubal_rank", seed=9, rank=3)
    a, _ = gen_synthetic(spec)
    f = decomp.tcsvd(a)
    fk = decomp.truncate(f, 3)
    assert products.relative_error(a, decomp.reconstruct(fk)) < 1e-8


def test_truncate_rank1_slice_exact():
    # singular values (3, 0, 0): the slice reconstructs exactly at k=1
    q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    slice_ = 3.0 * np.outer(q[:, 0], q[:, 0])
    a = products.from_transform(slice_.reshape(3, 1, 3), ProductKind.TC)
    fk = decomp.truncate(decomp.tcsvd(a), 1)
    assert products.relative_error(a, decomp.reconstruct(fk)) < 1e-10


def test_truncation_energy_identity_and_monotonicity():
    a = rng.standard_normal((6, 5, 7))
    f = decomp.tcsvd(a)
    sv = decomp.slice_singular_values(f)
    abar = products.to_transform(a, ProductKind.TC)
    errors = []
    for k in range(1, 7):
        rbar = products.to_transform(decomp.reconstruct(decomp.truncate(f, k)), ProductKind.TC)
        err2 = float(np.sum((abar - rbar) ** 2))
        pred = float(np.sum(sv[..., k:] ** 2))
        assert abs(err2 - pred) <= 1e-9 * max(pred, 1.0)
        errors.append(err2)
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(errors, errors[1:]))


def test_truncation_per_slice_optimality():
    a = rng.standard_normal((5, 4, 6))
    f = decomp.to_domain(decomp.truncate(decomp.tcsvd(a), 2), "transform")
    abar = products.to_transform(a, ProductKind.TC)
    for i in range(4):
        kept = f.u[:, i, :] @ f.s[:, i, :] @ f.v[:, i, :].T
        u, s, vh = np.linalg.svd(abar[:, i, :])
        best = (u[:, :2] * s[:2]) @ vh[:2]
        assert np.max(np.abs(kept - best)) < 1e-10


def test_truncate_out_of_range():
    f = decomp.tcsvd(rng.standard_normal((4, 3, 5)))
    with pytest.raises(ValueError):
        decomp.truncate(f, 0)
    with pytest.raises(ValueError):
        decomp.truncate(f, 5)


def test_double_filter_no_filtering_is_exact():
    a = rng.standard_normal((4, 5, 4))
    for kind in (ProductKind.TC, ProductKind.T):
        f = decomp.double_filter(a, l=5, k=4, kind=kind)
        assert f.domain == "transform"
        assert products.relative_error(a, decomp.reconstruct(f)) < 1e-10


def test_double_filter_constant_middle_lossless_at_any_cutoff():
    base = rng.standard_normal((4, 1, 5))
    a = np.ascontiguousarray(np.broadcast_to(base, (4, 6, 5)))
    f = decomp.double_filter(a, l=1, k=4, kind=ProductKind.TC)
    assert products.relative_error(a, decomp.reconstruct(f)) < 1e-10


def test_double_filter_energy_bookkeeping():
    a = rng.standard_normal((8, 8, 8))
    l, k = 4, 4
    f = decomp.double_filter(a, l=l, k=k, kind=ProductKind.TC)
    abar = products.to_transform(a, ProductKind.TC)
    rbar = products.to_transform(decomp.reconstruct(f), ProductKind.TC)
    err2 = float(np.sum((abar - rbar) ** 2))
    dropped = float(np.sum(abar[:, l:, :] ** 2))
    sv = np.linalg.svd(np.moveaxis(abar[:, :l, :], 1, 0), compute_uv=False)
    dropped += float(np.sum(sv[:, k:] ** 2))
    assert abs(err2 - dropped) <= 1e-9 * max(dropped, 1.0)


def test_double_filter_validation():
    a = rng.standard_normal((4, 5, 4))
    with pytest.raises(ValueError):
        decomp.double_filter(a, l=0, k=2)
    with pytest.raises(ValueError):
        decomp.double_filter(a, l=6, k=2)
    with pytest.raises(ValueError):
        decomp.double_filter(a, l=2, k=5)


def test_reconstruct_identity_factors():
    e = products.identity_tensor(ProductKind.TC, 3, (4,))
    f = decomp.TcFactors(kind=ProductKind.TC, u=e, s=e, v=e, domain="spatial")
    assert np.max(np.abs(decomp.reconstruct(f) - e)) < 1e-10


def test_reconstruct_domain_paths_agree():
    a = rng.standard_normal((4, 3, 2, 5))
    for fn in (decomp.tcsvd, decomp.tsvd):
        f = fn(a)
        spatial = decomp.reconstruct(f)
        transform = decomp.reconstruct(decomp.to_domain(f, "transform"))
        assert np.max(np.abs(spatial - transform)) < 1e-10


def test_to_domain_roundtrip():
    a = rng.standard_normal((4, 3, 5))
    for fn in (decomp.tcsvd, decomp.tsvd):
        f = fn(a)
        back = decomp.to_domain(decomp.to_domain(f, "transform"), "spatial")
        assert np.max(np.abs(back.u - f.u)) < 1e-10
        assert np.max(np.abs(back.s - f.s)) < 1e-10
        assert np.max(np.abs(back.v - f.v)) < 1e-10


def test_determinism():
    a = rng.standard_normal((4, 3, 5))
    f1 = decomp.tcsvd(a)
    f2 = decomp.tcsvd(a.copy())
    assert f1.u.tobytes() == f2.u.tobytes()
    assert f1.s.tobytes() == f2.s.tobytes()
    assert f1.v.tobytes() == f2.v.tobytes()
