import numpy as np
import pytest

from phg.errors import RankDeficient, ShapeError, UsageError
from phg.kernels import (BACKEND_ENV, BACKEND_NAMES, FALLBACK_BLOCKED, QrFactor, batched_qr,
                         elementwise_exp, gemm, get_backend, qr_arrays)

ALL = list(BACKEND_NAMES) + [FALLBACK_BLOCKED.name]


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture(params=ALL)
def backend(request):
    return get_backend(request.param)


def test_gemm_identity(backend):
    X = crandn(np.random.default_rng(0), 3, 3)
    assert np.array_equal(gemm(np.eye(3), X, backend), X)


def test_gemm_complex_arithmetic(backend):
    out = gemm(np.array([[1, 1j], [0, 1]]), np.array([[1], [1j]]), backend)
    assert np.allclose(out, [[0], [1j]], atol=0)


def test_gemm_matches_reference_large(backend):
    rng = np.random.default_rng(1)
    a, b = crandn(rng, 600, 50), crandn(rng, 50, 70)
    assert np.allclose(gemm(a, b, backend), a @ b, rtol=1e-13, atol=1e-12)


def test_gemm_read_only_inputs(backend):
    a = np.ones((4, 3), dtype=complex)
    b = np.ones((3, 2), dtype=complex)
    a.flags.writeable = b.flags.writeable = False
    assert np.allclose(gemm(a, b, backend), 3)


def test_gemm_shape_mismatch():
    with pytest.raises(ShapeError):
        gemm(np.ones((2, 3)), np.ones((2, 3)))


def test_exp_examples(backend):
    assert np.array_equal(elementwise_exp(np.zeros((2, 3)), backend), np.ones((2, 3)))
    assert abs(elementwise_exp(np.array([[1j * np.pi]]), backend)[0, 0] + 1) <= 1e-15


def test_monomials_match(backend):
    rng = np.random.default_rng(2)
    Z = crandn(rng, 20, 4) * 0.5
    A = rng.integers(-3, 4, size=(4, 9)).astype(float)
    assert np.allclose(backend.monomials(Z, A), np.exp(Z @ A), rtol=1e-13)


def test_qr_triangular_input(backend):
    (f,) = batched_qr([np.array([[1], [0], [0]], dtype=complex)], backend=backend)
    assert isinstance(f, QrFactor)
    assert np.allclose(np.abs(f.r), [[1]])
    assert np.allclose(np.abs(f.q), np.eye(3))


def test_qr_canonical_embedding(backend):
    N = 4
    a = np.vstack([np.eye(N), np.zeros((2, N))])
    (f,) = batched_qr([a], backend=backend)
    assert np.allclose(np.abs(f.r), np.eye(N))
    tail = f.q[:, N:]
    assert np.allclose(tail[:N], 0) and np.allclose(np.abs(np.linalg.det(tail[N:])), 1)


@pytest.mark.parametrize("shape", [(6, 4), (17, 15), (5, 5), (30, 2)])
def test_qr_reconstructs(backend, shape):
    rng = np.random.default_rng(3)
    batch = crandn(rng, 7, *shape)
    q, r, mind, bad = qr_arrays(batch, backend=backend)
    M, K = shape
    assert np.all(bad == -1)
    assert np.allclose(np.triu(r), r)
    recon = q[:, :, :K] @ r
    assert np.allclose(recon, batch, atol=1e-13 * np.abs(batch).max())
    eye = np.eye(M)
    assert np.allclose(q.conj().transpose(0, 2, 1) @ q, eye, atol=1e-13)


def test_qr_backends_agree():
    rng = np.random.default_rng(4)
    batch = crandn(rng, 50, 17, 15)
    ref = qr_arrays(batch, backend="reference")
    for name in ALL[1:]:
        q, r, _, _ = qr_arrays(batch, backend=name)
        # Householder QR is unique up to unit phases on the diagonal.
        ph = np.diagonal(r, axis1=1, axis2=2) / np.diagonal(ref[1], axis1=1, axis2=2)
        assert np.allclose(np.abs(ph), 1)
        assert np.allclose(r, ref[1] * ph[:, :, None], atol=1e-12)


def test_qr_rank_deficiency_isolated(backend):
    rng = np.random.default_rng(5)
    good = crandn(rng, 8, 3)
    bad = good.copy()
    bad[:, 2] = bad[:, 0] + 2 * bad[:, 1]
    out = batched_qr([good, bad, good], backend=backend)
    assert isinstance(out[0], QrFactor) and isinstance(out[2], QrFactor)
    assert isinstance(out[1], RankDeficient) and out[1].column == 2 and out[1].index == 1
    assert np.array_equal(out[0].r, out[2].r)


def test_qr_batch_independent(backend):
    rng = np.random.default_rng(6)
    batch = crandn(rng, 9, 10, 8)
    q, r, _, _ = qr_arrays(batch, backend=backend)
    for i in (0, 4, 8):
        qi, ri, _, _ = qr_arrays(batch[i:i + 1], backend=backend)
        assert np.array_equal(qi[0], q[i]) and np.array_equal(ri[0], r[i])


def test_qr_shape_errors():
    with pytest.raises(ShapeError):
        qr_arrays(np.ones((2, 3, 5)))
    with pytest.raises(ShapeError):
        batched_qr([np.ones((4, 2)), np.ones((4, 3))])
    assert batched_qr([]) == []


def test_unknown_backend():
    with pytest.raises(UsageError):
        get_backend("nope")


def test_env_default(monkeypatch):
    monkeypatch.setenv(BACKEND_ENV, "external")
    assert get_backend().name == "external"
    monkeypatch.delenv(BACKEND_ENV)
    assert get_backend().name == "reference"
