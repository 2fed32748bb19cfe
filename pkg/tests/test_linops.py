import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflectpos import linops
from reflectpos.errors import NotHermitian, NotPsd, OutsideDisk, SingularMetric
from reflectpos.hardy import FourierTruncation
from reflectpos.hankel import MomentMeasure, moment_matrices

from conftest import cgauss

seeds = st.integers(0, 2**32 - 1)


def random_pd(rng, n):
    A = cgauss(rng, n, n)
    return A @ A.conj().T + 0.5 * np.eye(n)


def test_adjoint_identity_metric(rng):
    A = cgauss(rng, 3, 3)
    assert np.allclose(linops.adjoint_wrt(A, np.eye(3)), A.conj().T)


def test_adjoint_diagonal():
    out = linops.adjoint_wrt(np.diag([2.0, 3.0]), np.diag([1.0, 4.0]))
    assert np.allclose(out, np.diag([2.0, 3.0]))


def test_adjoint_bilinear(rng):
    A = cgauss(rng, 4, 4)
    G = random_pd(rng, 4)
    Ad = linops.adjoint_wrt(A, G)
    for _ in range(20):
        x, y = cgauss(rng, 4), cgauss(rng, 4)
        assert abs(np.vdot(x, G @ A @ y) - np.vdot(Ad @ x, G @ y)) <= 1e-10 * np.linalg.norm(G) * np.linalg.norm(A) * 10


def test_adjoint_singular_metric():
    with pytest.raises(SingularMetric):
        linops.adjoint_wrt(np.eye(2), np.diag([1.0, 0.0]))


@given(seeds)
def test_adjoint_involution(seed):
    rng = np.random.default_rng(seed)
    A = cgauss(rng, 4, 4)
    G = random_pd(rng, 4)
    back = linops.adjoint_wrt(linops.adjoint_wrt(A, G), G)
    assert np.linalg.norm(back - A) <= 1e-12 * np.linalg.cond(G) * max(1, np.linalg.norm(A))


def test_period2_block():
    J = np.diag([1.0, 1.0, -1.0, -1.0])
    assert linops.is_period2_unitary(J).ok


def test_period2_index_negation():
    assert linops.is_period2_unitary(FourierTruncation(5).j).ok


def test_period2_not_unitary():
    rep = linops.is_period2_unitary(np.array([[1.0, 1.0], [0.0, -1.0]]))
    assert rep.r_sq == 0.0
    assert not rep.ok and rep.r_unit > 0.1


def test_psd_rank_one():
    rep = linops.psd_check(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert rep.is_psd and abs(rep.min_eig) < 1e-15


def test_psd_infeasible_pick():
    assert not linops.psd_check(np.array([[1.0, 1.0], [1.0, 0.25333]])).is_psd


def test_psd_hankel_atoms():
    M, _ = moment_matrices(MomentMeasure.from_atoms([[0.5, 0.5], [-0.5, 0.5]]), 4)
    assert linops.psd_check(M).is_psd


def test_psd_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        linops.psd_check(np.array([[1.0, 2.0], [0.0, 1.0]]))


@given(seeds)
def test_psd_unitary_congruence(seed):
    rng = np.random.default_rng(seed)
    B = cgauss(rng, 4, 4)
    M = B + B.conj().T
    Q, _ = np.linalg.qr(cgauss(rng, 4, 4))
    assert linops.psd_check(M).is_psd == linops.psd_check(Q.conj().T @ M @ Q).is_psd


def test_spectral_radius_examples():
    assert linops.spectral_radius(linops.truncated_shift(6)) == 0.0
    C = np.roll(np.eye(5), 1, axis=0)
    assert abs(linops.spectral_radius(C) - 1) < 1e-12
    D = np.diag(2.0 ** (-0.5 - 2 * np.arange(6)))
    assert abs(linops.spectral_radius(D) - 0.7071067811865476) < 1e-15


@given(seeds, st.booleans())
def test_spectral_radius_square_normal(seed, hermitian):
    rng = np.random.default_rng(seed)
    B = cgauss(rng, 5, 5)
    A = B + B.conj().T if hermitian else np.linalg.qr(B)[0]
    r = linops.spectral_radius(A)
    assert abs(linops.spectral_radius(A @ A) - r * r) <= 1e-9 * max(1, r * r)


def test_hermitian_sqrt_examples():
    assert np.allclose(linops.hermitian_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert np.allclose(linops.hermitian_sqrt(np.zeros((3, 3))), 0)


def test_hermitian_sqrt_rejects_negative():
    with pytest.raises(NotPsd):
        linops.hermitian_sqrt(np.diag([1.0, -1.0]))


@given(seeds)
def test_hermitian_sqrt_contraction_defect(seed):
    rng = np.random.default_rng(seed)
    L = cgauss(rng, 4, 4)
    L /= np.linalg.norm(L, 2) * 1.01
    M = np.eye(4) - L.conj().T @ L
    R = linops.hermitian_sqrt(M)
    assert np.linalg.norm(R @ R - M) <= 1e-10 * max(1, np.linalg.norm(M))
    assert np.linalg.norm(R @ M - M @ R) <= 1e-9 * np.linalg.norm(M) ** 2


def test_shift_eigenvector_z0():
    V = linops.truncated_shift(16)
    e0 = np.eye(16)[:, 0]
    f = linops.shift_eigenvector(V, e0, 0.0, 16)
    assert np.allclose(f, e0)


def test_shift_eigenvector_geometric():
    V = linops.truncated_shift(16)
    e0 = np.eye(16)[:, 0]
    f = linops.shift_eigenvector(V, e0, 0.5, 16)
    resid = np.linalg.norm(V.T @ f - 0.5 * f)
    assert resid <= 0.5**16 * (1 + 1e-10)
    assert abs(np.vdot(f, f).real - 4 / 3) <= 1e-8


def test_shift_eigenvector_z09():
    V = linops.truncated_shift(64)
    f = linops.shift_eigenvector(V, np.eye(64)[:, 0], 0.9, 64)
    assert abs(np.vdot(f, f).real - 1 / (1 - 0.81)) <= 1e-3


def test_shift_eigenvector_outside_disk():
    with pytest.raises(OutsideDisk):
        linops.shift_eigenvector(linops.truncated_shift(4), np.eye(4)[:, 0], 1.0, 4)


def test_purity_decay_hardy():
    ft = FourierTruncation(6)
    P = np.diag((np.arange(ft.dim) >= ft.n).astype(float))
    seq = linops.purity_decay(ft.u, P, ft.basis(0), 4)
    assert seq[0] == 1.0 and np.all(seq[1:] == 0.0)


def test_purity_decay_diagonal():
    S = np.diag(2.0 ** (-0.5 - 2 * np.arange(8)))
    phi = np.eye(8)[:, 0]
    seq = linops.purity_decay(S, np.eye(8), phi, 10)
    assert np.allclose(seq, 2.0 ** (-0.5 * np.arange(11)), rtol=1e-14)


def test_purity_decay_unitary(rng):
    Q, _ = np.linalg.qr(cgauss(rng, 5, 5))
    phi = cgauss(rng, 5)
    seq = linops.purity_decay(Q, np.eye(5), phi, 6)
    assert np.allclose(seq, np.linalg.norm(phi), rtol=1e-12)


def test_inner_product_space_validation():
    with pytest.raises(NotHermitian):
        linops.InnerProductSpace(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(SingularMetric):
        linops.InnerProductSpace(np.diag([1.0, 0.0]))
    sp = linops.InnerProductSpace(np.diag([1.0, 0.0]), metric_pd=False)
    assert sp.dim == 2 and sp.norm([0, 1]) == 0.0
