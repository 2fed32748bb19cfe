import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflectpos import graphspace as gs
from reflectpos import hardy
from reflectpos.errors import NotClassifiable, NotContractive, NotDissipative, NotPositive
from reflectpos.hankel import HankelSymbol, MomentMeasure, dissipativity_check, hankel_matrix

from conftest import cgauss

seeds = st.integers(0, 2**32 - 1)


def J_of(p, q):
    return np.diag(np.r_[np.ones(p), -np.ones(q)])


def test_decompose_h_plus():
    _, lam = gs.decompose_positive_subspace(np.eye(4)[:, :2], J_of(2, 2))
    assert np.allclose(lam.lam, 0)


def test_decompose_isotropic_graph():
    C = np.vstack([np.eye(2), np.eye(2)])
    _, lam = gs.decompose_positive_subspace(C, J_of(2, 2))
    assert abs(lam.norm - 1) < 1e-12
    assert np.allclose(gs.graph_of(lam).j_form(J_of(2, 2)), 0, atol=1e-12)


def test_decompose_hardy_half_z():
    n = 8
    b = hardy.BoundedSymbol(np.array([0, 0.5]))
    ft = hardy.FourierTruncation(n)
    _, lam = gs.decompose_positive_subspace(hardy.kb_subspace(b, n), ft.j)
    assert lam.norm <= 0.5 * (1 + 1e-10)


def test_decompose_errors():
    with pytest.raises(NotPositive):
        gs.decompose_positive_subspace(np.eye(4)[:, 2:], J_of(2, 2))


def test_graph_examples():
    z = gs.graph_of(gs.Contraction.from_matrix(np.zeros((2, 2))))
    assert np.allclose(z.basis, np.vstack([np.eye(2), np.zeros((2, 2))]))
    half = gs.graph_of(gs.Contraction.from_matrix(0.5 * np.eye(2)))
    assert np.allclose(half.j_form(J_of(2, 2)), 0.75 * np.eye(2))


def test_graph_near_isotropic(rng):
    X, _ = np.linalg.qr(cgauss(rng, 3, 3))
    Y, _ = np.linalg.qr(cgauss(rng, 3, 3))
    L = X @ np.diag([0.99, 0.5, 0.1]) @ Y.conj().T
    M = gs.graph_of(gs.Contraction.from_matrix(L)).j_form(J_of(3, 3))
    assert abs(np.linalg.eigvalsh(M)[0] - (1 - 0.99**2)) <= 1e-12


def test_not_contractive():
    with pytest.raises(NotContractive):
        gs.Contraction.from_matrix(np.array([[1.5]]))


def test_wplus_examples():
    assert np.allclose(gs.wplus(gs.Contraction.from_matrix(np.zeros((2, 2)))), np.eye(2))
    W = gs.wplus(gs.Contraction.from_matrix(np.diag([1.0, 0.0])))
    assert np.allclose(np.linalg.svd(W, compute_uv=False), [1, 0], atol=1e-12)
    assert np.allclose(W @ [1, 0], 0, atol=1e-12)


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_wplus_isometry(seed, p, q):
    rng = np.random.default_rng(seed)
    L = cgauss(rng, q, p)
    L /= max(np.linalg.norm(L, 2), 1e-12) * rng.uniform(1.0, 3.0)
    lam = gs.Contraction.from_matrix(L)
    W = gs.wplus(lam)
    C = gs.graph_of(lam).basis
    J = J_of(p, q)
    for _ in range(50 // 10):
        k = cgauss(rng, p)
        lhs = np.linalg.norm(W @ k) ** 2
        rhs = np.vdot(C @ k, J @ C @ k).real
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(k) ** 2


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_round_trip(seed, p, q):
    rng = np.random.default_rng(seed)
    L = cgauss(rng, q, p)
    L *= rng.uniform(0, 0.999) / max(np.linalg.norm(L, 2), 1e-12)
    lam = gs.Contraction.from_matrix(L)
    _, back = gs.decompose_positive_subspace(gs.graph_of(lam).basis, J_of(p, q))
    assert np.linalg.norm(back.ambient() - lam.ambient(), 2) <= 1e-10


@given(seeds, st.integers(1, 4), st.integers(0, 2))
def test_nullity_equals_unit_singular_values(seed, p, k):
    rng = np.random.default_rng(seed)
    k = min(k, p)
    X, _ = np.linalg.qr(cgauss(rng, p, p))
    Y, _ = np.linalg.qr(cgauss(rng, p, p))
    sv = rng.uniform(0, 0.9, p)
    sv[:k] = 1.0
    lam = gs.Contraction.from_matrix(X @ np.diag(sv) @ Y.conj().T)
    M = gs.graph_of(lam).j_form(J_of(p, p))
    assert int(np.sum(np.linalg.eigvalsh(M) <= 1e-10)) == k


def test_cayley_examples():
    assert np.allclose(gs.cayley(np.zeros((2, 2))).lam, np.eye(2))
    assert np.allclose(gs.cayley(np.eye(2)).lam, 0)
    sym = HankelSymbol.from_measure(MomentMeasure.lebesgue(0.5), 8)
    assert dissipativity_check(sym).is_dissipative
    assert gs.cayley(hankel_matrix(sym)).norm <= 1 + 1e-10


def test_cayley_rejects():
    with pytest.raises(NotDissipative):
        gs.cayley(-np.eye(2))


@given(seeds, st.integers(1, 8))
def test_cayley_skew_is_unitary(seed, n):
    rng = np.random.default_rng(seed)
    H = cgauss(rng, n, n)
    lam = gs.cayley((H - H.conj().T) / 2).lam
    assert np.linalg.norm(lam.conj().T @ lam - np.eye(n)) <= 1e-10


def test_block_operator_examples():
    U, J = gs.block_reflection_operator(np.array([[1.0]]))
    assert np.allclose(U, [[1, 1], [-1, 1]])
    assert np.allclose(U.T @ U, 2 * np.eye(2))
    U0, _ = gs.block_reflection_operator(np.zeros((1, 1)))
    assert not U0.any()


def test_block_operator_random(rng):
    a = cgauss(rng, 3, 2)
    U, J = gs.block_reflection_operator(a)
    assert np.linalg.norm(J @ U @ J - U.conj().T) <= 1e-12
    assert np.linalg.norm((U.conj().T @ U)[:2, 2:]) <= 1e-12 * np.linalg.norm(U) ** 2
    cls = gs.classify_block_symmetric(U, 2)
    assert np.allclose(cls.a, a) and np.allclose(cls.s1, a.conj().T @ a) and np.allclose(cls.s2, a @ a.conj().T)
    assert cls.residual <= 1e-12 * np.linalg.norm(U) ** 2


def test_classify_diagonal(rng):
    B = cgauss(rng, 2, 2)
    C = cgauss(rng, 3, 3)
    U = np.zeros((5, 5), dtype=complex)
    U[:2, :2] = B + B.conj().T
    U[2:, 2:] = C + C.conj().T
    cls = gs.classify_block_symmetric(U, 2)
    assert not cls.a.any() and cls.residual == 0


def test_classify_rejects(rng):
    U, _ = gs.block_reflection_operator(cgauss(rng, 2, 2))
    U[0, 3] += 0.5
    with pytest.raises(NotClassifiable):
        gs.classify_block_symmetric(U, 2)
