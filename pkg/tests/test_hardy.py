import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflectpos import graphspace, hardy, linops, osr
from reflectpos.errors import NotContractive, TruncationOverflow


def same_span(A, B, tol=1e-10):
    PA, PB = linops.orth_projection(A), linops.orth_projection(B)
    return np.linalg.norm(PA - PB, 2) <= tol


def test_truncation_symmetry():
    for n in (1, 4, 9):
        ft = hardy.FourierTruncation(n)
        assert np.array_equal(ft.j @ ft.u @ ft.j, ft.u.T)
        assert not (ft.u @ ft.basis(n)).any()


def test_hardy_system_n4():
    cs = osr.compress(hardy.hardy_system(4))
    e0 = np.zeros(5)
    e0[0] = 1
    assert np.array_equal(cs.m, np.outer(e0, e0))
    real = osr.osr_construct(cs)
    assert real.dim == 1 and np.array_equal(real.s, np.zeros((1, 1)))


def test_form_is_constant_term_squared():
    ft = hardy.FourierTruncation(5)
    f = np.zeros(ft.dim)
    f[ft.index(0)] = 3
    f[ft.index(2)] = 1.5
    f[ft.index(4)] = -2
    assert f @ ft.j @ f == 9


def test_hardy_system_validates_exactly():
    rep = osr.validate_system(hardy.hardy_system(6))
    assert rep.ok and rep.r_sym == 0 and rep.r_inv == 0 and rep.min_eig_pjp == 0


@pytest.mark.parametrize("n", [1, 2, 7, 16])
def test_one_dimensional_quotient(n):
    real = osr.osr_construct(osr.compress(hardy.hardy_system(n)))
    assert real.dim == 1 and not real.s.any()


def test_purity_decay_vanishes():
    real = osr.osr_construct(osr.compress(hardy.hardy_system(8)))
    decay = linops.purity_decay(real.s, np.eye(1), np.ones(1), 3)
    assert decay[0] == 1 and not np.any(decay[1:])


def test_kb_constant_one_is_hardy_space():
    n = 8
    ft = hardy.FourierTruncation(n)
    assert same_span(hardy.kb_subspace(hardy.BoundedSymbol([1.0]), n), ft.hardy_basis)


def test_kb_zero_is_h_plus():
    n = 8
    ft = hardy.FourierTruncation(n)
    kb = hardy.kb_subspace(hardy.BoundedSymbol([0.0]), n)
    assert np.allclose(ft.j @ kb, kb)
    form = kb.conj().T @ ft.j @ kb
    assert np.allclose(form, kb.conj().T @ kb)


def test_kb_half_z_psd():
    ft = hardy.FourierTruncation(8)
    kb = hardy.kb_subspace(hardy.BoundedSymbol([0, 0.5]), 8)
    assert linops.psd_check(kb.conj().T @ ft.j @ kb).min_eig >= -1e-14


def test_degree_overflow():
    with pytest.raises(TruncationOverflow):
        hardy.kb_subspace(hardy.BoundedSymbol([0, 0, 0, 0.5]), 5)
    with pytest.raises(TruncationOverflow):
        hardy.lambda_b(hardy.BoundedSymbol([0, 0, 0, 0.5]), 5)


def test_symbol_must_be_contractive():
    with pytest.raises(NotContractive):
        hardy.BoundedSymbol([1.0, 0.1])


def test_lambda_examples():
    n = 8
    assert np.allclose(hardy.lambda_b(hardy.BoundedSymbol([0.0]), n).lam, 0)
    one = hardy.lambda_b(hardy.BoundedSymbol([1.0]), n)
    assert np.allclose(one.lam[:, 0], 0)
    z = hardy.lambda_b(hardy.BoundedSymbol([0, 1.0]), n)
    assert z.norm <= 1 + 1e-10


def test_defect_examples():
    ft = hardy.FourierTruncation(8)
    d = lambda c: hardy.shift_invariance_defect(hardy.kb_subspace(hardy.BoundedSymbol(c), 8), ft.u)
    assert d([1.0]) <= 1e-12
    assert d([0, 0.5]) > 0.1
    assert d([0.0]) > 0


def test_defect_continuity():
    ft = hardy.FourierTruncation(12)
    eps = [0.5, 0.25, 0.1, 0.05, 0.01, 0.001]
    vals = []
    for e in eps:
        kb = hardy.kb_subspace(hardy.BoundedSymbol([1 - e, e]), 12)
        vals.append(hardy.shift_invariance_defect(kb, ft.u, source=kb[:, :6]))
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 2e-3


coeff = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def symbols(draw):
    c = np.array(draw(st.lists(coeff, min_size=1, max_size=4)))
    total = np.abs(c).sum()
    if total > 1:
        c = c / total
    return hardy.BoundedSymbol(c)


@given(symbols(), st.integers(8, 14))
def test_kb_positive_and_graph(b, n):
    ft = hardy.FourierTruncation(n)
    kb = hardy.kb_subspace(b, n)
    assert np.linalg.eigvalsh(kb.conj().T @ ft.j @ kb)[0] >= -1e-10
    lam = hardy.lambda_b(b, n)
    assert lam.norm <= 1 + 1e-8
    assert same_span(graphspace.graph_of(lam).basis, kb, tol=1e-8)


def test_full_defect_is_boundary_dominated():
    # the top columns leave K through the cutoff regardless of n
    vals = []
    for n in (12, 24):
        ft = hardy.FourierTruncation(n)
        vals.append(hardy.shift_invariance_defect(hardy.kb_subspace(hardy.BoundedSymbol([0.99, 0.01]), n), ft.u))
    assert min(vals) > 0.9 and abs(vals[0] - vals[1]) < 1e-6
