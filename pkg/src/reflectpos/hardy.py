"""Truncated ``L^2(T)`` model: shift, index-negation reflection, ``K(b)``.

Fourier modes ``-N..N`` are stored at indices ``0..2N``; mode ``k`` sits at
index ``k + N``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linops
from .errors import NotContractive, TruncationOverflow
from .graphspace import Contraction
from .linops import DEFAULT_TOL, InnerProductSpace
from .osr import ReflectionSystem

SUP_GRID = 4096


@dataclass(frozen=True)
class FourierTruncation:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    def index(self, mode: int) -> int:
        if abs(mode) > self.n:
            raise IndexError(mode)
        return mode + self.n

    def basis(self, mode: int):
        e = np.zeros(self.dim)
        e[self.index(mode)] = 1.0
        return e

    @property
    def u(self):
        """Multiplication by ``z`` with the top mode sent to zero."""
        return linops.truncated_shift(self.dim)

    @property
    def j(self):
        """``f(z) -> f(conj z)``: mode ``k`` to mode ``-k``."""
        return np.fliplr(np.eye(self.dim))

    @property
    def hardy_basis(self):
        """Columns ``e_0..e_N``: the truncated ``H^2``."""
        return np.eye(self.dim)[:, self.n:]


@dataclass(frozen=True)
class BoundedSymbol:
    """Polynomial ``b(z) = sum_m coeffs[m] z^m`` with ``sup_T |b| <= 1``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "coeffs", np.trim_zeros(c, "b") if np.any(c) else c[:1])
        if self.sup_estimate > 1 + 1e-9:
            raise NotContractive(f"sup |b| = {self.sup_estimate:.12g} exceeds 1")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def sup_estimate(self) -> float:
        theta = np.linspace(0.0, 2 * np.pi, SUP_GRID, endpoint=False)
        vals = np.polyval(self.coeffs[::-1], np.exp(1j * theta))
        return float(np.abs(vals).max())

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)


def hardy_system(n: int) -> ReflectionSystem:
    ft = FourierTruncation(n)
    return ReflectionSystem(InnerProductSpace.standard(ft.dim), ft.u, ft.j, ft.hardy_basis, tol=1e-12)


def _multiply(ft: FourierTruncation, coeffs, j: int, conjugate_arg: bool):
    """Vector of ``b(z) z^j`` (or ``b(conj z) conj(z)^j``) in the truncation."""
    v = np.zeros(ft.dim, dtype=complex)
    for m, c in enumerate(coeffs):
        mode = m + j
        v[ft.index(-mode if conjugate_arg else mode)] += c
    return v


def _check_degree(b: BoundedSymbol, n: int):
    if 2 * b.degree > n:
        raise TruncationOverflow(f"deg(b) = {b.degree} exceeds n/2 = {n / 2}")


def kb_subspace(b: BoundedSymbol, n: int):
    """Columns ``P_+ k + P_-(b k)`` for ``k = z^j``, ``j = 0..N - deg b``.

    Equal to ``((1 - b(conj z)) k(conj z) + (1 + b(z)) k(z)) / 2``.
    """
    _check_degree(b, n)
    ft = FourierTruncation(n)
    one = np.array([1.0])
    cols = []
    for j in range(n - b.degree + 1):
        plus = 0.5 * (_multiply(ft, one, j, False) + _multiply(ft, one, j, True))
        minus = 0.5 * (_multiply(ft, b.coeffs, j, False) - _multiply(ft, b.coeffs, j, True))
        cols.append(plus + minus)
    return np.column_stack(cols)


def _plus_minus_bases(ft: FourierTruncation, top: int):
    """Orthonormal bases of ``H_+`` (modes ``<= top``) and ``H_-`` (all modes)."""
    plus = [ft.basis(0)]
    for k in range(1, top + 1):
        plus.append((ft.basis(k) + ft.basis(-k)) / np.sqrt(2))
    minus = [(ft.basis(k) - ft.basis(-k)) / np.sqrt(2) for k in range(1, ft.n + 1)]
    return np.column_stack(plus).astype(complex), np.column_stack(minus).astype(complex)


def lambda_b(b: BoundedSymbol, n: int, tol: float = DEFAULT_TOL) -> Contraction:
    """The contraction ``P_+ k -> P_-(b k)`` on the truncated ``H_+``."""
    _check_degree(b, n)
    ft = FourierTruncation(n)
    top = n - b.degree
    plus, minus = _plus_minus_bases(ft, top)
    one = np.array([1.0])
    Kp = []
    Km = []
    for j in range(top + 1):
        Kp.append(0.5 * (_multiply(ft, one, j, False) + _multiply(ft, one, j, True)))
        Km.append(0.5 * (_multiply(ft, b.coeffs, j, False) - _multiply(ft, b.coeffs, j, True)))
    Kp = np.column_stack(Kp)
    Km = np.column_stack(Km)
    lam = (minus.conj().T @ Km) @ np.linalg.inv(plus.conj().T @ Kp)
    return Contraction(lam, plus, minus, tol=tol)


def shift_invariance_defect(k_basis, u, source=None) -> float:
    """``||(I - P_K) U P_src||`` with orthogonal projections; ``src`` defaults to ``K``.

    With the hard-cutoff shift the top modes of ``K(b)`` leave ``K`` for every
    ``b != 1``; passing the low-degree columns as ``source`` isolates the
    interior behaviour.
    """
    P = linops.orth_projection(k_basis)
    Ps = P if source is None else linops.orth_projection(source)
    return float(np.linalg.norm((np.eye(P.shape[0]) - P) @ np.asarray(u) @ Ps, 2))
