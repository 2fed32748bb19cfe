"""Positive subspaces as graphs of contractions.

A subspace ``K`` of ``H_+ ⊕ H_-`` is positive for ``J = P_+ - P_-`` exactly
when it is the graph ``{k_+ + Λ k_+}`` of a contraction ``Λ: K_+ -> H_-``.
Contractions here carry explicit embeddings: ``plus_basis`` (orthonormal
columns spanning ``K_+``) and ``minus_basis`` (orthonormal columns spanning
``H_-``), so ``lam`` is just a matrix in those coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linops
from .errors import (
    DegenerateProjection,
    NotClassifiable,
    NotContractive,
    NotDissipative,
    NotPositive,
)
from .linops import DEFAULT_TOL


@dataclass(frozen=True)
class Contraction:
    lam: np.ndarray
    plus_basis: np.ndarray
    minus_basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        lam = np.atleast_2d(np.asarray(self.lam))
        object.__setattr__(self, "lam", lam)
        if lam.shape != (self.minus_basis.shape[1], self.plus_basis.shape[1]):
            raise ValueError(
                f"lam is {lam.shape}; bases give {(self.minus_basis.shape[1], self.plus_basis.shape[1])}"
            )
        if self.norm > 1 + self.tol:
            raise NotContractive(f"||Λ|| = {self.norm:.12g} > 1")

    @classmethod
    def from_matrix(cls, lam, tol: float = DEFAULT_TOL) -> "Contraction":
        """Coordinate form: ``H_+ = C^p`` first, ``H_- = C^q`` second."""
        lam = np.atleast_2d(np.asarray(lam))
        q, p = lam.shape
        plus = np.vstack([np.eye(p), np.zeros((q, p))])
        minus = np.vstack([np.zeros((p, q)), np.eye(q)])
        return cls(lam, plus, minus, tol)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.lam, 2)) if self.lam.size else 0.0

    def ambient(self):
        """``Λ`` as an operator on the ambient space (zero off ``K_+``)."""
        return self.minus_basis @ self.lam @ self.plus_basis.conj().T


@dataclass(frozen=True)
class GraphSubspace:
    basis: np.ndarray
    contraction: Contraction

    def j_form(self, j):
        C = self.basis
        return linops.hermitian_part(C.conj().T @ j @ C)


def _pm_projections(j, g):
    n = j.shape[0]
    P_plus = 0.5 * (np.eye(n) + j)
    P_minus = 0.5 * (np.eye(n) - j)
    return P_plus, P_minus


def decompose_positive_subspace(k_basis, j, g=None, tol: float = DEFAULT_TOL):
    """Split ``K`` into ``K_+ = P_+ K`` and the contraction ``P_+ k -> P_- k``.

    Returns ``(plus_basis, Contraction)``.  ``g`` is the ambient Gram matrix
    (identity by default); ``j`` must be a ``g``-unitary involution.
    """
    C = np.asarray(k_basis, dtype=complex)
    j = np.asarray(j)
    n = C.shape[0]
    G = np.eye(n) if g is None else np.asarray(g)
    M = linops.hermitian_part(C.conj().T @ G @ j @ C)
    mscale = max(1.0, float(np.linalg.norm(M, 2))) if M.size else 1.0
    if M.size and np.linalg.eigvalsh(M)[0] < -tol * mscale:
        raise NotPositive(f"J-form on K has eigenvalue {np.linalg.eigvalsh(M)[0]:.3e}")

    Kb = linops.g_orthonormal_basis(C, G)
    P_plus, P_minus = _pm_projections(j, G)
    Kp = P_plus @ Kb
    R = linops.hermitian_sqrt(G)
    sv = np.linalg.svd(R @ Kp, compute_uv=False)
    if sv.size and sv[-1] <= np.sqrt(tol):
        # a vector of K with vanishing H_+ part lies in N and breaks the graph property
        raise DegenerateProjection(f"P_+ restricted to K has singular value {sv[-1]:.3e}")
    plus_basis = linops.g_orthonormal_basis(Kp, G)
    minus_basis = linops.g_orthonormal_basis(P_minus, G)
    # coordinates of P_+ Kb in plus_basis, and of P_- Kb in minus_basis
    Rp = plus_basis.conj().T @ G @ Kp
    Rm = minus_basis.conj().T @ G @ (P_minus @ Kb)
    lam = Rm @ np.linalg.inv(Rp)
    return plus_basis, Contraction(lam, plus_basis, minus_basis, tol=max(tol, 1e-10))


def graph_of(lam: Contraction) -> GraphSubspace:
    basis = lam.plus_basis + lam.minus_basis @ lam.lam
    return GraphSubspace(basis, lam)


def wplus(lam: Contraction):
    """``(I - Λ^*Λ)^{1/2}`` on ``K_+`` coordinates."""
    L = lam.lam
    if lam.norm > 1 + lam.tol:
        raise NotContractive(f"||Λ|| = {lam.norm:.12g}")
    D = np.eye(L.shape[1]) - L.conj().T @ L
    return linops.hermitian_sqrt(linops.hermitian_part(D), tol=max(lam.tol, 1e-10))


def cayley(gamma, tol: float = DEFAULT_TOL) -> Contraction:
    """Cayley transform ``(I - Γ)(I + Γ)^{-1}`` of a dissipative matrix."""
    gamma = np.atleast_2d(np.asarray(gamma))
    re = linops.hermitian_part(gamma)
    scale = max(1.0, float(np.linalg.norm(gamma, 2)))
    lo = float(np.linalg.eigvalsh(re)[0])
    if lo < -tol * scale:
        raise NotDissipative(f"Re Γ has eigenvalue {lo:.3e}")
    n = gamma.shape[0]
    eye = np.eye(n)
    lam = (eye - gamma) @ np.linalg.inv(eye + gamma)
    return Contraction.from_matrix(lam, tol=tol)


def block_reflection_operator(a):
    """``U(a) = [[a^*a, a^*], [-a, aa^*]]`` and ``J = diag(I, -I)``.

    ``a`` maps ``H_+ = C^p`` to ``H_- = C^q``.  ``U(a)`` is reflection
    symmetric, ``JUJ = U^* = U(-a)``, and ``U^*U`` is block diagonal.
    """
    a = np.atleast_2d(np.asarray(a))
    q, p = a.shape
    ah = a.conj().T
    U = np.block([[ah @ a, ah], [-a, a @ ah]])
    J = np.diag(np.r_[np.ones(p), -np.ones(q)])
    return U, J


class BlockClassification(NamedTuple):
    a: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    residual: float


def classify_block_symmetric(U, p: int, tol: float = 1e-10) -> BlockClassification:
    """Recover ``a, s_1, s_2`` with ``U = [[s_1, a^*], [-a, s_2]]``, ``a s_1 = s_2 a``.

    ``p`` is ``dim H_+``; ``J`` is ``diag(I_p, -I)``.
    """
    U = np.asarray(U)
    n = U.shape[0]
    J = np.diag(np.r_[np.ones(p), -np.ones(n - p)])
    scale = max(1.0, float(np.linalg.norm(U, 2)))
    r_sym = float(np.linalg.norm(J @ U @ J - U.conj().T, 2)) / scale
    UU = U.conj().T @ U
    r_block = float(np.linalg.norm(UU[:p, p:], 2)) / scale**2 if 0 < p < n else 0.0
    if r_sym > tol or r_block > tol:
        raise NotClassifiable(f"JUJ-U^* residual {r_sym:.3e}, off-diagonal U^*U {r_block:.3e}")
    s1, s2 = U[:p, :p], U[p:, p:]
    a = -U[p:, :p]
    residual = float(np.linalg.norm(a @ s1 - s2 @ a, 2)) / scale if a.size else 0.0
    return BlockClassification(a, s1, s2, residual)
