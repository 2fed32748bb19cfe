"""Gram-metric-aware dense linear algebra.

Every space in this package is ``C^n`` equipped with a Hermitian positive
(semi)definite Gram matrix ``G``, so that ``<x, y>_G = x^* G y``.  Adjoints,
norms and projections are all taken with respect to that metric.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotPsd,
    OutsideDisk,
    SingularMetric,
)

DEFAULT_TOL = 1e-10


def _square(A, name="matrix"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    return A


def _gram_or_identity(G, n):
    if G is None:
        return np.eye(n)
    G = _square(G, "Gram matrix")
    if G.shape[0] != n:
        raise DimensionMismatch(f"Gram matrix is {G.shape}, operator dimension {n}")
    return G


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based generator: the stream depends only on ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed)))


def hermitian_part(M):
    M = np.asarray(M)
    return 0.5 * (M + M.conj().T)


@dataclass(frozen=True)
class InnerProductSpace:
    """Coordinates ``C^dim`` with metric ``gram``."""

    gram: np.ndarray
    metric_pd: bool = True
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        G = np.asarray(_square(self.gram, "Gram matrix"))
        if G.size == 0:
            object.__setattr__(self, "gram", np.zeros((0, 0)))
            return
        scale = max(1.0, np.linalg.norm(G, 2))
        if np.linalg.norm(G - G.conj().T, 2) > 1e-12 * scale:
            raise NotHermitian("Gram matrix is not Hermitian")
        G = hermitian_part(G)
        lo = np.linalg.eigvalsh(G)[0]
        if lo < -self.tol * scale:
            raise NotPsd(f"Gram matrix has eigenvalue {lo:.3e}")
        if self.metric_pd and lo <= self.tol * scale:
            raise SingularMetric(f"Gram matrix flagged definite but min eigenvalue is {lo:.3e}")
        object.__setattr__(self, "gram", G)

    @classmethod
    def standard(cls, dim: int) -> "InnerProductSpace":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def inner(self, x, y) -> complex:
        return complex(np.vdot(x, self.gram @ y))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))


@dataclass(frozen=True)
class OperatorOnSpace:
    space: InnerProductSpace
    matrix: np.ndarray
    role: str = field(default="")

    def __post_init__(self):
        A = _square(self.matrix, self.role or "operator")
        if A.shape[0] != self.space.dim:
            raise DimensionMismatch(
                f"{self.role or 'operator'} is {A.shape}, space has dimension {self.space.dim}"
            )

    def adjoint(self) -> "OperatorOnSpace":
        return OperatorOnSpace(self.space, adjoint_wrt(self.matrix, self.space.gram), self.role + "^*")

    def norm(self) -> float:
        return op_norm(self.matrix, self.space.gram)


def adjoint_wrt(A, G=None):
    """Adjoint of ``A`` for the inner product ``x^* G y``: ``G^{-1} A^* G``."""
    A = _square(A)
    if G is None:
        return A.conj().T
    G = _gram_or_identity(G, A.shape[0])
    try:
        cond = np.linalg.cond(G)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - NaN input
        raise SingularMetric(str(exc)) from exc
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularMetric(f"Gram matrix is singular (condition number {cond:.3e})")
    return np.linalg.solve(G, A.conj().T @ G)


def op_norm(A, G=None) -> float:
    """Operator norm of ``A`` on the space with metric ``G``."""
    A = np.asarray(A)
    if G is None:
        return float(np.linalg.norm(A, 2)) if A.size else 0.0
    R = hermitian_sqrt(G)
    Rinv = np.linalg.inv(R)
    return float(np.linalg.norm(R @ A @ Rinv, 2))


class Period2Report(NamedTuple):
    ok: bool
    r_sq: float
    r_unit: float


def is_period2_unitary(J, G=None, tol: float = DEFAULT_TOL) -> Period2Report:
    J = _square(J)
    n = J.shape[0]
    G = _gram_or_identity(G, n)
    eye = np.eye(n)
    r_sq = float(np.linalg.norm(J @ J - eye, 2))
    r_unit = float(np.linalg.norm(adjoint_wrt(J, G) @ J - eye, 2))
    return Period2Report(r_sq <= tol and r_unit <= tol, r_sq, r_unit)


class PsdReport(NamedTuple):
    is_psd: bool
    min_eig: float


def psd_check(M, tol: float = DEFAULT_TOL) -> PsdReport:
    M = _square(M)
    scale = max(1.0, float(np.linalg.norm(M, 2))) if M.size else 1.0
    if np.linalg.norm(M - M.conj().T, 2) > 1e-10 * scale:
        raise NotHermitian("psd_check expects a Hermitian matrix")
    if M.size == 0:
        return PsdReport(True, 0.0)
    lo = float(np.linalg.eigvalsh(hermitian_part(M))[0])
    return PsdReport(lo >= -tol * scale, lo)


def spectral_radius(A) -> float:
    A = _square(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def hermitian_eigh(M, dps: int | None = None):
    """Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.

    With ``dps`` set, the decomposition is carried out in ``dps``-digit
    arithmetic and returned as object arrays of ``mpmath.mpf`` (real symmetric
    input only).  That route exists for kernel Gram matrices whose spectra
    decay past double precision.
    """
    if dps is None:
        M = hermitian_part(np.asarray(M))
        return np.linalg.eigh(M)
    with mpmath.workdps(dps):
        Mm = mpmath.matrix([[mpmath.mpf(v) for v in row] for row in np.asarray(M, dtype=object)])
        Mm = (Mm + Mm.T) / 2
        E, Q = mpmath.eigsy(Mm)
        n = Mm.rows
        order = sorted(range(n), key=lambda k: E[k])
        evals = np.array([E[k] for k in order], dtype=object)
        evecs = np.array([[Q[i, k] for k in order] for i in range(n)], dtype=object)
    return evals, evecs


def clamp_spectrum(evals, tol: float = DEFAULT_TOL):
    """Set eigenvalues in ``[-tol*scale, 0)`` to zero; raise on anything lower."""
    evals = np.asarray(evals, dtype=float)
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    if evals.size and evals.min() < -tol * scale:
        raise NotPsd(f"matrix has eigenvalue {evals.min():.3e}")
    return np.clip(evals, 0.0, None)


def hermitian_sqrt(M, tol: float = DEFAULT_TOL):
    M = _square(M)
    scale = max(1.0, float(np.linalg.norm(M, 2))) if M.size else 1.0
    if np.linalg.norm(M - M.conj().T, 2) > 1e-10 * scale:
        raise NotHermitian("hermitian_sqrt expects a Hermitian matrix")
    evals, Q = np.linalg.eigh(hermitian_part(M))
    root = np.sqrt(clamp_spectrum(evals, tol))
    R = (Q * root) @ Q.conj().T
    return hermitian_part(R)


def orth_projection(C, G=None):
    """``G``-orthogonal projection onto the column span of ``C``."""
    C = np.asarray(C)
    n = C.shape[0]
    G = _gram_or_identity(G, n)
    B = g_orthonormal_basis(C, G)
    return B @ B.conj().T @ G


def g_orthonormal_basis(C, G=None, rtol: float = 1e-12):
    """Columns spanning ``span(C)``, orthonormal for ``<.,.>_G``."""
    C = np.asarray(C, dtype=complex)
    n = C.shape[0]
    G = _gram_or_identity(G, n)
    R = hermitian_sqrt(G)
    U, sv, _ = np.linalg.svd(R @ C, full_matrices=False)
    if sv.size == 0:
        return np.zeros((n, 0), dtype=complex)
    keep = sv > rtol * max(sv[0], 1e-300)
    return np.linalg.solve(R, U[:, keep])


def truncated_shift(n: int):
    """Forward shift on ``C^n``: ``e_k -> e_{k+1}``, last basis vector to 0."""
    return np.eye(n, k=-1)


def shift_eigenvector(V, l, z: complex, N: int, G=None, tol: float = DEFAULT_TOL):
    """Eigenvector ``sum_{n<N} z^n V^n l`` of the backward shift ``V^*``.

    ``l`` must lie in the wandering space ``K ⊖ VK``, i.e. ``V^* l = 0``.
    """
    V = _square(V)
    l = np.asarray(l, dtype=complex)
    if abs(z) >= 1:
        raise OutsideDisk(f"|z| = {abs(z)} must be < 1")
    Vadj = adjoint_wrt(V, G)
    lnorm = np.linalg.norm(l) if G is None else np.sqrt(abs(np.vdot(l, G @ l)))
    if np.linalg.norm(Vadj @ l) > tol * max(1.0, lnorm):
        raise ValueError("l is not in the wandering subspace (V^* l != 0)")
    f = np.zeros_like(l)
    term = l.copy()
    for _ in range(N):
        f = f + term
        term = z * (V @ term)
    return f


def purity_decay(U, P, phi, kmax: int, G=None) -> np.ndarray:
    """Norms ``||P (U^*)^k phi||`` for ``k = 0..kmax``."""
    U = _square(U)
    P = _square(P)
    n = U.shape[0]
    G = _gram_or_identity(G, n)
    Uadj = adjoint_wrt(U, G)
    v = np.asarray(phi, dtype=complex)
    out = np.empty(kmax + 1)
    for k in range(kmax + 1):
        w = P @ v
        out[k] = np.sqrt(max(np.vdot(w, G @ w).real, 0.0))
        v = Uadj @ v
    return out
