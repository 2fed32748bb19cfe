"""The reflection-positivity quotient construction.

Given a reflection-symmetric operator ``U`` (``JUJ = U^*``) and a
``U``-invariant subspace ``K`` on which the form ``<k, Jk>`` is positive,
build the Hilbert space ``H(K)`` obtained by dividing out the null vectors of
that form, the contraction ``W: K -> H(K)`` and the selfadjoint operator
``S`` with ``S W = W U|_K`` and ``W^* W = PJP``.

All computations go through the *compressed system*: the form ``M`` and the
restricted operator ``U_K`` written in coordinates of a basis of ``K``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from . import linops
from .errors import (
    DimensionMismatch,
    IllConditionedBasis,
    IncompatibleRealizations,
    NotReflectionPositive,
    NotReflectionSymmetric,
)
from .linops import DEFAULT_TOL, InnerProductSpace

NOT_APPLICABLE = "not-applicable"


def _norm(A) -> float:
    A = np.asarray(A)
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


@dataclass(frozen=True)
class ReflectionSystem:
    """Ambient data ``(H_0, U, J, K)``; ``k_basis`` columns span ``K``."""

    h0: InnerProductSpace
    u: np.ndarray
    j: np.ndarray
    k_basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        n = self.h0.dim
        for name in ("u", "j"):
            A = np.asarray(getattr(self, name))
            if A.shape != (n, n):
                raise DimensionMismatch(f"{name} has shape {A.shape}, expected {(n, n)}")
            object.__setattr__(self, name, A.astype(complex))
        C = np.asarray(self.k_basis, dtype=complex)
        if C.ndim != 2 or C.shape[0] != n:
            raise DimensionMismatch(f"k_basis has shape {C.shape}, ambient dimension {n}")
        object.__setattr__(self, "k_basis", C)

    @property
    def projection(self):
        return linops.orth_projection(self.k_basis, self.h0.gram)


class ValidationReport(NamedTuple):
    r_sym: float
    r_inv: float
    min_eig_pjp: float
    ok: bool


def validate_system(system: ReflectionSystem) -> ValidationReport:
    """Residuals of ``JUJ = U^*``, ``UK ⊆ K`` and ``PJP >= 0``."""
    G = system.h0.gram
    U, J, C = system.u, system.j, system.k_basis
    tol = system.tol
    unorm = max(_norm(U), 1.0)
    r_sym = _norm(J @ U @ J - linops.adjoint_wrt(U, G)) / unorm
    P = system.projection
    r_inv = _norm((np.eye(U.shape[0]) - P) @ U @ P) / unorm
    M = linops.hermitian_part(C.conj().T @ G @ J @ C)
    min_eig = float(np.linalg.eigvalsh(M)[0]) if M.size else 0.0
    mscale = max(_norm(M), 1.0)
    ok = r_sym <= tol and r_inv <= tol and min_eig >= -tol * mscale
    return ValidationReport(r_sym, r_inv, min_eig, ok)


@dataclass(frozen=True)
class CompressedSystem:
    """The form ``M`` and restricted operator in ``K``-coordinates.

    ``m_u`` is the compressed ``JU``-form ``<k_i, J U k_j>``; it equals
    ``m @ u_k`` when ``u_k`` is known and may be given on its own for models
    where ``U`` is only available through its form (moment matrices, kernel
    discretizations).  ``scale`` is the reference magnitude for relative
    thresholds; it defaults to ``||M||`` and matters when the whole form is
    numerically zero.
    """

    m: np.ndarray
    u_k: np.ndarray | None = None
    m_u: np.ndarray | None = None
    tol: float = DEFAULT_TOL
    scale: float | None = None

    def __post_init__(self):
        if self.u_k is None and self.m_u is None:
            raise ValueError("need u_k or m_u")
        r = np.asarray(self.m).shape[0]
        for name in ("u_k", "m_u"):
            A = getattr(self, name)
            if A is not None and np.asarray(A).shape != (r, r):
                raise DimensionMismatch(f"{name} must be {r}x{r}")

    @property
    def dim(self) -> int:
        return np.asarray(self.m).shape[0]

    @property
    def ju_form(self):
        if self.m_u is not None:
            return self.m_u
        return self.m @ self.u_k

    def symmetry_residual(self) -> float:
        """``||M U_K - U_K^* M||`` relative to ``||M|| ||U_K||``."""
        A = np.asarray(self.ju_form, dtype=complex)
        m = np.asarray(self.m, dtype=complex)
        scale = max(_norm(m), self.scale or 0.0, 1e-300)
        if self.u_k is not None:
            scale *= max(_norm(self.u_k), 1.0)
        return _norm(A - A.conj().T) / scale


def compress(system: ReflectionSystem) -> CompressedSystem:
    G = system.h0.gram
    C = system.k_basis
    CGC = linops.hermitian_part(C.conj().T @ G @ C)
    cond = np.linalg.cond(CGC) if CGC.size else 1.0
    if not np.isfinite(cond) or cond > 1e8:
        raise IllConditionedBasis(f"K-basis Gram has condition number {cond:.3e}")
    M = linops.hermitian_part(C.conj().T @ G @ system.j @ C)
    u_k = np.linalg.solve(CGC, C.conj().T @ G @ system.u @ C)
    return CompressedSystem(M, u_k, tol=system.tol, scale=_norm(CGC))


@dataclass(frozen=True)
class OsrRealization:
    """``(H(K), W, S)`` in coordinates.

    ``hk`` has the identity Gram; ``w`` is ``dim_hk x r_K`` and maps
    ``K``-coordinates to ``H(K)``-coordinates; ``w_pinv`` is its right
    inverse on ``range(W^*)``.  When built in extended precision ``w`` and
    ``w_pinv`` are object arrays of ``mpmath.mpf`` and ``dps`` records the
    working precision.
    """

    hk: InnerProductSpace
    w: np.ndarray
    s: np.ndarray
    nullity: int
    w_pinv: np.ndarray
    residuals: dict = field(default_factory=dict)
    dps: int | None = None

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    def spectrum(self):
        return np.linalg.eigvalsh(self.s) if self.dim else np.zeros(0)


def _float(A):
    return np.array(A.tolist(), dtype=float) if A.dtype == object else A


def osr_construct(
    cs: CompressedSystem,
    tol: float | None = None,
    dps: int | None = None,
    spectral_bound: float | None = None,
) -> OsrRealization:
    """Quotient by the null space of ``M`` and induce ``S``.

    ``W = Lambda_+^{1/2} Q_+^*`` from the eigenpairs of ``M`` above
    ``tol * ||M||``; ``S = Lambda_+^{-1/2} Q_+^* (M U_K) Q_+ Lambda_+^{-1/2}``.
    ``spectral_bound`` overrides the default ``sp(U_K^2)^{1/2}`` used in the
    norm-bound residual.
    """
    tol = cs.tol if tol is None else tol
    M = np.asarray(cs.m)
    r = M.shape[0]
    sym = cs.symmetry_residual()
    if sym > tol:
        raise NotReflectionSymmetric(f"symmetry transfer residual {sym:.3e}")

    if dps is None:
        Mh = linops.hermitian_part(M)
        evals, Q = np.linalg.eigh(Mh)
        mnorm = max(abs(evals).max(), cs.scale or 0.0, 1e-300) if r else 1.0
        if r and evals[0] < -tol * mnorm:
            raise NotReflectionPositive(f"form has eigenvalue {evals[0]:.3e}")
        keep = evals > tol * mnorm
        lam = evals[keep]
        Qp = Q[:, keep]
        root = np.sqrt(lam)
        W = (Qp * root).conj().T
        Wp = Qp / root
        A = np.asarray(cs.ju_form)
        S_raw = Wp.conj().T @ A @ Wp
    else:
        evals, Q = linops.hermitian_eigh(M, dps=dps)
        with mpmath.workdps(dps):
            mnorm = max(abs(e) for e in evals)
            if evals[0] < -tol * mnorm:
                raise NotReflectionPositive(f"form has eigenvalue {float(evals[0]):.3e}")
            keep = np.array([e > tol * mnorm for e in evals])
            lam = evals[keep]
            Qp = Q[:, keep]
            root = np.array([mpmath.sqrt(v) for v in lam], dtype=object)
            W = (Qp * root).T
            Wp = Qp / root
            A = np.asarray(cs.ju_form).astype(object)
            S_raw = _float(Wp.T @ A @ Wp)
            lam = np.array(lam.tolist(), dtype=float)
            mnorm = float(mnorm)
        M = _float(M)

    S = linops.hermitian_part(S_raw)
    residuals = {"selfadjoint": _norm(S_raw - S) / max(_norm(S), 1e-300)}

    Wf = _float(W)
    WW = Wf.conj().T @ Wf if Wf.size else np.zeros_like(M)
    residuals["ww_minus_m"] = _norm(WW - M) / mnorm
    if cs.u_k is not None:
        U = np.asarray(cs.u_k)
        residuals["intertwining"] = _norm(S @ Wf - Wf @ U) / max(_norm(Wf) * max(_norm(U), 1.0), 1e-300)
        residuals["polar"] = _norm(M @ U - U.conj().T @ M) / (mnorm * max(_norm(U), 1.0))
        if spectral_bound is None:
            spectral_bound = np.sqrt(linops.spectral_radius(U @ U))
    if spectral_bound is not None:
        residuals["norm_excess"] = (_norm(S) if S.size else 0.0) - spectral_bound

    return OsrRealization(
        hk=InnerProductSpace.standard(S.shape[0]),
        w=W,
        s=S,
        nullity=int(r - lam.size),
        w_pinv=Wp,
        residuals=residuals,
        dps=dps,
    )


def conjugate_realization(real: OsrRealization, Q) -> OsrRealization:
    """Copy of ``real`` transported by the unitary ``Q`` of ``H(K)``."""
    Q = np.asarray(Q)
    return OsrRealization(
        hk=real.hk,
        w=Q @ real.w,
        s=Q @ real.s @ Q.conj().T,
        nullity=real.nullity,
        w_pinv=real.w_pinv @ Q.conj().T,
        residuals=dict(real.residuals),
        dps=real.dps,
    )


class IntertwinerReport(NamedTuple):
    t: np.ndarray
    unitary_residual: float
    intertwining_residual: float
    coisometry_residual: float


def intertwiner(
    r1: OsrRealization,
    r2: OsrRealization,
    cs: CompressedSystem | None = None,
    tol: float = 1e-8,
) -> IntertwinerReport:
    """The unitary ``T`` with ``T W_1 = W_2`` and ``T S_1 = S_2 T``.

    ``T`` is the least-squares solution of ``T W_1 = W_2`` on ``range(W_1)``,
    i.e. ``W_2 W_1^+``.  ``unitary_residual`` is ``||T^* T - I||`` (isometry
    on ``H(K_1)``); ``coisometry_residual`` is ``||T T^* - I||`` and is only
    meaningful when both quotients have the same dimension.
    """
    dps = r1.dps or r2.dps
    W1, W2, W1p = r1.w, r2.w, r1.w_pinv
    if W1.shape[1] != W2.shape[1]:
        raise IncompatibleRealizations("realizations live over different K-coordinates")
    if dps is None:
        G1 = W1.conj().T @ W1
        G2 = W2.conj().T @ W2
        scale = max(_norm(G1), 1e-300) if cs is None else max(_norm(cs.m), 1e-300)
        if _norm(G1 - G2) > tol * scale:
            raise IncompatibleRealizations(f"W1^*W1 and W2^*W2 differ by {_norm(G1 - G2):.3e}")
        T = W2 @ W1p
    else:
        with mpmath.workdps(dps):
            ow1 = np.asarray(W1, dtype=object)
            ow2 = np.asarray(W2, dtype=object)
            G1 = _float(ow1.T @ ow1)
            G2 = _float(ow2.T @ ow2)
            if _norm(G1 - G2) > tol * max(_norm(G1), 1e-300):
                raise IncompatibleRealizations(f"W1^*W1 and W2^*W2 differ by {_norm(G1 - G2):.3e}")
            T = _float(ow2 @ np.asarray(W1p, dtype=object))
    d1, d2 = T.shape[1], T.shape[0]
    unit = _norm(T.conj().T @ T - np.eye(d1))
    cois = _norm(T @ T.conj().T - np.eye(d2))
    inter = _norm(T @ r1.s - r2.s @ T)
    return IntertwinerReport(T, unit, inter, cois)


class NormBoundReport(NamedTuple):
    spectral_radius_sq: float
    max_violation: float
    violations: int
    trials: int


def verify_norm_bound(cs: CompressedSystem, u_full, trials: int = 1000, seed: int = 0, tol: float = 1e-8) -> NormBoundReport:
    """Check ``||U k||_J^2 <= sp(U^2) ||k||_J^2`` on random ``k`` in ``K``."""
    if cs.u_k is None:
        raise ValueError("norm bound needs the restricted operator u_k")
    rng = linops.rng_from_seed(seed)
    M = np.asarray(cs.m, dtype=complex)
    U = np.asarray(cs.u_k, dtype=complex)
    rho = linops.spectral_radius(np.asarray(u_full) @ np.asarray(u_full))
    r = M.shape[0]
    worst = -np.inf
    bad = 0
    mscale = max(_norm(M), 1e-300)
    for _ in range(trials):
        k = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        k /= np.linalg.norm(k)
        Uk = U @ k
        lhs = np.vdot(Uk, M @ Uk).real
        rhs = rho * np.vdot(k, M @ k).real
        excess = (lhs - rhs) / mscale
        worst = max(worst, excess)
        if excess > tol:
            bad += 1
    return NormBoundReport(rho, float(worst), bad, trials)


def random_reflection_system(dim: int, seed: int, null_directions: int = 0, tol: float = DEFAULT_TOL) -> ReflectionSystem:
    """A random system satisfying the axioms by construction.

    ``J = diag(I_m, -I_m)`` with ``m = dim/2``; ``K`` is the graph of a random
    contraction ``H_+ -> H_-`` (``null_directions`` of its singular values set
    to 1, which makes the form degenerate).  ``U = J H`` with ``H`` Hermitian
    and chosen so that ``U K ⊆ K``; any operator of this shape satisfies
    ``JUJ = U^*``.
    """
    if dim < 2 or dim % 2:
        raise ValueError("dim must be even and >= 2")
    rng = linops.rng_from_seed(seed)
    m = dim // 2

    def cgauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    J = np.diag(np.r_[np.ones(m), -np.ones(m)]).astype(complex)
    X, _ = np.linalg.qr(cgauss(m, m))
    Y, _ = np.linalg.qr(cgauss(m, m))
    sv = rng.uniform(0.0, 0.95, m)
    sv[:null_directions] = 1.0
    lam = X @ np.diag(sv) @ Y.conj().T
    C = np.vstack([np.eye(m), lam])

    M = C.conj().T @ J @ C
    Hk = cgauss(m, m)
    Hk = Hk + Hk.conj().T
    # U_K selfadjoint for the form M; on the null part of M any action is allowed
    evals, Q = np.linalg.eigh(M)
    pos = evals > 1e-12
    Minv = (Q[:, pos] / evals[pos]) @ Q[:, pos].conj().T
    u_k = Minv @ Hk @ Minv @ M
    if (~pos).any():
        N = Q[:, ~pos]
        u_k = u_k + N @ cgauss(N.shape[1], m)
    B = J @ C @ u_k
    Cp = np.linalg.pinv(C)
    H = B @ Cp + Cp.conj().T @ B.conj().T - Cp.conj().T @ C.conj().T @ B @ Cp
    Pperp = np.eye(dim) - C @ Cp
    Z = cgauss(dim, dim)
    H = H + Pperp.conj().T @ (Z + Z.conj().T) @ Pperp
    H = linops.hermitian_part(H)
    U = J @ H
    scale = 1.0 / max(_norm(U), 1e-300)
    return ReflectionSystem(InnerProductSpace.standard(dim), U * scale, J, C, tol=tol)


class SemigroupReport(NamedTuple):
    square_residual: float
    psd: bool
    ok: bool


def semigroup_check(s_list, parametrized: bool = True, tol: float = 1e-10):
    """Check ``S(a^2) = S(a)^2 >= 0`` along ``[S(a), S(a^2), S(a^4), ...]``."""
    if not parametrized:
        return NOT_APPLICABLE
    mats = [np.asarray(S) for S in s_list]
    if len(mats) < 2:
        raise ValueError("need S(a) and S(a^2)")
    shapes = {S.shape for S in mats}
    if len(shapes) != 1:
        raise DimensionMismatch(f"shape mismatch in semigroup list: {shapes}")
    worst = 0.0
    psd = True
    for lo, hi in zip(mats, mats[1:]):
        scale = max(_norm(hi), 1e-300)
        worst = max(worst, _norm(hi - lo @ lo) / scale)
        psd = psd and linops.psd_check(hi, tol).is_psd
    return SemigroupReport(worst, psd, worst <= tol and psd)
