"""Moment measures on ``[-1, 1]``, Hankel symbols and their OSR quotients.

A positive measure ``mu`` gives the symbol ``gamma_n = m_n/2`` with
``m_n = int x^n d mu``.  In ``K``-coordinates (polynomial coefficients) the
reflected form is the moment Hankel matrix ``M = [m_{i+j}]`` and the
``JU``-form is its shift ``M' = [m_{i+j+1}]``; the induced ``S`` is
multiplication by ``x`` on ``L^2(mu)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from .errors import BoundaryAtom, DimensionMismatch, NotDissipative, QuadratureUnderresolved
from .osr import CompressedSystem, OsrRealization, osr_construct

DEFAULT_QUAD_ORDER = 200

# named densities as Jacobi weights (1 - x)^alpha (1 + x)^beta
_FAMILIES = {
    "lebesgue": (0.0, 0.0),
    "chebyshev": (-0.5, -0.5),
}


@dataclass(frozen=True)
class MomentMeasure:
    """Finite positive measure on ``[-1, 1]``.

    Either ``atoms`` (rows ``(x, p)``), a Jacobi-type density
    ``scale (1 - x)^alpha (1 + x)^beta``, or an arbitrary ``density``
    callable integrated by Gauss–Legendre.
    """

    atoms: np.ndarray | None = None
    alpha: float | None = None
    beta: float | None = None
    scale: float = 1.0
    density: Callable | None = None
    quad_order: int = DEFAULT_QUAD_ORDER
    name: str = field(default="mu")

    def __post_init__(self):
        kinds = (self.atoms is not None) + (self.alpha is not None) + (self.density is not None)
        if kinds != 1:
            raise ValueError("give exactly one of atoms, a Jacobi density, or a density callable")
        if self.atoms is not None:
            at = np.atleast_2d(np.asarray(self.atoms, dtype=float))
            if at.shape[1] != 2 or at.shape[0] == 0:
                raise ValueError("atoms must be rows (x, p)")
            if np.any(np.abs(at[:, 0]) > 1):
                raise ValueError("atoms must lie in [-1, 1]")
            if np.any(at[:, 1] <= 0):
                raise ValueError("atom weights must be positive")
            object.__setattr__(self, "atoms", at)
        if self.alpha is not None:
            if self.alpha <= -1 or self.beta is None or self.beta <= -1:
                raise ValueError("Jacobi exponents must exceed -1")
            if self.scale <= 0:
                raise ValueError("scale must be positive")
        if self.density is not None:
            x, _ = np.polynomial.legendre.leggauss(self.quad_order)
            if np.any(np.asarray(self.density(x)) < 0):
                raise ValueError("density is negative at a quadrature node")

    # constructors -----------------------------------------------------------
    @classmethod
    def from_atoms(cls, atoms, name="atoms") -> "MomentMeasure":
        return cls(atoms=np.asarray(atoms, dtype=float), name=name)

    @classmethod
    def jacobi(cls, alpha: float, beta: float, scale: float = 1.0, quad_order: int = DEFAULT_QUAD_ORDER, name="jacobi"):
        return cls(alpha=alpha, beta=beta, scale=scale, quad_order=quad_order, name=name)

    @classmethod
    def lebesgue(cls, scale: float = 1.0, quad_order: int = DEFAULT_QUAD_ORDER) -> "MomentMeasure":
        return cls.jacobi(0.0, 0.0, scale, quad_order, name="lebesgue")

    @classmethod
    def from_json(cls, obj: dict) -> "MomentMeasure":
        """``{"atoms": [[x, p], ...]}`` or ``{"density": name, "params": {...}, "quad_order": n}``."""
        if "atoms" in obj:
            return cls.from_atoms(obj["atoms"])
        if "density" not in obj:
            raise ValueError("measure needs 'atoms' or 'density'")
        fam = obj["density"]
        params = dict(obj.get("params", {}))
        order = int(obj.get("quad_order", DEFAULT_QUAD_ORDER))
        scale = float(params.pop("scale", 1.0))
        if fam in _FAMILIES:
            a, b = _FAMILIES[fam]
        elif fam == "jacobi":
            a, b = float(params.pop("alpha")), float(params.pop("beta"))
        elif fam == "power":
            a = b = float(params.pop("exponent"))
        else:
            raise ValueError(f"unknown density family {fam!r}")
        if params:
            raise ValueError(f"unused density parameters {sorted(params)}")
        return cls.jacobi(a, b, scale, order, name=fam)

    # quadrature view ---------------------------------------------------------
    @property
    def is_atomic(self) -> bool:
        return self.atoms is not None

    def nodes_weights(self):
        """Support points and masses; exact for atoms, a Gauss rule otherwise."""
        if self.atoms is not None:
            return self.atoms[:, 0], self.atoms[:, 1]
        if self.alpha is not None:
            x, w = roots_jacobi(self.quad_order, self.alpha, self.beta)
            return x, self.scale * w
        x, w = np.polynomial.legendre.leggauss(self.quad_order)
        return x, w * np.asarray(self.density(x))

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.nodes_weights()[1]))

    def exact_degree(self) -> int:
        """Highest polynomial degree integrated exactly (``-1`` if unknown)."""
        if self.atoms is not None:
            return np.iinfo(np.int64).max
        if self.alpha is not None:
            return 2 * self.quad_order - 1
        return self.quad_order // 4


def moments(mu: MomentMeasure, n_max: int):
    """``(m, gamma)`` with ``m_n = int x^n d mu`` and ``gamma = m/2``."""
    if n_max > mu.exact_degree():
        raise QuadratureUnderresolved(f"quad_order {mu.quad_order} too low for moments up to {n_max}")
    x, w = mu.nodes_weights()
    m = (x[None, :] ** np.arange(n_max + 1)[:, None]) @ w
    return m, m / 2


@dataclass(frozen=True)
class HankelSymbol:
    gamma: np.ndarray
    n: int

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gamma))
        if g.size < 2 * self.n - 1:
            raise DimensionMismatch(f"need {2 * self.n - 1} symbol entries, got {g.size}")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_measure(cls, mu: MomentMeasure, n: int) -> "HankelSymbol":
        return cls(moments(mu, 2 * n - 1)[1], n)

    @property
    def tail_sq(self) -> float:
        return float(np.sum(np.abs(self.gamma[self.n:]) ** 2))


def hankel_matrix(gamma: HankelSymbol):
    i = np.arange(gamma.n)
    return gamma.gamma[i[:, None] + i[None, :]]


def shift_identity_residual(gamma: HankelSymbol) -> float:
    """``Gamma A - A^* Gamma`` on the top-left ``(N-1) x (N-1)`` block."""
    G = hankel_matrix(gamma)
    A = np.eye(gamma.n, k=-1)
    D = (G @ A - A.T @ G)[:-1, :-1]
    return float(np.max(np.abs(D))) if D.size else 0.0


class DissipativityReport(NamedTuple):
    is_dissipative: bool
    min_eig: float


def dissipativity_check(gamma: HankelSymbol, tol: float = 1e-10) -> DissipativityReport:
    """PSD test of ``[Re gamma_{n+m}]``, the real part of ``Gamma``."""
    R = np.real(hankel_matrix(gamma))
    evals = np.linalg.eigvalsh(R)
    scale = max(1.0, float(np.abs(evals).max()))
    lo = float(evals[0])
    return DissipativityReport(lo >= -tol * scale, lo)


def moment_matrices(mu: MomentMeasure, n: int):
    """``M = [m_{i+j}]`` and ``M' = [m_{i+j+1}]`` for ``i, j < n``."""
    m, _ = moments(mu, 2 * n)
    i = np.arange(n)
    idx = i[:, None] + i[None, :]
    return m[idx], m[idx + 1]


class HankelOsr(NamedTuple):
    realization: OsrRealization
    atoms_recovered: np.ndarray


def hankel_osr(mu: MomentMeasure, n: int, tol: float = 1e-10) -> HankelOsr:
    if mu.is_atomic and n <= mu.atoms.shape[0]:
        raise ValueError(f"need n > {mu.atoms.shape[0]} (number of atoms)")
    if not mu.is_atomic and n < 1:
        raise ValueError("need n >= 1")
    M, Mp = moment_matrices(mu, n)
    real = osr_construct(CompressedSystem(M, m_u=Mp, tol=tol))
    return HankelOsr(real, np.sort(real.spectrum()))


def poly_eval(h, x):
    """``sum h[k] x^k``."""
    return np.polynomial.polynomial.polyval(np.asarray(x), np.asarray(h))


class WmuReport(NamedTuple):
    values: np.ndarray
    norm: float
    moment_norm: float


def w_mu(h, mu: MomentMeasure) -> WmuReport:
    """``h`` on the support of ``mu`` and its ``L^2(mu)`` norm.

    ``moment_norm`` is the same norm read off the moment matrix,
    ``(h^* M h)^{1/2}``.
    """
    h = np.atleast_1d(np.asarray(h))
    x, w = mu.nodes_weights()
    vals = poly_eval(h, x)
    norm = float(np.sqrt(np.sum(w * np.abs(vals) ** 2)))
    m, _ = moments(mu, 2 * (h.size - 1))
    i = np.arange(h.size)
    M = m[i[:, None] + i[None, :]]
    mn = float(np.sqrt(max(np.real(np.vdot(h, M @ h)), 0.0)))
    return WmuReport(vals, norm, mn)


def w_mu_adjoint(phi, mu: MomentMeasure, n_max: int):
    """Coefficients ``c_n = int x^n phi(x) d mu`` of ``int (1 - xz)^{-1} phi d mu``.

    ``phi`` is given by its values at ``mu.nodes_weights()[0]``.
    """
    x, w = mu.nodes_weights()
    if np.any(np.abs(x) >= 1):
        raise BoundaryAtom("measure has mass at +-1; the coefficients are not square summable")
    phi = np.asarray(phi)
    if phi.shape != x.shape:
        raise DimensionMismatch(f"phi has shape {phi.shape}, support has {x.shape}")
    return (x[None, :] ** np.arange(n_max + 1)[:, None]) @ (w * phi)


def adjointness_residual(h, phi, mu: MomentMeasure) -> float:
    h = np.atleast_1d(np.asarray(h, dtype=complex))
    x, w = mu.nodes_weights()
    lhs = np.sum(w * np.conj(poly_eval(h, x)) * phi)
    rhs = np.vdot(h, w_mu_adjoint(phi, mu, h.size - 1))
    return float(abs(lhs - rhs))


class KernelReport(NamedTuple):
    nullity: int
    witness: np.ndarray | None
    min_eig: float


def kernel_diagnostics(mu: MomentMeasure, n: int, rtol: float = 1e-13) -> KernelReport:
    """Numerical nullity of ``M = [m_{i+j}]`` at truncation ``n``.

    Eigenvalues below ``rtol * ||M||`` count as null.  For atomic measures
    the witness is the monic polynomial vanishing at the atoms, padded to
    length ``n`` (``None`` when it does not fit).
    """
    M, _ = moment_matrices(mu, n)
    evals = np.linalg.eigvalsh(M)
    nullity = int(np.sum(evals <= rtol * evals[-1]))
    witness = None
    if mu.is_atomic:
        roots = np.unique(mu.atoms[:, 0])
        coeffs = np.polynomial.polynomial.polyfromroots(roots).real
        if coeffs.size <= n:
            witness = np.pad(coeffs, (0, n - coeffs.size))
    return KernelReport(nullity, witness, float(evals[0]))


def arcsine_integral(mu: MomentMeasure) -> float:
    """``int (1 - x^2)^{-1/2} d mu``; ``inf`` when it diverges."""
    if mu.is_atomic:
        x, p = mu.atoms[:, 0], mu.atoms[:, 1]
        if np.any(np.abs(x) >= 1):
            return float("inf")
        return float(np.sum(p / np.sqrt(1 - x * x)))
    if mu.alpha is not None:
        a, b = mu.alpha - 0.5, mu.beta - 0.5
        if a <= -1 or b <= -1:
            return float("inf")
        x, w = roots_jacobi(mu.quad_order, a, b)
        return float(mu.scale * np.sum(w))
    x, w = mu.nodes_weights()
    return float(np.sum(w / np.sqrt(1 - x * x)))


class DomainReport(NamedTuple):
    tail_norms: np.ndarray
    non_increasing: bool
    arcsine_integral: float | None
    integrable: bool | None


def domain_diagnostics(gamma: HankelSymbol, mu: MomentMeasure | None = None) -> DomainReport:
    g = np.abs(gamma.gamma) ** 2
    tails = np.sqrt(np.cumsum(g[::-1])[::-1])
    mono = bool(np.all(np.diff(tails) <= 1e-15 * max(tails[0], 1.0)))
    if mu is None:
        return DomainReport(tails, mono, None, None)
    val = arcsine_integral(mu)
    return DomainReport(tails, mono, val, bool(np.isfinite(val)))


class ResolventReport(NamedTuple):
    x: np.ndarray
    residual: float
    inverse_norm_bound: float


def resolvent_solve(gamma: HankelSymbol, b) -> ResolventReport:
    """Solve ``(I + Gamma) x = b``.

    ``Re(I + Gamma) >= I`` gives ``||(I + Gamma)^{-1}|| <= 1``.
    """
    rep = dissipativity_check(gamma)
    if not rep.is_dissipative:
        raise NotDissipative(f"real part has eigenvalue {rep.min_eig:.3e}")
    b = np.asarray(b)
    A = np.eye(gamma.n) + hankel_matrix(gamma)
    x = np.linalg.solve(A, b)
    res = float(np.linalg.norm(A @ x - b))
    return ResolventReport(x, res, 1.0)


def _tail_mass(mu: MomentMeasure, t: float) -> float:
    """``mu({|x| >= t})``."""
    if mu.is_atomic:
        x, p = mu.atoms[:, 0], mu.atoms[:, 1]
        return float(np.sum(p[np.abs(x) >= t]))
    if mu.alpha is not None:
        a, b, c = mu.alpha, mu.beta, mu.scale
        right = integrate.quad(lambda x: (1 + x) ** b, t, 1, weight="alg", wvar=(0.0, a))[0]
        left = integrate.quad(lambda x: (1 - x) ** a, -1, -t, weight="alg", wvar=(b, 0.0))[0]
        return float(c * (right + left))
    f = mu.density
    return float(integrate.quad(f, t, 1)[0] + integrate.quad(f, -1, -t)[0])


class BoundednessReport(NamedTuple):
    carleson_ratio: float
    gamma_decay: float
    ladder: np.ndarray
    op_norms: np.ndarray


def boundedness_diagnostics(mu: MomentMeasure, n: int) -> BoundednessReport:
    """Carleson ratio, ``max k |gamma_k|`` and ``||Gamma_N||`` for ``N = 2, 4, ..., n``."""
    grid = np.unique(np.r_[np.linspace(0.0, 0.95, 20), 1.0 - 2.0 ** -np.arange(2, 21)])
    ratio = max(_tail_mass(mu, t) / (1.0 - t) for t in grid)
    _, gamma = moments(mu, 2 * n - 1)
    decay = float(np.max(np.arange(gamma.size) * np.abs(gamma)))
    ladder = []
    N = 2
    while N <= n:
        ladder.append(N)
        N *= 2
    norms = [np.linalg.norm(hankel_matrix(HankelSymbol(gamma, k)), 2) for k in ladder]
    return BoundednessReport(float(ratio), decay, np.array(ladder), np.array(norms))
