"""The dilation model on ``(-1, 1)`` with parameter ``0 < s < 1``.

Two forms live on test functions supported in ``(-1, 1)``:

* the singular form ``int int f1(x) |x - y|^{s-1} f2(y) dx dy`` (``hs_form``);
* the reflected form ``int int f1(x) (1 - x y)^{s-1} f2(y) dx dy`` (``j_form``).

The reflected form is the pull-back of the reproducing-kernel space with
kernel ``(1 - z conj(w))^{s-1}``, in which monomials are orthogonal with
``||z^n||^2 = n!/((1-s)(2-s)...(n-s))`` and the dilations act diagonally.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaln

from .errors import ParameterOutOfRange, QuadratureUnderresolved
from .linops import InnerProductSpace
from .osr import CompressedSystem, OsrRealization, IntertwinerReport, intertwiner, osr_construct
from .quadrature import DEFAULT_ORDER, SingularQuadrature, TestFunction, bump, gauss_legendre

DEFAULT_N_MAX = 32


def _check_s(s: float):
    if not 0 < s < 1:
        raise ParameterOutOfRange(f"s = {s} must lie in (0, 1)")


def _check_a(a: float):
    if not a > 1:
        raise ParameterOutOfRange(f"a = {a} must exceed 1")


def log_binom_s_minus_1(s: float, n_max: int):
    """``(sign, log|binom(s-1, n)|)`` for ``n = 0..n_max``.

    Uses ``binom(s-1, n) = binom(s-1, n-1) (s-n)/n``, accumulated in logs.
    """
    _check_s(s)
    k = np.arange(1, n_max + 1)
    logabs = np.concatenate([[0.0], np.cumsum(np.log(np.abs((s - k) / k)))])
    sign = (-1.0) ** np.arange(n_max + 1)
    return sign, logabs


def kernel_coefficients(s: float, n_max: int):
    """``(-1)^n binom(s-1, n) = (1-s)(2-s)...(n-s)/n!``, all positive."""
    sign, logabs = log_binom_s_minus_1(s, n_max)
    return np.exp(logabs)


def log_rising(s: float, n_max: int):
    """``log((1-s)(2-s)...(n-s))``."""
    return gammaln(np.arange(n_max + 1) + 1 - s) - gammaln(1 - s)


@dataclass(frozen=True)
class RepKernelSpace:
    """Polynomials of degree ``<= n_max`` with the diagonal Gram ``g_n``."""

    s: float
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        _check_s(self.s)
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def diag(self):
        return 1.0 / kernel_coefficients(self.s, self.n_max)

    @property
    def gram(self):
        return np.diag(self.diag)

    @property
    def space(self) -> InnerProductSpace:
        return InnerProductSpace(self.gram)

    def norm_sq(self, coeffs) -> float:
        c = np.asarray(coeffs)
        return float(np.sum(np.abs(c) ** 2 * self.diag[: c.size]))


def rep_gram(s: float, n_max: int = DEFAULT_N_MAX):
    """Diagonal Gram ``g_n = n!/((1-s)(2-s)...(n-s))`` of the monomials."""
    return RepKernelSpace(s, n_max).gram


def scaling_operator(a: float, space: RepKernelSpace):
    """``F(z) -> a^{s-1} F(z/a^2)``: diagonal with entries ``a^{s-1-2n}``."""
    _check_a(a)
    n = np.arange(space.n_max + 1)
    return np.diag(a ** (space.s - 1 - 2 * n))


def diagonal_model(s: float, a: float, n_max: int = DEFAULT_N_MAX):
    space = RepKernelSpace(s, n_max)
    return space, scaling_operator(a, space)


class WcResult(NamedTuple):
    coeffs: np.ndarray
    tail_bound: float


def wc_transform(k: TestFunction, space: RepKernelSpace, order: int = DEFAULT_ORDER) -> WcResult:
    """Taylor coefficients of ``int k(x) (1 - x z)^{s-1} dx``.

    ``c_n = (1-s)_n/n! * int x^n k``.  The tail bound majorizes the
    neglected part of the norm, ``sum_{n > n_max} |c_n|^2 g_n``, by
    ``(int |k|)^2 rho^{2(n_max+1)}/(1 - rho^2)`` with ``rho`` the support
    radius about 0.
    """
    mom = k.moments(space.n_max, order)
    coeffs = kernel_coefficients(space.s, space.n_max) * mom
    x, w = gauss_legendre(k.lo, k.hi, order)
    l1 = float(np.sum(w * np.abs(k(x))))
    rho = max(abs(k.lo), abs(k.hi))
    tail = l1**2 * rho ** (2 * (space.n_max + 1)) / (1 - rho**2) if rho < 1 else np.inf
    return WcResult(coeffs, float(tail))


def rep_norm_sq(k: TestFunction, s: float, n_max: int, order: int = DEFAULT_ORDER) -> float:
    space = RepKernelSpace(s, n_max)
    return space.norm_sq(wc_transform(k, space, order).coeffs)


def _kernel(x, y, s):
    return np.exp((s - 1) * np.log1p(-np.multiply.outer(x, y)))


def j_form(
    k1: TestFunction,
    k2: TestFunction,
    s: float,
    order: int = DEFAULT_ORDER,
    method: str = "quadrature",
    n_max: int | None = None,
) -> float:
    """``int int k1(x) (1 - x y)^{s-1} k2(y) dx dy`` for real ``k1, k2``.

    ``method="series"`` sums ``(1-s)_n/n! m_n(k1) m_n(k2)`` up to ``n_max``.
    """
    _check_s(s)
    if order < 16:
        raise QuadratureUnderresolved(f"order {order} < 16")
    if method == "series":
        n_max = 2 * order - 32 if n_max is None else n_max
        m1 = k1.moments(n_max, order)
        m2 = k2.moments(n_max, order)
        return float(np.sum(kernel_coefficients(s, n_max) * m1 * m2))
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    x1, w1 = k1.rule(order)
    x2, w2 = k2.rule(order)
    return float(w1 @ _kernel(x1, x2, s) @ w2)


def _overlap_correlation(f1: TestFunction, f2: TestFunction, u, order: int):
    """``C(u) = int f1(x) f2(x + u) dx`` at each ``u``."""
    u = np.atleast_1d(u)
    lo = np.maximum(f1.lo, f2.lo - u)
    hi = np.minimum(f1.hi, f2.hi - u)
    width = np.clip(hi - lo, 0.0, None)
    t, w = np.polynomial.legendre.leggauss(order)
    x = lo[:, None] + 0.5 * width[:, None] * (t[None, :] + 1)
    vals = f1(x) * f2(x + u[:, None])
    return 0.5 * width * (vals @ w)


def hs_form(
    f1: TestFunction,
    f2: TestFunction,
    s: float,
    squad: SingularQuadrature | None = None,
    order: int = DEFAULT_ORDER,
) -> float:
    """``int int f1(x) |x - y|^{s-1} f2(y) dx dy`` for real ``f1, f2``.

    Substituting ``y = x + u`` leaves ``int |u|^{s-1} C(u) du``.  The
    ``u``-range is cut at 0 and at the kinks of ``C``; pieces touching 0 use
    the Gauss–Jacobi rule in ``squad``, the rest plain Gauss–Legendre.
    """
    _check_s(s)
    squad = SingularQuadrature(s) if squad is None else squad
    if squad.s != s:
        raise ValueError("squad built for a different s")
    if squad.order < 8 or order < 16:
        raise QuadratureUnderresolved("singular rule needs order >= 8 and inner order >= 16")
    lo, hi = f2.lo - f1.hi, f2.hi - f1.lo
    cuts = {lo, hi}
    for c in (0.0, f2.lo - f1.lo, f2.hi - f1.hi):
        if lo < c < hi:
            cuts.add(c)
    cuts = sorted(cuts)
    tiny = 1e-14 * (hi - lo)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= tiny:
            continue
        if abs(a) <= tiny:
            total += squad.integrate(lambda u: _overlap_correlation(f1, f2, a + u, order), b - a)
        elif abs(b) <= tiny:
            total += squad.integrate(lambda u: _overlap_correlation(f1, f2, b - u, order), b - a)
        else:
            u, w = gauss_legendre(a, b, squad.order)
            total += np.dot(w, np.abs(u) ** (s - 1) * _overlap_correlation(f1, f2, u, order))
    return float(total)


def delta_norms(s: float, n_max: int):
    """``||delta^(n)||_J^2 = n! (1-s)(2-s)...(n-s)``."""
    _check_s(s)
    k = np.arange(1, n_max + 1)
    return np.concatenate([[1.0], np.cumprod(k * (k - s))])


def log_delta_norms(s: float, n_max: int):
    _check_s(s)
    return gammaln(np.arange(n_max + 1) + 1.0) + log_rising(s, n_max)


def delta_gram_consistency(s: float, n_max: int) -> float:
    """Worst relative gap between ``n!(1-s)_n`` and ``g_n ((1-s)_n)^2``.

    Both sides in logs, so large ``n`` does not overflow.
    """
    sign, logabs = log_binom_s_minus_1(s, n_max)
    log_g = -logabs
    rhs = log_g + 2 * log_rising(s, n_max)
    return float(np.max(np.abs(np.expm1(rhs - log_delta_norms(s, n_max)))))


def delta_pairing(k: TestFunction, s: float, n: int, order: int = DEFAULT_ORDER) -> float:
    """``<delta^(n), k>_J = (s-1)(s-2)...(s-n) int x^n k(x) dx``."""
    _check_s(s)
    falling = np.prod(s - np.arange(1, n + 1))
    return float(falling * k.moments(n, max(order, 16 + n))[n])


def _slope(eps, vals) -> float:
    return float(np.polyfit(np.log(eps), np.log(vals), 1)[0])


def _check_grid(eps_grid):
    eps = np.asarray(eps_grid, dtype=float)
    if eps.ndim != 1 or eps.size < 4 or np.unique(eps).size < 4:
        raise ValueError("eps_grid needs at least 4 distinct points")
    if eps.min() <= 0 or eps.max() > 0.25:
        raise ValueError("eps_grid must lie in (0, 1/4]")
    return eps


class ScalingExperiment(NamedTuple):
    eps: np.ndarray
    hs: np.ndarray
    j: np.ndarray
    j_defect: np.ndarray
    slope_hs: float
    slope_j: float


def j_distance_to_delta(phi: TestFunction, s: float, order: int = DEFAULT_ORDER) -> float:
    """``||phi - delta_0||_J^2`` for ``int phi = 1``.

    Equals ``int int phi(x)[(1 - x y)^{s-1} - 1]phi(y) + (int phi - 1)^2``;
    the bracket is evaluated with ``expm1`` so that small supports keep
    their digits.
    """
    x, w = phi.rule(order)
    kern = np.expm1((s - 1) * np.log1p(-np.multiply.outer(x, x)))
    return float(w @ kern @ w + (w.sum() - 1.0) ** 2)


def epsilon_scaling_experiment(
    phi: TestFunction,
    s: float,
    eps_grid,
    order: int = DEFAULT_ORDER,
) -> ScalingExperiment:
    """Log-log slopes for the mollifiers ``phi_eps(x) = phi(x/eps)/eps``.

    ``slope_hs`` fits ``hs_form(phi_eps, phi_eps)``.  ``j_form(phi_eps,
    phi_eps)`` itself tends to ``(int phi)^2 = 1``; ``slope_j`` fits the
    distance ``||phi_eps - delta_0||_J^2``, which is of order ``eps^2`` when
    ``phi`` has a nonzero first moment.
    """
    _check_s(s)
    eps = _check_grid(eps_grid)
    squad = SingularQuadrature(s)
    hs = np.empty(eps.size)
    jv = np.empty(eps.size)
    jd = np.empty(eps.size)
    for i, e in enumerate(eps):
        pe = phi.dilate(e)
        hs[i] = hs_form(pe, pe, s, squad, order)
        jv[i] = j_form(pe, pe, s, order)
        jd[i] = j_distance_to_delta(pe, s, order)
    return ScalingExperiment(eps, hs, jv, jd, _slope(eps, hs), _slope(eps, jd))


class MollifierReport(NamedTuple):
    eps: np.ndarray
    max_deviation: np.ndarray
    max_derivative: np.ndarray
    derivative_slope: float
    deviation_decreasing: bool


def mollifier_values(phi: TestFunction, s: float, y, eps: float, order: int = DEFAULT_ORDER):
    """``L_eps(y) = int phi_eps(x) (1 - x y)^{s-1} dx`` and ``dL_eps/dy``."""
    pe = phi.dilate(eps)
    x, w = pe.rule(order)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    base = 1.0 - np.multiply.outer(y, x)
    val = (base ** (s - 1)) @ w
    der = ((s - 1) * base ** (s - 2) * (-x[None, :])) @ w
    return val, der


def mollifier_limit_check(phi: TestFunction, s: float, y_grid, eps_grid, order: int = DEFAULT_ORDER) -> MollifierReport:
    _check_s(s)
    eps = np.sort(_check_grid(eps_grid))[::-1]
    dev = np.empty(eps.size)
    der = np.empty(eps.size)
    for i, e in enumerate(eps):
        v, d = mollifier_values(phi, s, y_grid, e, order)
        dev[i] = np.max(np.abs(v - 1.0))
        der[i] = np.max(np.abs(d))
    return MollifierReport(eps, dev, der, _slope(eps, der), bool(np.all(np.diff(dev) <= 1e-15)))


# ---------------------------------------------------------------------------
# Point-mass discretization of K_s and the monomial realization


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss–Legendre nodes on ``[-radius, radius]``.

    With ``dps`` set, ``nodes`` and ``weights`` are object arrays of
    ``mpmath.mpf`` holding the same numbers, so downstream forms can be
    evaluated past double precision.
    """

    n_quad: int
    radius: float = 0.5
    dps: int | None = None

    def __post_init__(self):
        if self.n_quad < 32:
            raise QuadratureUnderresolved(f"n_quad = {self.n_quad} < 32")
        if not 0 < self.radius < 1:
            raise ParameterOutOfRange("radius must lie in (0, 1)")

    def arrays(self):
        x, w = gauss_legendre(-self.radius, self.radius, self.n_quad)
        if self.dps is None:
            return x, w
        with mpmath.workdps(self.dps):
            return (np.array([mpmath.mpf(v) for v in x], dtype=object),
                    np.array([mpmath.mpf(v) for v in w], dtype=object))


def _kernel_matrix(x, w, s, shrink, dps):
    """``w_i w_j (1 - x_i x_j / shrink)^{s-1}``."""
    if dps is None:
        return np.outer(w, w) * (1.0 - np.outer(x, x) / shrink) ** (s - 1)
    n = len(x)
    out = np.empty((n, n), dtype=object)
    with mpmath.workdps(dps):
        sm = mpmath.mpf(s) - 1
        sh = mpmath.mpf(shrink)
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = w[i] * w[j] * mpmath.power(1 - x[i] * x[j] / sh, sm)
    return out


def scaling_osr_quadrature(
    s: float,
    a: float,
    n_quad: int = 64,
    radius: float = 0.5,
    dps: int | None = None,
    tol: float | None = None,
) -> CompressedSystem:
    """Compressed system of the dilation model on a point-mass grid.

    ``K`` is spanned by ``w_i delta_{x_i}`` (Gauss nodes ``x_i`` in
    ``[-radius, radius]``).  The dilation ``f -> a^{s+1} f(a^2 x)`` sends
    ``delta_x`` to ``a^{s-1} delta_{x/a^2}``, which stays inside the
    support, so the ``JU``-form is exact on the grid:
    ``M'_ij = a^{s-1} w_i w_j (1 - x_i x_j/a^2)^{s-1}``.
    """
    _check_s(s)
    _check_a(a)
    grid = QuadratureGrid(n_quad, radius, dps)
    x, w = grid.arrays()
    m = _kernel_matrix(x, w, s, 1.0, dps)
    mu = _kernel_matrix(x, w, s, a * a, dps)
    if dps is None:
        mu = a ** (s - 1) * mu
        tol = 1e-12 if tol is None else tol
    else:
        with mpmath.workdps(dps):
            c = mpmath.power(mpmath.mpf(a), mpmath.mpf(s) - 1)
            mu = mu * c
        tol = mpmath.mpf(10) ** (-(dps // 2)) if tol is None else tol
    return CompressedSystem(m, m_u=mu, tol=tol)


def monomial_realization(
    s: float,
    a: float,
    n_quad: int = 64,
    radius: float = 0.5,
    n_max: int = 80,
    dps: int | None = None,
) -> OsrRealization:
    """The same grid mapped into the monomial coordinates of the kernel space.

    ``W[n, i] = sqrt((1-s)_n/n!) w_i x_i^n`` in the orthonormal basis
    ``z^n/sqrt(g_n)``; ``S`` is the diagonal scaling operator.
    """
    _check_s(s)
    _check_a(a)
    x, w = QuadratureGrid(n_quad, radius, dps).arrays()
    n = np.arange(n_max + 1)
    if dps is None:
        W = np.sqrt(kernel_coefficients(s, n_max))[:, None] * x[None, :] ** n[:, None] * w[None, :]
    else:
        W = np.empty((n_max + 1, n_quad), dtype=object)
        with mpmath.workdps(dps):
            sm = mpmath.mpf(s)
            for k in range(n_max + 1):
                cf = mpmath.sqrt(mpmath.rf(1 - sm, k) / mpmath.factorial(k))
                for i in range(n_quad):
                    W[k, i] = cf * x[i] ** k * w[i]
    Wf = np.array(W.tolist(), dtype=float)
    S = scaling_operator(a, RepKernelSpace(s, n_max))
    rank = int(np.linalg.matrix_rank(Wf))
    return OsrRealization(
        hk=InnerProductSpace.standard(n_max + 1),
        w=W,
        s=S,
        nullity=n_quad - rank,
        w_pinv=np.linalg.pinv(Wf),
        dps=dps,
    )


class UniquenessReport(NamedTuple):
    quadrature: OsrRealization
    monomial: OsrRealization
    intertwiner: IntertwinerReport


def scaling_uniqueness(
    s: float = 0.5,
    a: float = 2.0,
    n_quad: int = 32,
    radius: float = 0.5,
    n_max: int = 80,
    dps: int | None = 50,
) -> UniquenessReport:
    """Intertwiner from the point-mass realization to the monomial one."""
    cs = scaling_osr_quadrature(s, a, n_quad, radius, dps)
    r1 = osr_construct(cs, dps=dps)
    r2 = monomial_realization(s, a, n_quad, radius, n_max, dps)
    return UniquenessReport(r1, r2, intertwiner(r1, r2))


# ---------------------------------------------------------------------------
# Frequency side


def fourier_constant(s: float) -> float:
    """``hs_form / frequency integral`` for ``f_hat(xi) = int e^{-i xi x} f``.

    The distributional transform of ``|x|^{s-1}`` is
    ``2 Gamma(s) cos(pi s/2) |xi|^{-s}``, so the ratio is
    ``Gamma(s) cos(pi s/2)/pi``.
    """
    _check_s(s)
    return float(gamma_fn(s) * np.cos(np.pi * s / 2) / np.pi)


def frequency_integral(f: TestFunction, s: float, xi_max: float | None = None, panels: int | None = None) -> float:
    """``int_R |xi|^{-s} |f_hat(xi)|^2 d xi`` for real ``f``."""
    _check_s(s)
    r = f.radius
    xi_max = 600.0 / r if xi_max is None else xi_max
    n_x = int(xi_max * r) + 120
    x, wx = gauss_legendre(f.lo, f.hi, n_x)
    fw = wx * f(x)

    def power(xi):
        # chunked to keep the phase matrix small
        out = np.empty(xi.size)
        for k in range(0, xi.size, 512):
            ph = np.exp(-1j * np.multiply.outer(xi[k:k + 512], x))
            out[k:k + 512] = np.abs(ph @ fw) ** 2
        return out

    head_len = min(1.0 / r, xi_max)
    total = SingularQuadrature(1.0 - s, 40).integrate(power, head_len)
    panels = int(np.ceil((xi_max - head_len) * r / 2.0)) if panels is None else panels
    edges = np.linspace(head_len, xi_max, panels + 1)
    t, w = np.polynomial.legendre.leggauss(24)
    half = 0.5 * np.diff(edges)
    xi = (edges[:-1, None] + half[:, None] * (t[None, :] + 1)).ravel()
    ww = (half[:, None] * w[None, :]).ravel()
    total += np.dot(ww, xi ** (-s) * power(xi))
    return float(2.0 * total)


class FourierReport(NamedTuple):
    hs: float
    frequency: float
    ratio: float
    constant_closed_form: float


def fourier_norm_check(f: TestFunction, s: float) -> FourierReport:
    hs = hs_form(f, f, s)
    fr = frequency_integral(f, s)
    return FourierReport(hs, fr, hs / fr, fourier_constant(s))


def default_mollifier() -> TestFunction:
    """Off-center smooth bump with unit mass and nonzero first moment."""
    return bump(center=0.3, radius=0.5)
