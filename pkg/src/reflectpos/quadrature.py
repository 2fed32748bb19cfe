"""Gauss rules and compactly supported test functions on (-1, 1)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from scipy.special import gammaln

from .errors import ParameterOutOfRange, QuadratureUnderresolved

DEFAULT_ORDER = 160


@lru_cache(maxsize=64)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(lo: float, hi: float, order: int = DEFAULT_ORDER):
    t, w = _leggauss(order)
    half = 0.5 * (hi - lo)
    return lo + half * (t + 1.0), half * w


@lru_cache(maxsize=64)
def _jacobi01(s: float, order: int):
    """Gauss–Jacobi rule for ``u^{s-1}`` on ``[0, 1]``.

    Computed at 30 digits: double-precision node solvers lose ~1e-11 in the
    moments once ``s - 1`` approaches -1.
    """
    with mpmath.workdps(30):
        t, w = mpmath.gauss_quadrature(order, "jacobi", 0, s - 1)
        u = np.array([float((ti + 1) / 2) for ti in t])
        wt = np.array([float(wi / mpmath.power(2, s)) for wi in w])
    u.setflags(write=False)
    wt.setflags(write=False)
    return u, wt


@dataclass(frozen=True)
class SingularQuadrature:
    """Gauss–Jacobi rule for ``int_0^1 u^{s-1} g(u) du``.

    Exact for polynomial ``g`` of degree ``<= 2*order - 1``.
    """

    s: float
    order: int = 60

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ParameterOutOfRange(f"s = {self.s} must lie in (0, 1)")

    @property
    def nodes_weights(self):
        return _jacobi01(float(self.s), int(self.order))

    def integrate(self, g: Callable, length: float = 1.0) -> complex:
        """``int_0^length u^{s-1} g(u) du``."""
        u, w = self.nodes_weights
        return length**self.s * np.dot(w, g(length * u))

    def moment_residual(self, kmax: int | None = None) -> float:
        """Worst error against ``int_0^1 u^{s-1} u^k du = 1/(s+k)``."""
        kmax = 2 * self.order - 1 if kmax is None else kmax
        u, w = self.nodes_weights
        k = np.arange(kmax + 1)
        approx = (w[None, :] * u[None, :] ** k[:, None]).sum(axis=1)
        return float(np.max(np.abs(approx - 1.0 / (self.s + k)) * (self.s + k)))


def _bump_profile(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


# int_{-1}^{1} exp(-1/(1-t^2)) dt
_BUMP_MASS = 0.44399381616807943


@dataclass(frozen=True)
class TestFunction:
    """A function vanishing outside ``[center - radius, center + radius]``."""

    func: Callable
    center: float = 0.0
    radius: float = 1.0
    name: str = "f"

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if self.radius <= 0 or abs(self.center) + self.radius > 1 + 1e-15:
            raise ValueError(f"support [{self.lo}, {self.hi}] not inside [-1, 1]")

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.asarray(self.func(x))
        return np.where((x >= self.lo) & (x <= self.hi), vals, 0.0)

    def rule(self, order: int = DEFAULT_ORDER):
        """Gauss nodes on the support and the weights times function values."""
        x, w = gauss_legendre(self.lo, self.hi, order)
        return x, w * self(x)

    def moments(self, n_max: int, order: int = DEFAULT_ORDER):
        """``int x^n f(x) dx`` for ``n = 0..n_max``."""
        if 2 * order < n_max + 32:
            raise QuadratureUnderresolved(f"order {order} too low for moments up to {n_max}")
        x, wf = self.rule(order)
        powers = x[None, :] ** np.arange(n_max + 1)[:, None]
        return powers @ wf

    def dilate(self, eps: float) -> "TestFunction":
        """``f_eps(x) = f(x/eps)/eps``."""
        f = self.func
        return TestFunction(
            lambda x: f(np.asarray(x) / eps) / eps,
            self.center * eps,
            self.radius * eps,
            f"{self.name}_eps{eps:g}",
        )

    def translate(self, shift: float) -> "TestFunction":
        f = self.func
        return TestFunction(lambda x: f(np.asarray(x) - shift), self.center + shift, self.radius, f"{self.name}+{shift:g}")

    def scale_action(self, a: float, s: float) -> "TestFunction":
        """``a^{s+1} f(a^2 x)``."""
        f = self.func
        c = a ** (s + 1)
        return TestFunction(lambda x: c * f(a * a * np.asarray(x)), self.center / a**2, self.radius / a**2, f"U({a:g}){self.name}")


def bump(center: float = 0.0, radius: float = 1.0, normalized: bool = True) -> TestFunction:
    """Smooth ``exp(-1/(1-t^2))`` bump, ``t = (x - center)/radius``."""
    scale = 1.0 / (radius * _BUMP_MASS) if normalized else 1.0
    return TestFunction(lambda x: scale * _bump_profile((np.asarray(x) - center) / radius), center, radius, "bump")


def poly_bump(center: float = 0.0, radius: float = 1.0, power: int = 4, normalized: bool = True) -> TestFunction:
    """``(1 - t^2)^power`` on the support; ``C^{power-1}`` at the edges."""
    mass = radius * np.exp(0.5 * np.log(np.pi) + gammaln(power + 1) - gammaln(power + 1.5))
    scale = 1.0 / mass if normalized else 1.0

    def f(x):
        t = (np.asarray(x) - center) / radius
        return scale * np.clip(1.0 - t * t, 0.0, None) ** power

    return TestFunction(f, center, radius, f"poly{power}")


def constant_one() -> TestFunction:
    """``f = 1`` on ``[-1, 1]``: not compactly supported inside, admitted as a limit case."""
    return TestFunction(lambda x: np.ones_like(np.asarray(x, dtype=float)), 0.0, 1.0, "one")


def times_poly(f: TestFunction, coeffs) -> TestFunction:
    """``p(x) f(x)`` with ``p = sum coeffs[k] x^k``."""
    c = np.asarray(coeffs, dtype=float)
    g = f.func
    return TestFunction(lambda x: np.polynomial.polynomial.polyval(np.asarray(x), c) * g(x), f.center, f.radius, f"p*{f.name}")
