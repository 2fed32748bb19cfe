"""Pick and Carathéodory matrices against J-positivity of kernel subspaces.

Kernel pairs live in ``H^2 ⊕ H^2`` truncated to Taylor degree ``n``.  The
column for node ``z_i`` is ``(z_i^k)_k`` in the first block and
``(w_i z_i^k)_k`` in the second, so that ``<k_i, k_j> = 1/(1 - conj(z_i) z_j)``
in the same index order as the matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DuplicateNodes, NotAKernel, OutsideDisk, TruncationUnderresolved

TAIL_TARGET = 1e-12
VARIANTS = ("pick", "caratheodory")


def _complex_list(v):
    a = np.asarray(v)
    if a.ndim == 2 and a.shape[1] == 2 and not np.iscomplexobj(a):
        return a[:, 0] + 1j * a[:, 1]
    return np.atleast_1d(a).astype(complex)


@dataclass(frozen=True)
class InterpolationData:
    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        z = _complex_list(self.z)
        w = _complex_list(self.w)
        if z.shape != w.shape or z.ndim != 1 or z.size == 0:
            raise ValueError("z and w must be nonempty lists of equal length")
        if np.any(np.abs(z) >= 1):
            raise OutsideDisk("nodes must lie in the open unit disk")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        if self.min_separation < 1e-12:
            raise DuplicateNodes(f"nodes coincide (separation {self.min_separation:.3e})")

    @property
    def n(self) -> int:
        return self.z.size

    @property
    def min_separation(self) -> float:
        if self.z.size < 2:
            return float("inf")
        d = np.abs(self.z[:, None] - self.z[None, :])
        return float(d[~np.eye(self.z.size, dtype=bool)].min())

    @classmethod
    def from_json(cls, obj: dict) -> "InterpolationData":
        return cls(_complex_list(obj["z"]), _complex_list(obj["w"]))


def _szego(z):
    return 1.0 / (1.0 - np.conj(z)[:, None] * z[None, :])


def pick_matrix(data: InterpolationData):
    """``(1 - conj(w_i) w_j)/(1 - conj(z_i) z_j)``."""
    w = data.w
    return (1.0 - np.conj(w)[:, None] * w[None, :]) * _szego(data.z)


def caratheodory_matrix(data: InterpolationData):
    """``(conj(w_i) + w_j)/(1 - conj(z_i) z_j)``."""
    w = data.w
    return (np.conj(w)[:, None] + w[None, :]) * _szego(data.z)


def reflection(variant: str, n_trunc: int):
    """``diag(I, -I)`` for Pick, the block swap for Carathéodory."""
    d = n_trunc + 1
    if variant == "pick":
        return np.diag(np.r_[np.ones(d), -np.ones(d)])
    if variant == "caratheodory":
        Z, I = np.zeros((d, d)), np.eye(d)
        return np.block([[Z, I], [I, Z]])
    raise ValueError(f"variant must be one of {VARIANTS}")


def tail_bound(data: InterpolationData, n_trunc: int) -> float:
    """Entrywise bound on the neglected part of the compressed form."""
    r2 = float(np.max(np.abs(data.z))) ** 2
    wmax = max(1.0, float(np.max(np.abs(data.w))))
    return 2.0 * wmax**2 * r2 ** (n_trunc + 1) / (1.0 - r2)


def auto_truncation(data: InterpolationData, target: float = TAIL_TARGET) -> int:
    r = float(np.max(np.abs(data.z)))
    if r == 0:
        return 0
    n = 0
    while tail_bound(data, n) > target:
        n = max(2 * n, 8)
    lo, hi = n // 2, n
    while lo < hi:
        mid = (lo + hi) // 2
        if tail_bound(data, mid) > target:
            lo = mid + 1
        else:
            hi = mid
    return hi


def kernel_subspace(data: InterpolationData, n_trunc: int | None = None, tol: float = 1e-10):
    """Columns ``(q_i, w_i q_i)`` with ``q_i = (z_i^k)_{k <= n_trunc}``."""
    n_trunc = auto_truncation(data) if n_trunc is None else n_trunc
    tail = tail_bound(data, n_trunc)
    if tail > tol:
        raise TruncationUnderresolved(f"tail bound {tail:.3e} at n_trunc={n_trunc}")
    k = np.arange(n_trunc + 1)
    q = data.z[None, :] ** k[:, None]
    return np.vstack([q, q * data.w[None, :]])


def compressed_form(data: InterpolationData, variant: str = "pick", n_trunc: int | None = None, tol: float = 1e-10):
    n_trunc = auto_truncation(data) if n_trunc is None else n_trunc
    C = kernel_subspace(data, n_trunc, tol)
    J = reflection(variant, n_trunc)
    A = C.conj().T @ J @ C
    return 0.5 * (A + A.conj().T)


def _matrix(data, variant):
    if variant == "pick":
        return pick_matrix(data)
    if variant == "caratheodory":
        return caratheodory_matrix(data)
    raise ValueError(f"variant must be one of {VARIANTS}")


class EquivalenceReport(NamedTuple):
    matrix_psd: bool
    subspace_psd: bool
    agree: bool
    indeterminate: bool
    matrix_min_eig: float
    subspace_min_eig: float
    band: float


def positivity_equivalence(data: InterpolationData, variant: str = "pick", n_trunc: int | None = None) -> EquivalenceReport:
    """Compare the PSD verdicts of the matrix and of the J-form on ``K``.

    A matrix counts as PSD when its smallest eigenvalue is ``>= -band``
    (truncation tail plus roundoff).  Cases with an eigenvalue inside the
    band are flagged ``indeterminate``: rank-deficient Pick matrices sit
    exactly on that boundary.
    """
    n_trunc = auto_truncation(data) if n_trunc is None else n_trunc
    P = _matrix(data, variant)
    F = compressed_form(data, variant, n_trunc, tol=np.inf)
    lo_m = float(np.linalg.eigvalsh(P)[0])
    lo_f = float(np.linalg.eigvalsh(F)[0])
    scale = max(1.0, float(np.linalg.norm(P, 2)))
    band = data.n * tail_bound(data, n_trunc) + 1e-10 * scale
    indet = min(abs(lo_m), abs(lo_f)) <= band
    mp, fp = lo_m >= -band, lo_f >= -band
    return EquivalenceReport(mp, fp, mp == fp, indet, lo_m, lo_f, band)


def random_instance(rng: np.random.Generator, n: int, radius: float = 0.9) -> InterpolationData:
    """Nodes uniform in the disk of the given radius, values uniform in the closed unit disk."""
    def disk(r, size):
        return r * np.sqrt(rng.uniform(size=size)) * np.exp(2j * np.pi * rng.uniform(size=size))

    return InterpolationData(disk(radius, n), disk(1.0, n))


def szego_kernel(z1, z2):
    return 1.0 / (1.0 - np.conj(z1) * z2)


def qs_kernel(s: float) -> Callable:
    """``(1 - conj(z1) z2)^{s-1}``."""
    return lambda z1, z2: (1.0 - np.conj(z1) * z2) ** (s - 1)


class KernelPositivity(NamedTuple):
    is_pd: bool
    min_eig: float


def general_kernel_positivity(q: Callable, omega0, phi, variant: str = "pick", tol: float = 1e-10) -> KernelPositivity:
    """PSD test of ``[(1 - conj(phi_i) phi_j) Q_ij]`` or ``[(conj(phi_i) + phi_j) Q_ij]``.

    ``Q_ij = q(z_i, z_j)``; the sample must be Hermitian.
    """
    z = _complex_list(omega0)
    phi = _complex_list(phi)
    if z.shape != phi.shape:
        raise ValueError("omega0 and phi must have equal length")
    Q = np.array([[q(a, b) for b in z] for a in z], dtype=complex)
    scale = max(1.0, float(np.abs(Q).max()))
    if np.abs(Q - Q.conj().T).max() > tol * scale:
        raise NotAKernel("kernel sample is not Hermitian")
    if variant == "pick":
        F = 1.0 - np.conj(phi)[:, None] * phi[None, :]
    elif variant == "caratheodory":
        F = np.conj(phi)[:, None] + phi[None, :]
    else:
        raise ValueError(f"variant must be one of {VARIANTS}")
    A = F * Q
    A = 0.5 * (A + A.conj().T)
    lo = float(np.linalg.eigvalsh(A)[0])
    return KernelPositivity(lo >= -tol * max(1.0, float(np.linalg.norm(A, 2))), lo)
