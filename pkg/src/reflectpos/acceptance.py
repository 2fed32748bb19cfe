"""The twelve end-to-end acceptance checks.

Each check returns a :class:`Criterion` with the measured quantities, so the
same code backs the ``acceptance`` CLI command and the pytest suite.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import graphspace, hankel, hardy, linops, osr, pick, scaling
from .quadrature import bump, poly_bump, times_poly


class Criterion(NamedTuple):
    number: int
    name: str
    passed: bool
    details: dict

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}"


def scaling_spectrum() -> Criterion:
    s, a = 0.5, 2.0
    _, S = scaling.diagonal_model(s, a, 16)
    exact = a ** (s - 1 - 2 * np.arange(17))
    diag_err = float(np.max(np.abs(np.sort(np.linalg.eigvalsh(S))[::-1] - exact)))
    real = osr.osr_construct(scaling.scaling_osr_quadrature(s, a, 64))
    top = np.sort(real.spectrum())[::-1][:4]
    top = np.pad(top, (0, 4 - top.size))
    quad_err = float(np.max(np.abs(top - exact[:4])))
    return Criterion(1, "scaling spectrum", diag_err <= 1e-12 and quad_err <= 1e-6,
                     {"diagonal_error": diag_err, "quadrature_top4_error": quad_err, "quadrature_top4": top.tolist()})


def delta_table() -> Criterion:
    vals = scaling.delta_norms(0.5, 5)
    ref = np.array([1.0, 0.5, 1.5, 11.25, 157.5, 3543.75])
    err = float(np.max(np.abs(vals - ref) / ref))
    cons = scaling.delta_gram_consistency(0.5, 20)
    return Criterion(2, "delta-derivative norms", err <= 1e-12 and cons <= 1e-12,
                     {"values": vals.tolist(), "table_error": err, "gram_consistency": cons})


def hankel_atoms() -> Criterion:
    mu = hankel.MomentMeasure.from_atoms([[0.5, 0.5], [-0.5, 0.5]])
    r = hankel.hankel_osr(mu, 8)
    atom_err = float(np.max(np.abs(r.atoms_recovered - [-0.5, 0.5]))) if r.atoms_recovered.size == 2 else np.inf
    leb = hankel.hankel_osr(hankel.MomentMeasure.lebesgue(), 6)
    nodes = np.polynomial.legendre.leggauss(6)[0]
    gl_err = float(np.max(np.abs(leb.atoms_recovered - nodes)))
    ok = r.realization.dim == 2 and r.realization.nullity == 6 and atom_err <= 1e-10 and gl_err <= 1e-8
    return Criterion(3, "Hankel moment quotients", ok,
                     {"dim": r.realization.dim, "nullity": r.realization.nullity,
                      "atom_error": atom_err, "gauss_node_error": gl_err})


def hardy_rigidity() -> Criterion:
    worst = {"rank": 1, "dim": 1, "s_max": 0.0}
    ok = True
    for n in range(1, 33):
        cs = osr.compress(hardy.hardy_system(n))
        rank = int(np.linalg.matrix_rank(cs.m))
        real = osr.osr_construct(cs)
        s_max = float(np.max(np.abs(real.s))) if real.s.size else 0.0
        if rank != 1 or real.dim != 1 or s_max != 0.0:
            ok = False
            worst = {"n": n, "rank": rank, "dim": real.dim, "s_max": s_max}
    ft = hardy.FourierTruncation(16)
    defects = {}
    for label, coeffs in [("0", [0]), ("z/2", [0, 0.5]), ("z^2/2", [0, 0, 0.5]), ("1", [1])]:
        kb = hardy.kb_subspace(hardy.BoundedSymbol(np.array(coeffs)), 16)
        defects[label] = hardy.shift_invariance_defect(kb, ft.u)
    ok = ok and all(defects[k] > 0.05 for k in ("0", "z/2", "z^2/2")) and defects["1"] == 0.0
    return Criterion(4, "Hardy rigidity", ok, {"worst": worst, "defects": defects})


def norm_bound(trials: int = 1000, seed: int = 0) -> Criterion:
    rng = linops.rng_from_seed(seed)
    violations = 0
    worst = -np.inf
    for t in range(trials):
        dim = 2 * int(rng.integers(1, 7))
        null = int(rng.integers(0, dim // 2)) if rng.uniform() < 0.3 else 0
        sysm = osr.random_reflection_system(dim, seed=int(rng.integers(2**62)), null_directions=null)
        bound = float(np.sqrt(linops.spectral_radius(sysm.u @ sysm.u)))
        real = osr.osr_construct(osr.compress(sysm), spectral_bound=bound)
        excess = real.residuals["norm_excess"]
        worst = max(worst, excess)
        violations += excess > 1e-8
    return Criterion(5, "norm bound on random systems", violations == 0,
                     {"trials": trials, "violations": int(violations), "max_excess": float(worst)})


def uniqueness() -> Criterion:
    rep = scaling.scaling_uniqueness(0.5, 2.0, n_quad=32, radius=0.5, n_max=80, dps=50)
    it = rep.intertwiner
    ok = it.unitary_residual <= 1e-6 and it.intertwining_residual <= 1e-6
    return Criterion(6, "uniqueness up to unitary equivalence", ok,
                     {"isometry_residual": it.unitary_residual, "intertwining_residual": it.intertwining_residual,
                      "dim_quadrature": rep.quadrature.dim, "dim_monomial": rep.monomial.dim})


def bump_family():
    """Ten test functions supported in [-0.9, 0.9]."""
    return [
        bump(0.0, 0.9), bump(0.3, 0.5), bump(-0.4, 0.45), bump(0.1, 0.2), bump(-0.7, 0.2),
        poly_bump(0.0, 0.8, 4), poly_bump(0.25, 0.6, 6),
        times_poly(bump(0.0, 0.7), [0.0, 1.0]), times_poly(bump(0.2, 0.6), [1.0, -2.0, 3.0]),
        times_poly(poly_bump(-0.2, 0.7, 5), [0.5, 0.0, -1.0]),
    ]


def wc_identity() -> Criterion:
    worst = 0.0
    for s in (0.25, 0.5, 0.75):
        for k in bump_family():
            lhs = scaling.rep_norm_sq(k, s, n_max=220, order=200)
            rhs = scaling.j_form(k, k, s, order=200)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return Criterion(7, "transform norm equals reflected form", worst <= 1e-6, {"max_relative_gap": worst})


def eps_slopes() -> Criterion:
    eps = 2.0 ** -np.arange(3, 9)
    out = {}
    ok = True
    for s in (0.25, 0.5, 0.75):
        ex = scaling.epsilon_scaling_experiment(scaling.default_mollifier(), s, eps)
        out[str(s)] = {"slope_hs": ex.slope_hs, "slope_j": ex.slope_j}
        ok = ok and abs(ex.slope_hs - (s - 1)) <= 0.05 and abs(ex.slope_j - 2) <= 0.05
    return Criterion(8, "mollifier scaling slopes", ok, out)


def pick_equivalence(instances: int = 200, seed: int = 0) -> Criterion:
    rng = linops.rng_from_seed(seed)
    agree = indet = total = 0
    for _ in range(instances):
        data = pick.random_instance(rng, int(rng.integers(1, 7)))
        for variant in pick.VARIANTS:
            r = pick.positivity_equivalence(data, variant)
            if r.indeterminate:
                indet += 1
                continue
            total += 1
            agree += r.agree
    feas = pick.positivity_equivalence(pick.InterpolationData([0, 0.5], [0, 0.5]))
    infeas = pick.positivity_equivalence(pick.InterpolationData([0, 0.5], [0, 0.9]))
    worked = (feas.matrix_psd and feas.subspace_psd and not infeas.matrix_psd and not infeas.subspace_psd)
    return Criterion(9, "Pick matrix versus subspace positivity", agree == total and worked,
                     {"decided": total, "agreed": agree, "indeterminate": indet, "worked_examples": bool(worked)})


def graph_cayley(instances: int = 200, seed: int = 0) -> Criterion:
    rng = linops.rng_from_seed(seed)
    worst = {"cayley_excess": -np.inf, "round_trip": 0.0, "wplus": 0.0, "block": 0.0}

    def cg(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    for _ in range(instances):
        p = int(rng.integers(1, 11))
        B = cg(p, p)
        H = cg(p, p)
        gamma = B @ B.conj().T * rng.uniform(0, 1) + (H - H.conj().T) / 2
        lam = graphspace.cayley(gamma)
        worst["cayley_excess"] = max(worst["cayley_excess"], lam.norm - 1)
        g = graphspace.graph_of(lam)
        J = np.diag(np.r_[np.ones(p), -np.ones(p)])
        _, back = graphspace.decompose_positive_subspace(g.basis, J)
        worst["round_trip"] = max(worst["round_trip"], float(np.linalg.norm(back.ambient() - lam.ambient(), 2)))
        Wp = graphspace.wplus(lam)
        kp = cg(p, 50)
        lhs = np.sum(np.abs(Wp @ kp) ** 2, axis=0)
        k = lam.plus_basis @ kp + lam.minus_basis @ (lam.lam @ kp)
        rhs = np.real(np.sum(k.conj() * (J @ k), axis=0))
        worst["wplus"] = max(worst["wplus"], float(np.max(np.abs(lhs - rhs) / np.sum(np.abs(kp) ** 2, axis=0))))
        q = int(rng.integers(1, 6))
        a = cg(q, p)
        U, Jb = graphspace.block_reflection_operator(a)
        sc = max(1.0, float(np.linalg.norm(U, 2)) ** 2)
        r_sym = np.linalg.norm(Jb @ U @ Jb - U.conj().T, 2) / sc
        r_blk = np.linalg.norm((U.conj().T @ U)[:p, p:], 2) / sc
        cls = graphspace.classify_block_symmetric(U, p)
        worst["block"] = max(worst["block"], float(r_sym), float(r_blk), cls.residual / sc)
    ok = (worst["cayley_excess"] <= 1e-10 and worst["round_trip"] <= 1e-10
          and worst["wplus"] <= 1e-10 and worst["block"] <= 1e-12)
    return Criterion(10, "graph, Cayley and block operators", ok, {k: float(v) for k, v in worst.items()})


def kernel_dichotomy() -> Criterion:
    mu = hankel.MomentMeasure.from_atoms([[0.5, 0.5], [-0.5, 0.5]])
    kd = hankel.kernel_diagnostics(mu, 8)
    h = kd.witness
    wn = hankel.w_mu(h, mu).norm
    hn = float(np.linalg.norm(h))
    leb = hankel.kernel_diagnostics(hankel.MomentMeasure.lebesgue(), 12)
    ok = wn <= 1e-12 and hn >= 0.1 and leb.nullity == 0
    return Criterion(11, "kernel of the moment map", ok,
                     {"witness_image_norm": wn, "witness_norm": hn, "atomic_nullity": kd.nullity,
                      "lebesgue_nullity": leb.nullity, "lebesgue_min_eig": leb.min_eig})


def purity() -> Criterion:
    s, a = 0.5, 2.0
    _, S = scaling.diagonal_model(s, a, 16)
    worst = 0.0
    P = np.eye(S.shape[0])
    for k in range(21):
        nk = np.linalg.norm(np.linalg.matrix_power(S, k), 2)
        worst = max(worst, abs(nk - a ** (k * (s - 1))) / a ** (k * (s - 1)))
    real = osr.osr_construct(osr.compress(hardy.hardy_system(8)))
    decay = linops.purity_decay(real.s, np.eye(real.dim), np.ones(real.dim), 3)
    ok = worst <= 1e-13 and decay[0] > 0 and decay[1] == 0.0
    return Criterion(12, "purity and decay", ok, {"max_relative_error": worst, "hardy_decay": decay.tolist()})


CRITERIA: list[Callable[[], Criterion]] = [
    scaling_spectrum, delta_table, hankel_atoms, hardy_rigidity, norm_bound, uniqueness,
    wc_identity, eps_slopes, pick_equivalence, graph_cayley, kernel_dichotomy, purity,
]


def run_all(echo: Callable[[str], None] | None = None) -> list[Criterion]:
    out = []
    for fn in CRITERIA:
        c = fn()
        if echo is not None:
            echo(c.line())
        out.append(c)
    return out
