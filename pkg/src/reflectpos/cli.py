"""Command-line front end.

Every command writes a versioned JSON report (or long-format CSV) and exits
0 when its checks pass, 1 when a check fails and 2 on usage or input errors.
Options may come from a TOML/JSON file given with ``--config``; flags on the
command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, hankel, hardy, linops, osr, pick, scaling
from .errors import ReflectionError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

REPORT_VERSION = 1
COMMANDS = ("validate", "construct", "spectrum", "hardy", "scaling", "hankel", "pick", "sweep", "acceptance")

# command -> option defaults; None means "required or optional without default"
DEFAULTS = {
    "validate": {"dim": 6, "seed": 0, "null": 0, "tol": 1e-10},
    "construct": {"dim": 6, "seed": 0, "null": 0, "tol": 1e-10},
    "spectrum": {"model": "scaling", "s": 0.5, "a": 2.0, "n": 16, "n_quad": 64, "atoms": None,
                 "measure": None, "dim": 6, "seed": 0},
    "hardy": {"n": 8, "b": "[0.0]"},
    "scaling": {"s": 0.5, "a": 2.0, "n": 16, "n_quad": 64},
    "hankel": {"atoms": None, "measure": None, "n": 8},
    "pick": {"instance": None, "z": None, "w": None, "variant": "pick", "n_trunc": None},
    "sweep": {"kind": "eps", "s": "[0.25, 0.5, 0.75]", "eps": None, "a": None, "seeds": 20, "dim": 6, "seed": 0},
    "acceptance": {},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reflectpos", description="Reflection-positivity quotient constructions.")
    p.add_argument("--config", help="TOML or JSON file with option values")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--output", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, argument_default=None)

    for name in ("validate", "construct"):
        q = add(name, "random reflection system: validate axioms / build the quotient")
        q.add_argument("--dim", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--null", type=int, help="number of null directions of the form")
        q.add_argument("--tol", type=float)

    q = add("spectrum", "eigenvalues of S for a model")
    q.add_argument("--model", choices=("scaling", "scaling-quadrature", "hankel", "hardy", "random"))
    q.add_argument("--s", type=float)
    q.add_argument("--a", type=float)
    q.add_argument("--n", type=int)
    q.add_argument("--n-quad", dest="n_quad", type=int)
    q.add_argument("--atoms", help='JSON list [[x, p], ...]')
    q.add_argument("--measure", help="JSON measure file")
    q.add_argument("--dim", type=int)
    q.add_argument("--seed", type=int)

    q = add("hardy", "Hardy model diagnostics for a symbol b")
    q.add_argument("--n", type=int)
    q.add_argument("--b", help="JSON list of Taylor coefficients of b")

    q = add("scaling", "dilation model report")
    q.add_argument("--s", type=float)
    q.add_argument("--a", type=float)
    q.add_argument("--n", type=int)
    q.add_argument("--n-quad", dest="n_quad", type=int)

    q = add("hankel", "moment-measure quotient")
    q.add_argument("--atoms", help='JSON list [[x, p], ...]')
    q.add_argument("--measure", help="JSON measure file")
    q.add_argument("--n", type=int)

    q = add("pick", "Pick / Caratheodory positivity equivalence")
    q.add_argument("--instance", help="JSON instance file")
    q.add_argument("--z", help="JSON list of [re, im]")
    q.add_argument("--w", help="JSON list of [re, im]")
    q.add_argument("--variant", choices=pick.VARIANTS)
    q.add_argument("--n-trunc", dest="n_trunc", type=int)

    q = add("sweep", "parameter sweep in long format")
    q.add_argument("--kind", choices=("eps", "a", "seed"))
    q.add_argument("--s", help="JSON list of s values")
    q.add_argument("--eps", help="JSON list of eps values")
    q.add_argument("--a", help="JSON list of a values")
    q.add_argument("--seeds", type=int)
    q.add_argument("--dim", type=int)
    q.add_argument("--seed", type=int)

    add("acceptance", "run the acceptance suite")
    return p


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text()
    if path.endswith(".toml"):
        return tomllib.loads(text)
    return json.loads(text)


def resolve(command: str, args: argparse.Namespace, config: dict) -> dict:
    """Defaults, then the config file (top level or a ``[command]`` table), then flags."""
    opts = dict(DEFAULTS[command])
    section = config.get(command, {}) if isinstance(config.get(command), dict) else {}
    for src in (config, section):
        for k, v in src.items():
            if k in opts:
                opts[k] = v
    for k in opts:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    return opts


def _json_arg(v):
    return json.loads(v) if isinstance(v, str) else v


def _measure(opts) -> hankel.MomentMeasure:
    if opts.get("atoms") is not None:
        return hankel.MomentMeasure.from_atoms(_json_arg(opts["atoms"]))
    if opts.get("measure") is not None:
        m = opts["measure"]
        obj = json.loads(Path(m).read_text()) if isinstance(m, str) else m
        return hankel.MomentMeasure.from_json(obj)
    raise UsageError("need --atoms or --measure")


def _eigs(real: osr.OsrRealization):
    return np.sort(real.spectrum())


# commands ----------------------------------------------------------------
# each returns (results: dict, rows: list[dict], passed: bool)


def cmd_validate(o):
    sysm = osr.random_reflection_system(o["dim"], o["seed"], o["null"], o["tol"])
    rep = osr.validate_system(sysm)
    res = rep._asdict()
    return res, [{"metric": k, "value": v} for k, v in res.items()], rep.ok


def cmd_construct(o):
    sysm = osr.random_reflection_system(o["dim"], o["seed"], o["null"], o["tol"])
    bound = float(np.sqrt(linops.spectral_radius(sysm.u @ sysm.u)))
    real = osr.osr_construct(osr.compress(sysm), spectral_bound=bound)
    res = {"dim_hk": real.dim, "nullity": real.nullity, "spectrum": _eigs(real).tolist(),
           "residuals": real.residuals}
    ok = real.residuals["norm_excess"] <= 1e-8 and real.residuals["intertwining"] <= 1e-8
    rows = [{"index": i, "eigenvalue": e} for i, e in enumerate(res["spectrum"])]
    return res, rows, ok


def cmd_spectrum(o):
    model = o["model"]
    if model == "scaling":
        _, S = scaling.diagonal_model(o["s"], o["a"], o["n"])
        ev = np.sort(np.diag(S))[::-1]
    elif model == "scaling-quadrature":
        ev = _eigs(osr.osr_construct(scaling.scaling_osr_quadrature(o["s"], o["a"], o["n_quad"])))[::-1]
    elif model == "hankel":
        ev = hankel.hankel_osr(_measure(o), o["n"]).atoms_recovered
    elif model == "hardy":
        ev = _eigs(osr.osr_construct(osr.compress(hardy.hardy_system(o["n"]))))
    else:
        ev = _eigs(osr.osr_construct(osr.compress(osr.random_reflection_system(o["dim"], o["seed"]))))
    ev = np.asarray(ev, dtype=float)
    return {"model": model, "eigenvalues": ev.tolist()}, [{"index": i, "eigenvalue": e} for i, e in enumerate(ev)], True


def cmd_hardy(o):
    n = o["n"]
    b = hardy.BoundedSymbol(np.asarray(_json_arg(o["b"]), dtype=complex))
    cs = osr.compress(hardy.hardy_system(n))
    real = osr.osr_construct(cs)
    kb = hardy.kb_subspace(b, n)
    defect = hardy.shift_invariance_defect(kb, hardy.FourierTruncation(n).u)
    lam = hardy.lambda_b(b, n)
    res = {"form_rank": int(np.linalg.matrix_rank(cs.m)), "dim_hk": real.dim,
           "s": np.real(real.s).tolist(), "shift_invariance_defect": defect, "lambda_norm": lam.norm,
           "sup_b": b.sup_estimate}
    ok = res["form_rank"] == 1 and real.dim == 1 and not np.any(real.s)
    rows = [{"metric": k, "value": v} for k, v in res.items() if np.isscalar(v)]
    return res, rows, ok


def cmd_scaling(o):
    s, a, n = o["s"], o["a"], o["n"]
    _, S = scaling.diagonal_model(s, a, n)
    diag = np.diag(S)
    real = osr.osr_construct(scaling.scaling_osr_quadrature(s, a, o["n_quad"]))
    top = np.sort(real.spectrum())[::-1][:4]
    exact = a ** (s - 1 - 2 * np.arange(top.size))
    dn = scaling.delta_norms(s, min(n, 10))
    res = {"diagonal_spectrum": diag.tolist(), "quadrature_top": top.tolist(),
           "quadrature_top_error": float(np.max(np.abs(top - exact))) if top.size else None,
           "delta_norms": dn.tolist(), "delta_gram_consistency": scaling.delta_gram_consistency(s, 20),
           "quadrature_dim": real.dim, "quadrature_nullity": real.nullity}
    ok = res["quadrature_top_error"] is not None and res["quadrature_top_error"] <= 1e-6
    rows = [{"n": i, "diagonal": d} for i, d in enumerate(diag)]
    return res, rows, ok


def cmd_hankel(o):
    mu = _measure(o)
    r = hankel.hankel_osr(mu, o["n"])
    kd = hankel.kernel_diagnostics(mu, o["n"])
    res = {"eigenvalues": r.atoms_recovered.tolist(), "dim_hk": r.realization.dim,
           "nullity": r.realization.nullity, "moment_nullity": kd.nullity,
           "total_mass": mu.total_mass}
    ok = bool(np.all(np.abs(r.atoms_recovered) <= 1 + 1e-8))
    return res, [{"index": i, "eigenvalue": e} for i, e in enumerate(res["eigenvalues"])], ok


def cmd_pick(o):
    if o.get("instance"):
        obj = json.loads(Path(o["instance"]).read_text())
        data = pick.InterpolationData.from_json(obj)
        variant = obj.get("variant", o["variant"])
    elif o.get("z") is not None and o.get("w") is not None:
        data = pick.InterpolationData(_json_arg(o["z"]), _json_arg(o["w"]))
        variant = o["variant"]
    else:
        raise UsageError("need --instance or both --z and --w")
    rep = pick.positivity_equivalence(data, variant, o["n_trunc"])
    res = dict(rep._asdict(), variant=variant)
    ok = rep.agree or rep.indeterminate
    return res, [{"metric": k, "value": v} for k, v in res.items()], ok


def cmd_sweep(o):
    kind = o["kind"]
    rows = []
    ok = True
    res = {"kind": kind}
    if kind == "eps":
        s_list = _json_arg(o["s"])
        eps = _json_arg(o["eps"]) if o["eps"] is not None else (2.0 ** -np.arange(3, 9)).tolist()
        phi = scaling.default_mollifier()
        fits = {}
        for s in s_list:
            ex = scaling.epsilon_scaling_experiment(phi, s, eps)
            fits[str(s)] = {"slope_hs": ex.slope_hs, "slope_j": ex.slope_j}
            for e, h, j, d in zip(ex.eps, ex.hs, ex.j, ex.j_defect):
                rows.append({"s": s, "eps": e, "hs_norm": h, "j_norm": j, "j_distance": d})
        res["fits"] = fits
    elif kind == "a":
        s = _json_arg(o["s"])
        s = s[0] if isinstance(s, list) else s
        a_list = _json_arg(o["a"]) if o["a"] is not None else [1.25, 1.5, 2.0, 3.0, 4.0]
        tops = []
        for a in a_list:
            real = osr.osr_construct(scaling.scaling_osr_quadrature(s, a, 64))
            top = float(np.max(real.spectrum()))
            tops.append(top)
            rows.append({"s": s, "a": a, "top_eigenvalue": top})
        slope = float(np.polyfit(np.log(a_list), np.log(tops), 1)[0])
        res.update(s=s, slope=slope, expected=s - 1)
        ok = abs(slope - (s - 1)) <= 1e-3
    elif kind == "seed":
        rng = linops.rng_from_seed(o["seed"])
        passed = 0
        for k in range(o["seeds"]):
            seed = int(rng.integers(2**62))
            rep = osr.validate_system(osr.random_reflection_system(o["dim"], seed))
            passed += rep.ok
            rows.append({"seed": seed, "ok": int(rep.ok), "r_sym": rep.r_sym, "r_inv": rep.r_inv})
        res["pass_rate"] = passed / o["seeds"]
        ok = passed == o["seeds"]
    else:
        raise UsageError(f"unknown sweep kind {kind!r}")
    return res, rows, ok


def cmd_acceptance(o):
    crits = acceptance.run_all(echo=lambda line: print(line, file=sys.stderr))
    res = {str(c.number): {"name": c.name, "passed": c.passed, "details": c.details} for c in crits}
    rows = [{"criterion": c.number, "name": c.name, "passed": int(c.passed)} for c in crits]
    return res, rows, all(c.passed for c in crits)


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# output --------------------------------------------------------------------


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render(command, opts, res, rows, passed, fmt) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([_fmt(r.get(k, "")) for k in keys])
        return buf.getvalue()
    report = {"report_version": REPORT_VERSION, "command": command, "inputs": _plain(opts),
              "results": _plain(res), "passed": bool(passed)}
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def _fail(kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return 2


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config)
        opts = resolve(args.command, args, config)
        fmt = args.format or config.get("format", "json")
        if fmt not in ("json", "csv"):
            raise UsageError(f"unknown format {fmt!r}")
        output = args.output or config.get("output")
        res, rows, passed = HANDLERS[args.command](opts)
    except UsageError as exc:
        return _fail("UsageError", str(exc))
    except (ReflectionError, ValueError, KeyError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc))
    text = render(args.command, opts, res, rows, passed, fmt)
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
