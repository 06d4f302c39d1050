"""Command-line driver: every verification suite as a subcommand.

Output is one JSON document {config, suites: [{name, status, rows, metrics}]}
or a CSV projection of the rows. Floats are written with 17 significant
digits so identical configs give byte-identical output. The exit code is 0
exactly when every suite reports "pass".
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import berezin, clifford, operators, segal_bargmann, spectral, symbols, triples
from .bases import R_SYMBOL, ABS2_SYMBOL, RadialSymbol, RadialWeight
from .multiindex import degree_multiplicity, enumerate_basis

OUTDIR_ENV = "TOEPLITZ_TRIPLES_OUTDIR"

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "quadrature": 1e-8,
    "ccr": 1e-10,
    "sb": 1e-6,
    "dimension": 0.05,
    "dixmier_n1": 0.05,
    "dixmier": 0.10,
    "stability": 0.02,
    "decay": 0.95,
}


class ConfigError(ValueError):
    pass


def suite(name: str, passed: bool | None, rows: list[dict], metrics: dict, status: str | None = None) -> dict:
    return {
        "name": name,
        "status": status or ("pass" if passed else "fail"),
        "rows": rows,
        "metrics": metrics,
    }


# --- deterministic serialisation ----------------------------------------------


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex) or isinstance(obj, np.complexfloating):
        return {"re": _plain(float(obj.real)), "im": _plain(float(obj.imag))}
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(f'{pad}  {json.dumps(k)}: {dumps(v, indent + 1)}' for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        inner = ",\n".join(f"{pad}  {dumps(v, indent + 1)}" for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def to_csv(document: dict) -> str:
    rows = []
    keys: list[str] = ["suite", "status"]
    for s in document["suites"]:
        for row in s["rows"]:
            rows.append({"suite": s["name"], "status": s["status"], **row})
            for k in row:
                if k not in keys:
                    keys.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_fmt_float(v).strip('"') if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# --- suites -------------------------------------------------------------------


def _radial_from_expr(expr: str) -> RadialSymbol:
    import sympy as sp

    rho = sp.symbols("rho")
    try:
        parsed = sp.sympify(expr, locals={"rho": rho, "r": 1 - rho**2})
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse radial expression {expr!r}: {exc}") from None
    extra = parsed.free_symbols - {rho}
    if extra:
        raise ConfigError(f"radial expression may only use rho or r, found {sorted(map(str, extra))}")
    func = sp.lambdify(rho, parsed, "numpy")
    return RadialSymbol(lambda x: np.broadcast_to(func(x), np.shape(x)).astype(float), label=expr)


def run_spectrum(cfg) -> list[dict]:
    n, lam, t = cfg.n, cfg.cutoff, cfg.t
    weight = RadialWeight(cfg.m_w)
    enum = enumerate_basis(n, lam)
    op_name = cfg.op
    rows, metrics = [], {}
    if op_name in ("t_r", "euler") or op_name.startswith("t_radial:"):
        if op_name == "t_r":
            op = operators.toeplitz_radial(R_SYMBOL, enum, weight)
            m = cfg.m_w
            expected = (m + 1) / (n + np.arange(lam + 1) + m + 1)
        elif op_name == "euler":
            op = operators.euler_operator(enum)
            expected = np.arange(lam + 1, dtype=float)
        else:
            f = _radial_from_expr(op_name.split(":", 1)[1])
            op = operators.toeplitz_radial(f, enum, weight)
            expected = None
        diag = np.real(np.diag(op.matrix))
        for k in range(lam + 1):
            rows.append({"k": k, "eigenvalue": float(diag[enum.block(k)][0]), "multiplicity": degree_multiplicity(n, k)})
        stream = spectral.spectrum_of(op)
        analytic = spectral.stream_from_values(np.repeat(diag[[enum.block(k).start for k in range(lam + 1)]],
                                                         [degree_multiplicity(n, k) for k in range(lam + 1)]))
        agree = float(np.max(np.abs(np.sort(stream.expanded()) - np.sort(analytic.expanded()))))
        metrics["matrix_vs_degree_table"] = agree
        ok = agree <= 1e-10
        if expected is not None:
            dev = float(np.max(np.abs(np.array([r["eigenvalue"] for r in rows]) - expected)))
            metrics["closed_form_deviation"] = dev
            ok = ok and dev <= cfg.tol["quadrature"]
        return [suite(f"spectrum:{op_name}", ok, rows, metrics)]
    if op_name == "dirac":
        op = clifford.dirac_bergman(t, enum, weight)
        stream = spectral.spectrum_of(op)
        for k, (v, mult) in enumerate(zip(stream.values, stream.multiplicities)):
            rows.append({"k": k, "eigenvalue": float(v), "multiplicity": int(mult)})
        metrics["hermiticity_residual"] = op.hermiticity_residual()
        return [suite("spectrum:dirac", metrics["hermiticity_residual"] <= cfg.tol["exact"], rows, metrics)]
    raise ConfigError(f"unknown operator {op_name!r}; use t_r, t_radial:<expr>, dirac or euler")


def run_ccr(cfg) -> list[dict]:
    n, t = cfg.n, cfg.t
    enum = enumerate_basis(n, cfg.cutoff)
    gens = []
    for j in range(1, n + 1):
        gens += [operators.HeisenbergElement("Q", j), operators.HeisenbergElement("P", j)]
    gens.append(operators.HeisenbergElement("T"))
    mats = {str(g): operators.heisenberg_rep(g, t, enum) for g in gens}
    rows, worst = [], 0.0
    for a in gens:
        for b in gens:
            c = operators.commutator(mats[str(a)], mats[str(b)])
            block = c.interior_block()
            target = np.zeros_like(block)
            if a.kind == "Q" and b.kind == "P" and a.j == b.j:
                target = 1j * t * np.eye(block.shape[0])
            if a.kind == "P" and b.kind == "Q" and a.j == b.j:
                target = -1j * t * np.eye(block.shape[0])
            res = operators.operator_norm(block - target).value
            worst = max(worst, res)
            rows.append({"x": str(a), "y": str(b), "residual": res})
    ladder = 0.0
    nsum = None
    for j in range(1, n + 1):
        q = mats[f"Q_{j}"]
        p = mats[f"P_{j}"]
        a = operators.heisenberg_rep(operators.HeisenbergElement("a", j), t, enum)
        ad = operators.heisenberg_rep(operators.HeisenbergElement("a+", j), t, enum)
        ladder = max(ladder, operators.interior_distance(a.with_interior(q.interior), (q + p.scale(1j)).scale(2**-0.5)))
        term = (ad @ a + a @ ad).scale(0.5)
        nsum = term if nsum is None else nsum + term
    number = operators.interior_distance(nsum, operators.heisenberg_rep(operators.HeisenbergElement("N"), t, enum))
    metrics = {"max_residual": worst, "ladder_residual": ladder, "number_residual": number}
    ok = worst <= cfg.tol["ccr"] and ladder <= cfg.tol["ccr"] and number <= cfg.tol["ccr"]
    return [suite("ccr", ok, rows, metrics)]


def run_sb(cfg) -> list[dict]:
    n, t, deg = cfg.n, cfg.t, cfg.max_degree
    sb = segal_bargmann.SBTransform(n, t, nodes=max(2 * deg + 10, 40))
    errs = segal_bargmann.basis_mapping_errors(sb, deg)
    rows = [{"alpha": list(a), "coefficient_error": e} for a, e in errs.items()]
    metrics = {
        "max_coefficient_error": max(errs.values()),
        "gram_residual": segal_bargmann.gram_residual(sb, deg),
        "number_residual": segal_bargmann.number_operator_check(t, n, min(deg, 6)),
    }
    ok = metrics["max_coefficient_error"] <= cfg.tol["sb"] and metrics["gram_residual"] <= cfg.tol["sb"]
    ok = ok and metrics["number_residual"] <= 1e-8
    if n == 1:
        rep = segal_bargmann.intertwining_check(t, max(deg, 8))
        metrics["intertwining_residual"] = rep.max_residual
        spot = abs(sb.inverse_integral_n1({(1,): 0.5, (2,): 1.0}, 0.3) - sb.inverse({(1,): 0.5, (2,): 1.0}, np.array([0.3])))
        metrics["inverse_spot_check"] = float(np.max(spot))
        ok = ok and rep.max_residual <= 1e-8 and metrics["inverse_spot_check"] <= 1e-8
    return [suite("sb-check", ok, rows, metrics)]


def run_weyl(cfg) -> list[dict]:
    n = cfg.n
    if cfg.op == "dirac":
        cuts = list(range(20, 201))
        norms = [operators.operator_norm(clifford.dirac_bergman(cfg.t, enumerate_basis(1, c))).value for c in cuts]
        slope = float(np.polyfit(np.log(cuts), np.log(norms), 1)[0])
        rows = [{"cutoff": c, "norm": v} for c, v in zip(cuts, norms)]
        ok = abs(slope - 0.5) <= cfg.tol["dimension"]
        return [suite("weyl:dirac-norm", ok, rows, {"exponent": slope, "expected": 0.5})]
    builders = {
        "t_r": (spectral.t_r_inverse_stream, n),
        "hardy": (spectral.hardy_stream, n),
        "disc-bundle": (spectral.disc_bundle_stream, n + 1),
    }
    if cfg.op not in builders:
        raise ConfigError(f"weyl supports t_r, hardy, disc-bundle, dirac; got {cfg.op!r}")
    build, expected = builders[cfg.op]
    stream = build(n, cfg.kmax)
    fit = spectral.weyl_fit(stream)
    top = float(stream.values[-1])
    lams = np.geomspace(top / 100.0, top, 25)
    rows = [{"lambda": float(x), "count": spectral.counting(stream, float(x))} for x in lams]
    metrics = {"exponent": fit.exponent, "coefficient": fit.coefficient, "residual": fit.residual, "expected": expected}
    return [suite(f"weyl:{cfg.op}", abs(fit.exponent - expected) <= cfg.tol["dimension"], rows, metrics)]


def _stream_for_count(n: int, count: int) -> spectral.SpectrumStream:
    k = 0
    total = 0
    while total < count:
        total += degree_multiplicity(n, k)
        k += 1
    return spectral.t_r_inverse_stream(n, k)


def run_dixmier(cfg) -> list[dict]:
    n, count = cfg.n, cfg.N
    stream = _stream_for_count(n, count)
    target = 1.0 / math.factorial(n)
    avg = spectral.dixmier_log_average(stream, n, count)
    weighted = spectral.dixmier_log_average(stream, n, count, weights=lambda v: 1.0 + 1.0 / v)
    order_sym = symbols.power(symbols.psi_T_r_symbol(), n)
    closed = spectral.dixmier_closed_form_ball(order_sym.order, order_sym.constant_value.real, n)
    counts = [int(count ** (p / 4.0)) for p in (2, 3, 4)]
    ext_a, ext_b = spectral.dixmier_extrapolated(stream, n, counts)
    band = cfg.tol["dixmier_n1"] if n == 1 else cfg.tol["dixmier"]
    rows = [
        {"quantity": "log_average", "value": avg, "target": target},
        {"quantity": "closed_form", "value": closed, "target": target},
        {"quantity": "weighted_log_average", "value": weighted, "target": target},
        {"quantity": "extrapolated_limit", "value": ext_a, "target": target},
    ]
    metrics = {
        "log_average": avg,
        "closed_form": closed,
        "weighted": weighted,
        "relative_error": abs(avg - target) / target,
        "weighted_relative_error": abs(weighted - target) / target,
        "extrapolated": ext_a,
        "drift_coefficient": ext_b,
    }
    ok = abs(avg - target) <= band * target and abs(closed - target) <= 1e-12
    ok = ok and abs(weighted - target) <= cfg.tol["dixmier_n1"] * target
    return [suite("dixmier", ok, rows, metrics)]


def _sweep_suite(name, report: triples.SweepReport) -> dict:
    rows = list(report.rows())
    metrics = {label: {"variation": report.variation(label), "verdict": report.verdict(label)} for label in report.norms}
    return suite(name, report.passed, rows, metrics)


NUMERICAL_ERRORS = (ArithmeticError, ValueError, np.linalg.LinAlgError, RuntimeError)


def _guarded(name: str, fn: Callable[[], dict]) -> dict:
    """Run one suite; a numerical failure becomes an error entry, not a crash."""
    try:
        return fn()
    except ConfigError:
        raise
    except NUMERICAL_ERRORS as exc:
        return suite(name, False, [], {"error": str(exc)}, status="error")


def _resolvent_suite(name: str, spec) -> dict:
    res = triples.compact_resolvent_check(spec)
    last = res.tail_minima[res.cutoffs[-1]]
    rows = [{"k": k, "tail_minimum": float(v)} for k, v in enumerate(last)]
    metrics = {"growth_exponent": res.growth_exponent, "stable": res.stable, "verdict": res.verdict}
    return suite(f"{name}:resolvent", res.verdict == "pass", rows, metrics)


def _doubled_structure(cfg) -> dict:
    n = cfg.n
    enum = enumerate_basis(n, cfg.cutoff)
    u = triples.polar_unitary(triples.exp_z1_coefficients(n, cfg.cutoff), enum)
    dt = triples.build_doubled(triples.t_r_inverse(enum), u)
    rep = triples.verify_doubled(dt, spectral.t_r_inverse_stream(n, cfg.kmax))
    metrics = {
        "unitarity": rep.unitarity,
        "hermiticity": rep.hermiticity,
        "offdiag_square": rep.offdiag_square,
        "block_spectra": rep.block_spectra,
        "dimension_base": rep.dimension_base,
        "dimension_doubled": rep.dimension_doubled,
        "scalar_distance": triples.scalar_distance(u),
    }
    return suite("doubled:structure", rep.passed and metrics["scalar_distance"] > 0.1, [], metrics)


def run_verify_triple(cfg) -> list[dict]:
    n = cfg.n
    name = cfg.triple
    if name == "bergman-tr":
        spec = triples.bergman_tr_triple(n, cfg.cutoffs or tuple(range(10, 61, 5)))
    elif name == "hardy-model":
        spec = triples.hardy_model_triple(n, cfg.cutoffs or tuple(range(10, 61, 5)))
    elif name == "heisenberg-dirac":
        spec = triples.heisenberg_dirac_triple(n, cfg.t, cfg.cutoffs or tuple(range(20, 101, 10)))
    elif name == "doubled":
        spec = triples.doubled_sweep(n, cfg.cutoffs or tuple(range(10, 61, 10)))
    else:
        raise ConfigError(f"unknown triple {name!r}")
    out = [_guarded(f"{name}:commutators", lambda: _sweep_suite(f"{name}:commutators", triples.commutator_boundedness(spec)))]
    if name != "doubled":
        try:
            reg = triples.regularity_check(spec, 2)
        except NUMERICAL_ERRORS as exc:
            out.append(suite(f"{name}:regularity", False, [], {"error": str(exc)}, status="error"))
        else:
            out += [_sweep_suite(f"{name}:regularity-{m}", rep) for m, rep in reg.items()]
        out.append(_guarded(f"{name}:resolvent", lambda: _resolvent_suite(name, spec)))
    else:
        out.append(_guarded("doubled:structure", lambda: _doubled_structure(cfg)))
    return out


def run_berezin(cfg) -> list[dict]:
    n = cfg.n
    ms = cfg.m_values
    kmax = max(cfg.kmax_tower, 2 * max(ms))
    sup = berezin.sup_norm_limit(R_SYMBOL, ms, kmax, n)
    quad = berezin.tower_eigenvalues(R_SYMBOL, ms, 0, n, "quadrature")[:, 0]
    closed = (np.asarray(ms) + 1.0) / (n + np.asarray(ms) + 1.0)
    rows = [
        {"m": int(m), "norm": float(v), "closed_form": float(c), "quadrature": float(q)}
        for m, v, c, q in zip(ms, sup.norms, closed, quad)
    ]
    dev = float(np.max(np.abs(quad - closed)))
    s1 = suite(
        "berezin:sup-norm",
        dev <= cfg.tol["quadrature"] and sup.contractive and abs(sup.norms[-1] - 1.0) <= n / (ms[-1] + 1),
        rows,
        {"quadrature_deviation": dev, "contractive": sup.contractive, "rate": sup.rate},
    )
    exp_rows, exp_metrics, ok = [], {}, True
    for label, f, g in (("r*r", R_SYMBOL, R_SYMBOL), ("r*|z|^2", R_SYMBOL, ABS2_SYMBOL)):
        decay_ms = [m for m in ms if m >= 10] or ms
        kk = max(cfg.kmax_tower, 2 * max(decay_ms))
        series = berezin.expansion_check(f, g, decay_ms, kk, n)
        for m, e in zip(series.m_values, series.error_norms):
            exp_rows.append({"pair": label, "m": int(m), "error_norm": float(e), "scaled": float(m * e)})
        exp_metrics[label] = {"decay_exponent": series.decay_exponent, "c1_k0": float(series.c1_table[0])}
        ok = ok and series.decay_exponent >= cfg.tol["decay"]
    s2 = suite("berezin:expansion", ok, exp_rows, exp_metrics)
    return [s1, s2]


def run_symbols(cfg) -> list[dict]:
    rep = symbols.symbol_property_suite(cfg.trials, max(cfg.n, 1), cfg.seed)
    rows = [{"property": k, "failures": v, "trials": rep.trials} for k, v in rep.failures.items()]
    s1 = suite("symbols:properties", rep.passed, rows, {"trials": rep.trials})
    n = cfg.n
    x = symbols.sphere_samples(n, 8, cfg.seed)
    lam = symbols.lambda_symbol(RadialWeight(cfg.m_w))
    formulas = [
        {"symbol": "Lambda_w", "order": lam.order, "coefficient": float(lam.constant_value)},
        {"symbol": "psi(T_r)", "order": -1.0, "coefficient": float(symbols.psi_T_r_symbol(cfg.m_w).constant_value)},
        {
            "symbol": "gamma T_P K (w=1)",
            "order": symbols.normal_derivative_symbol(n).order,
            "coefficient": float(np.real(symbols.normal_derivative_symbol(n).coeff(x)[0])),
        },
        {
            "symbol": "sum |sigma(tau P_j)|^2",
            "order": 1.0,
            "coefficient": float(np.real(symbols.dirac_square_symbol(cfg.t, n).coeff(x)[0])),
        },
    ]
    eig = operators.radial_eigenvalues(R_SYMBOL, n, 100_000)
    ks = np.arange(1000, 100_001)
    slope = spectral.decay_exponent(eig[ks], ks)
    s2 = suite(
        "symbols:formulas",
        abs(slope + 1.0) <= 0.02,
        formulas,
        {"eigenvalue_decay_slope": slope, "psi_T_r_order": -1.0},
    )
    return [s1, s2]


COMMANDS: dict[str, Callable] = {
    "spectrum": run_spectrum,
    "ccr": run_ccr,
    "sb-check": run_sb,
    "weyl": run_weyl,
    "dixmier": run_dixmier,
    "verify-triple": run_verify_triple,
    "berezin": run_berezin,
    "symbols": run_symbols,
}


# --- argument handling --------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _tol_pair(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"tolerance override must be name=value, got {text!r}")
    k, v = text.split("=", 1)
    if k not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {k!r}; known: {', '.join(DEFAULT_TOLERANCES)}")
    return k, float(v)


def read_config(path: str) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment; keys mirror long flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="complex dimension (default 1)")
    common.add_argument("--cutoff", type=int, default=30, help="truncation degree (default 30)")
    common.add_argument("--m-w", dest="m_w", type=float, default=0.0, help="weight exponent (default 0)")
    common.add_argument("--t", type=float, default=1.0, help="Fock parameter (default 1)")
    common.add_argument("--tol", type=_tol_pair, action="append", default=[], help="override, e.g. ccr=1e-9")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help=f"output file (relative paths resolve under ${OUTDIR_ENV})")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")
    common.add_argument("--config", default=None, help="key=value file with defaults")

    parser = argparse.ArgumentParser(prog="toeplitz-triples", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("spectrum", parents=[common], help="eigenvalue table of an operator")
    p.add_argument("--op", default="t_r", help="t_r, t_radial:<expr in rho or r>, dirac, euler")
    sub.add_parser("ccr", parents=[common], help="commutation relation residuals")
    p = sub.add_parser("sb-check", parents=[common], help="Segal-Bargmann residuals")
    p.add_argument("--max-degree", type=int, default=6)
    p = sub.add_parser("weyl", parents=[common], help="counting function and Weyl exponent")
    p.add_argument("--op", default="t_r", help="t_r, hardy, disc-bundle or dirac (norm growth)")
    p.add_argument("--kmax", type=int, default=100_000)
    p = sub.add_parser("dixmier", parents=[common], help="Dixmier log-average vs closed form")
    p.add_argument("--N", type=int, default=1_000_000)
    p = sub.add_parser("verify-triple", parents=[common], help="commutator, regularity and resolvent harness")
    p.add_argument("--triple", default="bergman-tr", choices=("hardy-model", "bergman-tr", "doubled", "heisenberg-dirac"))
    p.add_argument("--cutoffs", type=_int_list, default=None)
    p.add_argument("--kmax", type=int, default=100_000)
    p = sub.add_parser("berezin", parents=[common], help="tower sup-norm and expansion tables")
    p.add_argument("--m-values", type=_int_list, default=[1, 2, 5, 10, 20, 50, 100, 200, 400])
    p.add_argument("--kmax-tower", type=int, default=200)
    p = sub.add_parser("symbols", parents=[common], help="symbol algebra properties and formulas")
    p.add_argument("--trials", type=int, default=100)
    return parser


def parse(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except ConfigError as exc:
            parser.error(str(exc))
        # config supplies defaults; explicit flags win
        sub_parser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub_parser._actions}
        for k, v in values.items():
            if k not in known or k in ("config", "help"):
                parser.error(f"unknown config key {k!r}")
            action = known[k]
            conv = action.type or (lambda s: s)
            try:
                sub_parser.set_defaults(**{k: conv(v)})
            except (ValueError, argparse.ArgumentTypeError) as exc:
                parser.error(f"bad config value for {k}: {exc}")
        args = parser.parse_args(argv)
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(dict(args.tol))
    args.tol = tol
    if args.n < 1:
        parser.error("--n must be >= 1")
    if args.cutoff < 2:
        parser.error("--cutoff must be >= 2")
    if not args.m_w > -1:
        parser.error("--m-w must exceed -1")
    if not args.t > 0:
        parser.error("--t must be positive")
    return args


def _config_record(args) -> dict:
    rec = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "config")}
    return _plain(rec)


def resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTDIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def main(argv: list[str] | None = None) -> int:
    args = parse(argv)
    status_error = None
    try:
        suites = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"toeplitz-triples: error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        status_error = str(exc)
        suites = [suite(args.command, False, [], {"error": status_error}, status="error")]
    document = _plain({"config": _config_record(args), "suites": suites})
    text = dumps(document) + "\n" if args.format == "json" else to_csv(document)
    out = resolve_output(args.output)
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    if status_error:
        print(f"toeplitz-triples: numerical failure: {status_error}", file=sys.stderr)
    return 0 if all(s["status"] == "pass" for s in suites) else 1


if __name__ == "__main__":
    sys.exit(main())
