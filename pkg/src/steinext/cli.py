"""Command-line interface: ``steinext {coeff,reduce,eval,verify,bench}``.

Exit codes: 0 success, 1 verification/cross-check failure (or internal
error), 2 usage error.

Settings resolve as command-line flags, then a ``key = value`` config file
(``--config PATH`` or ``$STEINEXT_CONFIG``), then built-in defaults.
Recognised config keys: format, tol, seed, samples, max_terms, quad_order.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from .combinatorics import (
    gen_factorial_coeff_table,
    hermite_coeff_table,
    stirling_tables,
)
from .function_model import (
    AnalyticFunction,
    Poly,
    exact_expectation,
    parse_function,
    parse_rational,
    poly_expectation_product,
)
from .ibd import AveragedShiftConfig, ibd_product_expectation
from .oracle import MAX_ORDER, monte_carlo_expectation, quadrature_expectation
from .stein_core import (
    GENERAL_MEAN,
    ZERO_MEAN,
    GaussianLaw,
    Reduction,
    ReductionTerm,
    evaluate_reduction,
    evaluate_reduction_exact,
    reduce_general_mean,
    reduce_zero_mean,
    reduction_stats,
)
from .verify import run_suite

FORMATS = ("human", "json", "csv", "latex")
DEFAULTS: dict[str, Any] = {
    "format": "human",
    "tol": 1e-8,
    "seed": 0,
    "samples": 1_000_000,
    "max_terms": 200,
    "quad_order": 64,
}
_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "format": str,
    "tol": float,
    "seed": int,
    "samples": int,
    "max_terms": int,
    "quad_order": int,
}
BENCH_COLUMNS = ("n", "method", "wall_time_ns", "final_terms", "peak_terms", "steps")
EVAL_METHODS = ("stein", "ibd", "quad", "mc")


class UsageError(Exception):
    """Bad user input discovered after argument parsing (exit code 2)."""


# --- config ------------------------------------------------------------------


def load_config(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        path = os.environ.get("STEINEXT_CONFIG")
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONVERTERS:
            raise UsageError(f"{path}:{lineno}: expected one of {sorted(_CONVERTERS)} as key=value")
        try:
            out[key] = _CONVERTERS[key](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from exc
    return out


def resolve(args: argparse.Namespace, key: str) -> Any:
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return args.config_values.get(key, DEFAULTS[key])


# --- rendering helpers -------------------------------------------------------

_SUPERSCRIPT = str.maketrans("0123456789()-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁽⁾⁻")


def _sup(k: int) -> str:
    return str(k).translate(_SUPERSCRIPT)


def _term_human(t: ReductionTerm) -> str:
    parts = [] if t.coeff == 1 else [str(t.coeff)]
    if t.mu_power:
        parts.append("μ" + ("" if t.mu_power == 1 else _sup(t.mu_power)))
    if t.sigma2_power:
        parts.append("σ" + _sup(2 * t.sigma2_power))
    g = "g" if t.derivative_order == 0 else "g" + _sup(f"({t.derivative_order})")
    prefix = "·".join(parts)
    return (prefix + " " if prefix else "") + f"E[{g}(X)]"


def render_reduction_human(red: Reduction) -> str:
    rhs = " + ".join(_term_human(t) for t in red.terms)
    return f"E[g(X) X^{red.n}] = {rhs}"


def _term_latex(t: ReductionTerm) -> str:
    parts = [] if t.coeff == 1 else [str(t.coeff)]
    if t.mu_power:
        parts.append(r"\mu" + ("" if t.mu_power == 1 else f"^{{{t.mu_power}}}"))
    if t.sigma2_power:
        parts.append(rf"\sigma^{{{2 * t.sigma2_power}}}")
    g = "g" if t.derivative_order == 0 else f"g^{{({t.derivative_order})}}"
    parts.append(rf"\mathbb{{E}}\left[{g}(X)\right]")
    return "".join(parts)


def render_reduction_latex(red: Reduction) -> str:
    rhs = " + ".join(_term_latex(t) for t in red.terms)
    return rf"\mathbb{{E}}\left[g(X)X^{{{red.n}}}\right] = {rhs}"


def reduction_to_json(red: Reduction) -> dict:
    return {
        "n": red.n,
        "law_kind": red.law_kind,
        "terms": [
            {
                "order": t.derivative_order,
                "coeff": str(t.coeff),
                "mu_pow": t.mu_power,
                "s2pow": t.sigma2_power,
            }
            for t in red.terms
        ],
    }


def reduction_from_json(data: dict) -> Reduction:
    return Reduction.from_mapping(
        int(data["n"]),
        data["law_kind"],
        {(int(t["order"]), int(t["mu_pow"]), int(t["s2pow"])): int(t["coeff"]) for t in data["terms"]},
    )


def _csv_text(rows: Sequence[Sequence[Any]], header: Optional[Sequence[str]] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _number(text: str) -> Fraction:
    try:
        value = parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return value


def _law(mu: Optional[Fraction], sigma2: Optional[Fraction]) -> GaussianLaw:
    mu = Fraction(0) if mu is None else mu
    sigma2 = Fraction(1) if sigma2 is None else sigma2
    if sigma2 <= 0:
        raise UsageError(f"sigma2 must be > 0, got {sigma2}")
    return GaussianLaw(mu, sigma2)


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --- commands ----------------------------------------------------------------


def _coeff_rows(table: str, max_n: int) -> list[list[int]]:
    if table == "hermite":
        return [list(r) for r in hermite_coeff_table(max_n).rows]
    if table == "genfact":
        return [list(r) for r in gen_factorial_coeff_table(max_n).entries]
    st = stirling_tables(max_n)
    src = st.first_kind if table == "stirling1" else st.second_kind
    return [list(r) for r in src]


def cmd_coeff(args: argparse.Namespace, out) -> int:
    if not 0 <= args.max_n <= 200:
        raise UsageError("--max-n must be in 0..200")
    rows = _coeff_rows(args.table, args.max_n)
    fmt = resolve(args, "format")
    if fmt == "json":
        json.dump(
            {"table": args.table, "max_n": args.max_n, "rows": [[str(v) for v in r] for r in rows]},
            out,
        )
        out.write("\n")
    elif fmt == "csv":
        out.write(_csv_text(rows))
    elif fmt == "latex":
        width = max(len(r) for r in rows)
        out.write(r"\begin{tabular}{r|" + "r" * width + "}\n")
        out.write("n & " + " & ".join(str(k) for k in range(width)) + r" \\ \hline" + "\n")
        for n, r in enumerate(rows):
            cells = [str(v) for v in r] + [""] * (width - len(r))
            out.write(f"{n} & " + " & ".join(cells) + r" \\" + "\n")
        out.write(r"\end{tabular}" + "\n")
    else:
        for n, r in enumerate(rows):
            out.write(f"{n:>3}: " + " ".join(str(v) for v in r) + "\n")
    return 0


def cmd_reduce(args: argparse.Namespace, out) -> int:
    if not 0 <= args.n <= 60:
        raise UsageError("n must be in 0..60")
    law = _law(args.mu, args.sigma2)
    red = reduce_zero_mean(args.n) if args.mu is None else reduce_general_mean(args.n)
    fmt = resolve(args, "format")
    weights = None
    if args.mu is not None or args.sigma2 is not None:
        # numeric weight in front of each derivative average
        weights: dict[int, Fraction] = {}
        for t in red.terms:
            w = t.coeff * Fraction(law.mu) ** t.mu_power * Fraction(law.sigma2) ** t.sigma2_power
            weights[t.derivative_order] = weights.get(t.derivative_order, Fraction(0)) + w
    if fmt == "json":
        data = reduction_to_json(red)
        if weights is not None:
            data["law"] = {"mu": _fmt_fraction(Fraction(law.mu)), "sigma2": _fmt_fraction(Fraction(law.sigma2))}
            data["weights"] = {str(k): _fmt_fraction(v) for k, v in sorted(weights.items())}
        json.dump(data, out)
        out.write("\n")
    elif fmt == "csv":
        out.write(
            _csv_text(
                [(t.derivative_order, t.coeff, t.mu_power, t.sigma2_power) for t in red.terms],
                header=("order", "coeff", "mu_pow", "s2pow"),
            )
        )
    elif fmt == "latex":
        out.write(render_reduction_latex(red) + "\n")
    else:
        out.write(render_reduction_human(red) + "\n")
        if weights is not None:
            for order, w in sorted(weights.items()):
                out.write(f"  weight of E[g^({order})(X)]: {_fmt_fraction(w)}\n")
    return 0


def stein_value(f: AnalyticFunction, n: int, law: GaussianLaw) -> float:
    red = reduce_zero_mean(n) if law.mu == 0 else reduce_general_mean(n)
    averages = {order: exact_expectation(f.derivative(order), law) for order in red.derivative_orders}
    return evaluate_reduction(red, law, averages)


def _eval_all(f, n, law, args) -> dict[str, Any]:
    methods = EVAL_METHODS if args.method == "all" else (args.method,)
    values: dict[str, float] = {}
    info: dict[str, Any] = {}
    quad_order = resolve(args, "quad_order")
    if not 1 <= quad_order <= MAX_ORDER:
        raise UsageError(f"quad_order must be in 1..{MAX_ORDER}")
    for method in methods:
        if method == "stein":
            values["stein"] = stein_value(f, n, law)
            if isinstance(f, Poly):
                info["exact"] = _fmt_fraction(poly_expectation_product(f.poly, n, law))
        elif method == "ibd":
            cfg = AveragedShiftConfig(max_terms=resolve(args, "max_terms"))
            res = ibd_product_expectation(f, n, law, cfg)
            values["ibd"] = res.value
            info["ibd_terms_used"] = res.terms_used
            info["ibd_converged"] = res.converged
        elif method == "quad":
            values["quad"] = quadrature_expectation(f, n, law, quad_order)
        elif method == "mc":
            mc = monte_carlo_expectation(
                f, n, law, samples=resolve(args, "samples"), seed=resolve(args, "seed")
            )
            values["mc"] = mc.estimate
            info["mc_std_error"] = mc.std_error
    return {"values": values, "info": info}


def _magnitude_scale(f, n, law, order) -> float:
    # E|g(X) X^n|: a natural size for relative comparisons near zero
    return quadrature_expectation(lambda x: abs(f(x)) * abs(x) ** n, 0, law, order)


def cmd_eval(args: argparse.Namespace, out) -> int:
    try:
        f = parse_function(args.g_spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.n < 0:
        raise UsageError("n must be non-negative")
    law = _law(args.mu, args.sigma2)
    tol = resolve(args, "tol")
    result = _eval_all(f, args.n, law, args)
    values, info = result["values"], result["info"]

    ok = True
    discrepancy = None
    det = {k: v for k, v in values.items() if k != "mc"}
    if len(det) >= 2:
        scale = max(_magnitude_scale(f, args.n, law, resolve(args, "quad_order")), *map(abs, det.values()))
        names = list(det)
        discrepancy = 0.0
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                d = abs(det[a] - det[b]) / scale if scale > 0 else abs(det[a] - det[b])
                discrepancy = max(discrepancy, d)
        ok &= discrepancy <= tol
    if info.get("ibd_converged") is False:
        ok = False
    mc_z = None
    if "mc" in values and len(det) >= 1:
        ref = det.get("stein", next(iter(det.values())))
        se = info["mc_std_error"]
        mc_z = abs(values["mc"] - ref) / se if se > 0 else (0.0 if values["mc"] == ref else math.inf)
        info["mc_z"] = mc_z
        ok &= mc_z <= 4.0

    fmt = resolve(args, "format")
    if fmt == "json":
        json.dump(
            {
                "g": args.g_spec,
                "n": args.n,
                "mu": _fmt_fraction(Fraction(law.mu)),
                "sigma2": _fmt_fraction(Fraction(law.sigma2)),
                "values": values,
                "info": info,
                "discrepancy": discrepancy,
                "tol": tol,
                "ok": ok,
            },
            out,
        )
        out.write("\n")
    elif fmt == "csv":
        out.write(_csv_text([(k, repr(v)) for k, v in values.items()], header=("method", "value")))
    elif fmt == "latex":
        out.write(r"\begin{tabular}{lr}" + "\n")
        for k, v in values.items():
            out.write(f"{k} & {v!r} \\\\\n")
        out.write(r"\end{tabular}" + "\n")
    else:
        for k, v in values.items():
            out.write(f"{k:<6} {v!r}\n")
        if "exact" in info:
            out.write(f"exact  {info['exact']}\n")
        if mc_z is not None:
            out.write(f"mc std error {info['mc_std_error']:.3e} (|z| = {mc_z:.2f})\n")
        if discrepancy is not None:
            out.write(f"max relative discrepancy {discrepancy:.3e} (tol {tol:g})\n")
        if info.get("ibd_converged") is False:
            out.write("ibd series did not converge\n")
    return 0 if ok else 1


def cmd_verify(args: argparse.Namespace, out) -> int:
    if not 0 <= args.max_n <= 60:
        raise UsageError("--max-n must be in 0..60")
    status = 0
    for res in run_suite(args.suite, args.max_n):
        if res.ok:
            out.write(f"{res.name}: pass ({res.checks} checks, max_n={res.max_n})\n")
        else:
            fail = ", ".join(f"{k}={v}" for k, v in res.first_failure.items())
            out.write(f"{res.name}: FAIL after {res.checks} checks: {fail}\n")
            status = 1
    return status


def bench_records(n_max: int, repeats: int) -> list[dict[str, Any]]:
    records = []
    producers = {
        "closed_form": reduce_zero_mean,
        "recursive": lambda n: reduction_stats(n, "recursive"),
    }
    for n in range(1, n_max + 1):
        for method, fn in producers.items():
            best = None
            for _ in range(repeats):
                t0 = time.perf_counter_ns()
                fn(n)
                elapsed = time.perf_counter_ns() - t0
                best = elapsed if best is None else min(best, elapsed)
            stats = reduction_stats(n, method)
            records.append(
                {
                    "n": n,
                    "method": method,
                    "wall_time_ns": max(1, best),
                    "final_terms": stats.final_term_count,
                    "peak_terms": stats.peak_intermediate_term_count,
                    "steps": stats.rewrite_steps,
                }
            )
    return records


def cmd_bench(args: argparse.Namespace, out) -> int:
    if not 1 <= args.n_max <= 30:
        raise UsageError("--n-max must be in 1..30")
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    records = bench_records(args.n_max, args.repeats)
    fmt = resolve(args, "format")
    if fmt == "json":
        json.dump(records, out)
        out.write("\n")
    elif fmt == "csv":
        out.write(_csv_text([[r[c] for c in BENCH_COLUMNS] for r in records], header=BENCH_COLUMNS))
    elif fmt == "latex":
        out.write(r"\begin{tabular}{rlrrrr}" + "\n")
        out.write(" & ".join(c.replace("_", r"\_") for c in BENCH_COLUMNS) + r" \\ \hline" + "\n")
        for r in records:
            out.write(" & ".join(str(r[c]) for c in BENCH_COLUMNS) + r" \\" + "\n")
        out.write(r"\end{tabular}" + "\n")
    else:
        out.write(f"{'n':>3} {'method':<12} {'time_ns':>12} {'final':>6} {'peak':>6} {'steps':>6}\n")
        for r in records:
            out.write(
                f"{r['n']:>3} {r['method']:<12} {r['wall_time_ns']:>12} "
                f"{r['final_terms']:>6} {r['peak_terms']:>6} {r['steps']:>6}\n"
            )
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None)
    common.add_argument("--config", default=None, help="key=value config file")

    parser = argparse.ArgumentParser(
        prog="steinext",
        description="Closed-form reduction of Gaussian expectations E[g(X) X^n].",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", parents=[common], help="emit a coefficient triangle")
    p.add_argument("table", choices=("hermite", "genfact", "stirling1", "stirling2"))
    p.add_argument("--max-n", type=int, default=10)
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("reduce", parents=[common], help="reduce E[g(X) X^n]")
    p.add_argument("n", type=int)
    p.add_argument("--mu", type=_number, default=None,
                   help="use the general-mean reduction (numeric weights shown)")
    p.add_argument("--sigma2", type=_number, default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("eval", parents=[common], help="evaluate E[g(X) X^n] numerically")
    p.add_argument("g_spec", help="poly:c0,c1,...  |  exp:a  |  sin:a  |  cos:a")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--mu", type=_number, default=None)
    p.add_argument("--sigma2", type=_number, default=None)
    p.add_argument("--method", choices=EVAL_METHODS + ("all",), default="all")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--max-terms", dest="max_terms", type=int, default=None)
    p.add_argument("--quad-order", dest="quad_order", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="run exact identity suites")
    p.add_argument("suite", choices=("recurrence", "lemma2", "falling", "stein-vs-recursive", "all"))
    p.add_argument("--max-n", type=int, default=60)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="closed form vs recursive rewriting")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--repeats", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.config_values = load_config(args.config)
        if resolve(args, "format") not in FORMATS:
            raise UsageError(f"unknown format {resolve(args, 'format')!r}")
        return args.func(args, out)
    except UsageError as exc:
        print(f"steinext: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"steinext: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
