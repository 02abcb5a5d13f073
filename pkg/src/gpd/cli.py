"""``gpd`` command-line front end.

Exit status is 0 on success, 1 for domain or numerical errors and 2 for
usage or configuration errors.  Every error path prints one line starting
with ``error:`` on standard error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys

import numpy as np

from gpd import oracles
from gpd.errors import ConfigurationError, GpdError
from gpd.prodist import PINNED_CONVENTION, DistSpec, Method, Phi1Convention, Variable, _standardize, pdf_array

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_RHOS = (-0.9, 0.0, 0.5, 0.9)
TABLE_HEADER = ["variable", "n_hat", "rho", "z", "method", "value", "err_estimate"]
MC_HEADER = ["z", "empirical_cdf", "closed_cdf", "abs_diff"]
METHOD_NAMES = {"closed": Method.CLOSED, "mixture": Method.MIXTURE, "k0": Method.K0_INTEGRAL}
BENCH_LABELS = {Method.CLOSED: "Analytical", Method.MIXTURE: "Mixture", Method.K0_INTEGRAL: "K0"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fmt(x: float) -> str:
    return repr(float(x))


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _spec(args, rho=None) -> DistSpec:
    var = Variable(args.var)
    n = args.n
    if n is None:
        n = 1
    if var is Variable.PRODUCT and n != 1:
        raise UsageError("--n applies to mean and sum only")
    return DistSpec(var, n, args.rho if rho is None else rho)


def _grid(args) -> np.ndarray:
    if not (np.isfinite(args.z_min) and np.isfinite(args.z_max)) or not args.z_min < args.z_max:
        raise UsageError("need finite --z-min < --z-max")
    if args.z_steps < 2:
        raise UsageError("--z-steps must be at least 2")
    return np.linspace(args.z_min, args.z_max, args.z_steps)


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


# ---------------------------------------------------------------- commands

def cmd_cdf(args) -> int:
    spec = _spec(args)
    z = _standardize(np.array([args.z]), args.sigma_x, args.sigma_y)
    methods = list(METHOD_NAMES.values()) if args.method == "all" else [METHOD_NAMES[args.method]]
    rows = []
    for method in methods:
        v, e = oracles.evaluate(method, z, spec)
        rows.append((method.value, float(v[0]), float(e[0])))
    with _output(args.output) as out:
        if args.format == "json":
            out.write(json.dumps([{"method": m, "value": v, "err_estimate": e} for m, v, e in rows]) + "\n")
        elif args.format == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["method", "value", "err_estimate"])
            for m, v, e in rows:
                w.writerow([m, _fmt(v), _fmt(e)])
        else:
            for m, v, e in rows:
                out.write(f"{m:<8} {v:.15g}  err_estimate={e:.2e}\n")
    return EXIT_OK


def cmd_pdf(args) -> int:
    spec = _spec(args)
    value = float(pdf_array(np.array([args.z]), spec, sigma_x=args.sigma_x, sigma_y=args.sigma_y)[0])
    with _output(args.output) as out:
        if args.format == "json":
            out.write(json.dumps({"z": args.z, "pdf": value}) + "\n")
        else:
            out.write(f"{value:.15g}\n")
    return EXIT_OK


def _table_rows(args):
    grid = _grid(args)
    methods = [METHOD_NAMES[m] for m in args.methods]
    for rho in args.rho_list:
        spec = _spec(args, rho)
        for method in methods:
            values, errs = oracles.evaluate(method, grid, spec)
            for z, v, e in zip(grid, values, errs):
                yield {"variable": spec.variable.value, "n_hat": spec.n_hat, "rho": rho, "z": float(z),
                       "method": method.value, "value": float(v), "err_estimate": float(e)}


def cmd_table(args) -> int:
    bad = [m for m in args.methods if m not in METHOD_NAMES]
    if bad:
        raise UsageError(f"unknown method(s): {','.join(bad)}")
    rows = list(_table_rows(args))
    with _output(args.output) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for r in rows:
            w.writerow([r["variable"], r["n_hat"], _fmt(r["rho"]), _fmt(r["z"]), r["method"],
                        _fmt(r["value"]), _fmt(r["err_estimate"])])
    if args.plot:
        from gpd.plotting import plot_table
        plot_table(rows, args.plot, title=f"{args.var} CDF")
    return EXIT_OK


def cmd_mc(args) -> int:
    spec = _spec(args)
    cfg = oracles.McConfig(spec=spec, z_grid=tuple(_grid(args)), n_samples=args.samples, seed=args.seed,
                           shards=args.shards)
    summary = oracles.mc_run(cfg, workers=args.threads)
    with _output(args.output) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(MC_HEADER)
        for z, e, c in zip(summary.z_grid, summary.empirical_cdf, summary.closed_cdf):
            w.writerow([_fmt(z), _fmt(e), _fmt(c), _fmt(abs(e - c))])
        out.write(json.dumps(summary.to_json_dict()) + "\n")
    if args.plot:
        from gpd.plotting import plot_mc
        plot_mc(summary, args.plot, title=f"{spec.variable.value}, n_hat={spec.n_hat}, rho={spec.rho:g}")
    return EXIT_OK


def _bench_csv(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["section", "quantity"] + [f"rho={r.spec.rho:g}" for r in rows])
    for method in oracles.BENCH_METHODS:
        w.writerow(["timing_nondeterministic", f"median_seconds_{method.value}"]
                   + [_fmt(r.median_seconds[method]) for r in rows])
    for a, b in oracles.BENCH_PAIRS:
        for stat, key in (("max", "max_diff"), ("mean", "mean_diff")):
            w.writerow([f"diff_{a.value}_{b.value}", f"{stat}_abs_diff"]
                       + [_fmt(getattr(r, key)[(a, b)]) for r in rows])


def _bench_plain(rows, out) -> None:
    head = f"{'':<28}" + "".join(f"{'rho=' + format(r.spec.rho, 'g'):>14}" for r in rows)
    out.write("Timings (seconds, median; not reproducible)\n" + head + "\n")
    for method in oracles.BENCH_METHODS:
        out.write(f"{BENCH_LABELS[method]:<28}" + "".join(f"{r.median_seconds[method]:>14.3e}" for r in rows) + "\n")
    for a, b in oracles.BENCH_PAIRS:
        label = f"{BENCH_LABELS[a]}-{BENCH_LABELS[b]}"
        out.write(f"\nDifferences |{label}|\n" + head + "\n")
        for stat, key in (("max", "max_diff"), ("mean", "mean_diff")):
            out.write(f"{stat + '|' + label + '|':<28}" + "".join(f"{getattr(r, key)[(a, b)]:>14.3e}" for r in rows) + "\n")


def cmd_bench(args) -> int:
    specs = [_spec(args, rho) for rho in DEFAULT_RHOS]
    rows = oracles.bench_compare(specs, _grid(args), repetitions=args.reps)
    with _output(args.output) as out:
        (_bench_plain if args.format == "plain" else _bench_csv)(rows, out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from gpd import selftest
    convention = Phi1Convention.EXP_FIRST_MINUS if args.inject_convention_swap else PINNED_CONVENTION
    results = selftest.run_all(quick=args.quick, convention=convention)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}" + (f"  [{r.detail}]" if r.detail else ""))
    if failed:
        print("error: selftest failed: " + "; ".join(f"{r.name}: {r.detail}" for r in failed), file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_dist(p, default_var="product", rho=True):
    if rho:
        p.add_argument("--rho", type=float, required=True, help="correlation coefficient")
    p.add_argument("--var", choices=[v.value for v in Variable], default=default_var)
    p.add_argument("--n", type=int, default=None, help="number of products (mean and sum)")


def _add_grid(p, z_min=-6.0, z_max=6.0, steps=201):
    p.add_argument("--z-min", type=float, default=z_min)
    p.add_argument("--z-max", type=float, default=z_max)
    p.add_argument("--z-steps", type=int, default=steps)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gpd", description="CDF and density of products of correlated Gaussians.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cdf", help="evaluate the CDF at one point")
    p.add_argument("--z", type=float, required=True)
    _add_dist(p)
    p.add_argument("--method", choices=list(METHOD_NAMES) + ["all"], default="closed")
    p.add_argument("--sigma-x", type=float, default=1.0)
    p.add_argument("--sigma-y", type=float, default=1.0)
    p.add_argument("--format", choices=["plain", "csv", "json"], default="plain")
    p.add_argument("--output")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("pdf", help="evaluate the density at one point")
    p.add_argument("--z", type=float, required=True)
    _add_dist(p)
    p.add_argument("--sigma-x", type=float, default=1.0)
    p.add_argument("--sigma-y", type=float, default=1.0)
    p.add_argument("--format", choices=["plain", "json"], default="plain")
    p.add_argument("--output")
    p.set_defaults(func=cmd_pdf)

    p = sub.add_parser("table", help="CSV of CDF values on a grid for several rho and methods")
    p.add_argument("--rho-list", type=_float_list, default=list(DEFAULT_RHOS))
    _add_dist(p, rho=False)
    _add_grid(p)
    p.add_argument("--methods", type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
                   default=list(METHOD_NAMES))
    p.add_argument("--output")
    p.add_argument("--plot", metavar="PATH", help="also render the curves to an image file")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("mc", help="Monte Carlo empirical CDF against the closed form")
    _add_dist(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    _add_grid(p)
    p.add_argument("--output")
    p.add_argument("--plot", metavar="PATH", help="also render the comparison to an image file")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("bench", help="timings and method differences for rho in {-0.9, 0, 0.5, 0.9}")
    _add_dist(p, rho=False)
    p.add_argument("--reps", type=int, default=5)
    _add_grid(p, -8.0, 8.0, 201)
    p.add_argument("--format", choices=["csv", "plain"], default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--inject-convention-swap", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GpdError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except BrokenPipeError:
        # downstream reader (e.g. ``head``) closed early; not an error
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
