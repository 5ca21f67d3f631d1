"""Command-line surface.

One executable, subcommands for each operation: series evaluation on
matrix files, Monte Carlo oracles, the explicit family and its figure
table, product-formula exponents, product-process simulation, the
spectral radius probe, and stationary-measure diagnostics.

Exit codes: 0 success, 2 input problems (bad files, bad flags,
dimension mismatches), 3 numerical failures (series that did not
converge, iteration budgets).  Randomized commands echo their seed.
All floats print with 12 significant digits; JSON mode emits the raw
double-precision values.
"""

import argparse
import json
import math
import sys

from . import apps, linalg, measures, montecarlo, series
from .errors import InputError, NumericalError

__all__ = ["main"]


def _fmt(x):
    return f"{x:.12g}"


def _print_pairs(pairs, as_json):
    if as_json:
        print(json.dumps(dict(pairs)))
        return
    for key, value in pairs:
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = _fmt(value)
        else:
            text = str(value)
        print(f"{key} = {text}")


def _series_params(args):
    lambda_star = None
    if args.lambda_star != "auto":
        try:
            lambda_star = float(args.lambda_star)
        except ValueError:
            raise InputError(
                f"--lambda-star must be `auto` or a number, got "
                f"{args.lambda_star!r}"
            ) from None
    return series.SeriesParams(
        lambda_star=lambda_star,
        tolerance=args.tol,
        max_order=args.max_order,
        method=args.method,
    )


def _series_pairs(result):
    return [
        ("value", result.value),
        ("orders_used", result.orders_used),
        ("alpha", result.alpha),
        ("tail_bound", result.tail_bound),
        ("lambda_star", result.lambda_star),
        ("converged", result.converged),
    ]


def _emit_series(result, as_json):
    _print_pairs(_series_pairs(result), as_json)
    return 0 if result.converged else 3


def _add_series_flags(parser):
    parser.add_argument("--tol", type=float, default=1e-12)
    parser.add_argument("--max-order", type=int, default=200)
    parser.add_argument("--lambda-star", default="auto")
    parser.add_argument(
        "--method",
        choices=["auto", "enumerate", "recurrence"],
        default="auto",
    )


def _cmd_rm(args):
    spectrum = linalg.singular_spectrum(linalg.read_matrix(args.matrix))
    result = series.r_uniform(spectrum, _series_params(args))
    return _emit_series(result, args.json)


def _cmd_rnu(args):
    g = linalg.read_matrix(args.matrix)
    nu = measures.read_measure(args.measure)
    result = series.r_measure(g, nu, _series_params(args))
    return _emit_series(result, args.json)


def _cmd_oracle_rnu(args):
    g = linalg.read_matrix(args.matrix)
    nu = measures.ProjectiveMeasure.uniform(g.shape[0])
    est = montecarlo.mc_r_nu(
        g,
        nu,
        args.samples,
        montecarlo.RngConfig(seed=args.seed),
        threads=args.threads,
    )
    _print_pairs(
        [
            ("seed", args.seed),
            ("mean", est.mean),
            ("std_error", est.std_error),
            ("n", est.n),
        ],
        args.json,
    )
    return 0


def _cmd_family_t(args):
    if args.t is not None:
        point = apps.lambda_family_t(args.half_dim, args.t, tolerance=args.tol)
        _print_pairs(
            [
                ("t", point.t),
                ("half_dim", point.half_dim),
                ("value", point.value),
                ("tail_bound", point.tail_bound),
            ],
            args.json,
        )
        return 0
    if args.out is None:
        raise InputError("range mode needs --out FILE for the CSV")
    grid = apps.figure_grid(args.t_min, args.t_max, args.steps)
    header = ["t", f"lambda_d{args.half_dim}"]
    with open(args.out, "w") as fh:
        fh.write(",".join(header) + "\n")
        for t in grid:
            point = apps.lambda_family_t(args.half_dim, t, tolerance=args.tol)
            fh.write(f"{t:.12g},{point.value:.12g}\n")
    _print_pairs([("out", args.out), ("rows", len(grid))], args.json)
    return 0


def _cmd_product(args):
    mu1 = measures.read_weighted_matrices(args.mu1)
    mu2 = measures.read_weighted_matrices(args.mu2)
    value = apps.lambda_product(mu1, mu2)
    _print_pairs([("value", value)], args.json)
    return 0


def _cmd_pair(args):
    left = linalg.read_matrix(args.left)
    right = linalg.read_matrix(args.right)
    value = apps.lambda_product([(1.0, left)], [(1.0, right)])
    _print_pairs([("value", value)], args.json)
    return 0


def _cmd_fk(args):
    ensemble = measures.read_ensemble(args.ensemble)
    est = montecarlo.fk_simulate(
        ensemble,
        args.steps,
        montecarlo.RngConfig(seed=args.seed),
        repeats=args.repeats,
        burn_in=args.burn_in,
        threads=args.threads,
    )
    _print_pairs(
        [
            ("seed", args.seed),
            ("mean", est.mean),
            ("std_error", est.std_error),
            ("n", est.n),
            ("steps", args.steps),
            ("burn_in", args.burn_in),
        ],
        args.json,
    )
    return 0


def _cmd_conjecture(args):
    g = linalg.read_matrix(args.matrix)
    probe = montecarlo.conjecture_probe(
        g,
        args.samples,
        montecarlo.RngConfig(seed=args.seed),
        threads=args.threads,
    )
    _print_pairs(
        [
            ("seed", args.seed),
            ("lhs_mean", probe.lhs.mean),
            ("lhs_std_error", probe.lhs.std_error),
            ("lhs_n", probe.lhs.n),
            ("rhs_value", probe.rhs.value),
            ("rhs_tail_bound", probe.rhs.tail_bound),
            ("margin", probe.margin),
            ("discarded", probe.discarded),
        ],
        args.json,
    )
    return 0 if probe.rhs.converged else 3


def _cmd_figure1(args):
    grid = apps.figure_grid(args.t_min, args.t_max, args.steps)
    header, rows = apps.figure1_data(grid)
    apps.write_figure_csv(args.out, header, rows)
    _print_pairs([("out", args.out), ("rows", len(rows))], args.json)
    return 0


def _cmd_momenta_stationary(args):
    ensemble = measures.read_ensemble(args.ensemble)
    chain_rng = montecarlo.RngConfig(seed=args.seed)
    nu = measures.empirical_stationary(
        ensemble, args.burn_in, args.samples, chain_rng
    )
    table = measures.momenta(nu, args.order)
    # The residual re-pushes the chain's states through fresh draws; it
    # must not replay the chain's own sub-stream.
    residual_rng = montecarlo.RngConfig(seed=args.seed, stream=1 << 32)
    residual = measures.stationarity_residual(
        ensemble, nu, args.order, args.samples, residual_rng
    )
    if args.json:
        payload = {
            "seed": args.seed,
            "order": args.order,
            "momenta": {",".join(map(str, c)): v for c, v in table.items()},
            "residual": residual,
        }
        print(json.dumps(payload))
        return 0
    print(f"seed = {args.seed}")
    print(f"momenta (order {args.order}):")
    for c, v in table.items():
        label = "(" + ",".join(map(str, c)) + ")"
        print(f"  {label} = {_fmt(v)}")
    print(f"residual = {_fmt(residual)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="projlyap",
        description=(
            "Average projective log-norms and Lyapunov exponents of "
            "rotation-averaged random matrix products."
        ),
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", action="store_true")
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    p_rm = sub.add_parser("rm", help="series value of the uniform average log-norm")
    p_rm.add_argument("--matrix", required=True)
    _add_series_flags(p_rm)
    p_rm.set_defaults(func=_cmd_rm)

    p_rnu = sub.add_parser("rnu", help="series value against an atomic measure")
    p_rnu.add_argument("--matrix", required=True)
    p_rnu.add_argument("--measure", required=True)
    _add_series_flags(p_rnu)
    p_rnu.set_defaults(func=_cmd_rnu)

    p_oracle = sub.add_parser("oracle", help="Monte Carlo oracles")
    oracle_sub = p_oracle.add_subparsers(dest="oracle_command", required=True)
    p_oracle_rnu = oracle_sub.add_parser(
        "rnu", help="sampled uniform average log-norm"
    )
    p_oracle_rnu.add_argument("--matrix", required=True)
    p_oracle_rnu.add_argument("--samples", type=int, required=True)
    p_oracle_rnu.set_defaults(func=_cmd_oracle_rnu)

    p_lyap = sub.add_parser("lyap", help="explicit Lyapunov exponents")
    lyap_sub = p_lyap.add_subparsers(dest="lyap_command", required=True)

    p_family = lyap_sub.add_parser("family-t", help="the diag(t..,1/t..) family")
    p_family.add_argument("--half-dim", type=int, required=True)
    p_family.add_argument("--t", type=float)
    p_family.add_argument("--t-min", type=float, default=1.0)
    p_family.add_argument("--t-max", type=float, default=6.0)
    p_family.add_argument("--steps", type=int, default=200)
    p_family.add_argument("--out")
    p_family.add_argument("--tol", type=float, default=1e-12)
    p_family.set_defaults(func=_cmd_family_t)

    p_product = lyap_sub.add_parser(
        "product", help="product formula for weighted matrix pairs"
    )
    p_product.add_argument("--mu1", required=True)
    p_product.add_argument("--mu2", required=True)
    p_product.set_defaults(func=_cmd_product)

    p_pair = lyap_sub.add_parser("pair", help="two-matrix rotation sandwich")
    p_pair.add_argument("--left", required=True)
    p_pair.add_argument("--right", required=True)
    p_pair.set_defaults(func=_cmd_pair)

    p_sim = sub.add_parser("simulate", help="product-process simulation")
    sim_sub = p_sim.add_subparsers(dest="simulate_command", required=True)
    p_fk = sim_sub.add_parser("fk", help="renormalized product iteration")
    p_fk.add_argument("--ensemble", required=True)
    p_fk.add_argument("--steps", type=int, required=True)
    p_fk.add_argument("--repeats", type=int, default=4)
    p_fk.add_argument("--burn-in", type=int, default=1000)
    p_fk.set_defaults(func=_cmd_fk)

    p_conj = sub.add_parser(
        "conjecture", help="Haar-averaged log spectral radius probe"
    )
    p_conj.add_argument("--matrix", required=True)
    p_conj.add_argument("--samples", type=int, required=True)
    p_conj.set_defaults(func=_cmd_conjecture)

    p_fig = sub.add_parser("figure1", help="family curves CSV")
    p_fig.add_argument("--out", required=True)
    p_fig.add_argument("--t-min", type=float, default=1.0)
    p_fig.add_argument("--t-max", type=float, default=6.0)
    p_fig.add_argument("--steps", type=int, default=200)
    p_fig.set_defaults(func=_cmd_figure1)

    p_mom = sub.add_parser("momenta", help="moment-coefficient diagnostics")
    mom_sub = p_mom.add_subparsers(dest="momenta_command", required=True)
    p_stat = mom_sub.add_parser(
        "stationary", help="empirical stationary measure momenta"
    )
    p_stat.add_argument("--ensemble", required=True)
    p_stat.add_argument("--burn-in", type=int, default=1000)
    p_stat.add_argument("--samples", type=int, required=True)
    p_stat.add_argument("--order", type=int, required=True)
    p_stat.set_defaults(func=_cmd_momenta_stationary)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
