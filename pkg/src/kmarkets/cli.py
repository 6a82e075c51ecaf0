"""Command-line front end.

Subcommands: price, simulate, pointwise, welfare, rates, crossing, and a
family of adversarial checks.  Exit codes: 0 success, 1 usage error, 2
data or parameter error.  Every randomized command requires --seed.  All
emitted CSV numbers are rendered with 17 significant digits so parsing
them back is lossless.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .adversarial import (
    concavity_margin,
    gilbert_varshamov,
    kl_divergence,
    lemma_c3_check,
    marginal_perturbation_report,
    packing_price_separation,
)
from .experiment import (
    SEED_STRIDE,
    DeficiencyPoint,
    Strategy,
    _curve,
    crossing_scan,
    fit_rate,
    kmarkets_strategy,
    pointwise_deficiency,
    uniform_strategy,
)
from .families import (
    Packing,
    ParameterDomainError,
    PerturbedConditional,
    PerturbedUniform,
    PowerSimulated,
    UniformJoint,
    validate_density,
)
from .ingest import IngestError, ingest
from .oracle import DEFAULT_QUAD, QuadratureConfig
from .pricing import Constant, k_markets_erm

CURVE_COLUMNS = ("n", "strategy", "mean_deficiency", "std_error", "reps", "mean_revenue")


def _g17(value: float) -> str:
    return format(float(value), ".17g")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems by default; this tool reserves 2
    # for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def write_curve(points, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for p in points:
        writer.writerow(
            [p.n, p.strategy_tag, _g17(p.mean_deficiency), _g17(p.std_error), p.reps, _g17(p.mean_revenue)]
        )


def read_curve(path) -> list[DeficiencyPoint]:
    """Parse a deficiency-curve CSV back into points."""
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestError("empty curve file") from None
        if tuple(header) != CURVE_COLUMNS:
            raise IngestError(f"unexpected curve header: {header}")
        points = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                points.append(
                    DeficiencyPoint(
                        n=int(row[0]),
                        strategy_tag=row[1],
                        mean_deficiency=float(row[2]),
                        std_error=float(row[3]),
                        reps=int(row[4]),
                        mean_revenue=float(row[5]),
                    )
                )
            except (ValueError, IndexError):
                raise IngestError(f"line {line_no}: malformed curve row") from None
    if not points:
        raise IngestError("curve file has no data rows")
    return points


def _parse_strategy(text: str) -> Strategy:
    if text == "uniform":
        return uniform_strategy()
    if text.startswith("k="):
        try:
            return kmarkets_strategy(k=int(text[2:]))
        except ValueError:
            raise ParameterDomainError(f"bad market count in strategy {text!r}") from None
    if text.startswith("ksched="):
        name = text.split("=", 1)[1]
        if name not in ("theory", "ebay", "sim"):
            raise ParameterDomainError(f"unknown schedule {name!r}")
        return kmarkets_strategy(schedule=name)
    raise ParameterDomainError(f"unknown strategy {text!r}")


def _parse_n_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ParameterDomainError(f"bad sample-size list {text!r}") from None


def _parse_bits(text: str, m: int) -> tuple[int, ...]:
    bits = tuple(int(ch) for ch in text.strip() if ch in "01")
    if len(bits) != len(text.strip()) or len(bits) != m:
        raise ParameterDomainError(f"alpha must be a bit string of length {m}")
    return bits


def _add_family_args(p) -> None:
    p.add_argument("--family", required=True, choices=["uniform", "power", "perturbed", "packing"])
    p.add_argument("--a", type=float, help="perturbation amplitude")
    p.add_argument("--delta", type=float, help="perturbation scale")
    p.add_argument("--x0", type=float, help="center of the covariate window (conditional perturbation)")
    p.add_argument("--m", type=int, help="number of covariate bins (packing)")
    p.add_argument("--alpha", help="bit string selecting perturbed bins (packing)")


def _build_family(args):
    if args.family == "uniform":
        return UniformJoint()
    if args.family == "power":
        return PowerSimulated()
    if args.family == "perturbed":
        if args.a is None or args.delta is None:
            raise ParameterDomainError("perturbed family needs --a and --delta")
        if args.x0 is not None:
            return PerturbedConditional(a=args.a, delta=args.delta, x0=args.x0)
        return PerturbedUniform(a=args.a, delta=args.delta)
    if args.m is None or args.a is None or args.alpha is None:
        raise ParameterDomainError("packing family needs --m, --a and --alpha")
    return Packing(m=args.m, a=args.a, alpha=_parse_bits(args.alpha, args.m))


def _quad_config(args) -> QuadratureConfig:
    y_panels = getattr(args, "quad_y", None) or DEFAULT_QUAD.y_panels
    x_panels = getattr(args, "quad_x", None) or DEFAULT_QUAD.x_panels
    return QuadratureConfig(y_panels=y_panels, x_panels=x_panels)


def _add_quad_args(p) -> None:
    p.add_argument("--quad-y", type=int, dest="quad_y", help="Simpson panels in y")
    p.add_argument("--quad-x", type=int, dest="quad_x", help="Simpson panels in x")


def _emit_curve(points, out_path) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            write_curve(points, fh)
        print(f"wrote {len(points)} rows to {out_path}")
    else:
        write_curve(points, sys.stdout)


def _cmd_price(args) -> int:
    data, report = ingest(args.input, has_header=not args.no_header)
    pf, partition = k_markets_erm(data, args.k)
    print(f"rows_read={report.rows_read} bidders_kept={report.bidders_kept}")
    print(f"bid_range=[{_g17(report.y_min)}, {_g17(report.y_max)}]")
    print(f"rating_range=[{_g17(report.x_min)}, {_g17(report.x_max)}]")
    print(f"k_requested={partition.k_requested} k_effective={partition.k_effective}")
    prices = [pf.p] if isinstance(pf, Constant) else list(pf.prices)
    k = len(prices)
    for i, price in enumerate(prices):
        lo, hi = i / k, (i + 1) / k
        closer = "]" if i == k - 1 else ")"
        n_i = partition.markets[i].size
        print(f"market {i + 1}: x [{_g17(lo)}, {_g17(hi)}{closer} n={n_i} price={_g17(price)}")
    return 0


def _cmd_simulate(args) -> int:
    spec = _build_family(args)
    strategy = _parse_strategy(args.strategy)
    ns = _parse_n_list(args.n)
    points = _curve(spec, strategy, ns, args.reps, args.seed, _quad_config(args), "revenue", args.workers)
    _emit_curve(points, args.out)
    return 0


def _cmd_welfare(args) -> int:
    spec = _build_family(args)
    strategy = _parse_strategy(args.strategy)
    ns = _parse_n_list(args.n)
    points = _curve(spec, strategy, ns, args.reps, args.seed, _quad_config(args), "welfare", args.workers)
    _emit_curve(points, args.out)
    return 0


def _cmd_pointwise(args) -> int:
    spec = _build_family(args)
    cfg = _quad_config(args)
    points = []
    for i, n in enumerate(_parse_n_list(args.n)):
        points.append(
            pointwise_deficiency(
                spec, n, args.k, args.at, args.reps, args.seed + i * SEED_STRIDE, cfg, args.workers
            )
        )
    _emit_curve(points, args.out)
    return 0


def _cmd_rates(args) -> int:
    points = read_curve(args.curve)
    tags = sorted({p.strategy_tag for p in points})
    if args.strategy is not None:
        points = [p for p in points if p.strategy_tag == args.strategy]
        if not points:
            raise IngestError(f"no rows with strategy {args.strategy!r} (have: {', '.join(tags)})")
    elif len(tags) > 1:
        raise IngestError(f"curve mixes strategies {', '.join(tags)}; pick one with --strategy")
    fit = fit_rate(points)
    print(f"points={len(points)} strategy={points[0].strategy_tag}")
    print(f"slope={_g17(fit.slope)}")
    print(f"intercept={_g17(fit.intercept)}")
    print(f"r_squared={_g17(fit.r_squared)}")
    return 0


def _cmd_crossing(args) -> int:
    spec = _build_family(args)
    result = crossing_scan(
        spec, _parse_n_list(args.n), args.k, args.reps, args.seed, _quad_config(args), args.workers
    )
    if result.n_crossing is None:
        print("crossing=none")
    else:
        print(f"crossing={result.n_crossing}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_curve(list(result.uniform_curve) + list(result.kmarkets_curve), fh)
        print(f"wrote curves to {args.out}")
    return 0


def _cmd_adv_gv(args) -> int:
    book = gilbert_varshamov(args.m)
    d = -(-args.m // 8)
    print(f"m={args.m} words={book.words.shape[0]} min_distance>={d}")
    return 0


def _cmd_adv_hellinger(args) -> int:
    report = marginal_perturbation_report(args.a, args.delta, _quad_config(args))
    print(f"hellinger_sq={_g17(report.hellinger_sq)}")
    print(f"kl={_g17(report.kl)}")
    print(f"analytic_bound={_g17(report.analytic_bound)}")
    print(f"bound_satisfied={str(report.bound_satisfied).lower()}")
    return 0


def _default_pair(m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    zeros = tuple(0 for _ in range(m))
    spaced = tuple(1 if i % 8 == 0 else 0 for i in range(m))
    return zeros, spaced


def _cmd_adv_kl(args) -> int:
    zeros, spaced = _default_pair(args.m)
    alpha = _parse_bits(args.alpha, args.m) if args.alpha else zeros
    alpha2 = _parse_bits(args.alpha2, args.m) if args.alpha2 else spaced
    value = kl_divergence(
        Packing(m=args.m, a=args.a, alpha=alpha),
        Packing(m=args.m, a=args.a, alpha=alpha2),
        _quad_config(args),
    )
    print(f"kl={_g17(value)}")
    return 0


def _cmd_adv_separation(args) -> int:
    zeros, spaced = _default_pair(args.m)
    alpha = _parse_bits(args.alpha, args.m) if args.alpha else zeros
    alpha2 = _parse_bits(args.alpha2, args.m) if args.alpha2 else spaced
    value = packing_price_separation(args.m, args.a, alpha, alpha2, args.grid, _quad_config(args))
    print(f"separation={_g17(value)}")
    return 0


def _cmd_adv_lemma_c3(args) -> int:
    result = lemma_c3_check(args.b, args.delta, _quad_config(args))
    print(f"p_star={_g17(result.p_star)}")
    print(f"interval=({_g17(result.interval[0])}, {_g17(result.interval[1])})")
    print(f"inside={str(result.inside).lower()}")
    print(f"max_second_derivative={_g17(concavity_margin(args.b, args.delta))}")
    return 0


def _cmd_adv_validate(args) -> int:
    spec = _build_family(args)
    report = validate_density(spec, args.grid)
    print(f"max_norm_error={_g17(report.max_norm_error)}")
    print(f"min_density={_g17(report.min_density)}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="kmarkets", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("price", help="K-markets prices from an auction CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(func=_cmd_price)

    for name, func, needs_strategy in (
        ("simulate", _cmd_simulate, True),
        ("welfare", _cmd_welfare, True),
        ("pointwise", _cmd_pointwise, False),
    ):
        p = sub.add_parser(name, help=f"{name} deficiency curve")
        _add_family_args(p)
        if needs_strategy:
            p.add_argument("--strategy", required=True)
        else:
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--at", type=float, required=True, help="covariate value to evaluate at")
        p.add_argument("--n", required=True, help="comma-separated sample sizes")
        p.add_argument("--reps", type=int, required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out")
        p.add_argument("--workers", type=int, default=1)
        _add_quad_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("rates", help="fit a rate to a saved curve")
    p.add_argument("--curve", required=True)
    p.add_argument("--strategy")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("crossing", help="where K-markets catches uniform pricing")
    _add_family_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_crossing)

    adv = sub.add_parser("adversarial", help="lower-bound construction checks")
    advsub = adv.add_subparsers(dest="check", required=True, parser_class=_Parser)

    p = advsub.add_parser("gv", help="greedy codebook")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_adv_gv)

    p = advsub.add_parser("hellinger", help="marginal perturbation divergences")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_adv_hellinger)

    p = advsub.add_parser("kl", help="KL between two packing laws")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--alpha")
    p.add_argument("--alpha2")
    _add_quad_args(p)
    p.set_defaults(func=_cmd_adv_kl)

    p = advsub.add_parser("separation", help="optimal-policy L2 gap between packings")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--alpha")
    p.add_argument("--alpha2")
    p.add_argument("--grid", type=int, default=1025)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_adv_separation)

    p = advsub.add_parser("lemma-c3", help="optimal-price interval of the perturbed marginal")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    _add_quad_args(p)
    p.set_defaults(func=_cmd_adv_lemma_c3)

    p = advsub.add_parser("validate", help="density normalization report")
    _add_family_args(p)
    p.add_argument("--grid", type=int, default=101)
    p.set_defaults(func=_cmd_adv_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (IngestError, ParameterDomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
