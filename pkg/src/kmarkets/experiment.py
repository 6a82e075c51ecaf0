"""Monte Carlo engine for revenue, pointwise, and welfare deficiency.

Replication j of curve point i always uses seed base_seed + i*2^32 + j, so
results are bit-identical no matter how replications are scheduled; the
optional process pool only changes wall time.  Deficiency is measured
against the best policy of the strategy's own class under the true
distribution: the optimal single price for uniform ERM, the pointwise
optimal policy for K-markets.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .families import DistributionSpec, ParameterDomainError, sample
from .oracle import (
    DEFAULT_QUAD,
    GRID_POINTS,
    QuadratureConfig,
    _golden_max,
    expected_revenue,
    optimal_3pd_policy,
    optimal_uniform_price,
    pointwise_revenue,
    welfare,
)
from .pricing import Constant, k_markets_erm, k_schedule, price_at, uniform_erm

SEED_STRIDE = 1 << 32  # seed offset between consecutive curve points


@dataclass(frozen=True)
class Strategy:
    """Which estimator to fit per replication: uniform ERM or K-markets ERM.

    K-markets takes either a fixed market count or a schedule name mapping
    the sample size to a market count.
    """

    kind: str
    k: Optional[int] = None
    schedule: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("uniform", "kmarkets"):
            raise ParameterDomainError("strategy kind must be 'uniform' or 'kmarkets'")
        if self.kind == "kmarkets" and (self.k is None) == (self.schedule is None):
            raise ParameterDomainError("kmarkets needs exactly one of k or schedule")
        if self.k is not None and self.k < 1:
            raise ParameterDomainError("market count must be positive")
        if self.schedule is not None and self.schedule not in ("theory", "sim", "ebay"):
            raise ParameterDomainError(f"unknown schedule variant: {self.schedule!r}")

    @property
    def tag(self) -> str:
        if self.kind == "uniform":
            return "uniform"
        if self.k is not None:
            return f"k={self.k}"
        return f"k-sched:{self.schedule}"


def uniform_strategy() -> Strategy:
    return Strategy(kind="uniform")


def kmarkets_strategy(k: int | None = None, schedule: str | None = None) -> Strategy:
    return Strategy(kind="kmarkets", k=k, schedule=schedule)


@dataclass(frozen=True)
class DeficiencyPoint:
    n: int
    strategy_tag: str
    mean_deficiency: float
    std_error: float
    reps: int
    mean_revenue: float


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def _fit(strategy: Strategy, data):
    if strategy.kind == "uniform":
        return Constant(uniform_erm(data.y))
    k = strategy.k if strategy.k is not None else k_schedule(len(data), strategy.schedule)
    pf, _ = k_markets_erm(data, k)
    return pf


def _rep_chunk(args):
    spec, strategy, n, seeds, cfg, kind, bench, x0 = args
    defs = np.empty(len(seeds))
    revs = np.empty(len(seeds))
    for i, seed in enumerate(seeds):
        data = sample(spec, n, seed)
        pf = _fit(strategy, data)
        if kind == "revenue":
            r = expected_revenue(spec, pf, cfg)
            defs[i] = bench - r
            revs[i] = r
        elif kind == "welfare":
            defs[i] = abs(welfare(spec, pf, cfg) - bench)
            revs[i] = expected_revenue(spec, pf, cfg)
        else:  # pointwise
            r = float(pointwise_revenue(spec, price_at(pf, x0), x0))
            defs[i] = bench - r
            revs[i] = r
    return defs, revs


def _run_reps(spec, strategy, n, reps, seed0, cfg, kind, bench, x0, workers):
    if reps < 1:
        raise ParameterDomainError("need at least one replication")
    seeds = [seed0 + j for j in range(reps)]
    if workers <= 1:
        return _rep_chunk((spec, strategy, n, seeds, cfg, kind, bench, x0))
    chunks = [c for c in np.array_split(np.arange(reps), workers) if c.size]
    jobs = [
        (spec, strategy, n, [seeds[j] for j in c], cfg, kind, bench, x0) for c in chunks
    ]
    with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
        parts = list(pool.map(_rep_chunk, jobs))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _point(n, strategy, defs, revs) -> DeficiencyPoint:
    reps = defs.size
    se = float(np.std(defs, ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
    return DeficiencyPoint(
        n=int(n),
        strategy_tag=strategy.tag,
        mean_deficiency=float(defs.mean()),
        std_error=se,
        reps=int(reps),
        mean_revenue=float(revs.mean()),
    )


def _revenue_benchmark(spec, strategy, cfg) -> float:
    if strategy.kind == "uniform":
        return optimal_uniform_price(spec, cfg)[1]
    return expected_revenue(spec, optimal_3pd_policy(spec, cfg=cfg), cfg)


def _welfare_benchmark(spec, strategy, cfg) -> float:
    if strategy.kind == "uniform":
        p_star, _ = optimal_uniform_price(spec, cfg)
        return welfare(spec, Constant(p_star), cfg)
    return welfare(spec, optimal_3pd_policy(spec, cfg=cfg), cfg)


def revenue_deficiency(
    spec: DistributionSpec,
    strategy: Strategy,
    n: int,
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
) -> DeficiencyPoint:
    """Mean revenue shortfall of the fitted strategy at sample size n."""
    bench = _revenue_benchmark(spec, strategy, cfg)
    defs, revs = _run_reps(spec, strategy, n, reps, base_seed, cfg, "revenue", bench, None, workers)
    return _point(n, strategy, defs, revs)


def welfare_deficiency(
    spec: DistributionSpec,
    strategy: Strategy,
    n: int,
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
) -> DeficiencyPoint:
    """Mean absolute welfare gap to the strategy's own optimal policy."""
    bench = _welfare_benchmark(spec, strategy, cfg)
    defs, revs = _run_reps(spec, strategy, n, reps, base_seed, cfg, "welfare", bench, None, workers)
    return _point(n, strategy, defs, revs)


def pointwise_deficiency(
    spec: DistributionSpec,
    n: int,
    k: int,
    x0: float,
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
) -> DeficiencyPoint:
    """Revenue shortfall of the K-markets price at a single covariate value."""
    if not 0.0 <= x0 <= 1.0:
        raise ParameterDomainError("x0 must lie in [0, 1]")
    strategy = kmarkets_strategy(k=k)
    ys = np.linspace(0.0, 1.0, GRID_POINTS)
    rev = pointwise_revenue(spec, ys, np.full_like(ys, x0))
    i = int(np.argmax(rev))
    lo, hi = ys[max(i - 1, 0)], ys[min(i + 1, GRID_POINTS - 1)]
    _, r_ref = _golden_max(
        lambda q: pointwise_revenue(spec, q, np.full_like(q, x0)), lo, hi, cfg.refine_tol
    )
    bench = max(float(r_ref[0]), float(rev[i]))
    defs, revs = _run_reps(spec, strategy, n, reps, base_seed, cfg, "pointwise", bench, x0, workers)
    return _point(n, strategy, defs, revs)


def _check_n_list(n_list) -> list[int]:
    ns = [int(n) for n in n_list]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ParameterDomainError("n_list must be nonempty and strictly increasing")
    return ns


def _curve(spec, strategy, ns, reps, base_seed, cfg, kind, workers):
    bench = (
        _welfare_benchmark(spec, strategy, cfg)
        if kind == "welfare"
        else _revenue_benchmark(spec, strategy, cfg)
    )
    points = []
    for i, n in enumerate(ns):
        defs, revs = _run_reps(
            spec, strategy, n, reps, base_seed + i * SEED_STRIDE, cfg, kind, bench, None, workers
        )
        points.append(_point(n, strategy, defs, revs))
    return points


def deficiency_curve(
    spec: DistributionSpec,
    strategy: Strategy,
    n_list: Sequence[int],
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
    kind: str = "revenue",
) -> list[DeficiencyPoint]:
    """Deficiency versus sample size; point i uses seeds base_seed + i*2^32 + j."""
    ns = _check_n_list(n_list)
    if len(ns) < 3:
        raise ParameterDomainError("a curve needs at least 3 sample sizes")
    if kind not in ("revenue", "welfare"):
        raise ParameterDomainError("curve kind must be 'revenue' or 'welfare'")
    return _curve(spec, strategy, ns, reps, base_seed, cfg, kind, workers)


def fit_rate(curve: Sequence[DeficiencyPoint]) -> RateFit:
    """OLS fit of log mean deficiency on log n."""
    if len(curve) < 3:
        raise ParameterDomainError("rate fit needs at least 3 points")
    ns = np.array([p.n for p in curve], dtype=float)
    means = np.array([p.mean_deficiency for p in curve], dtype=float)
    if len(set(ns)) != len(ns):
        raise ParameterDomainError("rate fit needs distinct sample sizes")
    if means.min() <= 0.0:
        raise ParameterDomainError("rate fit needs strictly positive mean deficiencies")
    lx, ly = np.log(ns), np.log(means)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    total = ly - ly.mean()
    sst = float(total @ total)
    r2 = 1.0 if sst == 0.0 else 1.0 - float(resid @ resid) / sst
    return RateFit(slope=float(slope), intercept=float(intercept), r_squared=r2)


@dataclass(frozen=True)
class CrossingResult:
    n_crossing: Optional[int]
    uniform_curve: tuple[DeficiencyPoint, ...]
    kmarkets_curve: tuple[DeficiencyPoint, ...]


def crossing_scan(
    spec: DistributionSpec,
    n_list: Sequence[int],
    k: int,
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
) -> CrossingResult:
    """Run uniform and K-markets on shared seeds and find where K-markets pulls ahead.

    Both strategies see identical datasets at every (n, replication) pair.
    Returns the smallest n whose mean K-markets revenue weakly exceeds the
    mean uniform revenue, with both full curves attached.
    """
    ns = _check_n_list(n_list)
    uni = _curve(spec, uniform_strategy(), ns, reps, base_seed, cfg, "revenue", workers)
    km = _curve(spec, kmarkets_strategy(k=k), ns, reps, base_seed, cfg, "revenue", workers)
    n_crossing = None
    for pu, pk in zip(uni, km):
        if pk.mean_revenue >= pu.mean_revenue:
            n_crossing = pu.n
            break
    return CrossingResult(
        n_crossing=n_crossing, uniform_curve=tuple(uni), kmarkets_curve=tuple(km)
    )


def crossing_point(
    spec: DistributionSpec,
    n_list: Sequence[int],
    k: int,
    reps: int,
    base_seed: int,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    workers: int = 1,
) -> Optional[int]:
    """Smallest tested n at which K-markets mean revenue catches uniform."""
    return crossing_scan(spec, n_list, k, reps, base_seed, cfg, workers).n_crossing
