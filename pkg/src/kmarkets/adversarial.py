"""Worst-case constructions: divergences, codebooks, optimal-price drift.

These are the numeric checks behind the lower-bound arguments: perturbing
the uniform density moves the optimal price by a controlled amount while
staying statistically close (small Hellinger/KL distance), and a packing of
many such perturbations indexed by a large-minimum-distance codebook forces
any strategy to pay for distinguishing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .families import (
    _simpson_weights,
    DistributionSpec,
    Packing,
    ParameterDomainError,
    PerturbedUniform,
    UniformJoint,
    phi_x,
    phi_y,
)
from .oracle import (
    DEFAULT_QUAD,
    QuadratureConfig,
    marginal_y_cdf,
    optimal_3pd_policy,
    optimal_uniform_price,
)

__all__ = [
    "phi_y",
    "phi_x",
    "hellinger_sq",
    "kl_divergence",
    "DivergenceReport",
    "marginal_perturbation_report",
    "Codebook",
    "gilbert_varshamov",
    "packing_price_separation",
    "LemmaC3Result",
    "lemma_c3_check",
    "concavity_margin",
    "SupportViolationError",
]

# Analytic Hellinger bound constant for the marginal hat perturbation:
# H^2 <= (2*sqrt(2)/3) * a^2 * delta^3.
HELLINGER_BOUND_COEF = 2.0 * math.sqrt(2.0) / 3.0


class SupportViolationError(ValueError):
    """Raised when a KL reference density vanishes on the integration grid."""


def _simpson_2d(func, cfg: QuadratureConfig, x_chunk: int = 64):
    """Iterated Simpson over the unit square, chunked in x to bound memory.

    func(y, x) must broadcast; returns (integral, min value seen).
    """
    ys = np.linspace(0.0, 1.0, cfg.y_panels + 1)
    wy = _simpson_weights(cfg.y_panels)
    xs = np.linspace(0.0, 1.0, cfg.x_panels + 1)
    wx = _simpson_weights(cfg.x_panels)
    total = 0.0
    seen_min = math.inf
    for start in range(0, xs.size, x_chunk):
        vals = func(ys[:, None], xs[None, start : start + x_chunk])
        seen_min = min(seen_min, float(vals.min()))
        total += float((wy @ vals) @ wx[start : start + x_chunk])
    return total, seen_min


def hellinger_sq(
    spec1: DistributionSpec,
    spec2: DistributionSpec,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """Squared Hellinger distance between two joint laws on the unit square."""

    def integrand(y, x):
        root1 = np.sqrt(spec1.conditional_density(y, x))
        root2 = np.sqrt(spec2.conditional_density(y, x))
        return (root1 - root2) ** 2

    value, _ = _simpson_2d(integrand, cfg)
    return max(value, 0.0)


def kl_divergence(
    spec1: DistributionSpec,
    spec2: DistributionSpec,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """KL divergence of spec1 from spec2 over the unit square.

    Errors out if spec2's density is not strictly positive somewhere on the
    integration grid, rather than returning an unreliable number.
    """
    _, ref_min = _simpson_2d(lambda y, x: spec2.conditional_density(y, x), cfg)
    if ref_min <= 0.0:
        raise SupportViolationError(
            f"reference density reaches {ref_min} on the integration grid"
        )

    def integrand(y, x):
        f1 = spec1.conditional_density(y, x)
        f2 = spec2.conditional_density(y, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = f1 * np.log(f1 / f2)
        return np.where(f1 > 0.0, term, 0.0)

    value, _ = _simpson_2d(integrand, cfg)
    return value


@dataclass(frozen=True)
class DivergenceReport:
    hellinger_sq: float
    kl: float
    analytic_bound: float
    bound_satisfied: bool


def marginal_perturbation_report(
    a: float, delta: float, cfg: QuadratureConfig = DEFAULT_QUAD
) -> DivergenceReport:
    """Divergences of the marginal hat perturbation from the uniform law.

    bound_satisfied allows the quadrature a 1e-3 relative slack against the
    analytic (2*sqrt(2)/3) * a^2 * delta^3 Hellinger bound.
    """
    base = UniformJoint()
    bumped = PerturbedUniform(a=a, delta=delta)
    hsq = hellinger_sq(base, bumped, cfg)
    kl = kl_divergence(bumped, base, cfg)
    bound = HELLINGER_BOUND_COEF * a * a * delta**3
    return DivergenceReport(
        hellinger_sq=hsq,
        kl=kl,
        analytic_bound=bound,
        bound_satisfied=bool(hsq <= bound * (1.0 + 1e-3)),
    )


@dataclass(frozen=True)
class Codebook:
    """Binary code of length m; rows of words are the codewords (MSB first)."""

    m: int
    words: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.words, dtype=np.uint8)
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "words", w)


def gilbert_varshamov(m: int) -> Codebook:
    """Greedy lexicographic binary code with minimum distance ceil(m/8).

    Scans all of {0,1}^m in lexicographic order and accepts a word whenever
    it is at distance >= ceil(m/8) from everything accepted so far, which is
    implemented by painting Hamming balls of radius ceil(m/8) - 1 around
    accepted words on a coverage bitmap.  The volume bound guarantees at
    least 2^ceil(m/8) codewords; all-zeros is always accepted first.
    """
    if not 8 <= m <= 24:
        raise ParameterDomainError("m must lie in [8, 24] for exhaustive enumeration")
    d = -(-m // 8)
    size = 1 << m
    masks = np.array(
        [sum(1 << b for b in combo) for r in range(d) for combo in combinations(range(m), r)],
        dtype=np.int64,
    )
    covered = np.zeros(size, dtype=bool)
    accepted: list[int] = []
    chunk = 1024
    ptr = 0
    while ptr < size:
        window = covered[ptr : ptr + chunk]
        rel = int(np.argmax(~window))
        if window[rel]:
            ptr += window.size  # window fully covered
            continue
        word = ptr + rel
        accepted.append(word)
        covered[np.bitwise_xor(word, masks)] = True
        ptr = word + 1
    ints = np.asarray(accepted, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = ((ints[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    return Codebook(m=m, words=bits)


def packing_price_separation(
    m: int,
    a: float,
    alpha,
    alpha_prime,
    x_grid_size: int = 1025,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """L2 distance between the optimal policies of two packing laws."""
    spec1 = Packing(m=m, a=a, alpha=tuple(alpha))
    spec2 = Packing(m=m, a=a, alpha=tuple(alpha_prime))
    pol1 = optimal_3pd_policy(spec1, x_grid_size, cfg)
    pol2 = optimal_3pd_policy(spec2, x_grid_size, cfg)
    diff_sq = (pol1.prices - pol2.prices) ** 2
    return float(math.sqrt(np.trapezoid(diff_sq, pol1.x_grid)))


@dataclass(frozen=True)
class LemmaC3Result:
    p_star: float
    interval: tuple[float, float]
    inside: bool


def lemma_c3_check(
    b: float, delta: float, cfg: QuadratureConfig = DEFAULT_QUAD
) -> LemmaC3Result:
    """Locate the optimal uniform price of the hat-perturbed marginal.

    A positive bump (b > 0) pulls the optimal price into
    (1/2 - delta, 1/2 - b*delta/8); a negative bump pushes it into
    (1/2 - b*delta/8, 1/2 + 2*delta); b = 0 leaves it exactly at 1/2,
    checked to search precision.
    """
    spec = PerturbedUniform(a=b, delta=delta)
    p_star, _ = optimal_uniform_price(spec, cfg)
    if b > 0.0:
        interval = (0.5 - delta, 0.5 - b * delta / 8.0)
        inside = interval[0] < p_star < interval[1]
    elif b < 0.0:
        interval = (0.5 - b * delta / 8.0, 0.5 + 2.0 * delta)
        inside = interval[0] < p_star < interval[1]
    else:
        # The revenue curve is exactly p(1-p) here; the search localizes
        # its flat maximum only to about sqrt(machine eps).
        interval = (0.5, 0.5)
        inside = abs(p_star - 0.5) <= 1e-6
    return LemmaC3Result(p_star=p_star, interval=interval, inside=bool(inside))


def concavity_margin(b: float, delta: float, grid_size: int = 10000) -> float:
    """Largest finite-difference second derivative of the revenue curve.

    Central second differences of R(y) = y*(1 - F_Y(y)) for the perturbed
    marginal on a uniform grid, skipping +-2 cells around the four density
    kinks where the difference quotient straddles a jump in R''.  Strong
    concavity means the returned value stays below -C*.
    """
    spec = PerturbedUniform(a=b, delta=delta)
    ys = np.linspace(0.0, 1.0, grid_size)
    h = ys[1] - ys[0]
    rev = ys * (1.0 - marginal_y_cdf(spec, ys))
    second = (rev[:-2] - 2.0 * rev[1:-1] + rev[2:]) / (h * h)
    centers = ys[1:-1]
    keep = np.ones_like(centers, dtype=bool)
    for kink in (0.5 - delta, 0.5, 0.5 + 2.0 * delta, 0.5 + 3.0 * delta):
        keep &= np.abs(centers - kink) > 2.0 * h
    return float(second[keep].max())
