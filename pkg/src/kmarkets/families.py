"""Joint valuation/covariate distributions on the unit square.

Every family has covariate X ~ U[0,1] and a conditional valuation density
f(y|x) on [0,1].  Besides the uniform and the power-law simulated family,
there are three perturbations of the uniform built from a hat-shaped bump
in y and a smooth two-lobed bump in x; these are the worst-case families
used by the lower-bound checks.  All perturbed densities share the form

    f(y|x) = 1 + c(x) * phi_y((y - 1/2) / s)

for a family-specific coefficient c(x) and scale s, which is what makes
CDFs, inverse CDFs and normalization checks exact (piecewise quadratic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

# Curvature floor of the perturbed revenue curves.  Perturbation amplitudes
# must stay inside (0, 4 - 2*C_STAR) for the revenue curve to remain strongly
# concave; with C_STAR = 1 that is (0, 2).
C_STAR = 1.0
_A_MAX = 4.0 - 2.0 * C_STAR


class ParameterDomainError(ValueError):
    """Raised when a family is constructed with out-of-domain parameters."""


class EmptyDataError(ValueError):
    """Raised when an operation receives an empty sample."""


def phi_y(t):
    """Hat-shaped perturbation in the valuation direction.

    Piecewise linear: t+1 on [-1,0], 1-t on [0,2], t-3 on [2,3], zero
    elsewhere.  Integrates to zero over its support and |phi_y| <= 1.
    """
    t = np.asarray(t, dtype=float)
    out = np.select(
        [t < -1.0, t <= 0.0, t <= 2.0, t <= 3.0],
        [0.0, t + 1.0, 1.0 - t, t - 3.0],
        default=0.0,
    )
    return out if out.ndim else float(out)


def _phi_y_int(t):
    # Antiderivative of phi_y from the left end of its support, piecewise
    # quadratic, and zero again for t >= 3 (the hat has zero total mass).
    t = np.asarray(t, dtype=float)
    out = np.select(
        [t < -1.0, t <= 0.0, t <= 2.0, t <= 3.0],
        [0.0, 0.5 * (t + 1.0) ** 2, 0.5 + t - 0.5 * t * t, 0.5 * (t - 3.0) ** 2],
        default=0.0,
    )
    return out if out.ndim else float(out)


def phi_x(t):
    """Smooth two-lobed perturbation in the covariate direction.

    A positive bump on (0, 1/2), its mirrored negative on (1/2, 1), zero
    elsewhere and at t in {0, 1/2, 1}.  phi_x(1/4) = 1, phi_x(3/4) = -1,
    and the two lobes cancel exactly in the integral.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    for lo, hi, sign in ((0.0, 0.5, 1.0), (0.5, 1.0, -1.0)):
        mask = (t > lo) & (t < hi)
        if np.any(mask):
            z = 4.0 * t[mask] - (4.0 * lo + 1.0)
            out[mask] = sign * np.exp(-z * z / (1.0 - z * z))
    return float(out[0]) if scalar else out


class UnitPoint(NamedTuple):
    y: float
    x: float


@dataclass(frozen=True)
class Dataset:
    """Ordered sample of (valuation, covariate) pairs on the unit square."""

    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if y.shape != x.shape or y.ndim != 1:
            raise ParameterDomainError("y and x must be 1-d arrays of equal length")
        if y.size == 0:
            raise EmptyDataError("dataset must contain at least one point")
        if y.min() < 0.0 or y.max() > 1.0 or x.min() < 0.0 or x.max() > 1.0:
            raise ParameterDomainError("valuations and covariates must lie in [0, 1]")
        y = y.copy()
        x = x.copy()
        y.flags.writeable = False
        x.flags.writeable = False
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_points(cls, points) -> "Dataset":
        pts = [UnitPoint(float(y), float(x)) for y, x in points]
        if not pts:
            raise EmptyDataError("dataset must contain at least one point")
        return cls(y=np.array([p.y for p in pts]), x=np.array([p.x for p in pts]))

    def points(self) -> list[UnitPoint]:
        return [UnitPoint(float(a), float(b)) for a, b in zip(self.y, self.x)]

    def __len__(self) -> int:
        return int(self.y.size)


# --- shared machinery for the hat-perturbed families ---------------------
#
# Breakpoints of 1 + c*phi_y((y - 1/2)/s) in y, clipped to [0, 1].  The
# upper clip only bites for the conditional family at large delta, where the
# hat is allowed to stick out past y = 1 (see PerturbedConditional).

_HAT_T_SLOPES = np.array([0.0, 1.0, -1.0, 1.0, 0.0])  # phi_y slope per segment


def _hat_edges(s: float) -> np.ndarray:
    return np.array(
        [0.0, 0.5 - s, 0.5, min(0.5 + 2.0 * s, 1.0), min(0.5 + 3.0 * s, 1.0), 1.0]
    )


def _hat_density(s, coef, y):
    return 1.0 + coef * phi_y((np.asarray(y, dtype=float) - 0.5) / s)


def _hat_cdf(s, coef, y):
    y = np.asarray(y, dtype=float)
    return y + coef * s * _phi_y_int((y - 0.5) / s)


def _hat_ppf(s, coef, u):
    """Invert the hat-family CDF; coef and u broadcast elementwise."""
    u = np.asarray(u, dtype=float)
    shape = u.shape
    u = np.atleast_1d(u).ravel()
    coef = np.broadcast_to(np.asarray(coef, dtype=float), shape).reshape(u.shape)
    edges = _hat_edges(s)
    # CDF at the segment edges, one column per point.
    f_edges = edges[:, None] + coef[None, :] * s * _phi_y_int((edges[:, None] - 0.5) / s)
    seg = np.clip((f_edges <= u[None, :]).sum(axis=0) - 1, 0, 4)
    left = edges[seg]
    a0 = 1.0 + coef * phi_y((left - 0.5) / s)  # density at the segment's left edge
    slope = coef * _HAT_T_SLOPES[seg] / s
    q = np.maximum(u - np.take_along_axis(f_edges, seg[None, :], axis=0)[0], 0.0)
    # Stable root of slope/2 * w^2 + a0 * w = q; reduces to q/a0 when flat.
    disc = np.sqrt(np.maximum(a0 * a0 + 2.0 * slope * q, 0.0))
    w = 2.0 * q / (a0 + disc)
    return np.clip(left + w, 0.0, 1.0).reshape(shape)


def _check_amplitude(a: float, signed: bool) -> None:
    if signed:
        if not abs(a) < _A_MAX:
            raise ParameterDomainError(f"perturbation amplitude must satisfy |a| < {_A_MAX}")
    elif not 0.0 < a < _A_MAX:
        raise ParameterDomainError(f"perturbation amplitude must lie in (0, {_A_MAX})")


def _check_delta(delta: float, full_support: bool) -> None:
    if not 0.0 < delta < 0.25:
        raise ParameterDomainError("delta must lie in (0, 1/4)")
    if full_support and 0.5 + 3.0 * delta > 1.0 + 1e-15:
        raise ParameterDomainError(
            "delta too large: perturbation support [1/2-delta, 1/2+3*delta] exits [0, 1]"
        )


@dataclass(frozen=True)
class UniformJoint:
    """Uniform valuations, uniform covariates, independent."""

    def conditional_density(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return np.ones_like(y)

    def conditional_cdf(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return y.copy() if y.ndim else float(y)

    def ppf(self, u, x):
        u, x = np.broadcast_arrays(np.asarray(u, float), np.asarray(x, float))
        return u.copy()


@dataclass(frozen=True)
class PowerSimulated:
    """Simulated benchmark family with F(y|x) = y^(x+1).

    Conditional valuations stochastically increase in the covariate, so
    segmentation has something to exploit.
    """

    def conditional_density(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return (x + 1.0) * y**x

    def conditional_cdf(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return y ** (x + 1.0)

    def ppf(self, u, x):
        u, x = np.broadcast_arrays(np.asarray(u, float), np.asarray(x, float))
        return u ** (1.0 / (x + 1.0))


@dataclass(frozen=True)
class PerturbedUniform:
    """Uniform with a hat bump of width ~delta added to the y-marginal.

    The density is 1 + a*delta*phi_y((y-1/2)/delta) independent of x.  The
    amplitude may be signed (both orientations of the bump are meaningful);
    |a| < 2 and delta <= 1/6 keep the density positive and normalized.
    """

    a: float
    delta: float

    def __post_init__(self):
        _check_amplitude(self.a, signed=True)
        _check_delta(self.delta, full_support=True)

    def _coef(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.a * self.delta)

    def conditional_density(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_density(self.delta, self.a * self.delta, y)

    def conditional_cdf(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_cdf(self.delta, self.a * self.delta, y)

    def ppf(self, u, x):
        u, x = np.broadcast_arrays(np.asarray(u, float), np.asarray(x, float))
        return _hat_ppf(self.delta, self._coef(x), u)


@dataclass(frozen=True)
class PerturbedConditional:
    """Uniform with a localized conditional perturbation.

    f(y|x) = 1 + a*delta*phi_y((y-1/2)/delta)*phi_x((x-x0)/delta + 1/4),
    so only covariates in the window (x0 - delta/4, x0 + 3*delta/4) see a
    perturbed valuation distribution.  The window must sit inside [0, 1].
    For delta > 1/6 the hat clips at y = 1: per-x slices then carry an
    O(delta^2) normalization defect while the joint still integrates to
    one (the two lobes of phi_x cancel).
    """

    a: float
    delta: float
    x0: float

    def __post_init__(self):
        _check_amplitude(self.a, signed=False)
        _check_delta(self.delta, full_support=False)
        if not 0.0 <= self.x0 - 0.25 * self.delta or not self.x0 + 0.75 * self.delta <= 1.0:
            raise ParameterDomainError(
                "covariate window (x0 - delta/4, x0 + 3*delta/4) exits [0, 1]"
            )

    def _coef(self, x):
        return self.a * self.delta * phi_x((np.asarray(x, float) - self.x0) / self.delta + 0.25)

    def conditional_density(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_density(self.delta, self._coef(x), y)

    def conditional_cdf(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_cdf(self.delta, self._coef(x), y)

    def ppf(self, u, x):
        u, x = np.broadcast_arrays(np.asarray(u, float), np.asarray(x, float))
        return _hat_ppf(self.delta, self._coef(x), u)


@dataclass(frozen=True)
class Packing:
    """m covariate bins, each independently perturbed or not per a bit vector.

    Bin j (1-based) of x is min(floor(m*x) + 1, m).  Within bin j,

        f(y|x) = 1 + (a/m) * alpha_j * phi_y(m*(y-1/2)) * phi_x(m*x - (j-1)),

    i.e. the hat scale is 1/m and the covariate bump is recentered in each
    bin.  With all bits zero this is exactly the uniform joint.
    """

    m: int
    a: float
    alpha: tuple[int, ...]

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 8:
            raise ParameterDomainError("m must be an integer >= 8")
        object.__setattr__(self, "m", int(self.m))
        _check_amplitude(self.a, signed=False)
        alpha = tuple(int(b) for b in self.alpha)
        if len(alpha) != self.m or any(b not in (0, 1) for b in alpha):
            raise ParameterDomainError("alpha must be a bit vector of length m")
        object.__setattr__(self, "alpha", alpha)

    def _coef(self, x):
        x = np.asarray(x, dtype=float)
        j0 = np.minimum(np.floor(self.m * x).astype(int), self.m - 1)
        bits = np.asarray(self.alpha, dtype=float)
        return (self.a / self.m) * bits[j0] * phi_x(self.m * x - j0)

    def conditional_density(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_density(1.0 / self.m, self._coef(x), y)

    def conditional_cdf(self, y, x):
        y, x = np.broadcast_arrays(np.asarray(y, float), np.asarray(x, float))
        return _hat_cdf(1.0 / self.m, self._coef(x), y)

    def ppf(self, u, x):
        u, x = np.broadcast_arrays(np.asarray(u, float), np.asarray(x, float))
        return _hat_ppf(1.0 / self.m, self._coef(x), u)


DistributionSpec = Union[UniformJoint, PowerSimulated, PerturbedUniform, PerturbedConditional, Packing]

_HAT_FAMILIES = (PerturbedUniform, PerturbedConditional, Packing)


def _hat_scale(spec) -> float:
    return 1.0 / spec.m if isinstance(spec, Packing) else spec.delta


def conditional_cdf(spec: DistributionSpec, y, x):
    """F(y|x) for the given family; broadcasts over array arguments."""
    return spec.conditional_cdf(y, x)


def conditional_density(spec: DistributionSpec, y, x):
    """f(y|x) for the given family; broadcasts over array arguments."""
    return spec.conditional_density(y, x)


def marginal_x_density(spec: DistributionSpec, x):
    """Covariate density, identically 1 on [0,1] for every family."""
    out = np.ones_like(np.asarray(x, dtype=float))
    return out if out.ndim else float(out)


def sample(spec: DistributionSpec, n: int, seed: int) -> Dataset:
    """Draw n i.i.d. (valuation, covariate) pairs by inverse-CDF sampling.

    The covariates are drawn first, then the conditional valuations, so a
    fixed seed pins the whole dataset bit for bit.
    """
    if n < 1:
        raise ParameterDomainError("sample size must be at least 1")
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    u = rng.random(n)
    return Dataset(y=spec.ppf(u, x), x=x)


@dataclass(frozen=True)
class DensityReport:
    max_norm_error: float
    min_density: float


def validate_density(spec: DistributionSpec, x_grid_size: int = 101) -> DensityReport:
    """Check that f(.|x) integrates to one across a covariate grid.

    Piecewise-linear families are integrated exactly segment by segment;
    the power family is integrated by Simpson under the substitution
    y = v^2, which tames the y^x endpoint.  Also reports the smallest
    density value seen on a y/x evaluation grid.
    """
    if x_grid_size < 2:
        raise ParameterDomainError("x_grid_size must be at least 2")
    xs = np.linspace(0.0, 1.0, x_grid_size)
    ys = np.linspace(0.0, 1.0, 2049)
    if isinstance(spec, _HAT_FAMILIES):
        s = _hat_scale(spec)
        edges = _hat_edges(s)
        coef = spec._coef(xs)
        f_edges = 1.0 + coef[None, :] * phi_y((edges[:, None] - 0.5) / s)
        widths = np.diff(edges)
        integrals = 0.5 * ((f_edges[:-1] + f_edges[1:]) * widths[:, None]).sum(axis=0)
        ys = np.union1d(ys, edges)
    elif isinstance(spec, PowerSimulated):
        vs = np.linspace(0.0, 1.0, 4097)
        w = _simpson_weights(4096)
        # int_0^1 (x+1) y^x dy with y = v^2
        vals = 2.0 * (xs[None, :] + 1.0) * vs[:, None] ** (2.0 * xs[None, :] + 1.0)
        integrals = w @ vals
    else:
        integrals = np.ones_like(xs)
    dens = spec.conditional_density(ys[:, None], xs[None, :])
    return DensityReport(
        max_norm_error=float(np.abs(integrals - 1.0).max()),
        min_density=float(dens.min()),
    )


def _simpson_weights(panels: int) -> np.ndarray:
    # Composite Simpson weights on [0, 1] with the given (even) panel count.
    if panels < 2 or panels % 2:
        raise ParameterDomainError("panel count must be even and >= 2")
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * panels)
