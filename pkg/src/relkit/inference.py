"""Conjugate posteriors for the effect parameter, plus quadrature utilities.

Two sampling models are supported: a binomial count with a beta prior on the
success probability (effect scale: bias b = pi - 0.5) and a normal mean with
known sampling standard deviation and a normal prior. Posteriors are kept in
closed form and truncated to the declared effect space, so that probabilities
over the space always total one.

The special functions are implemented here rather than imported: the beta
CDF uses the continued-fraction form of the regularized incomplete beta
function, the normal CDF goes through erfc, and quantiles are found by
bisection on the CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

from .errors import DomainError, NumericalError, ValidationError
from .loss import ParameterSpace
from .regions import RegionSet

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

_CF_MAX_ITER = 600
_CF_EPS = 1e-15
_CF_TINY = 1e-300

QUANTILE_TOL = 1e-10


def log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function, by the modified
    Lentz method. Converges fast for x < (a + 1) / (a + b + 2)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + num / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            return h
    raise NumericalError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the CDF of a Beta(a, b) distribution at x."""
    if not (a > 0.0 and b > 0.0):
        raise ValidationError(f"beta shape parameters must be positive, got ({a}, {b})")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def beta_log_pdf(a: float, b: float, x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return -math.inf
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta(a, b)


def normal_cdf(x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    return 0.5 * math.erfc((mean - x) / (sd * _SQRT2))


def normal_log_pdf(x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    z = (x - mean) / sd
    return -0.5 * z * z - math.log(sd * _SQRT2PI)


@dataclass(frozen=True)
class BinomialModel:
    """n coin-style trials with k successes; Beta(prior_alpha, prior_beta)
    prior on the success probability. The effect is the bias b = pi - 0.5."""

    n: int
    k: int
    prior_alpha: float = 1.0
    prior_beta: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 0 or self.k < 0 or self.k > self.n:
            raise ValidationError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        for name in ("prior_alpha", "prior_beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class NormalKnownVarModel:
    """Sample mean ybar of n observations with known sampling sd sigma,
    normal prior on the mean."""

    n: int
    ybar: float
    sigma: float
    prior_mean: float = 0.0
    prior_sd: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"need n >= 1 observations, got n={self.n}")
        if not math.isfinite(self.ybar):
            raise ValidationError(f"ybar must be finite, got {self.ybar}")
        for name in ("sigma", "prior_sd"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be positive and finite, got {v}")
        if not math.isfinite(self.prior_mean):
            raise ValidationError(f"prior_mean must be finite, got {self.prior_mean}")


BIAS_SPACE = ParameterSpace(-0.5, 0.5)


@dataclass(frozen=True)
class PosteriorModel:
    """Closed-form posterior on the effect scale, truncated to its space.

    ``params`` are (alpha, beta) for the beta family and (mean, sd) for the
    normal family, both on the native parameter scale. The affine map
    effect = scale * native + shift converts to the effect scale (identity
    for normal, pi -> pi - 0.5 for binomial).
    """

    family: str
    params: tuple[float, float]
    space: ParameterSpace
    effect_scale: float = 1.0
    effect_shift: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in ("beta", "normal"):
            raise ValidationError(f"unknown posterior family {self.family!r}")
        p1, p2 = self.params
        if not (math.isfinite(p1) and math.isfinite(p2)):
            raise ValidationError("posterior parameters must be finite")
        if self.family == "beta" and not (p1 > 0.0 and p2 > 0.0):
            raise ValidationError("beta posterior needs positive shape parameters")
        if self.family == "normal" and not p2 > 0.0:
            raise ValidationError("normal posterior needs a positive sd")
        if not self.effect_scale > 0.0:
            raise ValidationError("effect_scale must be positive")
        if self.family == "beta":
            lo, hi = self._native(self.space.lo), self._native(self.space.hi)
            if lo < -1e-12 or hi > 1.0 + 1e-12:
                raise ValidationError(
                    "effect space maps outside the beta support [0, 1]"
                )

    def _native(self, effect: float) -> float:
        return (effect - self.effect_shift) / self.effect_scale

    def _cdf_native(self, t: float) -> float:
        a, b = self.params
        if self.family == "beta":
            return regularized_incomplete_beta(a, b, min(max(t, 0.0), 1.0))
        return normal_cdf(t, a, b)

    @cached_property
    def _trunc(self) -> tuple[float, float]:
        f_lo = self._cdf_native(self._native(self.space.lo))
        f_hi = self._cdf_native(self._native(self.space.hi))
        if not f_hi > f_lo:
            raise NumericalError(
                "posterior mass vanishes on the parameter space "
                f"[{self.space.lo}, {self.space.hi}]"
            )
        return f_lo, f_hi

    def cdf(self, effect: float) -> float:
        """CDF of the truncated posterior on the effect scale."""
        if effect <= self.space.lo:
            return 0.0
        if effect >= self.space.hi:
            return 1.0
        f_lo, f_hi = self._trunc
        raw = self._cdf_native(self._native(effect))
        return min(max((raw - f_lo) / (f_hi - f_lo), 0.0), 1.0)

    def log_pdf(self, effect: float) -> float:
        if not self.space.contains(effect):
            return -math.inf
        f_lo, f_hi = self._trunc
        t = self._native(effect)
        if self.family == "beta":
            base = beta_log_pdf(self.params[0], self.params[1], t)
        else:
            base = normal_log_pdf(t, self.params[0], self.params[1])
        return base - math.log(self.effect_scale) - math.log(f_hi - f_lo)

    def pdf(self, effect: float) -> float:
        return math.exp(self.log_pdf(effect))

    def quantile(self, p: float) -> float:
        """Inverse CDF by bisection on the effect scale."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {p}")
        lo, hi = self.space.lo, self.space.hi
        if p <= 0.0:
            return lo
        if p >= 1.0:
            return hi
        for _ in range(200):
            if hi - lo <= QUANTILE_TOL:
                break
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @property
    def native_location_scale(self) -> tuple[float, float]:
        """Mean and sd of the untruncated native distribution, mapped to the
        effect scale; used to anchor quadrature split points."""
        a, b = self.params
        if self.family == "beta":
            mean = a / (a + b)
            sd = math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
        else:
            mean, sd = a, b
        return (
            self.effect_scale * mean + self.effect_shift,
            self.effect_scale * sd,
        )


def concentration_splits(post: PosteriorModel) -> tuple[float, ...]:
    """Interior points bracketing the posterior's mass, so that adaptive
    quadrature cannot step over a sharply concentrated density."""
    loc, sd = post.native_location_scale
    pts = []
    for mult in (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
        for sign in (-1.0, 1.0):
            x = loc + sign * mult * sd
            if post.space.lo < x < post.space.hi:
                pts.append(x)
    return tuple(sorted(set(pts)))


def posterior_update_binomial(
    model: BinomialModel, space: ParameterSpace | None = None
) -> PosteriorModel:
    """Conjugate update: Beta(alpha + k, beta + n - k) on the success
    probability, expressed on the bias scale b = pi - 0.5."""
    space = space if space is not None else BIAS_SPACE
    return PosteriorModel(
        family="beta",
        params=(model.prior_alpha + model.k, model.prior_beta + model.n - model.k),
        space=space,
        effect_scale=1.0,
        effect_shift=-0.5,
    )


def posterior_update_normal(
    model: NormalKnownVarModel, space: ParameterSpace | None = None
) -> PosteriorModel:
    """Conjugate update with precision weighting of prior mean and ybar.

    Without an explicit space the posterior is supported on mean +/- 40 sd,
    which is indistinguishable from the untruncated distribution.
    """
    precision = 1.0 / model.prior_sd**2 + model.n / model.sigma**2
    mean = (
        model.prior_mean / model.prior_sd**2 + model.n * model.ybar / model.sigma**2
    ) / precision
    sd = precision**-0.5
    if space is None:
        space = ParameterSpace(mean - 40.0 * sd, mean + 40.0 * sd)
    return PosteriorModel(family="normal", params=(mean, sd), space=space)


def posterior_region_prob(post: PosteriorModel, region: RegionSet) -> float:
    """Posterior probability of a region set: sum of CDF differences.

    Endpoint openness is immaterial for these continuous posteriors.
    """
    span = max(1.0, post.space.span)
    total = 0.0
    for itv in region.intervals:
        if itv.lo < post.space.lo - 1e-9 * span or itv.hi > post.space.hi + 1e-9 * span:
            raise DomainError(
                f"region [{itv.lo}, {itv.hi}] outside the effect space "
                f"[{post.space.lo}, {post.space.hi}]"
            )
        total += post.cdf(itv.hi) - post.cdf(itv.lo)
    return min(max(total, 0.0), 1.0)


def credible_interval(post: PosteriorModel, mass: float) -> tuple[float, float]:
    """Central credible interval: quantiles at (1 - mass)/2 and 1 - (1 - mass)/2."""
    if not 0.0 < mass < 1.0:
        raise ValidationError(f"credible mass must be in (0, 1), got {mass}")
    tail = 0.5 * (1.0 - mass)
    return post.quantile(tail), post.quantile(1.0 - tail)


class QuadratureResult(NamedTuple):
    value: float
    error: float
    converged: bool


def quadrature(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_depth: int = 50,
    max_evals: int = 200_000,
) -> QuadratureResult:
    """Adaptive Simpson integration with an absolute error target.

    Subdivides until the Richardson error estimate of each panel is within
    its share of the tolerance. Panels that hit max_depth, and runs that
    exhaust the evaluation budget, are accepted as-is and flagged by
    converged=False.
    """
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if lo > hi:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    if lo == hi:
        return QuadratureResult(0.0, 0.0, True)

    evals = 0

    def sample(t: float) -> float:
        nonlocal evals
        evals += 1
        return f(t)

    def simpson(fa: float, fm: float, fb: float, width: float) -> float:
        return width / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = sample(lm), sample(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        err = (left + right - whole) / 15.0
        if abs(err) <= tol:
            return left + right + err, abs(err), True
        if depth >= max_depth or evals >= max_evals:
            return left + right + err, abs(err), False
        lv, le, lc = recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        rv, re, rc = recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        return lv + rv, le + re, lc and rc

    mid = 0.5 * (lo + hi)
    f_lo, f_mid, f_hi = sample(lo), sample(mid), sample(hi)
    whole = simpson(f_lo, f_mid, f_hi, hi - lo)
    value, error, converged = recurse(lo, hi, f_lo, f_mid, f_hi, whole, tol, 0)
    return QuadratureResult(value, error, converged)


def integrate_piecewise(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cuts: tuple[float, ...] = (),
    tol: float = 1e-10,
) -> QuadratureResult:
    """Quadrature over [lo, hi] split at the given interior points."""
    points = [lo, *sorted(c for c in set(cuts) if lo < c < hi), hi]
    share = tol / max(1, len(points) - 1)
    total, err, ok = 0.0, 0.0, True
    for a, b in zip(points[:-1], points[1:]):
        part = quadrature(f, a, b, tol=share)
        total += part.value
        err += part.error
        ok = ok and part.converged
    return QuadratureResult(total, err, ok)


def posterior_summary(post: PosteriorModel) -> dict:
    """Location summaries used in reports: mean and sd of the truncated
    posterior (by quadrature) plus the central 95% interval."""
    cuts = concentration_splits(post)
    mean = integrate_piecewise(
        lambda x: x * post.pdf(x), post.space.lo, post.space.hi, cuts, tol=1e-10
    ).value
    var = integrate_piecewise(
        lambda x: (x - mean) ** 2 * post.pdf(x),
        post.space.lo,
        post.space.hi,
        cuts,
        tol=1e-12,
    ).value
    ci = credible_interval(post, 0.95)
    return {
        "family": post.family,
        "params": list(post.params),
        "mean": mean,
        "sd": math.sqrt(max(var, 0.0)),
        "central_95": [ci[0], ci[1]],
    }
