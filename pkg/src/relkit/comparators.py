"""Baseline procedures run side by side with the decision engine.

These are the established answers to "is the effect there / does it
matter": an exact two-sided binomial test or z-test of the point null, the
two-one-sided-tests equivalence procedure, the ROPE credible-interval rule,
and a Bayes factor for interval hypotheses. None of them returns an optimal
action for a concrete decision problem; the point of carrying them along is
the comparison table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalError, ValidationError
from .hypotheses import HypothesisPair
from .inference import (
    BinomialModel,
    NormalKnownVarModel,
    PosteriorModel,
    credible_interval,
    integrate_piecewise,
    normal_cdf,
    posterior_region_prob,
    regularized_incomplete_beta,
)
from .regions import RegionSet

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ComparatorResult:
    procedure: str
    statistic: float
    verdict: str
    p_value: float | None = None
    bayes_factor: float | None = None
    alpha: float | None = None
    threshold: float | None = None
    detail: str = ""

    def __post_init__(self) -> None:
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValidationError(f"p-value out of [0, 1]: {self.p_value}")
        if self.bayes_factor is not None and not self.bayes_factor > 0.0:
            raise ValidationError(f"Bayes factor must be positive: {self.bayes_factor}")


def _binomial_tails(n: int, k: int) -> tuple[float, float]:
    """P(X <= k) and P(X >= k) under Binomial(n, 1/2), via the incomplete
    beta identities P(X >= k) = I_p(k, n - k + 1)."""
    lower = 1.0 if k == n else regularized_incomplete_beta(n - k, k + 1, 0.5)
    upper = 1.0 if k == 0 else regularized_incomplete_beta(k, n - k + 1, 0.5)
    return lower, upper


def nhst_point_null(
    model: BinomialModel | NormalKnownVarModel, alpha: float
) -> ComparatorResult:
    """Two-sided test of the single null value representing no effect.

    Binomial: exact test of pi = 1/2 with the doubled-smaller-tail p-value,
    clipped at 1. Normal: z-test of a zero mean.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    if isinstance(model, BinomialModel):
        lower, upper = _binomial_tails(model.n, model.k)
        p = min(1.0, 2.0 * min(lower, upper))
        statistic = float(model.k)
        detail = f"exact binomial test of pi=0.5 with k={model.k}, n={model.n}"
    elif isinstance(model, NormalKnownVarModel):
        z = model.ybar * math.sqrt(model.n) / model.sigma
        p = math.erfc(abs(z) / _SQRT2)
        statistic = z
        detail = f"z-test of a zero mean, z={z:.6g}"
    else:
        raise ValidationError(f"unsupported model type {type(model).__name__}")
    verdict = "reject" if p < alpha else "fail_to_reject"
    return ComparatorResult(
        procedure="nhst_point_null",
        statistic=statistic,
        verdict=verdict,
        p_value=p,
        alpha=alpha,
        detail=detail,
    )


def tost_equivalence(
    model: NormalKnownVarModel, bounds: tuple[float, float], alpha: float
) -> ComparatorResult:
    """Two one-sided z-tests against the given equivalence bounds.

    Concludes "equivalent" when both one-sided nulls (effect at or beyond a
    bound) are rejected at level alpha; the reported p is the larger one.
    Normal model only.
    """
    if not isinstance(model, NormalKnownVarModel):
        raise ValidationError("the equivalence test supports the normal model only")
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    lo, hi = bounds
    if not lo < hi:
        raise ValidationError(f"equivalence bounds need lo < hi, got ({lo}, {hi})")
    se = model.sigma / math.sqrt(model.n)
    z_lower = (model.ybar - lo) / se
    z_upper = (model.ybar - hi) / se
    p_lower = 1.0 - normal_cdf(z_lower)
    p_upper = normal_cdf(z_upper)
    if p_lower >= p_upper:
        p, statistic = p_lower, z_lower
    else:
        p, statistic = p_upper, z_upper
    verdict = "equivalent" if p < alpha else "not_equivalent"
    return ComparatorResult(
        procedure="tost_equivalence",
        statistic=statistic,
        verdict=verdict,
        p_value=p,
        alpha=alpha,
        detail=f"one-sided z-tests against bounds ({lo:.6g}, {hi:.6g})",
    )


def rope_decision(
    post: PosteriorModel, rope: RegionSet, mass: float = 0.95
) -> ComparatorResult:
    """Credible-interval versus region-of-practical-equivalence rule.

    Accepts a0 when the central credible interval lies entirely inside the
    rope, accepts a1 when it lies entirely outside, withholds otherwise.
    The rope must be a single interval around the null value.
    """
    if rope.is_empty:
        raise ValidationError("rope must be non-empty")
    if len(rope.intervals) > 1:
        raise ValidationError(
            "rope must be a single interval around the null value; got "
            f"{len(rope.intervals)} disjoint intervals"
        )
    if not 0.0 < mass < 1.0:
        raise ValidationError(f"credible mass must be in (0, 1), got {mass}")
    hull = rope.intervals[0]
    ci_lo, ci_hi = credible_interval(post, mass)
    if ci_lo >= hull.lo and ci_hi <= hull.hi:
        verdict = "accept_a0"
    elif ci_hi < hull.lo or ci_lo > hull.hi:
        verdict = "accept_a1"
    else:
        verdict = "withhold"
    return ComparatorResult(
        procedure="rope_decision",
        statistic=posterior_region_prob(post, rope),
        verdict=verdict,
        threshold=mass,
        detail=(
            f"central credible interval [{ci_lo:.6g}, {ci_hi:.6g}] at mass "
            f"{mass:g} vs rope [{hull.lo:.6g}, {hull.hi:.6g}]"
        ),
    )


def _binomial_log_lik(model: BinomialModel):
    const = (
        math.lgamma(model.n + 1)
        - math.lgamma(model.k + 1)
        - math.lgamma(model.n - model.k + 1)
    )
    k, nk = model.k, model.n - model.k

    def log_lik(pi: float) -> float:
        if pi <= 0.0:
            return const if k == 0 else -math.inf
        if pi >= 1.0:
            return const if nk == 0 else -math.inf
        return const + k * math.log(pi) + nk * math.log1p(-pi)

    return log_lik


def _normal_log_lik(model: NormalKnownVarModel):
    se = model.sigma / math.sqrt(model.n)
    const = -math.log(se * math.sqrt(2.0 * math.pi))

    def log_lik(theta: float) -> float:
        z = (model.ybar - theta) / se
        return const - 0.5 * z * z

    return log_lik


def interval_bayes_factor(
    model: BinomialModel | NormalKnownVarModel,
    pair: HypothesisPair,
    prior: tuple[float, float] | None = None,
) -> ComparatorResult:
    """BF_10 for H1 against H0 with the prior truncated to each region.

    Each marginal likelihood is the prior-weighted average of the likelihood
    over its region, computed by quadrature; the prior defaults to the
    model's own. ``prior`` is (alpha, beta) for the binomial model and
    (mean, sd) for the normal one.
    """
    if isinstance(model, BinomialModel):
        a, b = prior if prior is not None else (model.prior_alpha, model.prior_beta)
        if not (a > 0.0 and b > 0.0):
            raise ValidationError(f"beta prior needs positive shapes, got ({a}, {b})")
        to_native = lambda effect: min(max(effect + 0.5, 0.0), 1.0)
        prior_cdf = lambda t: regularized_incomplete_beta(a, b, t)
        log_prior = lambda t: (
            -math.inf
            if t <= 0.0 or t >= 1.0
            else (a - 1.0) * math.log(t)
            + (b - 1.0) * math.log1p(-t)
            - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
        )
        log_lik = _binomial_log_lik(model)
        lik_mode = to_native(0.0) if model.n == 0 else model.k / model.n
        lik_sd = 0.5 if model.n == 0 else max(
            math.sqrt(lik_mode * (1.0 - lik_mode) / model.n), 1.0 / model.n
        )
    elif isinstance(model, NormalKnownVarModel):
        m, s = prior if prior is not None else (model.prior_mean, model.prior_sd)
        if not s > 0.0:
            raise ValidationError(f"normal prior needs a positive sd, got {s}")
        to_native = lambda effect: effect
        prior_cdf = lambda t: normal_cdf(t, m, s)
        log_prior = lambda t: -0.5 * ((t - m) / s) ** 2 - math.log(
            s * math.sqrt(2.0 * math.pi)
        )
        log_lik = _normal_log_lik(model)
        lik_mode = model.ybar
        lik_sd = model.sigma / math.sqrt(model.n)
    else:
        raise ValidationError(f"unsupported model type {type(model).__name__}")

    regions = {"h0": pair.h0, "h1": pair.h1}
    native_intervals: dict[str, list[tuple[float, float]]] = {}
    prior_mass: dict[str, float] = {}
    for name, region in regions.items():
        if region.is_empty:
            raise ValidationError(f"{name} is empty; it has no prior mass")
        ivs = [(to_native(itv.lo), to_native(itv.hi)) for itv in region.intervals]
        mass = sum(prior_cdf(hi) - prior_cdf(lo) for lo, hi in ivs)
        if mass <= 0.0:
            raise ValidationError(f"{name} has zero prior mass under the given prior")
        native_intervals[name] = ivs
        prior_mass[name] = mass

    # One common log-scale shift keeps the integrands in range without
    # touching the ratio.
    probes: list[float] = [lik_mode]
    for ivs in native_intervals.values():
        for lo, hi in ivs:
            probes.extend((lo, hi, min(max(lik_mode, lo), hi)))
    shift = max(log_lik(t) for t in probes)
    if shift == -math.inf:
        shift = 0.0

    splits = tuple(
        lik_mode + j * lik_sd for j in (-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0)
    )
    marginal: dict[str, float] = {}
    for name, ivs in native_intervals.items():
        total = 0.0
        for lo, hi in ivs:
            part = integrate_piecewise(
                lambda t: math.exp(log_lik(t) - shift + log_prior(t))
                if log_prior(t) > -math.inf
                else 0.0,
                lo,
                hi,
                cuts=splits,
                tol=1e-10,
            )
            total += part.value
        marginal[name] = total / prior_mass[name]

    if marginal["h0"] <= 0.0 and marginal["h1"] <= 0.0:
        raise NumericalError("both marginal likelihoods vanished")
    bf = math.inf if marginal["h0"] <= 0.0 else marginal["h1"] / marginal["h0"]
    if bf > 1.0:
        verdict = "favors_h1"
    elif bf < 1.0:
        verdict = "favors_h0"
    else:
        verdict = "even"
    return ComparatorResult(
        procedure="interval_bayes_factor",
        statistic=bf,
        verdict=verdict,
        bayes_factor=bf,
        detail="prior truncated and renormalized to each hypothesis region",
    )
