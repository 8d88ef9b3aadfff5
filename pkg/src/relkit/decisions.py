"""Two-action decisions from a posterior.

Two rules are provided. The hypothesis-ratio rule compares the posterior
odds of H1 against H0 with a loss ratio weighing type-I consequences
(deciding a1 when H0 holds) against type-II consequences (deciding a0 when
H1 holds); an interval-valued ratio yields a three-way rule whose middle
outcome is "indeterminate". The expected-loss rule integrates the full loss
curves against the posterior and takes the argmin.

The hypothesis-ratio rule implicitly treats the loss as constant within each
hypothesis region; when it is not, use the expected-loss rule instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericalError, ValidationError
from .hypotheses import HypothesisPair
from .inference import (
    PosteriorModel,
    concentration_splits,
    integrate_piecewise,
    posterior_region_prob,
)
from .loss import LossSpec, breakpoints, _compile
from .regions import partition, region_measure

EXPECTED_LOSS_TIE_TOL = 1e-10
_COVERAGE_TOL = 1e-9


@dataclass(frozen=True)
class LossRatio:
    """Ratio of type-I to type-II loss; scalar when lo == hi, else an
    interval of plausible ratios."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("loss ratio must be finite")
        if not 0.0 < self.lo <= self.hi:
            raise ValidationError(
                f"loss ratio needs 0 < lo <= hi, got [{self.lo}, {self.hi}]"
            )

    @classmethod
    def scalar(cls, value: float) -> "LossRatio":
        return cls(value, value)

    @property
    def is_scalar(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class DecisionOutcome:
    """Decision plus the evidence that produced it.

    posterior_h0/posterior_h1 are the region probabilities renormalized to
    sum to one. For the hypothesis-ratio rule the threshold fields carry the
    ratio bounds; for the expected-loss rule they carry the two posterior
    expected losses (a0 in threshold_lo, a1 in threshold_hi).
    """

    decision: str
    posterior_h0: float
    posterior_h1: float
    posterior_odds: float
    threshold_lo: float
    threshold_hi: float
    warnings: tuple[str, ...] = ()


def decide_from_odds(odds: float, ratio: LossRatio) -> str:
    """Compare posterior odds of H1 to the loss ratio.

    Scalar ratio: a1 exactly when odds exceed it, ties go to a0. Interval
    ratio: a1 above the interval, a0 below it, indeterminate inside or on
    its boundary.
    """
    if ratio.is_scalar:
        return "a1" if odds > ratio.hi else "a0"
    if odds > ratio.hi:
        return "a1"
    if odds < ratio.lo:
        return "a0"
    return "indeterminate"


def _coverage_check(post: PosteriorModel, pair: HypothesisPair, allow: bool) -> None:
    covered = region_measure(pair.h0) + region_measure(pair.h1)
    span = post.space.span
    if span - covered > _COVERAGE_TOL * max(1.0, span) and not allow:
        raise ValidationError(
            "hypotheses do not jointly cover the parameter space; renormalizing "
            "over their union discards all other effect values, which is a "
            "strong claim. Pass allow_restricted_space=True to accept it."
        )


def bayes_two_action_decision(
    post: PosteriorModel,
    pair: HypothesisPair,
    ratio: LossRatio,
    allow_restricted_space: bool = False,
) -> DecisionOutcome:
    """Hypothesis-based decision from posterior region odds.

    a1 is optimal when its expected loss l_I * P(H0|y) drops below
    l_II * P(H1|y), i.e. when the posterior odds exceed l_I / l_II.
    """
    _coverage_check(post, pair, allow_restricted_space)
    p0 = posterior_region_prob(post, pair.h0)
    p1 = posterior_region_prob(post, pair.h1)
    total = p0 + p1
    if total <= 0.0:
        raise NumericalError(
            "degenerate evidence: both hypothesis regions have zero "
            "posterior probability"
        )
    odds = math.inf if p0 == 0.0 else p1 / p0
    return DecisionOutcome(
        decision=decide_from_odds(odds, ratio),
        posterior_h0=p0 / total,
        posterior_h1=p1 / total,
        posterior_odds=odds,
        threshold_lo=ratio.lo,
        threshold_hi=ratio.hi,
    )


def expected_loss_decision(post: PosteriorModel, spec: LossSpec) -> DecisionOutcome:
    """Full-loss decision: argmin of E[L(theta, a) | y], ties to a0.

    The posterior region probabilities reported alongside refer to the
    relevance partition the loss induces.
    """
    if abs(post.space.lo - spec.space.lo) > 1e-12 or abs(
        post.space.hi - spec.space.hi
    ) > 1e-12:
        raise ValidationError(
            "posterior and loss specification must share the effect space"
        )
    cuts = breakpoints(spec) + concentration_splits(post)
    warnings: list[str] = []
    expected = {}
    for action in ("a0", "a1"):
        fn = _compile(spec, action)
        result = integrate_piecewise(
            lambda t, fn=fn: fn(t) * post.pdf(t),
            spec.space.lo,
            spec.space.hi,
            cuts,
            tol=1e-8,
        )
        if not result.converged:
            warnings.append(
                f"expected loss for {action} reached quadrature depth limit "
                f"(error estimate {result.error:.3g})"
            )
        expected[action] = result.value
    if expected["a1"] < expected["a0"] - EXPECTED_LOSS_TIE_TOL:
        decision = "a1"
    else:
        decision = "a0"

    part = partition(spec)
    p0 = posterior_region_prob(post, part.negligible)
    p1 = posterior_region_prob(post, part.relevant)
    total = p0 + p1
    return DecisionOutcome(
        decision=decision,
        posterior_h0=p0 / total,
        posterior_h1=p1 / total,
        posterior_odds=math.inf if p0 == 0.0 else p1 / p0,
        threshold_lo=expected["a0"],
        threshold_hi=expected["a1"],
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class ThreeWayReport:
    """Diagnostic relating the interval rule to its scalar endpoints."""

    interval_outcome: DecisionOutcome
    outcome_at_lo: DecisionOutcome
    outcome_at_hi: DecisionOutcome
    consistent: bool


def three_way_consistency(
    post: PosteriorModel,
    pair: HypothesisPair,
    ratio: LossRatio,
    allow_restricted_space: bool = False,
) -> ThreeWayReport:
    """Run the decision at ratio.lo and ratio.hi as scalars and check that
    the interval rule agrees with them when they agree and is indeterminate
    exactly when they disagree."""
    interval = bayes_two_action_decision(post, pair, ratio, allow_restricted_space)
    at_lo = bayes_two_action_decision(
        post, pair, LossRatio.scalar(ratio.lo), allow_restricted_space
    )
    at_hi = bayes_two_action_decision(
        post, pair, LossRatio.scalar(ratio.hi), allow_restricted_space
    )
    if at_lo.decision == at_hi.decision:
        consistent = interval.decision == at_lo.decision
    else:
        consistent = interval.decision == "indeterminate"
    return ThreeWayReport(interval, at_lo, at_hi, consistent)
