"""Loss functions over a bounded one-dimensional effect parameter.

A loss specification assigns every effect value ``theta`` in a closed
interval a nonnegative badness for each of two actions: ``a0`` is the action
that is appropriate when the effect is absent, ``a1`` the one that is
appropriate when the effect matters. Everything downstream (region
partitioning, hypothesis checks, decisions) only ever consumes these curves
through :func:`evaluate_loss` and :func:`loss_difference`.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from .errors import DomainError, ValidationError

ACTIONS = ("a0", "a1")

LOSS_KINDS = ("piecewise_linear", "quadratic", "table", "builtin_coin_demo")

# Built-in coin-bias demo: L(b, a0) = |b| and L(b, a1) = k * (0.5 - |b|),
# with k chosen so that both curves cross exactly at b = -0.106 and b = 0.106.
COIN_SPACE = (-0.5, 0.5)
COIN_CROSSING = 0.106
COIN_A1_SLOPE = COIN_CROSSING / (0.5 - COIN_CROSSING)


@dataclass(frozen=True)
class ParameterSpace:
    """Closed, bounded interval of admissible effect values."""

    lo: float
    hi: float
    zero_in_space: bool | None = None

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("parameter space bounds must be finite")
        if not lo < hi:
            raise ValidationError(f"parameter space needs lo < hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        contains_zero = lo <= 0.0 <= hi
        if self.zero_in_space is None:
            object.__setattr__(self, "zero_in_space", contains_zero)
        elif self.zero_in_space and not contains_zero:
            raise ValidationError(
                f"zero_in_space declared but 0 is outside [{lo}, {hi}]"
            )

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def contains(self, theta: float) -> bool:
        return self.lo <= theta <= self.hi


@dataclass(frozen=True)
class ActionPair:
    """The two actions of the decision problem.

    By convention ``a0`` is the action that is appropriate if the effect is
    absent; descriptions are free text carried through to reports.
    """

    a0_label: str
    a1_label: str
    a0_description: str = ""
    a1_description: str = ""

    def __post_init__(self) -> None:
        if not self.a0_label or not self.a1_label:
            raise ValidationError("action labels must be non-empty")
        if self.a0_label == self.a1_label:
            raise ValidationError("action labels must be distinct")

    def label(self, action: str) -> str:
        return self.a0_label if action == "a0" else self.a1_label


@dataclass(frozen=True)
class QuadraticParams:
    """Loss curve c * (theta - center)**2 + offset."""

    c: float
    center: float = 0.0
    offset: float = 0.0


@dataclass(frozen=True)
class CurveKnots:
    """Piecewise-linear curve through the points (knots[i], values[i])."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "knots", tuple(float(x) for x in self.knots))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


LossParams = QuadraticParams | CurveKnots | None


@dataclass(frozen=True)
class LossSpec:
    """Declarative description of both loss curves over a parameter space.

    ``params_a0``/``params_a1`` are ``QuadraticParams`` for the quadratic
    kind, ``CurveKnots`` for the piecewise_linear and table kinds, and None
    for the built-in demo. Structural problems (unsorted grids, non-finite
    coefficients) are deliberately not rejected at construction so that
    :func:`validate_loss_spec` can report them.
    """

    space: ParameterSpace
    kind: str
    params_a0: LossParams = None
    params_a1: LossParams = None

    def __post_init__(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ValidationError(
                f"unknown loss kind {self.kind!r}; expected one of {LOSS_KINDS}"
            )


def coin_demo_loss() -> LossSpec:
    """The shipped coin-bias demo loss on the bias space [-0.5, 0.5]."""
    return LossSpec(space=ParameterSpace(*COIN_SPACE), kind="builtin_coin_demo")


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"non-finite coefficient {name}={value}")
    return value


@lru_cache(maxsize=512)
def _compile(spec: LossSpec, action: str) -> Callable[[float], float]:
    """Return a fast evaluator for one loss curve, validating its structure."""
    params = spec.params_a0 if action == "a0" else spec.params_a1

    if spec.kind == "builtin_coin_demo":
        if (spec.space.lo, spec.space.hi) != COIN_SPACE:
            raise ValidationError(
                "builtin_coin_demo requires the parameter space [-0.5, 0.5]"
            )
        if action == "a0":
            return abs
        k = COIN_A1_SLOPE
        return lambda t: k * (0.5 - abs(t))

    if spec.kind == "quadratic":
        if not isinstance(params, QuadraticParams):
            raise ValidationError(f"{action}: quadratic loss needs QuadraticParams")
        c = _check_finite(f"{action}.c", params.c)
        center = _check_finite(f"{action}.center", params.center)
        offset = _check_finite(f"{action}.offset", params.offset)
        return lambda t: c * (t - center) ** 2 + offset

    # piecewise_linear and table share the interpolation machinery
    if not isinstance(params, CurveKnots):
        raise ValidationError(f"{action}: {spec.kind} loss needs CurveKnots")
    knots, values = params.knots, params.values
    if len(knots) < 2:
        raise ValidationError(f"{action}: grid needs at least 2 points")
    if len(values) != len(knots):
        raise ValidationError(
            f"{action}: {len(knots)} grid points but {len(values)} values"
        )
    for x in knots:
        _check_finite(f"{action}.knot", x)
    for v in values:
        _check_finite(f"{action}.value", v)
    if any(knots[i] >= knots[i + 1] for i in range(len(knots) - 1)):
        raise ValidationError(f"{action}: grid not increasing")
    if knots[0] > spec.space.lo or knots[-1] < spec.space.hi:
        raise ValidationError(
            f"{action}: grid [{knots[0]}, {knots[-1]}] does not cover the "
            f"parameter space [{spec.space.lo}, {spec.space.hi}]"
        )

    def interpolate(t: float, knots=knots, values=values) -> float:
        i = bisect_left(knots, t)
        if i < len(knots) and knots[i] == t:
            return values[i]
        if i == 0:
            return values[0]
        x0, x1 = knots[i - 1], knots[i]
        w = (t - x0) / (x1 - x0)
        return values[i - 1] + w * (values[i] - values[i - 1])

    return interpolate


def evaluate_loss(spec: LossSpec, theta: float, action: str) -> float:
    """Evaluate L(theta, action).

    Raises DomainError if theta is outside the parameter space and
    ValidationError if the curve's structure or coefficients are unusable.
    """
    if action not in ACTIONS:
        raise ValueError(f"action must be one of {ACTIONS}, got {action!r}")
    t = float(theta)
    if not spec.space.contains(t):
        raise DomainError(
            f"theta={t} outside the parameter space [{spec.space.lo}, {spec.space.hi}]"
        )
    return _compile(spec, action)(t)


def loss_difference(spec: LossSpec, theta: float) -> float:
    """L(theta, a1) - L(theta, a0); negative means a1 is preferred."""
    t = float(theta)
    if not spec.space.contains(t):
        raise DomainError(
            f"theta={t} outside the parameter space [{spec.space.lo}, {spec.space.hi}]"
        )
    return _compile(spec, "a1")(t) - _compile(spec, "a0")(t)


def difference_fn(spec: LossSpec) -> Callable[[float], float]:
    """Compiled theta -> L(theta, a1) - L(theta, a0), for hot loops."""
    f0, f1 = _compile(spec, "a0"), _compile(spec, "a1")
    return lambda t: f1(t) - f0(t)


def breakpoints(spec: LossSpec) -> tuple[float, ...]:
    """Interior points where a loss curve may kink (knots, demo apex)."""
    if spec.kind == "builtin_coin_demo":
        return (0.0,)
    pts: set[float] = set()
    for params in (spec.params_a0, spec.params_a1):
        if isinstance(params, CurveKnots):
            pts.update(x for x in params.knots if spec.space.lo < x < spec.space.hi)
    return tuple(sorted(pts))


def sample_grid(
    space: ParameterSpace, n: int, include: Iterable[float] = ()
) -> list[float]:
    """Uniform grid of n points over the space, both endpoints included,
    merged with any extra points that fall strictly inside."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 points, got {n}")
    span = space.span
    pts = {space.lo + (i / (n - 1)) * span for i in range(1, n - 1)}
    pts.add(space.lo)
    pts.add(space.hi)
    for x in include:
        if space.lo <= x <= space.hi:
            pts.add(float(x))
    return sorted(pts)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_loss_spec; no issues means the loss is usable."""

    issues: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues


def validate_loss_spec(spec: LossSpec, grid_size: int = 4096) -> ValidationReport:
    """Check every LossSpec invariant, returning violations as report entries.

    Structural problems are reported per curve; if both curves are evaluable,
    nonnegativity and finiteness are checked on a dense grid plus all
    breakpoints. Never raises for an invalid spec.
    """
    issues: list[str] = []
    fns: dict[str, Callable[[float], float]] = {}
    for action in ACTIONS:
        try:
            fns[action] = _compile(spec, action)
        except ValidationError as exc:
            issues.append(str(exc))
    if len(fns) == len(ACTIONS):
        grid = sample_grid(spec.space, grid_size, include=breakpoints(spec))
        for action in ACTIONS:
            fn = fns[action]
            for t in grid:
                v = fn(t)
                if not math.isfinite(v):
                    issues.append(f"non-finite loss at theta={t} for {action}")
                elif v < 0.0:
                    issues.append(f"negative loss at theta={t} for {action}")
    return ValidationReport(tuple(issues))
