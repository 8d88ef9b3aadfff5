"""Hypothesis pairs and how well they incorporate practical relevance.

A pair of disjoint region sets plays the roles of H0 (negligible effects)
and H1 (relevant effects). Incorporation is *complete* when every negligible
effect is in H0 and every relevant effect is in H1, and *partial* when H0
holds only negligible and H1 only relevant effects. Complete implies partial;
the reverse fails, e.g. for a pair of singletons picked out of the space.

Both conditions quantify over a continuum, so they are checked on a dense
grid augmented with probes just inside and outside every region endpoint.
Grid points within the crossing tolerance of a loss-curve crossing are
skipped: membership there is decided by numerics, not by the hypotheses.
"""

from __future__ import annotations

from typing import NamedTuple

from dataclasses import dataclass

from .errors import ValidationError
from .loss import LossSpec, difference_fn, sample_grid
from .regions import (
    PartitionOptions,
    DEFAULT_OPTIONS,
    RegionSet,
    RelevancePartition,
    partition,
    region_contains,
    region_union,
    region_within,
)


@dataclass(frozen=True)
class HypothesisPair:
    """Two disjoint region sets hypothesizing H0 and H1."""

    h0: RegionSet
    h1: RegionSet

    def __post_init__(self) -> None:
        try:
            region_union(self.h0, self.h1)
        except ValidationError as exc:
            raise ValidationError(f"hypothesis regions overlap: {exc}") from exc


class CheckResult(NamedTuple):
    ok: bool
    witness: float | None


def derive_hypotheses(part: RelevancePartition) -> HypothesisPair:
    """The canonical pair H0 = negligible, H1 = relevant. Always complete."""
    return HypothesisPair(h0=part.negligible, h1=part.relevant)


def _check_points(
    pair: HypothesisPair, spec: LossSpec, opts: PartitionOptions
) -> tuple[list[float], tuple[float, ...]]:
    if not (region_within(pair.h0, spec.space) and region_within(pair.h1, spec.space)):
        raise ValidationError("hypothesis regions must lie within the parameter space")
    part = partition(spec, opts)
    probes: list[float] = []
    for region in (pair.h0, pair.h1):
        for itv in region.intervals:
            for e in (itv.lo, itv.hi):
                probes.extend((e, e - opts.root_tol, e + opts.root_tol))
    grid = sample_grid(spec.space, opts.grid_size, include=probes)
    return grid, part.crossings


def _near_crossing(theta: float, crossings: tuple[float, ...], tol: float) -> bool:
    return any(abs(theta - c) < tol for c in crossings)


def check_complete(
    pair: HypothesisPair,
    spec: LossSpec,
    opts: PartitionOptions | None = None,
    subspace: RegionSet | None = None,
) -> CheckResult:
    """Does H0 contain all negligible and H1 all relevant effects?

    With ``subspace`` given, quantification is restricted to effect values
    inside it (the restricted-parameter-space reading for pairs that only
    partially incorporate relevance).

    Returns (ok, witness); the witness is a grid point violating the
    condition when ok is False.
    """
    opts = opts or DEFAULT_OPTIONS
    grid, crossings = _check_points(pair, spec, opts)
    delta = difference_fn(spec)
    for t in grid:
        if subspace is not None and not region_contains(subspace, t):
            continue
        if _near_crossing(t, crossings, opts.root_tol):
            continue
        if delta(t) < 0.0:
            if not region_contains(pair.h1, t):
                return CheckResult(False, t)
        elif not region_contains(pair.h0, t):
            return CheckResult(False, t)
    return CheckResult(True, None)


def check_partial(
    pair: HypothesisPair,
    spec: LossSpec,
    opts: PartitionOptions | None = None,
) -> CheckResult:
    """Does H0 contain only negligible and H1 only relevant effects?"""
    opts = opts or DEFAULT_OPTIONS
    grid, crossings = _check_points(pair, spec, opts)
    delta = difference_fn(spec)
    for t in grid:
        if _near_crossing(t, crossings, opts.root_tol):
            continue
        relevant = delta(t) < 0.0
        if relevant and region_contains(pair.h0, t):
            return CheckResult(False, t)
        if not relevant and region_contains(pair.h1, t):
            return CheckResult(False, t)
    return CheckResult(True, None)


def restricted_space(pair: HypothesisPair) -> RegionSet:
    """The union of both hypotheses: the parameter space they act on."""
    return region_union(pair.h0, pair.h1)
