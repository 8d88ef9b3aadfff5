"""Interval sets and the practical-relevance partition of a parameter space.

An effect value is practically relevant when acting on it (``a1``) carries
strictly smaller loss than acting as if it were absent (``a0``). Ties count
as negligible. :func:`partition` turns a loss specification into the
negligible/relevant split of the space, locating the loss-curve crossings by
sign-change bracketing and bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

from .errors import ValidationError
from .loss import (
    LossSpec,
    ParameterSpace,
    breakpoints,
    difference_fn,
    loss_difference,
    sample_grid,
    validate_loss_spec,
)


@dataclass(frozen=True)
class Interval:
    """One interval with explicit endpoint openness."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("interval endpoints must be finite")
        if lo > hi:
            raise ValidationError(f"interval needs lo <= hi, got [{lo}, {hi}]")
        if lo == hi and (self.lo_open or self.hi_open):
            raise ValidationError(f"degenerate open interval at {lo} is empty")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, theta: float) -> bool:
        if theta < self.lo or theta > self.hi:
            return False
        if theta == self.lo and self.lo_open:
            return False
        if theta == self.hi and self.hi_open:
            return False
        return True

    @property
    def length(self) -> float:
        return self.hi - self.lo


def _canonicalize(intervals: tuple[Interval, ...]) -> tuple[Interval, ...]:
    """Sort, reject overlaps, and merge intervals that share a compatible
    endpoint (one side closed), e.g. [a, b) + [b, c] -> [a, c]."""
    ordered = sorted(intervals, key=lambda i: (i.lo, i.hi))
    merged: list[Interval] = []
    for cur in ordered:
        if not merged:
            merged.append(cur)
            continue
        prev = merged[-1]
        if cur.lo < prev.hi:
            raise ValidationError(
                f"intervals overlap: [{prev.lo}, {prev.hi}] and [{cur.lo}, {cur.hi}]"
            )
        if cur.lo == prev.hi:
            if not prev.hi_open and not cur.lo_open:
                raise ValidationError(
                    f"intervals overlap at the shared endpoint {cur.lo}"
                )
            if prev.hi_open != cur.lo_open:
                merged[-1] = Interval(prev.lo, cur.hi, prev.lo_open, cur.hi_open)
                continue
            # both open: a pinhole gap at the shared endpoint, keep separate
        merged.append(cur)
    return tuple(merged)


@dataclass(frozen=True)
class RegionSet:
    """Finite union of disjoint intervals, kept in canonical (merged) form."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", _canonicalize(tuple(self.intervals)))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @classmethod
    def single(
        cls, lo: float, hi: float, lo_open: bool = False, hi_open: bool = False
    ) -> "RegionSet":
        return cls((Interval(lo, hi, lo_open, hi_open),))

    @classmethod
    def point(cls, value: float) -> "RegionSet":
        return cls((Interval(value, value),))


def region_contains(region: RegionSet, theta: float) -> bool:
    """Membership respecting open/closed endpoints."""
    return any(itv.contains(theta) for itv in region.intervals)


def region_measure(region: RegionSet) -> float:
    """Total length; endpoint openness is immaterial, points contribute 0."""
    return sum(itv.length for itv in region.intervals)


def region_hull(region: RegionSet) -> Interval:
    """Smallest single interval containing the set."""
    if region.is_empty:
        raise ValidationError("hull of an empty region set")
    first, last = region.intervals[0], region.intervals[-1]
    return Interval(first.lo, last.hi, first.lo_open, last.hi_open)


def region_union(a: RegionSet, b: RegionSet) -> RegionSet:
    """Union of two disjoint region sets (overlaps are rejected)."""
    return RegionSet(a.intervals + b.intervals)


def region_within(region: RegionSet, space: ParameterSpace) -> bool:
    return all(
        space.lo <= itv.lo and itv.hi <= space.hi for itv in region.intervals
    )


@dataclass(frozen=True)
class PartitionOptions:
    """Grid resolution and crossing tolerance for partition scans."""

    grid_size: int = 4096
    root_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.grid_size < 16:
            raise ValueError(f"grid_size must be >= 16, got {self.grid_size}")
        if not self.root_tol > 0.0:
            raise ValueError(f"root_tol must be positive, got {self.root_tol}")


DEFAULT_OPTIONS = PartitionOptions()


@dataclass(frozen=True)
class RelevancePartition:
    """Split of the parameter space into negligible and relevant regions.

    ``crossings`` are the refined loss-curve crossing points; each crossing
    itself belongs to the negligible set (ties are negligible).
    """

    negligible: RegionSet
    relevant: RegionSet
    crossings: tuple[float, ...]
    space: ParameterSpace


def is_practically_relevant(spec: LossSpec, theta: float) -> bool:
    """True iff a1 has strictly smaller loss than a0 at theta."""
    return loss_difference(spec, theta) < 0.0


def _refine_crossing(delta, x0: float, x1: float, left_relevant: bool, tol: float) -> float:
    """Bisect the relevance indicator on [x0, x1] down to a crossing point.

    Narrows until the bracket is well below tol and the loss difference at
    the midpoint is itself within tol, so the reported crossing is accurate
    in both coordinates.
    """
    for _ in range(200):
        mid = 0.5 * (x0 + x1)
        if not (x0 < mid < x1):
            break
        d = delta(mid)
        if (x1 - x0) <= 0.25 * tol and abs(d) <= tol:
            return mid
        if (d < 0.0) == left_relevant:
            x0 = mid
        else:
            x1 = mid
    return 0.5 * (x0 + x1)


def partition(
    spec: LossSpec, opts: PartitionOptions | None = None
) -> RelevancePartition:
    """Compute the negligible/relevant partition induced by a loss spec.

    The loss difference is scanned on a uniform grid (including both space
    endpoints and all loss breakpoints); every sign change of the relevance
    indicator is bracketed and refined by bisection. Sub-intervals between
    consecutive crossings are classified by the difference at their midpoint,
    and the crossing points themselves go to the negligible side, so relevant
    intervals are open at crossings and negligible ones closed.

    Features narrower than the grid spacing, including tangential touches of
    the two curves, are not resolved.
    """
    if opts is None:
        opts = DEFAULT_OPTIONS
    return _partition_cached(spec, opts)


@lru_cache(maxsize=128)
def _partition_cached(spec: LossSpec, opts: PartitionOptions) -> RelevancePartition:
    report = validate_loss_spec(spec, grid_size=opts.grid_size)
    if not report.ok:
        raise ValidationError(
            "invalid loss specification:\n" + "\n".join(report.issues)
        )
    delta = difference_fn(spec)
    space = spec.space
    grid = sample_grid(space, opts.grid_size, include=breakpoints(spec))
    flags = [delta(t) < 0.0 for t in grid]

    crossings: list[float] = []
    for i in range(len(grid) - 1):
        if flags[i] != flags[i + 1]:
            c = _refine_crossing(delta, grid[i], grid[i + 1], flags[i], opts.root_tol)
            if not crossings or c - crossings[-1] > opts.root_tol:
                crossings.append(c)

    bounds = [space.lo, *crossings, space.hi]
    segments: list[tuple[float, float, bool]] = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        relevant = delta(0.5 * (lo + hi)) < 0.0
        if segments and segments[-1][2] == relevant:
            segments[-1] = (segments[-1][0], hi, relevant)
        else:
            segments.append((lo, hi, relevant))

    negligible: list[Interval] = []
    relevant_out: list[Interval] = []
    for lo, hi, relevant in segments:
        if relevant:
            # crossings belong to the negligible side
            relevant_out.append(
                Interval(lo, hi, lo_open=lo != space.lo, hi_open=hi != space.hi)
            )
        else:
            negligible.append(Interval(lo, hi))
    return RelevancePartition(
        negligible=RegionSet(tuple(negligible)),
        relevant=RegionSet(tuple(relevant_out)),
        crossings=tuple(crossings),
        space=space,
    )
