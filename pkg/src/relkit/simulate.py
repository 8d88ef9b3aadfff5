"""Monte-Carlo operating characteristics.

A scenario fixes a sampling model, a loss specification, grids of true
effects and sample sizes, and a list of procedures; the sweep tabulates how
often each procedure returns each verdict. Datasets are drawn from PCG64
generators seeded per cell and replicate (scenario seed, the bit pattern of
the true effect, n, replicate index), so any single draw can be reproduced
in isolation and results do not depend on execution order or parallelism.

Two scenarios ship with the package: the coin-bias demo and a blood-thinner
style trial in which a tiny mean effect at a huge sample size is flagged by
the point-null test while every relevance-aware procedure settles on a0.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .comparators import (
    interval_bayes_factor,
    nhst_point_null,
    rope_decision,
    tost_equivalence,
)
from .decisions import (
    LossRatio,
    bayes_two_action_decision,
    expected_loss_decision,
)
from .errors import RelkitError, ValidationError
from .hypotheses import derive_hypotheses
from .inference import (
    BinomialModel,
    NormalKnownVarModel,
    posterior_update_binomial,
    posterior_update_normal,
)
from .loss import CurveKnots, LossSpec, ParameterSpace, coin_demo_loss
from .regions import RegionSet, partition, region_hull

PROCEDURE_NAMES = (
    "nhst",
    "tost",
    "rope",
    "hypothesis_ratio",
    "expected_loss",
    "bayes_factor",
)


@dataclass(frozen=True)
class ProcedureSpec:
    """One procedure to run per replicate, with its settings.

    Recognized settings per procedure:
      nhst: alpha
      tost: alpha, bounds ([lo, hi] or "partition_hull")
      rope: mass, rope ([lo, hi] or "partition_hull")
      hypothesis_ratio: loss_ratio (number or [lo, hi])
      expected_loss: (none)
      bayes_factor: threshold (evidence cutoff, default 3.0)
    """

    name: str
    settings: dict

    def __post_init__(self) -> None:
        if self.name not in PROCEDURE_NAMES:
            raise ValidationError(
                f"unknown procedure {self.name!r}; expected one of {PROCEDURE_NAMES}"
            )


@dataclass(frozen=True)
class Scenario:
    """Fully specified sweep over true effects and sample sizes.

    ``prior`` is (alpha, beta) for the binomial family and (mean, sd) for
    the normal family; ``sigma`` is the known sampling sd of the normal
    family and ignored otherwise.
    """

    name: str
    family: str
    space: ParameterSpace
    loss: LossSpec
    true_effects: tuple[float, ...]
    sample_sizes: tuple[int, ...]
    replicates: int
    seed: int
    procedures: tuple[ProcedureSpec, ...]
    prior: tuple[float, float] | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.family not in ("binomial", "normal"):
            raise ValidationError(f"unknown model family {self.family!r}")
        if self.family == "normal" and (self.sigma is None or not self.sigma > 0.0):
            raise ValidationError("the normal family needs a positive sigma")
        if self.replicates < 1:
            raise ValidationError(f"replicates must be >= 1, got {self.replicates}")
        if not self.true_effects:
            raise ValidationError("true_effects must be non-empty")
        if not self.sample_sizes or any(n < 1 for n in self.sample_sizes):
            raise ValidationError("sample_sizes must be positive")
        for effect in self.true_effects:
            if not self.space.contains(effect):
                raise ValidationError(
                    f"true effect {effect} outside the parameter space "
                    f"[{self.space.lo}, {self.space.hi}]"
                )
        if self.family == "binomial" and not (
            -0.5 <= self.space.lo and self.space.hi <= 0.5
        ):
            raise ValidationError(
                "binomial bias effects live in [-0.5, 0.5]; adjust the space"
            )


class BinomialDraw(NamedTuple):
    n: int
    k: int


class NormalDraw(NamedTuple):
    n: int
    ybar: float
    sigma: float


Dataset = BinomialDraw | NormalDraw


def _cell_rng(
    seed: int, true_effect: float, n: int, replicate_index: int
) -> np.random.Generator:
    effect_bits = int.from_bytes(struct.pack("<d", float(true_effect)), "little")
    ss = np.random.SeedSequence(
        [int(seed), effect_bits, int(n), int(replicate_index)]
    )
    return np.random.default_rng(ss)


def simulate_dataset(
    scenario: Scenario, true_effect: float, n: int, replicate_index: int
) -> Dataset:
    """Draw one dataset; fully determined by (seed, effect, n, replicate)."""
    rng = _cell_rng(scenario.seed, true_effect, n, replicate_index)
    if scenario.family == "binomial":
        pi = min(max(true_effect + 0.5, 0.0), 1.0)
        return BinomialDraw(n=n, k=int(rng.binomial(n, pi)))
    assert scenario.sigma is not None
    ybar = float(rng.normal(true_effect, scenario.sigma / math.sqrt(n)))
    return NormalDraw(n=n, ybar=ybar, sigma=scenario.sigma)


def _posterior(scenario: Scenario, data: Dataset):
    if scenario.prior is None:
        raise ValidationError(
            "this procedure needs a prior; set the scenario prior"
        )
    if scenario.family == "binomial":
        a, b = scenario.prior
        model = BinomialModel(n=data.n, k=data.k, prior_alpha=a, prior_beta=b)
        return posterior_update_binomial(model, scenario.space)
    m, s = scenario.prior
    model = NormalKnownVarModel(
        n=data.n, ybar=data.ybar, sigma=data.sigma, prior_mean=m, prior_sd=s
    )
    return posterior_update_normal(model, scenario.space)


def _resolve_bounds(setting, hull) -> tuple[float, float]:
    if setting == "partition_hull":
        return hull.lo, hull.hi
    lo, hi = setting
    return float(lo), float(hi)


def _compile_procedure(
    scenario: Scenario, proc: ProcedureSpec
) -> Callable[[Dataset], str]:
    """Bind a procedure's settings (and any partition-derived pieces) into a
    dataset -> verdict callable."""
    part = partition(scenario.loss)
    pair = derive_hypotheses(part)
    settings = dict(proc.settings)

    if proc.name == "nhst":
        alpha = float(settings.pop("alpha", 0.05))
        _reject_unknown(proc, settings)

        def run(data: Dataset) -> str:
            if scenario.family == "binomial":
                model = BinomialModel(n=data.n, k=data.k)
            else:
                model = NormalKnownVarModel(n=data.n, ybar=data.ybar, sigma=data.sigma)
            return nhst_point_null(model, alpha).verdict

        return run

    if proc.name == "tost":
        if scenario.family != "normal":
            raise ValidationError("tost supports the normal family only")
        alpha = float(settings.pop("alpha", 0.05))
        bounds = _resolve_bounds(
            settings.pop("bounds", "partition_hull"), region_hull(part.negligible)
        )
        _reject_unknown(proc, settings)

        def run(data: Dataset) -> str:
            model = NormalKnownVarModel(n=data.n, ybar=data.ybar, sigma=data.sigma)
            return tost_equivalence(model, bounds, alpha).verdict

        return run

    if proc.name == "rope":
        mass = float(settings.pop("mass", 0.95))
        lo, hi = _resolve_bounds(
            settings.pop("rope", "partition_hull"), region_hull(part.negligible)
        )
        rope = RegionSet.single(lo, hi)
        _reject_unknown(proc, settings)
        return lambda data: rope_decision(_posterior(scenario, data), rope, mass).verdict

    if proc.name == "hypothesis_ratio":
        raw = settings.pop("loss_ratio", 1.0)
        ratio = (
            LossRatio(float(raw[0]), float(raw[1]))
            if isinstance(raw, (tuple, list))
            else LossRatio.scalar(float(raw))
        )
        _reject_unknown(proc, settings)
        return lambda data: bayes_two_action_decision(
            _posterior(scenario, data), pair, ratio
        ).decision

    if proc.name == "expected_loss":
        _reject_unknown(proc, settings)
        return lambda data: expected_loss_decision(
            _posterior(scenario, data), scenario.loss
        ).decision

    # bayes_factor
    threshold = float(settings.pop("threshold", 3.0))
    _reject_unknown(proc, settings)

    def run_bf(data: Dataset) -> str:
        if scenario.family == "binomial":
            a, b = scenario.prior if scenario.prior is not None else (1.0, 1.0)
            model = BinomialModel(n=data.n, k=data.k, prior_alpha=a, prior_beta=b)
        else:
            m, s = scenario.prior if scenario.prior is not None else (0.0, 1.0)
            model = NormalKnownVarModel(
                n=data.n, ybar=data.ybar, sigma=data.sigma, prior_mean=m, prior_sd=s
            )
        bf = interval_bayes_factor(model, pair).bayes_factor
        if bf >= threshold:
            return "favors_h1"
        if bf <= 1.0 / threshold:
            return "favors_h0"
        return "inconclusive"

    return run_bf


def _reject_unknown(proc: ProcedureSpec, leftover: dict) -> None:
    if leftover:
        raise ValidationError(
            f"unknown setting(s) {sorted(leftover)} for procedure {proc.name!r}"
        )


@dataclass(frozen=True)
class RateCell:
    """Verdict frequencies for one (true effect, n, procedure) cell."""

    true_effect: float
    n: int
    procedure: str
    frequencies: dict[str, float]
    std_errors: dict[str, float]
    replicates: int


@dataclass(frozen=True)
class RateTable:
    scenario: str
    seed: int
    replicates: int
    cells: tuple[RateCell, ...]


def run_operating_characteristics(scenario: Scenario, threads: int = 1) -> RateTable:
    """Run every configured procedure on every replicate of every grid cell.

    Per-replicate procedure failures are tabulated under the verdict
    "error" and never abort the sweep. Identical scenarios (seed included)
    produce identical tables, independent of the thread count.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    procedures = [
        (proc.name, _compile_procedure(scenario, proc)) for proc in scenario.procedures
    ]
    grid = [(e, n) for e in scenario.true_effects for n in scenario.sample_sizes]

    def run_cell(cell: tuple[float, int]) -> list[RateCell]:
        effect, n = cell
        counts: dict[str, Counter] = {name: Counter() for name, _ in procedures}
        for r in range(scenario.replicates):
            data = simulate_dataset(scenario, effect, n, r)
            for name, fn in procedures:
                try:
                    verdict = fn(data)
                except RelkitError:
                    verdict = "error"
                counts[name][verdict] += 1
        out = []
        for name, _ in procedures:
            reps = scenario.replicates
            freqs = {v: counts[name][v] / reps for v in sorted(counts[name])}
            ses = {
                v: math.sqrt(f * (1.0 - f) / reps) for v, f in freqs.items()
            }
            out.append(
                RateCell(
                    true_effect=effect,
                    n=n,
                    procedure=name,
                    frequencies=freqs,
                    std_errors=ses,
                    replicates=reps,
                )
            )
        return out

    if threads == 1:
        per_cell = [run_cell(c) for c in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_cell = list(pool.map(run_cell, grid))
    cells = tuple(cell for group in per_cell for cell in group)
    return RateTable(
        scenario=scenario.name,
        seed=scenario.seed,
        replicates=scenario.replicates,
        cells=cells,
    )


def rate_table_csv(table: RateTable) -> str:
    """One row per cell and verdict: effect, n, procedure, verdict, rate, se."""
    lines = ["true_effect,n,procedure,verdict,frequency,std_error,replicates"]
    for cell in table.cells:
        for verdict, freq in cell.frequencies.items():
            lines.append(
                f"{cell.true_effect!r},{cell.n},{cell.procedure},{verdict},"
                f"{freq!r},{cell.std_errors[verdict]!r},{cell.replicates}"
            )
    return "\n".join(lines) + "\n"


def rate_table_doc(table: RateTable) -> dict:
    return {
        "scenario": table.scenario,
        "seed": table.seed,
        "rng": "pcg64",
        "replicates": table.replicates,
        "cells": [
            {
                "true_effect": cell.true_effect,
                "n": cell.n,
                "procedure": cell.procedure,
                "frequencies": cell.frequencies,
                "std_errors": cell.std_errors,
                "replicates": cell.replicates,
            }
            for cell in table.cells
        ],
    }


def rate_table_text(table: RateTable) -> str:
    """Fixed-width console rendering of the rate table."""
    header = (
        f"{'true_effect':>12} {'n':>8} {'procedure':>18} {'verdict':>16} "
        f"{'rate':>8} {'se':>8}"
    )
    lines = [f"scenario: {table.scenario} (seed {table.seed})", header]
    for cell in table.cells:
        for verdict, freq in cell.frequencies.items():
            lines.append(
                f"{cell.true_effect:>12.6g} {cell.n:>8} {cell.procedure:>18} "
                f"{verdict:>16} {freq:>8.4f} {cell.std_errors[verdict]:>8.4f}"
            )
    return "\n".join(lines) + "\n"


def coin_scenario(
    true_effects: tuple[float, ...] = (-0.3, 0.0, 0.3),
    sample_sizes: tuple[int, ...] = (100,),
    replicates: int = 500,
    seed: int = 20260108,
    procedures: tuple[ProcedureSpec, ...] | None = None,
) -> Scenario:
    """Coin-bias gamble: binomial flips against the built-in demo loss."""
    if procedures is None:
        procedures = (
            ProcedureSpec("nhst", {"alpha": 0.05}),
            ProcedureSpec("rope", {"mass": 0.95}),
            ProcedureSpec("hypothesis_ratio", {"loss_ratio": 1.0}),
        )
    return Scenario(
        name="coin_bias",
        family="binomial",
        space=ParameterSpace(-0.5, 0.5),
        loss=coin_demo_loss(),
        true_effects=true_effects,
        sample_sizes=sample_sizes,
        replicates=replicates,
        seed=seed,
        procedures=procedures,
        prior=(1.0, 1.0),
    )


def aspirin_paradox_loss() -> LossSpec:
    """Risk-difference loss with curves crossing at +/-0.02: acting carries
    a small fixed-shape cost, not acting a cost growing with the effect."""
    space = ParameterSpace(-0.1, 0.1)
    return LossSpec(
        space=space,
        kind="piecewise_linear",
        params_a0=CurveKnots(knots=(-0.1, 0.0, 0.1), values=(0.1, 0.0, 0.1)),
        params_a1=CurveKnots(knots=(-0.1, 0.0, 0.1), values=(0.0, 0.025, 0.0)),
    )


def aspirin_scenario(replicates: int = 500, seed: int = 19880128) -> Scenario:
    """Tiny-but-real mean effect at a huge sample size.

    The true risk difference 0.0077 sits well inside the negligible region
    [-0.02, 0.02], yet at n = 22000 the point-null test rejects almost
    surely. The relevance-aware procedures settle on a0.
    """
    return Scenario(
        name="aspirin_paradox",
        family="normal",
        space=ParameterSpace(-0.1, 0.1),
        loss=aspirin_paradox_loss(),
        true_effects=(0.0077,),
        sample_sizes=(22000,),
        replicates=replicates,
        seed=seed,
        procedures=(
            ProcedureSpec("nhst", {"alpha": 0.05}),
            ProcedureSpec("rope", {"mass": 0.95, "rope": "partition_hull"}),
            ProcedureSpec("hypothesis_ratio", {"loss_ratio": 1.0}),
            ProcedureSpec("tost", {"alpha": 0.05, "bounds": "partition_hull"}),
        ),
        prior=(0.0, 0.05),
        sigma=0.2,
    )
