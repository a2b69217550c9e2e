"""Comparison machinery shared by every verification path.

Three comparison modes, each producing a :class:`ComparisonReport`:

* :func:`compare_exact` — entrywise equality of two exact-rational tables;
* :func:`compare_float` — entrywise tolerance comparison of float tables;
* :func:`statistical_match` — empirical counts against a target
  distribution, with a per-cell three-sigma normal-approximation criterion.

The per-cell criterion deliberately applies no multiple-comparison
correction; reports carry the number of failing cells so an isolated
borderline cell can be told apart from a systematic discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import DomainError, StructuralError
from .quantum import OutcomeDistribution, format_outcome

#: Default entrywise tolerance for float comparisons.
FLOAT_TOL = 1e-10
#: Width of the statistical acceptance band, in standard deviations.
SIGMA_FACTOR = 3.0
#: statistical_match refuses totals below this (normal approximation).
MIN_SAMPLES = 100


@dataclass(frozen=True)
class ComparisonReport:
    """Result of one comparison.

    ``worst_cell`` names the cell with the largest deviation (rendered as a
    string); ``tv_distance`` is the total-variation distance — for tables
    with several settings blocks, the worst block's distance.  ``passed``
    holds iff the mode's criterion (exact equality, tolerance, or the
    three-sigma band) holds in every cell; ``failing_cells`` counts the
    cells that broke it.  ``n_samples`` and ``sigma_bound`` are only set by
    the statistical mode.
    """

    mode: str
    passed: bool
    max_abs_error: float
    worst_cell: str
    tv_distance: float
    failing_cells: int
    n_samples: int | None = None
    sigma_bound: float | None = None

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "pass": self.passed,
            "max_abs_error": self.max_abs_error,
            "worst_cell": self.worst_cell,
            "tv_distance": self.tv_distance,
            "failing_cells": self.failing_cells,
        }
        if self.n_samples is not None:
            out["n_samples"] = self.n_samples
        if self.sigma_bound is not None:
            out["sigma_bound"] = self.sigma_bound
        return out


def _render_cell(key: Any) -> str:
    settings, outcomes = key
    return "settings=({}) outcomes=({})".format(
        ",".join(str(s) for s in settings),
        ",".join(format_outcome(o) for o in outcomes),
    )


def _matched_tables(a: OutcomeDistribution, b: OutcomeDistribution):
    if set(a.table) != set(b.table):
        only_a = len(set(a.table) - set(b.table))
        only_b = len(set(b.table) - set(a.table))
        raise StructuralError(
            f"distributions index different cells "
            f"({only_a} only in first, {only_b} only in second)"
        )
    if not a.table:
        raise StructuralError("cannot compare empty distributions")
    return a.table, b.table


def _blockwise_tv(a: OutcomeDistribution, b: OutcomeDistribution) -> float:
    worst = 0.0
    for settings in a.settings_choices():
        block_a, block_b = a.block(settings), b.block(settings)
        tv = 0.5 * sum(
            abs(float(block_a[o]) - float(block_b[o])) for o in block_a
        )
        worst = max(worst, tv)
    return worst


def compare_exact(
    a: OutcomeDistribution, b: OutcomeDistribution
) -> ComparisonReport:
    """Entrywise equality of two exact-rational distributions.

    Passes iff every cell holds the identical reduced rational in both
    tables.  Index-set mismatches raise :class:`StructuralError`.
    """
    for dist, name in ((a, "first"), (b, "second")):
        if dist.numeric_mode != "exact-rational":
            raise DomainError(f"{name} distribution is not in exact-rational mode")
    ta, tb = _matched_tables(a, b)
    worst_key, worst_err, failing = None, -1.0, 0
    exact_ok = True
    for key in ta:
        diff = ta[key] - tb[key]
        if diff != 0:
            exact_ok = False
            failing += 1
        err = abs(float(diff))
        if err > worst_err or worst_key is None:
            worst_key, worst_err = key, err
    return ComparisonReport(
        mode="exact",
        passed=exact_ok,
        max_abs_error=max(worst_err, 0.0),
        worst_cell=_render_cell(worst_key),
        tv_distance=_blockwise_tv(a, b),
        failing_cells=failing,
    )


def compare_float(
    a: OutcomeDistribution, b: OutcomeDistribution, tol: float = FLOAT_TOL
) -> ComparisonReport:
    """Entrywise |a - b| <= tol comparison (default tolerance 1e-10)."""
    ta, tb = _matched_tables(a, b)
    worst_key, worst_err, failing = None, -1.0, 0
    for key in ta:
        err = abs(float(ta[key]) - float(tb[key]))
        if err > tol:
            failing += 1
        if err > worst_err or worst_key is None:
            worst_key, worst_err = key, err
    return ComparisonReport(
        mode="float",
        passed=failing == 0,
        max_abs_error=worst_err,
        worst_cell=_render_cell(worst_key),
        tv_distance=_blockwise_tv(a, b),
        failing_cells=failing,
    )


def tv_distance(p: Mapping[Any, Any], q: Mapping[Any, Any]) -> float:
    """Total-variation distance between two probability mappings.

    Symmetric, in [0, 1], and zero iff the distributions agree on every
    cell of either support.
    """
    keys = set(p) | set(q)
    return 0.5 * sum(
        abs(float(p.get(k, 0.0)) - float(q.get(k, 0.0))) for k in keys
    )


def statistical_match(
    counts: Mapping[Any, int],
    target: Mapping[Any, Any],
    sigma_factor: float = SIGMA_FACTOR,
) -> ComparisonReport:
    """Check empirical counts against a target distribution, cell by cell.

    Each cell's empirical frequency must lie within ``sigma_factor`` normal
    standard deviations, sigma = sqrt(p(1-p)/n), of the target probability
    ``p``.  Cells are the union of both key sets (missing counts are zero).
    The total count must be at least 100 for the normal approximation.
    """
    total = sum(int(c) for c in counts.values())
    if any(int(c) < 0 for c in counts.values()):
        raise DomainError("negative count")
    if total == 0:
        raise DomainError("cannot match statistics with zero total count")
    if total < MIN_SAMPLES:
        raise DomainError(
            f"need at least {MIN_SAMPLES} samples for the normal "
            f"approximation, got {total}"
        )
    keys = set(counts) | set(target)
    freq = {k: counts.get(k, 0) / total for k in keys}
    probs = {k: float(target.get(k, 0.0)) for k in keys}
    worst_key, worst_err, failing = None, -1.0, 0
    for k in sorted(keys, key=str):
        p = probs[k]
        sigma = math.sqrt(max(p * (1.0 - p), 0.0) / total)
        err = abs(freq[k] - p)
        if err > sigma_factor * sigma:
            failing += 1
        if err > worst_err or worst_key is None:
            worst_key, worst_err = k, err
    worst = (
        _render_cell(worst_key)
        if isinstance(worst_key, tuple) and len(worst_key) == 2
        and isinstance(worst_key[0], tuple)
        else str(worst_key)
    )
    return ComparisonReport(
        mode="statistical",
        passed=failing == 0,
        max_abs_error=worst_err,
        worst_cell=worst,
        tv_distance=tv_distance(freq, probs),
        failing_cells=failing,
        n_samples=total,
        sigma_bound=sigma_factor,
    )
