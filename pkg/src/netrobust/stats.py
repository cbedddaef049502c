"""Error metrics, Mann-Whitney U testing, threshold sweeps, diff tables."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError

# Largest pooled sample size handled by exact enumeration in "auto" mode.
EXACT_ENUMERATION_LIMIT = 16

MIN_GROUP_SIZE = 3


def _as_values(curve) -> np.ndarray:
    values = getattr(curve, "values", curve)
    return np.asarray(values, dtype=np.float64)


def mae(a, b) -> float:
    """Mean absolute error between two equal-length curves."""
    x, y = _as_values(a), _as_values(b)
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ValidationError("empty curves")
    return float(np.mean(np.abs(x - y)))


def curve_loss(pred, truth, squared: bool = False) -> float:
    """Training-objective loss between predicted and true curves.

    The default form averages the per-step norms of the scalar residuals,
    which coincides with :func:`mae`; ``squared=True`` averages squared
    residuals instead.
    """
    x, y = _as_values(pred), _as_values(truth)
    if x.shape != y.shape:
        raise ValidationError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise ValidationError("empty curves")
    if squared:
        return float(np.mean((x - y) ** 2))
    return float(np.mean(np.abs(x - y)))


# -- Mann-Whitney U -----------------------------------------------------------


@dataclass(frozen=True)
class UTestResult:
    """U statistic of the first sample plus its p-value.

    Iterable as (statistic, pvalue). ``exact`` tells whether enumeration or
    the normal approximation produced the p-value; ``degenerate`` flags an
    all-tied pooled sample, which is reported as p = 1.
    """

    statistic: float
    pvalue: float
    exact: bool
    degenerate: bool = False

    def __iter__(self):
        return iter((self.statistic, self.pvalue))


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(len(pooled), dtype=np.float64)
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _u_statistic(rank_sum_x: float, n: int, m: int) -> float:
    # U_x counts pairs with x > y (ties count half)
    return rank_sum_x - n * (n + 1) / 2.0


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mann_whitney(
    x: Sequence[float],
    y: Sequence[float],
    alternative: str = "greater",
    method: str = "auto",
) -> UTestResult:
    """Rank-sum test of sample ``y`` against sample ``x``.

    ``alternative="greater"`` asks whether ``y`` is stochastically greater
    than ``x`` (small U of x supports it); ``"two-sided"`` tests for any
    shift. Ties receive midranks. Exact enumeration over all labelings is
    used when the pooled size is at most ``EXACT_ENUMERATION_LIMIT`` (or
    ``method="exact"``); otherwise a tie-corrected normal approximation
    with continuity correction.
    """
    if alternative not in ("greater", "two-sided"):
        raise ValidationError(f"unknown alternative {alternative!r}")
    if method not in ("auto", "exact", "approx"):
        raise ValidationError(f"unknown method {method!r}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, m = len(x), len(y)
    if n < MIN_GROUP_SIZE or m < MIN_GROUP_SIZE:
        raise ValidationError(f"need at least {MIN_GROUP_SIZE} values per sample, got {n} and {m}")
    pooled = np.concatenate([x, y])
    ranks = _midranks(pooled)
    u_obs = _u_statistic(float(ranks[:n].sum()), n, m)
    if np.all(pooled == pooled[0]):
        return UTestResult(statistic=u_obs, pvalue=1.0, exact=True, degenerate=True)
    use_exact = method == "exact" or (method == "auto" and n + m <= EXACT_ENUMERATION_LIMIT)
    if use_exact:
        pvalue = _exact_pvalue(ranks, n, m, u_obs, alternative)
    else:
        pvalue = _approx_pvalue(pooled, ranks, n, m, u_obs, alternative)
    return UTestResult(statistic=u_obs, pvalue=pvalue, exact=use_exact)


def _exact_pvalue(ranks: np.ndarray, n: int, m: int, u_obs: float, alternative: str) -> float:
    total = 0
    le = 0
    ge = 0
    eps = 1e-9
    for combo in itertools.combinations(range(n + m), n):
        u = _u_statistic(float(ranks[list(combo)].sum()), n, m)
        total += 1
        if u <= u_obs + eps:
            le += 1
        if u >= u_obs - eps:
            ge += 1
    if alternative == "greater":
        return le / total
    return min(1.0, 2.0 * min(le, ge) / total)


def _approx_pvalue(
    pooled: np.ndarray, ranks: np.ndarray, n: int, m: int, u_obs: float, alternative: str
) -> float:
    big_n = n + m
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts))
    variance = (n * m / 12.0) * (big_n + 1.0 - tie_term / (big_n * (big_n - 1.0)))
    if variance <= 0:
        return 1.0
    mean_u = n * m / 2.0
    sd = math.sqrt(variance)
    if alternative == "greater":
        z = (u_obs - mean_u + 0.5) / sd
        return _norm_cdf(z)
    z = (abs(u_obs - mean_u) - 0.5) / sd
    return min(1.0, 2.0 * (1.0 - _norm_cdf(max(z, 0.0))))


# -- threshold sweep ----------------------------------------------------------


@dataclass
class ThresholdReport:
    """Outcome of one significance sweep over increasing mask sizes.

    ``threshold`` is the smallest size whose one-sided p-value drops below
    alpha, or None when no size is significant.
    """

    threshold: int | None
    p_values: dict[int, float] = field(default_factory=dict)
    start: int | None = None
    step: int | None = None
    alpha: float = 0.05

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "p_values": {str(k): v for k, v in self.p_values.items()},
            "start": self.start,
            "step": self.step,
            "alpha": self.alpha,
        }


def threshold_sweep(
    errors_by_size: Mapping[int, Sequence[float]],
    baseline: Sequence[float],
    alpha: float = 0.05,
) -> ThresholdReport:
    """Find the smallest mask size whose errors significantly exceed baseline.

    Each size gets a one-sided test (masked errors greater than the
    unmasked baseline errors); all p-values are reported.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    if not errors_by_size:
        raise ValidationError("no mask-size groups given")
    if len(baseline) < MIN_GROUP_SIZE:
        raise ValidationError("baseline sample too small")
    sizes = sorted(int(s) for s in errors_by_size)
    if len(sizes) != len(set(sizes)):
        raise ValidationError("duplicate mask sizes")
    p_values: dict[int, float] = {}
    threshold = None
    for size in sizes:
        group = errors_by_size[size]
        if len(group) < MIN_GROUP_SIZE:
            raise ValidationError(f"group for size {size} too small")
        p = mann_whitney(baseline, group, alternative="greater").pvalue
        p_values[size] = p
        if threshold is None and p < alpha:
            threshold = size
    steps = {b - a for a, b in zip(sizes, sizes[1:])}
    step = steps.pop() if len(steps) == 1 else None
    return ThresholdReport(
        threshold=threshold, p_values=p_values, start=sizes[0], step=step, alpha=alpha
    )


# -- null-vs-confusion difference table ---------------------------------------


@dataclass
class DiffTable:
    """Per-configuration MAE differences: null-mask error minus confusion.

    A positive entry means the confusion mask gave the lower error.
    """

    diffs: dict
    n_positive: int
    n_negative: int
    positive_sum: float
    negative_sum: float

    def to_json(self) -> dict:
        return {
            "diffs": {str(k): v for k, v in self.diffs.items()},
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "positive_sum": self.positive_sum,
            "negative_sum": self.negative_sum,
        }


def diff_table(null_errors: Mapping, confusion_errors: Mapping) -> DiffTable:
    """Differences MAE_null - MAE_confusion over matching config keys."""
    if set(null_errors) != set(confusion_errors):
        missing = set(null_errors) ^ set(confusion_errors)
        raise ValidationError(f"config keys differ between tables: {sorted(map(str, missing))}")
    diffs = {}
    n_pos = n_neg = 0
    pos_sum = neg_sum = 0.0
    for key in null_errors:
        d = float(null_errors[key]) - float(confusion_errors[key])
        diffs[key] = d
        if d > 0:
            n_pos += 1
            pos_sum += d
        elif d < 0:
            n_neg += 1
            neg_sum += d
    return DiffTable(
        diffs=diffs,
        n_positive=n_pos,
        n_negative=n_neg,
        positive_sum=pos_sum,
        negative_sum=neg_sum,
    )
