"""Convergence-rate extraction and long-run limit verification.

Rates are always reported in gain-scaled time ``tau = gamma t``; each
report carries the gain so model-time rates are recoverable by
multiplication.  This also makes runs with different gains comparable,
which the variant ranking below relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .models import GKind, ModelSpec, PhiKind
from .simulate import SumBoundsReport, Trajectory, check_sum_bounds

__all__ = [
    "ComponentRate",
    "ConvergenceReport",
    "DecayFit",
    "FitError",
    "RankEntry",
    "RateReport",
    "SeriesRate",
    "VariantRanking",
    "VerificationStatus",
    "ZERO_THRESHOLD_FACTOR",
    "compare_variants",
    "default_fit_window",
    "fit_decay_rate",
    "rate_report",
    "verify_convergence",
]

# A component counts as converged to zero below this fraction of the
# natural scale beta d_1 / alpha.
ZERO_THRESHOLD_FACTOR = 1e-4

MIN_FIT_SAMPLES = 10


class FitError(RuntimeError):
    """Not enough usable samples for a log-linear fit."""


class VerificationStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DecayFit:
    """Log-linear fit of ``|x(t) - limit|`` against t."""

    rate: float
    limit: float
    r_squared: float
    n_samples: int
    window: tuple[float, float]


def fit_decay_rate(
    times,
    values,
    window: Optional[tuple[float, float]] = None,
    limit: Optional[float] = 0.0,
    min_samples: int = MIN_FIT_SAMPLES,
) -> DecayFit:
    """Fit an exponential decay rate by least squares in the log domain.

    Parameters
    ----------
    times, values : array_like
        Sample grid; ``times`` in whatever scale the caller fits in.
    window : (float, float), optional
        Inclusive time window; defaults to all samples.
    limit : float or None
        Center of the residual.  0 for quantities decaying to zero
        (default).  ``None`` estimates the center as the mean over the
        last 10% of the windowed samples, the convention for components
        that approach a nonzero limit.

    Raises
    ------
    FitError
        If fewer than ``min_samples`` usable samples remain.  Samples at
        or past a zero residual (for example an integrator that stepped
        an already-converged component below zero) truncate the window.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be 1-D arrays of equal length")
    if window is None:
        mask = np.ones(times.size, dtype=bool)
    else:
        lo, hi = window
        if not lo < hi:
            raise ValueError(f"window must satisfy lo < hi, got {window!r}")
        mask = (times >= lo) & (times <= hi)
    t = times[mask]
    v = values[mask]
    if t.size == 0:
        raise FitError(f"no samples in window {window!r}")
    if limit is None:
        # the tail defines the limit, so its residuals are estimation bias,
        # not decay; fit the rate on the remaining samples only
        tail = max(1, int(math.ceil(0.1 * t.size)))
        limit = float(np.mean(v[-tail:]))
        t = t[:-tail]
        v = v[:-tail]
        if t.size == 0:
            raise FitError("no samples left of the tail used for the limit estimate")
    residual = v - limit
    if limit == 0.0:
        bad = v <= 0.0
    else:
        bad = residual == 0.0
    if np.any(bad):
        t = t[: int(np.argmax(bad))]
        residual = residual[: int(np.argmax(bad))]
    if t.size < min_samples:
        raise FitError(
            f"only {t.size} usable samples after truncation, need at least {min_samples}"
        )
    log_residual = np.log(np.abs(residual))
    slope, intercept = np.polyfit(t, log_residual, 1)
    predicted = slope * t + intercept
    ss_res = float(np.sum((log_residual - predicted) ** 2))
    ss_tot = float(np.sum((log_residual - np.mean(log_residual)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        rate=float(-slope),
        limit=float(limit),
        r_squared=r_squared,
        n_samples=int(t.size),
        window=(float(t[0]), float(t[-1])),
    )


@dataclass(frozen=True)
class ComponentRate:
    """Per-component rate entry; times and rates are gain-scaled."""

    index: int
    d_value: float
    tied: bool
    fitted_rate: float
    theoretical_rate: float
    fitted_limit: float
    theoretical_limit: float
    relative_rate_error: Optional[float]
    r_squared: float
    n_samples: int


@dataclass(frozen=True)
class SeriesRate:
    """Rate entry for a derived series (tied-set sum, state sum)."""

    label: str
    fitted_rate: float
    theoretical_rate: Optional[float]
    fitted_limit: float
    theoretical_limit: float
    relative_rate_error: Optional[float]
    r_squared: float


@dataclass(frozen=True, eq=False)
class RateReport:
    """Rates of every component plus the tied-set and total sums."""

    components: tuple[ComponentRate, ...]
    tied_sum: Optional[SeriesRate]
    total_sum: Optional[SeriesRate]
    gamma: float
    window: tuple[float, float]


def default_fit_window(scaled_times: np.ndarray) -> tuple[float, float]:
    """Last half of the horizon, excluding the final 2%."""
    end = float(scaled_times[-1])
    return (0.5 * end, 0.98 * end)


def _tail_mean(times: np.ndarray, values: np.ndarray, window: tuple[float, float]) -> float:
    mask = (times >= window[0]) & (times <= window[1])
    v = values[mask]
    if v.size == 0:
        raise FitError(f"no samples in window {window!r}")
    tail = max(1, int(math.ceil(0.1 * v.size)))
    return float(np.mean(v[-tail:]))


def rate_report(
    model: ModelSpec, traj: Trajectory, window: Optional[tuple[float, float]] = None
) -> RateReport:
    """Fit decay rates on a trajectory and compare with theory.

    Component i with weight below d_1 decays to zero at the gain-scaled
    rate ``alpha (1 - d_i / d_1)``; tied-leading components approach
    ``x_i(0) / (alpha sigma_1)`` and their theoretical rate is recorded
    as zero with no relative error.  The residual of the state sum from
    ``beta d_1 / alpha`` decays at ``alpha (1 - d'_2 / d_1)``, fitted
    here as the ``total-sum`` series (and the tied-set sum as
    ``tied-sum``).  Fits that run out of usable samples, for instance on
    a chattering signum run, are reported with NaN rates rather than
    aborting the report.
    """
    paths = model.paths
    scaled = model.gamma * traj.times
    if window is None:
        window = default_fit_window(scaled)
    scale = model.beta * paths.d[0] / model.alpha
    tied = set(paths.groups[0])
    x0 = traj.states[0]
    sigma1 = float(np.sum(x0[list(tied)])) / (model.beta * paths.d_distinct[0])

    components = []
    for i in range(model.n):
        is_tied = i in tied
        theoretical_rate = 0.0 if is_tied else model.alpha * (1.0 - paths.d[i] / paths.d[0])
        theoretical_limit = x0[i] / (model.alpha * sigma1) if is_tied else 0.0
        try:
            fit = fit_decay_rate(
                scaled, traj.states[:, i], window=window, limit=None if is_tied else 0.0
            )
            fitted_rate, fitted_limit = fit.rate, fit.limit
            r_squared, n_samples = fit.r_squared, fit.n_samples
        except FitError:
            # no measurable decay; a tied component still has a limit to report
            fitted_rate = fitted_limit = r_squared = float("nan")
            n_samples = 0
            if is_tied:
                try:
                    fitted_limit = _tail_mean(scaled, traj.states[:, i], window)
                except FitError:
                    pass
        rel = None
        if not is_tied and np.isfinite(fitted_rate):
            rel = abs(fitted_rate - theoretical_rate) / theoretical_rate
        components.append(
            ComponentRate(
                index=i,
                d_value=float(paths.d[i]),
                tied=is_tied,
                fitted_rate=fitted_rate,
                theoretical_rate=theoretical_rate,
                fitted_limit=fitted_limit,
                theoretical_limit=float(theoretical_limit),
                relative_rate_error=rel,
                r_squared=r_squared,
                n_samples=n_samples,
            )
        )

    sum_rate_theory = None
    if paths.d_distinct.size > 1:
        sum_rate_theory = model.alpha * (1.0 - paths.d_distinct[1] / paths.d_distinct[0])

    def _series(label: str, series: np.ndarray) -> Optional[SeriesRate]:
        try:
            fitted_limit = _tail_mean(scaled, series, window)
            if sum_rate_theory is None:
                return SeriesRate(
                    label=label,
                    fitted_rate=float("nan"),
                    theoretical_rate=None,
                    fitted_limit=fitted_limit,
                    theoretical_limit=scale,
                    relative_rate_error=None,
                    r_squared=float("nan"),
                )
            # Residual centered on the theoretical limit: the decay-rate
            # statement is about the distance from the true limit.
            fit = fit_decay_rate(scaled, series, window=window, limit=scale)
            rel = abs(fit.rate - sum_rate_theory) / sum_rate_theory
            return SeriesRate(
                label=label,
                fitted_rate=fit.rate,
                theoretical_rate=sum_rate_theory,
                fitted_limit=fitted_limit,
                theoretical_limit=scale,
                relative_rate_error=rel,
                r_squared=fit.r_squared,
            )
        except FitError:
            return None

    tied_series = traj.states[:, sorted(tied)].sum(axis=1)
    return RateReport(
        components=tuple(components),
        tied_sum=_series("tied-sum", tied_series),
        total_sum=_series("total-sum", traj.sums),
        gamma=model.gamma,
        window=(float(window[0]), float(window[1])),
    )


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Outcome of the long-run limit verification on one trajectory."""

    status: VerificationStatus
    settled: bool
    settle_change: float
    zero_ok: bool
    max_other: float
    zero_threshold: float
    sum_ok: bool
    tied_sum_final: float
    expected_sum: float
    sum_tolerance: float
    tied_indices: tuple[int, ...]
    envelope_ok: Optional[bool]
    envelope: Optional[SumBoundsReport]


def verify_convergence(
    traj: Trajectory,
    model: ModelSpec,
    sum_tolerance: Optional[float] = None,
    zero_threshold_factor: float = ZERO_THRESHOLD_FACTOR,
    settle_rtol: float = 1e-3,
) -> ConvergenceReport:
    """Check the long-run limit statement on a finished run.

    Three checks: every component off the tied-leading set is below
    ``zero_threshold_factor * beta d_1 / alpha`` at the final time; the
    tied-set sum is within ``sum_tolerance`` (default 1% of scale) of
    ``beta d_1 / alpha``; and, for the identity-sum model, the state sum
    stayed inside its envelope.  If the sum is still moving over the last
    10% of the horizon the verdict is inconclusive rather than a verdict
    on an unfinished transient.
    """
    scale = model.beta * model.paths.d[0] / model.alpha
    if sum_tolerance is None:
        sum_tolerance = 1e-2 * scale
    tail = max(2, int(math.ceil(0.1 * traj.sums.size)))
    window = traj.sums[-tail:]
    settle_change = float((np.max(window) - np.min(window)) / abs(traj.sums[-1]))
    settled = settle_change < settle_rtol

    tied = list(model.paths.groups[0])
    others = [i for i in range(model.n) if i not in tied]
    final = traj.final_state
    zero_threshold = zero_threshold_factor * scale
    max_other = float(np.max(final[others])) if others else 0.0
    zero_ok = max_other < zero_threshold

    tied_sum_final = float(np.sum(final[tied]))
    sum_ok = abs(tied_sum_final - scale) <= sum_tolerance

    envelope = None
    envelope_ok: Optional[bool] = None
    if model.phi_kind is PhiKind.SUM and model.g_kind is GKind.IDENTITY:
        envelope = check_sum_bounds(traj, model)
        envelope_ok = envelope.within

    if not settled:
        status = VerificationStatus.INCONCLUSIVE
    elif zero_ok and sum_ok and envelope_ok is not False:
        status = VerificationStatus.PASS
    else:
        status = VerificationStatus.FAIL
    return ConvergenceReport(
        status=status,
        settled=settled,
        settle_change=settle_change,
        zero_ok=zero_ok,
        max_other=max_other,
        zero_threshold=float(zero_threshold),
        sum_ok=sum_ok,
        tied_sum_final=tied_sum_final,
        expected_sum=float(scale),
        sum_tolerance=float(sum_tolerance),
        tied_indices=tuple(tied),
        envelope_ok=envelope_ok,
        envelope=envelope,
    )


@dataclass(frozen=True)
class RankEntry:
    """Time to threshold for one run, in both time scales."""

    label: str
    rank: int
    tau_scaled: float
    tau_time: float
    limit: float
    reached: bool


@dataclass(frozen=True, eq=False)
class VariantRanking:
    """Runs ordered by gain-scaled time to threshold."""

    entries: tuple[RankEntry, ...]
    threshold: float


def compare_variants(
    runs: Sequence[tuple[str, ModelSpec, Trajectory]], threshold: float = 0.05
) -> VariantRanking:
    """Rank runs by how fast the leading component reaches its limit.

    For each run the limit is the equilibrium value ``beta d_1 / alpha``
    of its model, and the crossing time is the first sample with
    ``|x_1(t) - limit| < threshold * limit``; runs that never cross get
    infinity.  Ranking is on gain-scaled time, the scale in which runs
    with different gains are comparable; ties share a rank.

    All runs must share the time grid, the initial state and the weight
    vector (the models themselves may differ).
    """
    if not runs:
        raise ValueError("need at least one run to rank")
    _, model0, traj0 = runs[0]
    for label, model, traj in runs[1:]:
        if not np.array_equal(traj.times, traj0.times):
            raise ValueError(f"run {label!r} has a different time grid")
        if not np.allclose(traj.states[0], traj0.states[0], rtol=1e-12, atol=0.0):
            raise ValueError(f"run {label!r} has a different initial state")
        if not np.allclose(model.paths.d, model0.paths.d, rtol=1e-12, atol=0.0):
            raise ValueError(f"run {label!r} has different preference weights")

    raw = []
    for label, model, traj in runs:
        limit = model.beta * model.paths.d[0] / model.alpha
        inside = np.abs(traj.states[:, 0] - limit) < threshold * limit
        if np.any(inside):
            k = int(np.argmax(inside))
            tau_time = float(traj.times[k])
            tau_scaled = model.gamma * tau_time
            reached = True
        else:
            tau_time = tau_scaled = float("inf")
            reached = False
        raw.append((label, tau_scaled, tau_time, limit, reached))

    order = sorted(range(len(raw)), key=lambda i: (raw[i][1], i))
    entries = []
    for position in order:
        label, tau_scaled, tau_time, limit, reached = raw[position]
        rank = 1 + sum(1 for other in raw if other[1] < tau_scaled)
        entries.append(
            RankEntry(
                label=label,
                rank=rank,
                tau_scaled=tau_scaled,
                tau_time=tau_time,
                limit=limit,
                reached=reached,
            )
        )
    return VariantRanking(entries=tuple(entries), threshold=float(threshold))
