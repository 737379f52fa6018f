"""
The bootstrap power variance test.

Given a signal z the test compares its power variance against the power
variances of B phase-randomized (hence stationary) replicates:

    q = #{b : Omega(z_b) > Omega(z)} / B        upper-tail fraction
    r = #{b : Omega(z_b) < Omega(z)} / B        lower-tail fraction
    p = min(1, 2 min(q, r))                     two-sided
    p = q  (high_tail)   or   p = r  (low_tail) one-sided

Replicates whose power variance ties the observed one (within a relative
tolerance) count in neither q nor r, but are added to both before the p-value
is formed. Without that rule a pure tone, where every comparison ties,
would get p = 0.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Optional

import numpy as np

from powervar.core.models import (
    ComplexSignal,
    EarlyDecision,
    Label,
    RandomSource,
    Sidedness,
    TestConfig,
    TestResult,
)
from powervar.core.spectral import signal_amplitudes
from powervar.core.stats import expected_null_power_variance, power_summary
from powervar.core.surrogate import surrogate_power_variances
from powervar.settings import HYPOTHESIS_SETTINGS
from powervar.util.logging import get_logger

log = get_logger(__name__, stage="hypothesis")


def fast_path_check(
    omega_observed: float,
    omega_expected: float,
    sidedness: Sidedness | str,
) -> Optional[EarlyDecision]:
    """Decide a one-sided test from the analytic null mean alone, when possible.

    A high-tail test cannot reject when the observed power variance is already
    below the surrogate expectation (and symmetrically for the low tail).

    Returns:
        An early accept, or ``None`` when the bootstrap has to run.
    """
    sidedness = Sidedness.parse(sidedness)
    if sidedness is Sidedness.HIGH_TAIL and omega_expected > omega_observed:
        return EarlyDecision(reason="observed power variance below null expectation")
    if sidedness is Sidedness.LOW_TAIL and omega_expected < omega_observed:
        return EarlyDecision(reason="observed power variance above null expectation")
    return None


def tail_counts(
    omega_observed: float,
    null_samples: np.ndarray,
    sample_variance: float,
    tie_rtol: float | None = None,
) -> tuple[int, int, int]:
    """Count surrogates strictly above, strictly below, and tied with the observation.

    Two values tie when they differ by at most
    ``tie_rtol * max(observed, surrogate, sample_variance**2)``.
    """
    tie_rtol = tie_rtol if tie_rtol is not None else HYPOTHESIS_SETTINGS.tie_rtol
    scale = np.maximum(np.maximum(null_samples, omega_observed), sample_variance ** 2)
    tied = np.abs(null_samples - omega_observed) <= tie_rtol * scale
    above = int(np.count_nonzero((null_samples > omega_observed) & ~tied))
    below = int(np.count_nonzero((null_samples < omega_observed) & ~tied))
    return above, below, int(np.count_nonzero(tied))


def select_p_value(q_adjusted: float, r_adjusted: float, sidedness: Sidedness | str) -> float:
    sidedness = Sidedness.parse(sidedness)
    if sidedness is Sidedness.HIGH_TAIL:
        p = q_adjusted
    elif sidedness is Sidedness.LOW_TAIL:
        p = r_adjusted
    else:
        p = 2.0 * min(q_adjusted, r_adjusted)
    return min(1.0, p)


def classify(result: TestResult) -> Label:
    """Name the kind of nonstationarity a rejection points at.

    Rejections in the upper tail indicate heteroscedasticity (too much power
    variance); rejections in the lower tail indicate phase-locked oscillation.
    """
    if not result.reject:
        return Label.STATIONARY
    sided = result.config.sided
    if sided is Sidedness.HIGH_TAIL:
        return Label.HIGH_POWER_VARIANCE
    if sided is Sidedness.LOW_TAIL:
        return Label.LOW_POWER_VARIANCE
    # two-sided: the smaller tail fraction is the one the observation sits in
    if result.q_value <= result.r_value:
        return Label.HIGH_POWER_VARIANCE
    return Label.LOW_POWER_VARIANCE


def run_test(
    signal: ComplexSignal,
    config: TestConfig | None = None,
    workers: int | None = None,
) -> TestResult:
    """Run the bootstrap power variance test on ``signal``.

    Args:
        signal: Signal under test (anything ``ComplexSignal`` accepts).
        config: Test settings; defaults come from ``SETTINGS.hypothesis``.
        workers: Threads used to evaluate surrogate chunks. Results are
            bitwise identical for any value.

    Returns:
        The ``TestResult``. ``null_samples`` holds the B surrogate power
        variances unless the fast path settled the test.
    """
    config = config or TestConfig()
    if not isinstance(signal, ComplexSignal):
        signal = ComplexSignal(signal)
    if config.demean:
        signal = signal.demeaned()

    summary = power_summary(signal)
    amps = signal_amplitudes(signal)
    omega_expected = expected_null_power_variance(amps)

    if config.fast_path:
        early = fast_path_check(summary.power_variance, omega_expected, config.sided)
        if early is not None:
            log.debug(early.reason, extra={"n": signal.n, "sided": config.sided})
            return TestResult(
                n=signal.n,
                omega_observed=summary.power_variance,
                omega_expected=omega_expected,
                q_value=None,
                r_value=None,
                p_value=early.p_value,
                reject=early.reject,
                tie_count=0,
                config=config,
                label=Label.STATIONARY,
                fast_path=True,
            )

    replicates = config.replicates
    null_samples = surrogate_power_variances(
        amps, replicates, RandomSource(config.seed), workers=workers
    )
    null_samples.flags.writeable = False
    above, below, ties = tail_counts(
        summary.power_variance, null_samples, summary.sample_variance
    )
    q_value = above / replicates
    r_value = below / replicates
    tie_fraction = ties / replicates
    p_value = select_p_value(q_value + tie_fraction, r_value + tie_fraction, config.sided)

    result = TestResult(
        n=signal.n,
        omega_observed=summary.power_variance,
        omega_expected=omega_expected,
        q_value=q_value,
        r_value=r_value,
        p_value=p_value,
        reject=p_value < config.alpha,
        tie_count=ties,
        config=config,
        null_samples=null_samples,
    )
    result = replace(result, label=classify(result))
    log.debug(
        "test complete",
        extra={"n": signal.n, "p": p_value, "ties": ties, "label": result.label},
    )
    return result


def run_tests(
    signals: Iterable[ComplexSignal],
    config: TestConfig | None = None,
    workers: int | None = None,
) -> list[TestResult]:
    """Test several signals with one configuration (e.g. a set of drifter tracks)."""
    return [run_test(s, config, workers=workers) for s in signals]
