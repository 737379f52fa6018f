import time

import numpy as np
import pytest

from powervar.core.errors import DegenerateInputError, InputValidationError, InvalidArgumentError
from powervar.core.generators import generate
from powervar.core.hypothesis import (
    classify,
    fast_path_check,
    run_test,
    run_tests,
    select_p_value,
    tail_counts,
)
from powervar.core.models import (
    ComplexSignal,
    EarlyDecision,
    Label,
    ProcessSpec,
    Sidedness,
    TestConfig,
    TestResult,
)
from tests.utils import pure_tone, random_signal


def _ar1(n: int, seed: int) -> ComplexSignal:
    return generate(ProcessSpec(kind="ar1", n=n, seed=seed))


# ---------------------------------------------------------------------------
# fast_path_check
# ---------------------------------------------------------------------------
def test_fast_path_high_tail_below_expectation():
    decision = fast_path_check(1.0, 2.0, "high_tail")
    assert isinstance(decision, EarlyDecision)
    assert decision.p_value == 1.0
    assert decision.reject is False


def test_fast_path_high_tail_above_expectation():
    assert fast_path_check(3.0, 2.0, Sidedness.HIGH_TAIL) is None


def test_fast_path_low_tail():
    assert fast_path_check(3.0, 2.0, "low") is not None
    assert fast_path_check(1.0, 2.0, "low") is None


@pytest.mark.parametrize("observed, expected", [(1.0, 2.0), (3.0, 2.0), (2.0, 2.0)])
def test_fast_path_never_fires_two_sided(observed, expected):
    assert fast_path_check(observed, expected, "two_sided") is None


# ---------------------------------------------------------------------------
# tail_counts / select_p_value
# ---------------------------------------------------------------------------
def test_tail_counts_strict_and_ties():
    null = np.array([0.5, 1.0, 1.0 + 1e-12, 2.0, 3.0])
    above, below, ties = tail_counts(1.0, null, sample_variance=1.0)
    assert (above, below, ties) == (2, 1, 2)


def test_tail_counts_without_ties():
    null = np.array([0.1, 0.2, 5.0])
    assert tail_counts(1.0, null, sample_variance=1.0) == (1, 2, 0)


@pytest.mark.parametrize(
    "q, r, sided, p",
    [
        (0.01, 0.99, "two_sided", 0.02),
        (0.7, 0.6, "two_sided", 1.0),
        (0.01, 0.99, "high_tail", 0.01),
        (0.01, 0.99, "low_tail", 0.99),
    ],
)
def test_select_p_value(q, r, sided, p):
    assert select_p_value(q, r, sided) == pytest.approx(p)


# ---------------------------------------------------------------------------
# run_test
# ---------------------------------------------------------------------------
def test_pure_tone_is_never_rejected():
    result = run_test(pure_tone(64), TestConfig(replicates=200, sided="two_sided", seed=3))
    assert result.omega_observed <= 1e-12
    assert result.tie_count == 200
    assert result.p_value == 1.0
    assert result.reject is False
    assert result.label is Label.STATIONARY


def test_result_fields_are_in_range():
    result = run_test(_ar1(200, 1), TestConfig(replicates=300, seed=1))
    assert 0.0 <= result.q_value <= 1.0
    assert 0.0 <= result.r_value <= 1.0
    assert 0.0 <= result.p_value <= 1.0
    assert result.n == 200
    assert result.omega_expected >= 0.0
    assert result.null_samples.shape == (300,)
    assert result.null_mean == pytest.approx(np.mean(result.null_samples))
    assert result.null_variance >= 0.0
    assert result.reject == (result.p_value < 0.05)


def test_run_test_is_deterministic():
    config = TestConfig(replicates=256, seed=42)
    signal = _ar1(128, 7)
    a, b = run_test(signal, config), run_test(signal, config)
    assert a.p_value == b.p_value
    assert np.array_equal(a.null_samples, b.null_samples)


def test_run_test_independent_of_threads():
    config = TestConfig(replicates=1000, seed=5)
    signal = _ar1(300, 2)
    one = run_test(signal, config, workers=1)
    eight = run_test(signal, config, workers=8)
    assert np.array_equal(one.null_samples, eight.null_samples)
    assert (one.q_value, one.r_value, one.p_value) == (eight.q_value, eight.r_value, eight.p_value)


@pytest.mark.parametrize("c", [0.01, 1.0, 100.0])
def test_p_value_invariant_under_scaling(c):
    config = TestConfig(replicates=300, seed=9)
    signal = generate(ProcessSpec(kind="cyclo", n=256, seed=4))
    base = run_test(signal, config)
    scaled = run_test(signal.scaled(c), config)
    assert (scaled.q_value, scaled.r_value, scaled.p_value) == (
        base.q_value, base.r_value, base.p_value
    )


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_strong_jump_is_rejected(seed):
    signal = generate(ProcessSpec(kind="jump", n=1000, seed=seed, params={"levels": (1.0, 21.0)}))
    result = run_test(signal, TestConfig(replicates=1000, sided="high_tail", seed=seed))
    assert result.reject is True
    assert result.p_value < 0.01
    assert result.label is Label.HIGH_POWER_VARIANCE


def test_fast_path_result_shape():
    # a jump signal tested for the low tail sits above its null expectation
    signal = generate(ProcessSpec(kind="jump", n=500, seed=1, params={"levels": (1.0, 21.0)}))
    result = run_test(signal, TestConfig(replicates=100, sided="low_tail"))
    assert result.fast_path is True
    assert result.q_value is None and result.r_value is None
    assert result.p_value == 1.0
    assert result.reject is False
    assert result.tie_count == 0
    assert result.null_samples is None
    assert result.null_mean is None


def test_fast_path_disabled_runs_bootstrap():
    signal = generate(ProcessSpec(kind="jump", n=500, seed=1, params={"levels": (1.0, 21.0)}))
    result = run_test(signal, TestConfig(replicates=100, sided="low_tail", fast_path=False))
    assert result.fast_path is False
    assert result.null_samples.shape == (100,)


def test_fast_path_agrees_with_bootstrap():
    rng = np.random.default_rng(41)
    kinds = ("ar1", "jump", "cyclo")
    fired = 0
    for case in range(200):
        spec = ProcessSpec(kind=kinds[case % 3], n=int(rng.integers(16, 65)), seed=case)
        sided = "high_tail" if case % 2 else "low_tail"
        signal = generate(spec)
        on = run_test(signal, TestConfig(replicates=100, sided=sided, seed=case))
        off = run_test(signal, TestConfig(replicates=100, sided=sided, seed=case, fast_path=False))
        if on.fast_path:
            fired += 1
            assert on.reject == off.reject
    assert fired > 0


def test_demean_removes_constant_offset():
    signal = _ar1(100, 3)
    config = TestConfig(replicates=50, seed=1, demean=True)
    shifted = run_test(signal.samples + (5 - 2j), config)
    plain = run_test(signal, config)
    assert shifted.omega_observed == pytest.approx(plain.omega_observed, rel=1e-8)


def test_run_tests_keeps_order():
    signals = [_ar1(64, s) for s in range(3)]
    results = run_tests(signals, TestConfig(replicates=50))
    expected = [run_test(s, TestConfig(replicates=50)).omega_observed for s in signals]
    assert [r.omega_observed for r in results] == expected


def test_degenerate_and_invalid_inputs():
    with pytest.raises(DegenerateInputError):
        run_test([1.0 + 1j])
    with pytest.raises(InputValidationError):
        run_test([1.0, np.nan, 2.0])
    with pytest.raises(InvalidArgumentError):
        TestConfig(replicates=0)
    with pytest.raises(InvalidArgumentError):
        TestConfig(alpha=1.5)


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------
def _result(q, r, reject, sided="two_sided"):
    return TestResult(
        n=10, omega_observed=1.0, omega_expected=1.0, q_value=q, r_value=r,
        p_value=0.0 if reject else 1.0, reject=reject, tie_count=0,
        config=TestConfig(replicates=10, sided=sided),
    )


def test_classify():
    assert classify(_result(0.5, 0.5, False)) is Label.STATIONARY
    assert classify(_result(0.0, 1.0, True)) is Label.HIGH_POWER_VARIANCE
    assert classify(_result(1.0, 0.0, True)) is Label.LOW_POWER_VARIANCE
    assert classify(_result(0.0, 1.0, True, "high_tail")) is Label.HIGH_POWER_VARIANCE
    assert classify(_result(1.0, 0.0, True, "low_tail")) is Label.LOW_POWER_VARIANCE


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------
@pytest.mark.slow
def test_null_rejections_within_binomial_band():
    rejections = sum(
        run_test(_ar1(1000, seed), TestConfig(replicates=500, seed=seed)).reject
        for seed in range(100)
    )
    assert 0 <= rejections <= 12


def test_random_noise_rarely_rejected():
    rng = np.random.default_rng(43)
    rejections = sum(
        run_test(random_signal(rng, 128), TestConfig(replicates=200, seed=s)).reject
        for s in range(20)
    )
    assert rejections <= 5


# ---------------------------------------------------------------------------
# Runtime
# ---------------------------------------------------------------------------
def _best_time(signal, config, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        run_test(signal, config, workers=1)
        best = min(best, time.perf_counter() - start)
    return best


@pytest.mark.slow
def test_runtime_scales_like_n_log_n():
    config = TestConfig(replicates=1000, seed=1, fast_path=False)
    lengths = (1000, 4000, 16000)
    times = []
    for n in lengths:
        signal = random_signal(np.random.default_rng(n), n)
        run_test(signal, config, workers=1)  # warm the fft plan cache
        times.append(_best_time(signal, config))
    assert times[0] < 1.0
    slope = np.polyfit(np.log(lengths), np.log(times), 1)[0]
    assert 0.9 <= slope <= 1.3
