import numpy as np
import pytest
from scipy import stats

from powervar.core.errors import InvalidArgumentError
from powervar.core.models import AmplitudeSpectrum, RandomSource
from powervar.core.spectral import signal_amplitudes
from powervar.core.stats import expected_null_power_variance
from powervar.core.surrogate import (
    _replicate_phases,
    draw_phases,
    make_surrogate,
    surrogate_batch,
    surrogate_power_variances,
)
from tests.utils import random_signal


def _single_tone(n: int, k: int = 3, c: float = 2.0) -> AmplitudeSpectrum:
    amps = np.zeros(n)
    amps[k] = c
    return AmplitudeSpectrum(amps)


# ---------------------------------------------------------------------------
# draw_phases
# ---------------------------------------------------------------------------
def test_phases_are_deterministic():
    a = draw_phases(4, RandomSource(seed=1, stream_index=0))
    b = draw_phases(4, RandomSource(seed=1, stream_index=0))
    assert np.array_equal(a, b)


def test_phases_lie_in_half_open_interval():
    phases = draw_phases(10_000, RandomSource(seed=2))
    assert np.all(phases > -np.pi)
    assert np.all(phases <= np.pi)


def test_phases_are_uniform():
    phases = draw_phases(100_000, RandomSource(seed=7, stream_index=3))
    result = stats.kstest(phases, "uniform", args=(-np.pi, 2 * np.pi))
    assert result.pvalue > 0.01


def test_streams_are_uncorrelated():
    n = 10_000
    a = draw_phases(n, RandomSource(seed=1, stream_index=0))
    b = draw_phases(n, RandomSource(seed=1, stream_index=1))
    assert abs(np.corrcoef(a, b)[0, 1]) < 3 / np.sqrt(n)


def test_zero_phases_rejected():
    with pytest.raises(InvalidArgumentError):
        draw_phases(0, RandomSource())


# ---------------------------------------------------------------------------
# make_surrogate / surrogate_batch
# ---------------------------------------------------------------------------
def test_single_tone_surrogate_has_constant_modulus():
    n, c = 16, 2.0
    surrogate = make_surrogate(_single_tone(n, c=c), RandomSource(seed=5))
    assert np.allclose(np.abs(surrogate.samples), c / n, rtol=1e-12)


def test_zero_amplitudes_give_zero_surrogate():
    surrogate = make_surrogate(AmplitudeSpectrum(np.zeros(8)), RandomSource(seed=5))
    assert np.all(surrogate.samples == 0)


def test_surrogate_preserves_amplitudes():
    amps = signal_amplitudes(random_signal(np.random.default_rng(31), 64))
    surrogate = make_surrogate(amps, RandomSource(seed=9))
    got = signal_amplitudes(surrogate).magnitudes
    assert np.max(np.abs(got - amps.magnitudes) / amps.magnitudes) <= 1e-9


def test_batch_rows_preserve_amplitudes():
    amps = signal_amplitudes(random_signal(np.random.default_rng(32), 50))
    batch = surrogate_batch(amps, 40, RandomSource(seed=3), chunk_size=16)
    assert batch.replicates.shape == (40, 50)
    assert len(batch) == 40
    for replicate in batch:
        got = signal_amplitudes(replicate).magnitudes
        assert np.max(np.abs(got - amps.magnitudes) / amps.magnitudes) <= 1e-9


def test_batch_row_b_is_stream_b():
    amps = signal_amplitudes(random_signal(np.random.default_rng(33), 20))
    batch = surrogate_batch(amps, 6, RandomSource(seed=4, stream_index=10))
    alone = make_surrogate(amps, RandomSource(seed=4, stream_index=15))
    assert np.allclose(batch.replicates[5], alone.samples, atol=1e-12)


def test_chunked_rows_match_fresh_streams():
    amps = signal_amplitudes(random_signal(np.random.default_rng(34), 12))
    # streams straddle the 2**64 boundary of the counter words
    rng = RandomSource(seed=6, stream_index=2**64 - 3)
    batch = surrogate_batch(amps, 7, rng, chunk_size=4)
    for b in range(7):
        alone = make_surrogate(amps, rng.stream(b))
        assert np.allclose(batch.replicates[b], alone.samples, atol=1e-12)


def test_reused_generator_reproduces_each_stream_exactly():
    rng = RandomSource(seed=6, stream_index=2**64 - 3)
    phases = _replicate_phases(9, rng, 2, 7)
    for row, b in enumerate(range(2, 7)):
        assert np.array_equal(phases[row], draw_phases(9, rng.stream(b)))


def test_power_variances_do_not_depend_on_chunking_at_stream_offsets():
    amps = signal_amplitudes(random_signal(np.random.default_rng(35), 30))
    rng = RandomSource(seed=11, stream_index=500)
    a = surrogate_power_variances(amps, 37, rng, chunk_size=1)
    b = surrogate_power_variances(amps, 37, rng, chunk_size=37)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# surrogate_power_variances
# ---------------------------------------------------------------------------
def test_single_tone_power_variances_are_zero():
    omegas = surrogate_power_variances(_single_tone(32, c=32.0), 50, RandomSource(seed=1))
    assert omegas.shape == (50,)
    assert np.all(np.abs(omegas) <= 1e-12)


def test_zero_replicates_rejected():
    with pytest.raises(InvalidArgumentError):
        surrogate_power_variances(_single_tone(8), 0, RandomSource())


def test_independent_of_worker_count():
    amps = signal_amplitudes(random_signal(np.random.default_rng(34), 100))
    one = surrogate_power_variances(amps, 1000, RandomSource(seed=8), workers=1, chunk_size=64)
    many = surrogate_power_variances(amps, 1000, RandomSource(seed=8), workers=8, chunk_size=64)
    assert np.array_equal(one, many)


def test_chunking_only_changes_rounding():
    amps = signal_amplitudes(random_signal(np.random.default_rng(35), 30))
    a = surrogate_power_variances(amps, 100, RandomSource(seed=8), chunk_size=7)
    b = surrogate_power_variances(amps, 100, RandomSource(seed=8), chunk_size=100)
    assert np.allclose(a, b, rtol=1e-12)


def _check_mean_matches_expectation(amps: AmplitudeSpectrum, replicates: int, seed: int, k: float):
    omegas = surrogate_power_variances(amps, replicates, RandomSource(seed=seed), workers=4)
    se = omegas.std(ddof=1) / np.sqrt(replicates)
    assert abs(omegas.mean() - expected_null_power_variance(amps)) <= k * se


def test_mean_matches_expectation():
    amps = AmplitudeSpectrum(np.random.default_rng(36).uniform(0, 4, 16))
    _check_mean_matches_expectation(amps, 20_000, seed=1, k=4.0)


@pytest.mark.slow
def test_mean_matches_expectation_many_spectra():
    rng = np.random.default_rng(37)
    for i in range(20):
        amps = AmplitudeSpectrum(rng.uniform(0, 4, 16))
        _check_mean_matches_expectation(amps, 100_000, seed=100 + i, k=4.0)
