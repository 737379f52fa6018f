"""
Power-variance statistics.

``power_variance`` is the time average of squared deviations of the
instantaneous power |z_n|^2 from its mean (the sample variance). Both passes
accumulate in ``np.longdouble`` because the statistic sums fourth powers.
"""
from __future__ import annotations

import numpy as np

from powervar.core.models import AmplitudeSpectrum, ComplexSignal, PowerSummary

_WIDE = np.longdouble


def power_moments_rows(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample variance and power variance along the last axis.

    Two-pass: the mean power first, then the mean of centered squares.

    Args:
        samples: Complex array of shape (..., N).

    Returns:
        ``(sample_variance, power_variance)`` as float64 arrays of shape (...).
    """
    power = np.square(samples.real.astype(_WIDE)) + np.square(samples.imag.astype(_WIDE))
    sample_variance = power.mean(axis=-1, keepdims=True)
    power_variance = np.square(power - sample_variance).mean(axis=-1)
    return sample_variance[..., 0].astype(np.float64), power_variance.astype(np.float64)


def power_summary(signal: ComplexSignal) -> PowerSummary:
    if not isinstance(signal, ComplexSignal):
        signal = ComplexSignal(signal)
    sample_variance, power_variance = power_moments_rows(signal.samples)
    return PowerSummary(float(sample_variance), float(power_variance))


def expected_null_power_variance(amps: AmplitudeSpectrum) -> float:
    """Expected power variance of phase-randomized surrogates with amplitudes ``amps``.

        E = ((sum_k |Z_k|^2)^2 - sum_k |Z_k|^4) / N^4

    Non-negative by Cauchy-Schwarz; clipped at zero against rounding.
    """
    if not isinstance(amps, AmplitudeSpectrum):
        amps = AmplitudeSpectrum(amps)
    sq = np.square(amps.magnitudes.astype(_WIDE))
    total = sq.sum()
    value = (total * total - np.square(sq).sum()) / _WIDE(amps.n) ** 4
    return max(float(value), 0.0)
