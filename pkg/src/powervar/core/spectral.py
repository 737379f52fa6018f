"""
Exact-length discrete Fourier transforms.

The forward transform carries no normalization and the inverse carries 1/N:

    Z_k = sum_n z_n exp(-2 pi i k n / N)
    z_n = (1/N) sum_k Z_k exp(+2 pi i k n / N)

Transforms go through ``scipy.fft`` whose pocketfft backend factors N into
small radices and falls back to Bluestein's chirp-z algorithm for large prime
factors, so every length runs in O(N log N).
"""
from __future__ import annotations

import numpy as np
import scipy.fft

from powervar.core.errors import InputValidationError
from powervar.core.models import AmplitudeSpectrum, ComplexSignal, Spectrum
from powervar.settings import SPECTRAL_SETTINGS


def _workers(workers: int | None) -> int | None:
    return workers if workers is not None else SPECTRAL_SETTINGS.workers


def forward_dft(signal: ComplexSignal, workers: int | None = None) -> Spectrum:
    """Unnormalized forward DFT of ``signal``.

    Args:
        signal: Validated complex signal of length N.
        workers: Thread count handed to ``scipy.fft``.

    Returns:
        Spectrum of length N.
    """
    if not isinstance(signal, ComplexSignal):
        signal = ComplexSignal(signal)
    coefficients = scipy.fft.fft(signal.samples, norm="backward", workers=_workers(workers))
    return Spectrum(coefficients)


def inverse_dft(spectrum: Spectrum, workers: int | None = None) -> ComplexSignal:
    """Inverse DFT with the 1/N factor applied here, not on the forward side."""
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    samples = scipy.fft.ifft(spectrum.coefficients, norm="backward", workers=_workers(workers))
    return ComplexSignal(samples)


def amplitudes(spectrum: Spectrum) -> AmplitudeSpectrum:
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    return AmplitudeSpectrum(np.abs(spectrum.coefficients))


def signal_amplitudes(signal: ComplexSignal, workers: int | None = None) -> AmplitudeSpectrum:
    """Shortcut for ``amplitudes(forward_dft(signal))``."""
    return amplitudes(forward_dft(signal, workers=workers))


def inverse_dft_rows(coefficients: np.ndarray, workers: int | None = None) -> np.ndarray:
    """Inverse DFT of every row of a (B, N) coefficient matrix.

    Used on the surrogate hot path, where wrapping each replicate in a
    ``ComplexSignal`` would only repeat the finiteness checks.
    """
    if coefficients.ndim != 2:
        raise InputValidationError(f"expected a (B, N) matrix, got shape {coefficients.shape}")
    return scipy.fft.ifft(coefficients, axis=-1, norm="backward", workers=_workers(workers))
