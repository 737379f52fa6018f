"""
Amplitude-preserving phase-randomized surrogates.

Each replicate keeps the observed Fourier magnitudes |Z_k| and draws all N
phases i.i.d. uniform on (-pi, pi], including k = 0 (complex signals carry no
conjugate symmetry). Replicate ``b`` of a batch drawn from
``RandomSource(seed, s)`` uses stream ``s + b``, so a batch can be split into
chunks and evaluated on any number of threads with identical output.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from powervar.core.models import (
    AmplitudeSpectrum,
    ComplexSignal,
    RandomSource,
    Spectrum,
    SurrogateBatch,
    check_count,
)
from powervar.core.spectral import inverse_dft, inverse_dft_rows
from powervar.core.stats import power_moments_rows
from powervar.settings import SURROGATE_SETTINGS
from powervar.util.logging import get_logger

log = get_logger(__name__, stage="surrogate")

_TWO_PI = 2.0 * np.pi
_WORD = (1 << 64) - 1


def draw_phases(n: int, rng: RandomSource) -> np.ndarray:
    """``n`` i.i.d. phases uniform on (-pi, pi] from the stream named by ``rng``."""
    n = check_count("n", n)
    u = rng.generator().random(n)   # [0, 1)
    return np.pi - _TWO_PI * u


def make_surrogate(amps: AmplitudeSpectrum, rng: RandomSource) -> ComplexSignal:
    if not isinstance(amps, AmplitudeSpectrum):
        amps = AmplitudeSpectrum(amps)
    phases = draw_phases(amps.n, rng)
    return inverse_dft(Spectrum(amps.magnitudes * np.exp(1j * phases)))


def _replicate_phases(n: int, rng: RandomSource, start: int, stop: int) -> np.ndarray:
    """Phases of replicates ``start..stop``; row b equals ``draw_phases(n, rng.stream(b))``.

    One Philox is built per chunk and its counter moved to the start of each
    stream, so the per-replicate cost is a state write rather than a new
    generator.
    """
    bit_gen = rng.stream(start).bit_generator()
    gen = np.random.Generator(bit_gen)
    # captured before any draw: empty output buffer
    state = bit_gen.state
    counter = state["state"]["counter"]
    phases = np.empty((stop - start, n))
    for row, b in enumerate(range(start, stop)):
        if row:
            index = rng.stream_index + b
            counter[:] = np.array([0, 0, index & _WORD, (index >> 64) & _WORD], dtype=np.uint64)
            bit_gen.state = state
        phases[row] = gen.random(n)
    return np.pi - _TWO_PI * phases


def _replicate_rows(magnitudes: np.ndarray, rng: RandomSource, start: int, stop: int) -> np.ndarray:
    phases = _replicate_phases(magnitudes.size, rng, start, stop)
    return inverse_dft_rows(magnitudes * np.exp(1j * phases), workers=1)


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _map_chunks(func, chunks, workers: int) -> list:
    if workers <= 1 or len(chunks) <= 1:
        return [func(*chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order
        return list(pool.map(lambda chunk: func(*chunk), chunks))


def surrogate_batch(
    amps: AmplitudeSpectrum,
    replicates: int,
    rng: RandomSource,
    workers: int | None = None,
    chunk_size: int | None = None,
) -> SurrogateBatch:
    """Materialize ``replicates`` surrogates as a (B, N) array."""
    if not isinstance(amps, AmplitudeSpectrum):
        amps = AmplitudeSpectrum(amps)
    replicates = check_count("replicates", replicates)
    workers = workers if workers is not None else SURROGATE_SETTINGS.workers
    chunk_size = chunk_size or SURROGATE_SETTINGS.chunk_size

    def _rows(start, stop):
        return _replicate_rows(amps.magnitudes, rng, start, stop)

    rows = _map_chunks(_rows, _chunks(replicates, chunk_size), workers)
    return SurrogateBatch(np.concatenate(rows), rng)


def surrogate_power_variances(
    amps: AmplitudeSpectrum,
    replicates: int,
    rng: RandomSource,
    workers: int | None = None,
    chunk_size: int | None = None,
) -> np.ndarray:
    """Power variance of each of ``replicates`` surrogates, ordered by stream index.

    Only one chunk of replicates is held in memory per worker.

    Args:
        amps: Observed amplitude spectrum.
        replicates: Number of bootstrap replicates B.
        rng: Base random source; replicate b uses stream ``rng.stream_index + b``.
        workers: Threads evaluating chunks. Output does not depend on it.
        chunk_size: Replicates per chunk.

    Returns:
        float64 array of length B.
    """
    if not isinstance(amps, AmplitudeSpectrum):
        amps = AmplitudeSpectrum(amps)
    replicates = check_count("replicates", replicates)
    workers = workers if workers is not None else SURROGATE_SETTINGS.workers
    chunk_size = chunk_size or SURROGATE_SETTINGS.chunk_size

    def _omegas(start, stop):
        _, omega = power_moments_rows(_replicate_rows(amps.magnitudes, rng, start, stop))
        return omega

    chunks = _chunks(replicates, chunk_size)
    log.debug(
        "drawing surrogates",
        extra={"n": amps.n, "replicates": replicates, "chunks": len(chunks), "workers": workers},
    )
    return np.concatenate(_map_chunks(_omegas, chunks, workers))
