"""
Synthetic processes for size and power studies.

- ``ar1``: z_n = (x_n + i y_n)/sqrt(2) with x_n = 0.9 x_{n-1} + 0.1 e_n (y alike).
  Stationary (the null model).
- ``jump``: level 1 for 0-based n <= N/2 and level 3 afterwards, plus unit
  complex white noise. The mean breaks halfway.
- ``cyclo``: a exp(i omega n / N) plus unit complex white noise. The
  deterministic phasor is phase-locked over the record.

Every generator draws from ``RandomSource(spec.seed).generator()`` and
Gaussians come from numpy's ziggurat ``standard_normal``, so a spec (seed
included) always maps to the same signal.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.signal import lfilter

from powervar.core.errors import RuntimeSetupError
from powervar.core.models import ComplexSignal, ProcessKind, ProcessSpec, RandomSource
from powervar.util.logging import get_logger

log = get_logger(__name__, stage="generate")

_SQRT2 = np.sqrt(2.0)

GENERATORS: dict[ProcessKind, Callable[[ProcessSpec, np.random.Generator], np.ndarray]] = {}


def register(kind: ProcessKind | str):
    def _register(func: Callable) -> Callable:
        _kind = ProcessKind.parse(kind)
        if _kind in GENERATORS:
            raise RuntimeSetupError(f"A generator for \"{_kind}\" is already registered")
        GENERATORS[_kind] = func
        return func
    return _register


def _complex_noise(gen: np.random.Generator, n: int) -> np.ndarray:
    """Complex white noise with E|w|^2 = 1: (x + i y)/sqrt(2), x and y standard normal."""
    xy = gen.standard_normal((2, n))
    return (xy[0] + 1j * xy[1]) / _SQRT2


@register(ProcessKind.AR1)
def _ar1(spec: ProcessSpec, gen: np.random.Generator) -> np.ndarray:
    p = spec.params
    phi, scale = p["coefficient"], p["innovation_scale"]
    n = spec.n

    if p["init"] == "stationary":
        # x_0, y_0 ~ N(0, scale^2 / (1 - phi^2)), then N - 1 innovations
        start_sd = scale / np.sqrt(1.0 - phi * phi)
        xy0 = gen.standard_normal(2) * start_sd
        start = xy0[0] + 1j * xy0[1]
        innovations = gen.standard_normal((2, n - 1))
        drive = scale * (innovations[0] + 1j * innovations[1])
        tail = lfilter([1.0], [1.0, -phi], drive, zi=[phi * start])[0]
        xy = np.concatenate(([start], tail))
    else:
        burn = p["burn_in"]
        innovations = gen.standard_normal((2, n + burn))
        drive = scale * (innovations[0] + 1j * innovations[1])
        xy = lfilter([1.0], [1.0, -phi], drive)[burn:]

    return xy / _SQRT2


@register(ProcessKind.JUMP)
def _jump(spec: ProcessSpec, gen: np.random.Generator) -> np.ndarray:
    before, after = spec.params["levels"]
    n = spec.n
    index = np.arange(n)
    levels = np.where(index <= n / 2, before, after).astype(np.complex128)
    return levels + spec.params["noise_scale"] * _complex_noise(gen, n)


@register(ProcessKind.CYCLO)
def _cyclo(spec: ProcessSpec, gen: np.random.Generator) -> np.ndarray:
    p = spec.params
    n = spec.n
    phasor = p["amplitude"] * np.exp(1j * p["omega"] * np.arange(n) / n)
    return phasor + p["noise_scale"] * _complex_noise(gen, n)


def generate(spec: ProcessSpec) -> ComplexSignal:
    """Realize ``spec`` as a signal; identical specs give identical signals."""
    if not isinstance(spec, ProcessSpec):
        raise TypeError(f"expected ProcessSpec, got {type(spec).__name__}")
    gen = RandomSource(spec.seed).generator()
    samples = GENERATORS[spec.kind](spec, gen)
    log.debug("generated", extra={"kind": spec.kind, "n": spec.n, "seed": spec.seed})
    return ComplexSignal(samples)
