from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

import numpy as np

from powervar.core.errors import DegenerateInputError, InputValidationError, InvalidArgumentError
from powervar.settings import GENERATOR_SETTINGS, HYPOTHESIS_SETTINGS

try:
    from enum import StrEnum
except ImportError:
    from enum import Enum

    class StrEnum(str, Enum):
        pass


SEED_LIMIT = 2 ** 64


class Sidedness(StrEnum):
    TWO_SIDED = "two_sided"
    HIGH_TAIL = "high_tail"
    LOW_TAIL = "low_tail"

    @classmethod
    def parse(cls, value: "Sidedness | str") -> "Sidedness":
        """Accept the canonical names plus the short CLI forms two/high/low."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        key = {"two": "two_sided", "high": "high_tail", "low": "low_tail"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgumentError(f"Unknown sidedness {value!r}") from None


class ProcessKind(StrEnum):
    AR1 = "ar1"
    JUMP = "jump"
    CYCLO = "cyclo"

    @classmethod
    def parse(cls, value: "ProcessKind | str") -> "ProcessKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidArgumentError(f"Unknown process kind {value!r}") from None


class Label(StrEnum):
    STATIONARY = "stationary"
    HIGH_POWER_VARIANCE = "high_power_variance"
    LOW_POWER_VARIANCE = "low_power_variance"


def check_seed(seed: Any) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidArgumentError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < SEED_LIMIT:
        raise InvalidArgumentError(f"seed must lie in [0, 2**64), got {seed}")
    return int(seed)


def check_count(name: str, value: Any, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def _readonly(values: Iterable, dtype, what: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=dtype)
    except (TypeError, ValueError) as exc:
        raise InputValidationError(f"{what} must be numeric: {exc}") from exc
    if arr.ndim != 1:
        raise InputValidationError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


# --------------------------------------------------------------------------- #
# Signals and spectra
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, slots=True, eq=False)
class ComplexSignal:
    """A finite, regularly sampled complex-valued signal z_0..z_{N-1}."""
    samples: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.samples, np.complex128, "signal")
        if arr.size < 2:
            raise DegenerateInputError(f"signal needs N >= 2 samples, got {arr.size}")
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return self.samples.size

    def __len__(self) -> int:
        return self.samples.size

    def scaled(self, factor: complex) -> "ComplexSignal":
        return ComplexSignal(self.samples * factor)

    def demeaned(self) -> "ComplexSignal":
        return ComplexSignal(self.samples - self.samples.mean())


@dataclass(frozen=True, slots=True, eq=False)
class Spectrum:
    """Unnormalized DFT coefficients |Z_k| e^{i phi_k}."""
    coefficients: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.coefficients, np.complex128, "spectrum")
        if arr.size < 1:
            raise DegenerateInputError("spectrum is empty")
        object.__setattr__(self, "coefficients", arr)

    @property
    def n(self) -> int:
        return self.coefficients.size

    def __len__(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True, slots=True, eq=False)
class AmplitudeSpectrum:
    """Fourier magnitudes |Z_k|; the only part of a signal surrogates retain."""
    magnitudes: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.magnitudes, np.float64, "amplitudes")
        if arr.size < 1:
            raise DegenerateInputError("amplitude spectrum is empty")
        if np.any(arr < 0):
            raise InputValidationError("amplitudes must be non-negative")
        object.__setattr__(self, "magnitudes", arr)

    @property
    def n(self) -> int:
        return self.magnitudes.size

    def __len__(self) -> int:
        return self.magnitudes.size


@dataclass(frozen=True, slots=True)
class PowerSummary:
    sample_variance: float
    power_variance: float


# --------------------------------------------------------------------------- #
# Randomness
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, slots=True)
class RandomSource:
    """
    A (seed, stream_index) pair naming one counter-based Philox stream.

    The seed is the Philox key and the stream index occupies the upper 128 bits
    of the 256-bit counter, so every stream owns a disjoint block of 2**128
    draws and can be materialized independently of all others.
    """
    seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        check_seed(self.seed)
        check_count("stream_index", self.stream_index, minimum=0)

    def bit_generator(self) -> np.random.Philox:
        return np.random.Philox(key=int(self.seed), counter=int(self.stream_index) << 128)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(self.bit_generator())

    def stream(self, offset: int) -> "RandomSource":
        return RandomSource(self.seed, self.stream_index + offset)


@dataclass(frozen=True, slots=True, eq=False)
class SurrogateBatch:
    """B phase-randomized replicates stacked as rows of a (B, N) array."""
    replicates: np.ndarray
    source: RandomSource

    def __len__(self) -> int:
        return self.replicates.shape[0]

    def __iter__(self):
        return (ComplexSignal(row) for row in self.replicates)


# --------------------------------------------------------------------------- #
# Hypothesis testing
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, slots=True)
class TestConfig:
    """Bootstrap power variance test settings.

    Fields left at their defaults come from ``SETTINGS.hypothesis``.
    """
    __test__ = False  # not a pytest class

    replicates: int = field(default_factory=lambda: HYPOTHESIS_SETTINGS.replicates)
    alpha: float = field(default_factory=lambda: HYPOTHESIS_SETTINGS.alpha)
    sided: Sidedness = field(default_factory=lambda: HYPOTHESIS_SETTINGS.sided)
    seed: int = 0
    demean: bool = field(default_factory=lambda: HYPOTHESIS_SETTINGS.demean)
    fast_path: bool = field(default_factory=lambda: HYPOTHESIS_SETTINGS.fast_path)

    def __post_init__(self):
        check_count("replicates", self.replicates)
        if not isinstance(self.alpha, (int, float)) or not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        check_seed(self.seed)
        object.__setattr__(self, "sided", Sidedness.parse(self.sided))


@dataclass(frozen=True, slots=True)
class EarlyDecision:
    """Outcome settled before any bootstrap replicate is drawn."""
    reason: str
    p_value: float = 1.0
    reject: bool = False


@dataclass(frozen=True, slots=True, eq=False)
class TestResult:
    __test__ = False

    n: int
    omega_observed: float
    omega_expected: float
    q_value: Optional[float]
    r_value: Optional[float]
    p_value: float
    reject: bool
    tie_count: int
    config: TestConfig
    label: Label = Label.STATIONARY
    fast_path: bool = False
    null_samples: Optional[np.ndarray] = None

    @property
    def tie_fraction(self) -> float:
        return self.tie_count / self.config.replicates

    @property
    def null_mean(self) -> Optional[float]:
        if self.null_samples is None:
            return None
        return float(np.mean(self.null_samples))

    @property
    def null_variance(self) -> Optional[float]:
        if self.null_samples is None:
            return None
        return float(np.var(self.null_samples))


# --------------------------------------------------------------------------- #
# Synthetic processes
# --------------------------------------------------------------------------- #
def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, np.number)) and not isinstance(value, bool)


def _check_param(kind: str, key: str, value: Any, default: Any) -> None:
    """``value`` must have the shape of the settings default it replaces."""
    if isinstance(default, str):
        if not isinstance(value, str):
            raise InvalidArgumentError(f"{kind} parameter {key!r} must be text, got {value!r}")
        return
    if isinstance(default, (tuple, list)):
        if (
            not isinstance(value, (tuple, list, np.ndarray))
            or len(value) != len(default)
            or not all(_is_number(v) for v in value)
        ):
            raise InvalidArgumentError(
                f"{kind} parameter {key!r} must be {len(default)} numbers, got {value!r}"
            )
        values = tuple(value)
    elif _is_number(value):
        values = (value,)
    else:
        raise InvalidArgumentError(f"{kind} parameter {key!r} must be a number, got {value!r}")
    if not all(math.isfinite(float(v)) for v in values):
        raise InvalidArgumentError(f"{kind} parameter {key!r} must be finite")


@dataclass(frozen=True, slots=True)
class ProcessSpec:
    """Parameterized description of a synthetic process.

    ``params`` overrides the per-kind defaults in ``SETTINGS.generators``.
    """
    kind: ProcessKind
    n: int
    seed: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = ProcessKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        check_count("n", self.n, minimum=2)
        check_seed(self.seed)

        defaults = dict(GENERATOR_SETTINGS[kind.value])
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise InvalidArgumentError(
                f"unknown {kind} parameters: {', '.join(sorted(unknown))}"
            )
        merged = {**defaults, **self.params}
        for key, value in merged.items():
            _check_param(kind, key, value, defaults[key])
        self._check_kind_params(kind, merged)
        object.__setattr__(self, "params", merged)

    @staticmethod
    def _check_kind_params(kind: ProcessKind, p: dict) -> None:
        if p.get("noise_scale", 0.0) < 0:
            raise InvalidArgumentError("noise_scale must be non-negative")
        if kind is ProcessKind.AR1:
            if p["init"] not in ("stationary", "burn_in"):
                raise InvalidArgumentError(
                    f"ar1 init must be stationary or burn_in, got {p['init']!r}"
                )
            if p["init"] == "stationary" and not abs(p["coefficient"]) < 1:
                raise InvalidArgumentError("stationary start requires |coefficient| < 1")
            if p["innovation_scale"] < 0:
                raise InvalidArgumentError("innovation_scale must be non-negative")
            check_count("burn_in", p["burn_in"], minimum=0)
        elif kind is ProcessKind.JUMP:
            if len(p["levels"]) != 2:
                raise InvalidArgumentError("jump levels must be a pair (before, after)")


# --------------------------------------------------------------------------- #
# Monte Carlo
# --------------------------------------------------------------------------- #
@dataclass(slots=True, eq=False)
class CellResult:
    """One (process, N) cell of a rejection-rate table."""
    kind: ProcessKind
    n: int
    trials: int
    replicates: int
    sided: Sidedness
    rejection_rate: float
    mean_p: float
    p_values: np.ndarray
    alpha: float = 0.05

    @property
    def rejections(self) -> int:
        return int(round(self.rejection_rate * self.trials))

    @property
    def standard_error(self) -> float:
        """Binomial standard error of the rejection rate."""
        rate = self.rejection_rate
        return math.sqrt(rate * (1.0 - rate) / self.trials)

    def histogram(self, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        counts, edges = np.histogram(self.p_values, bins=bins, range=(0.0, 1.0))
        return edges, counts


@dataclass(slots=True)
class MonteCarloReport:
    cells: list[CellResult]
    master_seed: int

    def cell(self, kind: ProcessKind | str, n: int) -> CellResult:
        kind = ProcessKind.parse(kind)
        for c in self.cells:
            if c.kind is kind and c.n == n:
                return c
        raise KeyError((kind, n))

    def pivot(self) -> tuple[list[int], list[ProcessKind], dict[tuple[int, ProcessKind], float]]:
        """Rearrange cells into the rows-by-length, columns-by-process table layout."""
        lengths = sorted({c.n for c in self.cells}, reverse=True)
        kinds = list(dict.fromkeys(c.kind for c in self.cells))
        rates = {(c.n, c.kind): c.rejection_rate for c in self.cells}
        return lengths, kinds, rates
