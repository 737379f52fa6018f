from dataclasses import dataclass
from typing import Iterator

import numpy as np

from powervar.core.errors import InvalidArgumentError
from powervar.core.models import (
    ProcessKind,
    Sidedness,
    check_count,
    check_seed,
)
from powervar.settings import MONTECARLO_SETTINGS

# spawn-key tag separating bootstrap seeds from generation seeds ("test")
TEST_STREAM_TAG = int.from_bytes(b"test", "big")


def derive_seed(master_seed: int, *key: int) -> int:
    """64-bit seed for the substream ``(master_seed, *key)``.

    Trial t generates its signal from ``derive_seed(master, t)`` and draws its
    bootstrap phases from ``derive_seed(master, t, TEST_STREAM_TAG)``.
    """
    seq = np.random.SeedSequence(entropy=check_seed(master_seed), spawn_key=tuple(key))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def trial_seeds(master_seed: int, trial: int) -> tuple[int, int]:
    """(generation seed, bootstrap seed) for one Monte Carlo trial."""
    return derive_seed(master_seed, trial), derive_seed(master_seed, trial, TEST_STREAM_TAG)


@dataclass(frozen=True, slots=True)
class CellSpec:
    """What to run for one (process, N) cell."""
    kind: ProcessKind
    n: int
    trials: int
    replicates: int
    sided: Sidedness

    def __post_init__(self):
        object.__setattr__(self, "kind", ProcessKind.parse(self.kind))
        object.__setattr__(self, "sided", Sidedness.parse(self.sided))
        check_count("n", self.n, minimum=2)
        check_count("trials", self.trials)
        check_count("replicates", self.replicates)


def default_sided(kind: ProcessKind | str) -> Sidedness:
    return Sidedness.parse(MONTECARLO_SETTINGS.sided[ProcessKind.parse(kind).value])


def default_trials(kind: ProcessKind | str, full_scale: bool = False) -> int:
    """Size studies (ar1) default to more trials than power studies."""
    if full_scale:
        return MONTECARLO_SETTINGS.full_trials
    if ProcessKind.parse(kind) is ProcessKind.AR1:
        return MONTECARLO_SETTINGS.size_trials
    return MONTECARLO_SETTINGS.power_trials


@dataclass(frozen=True, slots=True)
class TableConfig:
    """A grid of cells: every process crossed with every length.

    ``processes``/``lengths`` left as ``None`` come from ``SETTINGS.montecarlo``
    when the table is built. ``trials``/``replicates`` left as ``None`` fall back
    to the desk-scale defaults (or to full scale with ``full_scale=True``).
    """
    processes: tuple | None = None
    lengths: tuple | None = None
    trials: int | None = None
    replicates: int | None = None
    master_seed: int = 0
    full_scale: bool = False
    sided: Sidedness | None = None

    def __post_init__(self):
        processes = MONTECARLO_SETTINGS.processes if self.processes is None else self.processes
        lengths = MONTECARLO_SETTINGS.lengths if self.lengths is None else self.lengths
        object.__setattr__(self, "processes", tuple(ProcessKind.parse(p) for p in processes))
        object.__setattr__(self, "lengths", tuple(check_count("n", n, 2) for n in lengths))
        if not self.processes or not self.lengths:
            raise InvalidArgumentError("the grid needs at least one process and one length")
        if self.trials is not None:
            check_count("trials", self.trials)
        if self.replicates is not None:
            check_count("replicates", self.replicates)
        if self.sided is not None:
            object.__setattr__(self, "sided", Sidedness.parse(self.sided))
        check_seed(self.master_seed)

    def cells(self) -> Iterator[CellSpec]:
        default_b = (
            MONTECARLO_SETTINGS.full_replicates if self.full_scale
            else MONTECARLO_SETTINGS.replicates
        )
        for kind in self.processes:
            for n in self.lengths:
                yield CellSpec(
                    kind=kind,
                    n=n,
                    trials=self.trials or default_trials(kind, self.full_scale),
                    replicates=self.replicates or default_b,
                    sided=self.sided or default_sided(kind),
                )

