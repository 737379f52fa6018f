"""
Monte Carlo engine statistics.
"""

import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from powervar.core.models import TestResult


@dataclass
class EngineStats:
    # ---- Lifecycle counts ----
    cells_started: int = 0
    cells_completed: int = 0
    trials_started: int = 0
    trials_completed: int = 0

    # ---- Concurrency ----
    in_flight: int = 0

    # ---- Outcomes ----
    rejections: int = 0
    fast_path_hits: int = 0
    rejections_by_kind: defaultdict[str, int] = field(default_factory=lambda: defaultdict(int))

    # ---- Trial timing feedback ----
    trial_samples: int = 0
    trial_time_ewma: float = 0.0
    min_trial_time: Optional[float] = None
    max_trial_time: Optional[float] = None

    # ---- Errors ----
    errors_by_kind: defaultdict[str, int] = field(default_factory=lambda: defaultdict(int))

    def on_trial_start(self) -> float:
        self.trials_started += 1
        self.in_flight += 1
        return time.monotonic()

    def on_trial_end(self, kind: str, started: float, result: TestResult) -> None:
        """Update counters and the trial-time EWMA once a trial returns."""
        self.in_flight -= 1
        elapsed = time.monotonic() - started
        self.trial_samples += 1
        # EWMA update: alpha = 0.3
        alpha = 0.3
        self.trial_time_ewma = (alpha * elapsed) + ((1 - alpha) * self.trial_time_ewma)
        self.min_trial_time = elapsed if self.min_trial_time is None \
            else min(self.min_trial_time, elapsed)
        self.max_trial_time = elapsed if self.max_trial_time is None \
            else max(self.max_trial_time, elapsed)

        if result.reject:
            self.rejections += 1
            self.rejections_by_kind[kind] += 1
        if result.fast_path:
            self.fast_path_hits += 1
        self.trials_completed += 1

    def on_trial_error(self, kind: str) -> None:
        self.in_flight -= 1
        self.errors_by_kind[kind] += 1
