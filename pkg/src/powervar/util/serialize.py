import json
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Optional

import numpy as np

from powervar.core.models import TestResult


def simplify(obj):
    """
    Recursively convert numpy scalars/arrays and enums into plain built-in
    Python types so that printing or JSON serialising shows clean values.
    """
    if isinstance(obj, Enum):
        return obj.value

    if isinstance(obj, np.generic):
        return obj.item()

    if isinstance(obj, np.ndarray):
        return [simplify(v) for v in obj.tolist()]

    # Mapping
    if isinstance(obj, dict):
        return {k: simplify(v) for k, v in obj.items()}

    # Sequence (but not str/bytes)
    if isinstance(obj, (list, tuple, set)):
        return type(obj)(simplify(v) for v in obj)

    return obj


@dataclass(frozen=True, slots=True)
class ResultDocument:
    """Flat, JSON-ready rendering of a ``TestResult`` plus input metadata.

    The first thirteen fields are the stable output schema; the rest are
    additive. ``timestamp`` is only set on request so that repeated runs
    print byte-identical documents.
    """
    n: int
    omega_observed: float
    omega_expected: float
    q: Optional[float]
    r: Optional[float]
    p: float
    reject: bool
    tie_count: int
    B: int
    alpha: float
    sided: str
    seed: int
    demean: bool
    fast_path: bool = False
    label: str = "stationary"
    null_mean: Optional[float] = None
    null_variance: Optional[float] = None
    file: Optional[str] = None
    timestamp: Optional[str] = None

    @classmethod
    def from_result(
        cls,
        result: TestResult,
        file: str | None = None,
        timestamp: str | None = None,
    ) -> "ResultDocument":
        cfg = result.config
        return cls(
            n=result.n,
            omega_observed=result.omega_observed,
            omega_expected=result.omega_expected,
            q=result.q_value,
            r=result.r_value,
            p=result.p_value,
            reject=bool(result.reject),
            tie_count=result.tie_count,
            B=cfg.replicates,
            alpha=cfg.alpha,
            sided=cfg.sided.value,
            seed=cfg.seed,
            demean=cfg.demean,
            fast_path=result.fast_path,
            label=result.label.value,
            null_mean=result.null_mean,
            null_variance=result.null_variance,
            file=file,
            timestamp=timestamp,
        )

    def to_dict(self) -> dict[str, Any]:
        return simplify(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResultDocument":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    @classmethod
    def from_json(cls, text: str) -> "ResultDocument":
        return cls.from_dict(json.loads(text))
