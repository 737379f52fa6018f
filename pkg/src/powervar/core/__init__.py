from powervar.core.hypothesis import run_test, run_tests
from powervar.core.runtime.engine import (
    MonteCarloEngine,
    montecarlo_async,
    montecarlo_blocking,
    montecarlo_blocking_iter,
)

__all__ = [
    'run_test',
    'run_tests',
    'montecarlo_async',
    'montecarlo_blocking',
    'montecarlo_blocking_iter',
    'MonteCarloEngine',
]
