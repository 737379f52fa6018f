from . import settings
from .core.generators import generate
from .core.hypothesis import run_test, run_tests
from .core.models import ComplexSignal, ProcessSpec, TestConfig, TestResult
from .core.runtime.engine import (
    montecarlo_async,
    montecarlo_blocking,
    montecarlo_blocking_iter,
    run_cell,
    run_table,
)
from .util.logging import configure_logging

__all__ = [
    'run_test',
    'run_tests',
    'generate',
    'run_cell',
    'run_table',
    'montecarlo_async',
    'montecarlo_blocking',
    'montecarlo_blocking_iter',
    'ComplexSignal',
    'ProcessSpec',
    'TestConfig',
    'TestResult',
    'configure_logging',
    'settings',
]
