from powervar.core.runtime.engine import MonteCarloEngine

__all__ = [
    'MonteCarloEngine',
]
