"""
Settings for powervar.

These settings are global and can be accessed from any module in the powervar package.

They are typically used by various modules as fallbacks for function and class
initializer arguments left as ``None``.

The SETTINGS dict structure follows the structure of powervar submodules.

Expected usage behavior:

```python
from powervar.settings import SETTINGS

HYPOTHESIS_SETTINGS = SETTINGS.hypothesis
```

Once initialized, the settings are expected to be immutable (not enforced);
use ``AttrDict.override`` to change a section for the duration of a block.
"""

import os
from contextlib import contextmanager

SETTINGS = {
    'spectral': {
        # passed to scipy.fft; None lets scipy decide (single thread)
        'workers': None,
    },
    'surrogate': {
        'chunk_size': 128,
        'workers': 1,
    },
    'hypothesis': {
        'replicates': 1000,
        'alpha': 0.05,
        'sided': 'two_sided',
        'fast_path': True,
        'demean': False,
        'tie_rtol': 1e-9,
    },
    'generators': {
        'ar1': {
            'coefficient': 0.9,
            'innovation_scale': 0.1,
            'init': 'stationary',   # or 'burn_in'
            'burn_in': 1000,
        },
        'jump': {
            'levels': (1.0, 3.0),
            'noise_scale': 1.0,
        },
        'cyclo': {
            'amplitude': 1.0,
            'omega': 10.0,
            'noise_scale': 1.0,
        },
    },
    'montecarlo': {
        'processes': ('ar1', 'jump', 'cyclo'),
        'lengths': (10, 20, 50, 100, 200, 500, 1000),
        'size_trials': 1000,
        'power_trials': 500,
        'replicates': 500,
        'full_trials': 10_000,
        'full_replicates': 1000,
        'sided': {
            'ar1': 'two_sided',
            'jump': 'high_tail',
            'cyclo': 'low_tail',
        },
        # off so exported p-value histograms are the bootstrap ones
        'fast_path': False,
        'histogram_bins': 20,
        'concurrency': os.cpu_count() or 1,
    },
    'cli': {
        'seed_env': 'POWERVAR_SEED',
        'default_seed': 0,
    },
}


class AttrDict(dict):
    """
    A dictionary subclass that allows dot-notation access while
    recursively converting nested dictionaries.
    """
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Point the instance __dict__ to itself to allow attribute access
        self.__dict__ = self
        for key, value in self.items():
            self[key] = self._convert(value)

    @classmethod
    def _convert(cls, value):
        """Recursively converts dicts to AttrDicts, leaving other types alone."""
        if isinstance(value, dict) and not isinstance(value, AttrDict):
            return cls(value)
        elif isinstance(value, list):
            return [cls._convert(item) for item in value]
        return value

    def __setitem__(self, key, value):
        super().__setitem__(key, self._convert(value))

    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError as exc:
            raise AttributeError(f"AttrDict object has no attribute '{key}'") from exc

    @contextmanager
    def override(self, **values):
        """Temporarily replace existing keys; unknown keys raise ``KeyError``."""
        unknown = set(values) - set(self)
        if unknown:
            raise KeyError(f"unknown settings: {sorted(unknown)}")
        saved = {key: self[key] for key in values}
        self.update({key: self._convert(value) for key, value in values.items()})
        try:
            yield self
        finally:
            self.update(saved)


SETTINGS = AttrDict(SETTINGS)
SPECTRAL_SETTINGS = SETTINGS.spectral
SURROGATE_SETTINGS = SETTINGS.surrogate
HYPOTHESIS_SETTINGS = SETTINGS.hypothesis
GENERATOR_SETTINGS = SETTINGS.generators
MONTECARLO_SETTINGS = SETTINGS.montecarlo
CLI_SETTINGS = SETTINGS.cli
