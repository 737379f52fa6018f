import pytest

from powervar.core.models import Sidedness, TestConfig
from powervar.settings import (
    HYPOTHESIS_SETTINGS,
    MONTECARLO_SETTINGS,
    SETTINGS,
    SURROGATE_SETTINGS,
    AttrDict,
)


def test_attr_access_matches_item_access():
    assert SETTINGS.hypothesis.replicates == SETTINGS["hypothesis"]["replicates"]
    assert HYPOTHESIS_SETTINGS is SETTINGS.hypothesis


def test_nested_dicts_are_converted():
    d = AttrDict({"a": {"b": {"c": 1}}, "l": [{"x": 2}]})
    assert d.a.b.c == 1
    assert d.l[0].x == 2
    d["new"] = {"y": 3}
    assert d.new.y == 3


def test_missing_attribute_raises_attribute_error():
    with pytest.raises(AttributeError):
        SETTINGS.nope


def test_montecarlo_defaults():
    assert tuple(MONTECARLO_SETTINGS.lengths) == (10, 20, 50, 100, 200, 500, 1000)
    assert MONTECARLO_SETTINGS.sided.jump == "high_tail"
    assert MONTECARLO_SETTINGS.fast_path is False


def test_override_restores_previous_values():
    before = HYPOTHESIS_SETTINGS.replicates
    with HYPOTHESIS_SETTINGS.override(replicates=17, sided="high_tail"):
        config = TestConfig()
        assert config.replicates == 17
        assert config.sided is Sidedness.HIGH_TAIL
    assert HYPOTHESIS_SETTINGS.replicates == before
    assert TestConfig().replicates == before


def test_override_restores_after_error():
    before = SURROGATE_SETTINGS.chunk_size
    with pytest.raises(RuntimeError):
        with SURROGATE_SETTINGS.override(chunk_size=3):
            raise RuntimeError("boom")
    assert SURROGATE_SETTINGS.chunk_size == before


def test_override_converts_nested_dicts():
    with SETTINGS.override(cli={"seed_env": "X", "default_seed": 5}):
        assert SETTINGS.cli.default_seed == 5
    assert SETTINGS.cli.seed_env == "POWERVAR_SEED"


def test_override_rejects_unknown_keys():
    with pytest.raises(KeyError):
        with HYPOTHESIS_SETTINGS.override(replicats=10):
            pass
