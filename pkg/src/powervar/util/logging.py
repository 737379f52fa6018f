import copy
import logging
from enum import Enum
from logging.config import dictConfig
from typing import Any, Mapping

import numpy as np

# attributes every LogRecord carries; anything else on a record came from `extra`
_RECORD_ATTRS = frozenset(
    logging.LogRecord("", logging.INFO, "", 0, "", None, None).__dict__
) | {"message", "asctime"}


def _render(value: Any) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, Enum):
        value = value.value
    if isinstance(value, float):
        return f"{value:.6g}"
    text = str(value)
    return f'"{text}"' if " " in text else text


class KeyValueFormatter(logging.Formatter):
    """
    Formatter that renders any 'extra' context added to the record as sorted
    key=value pairs at the end of the log line. Floats are shortened to six
    significant digits so p-values and power variances stay readable.
    """
    def format(self, record: logging.LogRecord) -> str:
        s = super().format(record)
        extras = {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRS}
        if extras:
            context_str = " ".join(f"{k}={_render(v)}" for k, v in sorted(extras.items()))
            s = f"{s} | {context_str}"
        return s


_DEFAULT_LOGGING_CONF = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "kv": {
            "()": KeyValueFormatter,
            "format": "%(asctime)s [%(levelname).1s] %(name)s | %(funcName)s | %(message)s"
        }
    },
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "formatter": "kv",
            "stream": "ext://sys.stderr",
        }
    },
    "loggers": {
        "powervar": {"level": "INFO", "handlers": ["stderr"]},
    },
}


def configure_logging(level: str | int = "INFO", **overrides) -> None:
    """
    Configure powervar's logger.

    Call this once in an application entry-point **or** rely on defaults.

    Args:
        level (str | int): Logging level to configure. Defaults to "INFO".
        **overrides: Top-level ``dictConfig`` sections replacing the defaults.
    """
    conf = copy.deepcopy(_DEFAULT_LOGGING_CONF)
    conf.update(overrides)
    conf["loggers"].setdefault("powervar", {"handlers": ["stderr"]})["level"] = level
    dictConfig(conf)


class RunAdapter(logging.LoggerAdapter):
    """
    Inject run context (kind, n, stage) so the handler/formatter
    never needs to know testing internals.
    """
    def process(self, msg: str, kwargs: Mapping[str, Any]):
        extra = dict(self.extra)
        extra.update(kwargs.pop("extra", {}))
        kwargs["extra"] = extra
        return msg, kwargs

    def bind(self, **ctx) -> "RunAdapter":
        """A child adapter carrying this adapter's context updated with ``ctx``."""
        return RunAdapter(self.logger, {**self.extra, **ctx})


def get_logger(name: str, **ctx) -> RunAdapter:
    base = logging.getLogger(name)
    # placeholders so every line carries the same keys
    defaults = {"kind": "-", "n": "-", "stage": "-"}
    defaults.update(ctx)
    return RunAdapter(base, defaults)
