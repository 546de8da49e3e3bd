import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from core.errors import ConfigError

"""
Helpers for reading the JSON configuration tree. Every reader takes the dotted
path of the value it reads so errors point at the offending key.
"""


def join(path: str, key: str | int) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def check_keys(data: Any, allowed: Iterable[str], path: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError(path, f"expected an object, got {type(data).__name__}")
    allowed = set(allowed)
    for key in data:
        if key not in allowed:
            raise ConfigError(join(path, key), "unknown key")
    return data


def read_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return float(value)


def read_int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value}")
    return value


def read_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(path, f"expected true or false, got {value!r}")
    return value


def read_numbers(value: Any, path: str, count: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigError(path, f"expected a list, got {value!r}")
    if count is not None and len(value) != count:
        raise ConfigError(path, f"expected {count} values, got {len(value)}")
    return tuple(read_number(v, join(path, i)) for i, v in enumerate(value))


@dataclass(frozen=True)
class Range:
    """
    Closed sampling interval. A scalar in the config is the range [v, v].
    """

    low: float
    high: float

    def __post_init__(self) -> None:
        assert self.low <= self.high, f"Reversed range [{self.low}, {self.high}]"

    @staticmethod
    def fixed(value: float) -> "Range":
        return Range(value, value)

    def sample(self, rng: np.random.Generator) -> float:
        # A degenerate range still consumes a draw, keeping later draws aligned
        return float(rng.uniform(self.low, self.high))

    def serialize(self) -> list[float]:
        return [self.low, self.high]

    @staticmethod
    def deserialize(value: Any, path: str) -> "Range":
        if isinstance(value, list):
            low, high = read_numbers(value, path, 2)
            if not low <= high:
                raise ConfigError(path, f"range [{low}, {high}] has low above high")
            return Range(low, high)
        return Range.fixed(read_number(value, path))
