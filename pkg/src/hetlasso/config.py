"""Run configuration: a flat ``key = value`` text format.

Blank lines and ``#`` comments are ignored. Lists are comma separated and
may contain inclusive ranges ``a..b`` (``mean_lags = 1..700``). Booleans are
``true``/``false``. The empty value means "unset" for optional keys.
Unknown keys are an error. A relative ``input`` path given in a file is
resolved against the directory of that file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from .exceptions import ConfigError

COMMANDS = ("fit", "simulate", "bench-inclusion", "bench-mae", "bench-trend")


@dataclass
class RunConfig:
    command: str = "fit"
    input: str | None = None
    out: str = "out"
    seed: int = 0
    threads: int | None = None          # None: all cores
    # mean equation
    mean_lags: tuple[int, ...] = (1, 2, 3, 4, 5)
    intercept: bool = True
    tau: float = 0.0
    beta_init: str = "auto"
    # lambda: empty lambda_num means a data-driven grid
    lambda_log2_hi: float = -4.0
    lambda_log2_lo: float = -18.0
    lambda_num: int | None = None
    lambda_scale: str = "per-observation"
    criterion: str = "bic"
    weighted_ic: bool = True
    # volatility
    delta: float = 1.0
    vol_lags: tuple[int, ...] = (1, 2)
    threshold: bool = False
    # iterations
    k_max: int = 3
    stop_epsilon: float | None = 0.0
    # simulation / Monte Carlo
    dgp: str = "arch"
    n: int = 600
    n_values: tuple[int, ...] = (300, 600, 1200)
    N: int = 200
    full_scale: bool = False
    k_list: tuple[int, ...] = (1, 2, 3, 4)
    oracle: bool = True
    burn_in: int = 5000

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.criterion.lower() not in ("aic", "hqc", "bic"):
            raise ConfigError(f"criterion must be aic, hqc or bic, got {self.criterion!r}")
        if self.dgp not in ("arch", "tarch"):
            raise ConfigError(f"dgp must be arch or tarch, got {self.dgp!r}")
        if self.N < 1 or self.n < 1 or self.k_max < 1:
            raise ConfigError("N, n and k_max must be >= 1")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @property
    def replications(self) -> int:
        return 1000 if self.full_scale else self.N


def _field_types() -> dict[str, str]:
    return {f.name: str(f.type) for f in fields(RunConfig)}


def _parse_int_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_value(key: str, text: str) -> Any:
    types = _field_types()
    if key not in types:
        raise ConfigError(f"unknown config key {key!r}")
    kind = types[key]
    text = text.strip()
    optional = "None" in kind
    if optional and text == "":
        return None
    try:
        if kind.startswith("tuple"):
            return _parse_int_list(text)
        if kind.startswith("bool"):
            return _parse_bool(text)
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return _compress(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _compress(values: tuple[int, ...]) -> str:
    parts, i = [], 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[j + 1] == values[j] + 1:
            j += 1
        parts.append(f"{values[i]}..{values[j]}" if j - i >= 2 else ",".join(map(str, values[i:j + 1])))
        i = j + 1
    return ",".join(parts)


def parse_config_text(text: str, source: str = "<string>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = parse_value(key, val)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Read ``path`` (may be None) and apply ``overrides`` (flags win)."""
    values: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        values = parse_config_text(text, str(p))
        # a relative input path in a config file is relative to that file
        if values.get("input") and not Path(values["input"]).is_absolute():
            values["input"] = str(p.parent / values["input"])
    for key, val in (overrides or {}).items():
        if key not in _field_types():
            raise ConfigError(f"unknown config key {key!r}")
        if val is not None:
            values[key] = val
    return RunConfig(**values)


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{k} = {format_value(v)}".rstrip() + "\n" for k, v in dataclasses.asdict(cfg).items())
