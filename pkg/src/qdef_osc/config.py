"""Run configuration: defaults < key=value config file < command-line flags."""

import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError

NATURAL_UNITS_ENV = "QDEF_OSC_NATURAL_UNITS"


def natural_units_enabled(environ=None):
    env = os.environ if environ is None else environ
    raw = env.get(NATURAL_UNITS_ENV, "1").strip()
    if raw not in ("0", "1"):
        raise ConfigError(f"{NATURAL_UNITS_ENV} must be 0 or 1, got {raw!r}")
    return raw == "1"


def parse_config_text(text, source="<config>"):
    """Parse flat ``key = value`` lines; '#' starts a comment.  Values stay strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = (value.strip(), f"{source}:{lineno}")
    return out


def read_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


def parse_float(value, name, where="command line"):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: {name} must be a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{where}: {name} must be finite")
    return v


def parse_float_list(value, name, where="command line"):
    if isinstance(value, (list, tuple)):
        return [parse_float(v, name, where) for v in value]
    items = [s for s in str(value).replace(" ", "").split(",") if s]
    return [parse_float(s, name, where) for s in items]


def parse_int_list(value, name, where="command line"):
    vals = parse_float_list(value, name, where)
    if any(v != int(v) or v < 0 for v in vals):
        raise ConfigError(f"{where}: {name} must be non-negative integers")
    return [int(v) for v in vals]


def parse_ratio(value, name, where="command line"):
    """Accepts '4/3', '1.5' or '0.5*pi'-free plain numbers."""
    s = str(value).strip()
    if "/" in s:
        num, _, den = s.partition("/")
        return parse_float(num, name, where) / parse_float(den, name, where)
    return parse_float(s, name, where)


@dataclass
class RunConfig:
    """Fully resolved options for one subcommand."""

    command: str
    gamma: list = field(default_factory=list)  # dimensionless gamma_q * scale
    scale: float = 1.0
    m0: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    out: str = "out"
    format: str = "csv"
    samples: int = 2000
    tol: float = 1.0
    options: dict = field(default_factory=dict)
    natural_units: bool = True

    def validate(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        for name in ("scale", "m0", "omega0", "hbar", "tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if not (isinstance(self.samples, int) and self.samples >= 4):
            raise ConfigError(f"samples must be an integer >= 4, got {self.samples!r}")
        return self


def merge(defaults, file_values, cli_values):
    """Apply precedence CLI > file > defaults.  ``file_values`` maps key -> (string, location)."""
    merged = {k: (v, "default") for k, v in defaults.items()}
    for k, (v, loc) in file_values.items():
        if k not in defaults:
            raise ConfigError(f"{loc}: unknown key {k!r} (known: {', '.join(sorted(defaults))})")
        merged[k] = (v, loc)
    for k, v in cli_values.items():
        if v is not None:
            merged[k] = (v, "command line")
    return merged
