"""INI-style run configuration: parse, validate, render.

A run file has up to four sections.  Only ``[model]`` is required::

    [model]
    lengths = 1, 2, 3
    alpha = 1.0
    beta = 1.0
    gamma = 1.0
    response = identity      ; identity | tanh | signum
    saturation = sum         ; sum | max

    [run]
    x0 = 0.1, 0.2, 0.3
    dt = 0.02
    steps = 2000
    scheme = euler           ; euler | rk4 | exact | asymptotic
    positivity = reject      ; reject | clamp-epsilon

    [outputs]
    trajectory = out.csv
    source_column = no

    [analysis]
    window = 20.0, 39.2      ; gain-scaled fit window
    threshold = 0.05

``parse_config`` collects every problem it can find and raises one
``ConfigError`` listing all of them, so a bad file is fixed in one pass.
``render_config(load)`` and ``parse_config(render)`` round-trip exactly.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .models import GKind, ModelSpec, PathSystem, PhiKind
from .simulate import PositivityPolicy, Scheme

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "render_config"]


class ConfigError(ValueError):
    """Raised for unreadable, malformed, or semantically invalid run files."""


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of a run file, with defaults filled in."""

    lengths: tuple[float, ...]
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    response: str = "identity"
    saturation: str = "sum"
    x0: Optional[tuple[float, ...]] = None
    dt: float = 0.02
    steps: int = 2000
    scheme: str = "euler"
    positivity: str = "reject"
    trajectory: Optional[str] = None
    source_column: bool = False
    window: Optional[tuple[float, float]] = None
    threshold: float = 0.05

    def model(self) -> ModelSpec:
        return ModelSpec(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            phi_kind=PhiKind(self.saturation),
            g_kind=GKind(self.response),
            paths=PathSystem.from_lengths(self.lengths),
        )

    def initial_state(self) -> np.ndarray:
        """Initial state in canonical (weight-sorted) component order."""
        if self.x0 is None:
            return np.ones(len(self.lengths))
        return PathSystem.from_lengths(self.lengths).to_canonical(np.asarray(self.x0))


_KNOWN = {
    "model": ("lengths", "alpha", "beta", "gamma", "response", "saturation"),
    "run": ("x0", "dt", "steps", "scheme", "positivity"),
    "outputs": ("trajectory", "source_column"),
    "analysis": ("window", "threshold"),
}

_BOOL = {"yes": True, "true": True, "1": True, "no": False, "false": False, "0": False}


class _Collector:
    """Accumulates option values and problems while walking a parsed file."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser
        self.errors: list[str] = []
        self.values: dict[str, object] = {}

    def complain(self, section: str, option: str, message: str) -> None:
        self.errors.append(f"[{section}] {option}: {message}")

    def take(self, section, option, convert, default=None) -> None:
        if not self.parser.has_option(section, option):
            if default is not None:
                self.values[option] = default
            return
        raw = self.parser.get(section, option).strip()
        try:
            self.values[option] = convert(raw)
        except ValueError as exc:
            self.complain(section, option, str(exc))


def _float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"expected a number, got {raw!r}")
    if not np.isfinite(value):
        raise ValueError(f"expected a finite number, got {raw!r}")
    return value


def _int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"expected an integer, got {raw!r}")


def _float_list(raw: str) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(_float(p) for p in parts)


def _pair(raw: str) -> tuple[float, float]:
    values = _float_list(raw)
    if len(values) != 2:
        raise ValueError(f"expected exactly two numbers, got {len(values)}")
    return values  # type: ignore[return-value]


def _choice(allowed: tuple[str, ...]):
    def convert(raw: str) -> str:
        if raw not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}; got {raw!r}")
        return raw

    return convert


def _bool(raw: str) -> bool:
    try:
        return _BOOL[raw.lower()]
    except KeyError:
        raise ValueError(f"expected yes/no, got {raw!r}")


def parse_config(text: str, origin: str = "<config>") -> RunConfig:
    """Parse and validate run-file text; raise ConfigError listing every problem."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from exc

    col = _Collector(parser)
    for section in parser.sections():
        if section not in _KNOWN:
            col.errors.append(f"unknown section [{section}]")
            continue
        for option in parser.options(section):
            if option not in _KNOWN[section]:
                col.errors.append(f"[{section}] unknown option {option!r}")

    if not parser.has_section("model"):
        col.errors.append("missing required section [model]")
    if parser.has_option("model", "lengths"):
        col.take("model", "lengths", _float_list)
    elif parser.has_section("model"):
        col.errors.append("[model] lengths: required option is missing")

    col.take("model", "alpha", _float)
    col.take("model", "beta", _float)
    col.take("model", "gamma", _float)
    col.take("model", "response", _choice(tuple(k.value for k in GKind)))
    col.take("model", "saturation", _choice(tuple(k.value for k in PhiKind)))
    col.take("run", "x0", _float_list)
    col.take("run", "dt", _float)
    col.take("run", "steps", _int)
    col.take("run", "scheme", _choice(tuple(s.value for s in Scheme)))
    col.take("run", "positivity", _choice(tuple(p.value for p in PositivityPolicy)))
    col.take("outputs", "trajectory", str)
    col.take("outputs", "source_column", _bool)
    col.take("analysis", "window", _pair)
    col.take("analysis", "threshold", _float)

    if col.errors:
        raise ConfigError(f"{origin}:\n  " + "\n  ".join(col.errors))

    config = RunConfig(**col.values)  # type: ignore[arg-type]
    semantic = _semantic_errors(config)
    if semantic:
        raise ConfigError(f"{origin}:\n  " + "\n  ".join(semantic))
    return config


def _semantic_errors(config: RunConfig) -> list[str]:
    errors = []
    if any(v <= 0 or not np.isfinite(v) for v in config.lengths):
        errors.append("[model] lengths: all path lengths must be positive and finite")
    for name in ("alpha", "beta", "gamma"):
        if getattr(config, name) <= 0:
            errors.append(f"[model] {name}: must be positive")
    if config.x0 is not None:
        if len(config.x0) != len(config.lengths):
            errors.append(
                f"[run] x0: expected {len(config.lengths)} entries to match lengths, "
                f"got {len(config.x0)}"
            )
        elif any(v <= 0 for v in config.x0):
            errors.append("[run] x0: all components must be positive")
    if config.dt <= 0:
        errors.append("[run] dt: must be positive")
    if config.steps < 0:
        errors.append("[run] steps: must be nonnegative")
    if config.scheme in ("exact", "asymptotic"):
        if config.response != "identity" or config.saturation != "sum":
            errors.append(
                f"[run] scheme: {config.scheme!r} requires response=identity "
                "and saturation=sum"
            )
    if config.window is not None and not config.window[0] < config.window[1]:
        errors.append("[analysis] window: start must be strictly before end")
    if config.threshold <= 0 or config.threshold >= 1:
        errors.append("[analysis] threshold: must lie strictly between 0 and 1")
    return errors


def load_config(path) -> RunConfig:
    """Read a run file from disk; raise ConfigError if unreadable or invalid."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, origin=str(path))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


def render_config(config: RunConfig) -> str:
    """Render a RunConfig back to run-file text; inverse of parse_config."""
    by_option = {}
    for f in fields(config):
        by_option[f.name] = getattr(config, f.name)
    lines = []
    for section, options in _KNOWN.items():
        body = []
        for option in options:
            value = by_option[option]
            if value is None:
                continue
            body.append(f"{option} = {_fmt(value)}")
        if body:
            lines.append(f"[{section}]")
            lines.extend(body)
            lines.append("")
    return "\n".join(lines)
