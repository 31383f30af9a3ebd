"""Flat ``key = value`` configuration files for the command-line driver.

Syntax, one entry per line, ``#`` starts a comment::

    preset = fig1              # base parameter set: fig1 | fig3
    mode = reproduction        # or first_principles
    g_scale = 1.0              # reproduction mode: G_j = g_scale * g_j
    r_d = 0.25                 # any PhysicalParams field overrides the preset
    delta_theta = pi           # reservoir phase relative to theta_d
    sweep.theta_d = linspace(0, 4*pi, 64)
    sweep.r_d = [0, 0.25]
    cap = 1e7                  # maximum number of sweep rows
    wigner.pairs = Q1:P1 Q2:P2 P1:P2
    wigner.points = 201
    wigner.half_width = 6      # omit for 6 x the largest semi-axis

Numeric values are arithmetic expressions over numbers and ``pi``. Lists use
``[a, b, ...]``; ``linspace(start, stop, n)`` is also accepted. Sweep axes
(``sweep.<name>``) are iterated in file order, the first one slowest.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .params import PRESETS, PhysicalParams

__all__ = ["SweepConfig", "parse_config", "load_config", "AXIS_NAMES", "DEFAULT_CAP"]

AXIS_NAMES = ("delta_c", "r_d", "theta_d", "r_e", "theta_e", "delta_theta", "delta_r", "phi", "chi")
DEFAULT_CAP = 10_000_000
PARAM_KEYS = tuple(f.name for f in fields(PhysicalParams) if f.name != "low_quality_factor")
SUGAR_KEYS = ("delta_theta", "delta_r")
ALL_PAIRS = tuple(
    (a, b) for i, a in enumerate(("X", "Y", "Q1", "P1", "Q2", "P2"))
    for b in ("X", "Y", "Q1", "P1", "Q2", "P2")[i + 1:]
)

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi}


@dataclass
class SweepConfig:
    base: PhysicalParams
    overrides: dict = field(default_factory=dict)
    axes: list = field(default_factory=list)  # [(name, [values...]), ...]
    mode: str = "reproduction"
    g_scale: float = 1.0
    preset: str = "fig1"
    output_format: str = "csv"
    threads: int = 1
    cap: int = DEFAULT_CAP
    wigner_pairs: tuple = ALL_PAIRS
    wigner_points: int = 201
    wigner_half_width: float | None = None

    @property
    def n_rows(self):
        return math.prod(len(v) for _, v in self.axes) if self.axes else 1

    def point_changes(self, values):
        """Parameter changes for one sweep row given its axis values."""
        changes = dict(self.overrides)
        for (name, _), v in zip(self.axes, values):
            changes[name] = v
        return changes


def _eval_number(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_number(node.left), _eval_number(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_number(node.operand))
    raise ConfigError(f"unsupported expression: {ast.dump(node)}")


def _eval_value(text):
    try:
        node = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse value {text!r}") from exc
    try:
        if isinstance(node, ast.List):
            return [_eval_number(e) for e in node.elts]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
                and node.func.id == "linspace":
            if len(node.args) != 3 or node.keywords:
                raise ConfigError("linspace takes (start, stop, n)")
            a, b, n = (_eval_number(x) for x in node.args)
            if n < 1 or n != int(n):
                raise ConfigError("linspace count must be a positive integer")
            return [float(v) for v in np.linspace(a, b, int(n))]
        return _eval_number(node)
    except (ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"cannot evaluate {text!r}: {exc}") from exc


def _scalar(key, text):
    v = _eval_value(text)
    if isinstance(v, list):
        raise ConfigError(f"{key} takes a single value")
    if not math.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    return v


def _parse_pairs(text):
    pairs = []
    for tok in text.replace(",", " ").split():
        parts = tok.split(":")
        if len(parts) != 2 or parts[0] == parts[1]:
            raise ConfigError(f"bad quadrature pair {tok!r}; use e.g. Q1:P1")
        for p in parts:
            if p not in ("X", "Y", "Q1", "P1", "Q2", "P2"):
                raise ConfigError(f"unknown quadrature {p!r}")
        pairs.append(tuple(parts))
    if not pairs:
        raise ConfigError("wigner.pairs is empty")
    return tuple(pairs)


def parse_config(text: str) -> SweepConfig:
    """Parse configuration text. Raises :class:`ConfigError` on any problem."""
    raw = {}
    order = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
        order.append(key)

    cfg = {}
    overrides = {}
    axes = []
    for key in order:
        val = raw[key]
        if key == "preset":
            if val not in PRESETS:
                raise ConfigError(f"unknown preset {val!r}; choose from {sorted(PRESETS)}")
            cfg["preset"] = val
        elif key == "mode":
            if val not in ("reproduction", "first_principles"):
                raise ConfigError(f"mode must be reproduction or first_principles, got {val!r}")
            cfg["mode"] = val
        elif key == "format":
            if val not in ("csv", "json"):
                raise ConfigError("format must be csv or json")
            cfg["output_format"] = val
        elif key == "threads":
            n = _scalar(key, val)
            if n < 1 or n != int(n):
                raise ConfigError("threads must be a positive integer")
            cfg["threads"] = int(n)
        elif key == "g_scale":
            cfg["g_scale"] = _scalar(key, val)
        elif key == "cap":
            n = _scalar(key, val)
            if n < 1:
                raise ConfigError("cap must be >= 1")
            cfg["cap"] = int(n)
        elif key == "wigner.pairs":
            cfg["wigner_pairs"] = _parse_pairs(val)
        elif key == "wigner.points":
            n = _scalar(key, val)
            if n < 2 or n != int(n):
                raise ConfigError("wigner.points must be an integer >= 2")
            cfg["wigner_points"] = int(n)
        elif key == "wigner.half_width":
            w = _scalar(key, val)
            if w <= 0:
                raise ConfigError("wigner.half_width must be > 0")
            cfg["wigner_half_width"] = w
        elif key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in AXIS_NAMES:
                raise ConfigError(f"unknown sweep axis {name!r}; allowed: {', '.join(AXIS_NAMES)}")
            values = _eval_value(val)
            values = values if isinstance(values, list) else [values]
            if not values:
                raise ConfigError(f"sweep axis {name} has no values")
            axes.append((name, values))
        elif key in PARAM_KEYS or key in SUGAR_KEYS:
            overrides[key] = _scalar(key, val)
        else:
            raise ConfigError(f"unknown key {key!r}")

    axis_names = [a for a, _ in axes]
    for name in axis_names:
        if name in overrides:
            raise ConfigError(f"{name} is both fixed and swept")
    names = set(axis_names) | set(overrides)
    for sugar, target in (("delta_theta", "theta_e"), ("delta_r", "r_e")):
        if sugar in names and target in names:
            raise ConfigError(f"give either {sugar} or {target}, not both")
    if "opa_pump" in names and "r_d" in names:
        raise ConfigError("give either opa_pump or r_d, not both")

    preset = cfg.get("preset", "fig1")
    try:
        base = PRESETS[preset].with_changes(**overrides)
    except ValueError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc
    out = SweepConfig(base=base, overrides=overrides, axes=axes, **cfg)
    if out.n_rows > out.cap:
        raise ConfigError(f"sweep has {out.n_rows} rows, above the cap of {out.cap}")
    return out


def load_config(path) -> SweepConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
