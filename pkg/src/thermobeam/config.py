"""Flat key=value run configuration: parsing, validation, serialization, presets.

A configuration file holds one `key = value` pair per line ('#' starts a
comment).  Physical coefficients use the same names as ModelParams fields;
decimal and scientific notation are both accepted.  The time step is given
either directly (dt) or as a fraction of the element size (dt_ratio).
Initial data comes from a builtin selector (`initial = default` is the cubic
bump x^2 (1 - x) on every field, `initial = zero` the rest state) or from
per-field expressions in x, e.g. `theta0 = sin(pi*x)`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .energy import LyapunovConfig
from .errors import ParseError, ValidationError
from .model import InitialData, ModelParams, Variant, validate

PARAM_KEYS = ("rho1", "rho2", "kappa", "alpha", "xi1", "xi2",
              "c_cap", "d_cap", "r_cap", "k_theta", "h_diff")
INITIAL_KEYS = InitialData.FIELDS
BUILTIN_PROFILES = ("default", "zero")

_EXPR_NAMES = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "abs": abs, "pi": math.pi, "e": math.e,
}


def compile_profile(expression: str) -> Callable[[float], float]:
    """Compile a one-variable expression in x into a callable profile."""
    try:
        code = compile(expression, "<profile>", "eval")
    except SyntaxError as exc:
        raise ParseError(f"bad profile expression {expression!r}: {exc.msg}") from exc
    for name in code.co_names:
        if name not in _EXPR_NAMES and name != "x":
            raise ParseError(f"profile expression {expression!r} uses unknown name {name!r}")

    def profile(x: float) -> float:
        return float(eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, "x": x}))

    return profile


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation run needs, as parsed from a config file."""

    params: ModelParams
    s: int
    t_final: float
    dt_value: Optional[float] = None
    dt_ratio: Optional[float] = None
    initial: dict = field(default_factory=lambda: {"builtin": "default"})
    output_dir: str = "out"
    emit_fields: bool = True
    snapshot_stride: int = 1
    lyapunov: LyapunovConfig = field(default_factory=LyapunovConfig)
    accel_seed: str = "consistent"

    @property
    def dt(self) -> float:
        if self.dt_value is not None:
            return self.dt_value
        return self.dt_ratio * self.params.length / self.s

    def initial_data(self) -> InitialData:
        builtin = self.initial.get("builtin")
        if builtin == "default":
            base = InitialData.cubic_bump()
        elif builtin == "zero":
            base = InitialData.zero()
        else:
            base = InitialData.zero()
        profiles = {}
        for name in INITIAL_KEYS:
            if name in self.initial:
                profiles[name] = compile_profile(self.initial[name])
            else:
                profiles[name] = getattr(base, name)
        return InitialData(**profiles)


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "on": True,
                "false": False, "no": False, "0": False, "off": False}

_KNOWN_KEYS = set(PARAM_KEYS) | set(INITIAL_KEYS) | {
    "mu", "variant", "length", "s", "dt", "dt_ratio", "t_final", "initial",
    "output_dir", "emit_fields", "snapshot_stride", "lyap_n", "lyap_n1",
    "accel_seed",
}


def _parse_float(key: str, raw: str, line: int) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"line {line}: key {key!r} needs a number, got {raw!r}") from None


def _parse_int(key: str, raw: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"line {line}: key {key!r} needs an integer, got {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate config text; raise ParseError/ValidationError."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected key = value, got {raw_line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ParseError(f"line {lineno}: key {key!r} has no value")
        entries[key] = (value, lineno)
    return build_config(entries)


def build_config(entries: dict[str, tuple[str, int]]) -> RunConfig:
    violations: list[str] = []

    def take(key: str):
        return entries.pop(key, None)

    raw_variant = take("variant")
    if raw_variant is None:
        violations.append("variant: missing (undamped, rotation_damped or displacement_damped)")
        variant = Variant.UNDAMPED
    else:
        try:
            variant = Variant.parse(raw_variant[0])
        except ValueError as exc:
            raise ParseError(f"line {raw_variant[1]}: {exc}") from None

    values: dict[str, float] = {}
    for key in PARAM_KEYS:
        item = take(key)
        if item is None:
            violations.append(f"{key}: missing")
        else:
            values[key] = _parse_float(key, item[0], item[1])

    mu_item = take("mu")
    if mu_item is not None:
        mu = _parse_float("mu", mu_item[0], mu_item[1])
    else:
        mu = 0.0 if variant is Variant.UNDAMPED else 1.0

    length_item = take("length")
    length = _parse_float("length", *length_item) if length_item else 1.0

    params = None
    if not violations:
        params = ModelParams(**values, mu=mu, variant=variant, length=length)
        report = validate(params)
        violations.extend(f"{c.name}: {c.detail}" for c in report.failures())

    s_item = take("s")
    if s_item is None:
        violations.append("s: missing (number of elements)")
        s = 2
    else:
        s = _parse_int("s", s_item[0], s_item[1])
        if s < 2:
            violations.append(f"s: must be >= 2, got {s}")

    t_item = take("t_final")
    if t_item is None:
        violations.append("t_final: missing")
        t_final = 1.0
    else:
        t_final = _parse_float("t_final", t_item[0], t_item[1])
        if not t_final > 0.0:
            violations.append(f"t_final: must be > 0, got {t_final}")

    dt_item, ratio_item = take("dt"), take("dt_ratio")
    dt_value = _parse_float("dt", dt_item[0], dt_item[1]) if dt_item else None
    dt_ratio = _parse_float("dt_ratio", ratio_item[0], ratio_item[1]) if ratio_item else None
    if dt_value is None and dt_ratio is None:
        dt_ratio = 0.5
    if dt_value is not None and dt_ratio is not None:
        violations.append("dt/dt_ratio: give one or the other, not both")
    if dt_value is not None and not dt_value > 0.0:
        violations.append(f"dt: must be > 0, got {dt_value}")
    if dt_ratio is not None and not dt_ratio > 0.0:
        violations.append(f"dt_ratio: must be > 0, got {dt_ratio}")

    initial_item = take("initial")
    initial: dict = {}
    if initial_item is not None:
        if initial_item[0] not in BUILTIN_PROFILES:
            raise ParseError(
                f"line {initial_item[1]}: initial must be one of {BUILTIN_PROFILES}, "
                f"got {initial_item[0]!r}")
        initial["builtin"] = initial_item[0]
    else:
        initial["builtin"] = "default"
    for name in INITIAL_KEYS:
        item = take(name)
        if item is not None:
            compile_profile(item[0])  # syntax check now, with line-free message
            initial[name] = item[0]

    out_item = take("output_dir")
    output_dir = out_item[0] if out_item else "out"

    emit_item = take("emit_fields")
    if emit_item is not None:
        if emit_item[0].lower() not in _BOOL_VALUES:
            raise ParseError(f"line {emit_item[1]}: emit_fields must be a boolean")
        emit_fields = _BOOL_VALUES[emit_item[0].lower()]
    else:
        emit_fields = True

    stride_item = take("snapshot_stride")
    snapshot_stride = _parse_int("snapshot_stride", *stride_item) if stride_item else 1
    if snapshot_stride < 1:
        violations.append(f"snapshot_stride: must be >= 1, got {snapshot_stride}")

    n_item, n1_item = take("lyap_n"), take("lyap_n1")
    lyap_n = _parse_float("lyap_n", *n_item) if n_item else 1.0e3
    lyap_n1 = _parse_float("lyap_n1", *n1_item) if n1_item else 1.0
    if lyap_n <= 0.0 or lyap_n1 <= 0.0:
        violations.append("lyap_n/lyap_n1: weights must be positive")
        lyap_n, lyap_n1 = 1.0e3, 1.0

    seed_item = take("accel_seed")
    accel_seed = seed_item[0] if seed_item else "consistent"
    if accel_seed not in ("consistent", "phi2"):
        violations.append(f"accel_seed: must be 'consistent' or 'phi2', got {accel_seed!r}")

    if violations:
        raise ValidationError(violations)

    cfg = RunConfig(params=params, s=s, t_final=t_final, dt_value=dt_value,
                    dt_ratio=dt_ratio, initial=initial, output_dir=output_dir,
                    emit_fields=emit_fields, snapshot_stride=snapshot_stride,
                    lyapunov=LyapunovConfig(lyap_n, lyap_n1), accel_seed=accel_seed)

    boundary = cfg.initial_data().check_boundary(params.length)
    if not boundary.passed:
        raise ValidationError(
            [f"{c.name}: profile must vanish at x = 0 and x = L ({c.detail})"
             for c in boundary.failures()])
    return cfg


def _format_float(value: float) -> str:
    return f"{value:.17g}"


def serialize_config(cfg: RunConfig) -> str:
    """Write a config back to text; parse_config(serialize_config(c)) == c."""
    lines = []
    p = cfg.params
    for key in PARAM_KEYS:
        lines.append(f"{key} = {_format_float(getattr(p, key))}")
    lines.append(f"mu = {_format_float(p.mu)}")
    lines.append(f"variant = {p.variant.value}")
    lines.append(f"length = {_format_float(p.length)}")
    lines.append(f"s = {cfg.s}")
    if cfg.dt_value is not None:
        lines.append(f"dt = {_format_float(cfg.dt_value)}")
    elif cfg.dt_ratio is not None:
        lines.append(f"dt_ratio = {_format_float(cfg.dt_ratio)}")
    lines.append(f"t_final = {_format_float(cfg.t_final)}")
    lines.append(f"initial = {cfg.initial.get('builtin', 'default')}")
    for name in INITIAL_KEYS:
        if name in cfg.initial:
            lines.append(f"{name} = {cfg.initial[name]}")
    lines.append(f"output_dir = {cfg.output_dir}")
    lines.append(f"emit_fields = {'true' if cfg.emit_fields else 'false'}")
    lines.append(f"snapshot_stride = {cfg.snapshot_stride}")
    lines.append(f"lyap_n = {_format_float(cfg.lyapunov.n_weight)}")
    lines.append(f"lyap_n1 = {_format_float(cfg.lyapunov.n1_weight)}")
    lines.append(f"accel_seed = {cfg.accel_seed}")
    return "\n".join(lines) + "\n"


def _canonical_coefficients(variant: Variant) -> ModelParams:
    return ModelParams(
        rho1=1.0, rho2=1.0, kappa=365.0, alpha=1.0,
        xi1=1.0, xi2=4.0e-4,
        c_cap=1.0, d_cap=0.002, r_cap=4.0e-4,
        k_theta=1.0, h_diff=0.03,
        mu=1.0, variant=variant, length=1.0,
    )


def preset(name: str) -> RunConfig:
    """Built-in run configurations.

    test1: rotation damping, s = 16, dt = h/2 = 0.03125, T = 4, cubic-bump data.
    test2: the same run with the damping moved onto the displacement velocity.
    """
    key = name.strip().lower()
    if key == "test1":
        variant = Variant.ROTATION_DAMPED
    elif key == "test2":
        variant = Variant.DISPLACEMENT_DAMPED
    else:
        raise KeyError(f"unknown preset {name!r} (available: test1, test2)")
    return RunConfig(
        params=_canonical_coefficients(variant),
        s=16, t_final=4.0, dt_ratio=0.5,
        initial={"builtin": "default"},
        output_dir=key,
    )


def load_config(source: str) -> RunConfig:
    """Resolve a preset name or read and parse a config file."""
    try:
        return preset(source)
    except KeyError:
        pass
    with open(source, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
