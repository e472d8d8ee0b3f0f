"""Parameter/time sweeps, the ``key = value`` config format and CSV output."""

import ast
import io
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
import math
import operator
from typing import Iterable, TextIO

import numpy as np

from . import estimation, model
from .errors import (
    ConfigTypeError,
    InvalidSpec,
    LengthMismatch,
    MetrologyError,
    ParseError,
    SingularQFIM,
    UnknownKey,
    ZeroDiagonal,
)
from .model import LambdaParams

AXES = ("time", "alpha", "omega_R1", "omega_R2", "theta")
SERIES_KEYS = ("alpha", "omega_R1", "omega_R2", "theta", "time")
TIME_UNITS = ("raw", "scaled")
PARAM_KEYS = ("omega_R1", "omega_R2", "phi1", "phi2", "psi", "theta", "omega_a", "omega_b", "omega_c")
CONFIG_KEYS = ("axis", "start", "stop", "points", *PARAM_KEYS, "alpha", "M", "quantities",
               "time", "time_units", "series")
DEFAULT_POINTS = 201

# per-point, single-parameter and subset quantities
_SCALAR_KINDS = ("cpt_flag", "pop")
_PARAM_KINDS = ("qfi", "hss")
_SUBSET_KINDS = ("qfim", "ratio", "bounds", "witness")


# -- safe numeric expressions -------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log}


def eval_number(text: str) -> float:
    """Evaluate a numeric literal or a small arithmetic expression such as ``3*pi/2`` or ``pi/sqrt(2)``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"not a number: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


# -- quantities ---------------------------------------------------------------


@dataclass(frozen=True)
class Quantity:
    kind: str
    params: tuple[str, ...] = ()

    @classmethod
    def parse(cls, token: str) -> "Quantity":
        token = token.strip()
        kind, _, arg = token.partition(":")
        kind = kind.strip()
        if kind in _SCALAR_KINDS:
            if arg:
                raise MetrologyError(f"{kind} takes no argument")
            return cls(kind)
        if kind in _PARAM_KINDS:
            return cls(kind, (model.parameter_id(arg),))
        if kind in _SUBSET_KINDS:
            ids = estimation.parse_subset(arg)
            if kind in ("ratio", "witness") and len(ids) < 2:
                raise MetrologyError(f"{kind} needs at least two parameters")
            return cls(kind, ids)
        raise MetrologyError(f"unknown quantity {token!r}")

    @property
    def token(self) -> str:
        return self.kind + (":" + "+".join(self.params) if self.params else "")

    def columns(self) -> list[str]:
        s = "_".join(self.params)
        if self.kind == "cpt_flag":
            return ["cpt"]
        if self.kind == "pop":
            return ["P_a", "P_b", "P_c"]
        if self.kind == "qfi":
            return [f"F_{s}"]
        if self.kind == "hss":
            return [f"HSS_{s}"]
        if self.kind == "qfim":
            n = len(self.params)
            cols = [f"F_{self.params[i]}_{self.params[j]}" for i in range(n) for j in range(i, n)]
            return cols + ([f"detF_{s}"] if n > 1 else [])
        if self.kind == "ratio":
            return [f"R_{s}"]
        if self.kind == "witness":
            return [f"W_{s}"]
        # bounds
        return [f"delta_i_{s}", f"delta_s_{s}"] + [f"var_s_{k}({s})" for k in self.params]

    def evaluate(self, params: LambdaParams, t: float, cfg: estimation.EstimationConfig) -> list:
        if self.kind == "cpt_flag":
            return [model.is_cpt(params)]
        if self.kind == "pop":
            return list(model.evolve(params, t).populations)
        if self.kind == "qfi":
            return [estimation.qfi_single(params, t, self.params[0])]
        if self.kind == "hss":
            return [estimation.hss(params, t, self.params[0])]
        if self.kind == "witness":
            return [estimation.saturability_witness(params, t, self.params)]
        F = estimation.qfim(params, t, self.params)
        if self.kind == "qfim":
            n = F.p
            vals = [F.entries[i, j] for i in range(n) for j in range(i, n)]
            return vals + ([F.det] if n > 1 else [])
        if self.kind == "ratio":
            return [estimation.performance_ratio(F, cfg)]
        b = estimation.variance_bounds(F, cfg)
        return [b.delta_independent, b.delta_simultaneous, *b.per_parameter_simultaneous]


# -- sweep specification -------------------------------------------------------


@dataclass(frozen=True)
class Series:
    key: str
    labels: tuple[str, ...]
    values: tuple[float, ...]


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    quantities: tuple[Quantity, ...]
    points: int = DEFAULT_POINTS
    fixed: LambdaParams = field(default_factory=LambdaParams)
    M: int = 1
    time: float = 1.0
    time_units: str = "raw"
    series: Series | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidSpec("axis", f"must be one of {', '.join(AXES)}, got {self.axis!r}")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidSpec("points", f"must be an integer >= 2, got {self.points!r}")
        if not self.start < self.stop:
            raise InvalidSpec("start", f"start ({self.start}) must be below stop ({self.stop})")
        if not self.quantities:
            raise InvalidSpec("quantities", "at least one quantity is required")
        if int(self.M) != self.M or self.M < 1:
            raise InvalidSpec("M", f"must be a positive integer, got {self.M!r}")
        if self.time_units not in TIME_UNITS:
            raise InvalidSpec("time_units", f"must be raw or scaled, got {self.time_units!r}")
        if self.axis == "time" and self.start < 0:
            raise InvalidSpec("start", "time axis must start at t >= 0")
        if self.axis != "time" and self.time < 0:
            raise InvalidSpec("time", "time must be >= 0")
        if self.axis in ("omega_R1", "omega_R2") and self.start < 0:
            raise InvalidSpec("start", "Rabi frequencies must be non-negative")
        s = self.series
        if s is not None:
            if s.key not in SERIES_KEYS:
                raise InvalidSpec("series", f"series key must be one of {', '.join(SERIES_KEYS)}")
            if s.key == self.axis or (s.key == "time" and self.axis == "time"):
                raise InvalidSpec("series", "series key duplicates the sweep axis")
            if not s.values:
                raise InvalidSpec("series", "no series values")
            if self.time_units == "scaled" and s.key in ("omega_R1", "omega_R2"):
                raise InvalidSpec("time_units", "scaled time is ambiguous when the series varies a Rabi frequency")
        if self.time_units == "scaled" and self.axis in ("omega_R1", "omega_R2"):
            raise InvalidSpec("time_units", "scaled time is ambiguous when the axis varies a Rabi frequency")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))

    def time_scale(self, params: LambdaParams) -> float:
        """Omega' for equal Rabi frequencies, Omega otherwise."""
        return params.omega_R1 if params.equal_rabi else params.Omega

    def scaled_time_label(self) -> str:
        return "tOmega_prime" if self.fixed.equal_rabi else "tOmega"

    def point(self, x: float, series_value: float | None = None) -> tuple[LambdaParams, float]:
        params = self.fixed
        t = self.time
        if self.series is not None:
            params, t = _apply(params, t, self.series.key, series_value)
        params, t = _apply(params, t, self.axis, x)
        if self.time_units == "scaled":
            t = t / self.time_scale(params)
        return params, t

    def describe(self) -> str:
        p = self.fixed
        lines = [f"axis = {self.axis}", f"start = {self.start!r}", f"stop = {self.stop!r}",
                 f"points = {self.points}"]
        lines += [f"{k} = {getattr(p, k)!r}" for k in PARAM_KEYS]
        lines += [f"# alpha = {p.alpha!r}", f"M = {self.M}"]
        if self.axis != "time":
            lines.append(f"time = {self.time!r}")
        lines.append(f"time_units = {self.time_units}")
        if self.series is not None:
            lines.append(f"series = {self.series.key}: {', '.join(self.series.labels)}")
        lines.append("quantities = " + ", ".join(q.token for q in self.quantities))
        return "\n".join(lines)


def _apply(params: LambdaParams, t: float, key: str, value: float):
    if key == "time":
        return params, value
    if key == "alpha":
        return params.with_alpha(value), t
    return replace(params, **{key: value}), t


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list]
    provenance: str
    warnings: Counter = field(default_factory=Counter)

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def summary(self) -> str:
        undefined = sum(self.warnings.values())
        lines = [f"points: {len(self.rows)}", f"columns: {', '.join(self.header)}",
                 f"undefined cells: {undefined}"]
        for reason, n in sorted(self.warnings.items()):
            lines.append(f"  {reason}: {n}")
        return "\n".join(lines)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every quantity on the uniform grid, in grid order.

    SingularQFIM and ZeroDiagonal leave empty cells and are tallied in
    ``warnings``.
    """
    cfg = estimation.EstimationConfig(M=spec.M)
    header = []
    if spec.axis == "time":
        header.append("t")
        if spec.series is None or spec.series.key not in ("omega_R1", "omega_R2"):
            header.append(spec.scaled_time_label())
    else:
        header.append(spec.axis)

    variants = [(None, None)] if spec.series is None else list(zip(spec.series.labels, spec.series.values))
    for label, _ in variants:
        suffix = "" if label is None else f"|{spec.series.key}={label}"
        for q in spec.quantities:
            header.extend(c + suffix for c in q.columns())

    warnings = Counter()
    rows = []
    for x in spec.grid:
        x = float(x)
        row = []
        if spec.axis == "time":
            params0, t0 = spec.point(x, variants[0][1])
            if len(header) > 1 and header[1] in ("tOmega_prime", "tOmega"):
                if spec.time_units == "scaled":
                    row += [t0, x]
                else:
                    row += [x, x * spec.time_scale(params0)]
            else:
                row.append(x)
        else:
            row.append(x)
        for _, value in variants:
            params, t = spec.point(x, value)
            for q in spec.quantities:
                try:
                    row.extend(q.evaluate(params, t, cfg))
                except (SingularQFIM, ZeroDiagonal) as exc:
                    warnings[f"{q.token}: {type(exc).__name__}"] += 1
                    row.extend([None] * len(q.columns()))
        rows.append(row)
    return SweepResult(header=header, rows=rows, provenance=spec.describe(), warnings=warnings)


# -- CSV ------------------------------------------------------------------------


def format_value(v) -> str:
    """Shortest round-trip decimal; integral floats without a trailing '.0'; empty for undefined."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    v = float(v)
    if not math.isfinite(v):
        return ""
    if v == 0.0:
        return "0"
    s = repr(v)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def emit_csv(result: SweepResult, destination: TextIO) -> None:
    lines = [",".join(result.header)]
    lines.extend(",".join(format_value(v) for v in row) for row in result.rows)
    destination.write("\n".join(lines) + "\n")


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue()


# -- extrema ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremaReport:
    matched: bool
    indices_a: tuple[int, ...]
    indices_b: tuple[int, ...]
    maxima_a: tuple[int, ...] = ()
    minima_a: tuple[int, ...] = ()
    maxima_b: tuple[int, ...] = ()
    minima_b: tuple[int, ...] = ()


def local_extrema(series: Iterable[float]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Interior strict local maxima and minima; a plateau counts once, at its leftmost index."""
    y = [float(v) for v in series]
    # collapse runs of equal values
    idx, vals = [], []
    for i, v in enumerate(y):
        if vals and v == vals[-1]:
            continue
        idx.append(i)
        vals.append(v)
    maxima, minima = [], []
    for j in range(1, len(vals) - 1):
        if vals[j] > vals[j - 1] and vals[j] > vals[j + 1]:
            maxima.append(idx[j])
        elif vals[j] < vals[j - 1] and vals[j] < vals[j + 1]:
            minima.append(idx[j])
    return tuple(maxima), tuple(minima)


def extrema_match(series_a, series_b) -> ExtremaReport:
    a, b = list(series_a), list(series_b)
    if len(a) != len(b):
        raise LengthMismatch(f"series lengths differ: {len(a)} vs {len(b)}")
    if len(a) < 3:
        raise LengthMismatch("series need at least three points")
    max_a, min_a = local_extrema(a)
    max_b, min_b = local_extrema(b)
    return ExtremaReport(
        matched=(max_a == max_b and min_a == min_b),
        indices_a=tuple(sorted(max_a + min_a)),
        indices_b=tuple(sorted(max_b + min_b)),
        maxima_a=max_a, minima_a=min_a, maxima_b=max_b, minima_b=min_b,
    )


# -- config -------------------------------------------------------------------------


def read_entries(text: str) -> dict[str, tuple[int, str]]:
    """Split a config document into ``{key: (line number, raw value)}``."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ParseError(lineno, "missing key")
        if key not in CONFIG_KEYS:
            raise UnknownKey(lineno, key)
        if key in entries:
            raise ParseError(lineno, f"duplicate key {key!r} (first set on line {entries[key][0]})")
        entries[key] = (lineno, value)
    return entries


def _number(entries, key, default=None):
    if key not in entries:
        return default
    line, raw = entries[key]
    try:
        return eval_number(raw)
    except ValueError:
        raise ConfigTypeError(line, key, f"malformed number {raw!r}") from None


def _integer(entries, key, default):
    value = _number(entries, key, None)
    if value is None:
        return default
    if value != int(value):
        raise ConfigTypeError(entries[key][0], key, f"expected an integer, got {entries[key][1]!r}")
    return int(value)


def _choice(entries, key, choices, default=None):
    if key not in entries:
        return default
    line, raw = entries[key]
    if raw not in choices:
        raise ConfigTypeError(line, key, f"expected one of {', '.join(choices)}, got {raw!r}")
    return raw


def params_from_entries(entries: dict) -> LambdaParams:
    kwargs = {}
    for k in PARAM_KEYS:
        v = _number(entries, k)
        if v is not None:
            kwargs[k] = v
    if "alpha" in entries:
        if "psi" in entries:
            raise ConfigTypeError(entries["alpha"][0], "alpha", "give either alpha or psi, not both")
        alpha = _number(entries, "alpha")
        kwargs["psi"] = kwargs.get("phi1", 0.0) - kwargs.get("phi2", 0.0) - alpha
    try:
        return LambdaParams(**kwargs)
    except MetrologyError as exc:
        line = min((entries[k][0] for k in ("omega_R1", "omega_R2") if k in entries), default=0)
        raise ParseError(line, str(exc)) from None


def _quantities(entries) -> tuple[Quantity, ...]:
    if "quantities" not in entries:
        return ()
    line, raw = entries["quantities"]
    out = []
    for tok in raw.split(","):
        if not tok.strip():
            continue
        try:
            out.append(Quantity.parse(tok))
        except MetrologyError as exc:
            raise ConfigTypeError(line, "quantities", str(exc)) from None
    return tuple(out)


def _series(entries) -> Series | None:
    if "series" not in entries:
        return None
    line, raw = entries["series"]
    key, sep, rest = raw.partition(":")
    key = key.strip()
    if not sep or key not in SERIES_KEYS:
        raise ConfigTypeError(line, "series", f"expected '<{'|'.join(SERIES_KEYS)}>: v1, v2, ...', got {raw!r}")
    labels, values = [], []
    for tok in rest.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            values.append(eval_number(tok))
        except ValueError:
            raise ConfigTypeError(line, "series", f"malformed number {tok!r}") from None
        labels.append(tok.replace(" ", ""))
    return Series(key=key, labels=tuple(labels), values=tuple(values))


def spec_from_entries(entries: dict) -> SweepSpec:
    for key in ("axis", "start", "stop", "quantities"):
        if key not in entries:
            raise InvalidSpec(key, "missing required key")
    return SweepSpec(
        axis=_choice(entries, "axis", AXES),
        start=_number(entries, "start"),
        stop=_number(entries, "stop"),
        points=_integer(entries, "points", DEFAULT_POINTS),
        fixed=params_from_entries(entries),
        M=_integer(entries, "M", 1),
        time=_number(entries, "time", 1.0),
        time_units=_choice(entries, "time_units", TIME_UNITS, "raw"),
        quantities=_quantities(entries),
        series=_series(entries),
    )


def parse_config(text: str) -> SweepSpec:
    """Parse a ``key = value`` sweep document.

    Omitted keys fall back to theta = pi/2, psi = phi1 = phi2 = 0, M = 1,
    omega_R1 = omega_R2 = 1, (omega_a, omega_b, omega_c) = (1, 0, 0.5),
    points = 201, time = 1 and time_units = raw.
    """
    return spec_from_entries(read_entries(text))


# -- presets --------------------------------------------------------------------------


def preset_names() -> list[str]:
    files = resources.files("lambda_metrology") / "presets"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cfg"))


def preset_text(name: str) -> str:
    if name not in preset_names():
        raise MetrologyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return (resources.files("lambda_metrology") / "presets" / f"{name}.cfg").read_text()


def load_preset(name: str) -> SweepSpec:
    return parse_config(preset_text(name))

