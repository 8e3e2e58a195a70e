"""Run configuration (``key = value`` documents) and CSV table output."""

import csv
import io
import math
import sys
from dataclasses import dataclass, fields, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .angles import Angle, check_interior_angle
from .cutoff import Smoothness
from .errors import ParseError, ValidationError
from .exponents import BcKind

PROBLEMS = ("laplace", "stokes")


@dataclass(frozen=True)
class RunConfig:
    problem: str = "laplace"
    omega: Angle = Angle.from_pi(Fraction(3, 2))
    lam: Optional[float] = None
    bc: Optional[BcKind] = None
    k: Optional[int] = None
    amplitude: Optional[float] = None
    r0: Optional[float] = None
    r1: Optional[float] = None
    profile: Optional[Smoothness] = None
    xi: Optional[float] = None
    tol: Optional[float] = None
    levels: Optional[int] = None
    re_min: Optional[float] = None
    re_max: Optional[float] = None
    im_min: Optional[float] = None
    im_max: Optional[float] = None
    out: Optional[str] = None

    def __post_init__(self):
        validate(self)


# document key -> dataclass attribute
_KEYS = {f.name: f.name for f in fields(RunConfig)}
_KEYS["lambda"] = "lam"
del _KEYS["lam"]
_ATTR_TO_KEY = {v: k for k, v in _KEYS.items()}


def _float(name, text):
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"{name}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"{name}: must be finite")
    return value


def _int(name, text):
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"{name}: expected an integer, got {text!r}") from None


def _enum(name, kind, text):
    try:
        return kind(text)
    except ValueError:
        choices = ", ".join(m.value for m in kind)
        raise ValidationError(f"{name}: expected one of {choices}, got {text!r}") from None


def _convert(attr, text):
    key = _ATTR_TO_KEY[attr]
    if attr == "problem":
        if text not in PROBLEMS:
            raise ValidationError(f"problem: expected laplace or stokes, got {text!r}")
        return text
    if attr == "omega":
        return Angle.parse(text)
    if attr == "bc":
        return _enum(key, BcKind, text)
    if attr == "profile":
        return _enum(key, Smoothness, text)
    if attr in ("k", "levels"):
        return _int(key, text)
    if attr == "out":
        return text
    return _float(key, text)


def validate(cfg):
    try:
        check_interior_angle(cfg.omega)
    except ValidationError as exc:
        raise ValidationError(f"omega: {exc}") from None
    if cfg.problem not in PROBLEMS:
        raise ValidationError(f"problem: expected laplace or stokes, got {cfg.problem!r}")
    if cfg.tol is not None and not cfg.tol > 0:
        raise ValidationError("tol: must be positive")
    if cfg.k is not None and cfg.k < 0:
        raise ValidationError("k: must be nonnegative")
    if cfg.levels is not None and cfg.levels < 1:
        raise ValidationError("levels: must be at least 1")
    for name in ("r0", "r1"):
        value = getattr(cfg, name)
        if value is not None and not value > 0:
            raise ValidationError(f"{name}: must be positive")
    if cfg.r0 is not None and cfg.r1 is not None and not cfg.r0 < cfg.r1:
        raise ValidationError("r1: must exceed r0")
    if cfg.xi is not None and not cfg.xi > 0:
        raise ValidationError("xi: must be positive")
    for lo, hi in (("re_min", "re_max"), ("im_min", "im_max")):
        a, b = getattr(cfg, lo), getattr(cfg, hi)
        if a is not None and b is not None and not a < b:
            raise ValidationError(f"{hi}: must exceed {lo}")


def parse_config(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not key:
            raise ParseError("missing key", lineno, key_col)
        value = value_part.strip()
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, value_col)
        if len(value) >= 2 and value[0] == value[-1] == '"':
            value = value[1:-1]
        if key not in _KEYS:
            raise ValidationError(f"{key}: unknown key (line {lineno})")
        attr = _KEYS[key]
        if attr in values:
            raise ParseError(f"duplicate key {key!r}", lineno, key_col)
        values[attr] = _convert(attr, value)
    return RunConfig(**values)


def _format_value(value):
    if isinstance(value, Angle):
        return value.text()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return f'"{value}"'
    return str(value)


def emit_config(cfg):
    """Canonical text form; ``parse_config(emit_config(c)) == c``."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{_ATTR_TO_KEY[f.name]} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def merge(cfg, **overrides):
    """Copy of ``cfg`` with the non-None overrides applied."""
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


# -- tables ------------------------------------------------------------------


def format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def write_table(rows, schema, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(schema)
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != len(schema):
            raise ValidationError(f"row {i} has {len(row)} cells, schema has {len(schema)}")
        writer.writerow([format_cell(v) for v in row])


def emit_table(rows, schema, path=None):
    """CSV with header; floats written with 17 significant digits.

    ``path=None`` writes to standard output.
    """
    rows = [list(r) for r in rows]
    if path is None:
        write_table(rows, schema, sys.stdout)
        return
    buf = io.StringIO()
    write_table(rows, schema, buf)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write table: {exc.strerror}", str(path)) from exc


def read_table(path):
    """Header and rows of a CSV file as strings."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            return header, [row for row in reader if row]
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read table: {exc.strerror}", str(path)) from exc


def read_points(path):
    """``x,y`` columns of a CSV file as two float arrays."""
    header, rows = read_table(path)
    if header is None:
        raise ValidationError(f"{path}: empty points file")
    names = [h.strip() for h in header]
    try:
        ix, iy = names.index("x"), names.index("y")
    except ValueError:
        raise ValidationError(f"{path}: points file needs x and y columns") from None
    try:
        x = np.array([float(r[ix]) for r in rows])
        y = np.array([float(r[iy]) for r in rows])
    except (ValueError, IndexError):
        raise ValidationError(f"{path}: malformed point row") from None
    return x, y
