"""Parameter sweeps of blocking probability and their csv/json/svg output."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape

from . import __version__
from .graph import mbps_to_kbps
from .teletraffic import Modulation, channel_count, erlang_b, simultaneous_rb

VARY_FIELDS = ("rb_per_call_m", "simultaneous_rb_N", "users_M", "holding_th")
SERIES_FIELDS = VARY_FIELDS + ("call_rate_s",)
_INTEGER_FIELDS = ("rb_per_call_m", "simultaneous_rb_N")


class SweepError(ValueError):
    pass


def number(text) -> Fraction:
    """Exact number from ``"1.5"``, ``"1/60"``, int or Fraction."""
    if isinstance(text, float):
        text = repr(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None


def _as_field(name: str, value: Fraction):
    if name in _INTEGER_FIELDS:
        if value.denominator != 1:
            raise SweepError(f"{name} must be an integer, got {value}")
        return int(value)
    return value


@dataclass(frozen=True)
class SweepSpec:
    vary: str
    start: Fraction
    stop: Fraction
    step: Fraction
    fixed: Mapping[str, object]
    series_field: str
    series: tuple[Fraction, ...]
    # m is given in QPSK-equivalent RB/call; under 16-QAM a call books
    # proportionally fewer RBs while the offered load stays the same
    equal_throughput: bool = False

    def __post_init__(self):
        if self.vary not in VARY_FIELDS:
            raise SweepError(f"cannot vary {self.vary!r}; choose one of {', '.join(VARY_FIELDS)}")
        if self.series_field not in SERIES_FIELDS:
            raise SweepError(f"unknown series field {self.series_field!r}")
        if self.series_field == self.vary:
            raise SweepError("series field must differ from the varied field")
        if self.vary in self.fixed or self.series_field in self.fixed:
            raise SweepError("varied and series fields must not also be fixed")
        if self.step <= 0:
            raise SweepError("step must be positive")
        if self.stop < self.start:
            raise SweepError("empty range: stop < start")
        if not self.series:
            raise SweepError("at least one series value is required")

    def xs(self) -> list[Fraction]:
        count = int((self.stop - self.start) // self.step) + 1
        return [self.start + i * self.step for i in range(count)]


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float
    series_label: str
    series_value: float = field(default=0.0, compare=False)


def point_blocking(params: Mapping[str, object], equal_throughput: bool = False) -> float:
    """Blocking probability for one parameter set.

    ``params`` holds users_M, rb_per_call_m, call_rate_s, holding_th,
    modulation and either simultaneous_rb_N or capacity_C (kbps).
    """
    mod = Modulation.parse(params.get("modulation", "qpsk"))
    m = params["rb_per_call_m"]
    if "simultaneous_rb_N" in params:
        N = params["simultaneous_rb_N"]
    elif "capacity_C" in params:
        N = simultaneous_rb(params["capacity_C"], mod)
    else:
        raise SweepError("need simultaneous_rb_N or a capacity")
    booked = m
    if equal_throughput:
        ratio = Fraction(Modulation.QPSK.bits_per_symbol, mod.bits_per_symbol)
        booked_exact = m * ratio
        if booked_exact.denominator != 1:
            raise SweepError(f"m = {m} has no whole-RB equivalent under {mod.value}")
        booked = int(booked_exact)
    k = channel_count(N, booked)
    A = params["call_rate_s"] * m * params["holding_th"] * params["users_M"]
    return erlang_b(float(A), k)


def _label(name: str, value: Fraction) -> str:
    return f"{name}={_fmt(value)}"


def _fmt(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    text = repr(float(value))
    return text if Fraction(text) == value else f"{value.numerator}/{value.denominator}"


def run_sweep(spec: SweepSpec) -> list[CurvePoint]:
    """One point per (series value, x), sorted by series value then x."""
    points = []
    for sv in spec.series:
        for x in spec.xs():
            params = dict(spec.fixed)
            try:
                params[spec.series_field] = _as_field(spec.series_field, sv)
                params[spec.vary] = _as_field(spec.vary, x)
                y = point_blocking(params, spec.equal_throughput)
            except (ValueError, KeyError) as exc:
                raise SweepError(
                    f"at {spec.series_field}={_fmt(sv)}, {spec.vary}={_fmt(x)}: {exc}"
                ) from exc
            points.append((sv, x, CurvePoint(float(x), y, _label(spec.series_field, sv), float(sv))))
    points.sort(key=lambda item: (item[0], item[1]))
    return [p for _, _, p in points]


# ------------------------------------------------------------------ spec files


def parse_sweep_spec(text: str, section: str = "sweep") -> tuple[SweepSpec, dict]:
    """Read a sweep from an INI ``[sweep]`` section; returns the spec and
    any output options (``format``, ``log_y``) found there."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SweepError(f"bad sweep file: {exc}") from None
    if not cp.has_section(section):
        raise SweepError(f"missing [{section}] section")
    return sweep_from_mapping(dict(cp[section]))


def sweep_from_mapping(raw: Mapping[str, str]) -> tuple[SweepSpec, dict]:
    raw = dict(raw)
    try:
        vary = raw.pop("vary")
        start, stop = number(raw.pop("start")), number(raw.pop("stop"))
        step = number(raw.pop("step", "1"))
        series_field = raw.pop("series_field")
        series = tuple(number(v) for v in raw.pop("series").split(",") if v.strip())
    except KeyError as exc:
        raise SweepError(f"sweep spec is missing {exc.args[0]!r}") from None
    equal_throughput = _boolean(raw.pop("equal_throughput", "false"))
    options = {}
    for key in ("format", "log_y"):
        if key in raw:
            options[key] = raw.pop(key)
    if "log_y" in options:
        options["log_y"] = _boolean(options["log_y"])

    fixed: dict[str, object] = {}
    if "modulation" in raw:
        fixed["modulation"] = Modulation.parse(raw.pop("modulation"))
    if "capacity_mbps" in raw:
        fixed["capacity_C"] = mbps_to_kbps(raw.pop("capacity_mbps"))
    if "capacity_kbps" in raw:
        fixed["capacity_C"] = int(number(raw.pop("capacity_kbps")))
    for key in list(raw):
        if key not in SERIES_FIELDS:
            raise SweepError(f"unknown sweep key {key!r}")
        fixed[key] = _as_field(key, number(raw.pop(key)))
    spec = SweepSpec(vary, start, stop, step, fixed, series_field, series, equal_throughput)
    return spec, options


def _boolean(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise SweepError(f"not a boolean: {text!r}")


# ---------------------------------------------------------------------- output


def emit(points: Sequence[CurvePoint], format: str = "csv", *, log_y: bool = False, title: str = "") -> bytes:
    if format == "csv":
        return emit_csv(points).encode()
    if format == "json":
        return emit_json(points).encode()
    if format == "svg":
        return emit_svg(points, log_y=log_y, title=title).encode()
    raise ValueError(f"unknown output format {format!r}")


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def emit_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "y"])
    for p in points:
        w.writerow([p.series_label, _num(p.x), repr(float(p.y))])
    return buf.getvalue()


def emit_json(points: Iterable[CurvePoint]) -> str:
    doc = {
        "tool_version": __version__,
        "points": [{"series": p.series_label, "x": p.x, "y": p.y} for p in points],
    }
    return json.dumps(doc, indent=2) + "\n"


def read_points_json(text: str) -> list[CurvePoint]:
    doc = json.loads(text)
    return [CurvePoint(float(p["x"]), float(p["y"]), p["series"]) for p in doc["points"]]


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 150, 30, 50
LOG_FLOOR = 1e-12


def emit_svg(points: Sequence[CurvePoint], *, log_y: bool = False, title: str = "") -> str:
    """Self-contained SVG line chart, one polyline per series.

    With ``log_y`` the y axis is log10 and zero probabilities are drawn at
    ``LOG_FLOOR``.
    """
    if not points:
        raise ValueError("cannot draw an empty chart")
    series: dict[str, list[CurvePoint]] = {}
    for p in points:
        series.setdefault(p.series_label, []).append(p)

    def ty(y: float) -> float:
        return math.log10(max(y, LOG_FLOOR)) if log_y else y

    xs = [p.x for p in points]
    ys = [ty(p.y) for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return _TOP + ph - (ty(y) - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(
        f'<path d="M{_LEFT},{_TOP} V{_TOP + ph} H{_LEFT + pw}" fill="none" stroke="black" class="axes"/>'
    )
    for i in range(6):
        xv = x0 + (x1 - x0) * i / 5
        px = sx(xv)
        out.append(f'<line x1="{px:.2f}" y1="{_TOP + ph}" x2="{px:.2f}" y2="{_TOP + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{_TOP + ph + 16}" text-anchor="middle">{xv:.4g}</text>')
    ticks = range(int(y0), int(y1) + 1) if log_y else [y0 + (y1 - y0) * i / 5 for i in range(6)]
    for tv in ticks:
        py = _TOP + ph - (tv - y0) / (y1 - y0) * ph
        label = f"1e{int(tv)}" if log_y else f"{tv:.3g}"
        out.append(f'<line x1="{_LEFT - 4}" y1="{py:.2f}" x2="{_LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{py + 4:.2f}" text-anchor="end">{label}</text>')
    out.append(
        f'<text x="16" y="{_TOP + ph / 2:.1f}" transform="rotate(-90 16 {_TOP + ph / 2:.1f})" '
        f'text-anchor="middle">blocking probability{" (log)" if log_y else ""}</text>'
    )
    for idx, (label, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(p.x):.2f},{sy(p.y):.2f}" for p in pts)
        out.append(
            f'<polyline data-series="{escape(label)}" points="{coords}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _TOP + 14 + 16 * idx
        lx = _LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
