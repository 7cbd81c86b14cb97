"""Static SVG plots of empirical versus target CDF curves.

Curves come from CSV files with header ``t,F_emp,F_target`` as written by
:func:`write_cdf_csv`. No plotting library is needed; the SVG is assembled
from text so output is byte-stable for a given curve.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

CDF_HEADER = ("t", "F_emp", "F_target")
TARGET_LABELS = {
    "normal": "N(0, 1)",
    "chi2_sqrt2": "chi_2 / sqrt(2)",
    "chi1": "chi_1",
}

_W, _H = 480, 360
_LEFT, _RIGHT, _TOP, _BOTTOM = 56, 16, 40, 44


class CurveFormatError(ConfigurationError):
    """A CDF curve file does not follow the (t, F_emp, F_target) schema."""


def write_cdf_csv(path, t, f_emp, f_target):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CDF_HEADER)
        for row in zip(t, f_emp, f_target):
            writer.writerow([repr(float(v)) for v in row])


def write_spectrum_csv(path, magnitudes):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("k", "magnitude"))
        for k, m in enumerate(magnitudes):
            writer.writerow((k, repr(float(m))))


def read_cdf_csv(path):
    """Load and validate a curve file; returns three float arrays."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise CurveFormatError(f"{path}: cannot read curve file ({exc})") from exc
    if not rows or tuple(c.strip() for c in rows[0]) != CDF_HEADER:
        raise CurveFormatError(f"{path}: expected header {','.join(CDF_HEADER)}")
    body = rows[1:]
    if not body:
        raise CurveFormatError(f"{path}: curve has no samples")
    data = np.empty((len(body), 3))
    for i, row in enumerate(body, start=2):
        if len(row) != 3:
            raise CurveFormatError(f"{path}:{i}: expected 3 fields, got {len(row)}")
        try:
            data[i - 2] = [float(v) for v in row]
        except ValueError as exc:
            raise CurveFormatError(f"{path}:{i}: {exc}") from exc
    if not np.all(np.isfinite(data)):
        raise CurveFormatError(f"{path}: non-finite values")
    if np.any((data[:, 1:] < 0) | (data[:, 1:] > 1)):
        raise CurveFormatError(f"{path}: CDF values must lie in [0, 1]")
    if np.any(np.diff(data[:, 0]) < 0):
        raise CurveFormatError(f"{path}: t column must be nondecreasing")
    return data[:, 0], data[:, 1], data[:, 2]


def curve_ks(f_emp, f_target):
    return float(np.max(np.abs(np.asarray(f_emp) - np.asarray(f_target))))


def _polyline(xs, ys, colour, width=1.5, dash=None):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{colour}" stroke-width="{width}"{extra} points="{pts}"/>'


def render_cdf_svg(t, f_emp, f_target, target_label="", title=""):
    t = np.asarray(t, dtype=np.float64)
    lo, hi = float(t.min()), float(t.max())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def sx(v):
        return _LEFT + (v - lo) / (hi - lo) * pw

    def sy(v):
        return _TOP + (1.0 - v) * ph

    xs = sx(t)
    ks = curve_ks(f_emp, f_target)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(v)
        out.append(f'<line x1="{_LEFT - 4}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="#444"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{v:g}</text>')
    for v in np.linspace(lo, hi, 5):
        x = sx(v)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP + ph}" x2="{x:.2f}" y2="{_TOP + ph + 4}" stroke="#444"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + ph + 16}" font-size="11" text-anchor="middle">{v:.3g}</text>')
    out.append(_polyline(xs, sy(np.asarray(f_target)), "#d62728", 2.0, "6,3"))
    out.append(_polyline(xs, sy(np.asarray(f_emp)), "#1f77b4"))
    if title:
        out.append(f'<text x="{_W / 2:.0f}" y="18" font-size="14" text-anchor="middle">{_escape(title)}</text>')
    out.append(f'<text x="{_LEFT + 8}" y="{_TOP + 16}" font-size="12">KS = {ks:.4f}</text>')
    out.append(f'<text x="{_LEFT + 8}" y="{_TOP + 32}" font-size="11" fill="#1f77b4">empirical</text>')
    label = f"target {target_label}".strip()
    out.append(f'<text x="{_LEFT + 8}" y="{_TOP + 46}" font-size="11" fill="#d62728">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def plot_cdf(curve_csv, target="normal", svg_path=None, title=""):
    """Render a curve CSV to SVG next to it (or at ``svg_path``); returns (path, ks)."""
    if target not in TARGET_LABELS:
        raise ConfigurationError(f"unknown target {target!r}; choose from {sorted(TARGET_LABELS)}")
    t, f_emp, f_target = read_cdf_csv(curve_csv)
    svg_path = Path(svg_path) if svg_path else Path(curve_csv).with_suffix(".svg")
    svg_path.write_text(render_cdf_svg(t, f_emp, f_target, TARGET_LABELS[target], title))
    ks = curve_ks(f_emp, f_target)
    return svg_path, ks


def printed_ks(svg_text):
    """Parse the KS value printed in an SVG produced by :func:`render_cdf_svg`."""
    marker = "KS = "
    i = svg_text.find(marker)
    if i < 0:
        return math.nan
    return float(svg_text[i + len(marker):].split("<", 1)[0])
