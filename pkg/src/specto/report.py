"""Report bundles and their emitters: JSON metrics, contour CSV, SVG portraits.

The JSON serializer writes every float with 17 significant digits, which
round-trips IEEE doubles exactly; parse(serialize(report)) compares equal.
Output text is fully determined by its inputs -- no timestamps, no
filesystem paths -- so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .matrix import Matrix, eigenvalues, two_norm
from .nonnormality import nonnormality_report
from .pseudospectrum import ContourSet, GridSpec, PseudospectrumField, kreiss_lower_bound

__all__ = [
    "SpectralReport",
    "MatrixReport",
    "AnalysisReport",
    "build_spectral_report",
    "build_matrix_report",
    "serialize_report",
    "parse_report",
    "write_contours_csv",
    "portrait_svg",
    "compare_svg",
]

TOOLKIT_NAME = "specto"
DEFAULT_STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class SpectralReport:
    """Per-matrix spectral bundle (kreiss bound only when a field was computed)."""

    eigenvalues: np.ndarray
    spectral_radius: float
    spectral_norm: float
    henrici: float
    schur_departure: float
    kreiss_lower_bound: float | None = None


def build_spectral_report(
    w: Matrix,
    pfield: PseudospectrumField | None = None,
    eps_list=None,
) -> SpectralReport:
    evs = eigenvalues(w)
    nn = nonnormality_report(w)
    kreiss = None
    if pfield is not None and eps_list is not None:
        kreiss = kreiss_lower_bound(pfield, eps_list)
    return SpectralReport(
        eigenvalues=evs,
        spectral_radius=float(np.abs(evs).max()),
        spectral_norm=two_norm(w),
        henrici=nn.henrici,
        schur_departure=nn.schur_departure,
        kreiss_lower_bound=kreiss,
    )


@dataclass
class MatrixReport:
    name: str
    rows: int
    cols: int
    eigenvalues: list  # [re, im] pairs
    spectral_radius: float
    spectral_norm: float
    henrici: float
    schur_departure: float
    stable: bool
    stability_tol: float
    kreiss_lower_bound: float | None = None
    grid: GridSpec | None = None
    eps_levels: list | None = None
    contour_counts: list | None = None
    wall_time_s: float | None = None


@dataclass
class AnalysisReport:
    version: str
    config: dict = field(default_factory=dict)
    matrices: list = field(default_factory=list)
    toolkit: str = TOOLKIT_NAME


def build_matrix_report(
    name: str,
    w: Matrix,
    pfield: PseudospectrumField | None = None,
    eps_list=None,
    contours: ContourSet | None = None,
    stability_tol: float = DEFAULT_STABILITY_TOL,
    wall_time_s: float | None = None,
) -> MatrixReport:
    spec = build_spectral_report(w, pfield, eps_list)
    return MatrixReport(
        name=name,
        rows=w.rows,
        cols=w.cols,
        eigenvalues=[[float(z.real), float(z.imag)] for z in spec.eigenvalues],
        spectral_radius=spec.spectral_radius,
        spectral_norm=spec.spectral_norm,
        henrici=spec.henrici,
        schur_departure=spec.schur_departure,
        stable=spec.spectral_radius <= 1.0 + stability_tol,
        stability_tol=stability_tol,
        kreiss_lower_bound=spec.kreiss_lower_bound,
        grid=pfield.grid if pfield is not None else None,
        eps_levels=[float(e) for e in eps_list] if eps_list is not None else None,
        contour_counts=[len(group) for group in contours.polylines] if contours else None,
        wall_time_s=wall_time_s,
    )


# ---------------------------------------------------------------------------
# JSON with 17-significant-digit floats
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError("reports must not contain non-finite numbers")
    return format(float(x), ".17g")


def _emit(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(inner + _emit(v, indent + 1) for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _grid_to_dict(g: GridSpec) -> dict:
    return {
        "re_min": g.re_min,
        "re_max": g.re_max,
        "im_min": g.im_min,
        "im_max": g.im_max,
        "nx": g.nx,
        "ny": g.ny,
    }


def _matrix_report_to_dict(m: MatrixReport) -> dict:
    return {
        "name": m.name,
        "rows": m.rows,
        "cols": m.cols,
        "eigenvalues": m.eigenvalues,
        "spectral_radius": m.spectral_radius,
        "spectral_norm": m.spectral_norm,
        "henrici": m.henrici,
        "schur_departure": m.schur_departure,
        "stable": m.stable,
        "stability_tol": m.stability_tol,
        "kreiss_lower_bound": m.kreiss_lower_bound,
        "grid": _grid_to_dict(m.grid) if m.grid is not None else None,
        "eps_levels": m.eps_levels,
        "contour_counts": m.contour_counts,
        "wall_time_s": m.wall_time_s,
    }


def serialize_report(report: AnalysisReport) -> str:
    doc = {
        "toolkit": report.toolkit,
        "version": report.version,
        "config": report.config,
        "matrices": [_matrix_report_to_dict(m) for m in report.matrices],
    }
    return _emit(doc, 0) + "\n"


def _opt_float(x):
    return None if x is None else float(x)


def parse_report(text: str) -> AnalysisReport:
    doc = json.loads(text)
    matrices = []
    for m in doc["matrices"]:
        grid = None
        if m["grid"] is not None:
            g = m["grid"]
            grid = GridSpec(
                re_min=float(g["re_min"]),
                re_max=float(g["re_max"]),
                im_min=float(g["im_min"]),
                im_max=float(g["im_max"]),
                nx=int(g["nx"]),
                ny=int(g["ny"]),
            )
        matrices.append(
            MatrixReport(
                name=m["name"],
                rows=int(m["rows"]),
                cols=int(m["cols"]),
                eigenvalues=[[float(re), float(im)] for re, im in m["eigenvalues"]],
                spectral_radius=float(m["spectral_radius"]),
                spectral_norm=float(m["spectral_norm"]),
                henrici=float(m["henrici"]),
                schur_departure=float(m["schur_departure"]),
                stable=bool(m["stable"]),
                stability_tol=float(m["stability_tol"]),
                kreiss_lower_bound=_opt_float(m["kreiss_lower_bound"]),
                grid=grid,
                eps_levels=None if m["eps_levels"] is None else [float(e) for e in m["eps_levels"]],
                contour_counts=None
                if m["contour_counts"] is None
                else [int(c) for c in m["contour_counts"]],
                wall_time_s=_opt_float(m["wall_time_s"]),
            )
        )
    return AnalysisReport(
        toolkit=doc["toolkit"],
        version=doc["version"],
        config=doc["config"],
        matrices=matrices,
    )


def write_contours_csv(path, contours: ContourSet) -> None:
    """Rows level,polyline_id,re,im; vertices in traversal order."""
    lines = ["level,polyline_id,re,im"]
    for level, group in zip(contours.levels, contours.polylines):
        for pid, poly in enumerate(group):
            for z in poly:
                lines.append(
                    f"{_fmt_float(level)},{pid},{_fmt_float(z.real)},{_fmt_float(z.imag)}"
                )
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# SVG spectral portraits
# ---------------------------------------------------------------------------

_PALETTE = ("#440154", "#414487", "#2a788e", "#22a884", "#7ad151", "#fde725")
_EIG_COLOR = "#d62728"


class _Frame:
    """Affine map from the complex plane onto a pixel rectangle (y flipped)."""

    def __init__(self, grid: GridSpec, x0: float, y0: float, w: float, h: float):
        self.grid = grid
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.sx = w / (grid.re_max - grid.re_min)
        self.sy = h / (grid.im_max - grid.im_min)

    def x(self, re: float) -> float:
        return self.x0 + (re - self.grid.re_min) * self.sx

    def y(self, im: float) -> float:
        return self.y0 + (self.grid.im_max - im) * self.sy


def _px(v: float) -> str:
    return format(v, ".3f")


def _panel_elements(frame: _Frame, evs, contours: ContourSet | None, unit_circle_id: str | None):
    parts = []
    g = frame.grid
    if g.re_min < 0 < g.re_max:
        parts.append(
            f'<line class="axis" x1="{_px(frame.x(0))}" y1="{_px(frame.y(g.im_min))}" '
            f'x2="{_px(frame.x(0))}" y2="{_px(frame.y(g.im_max))}" stroke="#cccccc" stroke-width="1"/>'
        )
    if g.im_min < 0 < g.im_max:
        parts.append(
            f'<line class="axis" x1="{_px(frame.x(g.re_min))}" y1="{_px(frame.y(0))}" '
            f'x2="{_px(frame.x(g.re_max))}" y2="{_px(frame.y(0))}" stroke="#cccccc" stroke-width="1"/>'
        )
    ident = f' id="{unit_circle_id}"' if unit_circle_id else ""
    parts.append(
        f'<ellipse{ident} class="unit-circle" cx="{_px(frame.x(0))}" cy="{_px(frame.y(0))}" '
        f'rx="{_px(frame.sx)}" ry="{_px(frame.sy)}" fill="none" stroke="#555555" '
        'stroke-width="1.2" stroke-dasharray="5,4"/>'
    )
    if contours is not None:
        for li, group in enumerate(contours.polylines):
            color = _PALETTE[li % len(_PALETTE)]
            for poly in group:
                coords = " L ".join(f"{_px(frame.x(z.real))},{_px(frame.y(z.imag))}" for z in poly)
                parts.append(
                    f'<path class="contour" fill="none" stroke="{color}" '
                    f'stroke-width="1.4" d="M {coords}"/>'
                )
    for z in evs:
        parts.append(
            f'<circle class="eigenvalue" cx="{_px(frame.x(z.real))}" cy="{_px(frame.y(z.imag))}" '
            f'r="2.6" fill="{_EIG_COLOR}"/>'
        )
    return parts


def _legend_elements(levels, x: float, y: float):
    parts = ['<g class="legend">']
    for li, level in enumerate(levels):
        color = _PALETTE[li % len(_PALETTE)]
        yy = y + 18 * li
        parts.append(
            f'<rect x="{_px(x)}" y="{_px(yy)}" width="14" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_px(x + 20)}" y="{_px(yy + 9)}" font-size="11" '
            f'font-family="monospace">eps = {format(level, ".4g")}</text>'
        )
    parts.append("</g>")
    return parts


def portrait_svg(
    name: str,
    evs,
    grid: GridSpec,
    contours: ContourSet | None,
    size: int = 560,
    margin: int = 80,
) -> str:
    """Spectral portrait: unit circle, eigenvalues, eps contours, legend."""
    width = size + 2 * margin
    height = size + 2 * margin
    frame = _Frame(grid, margin, margin, size, size)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text class="title" x="{margin}" y="{margin - 14}" font-size="14" '
        f'font-family="monospace">{_xml_escape(name)}</text>',
    ]
    parts += _panel_elements(frame, evs, contours, unit_circle_id="unit-circle")
    if contours is not None:
        parts += _legend_elements(contours.levels, margin + size + 8, margin)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def compare_svg(
    left: tuple[str, np.ndarray, ContourSet | None],
    right: tuple[str, np.ndarray, ContourSet | None],
    grid: GridSpec,
    size: int = 420,
    margin: int = 70,
) -> str:
    """Two portraits over a shared grid, side by side with shared axes."""
    gap = 40
    width = 2 * size + 2 * margin + gap
    height = size + 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for k, (name, evs, contours) in enumerate((left, right)):
        x0 = margin + k * (size + gap)
        frame = _Frame(grid, x0, margin, size, size)
        parts.append(
            f'<text class="title" x="{x0}" y="{margin - 12}" font-size="13" '
            f'font-family="monospace">{_xml_escape(name)}</text>'
        )
        parts += _panel_elements(frame, evs, contours, unit_circle_id=None)
    levels = left[2].levels if left[2] is not None else None
    if levels:
        parts += _legend_elements(levels, margin, margin + size + 16)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
