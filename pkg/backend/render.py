# render.py - CSV, PGM/PPM and SVG writers for screens and caustics

import csv
import enum
import logging
import math
import os
from typing import List, Optional, Sequence

import numpy as np
from PIL import Image
from pydantic import BaseModel, Field, model_validator

from backend import config
from backend.halfint import HalfInt
from backend.recurrence import UMatrix
from backend.semiclassics import CausticCurve, GeomSpec, Ridges, trace_caustic, trace_ridges
from backend.symmetry import ScreenSpec

logger = logging.getLogger(__name__)


class Colormap(str, enum.Enum):
    GRAYSCALE = "grayscale"
    VIRIDIS = "viridis"


class Overlay(str, enum.Enum):
    CAUSTIC = "caustic"
    RIDGE = "ridge"
    BOTH = "both"
    NONE = "none"

    @property
    def caustic(self) -> bool:
        return self in (Overlay.CAUSTIC, Overlay.BOTH)

    @property
    def ridge(self) -> bool:
        return self in (Overlay.RIDGE, Overlay.BOTH)


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    PGM = "pgm"
    PPM = "ppm"
    SVG = "svg"


DEFAULT_FORMATS = (OutputFormat.CSV, OutputFormat.PGM)


class RenderConfig(BaseModel):
    """How |U| maps to pixels: log10 scale clamped to [floor, ceiling]"""
    floor: float = Field(default_factory=lambda: config.FLOOR)
    ceiling: float = Field(default_factory=lambda: config.CEILING)
    colormap: Colormap = Colormap.GRAYSCALE
    overlay: Overlay = Overlay.BOTH
    scale: int = Field(default=1, ge=1, le=64)
    doubled_ints: bool = False

    @model_validator(mode="after")
    def check_range(self):
        if not (0 < self.floor < self.ceiling <= 1):
            raise ValueError(f"need 0 < floor < ceiling <= 1, got floor={self.floor}, ceiling={self.ceiling}")
        return self


# ========== COLOR SCALE ==========

# Anchor colors of a perceptually ordered blue-green-yellow map
_VIRIDIS = np.array([
    (68, 1, 84),
    (59, 82, 139),
    (33, 145, 140),
    (94, 201, 98),
    (253, 231, 37),
], dtype=float)


def normalized_levels(values: np.ndarray, cfg: RenderConfig) -> np.ndarray:
    """t in [0, 1] per entry: 0 at or below floor (and for exact zeros), 1 at ceiling"""
    magnitude = np.abs(np.asarray(values, dtype=float))
    clamped = np.clip(magnitude, cfg.floor, cfg.ceiling)
    lo, hi = math.log10(cfg.floor), math.log10(cfg.ceiling)
    t = (np.log10(clamped) - lo) / (hi - lo)
    t[magnitude == 0] = 0.0
    return t


def screen_image_array(u: UMatrix, cfg: RenderConfig, colored: bool = False) -> np.ndarray:
    """uint8 pixels, x horizontal, delta vertical with delta_max on the top row"""
    t = normalized_levels(u.values, cfg).T[::-1]
    if colored:
        stops = np.linspace(0.0, 1.0, len(_VIRIDIS))
        channels = [np.interp(t, stops, _VIRIDIS[:, c]) for c in range(3)]
        pixels = np.rint(np.stack(channels, axis=-1)).astype(np.uint8)
    else:
        pixels = np.rint(255 * t).astype(np.uint8)
    if cfg.scale > 1:
        pixels = np.repeat(np.repeat(pixels, cfg.scale, axis=0), cfg.scale, axis=1)
    return np.ascontiguousarray(pixels)


def _rgb(level: float, colored: bool) -> str:
    if colored:
        stops = np.linspace(0.0, 1.0, len(_VIRIDIS))
        r, g, b = (int(np.rint(np.interp(level, stops, _VIRIDIS[:, c]))) for c in range(3))
    else:
        r = g = b = int(np.rint(255 * level))
    return f"#{r:02x}{g:02x}{b:02x}"


# ========== CSV ==========

def format_value(value: float) -> str:
    """'0' for exact zeros, 17 significant digits otherwise"""
    if value == 0:
        return "0"
    return f"{value:.17g}"


def write_screen_csv(u: UMatrix, path: str, doubled_ints: bool = False) -> str:
    """One row per cell, x-major, delta ascending"""
    header = ["x2", "delta2", "u"] if doubled_ints else ["x", "delta", "u"]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for x, d, value in u.entries():
            if doubled_ints:
                writer.writerow([x.twice, d.twice, format_value(value)])
            else:
                writer.writerow([x.decimal(), d.decimal(), format_value(value)])
    return path


def read_screen_csv(path: str, spec: ScreenSpec) -> UMatrix:
    """Inverse of write_screen_csv for a known screen

    Raises:
        ValueError: the header or the grid does not match the screen
    """
    values = np.full((spec.x_count, spec.delta_count), np.nan)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header not in (["x", "delta", "u"], ["x2", "delta2", "u"]):
            raise ValueError(f"unexpected CSV header {header}")
        doubled = header[0] == "x2"
        for row in reader:
            if not row:
                continue
            x = HalfInt(int(row[0])) if doubled else HalfInt.parse(row[0])
            d = HalfInt(int(row[1])) if doubled else HalfInt.parse(row[1])
            if not spec.contains(x, d):
                raise ValueError(f"cell ({x}, {d}) is not on screen {spec}")
            values[(x - spec.x_min).to_int(), (d - spec.delta_min).to_int()] = float(row[2])
    if np.isnan(values).any():
        raise ValueError(f"{path} does not cover screen {spec}")
    return UMatrix(spec, values, "csv")


# ========== PIXMAPS ==========

def write_pixmap(u: UMatrix, path: str, cfg: RenderConfig, colored: bool = False) -> str:
    """Binary netpbm: P5 for grayscale, P6 for the color map"""
    image = Image.fromarray(screen_image_array(u, cfg, colored))
    image.save(path, format="PPM")
    return path


# ========== SVG ==========

def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _polyline(points, spec: ScreenSpec, dashed: bool, color: str) -> str:
    """Polyline in grid units; J3 = x + 1/2 puts cell centres at J3 - x_min"""
    x0 = float(spec.x_min)
    d_top = float(spec.delta_max)
    coords = " ".join(f"{_fmt(j3 - x0)},{_fmt(d_top - d + 0.5)}" for j3, d in points)
    dash = ' stroke-dasharray="0.4,0.3"' if dashed else ""
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="0.08"{dash}/>')


def write_screen_svg(u: UMatrix, path: str, cfg: RenderConfig,
                     caustic: Optional[CausticCurve] = None,
                     ridges: Optional[Ridges] = None) -> str:
    """Cell rectangles plus a solid caustic and dashed ridges"""
    spec = u.spec
    colored = cfg.colormap == Colormap.VIRIDIS
    t = normalized_levels(u.values, cfg)
    width, height = spec.x_count, spec.delta_count
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width * 16}" height="{height * 16}">',
        f'<title>U screen a={spec.a} b={spec.b} sigma={spec.sigma}</title>',
    ]
    for i in range(width):
        for j in range(height):
            row = height - 1 - j
            lines.append(f'<rect x="{i}" y="{row}" width="1" height="1" fill="{_rgb(t[i, j], colored)}"/>')
    if caustic is not None and caustic.samples:
        lines.append(_polyline(caustic.lower_branch(), spec, False, "#ff3030"))
        lines.append(_polyline(caustic.upper_branch(), spec, False, "#ff3030"))
    if ridges is not None:
        if ridges.delta_star:
            lines.append(_polyline(ridges.delta_star, spec, True, "#30a0ff"))
        if ridges.x_star:
            lines.append(_polyline(ridges.x_star, spec, True, "#30a0ff"))
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return path


# ========== SCREEN BUNDLE ==========

def screen_basename(spec: ScreenSpec) -> str:
    return f"screen_a{spec.a.decimal()}_b{spec.b.decimal()}_s{spec.sigma.decimal()}"


def render_screen(u: UMatrix, out_dir: str, formats: Sequence[OutputFormat] = DEFAULT_FORMATS,
                  cfg: Optional[RenderConfig] = None, basename: Optional[str] = None) -> List[str]:
    """Write every requested format for one screen

    Returns:
        Paths written, in the order of formats
    """
    cfg = cfg or RenderConfig()
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, basename or screen_basename(u.spec))
    paths = []
    for fmt in dict.fromkeys(OutputFormat(f) for f in formats):
        if fmt == OutputFormat.CSV:
            paths.append(write_screen_csv(u, stem + ".csv", cfg.doubled_ints))
        elif fmt == OutputFormat.PGM:
            paths.append(write_pixmap(u, stem + ".pgm", cfg, colored=False))
        elif fmt == OutputFormat.PPM:
            paths.append(write_pixmap(u, stem + ".ppm", cfg, colored=True))
        elif fmt == OutputFormat.SVG:
            geom = GeomSpec.from_screen(u.spec)
            caustic = trace_caustic(geom) if cfg.overlay.caustic else None
            ridges = trace_ridges(geom, u.spec) if cfg.overlay.ridge else None
            paths.append(write_screen_svg(u, stem + ".svg", cfg, caustic, ridges))
    logger.info("wrote %d file(s) for screen %s", len(paths), u.spec)
    return paths


# ========== CAUSTIC FILES ==========

def caustic_basename(curve: CausticCurve) -> str:
    geom = curve.geom
    return f"caustic_J1{geom.J1.decimal()}_J2{geom.J2.decimal()}_s{geom.sigma.decimal()}"


def write_caustic_csv(curve: CausticCurve, path: str) -> str:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["J3", "delta_minus", "delta_plus"])
        for j3, lo, hi in curve.samples:
            writer.writerow([f"{j3:.17g}", f"{lo:.17g}", f"{hi:.17g}"])
    return path


def write_caustic_svg(curve: CausticCurve, ridges: Optional[Ridges], path: str) -> str:
    """Branches solid, ridges dashed, in (J3, delta) coordinates with delta up"""
    geom = curve.geom
    extent = geom.j1 + geom.j2
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 {_fmt(-extent / 2)} {_fmt(extent)} {_fmt(extent)}" '
        f'width="{int(extent * 32)}" height="{int(extent * 32)}">',
        f'<title>caustic {geom}{" (cusp)" if curve.cusp_flag else ""}</title>',
    ]

    def polyline(points, dashed):
        coords = " ".join(f"{_fmt(j3)},{_fmt(-d)}" for j3, d in points)
        dash = ' stroke-dasharray="0.2,0.15"' if dashed else ""
        return f'<polyline points="{coords}" fill="none" stroke="black" stroke-width="0.04"{dash}/>'

    if curve.samples:
        lines.append(polyline(curve.closed_outline(), False))
    if ridges is not None:
        for points in (ridges.delta_star, ridges.x_star):
            if points:
                lines.append(polyline(points, True))
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return path


def write_caustic_index(curves: Sequence[CausticCurve], paths: Sequence[str], path: str) -> str:
    """sigma, cusp flag, sample count and file for every panel"""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["sigma", "cusp", "samples", "path"])
        for curve, panel in zip(curves, paths):
            writer.writerow([curve.sigma.decimal(), int(curve.cusp_flag), len(curve.samples),
                             os.path.basename(panel)])
    return path
