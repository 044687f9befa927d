"""
Reproduce the caustic panels and the large screens as data files
- Caustic panels for J1=3/2, J2=7/2 and J1=J2=7/2, every allowed sigma
- Screens a=b=50, sigma in {0, 10, 20, 30, 40}, with caustic and ridge overlays
"""
import logging
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

# Fix import path - add parent directory
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, parent_dir)

from backend import config
from backend.halfint import HalfInt
from backend.recurrence import solve_screen
from backend.render import (
    OutputFormat,
    Overlay,
    RenderConfig,
    caustic_basename,
    render_screen,
    write_caustic_csv,
    write_caustic_index,
    write_caustic_svg,
)
from backend.semiclassics import (
    GeomSpec,
    PointClass,
    caustic_sigmas,
    classify_screen,
    cusp_corner,
    trace_caustic,
    trace_ridges,
)
from backend.symmetry import ScreenSpec

logger = logging.getLogger(__name__)

CAUSTIC_PANELS = (("3/2", "7/2"), ("7/2", "7/2"))
LARGE_SCREEN = (50, 50)
LARGE_SIGMAS = (0, 10, 20, 30, 40)
# The outermost screen is almost entirely forbidden; a higher floor keeps it readable
SIGMA_FLOORS = {40: 1e-5}


@dataclass
class ScreenSummary:
    spec: ScreenSpec
    paths: List[str]
    classical_fraction: float
    classical_weight: float
    forbidden_max: float


def caustic_panels(J1, J2, out_dir: str) -> List[str]:
    """Write one CSV + SVG per allowed sigma and an index; returns the SVG paths"""
    J1, J2 = HalfInt.of(J1), HalfInt.of(J2)
    folder = os.path.join(out_dir, f"caustics_J1{J1.decimal()}_J2{J2.decimal()}")
    os.makedirs(folder, exist_ok=True)

    curves, panels = [], []
    for sigma in caustic_sigmas(J1, J2):
        geom = GeomSpec(J1, J2, sigma)
        curve = trace_caustic(geom)
        stem = os.path.join(folder, caustic_basename(curve))
        write_caustic_csv(curve, stem + ".csv")
        panels.append(write_caustic_svg(curve, trace_ridges(geom), stem + ".svg"))
        curves.append(curve)

        corner = cusp_corner(geom)
        note = f"cusp, {corner}-left corner" if corner else ("cusp" if curve.cusp_flag else "")
        print(f"  sigma={str(sigma):>5}  samples={len(curve.samples):<5} {note}")

    write_caustic_index(curves, panels, os.path.join(folder, "caustics.csv"))
    return panels


def localization(spec: ScreenSpec, values: np.ndarray):
    """Share of classical cells, share of sum U^2 they hold, largest |U| in the forbidden region"""
    labels = classify_screen(spec)
    classical = labels == PointClass.CLASSICAL.value
    forbidden = labels == PointClass.FORBIDDEN.value
    weight = values ** 2
    total = float(weight.sum())
    fraction = float(classical.mean())
    held = float(weight[classical].sum()) / total if total else 0.0
    forbidden_max = float(np.abs(values[forbidden]).max()) if forbidden.any() else 0.0
    return fraction, held, forbidden_max


def large_screen(a, b, sigma, out_dir: str, floor: Optional[float] = None) -> ScreenSummary:
    spec = ScreenSpec.of(a, b, sigma)
    cfg = RenderConfig(floor=floor or SIGMA_FLOORS.get(sigma, config.FLOOR), overlay=Overlay.BOTH)
    u = solve_screen(spec)
    paths = render_screen(u, out_dir, [OutputFormat.CSV, OutputFormat.PGM, OutputFormat.SVG], cfg)
    fraction, held, forbidden_max = localization(spec, u.values)
    return ScreenSummary(spec, paths, fraction, held, forbidden_max)


def reproduce(out_dir: Optional[str] = None, sigmas=LARGE_SIGMAS, screen=LARGE_SCREEN):
    out_dir = out_dir or os.path.join(config.OUTPUT_DIR, "figures")
    os.makedirs(out_dir, exist_ok=True)

    print("=" * 70)
    print("CAUSTIC PANELS")
    print("=" * 70)
    for J1, J2 in CAUSTIC_PANELS:
        print(f"\nJ1={J1}, J2={J2}")
        panels = caustic_panels(J1, J2, out_dir)
        print(f"✓ {len(panels)} panel(s)")

    print()
    print("=" * 70)
    print(f"SCREENS a={screen[0]}, b={screen[1]}")
    print("=" * 70)
    print(f"{'sigma':<7} {'classical cells':<17} {'weight inside':<15} {'max |U| outside':<16}")
    print("-" * 70)
    summaries = []
    for sigma in sigmas:
        summary = large_screen(screen[0], screen[1], sigma, out_dir)
        summaries.append(summary)
        marker = "✓" if summary.classical_weight > 0.5 else "⚠"
        print(f"{sigma:<7} {summary.classical_fraction:<17.3f} {summary.classical_weight:<15.6f} "
              f"{summary.forbidden_max:<16.3e} {marker}")

    print()
    print(f"Files under {out_dir}")
    return summaries


if __name__ == "__main__":
    config.setup_logging()
    print("Figure Reproduction")
    print()

    target = input(f"Output directory (default: {os.path.join(config.OUTPUT_DIR, 'figures')}): ").strip()
    print()
    reproduce(target or None)
