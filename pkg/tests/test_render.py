import os

import numpy as np
import pytest
from PIL import Image
from pydantic import ValidationError

from backend.recurrence import UMatrix, solve_screen
from backend.render import (
    Colormap,
    OutputFormat,
    Overlay,
    RenderConfig,
    caustic_basename,
    format_value,
    normalized_levels,
    read_screen_csv,
    render_screen,
    screen_basename,
    screen_image_array,
    write_caustic_csv,
    write_caustic_index,
    write_caustic_svg,
    write_screen_csv,
)
from backend.semiclassics import GeomSpec, trace_caustic, trace_ridges
from backend.symmetry import ScreenSpec


def test_render_config_validation():
    cfg = RenderConfig()
    assert cfg.floor == 1e-10 and cfg.ceiling == 1.0
    with pytest.raises(ValidationError):
        RenderConfig(floor=0.5, ceiling=0.1)
    with pytest.raises(ValidationError):
        RenderConfig(floor=0.0)
    with pytest.raises(ValidationError):
        RenderConfig(ceiling=2.0)
    with pytest.raises(ValidationError):
        RenderConfig(scale=0)


def test_overlay_flags():
    assert Overlay.BOTH.caustic and Overlay.BOTH.ridge
    assert Overlay.CAUSTIC.caustic and not Overlay.CAUSTIC.ridge
    assert not Overlay.NONE.caustic and not Overlay.NONE.ridge


def test_normalized_levels():
    cfg = RenderConfig(floor=1e-4, ceiling=1.0)
    levels = normalized_levels(np.array([0.0, 1e-8, 1e-4, 1e-2, -1.0, 3.0]), cfg)
    np.testing.assert_allclose(levels, [0.0, 0.0, 0.0, 0.5, 1.0, 1.0], atol=1e-12)


def test_image_orientation(small_spec):
    values = np.zeros((3, 3))
    values[0, 2] = 1.0  # x = x_min, delta = delta_max
    u = UMatrix(small_spec, values)
    pixels = screen_image_array(u, RenderConfig())
    assert pixels.shape == (3, 3)
    assert pixels[0, 0] == 255
    assert pixels.sum() == 255


def test_image_scale_and_color(small_spec):
    u = solve_screen(small_spec)
    gray = screen_image_array(u, RenderConfig(scale=4))
    assert gray.shape == (12, 12)
    assert gray.dtype == np.uint8
    color = screen_image_array(u, RenderConfig(), colored=True)
    assert color.shape == (3, 3, 3)


def test_format_value():
    assert format_value(0.0) == "0"
    assert format_value(-0.0) == "0"
    assert float(format_value(1 / 3)) == 1 / 3


def test_csv_layout(tmp_path, small_spec):
    u = solve_screen(small_spec)
    path = write_screen_csv(u, str(tmp_path / "screen.csv"))
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0] == "x,delta,u"
    assert lines[1].startswith("0.0,-1.0,")
    assert "1.0,0.0,0" in lines
    assert len(lines) == 10

    doubled = write_screen_csv(u, str(tmp_path / "doubled.csv"), doubled_ints=True)
    assert open(doubled, encoding="utf-8").readline().strip() == "x2,delta2,u"


def test_csv_round_trip(tmp_path):
    spec = ScreenSpec.of("3/2", "5/2", "1/2")
    u = solve_screen(spec)
    for doubled in (False, True):
        path = write_screen_csv(u, str(tmp_path / f"s{doubled}.csv"), doubled)
        back = read_screen_csv(path, spec)
        np.testing.assert_array_equal(back.values, u.values)


def test_csv_reader_rejects_wrong_screens(tmp_path, small_spec):
    path = write_screen_csv(solve_screen(small_spec), str(tmp_path / "screen.csv"))
    with pytest.raises(ValueError):
        read_screen_csv(path, ScreenSpec.of(1, 3, 0))


def test_render_screen_bundle(tmp_path):
    u = solve_screen(ScreenSpec.of(1, 3, 0))
    formats = [OutputFormat.CSV, OutputFormat.PGM, OutputFormat.PPM, OutputFormat.SVG]
    paths = render_screen(u, str(tmp_path), formats, RenderConfig(colormap=Colormap.VIRIDIS))
    assert [os.path.basename(p) for p in paths] == [
        "screen_a1.0_b3.0_s0.0.csv",
        "screen_a1.0_b3.0_s0.0.pgm",
        "screen_a1.0_b3.0_s0.0.ppm",
        "screen_a1.0_b3.0_s0.0.svg",
    ]
    with open(paths[1], "rb") as f:
        assert f.read(2) == b"P5"
    with open(paths[2], "rb") as f:
        assert f.read(2) == b"P6"
    assert Image.open(paths[1]).size == (3, 3)
    svg = open(paths[3], encoding="utf-8").read()
    assert svg.count("<rect") == 9
    assert "<polyline" in svg


def test_svg_without_overlays(tmp_path):
    u = solve_screen(ScreenSpec.of(1, 3, 0))
    paths = render_screen(u, str(tmp_path), [OutputFormat.SVG], RenderConfig(overlay=Overlay.NONE))
    assert "<polyline" not in open(paths[0], encoding="utf-8").read()


def test_pixmaps_are_deterministic(tmp_path):
    u = solve_screen(ScreenSpec.of(1, 3, 0))
    first = render_screen(u, str(tmp_path / "a"), [OutputFormat.PGM])[0]
    second = render_screen(solve_screen(ScreenSpec.of(1, 3, 0)), str(tmp_path / "b"), [OutputFormat.PGM])[0]
    assert open(first, "rb").read() == open(second, "rb").read()


def test_screen_basename_uses_decimals():
    assert screen_basename(ScreenSpec.of("3/2", "5/2", "-1/2")) == "screen_a1.5_b2.5_s-0.5"


def test_caustic_files(tmp_path):
    geom = GeomSpec.of("3/2", "7/2", 1)
    curve = trace_caustic(geom)
    stem = str(tmp_path / caustic_basename(curve))
    csv_path = write_caustic_csv(curve, stem + ".csv")
    lines = open(csv_path, encoding="utf-8").read().splitlines()
    assert lines[0] == "J3,delta_minus,delta_plus"
    assert len(lines) == len(curve.samples) + 1

    svg_path = write_caustic_svg(curve, trace_ridges(geom), stem + ".svg")
    assert "(cusp)" in open(svg_path, encoding="utf-8").read()

    index = write_caustic_index([curve], [svg_path], str(tmp_path / "caustics.csv"))
    rows = open(index, encoding="utf-8").read().splitlines()
    assert rows[0] == "sigma,cusp,samples,path"
    assert rows[1].startswith("1.0,1,")
    assert rows[1].endswith(os.path.basename(svg_path))
