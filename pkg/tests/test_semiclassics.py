import math

import numpy as np
import pytest

from backend.errors import ImaginaryRidgeError, NotATriangleError
from backend.halfint import HalfInt
from backend.recurrence import solve_screen
from backend.semiclassics import (
    GeomSpec,
    PointClass,
    caustic_delta,
    caustic_sigmas,
    classify_point,
    classify_screen,
    cusp_corner,
    cusp_point,
    cusp_sigma,
    has_cusp,
    heron_area,
    heron_squared,
    oriented_area_squared,
    oriented_area_squared_det,
    ridge_delta,
    ridge_x,
    trace_caustic,
    trace_ridges,
)
from backend.symmetry import ScreenSpec


def h(value) -> HalfInt:
    return HalfInt.of(value)


# ========== AREAS ==========

def test_heron_examples():
    assert heron_area(3, 4, 5) == pytest.approx(6.0)
    assert heron_area(1, 1, 2) == 0.0
    with pytest.raises(NotATriangleError):
        heron_area(2, 3, 6)


def test_oriented_area_reduces_to_heron_at_sigma_zero():
    geom = GeomSpec.of(3, 4, 0)
    assert oriented_area_squared(geom, 5.0, 0.0) == pytest.approx(36.0)


def test_two_area_forms_agree(rng):
    for _ in range(200):
        J1, J2 = (HalfInt(int(v)) for v in rng.integers(1, 40, size=2))
        bound = (J1 + J2).twice // 2
        geom = GeomSpec(J1, J2, HalfInt(int(rng.integers(-bound, bound + 1))))
        J3 = float(rng.uniform(0.5, geom.j1 + geom.j2 + 2))
        delta = float(rng.uniform(-geom.j1 - geom.j2, geom.j1 + geom.j2))
        expected = oriented_area_squared_det(geom, J3, delta)
        scale = max(1.0, geom.j1, geom.j2, J3) ** 4
        assert oriented_area_squared(geom, J3, delta) == pytest.approx(expected, abs=1e-10 * scale)
        oriented_area_squared(geom, J3, delta, check=True)


# ========== RIDGES ==========

def test_ridge_examples():
    assert ridge_delta(GeomSpec.of(3, 4, 0), 5.0) == 0.0
    assert ridge_delta(GeomSpec.of(4, 4, 2), 3.0) == 0.0
    assert ridge_x(GeomSpec.of(3, 4, 0), 0.0) == pytest.approx(5.0)
    assert ridge_delta(GeomSpec.of(3, 4, 1), 5.0) == pytest.approx((9 - 16) / 25)


def test_ridge_errors():
    with pytest.raises(ValueError):
        ridge_delta(GeomSpec.of(3, 4, 0), 0.0)
    with pytest.raises(ImaginaryRidgeError):
        ridge_x(GeomSpec.of(1, 1, 0), 5.0)


def test_ridges_are_dual_at_sigma_zero():
    geom = GeomSpec.of("5/2", "9/2", 0)
    for J3 in np.linspace(2.5, 7.0, 10):
        assert ridge_delta(geom, float(J3)) == 0.0
    J3_star = ridge_x(geom, 0.0)
    assert J3_star == pytest.approx(math.hypot(geom.j1, geom.j2))
    assert ridge_delta(geom, J3_star) == 0.0


# ========== CAUSTICS ==========

def test_caustic_example():
    lower, upper = caustic_delta(GeomSpec.of(3, 4, 0), 5.0)
    assert lower == pytest.approx(-2.4)
    assert upper == pytest.approx(2.4)


def test_caustic_roots_match_a_direct_quadratic_solve():
    geom = GeomSpec.of("7/2", "15/2", "3/2")
    s, J1sq, J2sq = geom.s, geom.j1 ** 2, geom.j2 ** 2
    lo, hi = geom.j3_range
    for J3 in np.linspace(lo, hi, 14)[1:-1]:
        J3 = float(J3)
        # S^2 written out as a quadratic in delta
        coefficients = [
            -J3 * J3 / 4,
            -s * (J2sq - J1sq) / 2,
            heron_squared(geom.j1, geom.j2, J3) + s * s * J3 * J3 / 4 - s * s * (J1sq + J2sq) / 2,
        ]
        roots = np.sort(np.roots(coefficients).real)
        lower, upper = caustic_delta(geom, J3)
        assert lower == pytest.approx(roots[0], abs=1e-10)
        assert upper == pytest.approx(roots[1], abs=1e-10)


def test_caustic_branches_swap_under_sigma_negation(rng):
    for _ in range(300):
        J1, J2 = (HalfInt(int(v)) for v in rng.integers(1, 40, size=2))
        bound = (J1 + J2).twice // 2
        geom = GeomSpec(J1, J2, HalfInt(int(rng.integers(-bound, bound + 1))))
        lo, hi = geom.j3_range
        if lo >= hi:
            continue
        J3 = float(rng.uniform(lo, hi))
        lower, upper = caustic_delta(geom, J3)
        mirrored_lower, mirrored_upper = caustic_delta(geom.with_sigma(-geom.sigma), J3)
        scale = max(1.0, geom.j1, geom.j2)
        assert mirrored_lower == pytest.approx(-upper, abs=1e-12 * scale)
        assert mirrored_upper == pytest.approx(-lower, abs=1e-12 * scale)


def test_caustic_outside_the_triangle_is_complex():
    assert caustic_delta(GeomSpec.of(3, 4, 0), 8.0) is None
    assert caustic_delta(GeomSpec.of(3, 4, 2), 3.0) is None


def test_area_vanishes_on_random_caustics(rng):
    for _ in range(1000):
        J1, J2 = (HalfInt(int(v)) for v in rng.integers(1, 60, size=2))
        bound = (J1 + J2).twice // 2
        geom = GeomSpec(J1, J2, HalfInt(int(rng.integers(-bound, bound + 1))))
        lo, hi = geom.j3_range
        if lo >= hi:
            continue
        J3 = float(rng.uniform(lo, hi))
        branches = caustic_delta(geom, J3)
        assert branches is not None
        scale = max(geom.j1, geom.j2, J3) ** 4
        for delta in branches:
            assert abs(oriented_area_squared(geom, J3, delta)) <= 1e-9 * scale


def test_cusp_sigmas():
    geom = GeomSpec.of("3/2", "7/2")
    assert cusp_sigma(geom) == {h(1), h(-1)}
    cusped = [s for s in caustic_sigmas(geom.J1, geom.J2) if has_cusp(geom.with_sigma(s))]
    assert cusped == [h(-1), h(1)]
    assert cusp_sigma(GeomSpec.of("7/2", "7/2")) == {h(0)}
    assert cusp_sigma(GeomSpec.of(1, "3/2")) == frozenset()


def test_panel_sigmas():
    sigmas = caustic_sigmas("3/2", "7/2")
    assert len(sigmas) == 11
    assert len({abs(s) for s in sigmas}) == 6
    assert max(sigmas) == h("5/2")


def test_cusp_point_and_corner():
    geom = GeomSpec.of("3/2", "7/2", 1)
    J3, delta = cusp_point(geom)
    assert J3 == pytest.approx(2.0)
    assert delta == pytest.approx(-2.5)
    assert cusp_corner(geom) == "lower"
    assert cusp_corner(geom.with_sigma(-1)) == "upper"
    assert cusp_point(geom.with_sigma(0)) is None
    assert cusp_point(GeomSpec.of("7/2", "7/2", 0)) is None


def test_equal_sides_branches_end_in_both_left_corners():
    geom = GeomSpec.of("7/2", "7/2", 0)
    assert has_cusp(geom)
    lower, upper = caustic_delta(geom, 1e-4)
    assert lower == pytest.approx(-3.5, abs=1e-6)
    assert upper == pytest.approx(3.5, abs=1e-6)
    assert cusp_corner(geom) is None


def test_branches_meet_at_the_cusp():
    geom = GeomSpec.of("3/2", "7/2", 1)
    lower, upper = caustic_delta(geom, 2.0)
    assert upper - lower == pytest.approx(0.0, abs=1e-12)


def test_trace_caustic_samples():
    geom = GeomSpec.of("3/2", "7/2", "1/2")
    curve = trace_caustic(geom, density=32)
    assert not curve.cusp_flag
    lo, hi = geom.j3_range
    assert len(curve.samples) > 32
    assert all(lo <= j3 <= hi for j3, _, _ in curve.samples)
    assert all(d_minus <= d_plus for _, d_minus, d_plus in curve.samples)
    assert [s[0] for s in curve.samples] == sorted(s[0] for s in curve.samples)
    outline = curve.closed_outline()
    assert len(outline) == 2 * len(curve.samples)


def test_trace_ridges_over_a_screen():
    spec = ScreenSpec.of(3, 5, 1)
    ridges = trace_ridges(GeomSpec.from_screen(spec), spec, density=8)
    assert ridges.delta_star
    assert ridges.x_star
    assert all(j3 > 0 for j3, _ in ridges.delta_star)


# ========== CLASSIFICATION ==========

def test_classify_examples():
    geom = GeomSpec.of(3, 4, 0)
    assert classify_point(geom, 5.0, 0.0) == PointClass.CLASSICAL
    assert classify_point(geom, 5.0, 2.4) == PointClass.CAUSTIC
    assert classify_point(geom, 5.0, 3.5) == PointClass.FORBIDDEN


@pytest.mark.parametrize("sigma", [0, 10, 20])
def test_screen_peaks_sit_in_the_classical_region(sigma):
    spec = ScreenSpec.of(50, 50, sigma)
    labels = classify_screen(spec)
    allowed = (labels == PointClass.CLASSICAL.value) | (labels == PointClass.CAUSTIC.value)
    values = np.abs(solve_screen(spec).values)
    for i in range(spec.x_count):
        j = int(np.argmax(values[i]))
        window = allowed[max(i - 2, 0): i + 3, max(j - 2, 0): j + 3]
        assert window.any(), f"column {i} peaks at delta index {j}"


def test_classify_screen_shape():
    spec = ScreenSpec.of(2, 3, "1/2")
    labels = classify_screen(spec)
    assert labels.shape == (spec.x_count, spec.delta_count)
    assert math.isclose(float(spec.x_max) + 0.5, GeomSpec.from_screen(spec).j1 + GeomSpec.from_screen(spec).j2 - 0.5)


def test_classify_screen_masks_match_pointwise_labels():
    spec = ScreenSpec.of(10, 10, 0)
    geom = GeomSpec.from_screen(spec)
    labels = classify_screen(spec)
    for cls in PointClass:
        mask = labels == cls.value
        expected = sum(
            classify_point(geom, float(x) + 0.5, float(d)) == cls
            for x in spec.x_labels() for d in spec.delta_labels()
        )
        assert int(mask.sum()) == expected
    assert (labels == PointClass.CLASSICAL.value).any()
    assert (labels == PointClass.FORBIDDEN.value).any()
