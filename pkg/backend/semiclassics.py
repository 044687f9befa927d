# semiclassics.py - Oriented area, ridges, caustics and cusps over the (J3, delta) plane

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import numpy as np

from backend import config
from backend.errors import ImaginaryRidgeError, NotATriangleError
from backend.halfint import HalfInt, HalfIntLike
from backend.symmetry import ScreenSpec

logger = logging.getLogger(__name__)

HALF = HalfInt(1)

# Caustic endpoint refinement stops once the two branches are this close
BRANCH_GAP = 1e-6
_MAX_BISECTIONS = 80


# ========== GEOMETRY ==========

@dataclass(frozen=True)
class GeomSpec:
    """Side lengths J1 = a + 1/2, J2 = b + 1/2 of the triangle and the fixed sigma"""

    J1: HalfInt
    J2: HalfInt
    sigma: HalfInt

    def __post_init__(self):
        if self.J1.twice <= 0 or self.J2.twice <= 0:
            raise ValueError(f"J1 and J2 must be positive, got {self.J1}, {self.J2}")

    @classmethod
    def of(cls, J1: HalfIntLike, J2: HalfIntLike, sigma: HalfIntLike = 0) -> "GeomSpec":
        return cls(HalfInt.of(J1), HalfInt.of(J2), HalfInt.of(sigma))

    @classmethod
    def from_screen(cls, spec: ScreenSpec) -> "GeomSpec":
        return cls(spec.a + HALF, spec.b + HALF, spec.sigma)

    def with_sigma(self, sigma: HalfIntLike) -> "GeomSpec":
        return GeomSpec(self.J1, self.J2, HalfInt.of(sigma))

    @property
    def j1(self) -> float:
        return float(self.J1)

    @property
    def j2(self) -> float:
        return float(self.J2)

    @property
    def s(self) -> float:
        return float(self.sigma)

    @property
    def j3_range(self) -> Tuple[float, float]:
        """Where a real caustic can exist: max(|J1-J2|, 2|sigma|) <= J3 <= J1+J2"""
        return max(abs(self.j1 - self.j2), 2 * abs(self.s)), self.j1 + self.j2

    def __str__(self) -> str:
        return f"J1={self.J1}, J2={self.J2}, sigma={self.sigma}"


def heron_squared(J1: float, J2: float, J3: float) -> float:
    """F^2 from Heron's product, signed: negative outside the triangle inequality"""
    return ((J1 + J2 + J3) * (-J1 + J2 + J3) * (J1 - J2 + J3) * (J1 + J2 - J3)) / 16


def heron_area(J1: float, J2: float, J3: float) -> float:
    """Area of the triangle with sides J1, J2, J3

    Raises:
        NotATriangleError: the sides violate the triangle inequality
    """
    squared = heron_squared(J1, J2, J3)
    if squared < 0:
        if -squared > 1e-14 * (J1 + J2 + J3) ** 4:
            raise NotATriangleError(f"({J1}, {J2}, {J3}) is not a triangle")
        return 0.0
    return math.sqrt(squared)


# ========== ORIENTED AREA ==========

def oriented_area_squared_det(geom: GeomSpec, J3: float, delta: float) -> float:
    """S^2 as -1/16 times the bordered 4x4 determinant"""
    s = geom.s
    alpha, beta = s + delta, s - delta
    A = geom.j1 ** 2 - alpha ** 2
    B = geom.j2 ** 2 - beta ** 2
    C = J3 ** 2 - 4 * s ** 2
    bordered = np.array([
        [0.0, A, B, 1.0],
        [A, 0.0, C, 1.0],
        [B, C, 0.0, 1.0],
        [1.0, 1.0, 1.0, 0.0],
    ])
    return -float(np.linalg.det(bordered)) / 16


def oriented_area_squared(geom: GeomSpec, J3: float, delta: float, check: bool = False) -> float:
    """S^2 = F^2 + (sigma^2 - delta^2) J3^2 / 4 - sigma[(sigma+delta) J2^2 + (sigma-delta) J1^2] / 2

    Positive in the classically allowed region, negative where forbidden.

    Args:
        geom: Side lengths and sigma
        J3: Third side (x + 1/2 on a screen)
        delta: Ordinate
        check: Also evaluate the determinant form and insist both agree

    Raises:
        ArithmeticError: check mode only, the two forms disagree
    """
    s = geom.s
    J1sq, J2sq, J3sq = geom.j1 ** 2, geom.j2 ** 2, J3 ** 2
    value = (heron_squared(geom.j1, geom.j2, J3)
             + (s * s - delta * delta) * J3sq / 4
             - s * ((s + delta) * J2sq + (s - delta) * J1sq) / 2)
    if check:
        other = oriented_area_squared_det(geom, J3, delta)
        scale = max(1.0, J1sq * J1sq, J2sq * J2sq, J3sq * J3sq)
        if abs(value - other) > 1e-10 * scale:
            raise ArithmeticError(f"S^2 forms disagree at J3={J3}, delta={delta}: {value} vs {other}")
    return value


# ========== RIDGES ==========

def ridge_delta(geom: GeomSpec, J3: float) -> float:
    """delta*(J3) = sigma (J1^2 - J2^2) / J3^2"""
    if J3 <= 0:
        raise ValueError(f"J3 must be positive, got {J3}")
    return geom.s * (geom.j1 ** 2 - geom.j2 ** 2) / J3 ** 2


def ridge_x(geom: GeomSpec, delta: float) -> float:
    """J3*(delta) = sqrt(J1^2 + J2^2 + 2(sigma^2 - delta^2))"""
    radicand = geom.j1 ** 2 + geom.j2 ** 2 + 2 * (geom.s ** 2 - delta ** 2)
    if radicand < 0:
        raise ImaginaryRidgeError(f"J3*({delta}) is imaginary for {geom}")
    return math.sqrt(radicand)


# ========== CAUSTICS ==========

def caustic_delta(geom: GeomSpec, J3: float) -> Optional[Tuple[float, float]]:
    """(delta_minus, delta_plus) where S^2 = 0 at this J3, or None when complex"""
    if J3 <= 0:
        return None
    tolerance = 1e-14 * (geom.j1 + geom.j2 + J3) ** 4
    area_sq = heron_squared(geom.j1, geom.j2, J3)
    height_sq = J3 * J3 - 4 * geom.s ** 2
    if area_sq < -tolerance or height_sq < -1e-12 * max(1.0, J3 * J3):
        return None
    spread = 2 * math.sqrt(max(area_sq, 0.0)) * math.sqrt(max(height_sq, 0.0)) / (J3 * J3)
    centre = ridge_delta(geom, J3)
    return centre - spread, centre + spread


def cusp_sigma(geom: GeomSpec) -> FrozenSet[HalfInt]:
    """sigma = +-(J1 - J2)/2, when that lies on the half-integer lattice"""
    difference = geom.J1 - geom.J2
    if difference.twice % 2:
        return frozenset()
    half = difference.half()
    return frozenset({half, -half})


def has_cusp(geom: GeomSpec) -> bool:
    return geom.sigma in cusp_sigma(geom)


def cusp_point(geom: GeomSpec) -> Optional[Tuple[float, float]]:
    """(J3, delta) where the branches meet at J3 = 2|sigma|, if this sigma has a cusp

    None for J1 == J2, sigma == 0: the branches run into the two left
    corners delta = -J1 and +J1 as J3 -> 0 and never meet.
    """
    if not has_cusp(geom):
        return None
    J3 = 2 * abs(geom.s)
    if J3 == 0:
        return None
    return J3, ridge_delta(geom, J3)


def cusp_corner(geom: GeomSpec) -> Optional[str]:
    """'upper' or 'lower' left corner of the screen holding the cusp"""
    point = cusp_point(geom)
    if point is None or point[1] == 0:
        return None
    return "upper" if point[1] > 0 else "lower"


@dataclass(frozen=True)
class CausticCurve:
    """Sampled caustic branches for one sigma; delta_minus <= delta_plus everywhere"""

    geom: GeomSpec
    samples: Tuple[Tuple[float, float, float], ...]
    cusp_flag: bool

    @property
    def sigma(self) -> HalfInt:
        return self.geom.sigma

    def lower_branch(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((j3, lo) for j3, lo, _ in self.samples)

    def upper_branch(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((j3, hi) for j3, _, hi in self.samples)

    def closed_outline(self) -> Tuple[Tuple[float, float], ...]:
        """Lower branch left to right, then upper branch back"""
        return self.lower_branch() + tuple(reversed(self.upper_branch()))


def _refine_end(geom: GeomSpec, end: float, inner: float) -> list:
    """Bisect from inner toward end until the branch gap drops below BRANCH_GAP"""
    extra = []
    for _ in range(_MAX_BISECTIONS):
        inner = (inner + end) / 2
        branches = caustic_delta(geom, inner)
        if branches is None:
            break
        extra.append((inner, *branches))
        if branches[1] - branches[0] < BRANCH_GAP:
            break
    return extra


def trace_caustic(geom: GeomSpec, density: Optional[int] = None) -> CausticCurve:
    """Sample both caustic branches over the J3 range of geom

    Args:
        geom: Side lengths and sigma
        density: Samples per unit J3 (defaults to THREEJ_CAUSTIC_DENSITY)
    """
    density = density or config.CAUSTIC_DENSITY
    lo, hi = geom.j3_range
    if lo > hi or hi <= 0:
        return CausticCurve(geom, (), has_cusp(geom))

    count = max(2, int(math.ceil((hi - lo) * density)) + 1)
    grid = np.linspace(lo, hi, count)
    samples = []
    for J3 in grid:
        branches = caustic_delta(geom, float(J3))
        if branches is not None:
            samples.append((float(J3), *branches))

    if len(grid) > 1:
        samples.extend(_refine_end(geom, float(grid[0]), float(grid[1])))
        samples.extend(_refine_end(geom, float(grid[-1]), float(grid[-2])))
    samples = tuple(sorted(set(samples)))
    logger.debug("caustic for %s: %d samples", geom, len(samples))
    return CausticCurve(geom, samples, has_cusp(geom))


@dataclass(frozen=True)
class Ridges:
    """delta*(J3) as (J3, delta) points and J3*(delta) as (J3, delta) points"""

    delta_star: Tuple[Tuple[float, float], ...]
    x_star: Tuple[Tuple[float, float], ...]


def trace_ridges(geom: GeomSpec, spec: Optional[ScreenSpec] = None,
                 density: Optional[int] = None) -> Ridges:
    """Sample both ridges, over a screen's extent when one is given"""
    density = density or config.CAUSTIC_DENSITY
    if spec is not None:
        j3_lo, j3_hi = float(spec.x_min) + 0.5, float(spec.x_max) + 0.5
        d_lo, d_hi = float(spec.delta_min), float(spec.delta_max)
    else:
        j3_lo, j3_hi = geom.j3_range
        d_lo, d_hi = -(geom.j1 + geom.j2) / 2, (geom.j1 + geom.j2) / 2
    j3_lo = max(j3_lo, 1.0 / density)

    delta_star = []
    if j3_hi >= j3_lo:
        for J3 in np.linspace(j3_lo, j3_hi, max(2, int(math.ceil((j3_hi - j3_lo) * density)) + 1)):
            delta_star.append((float(J3), ridge_delta(geom, float(J3))))

    x_star = []
    if d_hi >= d_lo:
        for delta in np.linspace(d_lo, d_hi, max(2, int(math.ceil((d_hi - d_lo) * density)) + 1)):
            try:
                x_star.append((ridge_x(geom, float(delta)), float(delta)))
            except ImaginaryRidgeError:
                continue
    return Ridges(tuple(delta_star), tuple(x_star))


def caustic_sigmas(J1: HalfIntLike, J2: HalfIntLike) -> Tuple[HalfInt, ...]:
    """Lattice sigma values with a nonempty caustic domain: 2|sigma| <= J1 + J2"""
    total = HalfInt.of(J1) + HalfInt.of(J2)
    bound = total.twice // 2
    return tuple(HalfInt(t) for t in range(-bound, bound + 1))


# ========== CLASSIFICATION ==========

class PointClass(str, enum.Enum):
    CLASSICAL = "classical"
    FORBIDDEN = "forbidden"
    CAUSTIC = "caustic"


def classify_point(geom: GeomSpec, J3: float, delta: float) -> PointClass:
    """Sign of S^2 with a band of 1e-9 max(1, J3^4) around zero"""
    value = oriented_area_squared(geom, J3, delta)
    epsilon = 1e-9 * max(1.0, J3 ** 4)
    if value > epsilon:
        return PointClass.CLASSICAL
    if value < -epsilon:
        return PointClass.FORBIDDEN
    return PointClass.CAUSTIC


def classify_screen(spec: ScreenSpec) -> np.ndarray:
    """PointClass value strings for every cell; rows x, columns delta, J3 = x + 1/2

    Compare against the member's .value: labels == PointClass.CLASSICAL.value
    """
    geom = GeomSpec.from_screen(spec)
    width = max(len(c.value) for c in PointClass)
    labels = np.empty((spec.x_count, spec.delta_count), dtype=f"<U{width}")
    for i, x in enumerate(spec.x_labels()):
        for j, d in enumerate(spec.delta_labels()):
            labels[i, j] = classify_point(geom, float(x) + 0.5, float(d)).value
    return labels
