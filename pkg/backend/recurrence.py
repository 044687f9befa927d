# recurrence.py - Three-term recurrences in delta and x as tridiagonal eigenproblems

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from backend.errors import (
    EigensolverError,
    NegativeRadicandError,
    OutOfScreenError,
    SignAnchorError,
    SingularCoefficientError,
)
from backend.exact_core import exact_3j
from backend.halfint import HalfInt
from backend.symmetry import ScreenSpec, forced_zero

logger = logging.getLogger(__name__)

# Sweeps are rescaled once an entry passes this magnitude
_RESCALE = 1e100


class PVariant(str, enum.Enum):
    """Which first factor the delta coefficient p(delta) uses"""
    DERIVED = "derived"          # (a - sigma - delta + 1)
    TRANSCRIBED = "transcribed"  # (a - sigma - delta - 1), kept as a negative control


class SolveMethod(str, enum.Enum):
    EIGEN = "eigen"          # delta-problem, one eigenvector per x column
    DUAL = "dual"            # x-problem, one eigenvector per delta row
    RECURSION = "recursion"  # two-sided delta sweeps matched near the ridge


# ========== COEFFICIENTS ==========

def _p_radicand(spec: ScreenSpec, d2: int, variant: PVariant) -> int:
    """16 p(delta)^2 in doubled units; p couples delta-1 with delta"""
    a2, b2, s2 = spec.a.twice, spec.b.twice, spec.sigma.twice
    shift = 2 if variant == PVariant.DERIVED else -2
    return (a2 - s2 - d2 + shift) * (a2 + s2 + d2) * (b2 + s2 - d2 + 2) * (b2 - s2 + d2)


def p_coefficient(spec: ScreenSpec, delta: HalfInt, variant: PVariant = PVariant.DERIVED) -> float:
    radicand = _p_radicand(spec, delta.twice, variant)
    if radicand < 0:
        raise NegativeRadicandError(
            f"p({delta}) has radicand {radicand}/16 on screen {spec} ({variant.value} form)")
    return math.sqrt(radicand) / 4


def p0_coefficient(spec: ScreenSpec, x: HalfInt, delta: HalfInt) -> float:
    """a(a+1) + b(b+1) - x(x+1) + 2(sigma^2 - delta^2)"""
    a2, b2, x2 = spec.a.twice, spec.b.twice, x.twice
    s2, d2 = spec.sigma.twice, delta.twice
    return (a2 * (a2 + 2) + b2 * (b2 + 2) - x2 * (x2 + 2) + 2 * (s2 * s2 - d2 * d2)) / 4


def q_coefficient(spec: ScreenSpec, x: HalfInt) -> float:
    """q(x), coupling x-1 with x; zero at x_min

    Raises:
        NegativeRadicandError: x outside the triangle range
        SingularCoefficientError: zero denominator with a nonzero numerator
    """
    a2, b2, s2, x2 = spec.a.twice, spec.b.twice, spec.sigma.twice, x.twice
    radicand = (x2 * x2 - (a2 - b2) ** 2) * ((a2 + b2 + 2) ** 2 - x2 * x2) * (x2 * x2 - 4 * s2 * s2)
    if radicand < 0:
        raise NegativeRadicandError(f"q({x}) has negative radicand on screen {spec}")
    if radicand == 0:
        return 0.0
    denominator = x2 * x2 - 1
    if x2 <= 0 or denominator <= 0:
        raise SingularCoefficientError(f"q({x}) divides by zero on screen {spec}")
    return math.sqrt(radicand) / (4 * x2 * math.sqrt(denominator))


def x_diagonal(spec: ScreenSpec, x: HalfInt) -> float:
    """2 sigma [a(a+1) - b(b+1)] / (x(x+1)), zero when the numerator vanishes"""
    a2, b2, s2, x2 = spec.a.twice, spec.b.twice, spec.sigma.twice, x.twice
    numerator = s2 * (a2 * (a2 + 2) - b2 * (b2 + 2))
    if numerator == 0:
        return 0.0
    denominator = x2 * (x2 + 2)
    if denominator == 0:
        raise SingularCoefficientError(f"x=0 with sigma={spec.sigma}, a != b on screen {spec}")
    return numerator / denominator


def _check_on_screen(spec: ScreenSpec, x: HalfInt, delta: HalfInt):
    if not spec.contains(x, delta):
        raise OutOfScreenError(f"(x={x}, delta={delta}) is not on screen {spec}")


def delta_coefficients(spec: ScreenSpec, x: HalfInt, delta: HalfInt,
                       variant: PVariant = PVariant.DERIVED) -> Tuple[float, float]:
    """(p(delta), p0(delta)) of p(d+1)U(d+1) + p0(d)U(d) + p(d)U(d-1) = 0"""
    _check_on_screen(spec, x, delta)
    return p_coefficient(spec, delta, variant), p0_coefficient(spec, x, delta)


def x_coefficients(spec: ScreenSpec, x: HalfInt, delta: HalfInt) -> Tuple[float, float]:
    """(q(x), q0(x)) of q(x+1)U(x+1) + q0(x)U(x) + q(x)U(x-1) = 0"""
    _check_on_screen(spec, x, delta)
    return q_coefficient(spec, x), x_diagonal(spec, x) - 2 * float(delta)


def _p_vector(spec: ScreenSpec, variant: PVariant) -> np.ndarray:
    """p[j] couples delta index j-1 with j; p[0] is the outward boundary term"""
    labels = spec.delta_labels()
    p = np.zeros(len(labels))
    for j in range(1, len(labels)):
        p[j] = p_coefficient(spec, labels[j], variant)
    return p


def _q_vector(spec: ScreenSpec) -> np.ndarray:
    labels = spec.x_labels()
    q = np.zeros(len(labels))
    for i in range(1, len(labels)):
        q[i] = q_coefficient(spec, labels[i])
    return q


def _p0_grid(spec: ScreenSpec) -> np.ndarray:
    """p0 for every (x, delta) cell, rows indexed by x"""
    return np.array([[p0_coefficient(spec, x, d) for d in spec.delta_labels()]
                     for x in spec.x_labels()])


# ========== TRIDIAGONAL PROBLEMS ==========

@dataclass(frozen=True)
class Tridiag:
    """Symmetric tridiagonal matrix with a label per basis vector"""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    labels: Tuple[HalfInt, ...]

    def __post_init__(self):
        n = len(self.diagonal)
        if len(self.offdiagonal) != max(n - 1, 0) or len(self.labels) != n:
            raise ValueError("offdiagonal must be one shorter than the diagonal")
        if np.any(self.offdiagonal < 0):
            raise ValueError("offdiagonal entries must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenvalues ascending and the matching orthonormal eigenvectors (columns)

        Raises:
            EigensolverError: LAPACK did not converge
        """
        if self.size == 1:
            return self.diagonal.astype(float).copy(), np.ones((1, 1))
        try:
            return eigh_tridiagonal(self.diagonal, self.offdiagonal)
        except LinAlgError as e:
            raise EigensolverError(f"tridiagonal eigensolver failed on {self.size}x{self.size}: {e}") from e

    def eigvalsh(self) -> np.ndarray:
        if self.size == 1:
            return self.diagonal.astype(float).copy()
        try:
            return eigh_tridiagonal(self.diagonal, self.offdiagonal, eigvals_only=True)
        except LinAlgError as e:
            raise EigensolverError(str(e)) from e


def build_delta_problem(spec: ScreenSpec, x: Optional[HalfInt] = None,
                        variant: PVariant = PVariant.DERIVED) -> Tridiag:
    """Diagonal 2(sigma^2 - delta^2), off-diagonal p(delta)

    The matrix does not depend on x; its eigenvalues are
    x(x+1) - a(a+1) - b(b+1), one per column of the screen.
    """
    labels = spec.delta_labels()
    s2 = spec.sigma.twice
    diagonal = np.array([(s2 * s2 - d.twice * d.twice) / 2 for d in labels])
    offdiagonal = _p_vector(spec, variant)[1:]
    return Tridiag(diagonal, offdiagonal, labels)


def build_x_problem(spec: ScreenSpec, delta: Optional[HalfInt] = None) -> Tridiag:
    """Diagonal 2 sigma[a(a+1)-b(b+1)]/(x(x+1)), off-diagonal q(x); eigenvalues 2 delta"""
    labels = spec.x_labels()
    diagonal = np.array([x_diagonal(spec, x) for x in labels])
    offdiagonal = _q_vector(spec)[1:]
    return Tridiag(diagonal, offdiagonal, labels)


def delta_spectrum(spec: ScreenSpec) -> np.ndarray:
    """x(x+1) - a(a+1) - b(b+1) for every x on the screen, ascending"""
    a2, b2 = spec.a.twice, spec.b.twice
    return np.array([(x.twice * (x.twice + 2) - a2 * (a2 + 2) - b2 * (b2 + 2)) / 4
                     for x in spec.x_labels()])


def x_spectrum(spec: ScreenSpec) -> np.ndarray:
    return np.array([float(d.twice) for d in spec.delta_labels()])


# ========== U MATRIX ==========

@dataclass(frozen=True)
class UMatrix:
    """U(x, delta) = sqrt(2x+1) * 3j(a, b, x; sigma+delta, sigma-delta, -2 sigma)

    values[i, j] holds x = x_min + i, delta = delta_min + j. The array is
    read-only after construction.
    """

    spec: ScreenSpec
    values: np.ndarray
    method: str = SolveMethod.EIGEN.value

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.spec.x_count, self.spec.delta_count):
            raise ValueError(f"values shape {values.shape} does not fit screen {self.spec}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _index(self, x: HalfInt, delta: HalfInt) -> Tuple[int, int]:
        _check_on_screen(self.spec, x, delta)
        return (x - self.spec.x_min).to_int(), (delta - self.spec.delta_min).to_int()

    def at(self, x: HalfInt, delta: HalfInt) -> float:
        return float(self.values[self._index(x, delta)])

    def column(self, x: HalfInt) -> np.ndarray:
        """U(x, .) over the delta range"""
        return self.values[self._index(x, self.spec.delta_min)[0]]

    def row(self, delta: HalfInt) -> np.ndarray:
        """U(., delta) over the x range"""
        return self.values[:, self._index(self.spec.x_min, delta)[1]]

    def entries(self) -> Iterator[Tuple[HalfInt, HalfInt, float]]:
        """(x, delta, u) in x-major order"""
        for i, x in enumerate(self.spec.x_labels()):
            for j, d in enumerate(self.spec.delta_labels()):
                yield x, d, float(self.values[i, j])

    def orthogonality_error(self) -> float:
        """max of |U^T U - I| and |U U^T - I|"""
        u = self.values
        eye = np.eye(u.shape[0])
        return float(max(np.abs(u.T @ u - eye).max(), np.abs(u @ u.T - eye).max()))

    def max_abs_difference(self, other: "UMatrix") -> float:
        if other.spec != self.spec:
            raise ValueError("screens differ")
        return float(np.abs(self.values - other.values).max())


# ========== SIGNS ==========

def anchor_sign(spec: ScreenSpec) -> int:
    """(-1)**(a-b-2 sigma): sign of every entry of the x = a+b column"""
    exponent_twice = spec.a.twice - spec.b.twice - 2 * spec.sigma.twice
    return -1 if (exponent_twice // 2) % 2 else 1


def _fix_column_signs(spec: ScreenSpec, values: np.ndarray) -> np.ndarray:
    """Anchor the x = a+b column, then carry signs down with the x-recurrence"""
    s0 = anchor_sign(spec)
    top = values[-1]
    k = int(np.argmax(np.abs(top)))
    if top[k] == 0:
        raise SignAnchorError(f"x = a+b column of {spec} is identically zero")
    if np.sign(top[k]) != s0:
        values[-1] = -values[-1]

    q = _q_vector(spec)
    diag = np.array([x_diagonal(spec, x) for x in spec.x_labels()])
    two_delta = np.array([float(d.twice) for d in spec.delta_labels()])
    n = values.shape[0]
    for i in range(n - 1, 0, -1):
        upper = values[i + 1] * q[i + 1] if i + 1 < n else 0.0
        predicted = ((two_delta - diag[i]) * values[i] - upper) / q[i]
        overlap = float(predicted @ values[i - 1])
        if overlap == 0 or not math.isfinite(overlap):
            raise SignAnchorError(f"cannot fix the sign of column {i - 1} of {spec}")
        if overlap < 0:
            values[i - 1] = -values[i - 1]
    return values


def _fix_row_signs(spec: ScreenSpec, values: np.ndarray, variant: PVariant) -> np.ndarray:
    """Anchor the delta = delta_max row, then carry signs down with the delta-recurrence"""
    s0 = anchor_sign(spec)
    top = values[:, -1]
    k = int(np.argmax(np.abs(top)))
    if top[k] == 0:
        raise SignAnchorError(f"delta = delta_max row of {spec} is identically zero")
    if np.sign(top[k]) != s0:
        values[:, -1] = -values[:, -1]

    p = _p_vector(spec, variant)
    p0 = _p0_grid(spec)
    n = values.shape[1]
    for j in range(n - 1, 0, -1):
        upper = values[:, j + 1] * p[j + 1] if j + 1 < n else 0.0
        predicted = -(upper + p0[:, j] * values[:, j]) / p[j]
        overlap = float(predicted @ values[:, j - 1])
        if overlap == 0 or not math.isfinite(overlap):
            raise SignAnchorError(f"cannot fix the sign of row {j - 1} of {spec}")
        if overlap < 0:
            values[:, j - 1] = -values[:, j - 1]
    return values


def sign_convention(u: UMatrix) -> UMatrix:
    """Re-sign every column of U to the standard phase convention

    The x = a+b column carries (-1)**(a-b-2 sigma) everywhere; the other
    columns follow from the x-recurrence. Columns may arrive with
    arbitrary signs; rows must not have been flipped independently.

    Raises:
        SignAnchorError: an anchor or propagated overlap is exactly zero
    """
    return UMatrix(u.spec, _fix_column_signs(u.spec, np.array(u.values)), u.method)


# ========== SOLVERS ==========

def _forced_zero_mask(spec: ScreenSpec) -> np.ndarray:
    mask = np.zeros((spec.x_count, spec.delta_count), dtype=bool)
    for i, x in enumerate(spec.x_labels()):
        if (spec.a + spec.b + x).to_int() % 2 == 0:
            continue
        for j, d in enumerate(spec.delta_labels()):
            mask[i, j] = forced_zero(spec.args_at(x, d))
    return mask


def _forward_to_peak(p0: np.ndarray, p: np.ndarray) -> Tuple[np.ndarray, int]:
    """Sweep up from delta_min until |U| first decreases; returns (values, peak index)

    Entries past peak + 1 are left at zero.
    """
    n = len(p0)
    u = np.zeros(n)
    u[0] = 1.0
    for j in range(n - 1):
        lower = p[j] * u[j - 1] if j > 0 else 0.0
        u[j + 1] = -(p0[j] * u[j] + lower) / p[j + 1]
        if abs(u[j + 1]) < abs(u[j]):
            return u, j
        if abs(u[j + 1]) > _RESCALE:
            u[: j + 2] /= abs(u[j + 1])
    return u, n - 1


def _backward_to(p0: np.ndarray, p: np.ndarray, stop: int) -> np.ndarray:
    """Sweep down from delta_max to index stop"""
    n = len(p0)
    u = np.zeros(n)
    u[-1] = 1.0
    for j in range(n - 1, stop, -1):
        upper = p[j + 1] * u[j + 1] if j + 1 < n else 0.0
        u[j - 1] = -(p0[j] * u[j] + upper) / p[j]
        if abs(u[j - 1]) > _RESCALE:
            u[j - 1:] /= abs(u[j - 1])
    return u


def _two_sided_column(p0: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Forward sweep up to its first maximum, backward sweep beyond, matched by least squares"""
    n = len(p0)
    if n == 1:
        return np.ones(1)
    f, m = _forward_to_peak(p0, p)
    g = _backward_to(p0, p, max(m - 1, 0))
    window = slice(max(m - 1, 0), min(m + 2, n))
    weight = float(g[window] @ g[window])
    if weight == 0:
        raise EigensolverError("backward sweep vanishes at the matching point")
    scale = float(f[window] @ g[window]) / weight
    u = np.concatenate([f[: m + 1], scale * g[m + 1:]])
    return u / np.linalg.norm(u)


def _solve_eigen(spec: ScreenSpec, variant: PVariant) -> np.ndarray:
    _, vectors = build_delta_problem(spec, variant=variant).eigh()
    # eigenvalues ascend with x, so eigenvector k is column x_min + k
    return _fix_column_signs(spec, np.array(vectors.T))


def _solve_dual(spec: ScreenSpec, variant: PVariant) -> np.ndarray:
    _, vectors = build_x_problem(spec).eigh()
    return _fix_row_signs(spec, np.array(vectors), variant)


def _solve_recursion(spec: ScreenSpec, variant: PVariant) -> np.ndarray:
    p = np.append(_p_vector(spec, variant), 0.0)
    p0 = _p0_grid(spec)
    values = np.array([_two_sided_column(p0[i], p) for i in range(spec.x_count)])
    return _fix_column_signs(spec, values)


_SOLVERS = {
    SolveMethod.EIGEN: _solve_eigen,
    SolveMethod.DUAL: _solve_dual,
    SolveMethod.RECURSION: _solve_recursion,
}


def solve_screen(spec: ScreenSpec, method: SolveMethod = SolveMethod.EIGEN,
                 variant: PVariant = PVariant.DERIVED, snap_zeros: bool = True) -> UMatrix:
    """Every U(x, delta) of a screen in binary64

    Args:
        spec: The screen; any feasible (a, b, sigma) works, canonical ones are square by construction
        method: eigen (delta-problem), dual (x-problem) or recursion
        variant: p(delta) form; only the derived one reproduces U
        snap_zeros: Set symmetry-forced zeros to exactly 0.0

    Returns:
        UMatrix with the standard sign convention

    Raises:
        EigensolverError: the eigensolver did not converge
        SignAnchorError: a sign could not be fixed
        NegativeRadicandError: a coefficient formula went negative (transcribed variant)
    """
    method = SolveMethod(method)
    values = _SOLVERS[method](spec, PVariant(variant))
    if snap_zeros:
        values[_forced_zero_mask(spec)] = 0.0
    logger.debug("solved screen %s by %s (%dx%d)", spec, method.value, *values.shape)
    return UMatrix(spec, values, method.value)


# ========== ORACLE & RESIDUALS ==========

def u_value(spec: ScreenSpec, x: HalfInt, delta: HalfInt) -> float:
    """Single entry through the exact oracle"""
    _check_on_screen(spec, x, delta)
    return float(exact_3j(spec.args_at(x, delta)).scaled(x.twice + 1))


def oracle_screen(spec: ScreenSpec) -> UMatrix:
    """The whole screen through the exact oracle, rounded to binary64"""
    values = np.array([[u_value(spec, x, d) for d in spec.delta_labels()]
                       for x in spec.x_labels()])
    return UMatrix(spec, values, "oracle")


def delta_residuals(u: UMatrix, variant: PVariant = PVariant.DERIVED) -> float:
    """max |p(d+1)U(d+1) + p0(d)U(d) + p(d)U(d-1)| over the screen"""
    spec = u.spec
    p = _p_vector(spec, variant)
    p0 = _p0_grid(spec)
    values = u.values
    residual = p0 * values
    residual[:, :-1] += p[1:] * values[:, 1:]
    residual[:, 1:] += p[1:] * values[:, :-1]
    return float(np.abs(residual).max())


def x_residuals(u: UMatrix) -> float:
    """max |q(x+1)U(x+1) + q0(x)U(x) + q(x)U(x-1)| over the screen"""
    spec = u.spec
    q = _q_vector(spec)
    diag = np.array([x_diagonal(spec, x) for x in spec.x_labels()])
    two_delta = np.array([float(d.twice) for d in spec.delta_labels()])
    values = u.values
    residual = (diag[:, None] - two_delta[None, :]) * values
    residual[:-1, :] += q[1:, None] * values[1:, :]
    residual[1:, :] += q[1:, None] * values[:-1, :]
    return float(np.abs(residual).max())
