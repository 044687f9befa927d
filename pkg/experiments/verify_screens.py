"""
Screen verification - oracle, orthogonality, spectrum, annihilation and orbit suites
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from backend import config
from backend.errors import InvalidArgumentsError, ThreeJError
from backend.exact_core import exact_3j
from backend.halfint import HalfInt
from backend.recurrence import (
    PVariant,
    SolveMethod,
    build_delta_problem,
    build_x_problem,
    delta_residuals,
    delta_spectrum,
    oracle_screen,
    p_coefficient,
    solve_screen,
    x_residuals,
    x_spectrum,
)
from backend.symmetry import ScreenSpec, forced_zero, orbit, screen_specs

logger = logging.getLogger(__name__)

# Cross-method agreement is only asked of to this accuracy
DUALITY_TOLERANCE = 1e-10


@dataclass
class SuiteResult:
    """Worst error seen by one suite and anything that broke outright"""
    name: str
    tolerance: float
    max_error: float = 0.0
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    def record(self, error: float, label: str):
        self.checked += 1
        if not np.isfinite(error) or error > self.max_error:
            self.max_error = float(error)
        if not np.isfinite(error) or error > self.tolerance:
            self.failures.append(f"{label}: error {error:.3e}")

    def fail(self, label: str, reason: str):
        self.checked += 1
        self.failures.append(f"{label}: {reason}")

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class VerificationReport:
    suites: List[SuiteResult]
    screens: int

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)


def _guarded(suite: SuiteResult, label: str, check: Callable[[], float]):
    """Run one check; library errors count as failures of that suite"""
    try:
        suite.record(check(), label)
    except ThreeJError as e:
        suite.fail(label, f"{type(e).__name__}: {e}")


# ========== SUITES ==========

def _check_oracle(spec: ScreenSpec, variant: PVariant, oracle) -> float:
    return solve_screen(spec, variant=variant).max_abs_difference(oracle)


def _check_orthogonality(spec: ScreenSpec, variant: PVariant) -> float:
    return solve_screen(spec, variant=variant).orthogonality_error()


def _check_spectrum(spec: ScreenSpec, variant: PVariant) -> float:
    expected_delta = delta_spectrum(spec)
    found_delta = build_delta_problem(spec, variant=variant).eigvalsh()
    expected_x = x_spectrum(spec)
    found_x = build_x_problem(spec).eigvalsh()
    error_delta = np.abs(found_delta - expected_delta).max() / max(1.0, np.abs(expected_delta).max())
    error_x = np.abs(found_x - expected_x).max() / max(1.0, np.abs(expected_x).max())
    return float(max(error_delta, error_x))


def _check_annihilation(spec: ScreenSpec, variant: PVariant, oracle) -> float:
    scale = max(float(np.abs(oracle.values).max()), 1e-300)
    boundary = max(p_coefficient(spec, spec.delta_min, variant),
                   p_coefficient(spec, spec.delta_max + 1, variant))
    if boundary != 0:
        return float("inf")
    return max(delta_residuals(oracle, variant), x_residuals(oracle)) / scale


def _check_duality(spec: ScreenSpec, variant: PVariant) -> float:
    eigen = solve_screen(spec, SolveMethod.EIGEN, variant)
    errors = [eigen.max_abs_difference(solve_screen(spec, method, variant))
              for method in (SolveMethod.DUAL, SolveMethod.RECURSION)]
    return max(errors)


def _orbit_samples(spec: ScreenSpec):
    """First, middle and last cell of the screen's x-major order"""
    cells = [(x, d) for x in spec.x_labels() for d in spec.delta_labels()]
    picks = sorted({0, len(cells) // 2, len(cells) - 1})
    return [spec.args_at(*cells[k]) for k in picks]


def check_orbit(args) -> float:
    """0.0 when every orbit member matches the source through its phase, else 1.0"""
    value = exact_3j(args)
    if forced_zero(args) and not value.is_zero:
        return 1.0
    for record in orbit(args):
        if exact_3j(record.target).with_phase(record.phase) != value:
            logger.debug("orbit mismatch %s -> %s", args, record.target)
            return 1.0
    return 0.0


# ========== DRIVER ==========

def run_verification(max_a, max_b, tolerance: float = 1e-12,
                     p_variant: PVariant = PVariant.DERIVED,
                     verbose: bool = True) -> VerificationReport:
    """Run every suite over all canonical screens with a <= max_a, b <= max_b

    Args:
        max_a: Upper bound on a (HalfInt-like)
        max_b: Upper bound on b
        tolerance: Pass threshold shared by the suites
        p_variant: Form of p(delta); the transcribed one is expected to fail
        verbose: Print the report

    Raises:
        InvalidArgumentsError: bounds exceed THREEJ_ORACLE_GUARD
    """
    max_a, max_b = HalfInt.of(max_a), HalfInt.of(max_b)
    if (max_a + max_b).twice > 2 * config.ORACLE_GUARD:
        raise InvalidArgumentsError(
            f"a+b up to {max_a + max_b} exceeds the oracle guard {config.ORACLE_GUARD}")
    variant = PVariant(p_variant)

    oracle_suite = SuiteResult("oracle", tolerance)
    orthogonality_suite = SuiteResult("orthogonality", tolerance)
    spectrum_suite = SuiteResult("spectrum", tolerance)
    annihilation_suite = SuiteResult("annihilation", tolerance)
    orbit_suite = SuiteResult("regge-orbit", 0.0)
    duality_suite = SuiteResult("duality", max(tolerance, DUALITY_TOLERANCE))
    suites = [oracle_suite, orthogonality_suite, spectrum_suite,
              annihilation_suite, orbit_suite, duality_suite]

    if verbose:
        print("=" * 70)
        print("SCREEN VERIFICATION")
        print("=" * 70)
        print(f"a <= {max_a}, b <= {max_b}, tolerance {tolerance:g}, p form: {variant.value}")
        print()

    specs = list(screen_specs(max_a, max_b))
    for spec in specs:
        label = spec.label()
        oracle = oracle_screen(spec)
        _guarded(oracle_suite, label, lambda: _check_oracle(spec, variant, oracle))
        _guarded(orthogonality_suite, label, lambda: _check_orthogonality(spec, variant))
        _guarded(spectrum_suite, label, lambda: _check_spectrum(spec, variant))
        _guarded(annihilation_suite, label, lambda: _check_annihilation(spec, variant, oracle))
        _guarded(duality_suite, label, lambda: _check_duality(spec, variant))
        for args in _orbit_samples(spec):
            _guarded(orbit_suite, str(args), lambda: check_orbit(args))

    report = VerificationReport(suites, len(specs))
    if verbose:
        print_report(report)
    return report


def print_report(report: VerificationReport):
    print(f"{'Suite':<16} {'Checked':<9} {'Max error':<12} Result")
    print("-" * 70)
    for suite in report.suites:
        marker = "✓" if suite.passed else "❌"
        print(f"{suite.name:<16} {suite.checked:<9} {suite.max_error:<12.3e} {marker}")
        for failure in suite.failures[:5]:
            print(f"    ⚠ {failure}")
        if len(suite.failures) > 5:
            print(f"    ⚠ ... {len(suite.failures) - 5} more")
    print()
    print("=" * 70)
    verdict = "ALL SUITES PASSED" if report.passed else "VERIFICATION FAILED"
    print(f"{verdict} ({report.screens} screens)")
    print("=" * 70)
    print()


if __name__ == "__main__":
    print("Screen Verification")
    print()

    max_a = input("Max a (default: 4): ").strip() or "4"
    max_b = input("Max b (default: 4): ").strip() or "4"

    print()
    run_verification(max_a, max_b)
