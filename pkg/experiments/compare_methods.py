"""
Compare the three screen solvers against the exact oracle
- eigen: eigenvectors of the delta-problem
- dual: eigenvectors of the x-problem
- recursion: two-sided three-term recursion per column
"""
import os
import sys
import time
from typing import Dict, List, Tuple

# Fix import path - add parent directory
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, parent_dir)

from backend import config
from backend.errors import ThreeJError
from backend.recurrence import SolveMethod, oracle_screen, solve_screen
from backend.symmetry import ScreenSpec

DEFAULT_SCREENS = (
    (1, 1, 0), (2, 2, 1), (3, 5, 2), (5, 5, 0),
    (8, 8, 3), (10, 12, 4), (15, 15, 5), (20, 20, 0),
)


def compare(spec: ScreenSpec) -> Dict[str, Tuple[float, float, float]]:
    """Per method: max |U - oracle|, orthogonality error, seconds"""
    oracle = oracle_screen(spec)
    results = {}
    for method in SolveMethod:
        start = time.perf_counter()
        try:
            u = solve_screen(spec, method)
        except ThreeJError as e:
            print(f"  ⚠ {method.value} failed on {spec}: {e}")
            results[method.value] = (float("inf"), float("inf"), 0.0)
            continue
        elapsed = time.perf_counter() - start
        results[method.value] = (u.max_abs_difference(oracle), u.orthogonality_error(), elapsed)
    return results


def run(screens=DEFAULT_SCREENS) -> List[Tuple[ScreenSpec, Dict[str, Tuple[float, float, float]]]]:
    print("=" * 70)
    print("SOLVER ACCURACY VS EXACT ORACLE")
    print("=" * 70)
    print(f"{'screen':<14} {'size':<8} " + " ".join(f"{m.value:<12}" for m in SolveMethod))
    print("-" * 70)

    rows = []
    for a, b, sigma in screens:
        spec = ScreenSpec.of(a, b, sigma)
        results = compare(spec)
        rows.append((spec, results))
        errors = " ".join(f"{results[m.value][0]:<12.2e}" for m in SolveMethod)
        print(f"{spec.label():<14} {spec.x_count}x{spec.delta_count:<5} {errors}")

    print()
    worst = {m.value: max(r[m.value][0] for _, r in rows) for m in SolveMethod}
    for method, error in worst.items():
        marker = "✓" if error < 1e-10 else "⚠"
        print(f"{marker} {method:<10} worst error {error:.2e}")
    print("=" * 70)
    return rows


if __name__ == "__main__":
    config.setup_logging()
    print("Solver Comparison")
    print()

    bound = input("Largest a=b to add (default: none): ").strip()
    screens = list(DEFAULT_SCREENS)
    if bound:
        screens.append((int(bound), int(bound), 0))
    print()
    run(screens)
