# exact_core.py - Selection rules and the exact (big-rational) 3j oracle

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from backend.errors import InvalidArgumentsError
from backend.halfint import HalfInt, ThreeJArgs

logger = logging.getLogger(__name__)


# ========== EXACT VALUES ==========

@dataclass(frozen=True)
class ExactValue:
    """A real number sign * sqrt(square) with square an exact rational"""

    sign: int
    square: Fraction

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.square < 0:
            raise ValueError("square must be nonnegative")
        if (self.sign == 0) != (self.square == 0):
            raise ValueError("sign is 0 exactly when square is 0")

    @classmethod
    def zero(cls) -> "ExactValue":
        return cls(0, Fraction(0))

    @classmethod
    def from_rational(cls, value: Fraction) -> "ExactValue":
        value = Fraction(value)
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, value * value)

    def with_phase(self, exponent: int) -> "ExactValue":
        """Multiply by (-1)**exponent"""
        if exponent % 2 == 0 or self.sign == 0:
            return self
        return ExactValue(-self.sign, self.square)

    def scaled(self, factor: Fraction) -> "ExactValue":
        """Multiply by sqrt(factor), factor >= 0"""
        factor = Fraction(factor)
        if factor == 0 or self.sign == 0:
            return ExactValue.zero()
        return ExactValue(self.sign, self.square * factor)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def rational(self):
        """The value as a Fraction when square is a perfect square, else None"""
        num, den = self.square.numerator, self.square.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return self.sign * Fraction(rn, rd)
        return None

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.sqrt(float(self.square))

    def exact_form(self) -> str:
        """'0', '1', '-1/3' for rational values, '+sqrt(2/15)' otherwise"""
        if self.sign == 0:
            return "0"
        r = self.rational()
        if r is not None:
            return str(r)
        sign = "+" if self.sign > 0 else "-"
        return f"{sign}sqrt({self.square})"

    def describe(self) -> str:
        """Exact form followed by the rounded binary64 value when irrational"""
        text = self.exact_form()
        if self.rational() is None:
            text += f" ≈ {float(self):.7f}"
        return text

    def __str__(self) -> str:
        return self.exact_form()


# ========== FACTORIAL CACHE ==========

class _FactorialTable:
    """Big-integer factorials, grown on demand; reads never take the lock"""

    def __init__(self):
        self._values = [1]
        self._lock = threading.Lock()

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"negative factorial argument {n}")
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            values = list(self._values)
            while len(values) <= n:
                values.append(values[-1] * len(values))
            self._values = values
        return values[n]


factorial = _FactorialTable()


# ========== SELECTION RULES ==========

def is_triangle(a: HalfInt, b: HalfInt, x: HalfInt) -> bool:
    """|a-b| <= x <= a+b with a+b+x integral"""
    if (a.twice + b.twice + x.twice) % 2:
        return False
    return abs(a.twice - b.twice) <= x.twice <= a.twice + b.twice


def selection_rules(args: ThreeJArgs) -> bool:
    """Triangle rule plus |projection| <= momentum for every column"""
    if not args.is_physical:
        return False
    if not is_triangle(args.a, args.b, args.x):
        return False
    return all(abs(m.twice) <= j.twice for j, m in zip(args.momenta, args.projections))


# ========== RACAH ORACLE ==========

def _racah(args: ThreeJArgs) -> ExactValue:
    """Racah's single sum, everything in doubled units"""
    A, B, X = args.a.twice, args.b.twice, args.x.twice
    Al, Be, G = args.alpha.twice, args.beta.twice, args.gamma.twice

    t1 = (A + B - X) // 2
    t2 = (A - B + X) // 2
    t3 = (-A + B + X) // 2
    triangle = Fraction(factorial(t1) * factorial(t2) * factorial(t3),
                        factorial((A + B + X) // 2 + 1))
    projections = 1
    for n in ((A + Al) // 2, (A - Al) // 2, (B + Be) // 2,
              (B - Be) // 2, (X + G) // 2, (X - G) // 2):
        projections *= factorial(n)

    k_min = max(0, (B - X - Al) // 2, (A - X + Be) // 2)
    k_max = min(t1, (A - Al) // 2, (B + Be) // 2)
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        denom = (factorial(k)
                 * factorial((X - B + Al) // 2 + k)
                 * factorial((X - A - Be) // 2 + k)
                 * factorial(t1 - k)
                 * factorial((A - Al) // 2 - k)
                 * factorial((B + Be) // 2 - k))
        total += Fraction(-1 if k % 2 else 1, denom)

    if total == 0:
        return ExactValue.zero()
    sign = 1 if total > 0 else -1
    value = ExactValue(sign, triangle * projections * total * total)
    return value.with_phase((A - B - G) // 2)


def exact_3j(args: ThreeJArgs, strict: bool = False) -> ExactValue:
    """Exact 3j value as sign * sqrt(rational)

    Symbols failing the selection rules are zero by convention. Mirror
    images (x <= -1) are evaluated through their physical partner -x-1;
    x = -1/2 is its own image and has none, so it is zero.

    Args:
        args: The six entries
        strict: Raise instead of returning zero for invalid arguments

    Raises:
        InvalidArgumentsError: strict mode only
    """
    if args.x.twice <= -2 and args.a.twice >= 0 and args.b.twice >= 0:
        from backend.symmetry import mirror_transform

        record = mirror_transform(args)
        return exact_3j(record.target, strict=strict).with_phase(record.phase)
    if not selection_rules(args):
        if strict:
            raise InvalidArgumentsError(f"{args} violates the selection rules")
        return ExactValue.zero()
    return _racah(args)


def cg_from_3j(args: ThreeJArgs, strict: bool = False) -> ExactValue:
    """Clebsch-Gordan coefficient <a alpha, b beta | x -gamma>

    Equals (-1)**(a-b-gamma) * sqrt(2x+1) * 3j(a, b, x; alpha, beta, gamma).
    """
    exponent_twice = args.a.twice - args.b.twice - args.gamma.twice
    assert exponent_twice % 2 == 0, "a-b-gamma must be an integer"
    three_j = exact_3j(args, strict=strict)
    return three_j.scaled(args.x.twice + 1).with_phase(exponent_twice // 2)
