# halfint.py - Exact half-integer values and the six entries of a 3j symbol

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from backend.errors import InvalidArgumentsError, ParityError, ParseError

HalfIntLike = Union["HalfInt", int, Fraction, str]

_TOKEN = re.compile(r"(?P<sign>[+-]?)(?:(?P<whole>\d+)|(?P<odd>\d+)/2|(?P<units>\d*)\.(?P<tenth>[05]))")


@dataclass(frozen=True, order=True)
class HalfInt:
    """An integer or half-odd-integer stored as twice its value

    All angular momenta and projections (a, b, x, alpha, beta, gamma,
    sigma, delta) live on this lattice; arithmetic never leaves it.
    """

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise TypeError(f"HalfInt needs an int, got {self.twice!r}")

    # ========== CONSTRUCTION ==========

    @classmethod
    def of(cls, value: HalfIntLike) -> "HalfInt":
        """Coerce ints, Fractions, HalfInts and numeric strings"""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, bool):
            raise TypeError("booleans are not angular momenta")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, Fraction):
            doubled = 2 * value
            if doubled.denominator != 1:
                raise ParityError(f"{value} is not a multiple of 1/2")
            return cls(int(doubled))
        raise TypeError(f"cannot build a HalfInt from {value!r}")

    @classmethod
    def parse(cls, token: str) -> "HalfInt":
        """Parse '3', '-3/2', '1.5', '.5' or '2.0'

        Halves are written n/2 with n odd; decimals carry one digit, 0 or 5.

        Raises:
            ParseError: on anything else
        """
        match = _TOKEN.fullmatch(token.strip())
        if match is None:
            raise ParseError(f"not an integer or half-integer: {token!r}")
        sign = -1 if match["sign"] == "-" else 1
        if match["whole"] is not None:
            return cls(sign * 2 * int(match["whole"]))
        if match["odd"] is not None:
            odd = int(match["odd"])
            if odd % 2 == 0:
                raise ParseError(f"halves need an odd numerator: {token!r}")
            return cls(sign * odd)
        units = int(match["units"] or 0)
        return cls(sign * (2 * units + (1 if match["tenth"] == "5" else 0)))

    # ========== ARITHMETIC ==========

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __radd__(self, other) -> "HalfInt":
        return self.__add__(other)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt.of(other).__sub__(self)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __mul__(self, k: int) -> "HalfInt":
        if not isinstance(k, int):
            return NotImplemented
        return HalfInt(self.twice * k)

    __rmul__ = __mul__

    def half(self) -> "HalfInt":
        """Exact division by two; the result must stay on the lattice"""
        if self.twice % 2:
            raise ParityError(f"{self}/2 is not a half-integer")
        return HalfInt(self.twice // 2)

    # ========== PREDICATES & CONVERSIONS ==========

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def to_int(self) -> int:
        if self.twice % 2:
            raise ParityError(f"{self} is not an integer")
        return self.twice // 2

    def __float__(self) -> float:
        return self.twice / 2

    def decimal(self) -> str:
        """Exact decimal form: '2.0', '-0.5'"""
        sign = "-" if self.twice < 0 else ""
        whole, rest = divmod(abs(self.twice), 2)
        return f"{sign}{whole}.{5 if rest else 0}"

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


ZERO = HalfInt(0)
ONE = HalfInt(2)


@dataclass(frozen=True)
class ThreeJArgs:
    """The six entries (a, b, x; alpha, beta, gamma) of a 3j symbol

    Projections must sum to zero, share the parity of their momentum,
    and a+b+x must be integral. Momenta may be negative only for
    mirror images; such symbols report is_physical == False.
    """

    a: HalfInt
    b: HalfInt
    x: HalfInt
    alpha: HalfInt
    beta: HalfInt
    gamma: HalfInt

    def __post_init__(self):
        if (self.alpha + self.beta + self.gamma).twice != 0:
            raise InvalidArgumentsError(f"projections of {self} do not sum to zero")
        for j, m in ((self.a, self.alpha), (self.b, self.beta), (self.x, self.gamma)):
            if (j.twice - m.twice) % 2:
                raise InvalidArgumentsError(f"projection {m} does not match momentum {j}")
        if (self.a.twice + self.b.twice + self.x.twice) % 2:
            raise InvalidArgumentsError(f"a+b+x is not integral in {self}")

    @classmethod
    def of(cls, a, b, x, alpha, beta, gamma) -> "ThreeJArgs":
        """Build from anything HalfInt.of accepts"""
        return cls(*(HalfInt.of(v) for v in (a, b, x, alpha, beta, gamma)))

    @property
    def momenta(self) -> tuple:
        return (self.a, self.b, self.x)

    @property
    def projections(self) -> tuple:
        return (self.alpha, self.beta, self.gamma)

    @property
    def key(self) -> tuple:
        """Doubled-integer 6-tuple, used as a hashable orbit key"""
        return tuple(v.twice for v in self.momenta + self.projections)

    @property
    def is_physical(self) -> bool:
        return all(j.twice >= 0 for j in self.momenta)

    @property
    def j_sum(self) -> int:
        """a+b+x as an int"""
        return (self.a.twice + self.b.twice + self.x.twice) // 2

    def __str__(self) -> str:
        top = ",".join(str(v) for v in self.momenta)
        bottom = ",".join(str(v) for v in self.projections)
        return f"({top};{bottom})"
