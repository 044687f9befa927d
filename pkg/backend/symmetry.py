# symmetry.py - Permutational, sign-flip, mirror and Regge symmetries; screens

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union

from backend.errors import InfeasibleSpecError, ParityError
from backend.halfint import HalfInt, HalfIntLike, ThreeJArgs

logger = logging.getLogger(__name__)

PAIRS = ((0, 1), (0, 2), (1, 2))


# ========== SCREEN VARIABLES ==========

def sigma_delta(alpha: HalfInt, beta: HalfInt) -> Tuple[HalfInt, HalfInt]:
    """sigma = (alpha+beta)/2, delta = (alpha-beta)/2

    Raises:
        ParityError: when alpha+beta is not an integer
    """
    if (alpha.twice + beta.twice) % 2:
        raise ParityError(f"alpha={alpha}, beta={beta} give off-lattice sigma/delta")
    return (alpha + beta).half(), (alpha - beta).half()


def alpha_beta(sigma: HalfInt, delta: HalfInt) -> Tuple[HalfInt, HalfInt]:
    """Inverse change of variables: alpha = sigma+delta, beta = sigma-delta"""
    return sigma + delta, sigma - delta


def screen_args(a: HalfInt, b: HalfInt, x: HalfInt, sigma: HalfInt, delta: HalfInt) -> ThreeJArgs:
    """The symbol (a, b, x; sigma+delta, sigma-delta, -2 sigma)"""
    alpha, beta = alpha_beta(sigma, delta)
    return ThreeJArgs(a, b, x, alpha, beta, -(sigma * 2))


# ========== RECORDS ==========

@dataclass(frozen=True)
class SymmetryRecord:
    """value(source) = (-1)**phase * value(target); phase reduced mod 2"""

    source: ThreeJArgs
    target: ThreeJArgs
    phase: int
    steps: Tuple[str, ...] = field(default=(), compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 2)

    def then(self, other: "SymmetryRecord") -> "SymmetryRecord":
        """Compose with a record whose source is this record's target"""
        if other.source != self.target:
            raise ValueError("records do not chain")
        return SymmetryRecord(self.source, other.target, self.phase + other.phase,
                              self.steps + other.steps)

    @property
    def sign(self) -> int:
        return -1 if self.phase else 1


def identity_record(args: ThreeJArgs) -> SymmetryRecord:
    return SymmetryRecord(args, args, 0)


def exchange_columns(args: ThreeJArgs, which: Tuple[int, int] = (0, 1)) -> SymmetryRecord:
    """Swap two columns; odd permutations cost (-1)**(a+b+x)"""
    i, j = sorted(which)
    if (i, j) not in PAIRS:
        raise ValueError(f"no such column pair {which}")
    momenta = list(args.momenta)
    projections = list(args.projections)
    momenta[i], momenta[j] = momenta[j], momenta[i]
    projections[i], projections[j] = projections[j], projections[i]
    target = ThreeJArgs(*momenta, *projections)
    return SymmetryRecord(args, target, args.j_sum, (f"swap{i}{j}",))


def negate_projections(args: ThreeJArgs) -> SymmetryRecord:
    """(a,b,x; -alpha,-beta,-gamma) with phase (-1)**(a+b+x)"""
    target = ThreeJArgs(args.a, args.b, args.x, -args.alpha, -args.beta, -args.gamma)
    return SymmetryRecord(args, target, args.j_sum, ("negate",))


def regge_transform(args: ThreeJArgs) -> SymmetryRecord:
    """The Regge conjugate that keeps x and delta fixed

    a' = (a+b)/2 + sigma, b' = (a+b)/2 - sigma, sigma' = (a-b)/2,
    delta' = delta, gamma' = b - a. An involution with no phase.
    """
    a, b, alpha, beta = args.a, args.b, args.alpha, args.beta
    # each numerator is even: alpha shares the parity of a, beta that of b
    a_new = (a + b + alpha + beta).half()
    b_new = (a + b - alpha - beta).half()
    alpha_new = (a - b + alpha - beta).half()
    beta_new = (a - b - alpha + beta).half()
    target = ThreeJArgs(a_new, b_new, args.x, alpha_new, beta_new, b - a)
    return SymmetryRecord(args, target, 0, ("regge",))


def mirror_transform(args: ThreeJArgs) -> SymmetryRecord:
    """x -> -x-1, pairing each physical symbol with a negative-x image

    The phase is (-1)**(b-x-a) taken on the physical member of the pair,
    so applying the transform twice gives back the source with phase +1.
    """
    x_new = -args.x - HalfInt(2)
    physical_x = args.x if args.x.twice >= 0 else x_new
    exponent_twice = args.b.twice - physical_x.twice - args.a.twice
    target = ThreeJArgs(args.a, args.b, x_new, args.alpha, args.beta, args.gamma)
    return SymmetryRecord(args, target, exponent_twice // 2, ("mirror",))


_GENERATORS = (
    lambda s: exchange_columns(s, (0, 1)),
    lambda s: exchange_columns(s, (0, 2)),
    lambda s: exchange_columns(s, (1, 2)),
    negate_projections,
    regge_transform,
)


def orbit(args: ThreeJArgs, include_mirror: bool = False) -> frozenset:
    """Every symbol reachable by column exchanges, negation and Regge

    Breadth-first closure keyed on the doubled 6-tuple; each record
    carries the phase linking it to args. With include_mirror, the
    mirror image of every member is appended (one layer, not closed).
    """
    start = identity_record(args)
    seen = {args.key: start}
    queue = deque([start])
    while queue:
        record = queue.popleft()
        for generator in _GENERATORS:
            step = generator(record.target)
            key = step.target.key
            if key not in seen:
                chained = record.then(step)
                seen[key] = chained
                queue.append(chained)
    records = set(seen.values())
    if include_mirror:
        records |= {r.then(mirror_transform(r.target)) for r in seen.values()}
    logger.debug("orbit of %s has %d members", args, len(seen))
    return frozenset(records)


# ========== STRUCTURAL ZEROS ==========

def regge_square(args: ThreeJArgs) -> Tuple[Tuple[int, ...], ...]:
    """3x3 array of nonnegative integers whose row/column symmetries are those of the symbol"""
    A, B, X = args.a.twice, args.b.twice, args.x.twice
    Al, Be, G = args.alpha.twice, args.beta.twice, args.gamma.twice
    return (
        ((-A + B + X) // 2, (A - B + X) // 2, (A + B - X) // 2),
        ((A - Al) // 2, (B - Be) // 2, (X - G) // 2),
        ((A + Al) // 2, (B + Be) // 2, (X + G) // 2),
    )


def _parity(perm: Tuple[int, ...]) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j]) % 2


_SQUARE_MOVES = tuple(
    (rows, cols, transpose, (_parity(rows) + _parity(cols)) % 2)
    for rows in itertools.permutations(range(3))
    for cols in itertools.permutations(range(3))
    for transpose in (False, True)
)


def forced_zero(args: ThreeJArgs) -> bool:
    """True when a symmetry maps the symbol to itself with phase -1

    Odd row or column permutations of the Regge square cost
    (-1)**(a+b+x); transposition is free. Such symbols vanish identically.
    """
    if args.j_sum % 2 == 0 or not args.is_physical:
        return False
    square = regge_square(args)
    if len({v for row in square for v in row}) == 9:
        return False
    for rows, cols, transpose, odd in _SQUARE_MOVES:
        if not odd:
            continue
        moved = tuple(tuple(square[r][c] for c in cols) for r in rows)
        if transpose:
            moved = tuple(zip(*moved))
        if moved == square:
            return True
    return False


# ========== SCREENS ==========

@dataclass(frozen=True)
class ScreenSpec:
    """One screen: fixed (a, b, sigma), abscissa x, ordinate delta

    Requires a+b integral so that sigma lives on the half-integer
    lattice, and |sigma| <= (a+b)/2 so that the delta range is nonempty.
    """

    a: HalfInt
    b: HalfInt
    sigma: HalfInt

    def __post_init__(self):
        if self.a.twice < 0 or self.b.twice < 0:
            raise InfeasibleSpecError(f"negative momentum in {self}")
        if (self.a.twice + self.b.twice) % 2:
            raise ParityError(f"a+b must be integral for a screen, got {self}")
        if 2 * abs(self.sigma.twice) > self.a.twice + self.b.twice:
            raise InfeasibleSpecError(f"empty delta range for {self}")

    @classmethod
    def of(cls, a: HalfIntLike, b: HalfIntLike, sigma: HalfIntLike) -> "ScreenSpec":
        return cls(HalfInt.of(a), HalfInt.of(b), HalfInt.of(sigma))

    @property
    def x_min(self) -> HalfInt:
        return max(abs(self.a - self.b), abs(self.sigma) * 2)

    @property
    def x_max(self) -> HalfInt:
        return self.a + self.b

    @property
    def delta_min(self) -> HalfInt:
        return max(-self.a - self.sigma, -self.b + self.sigma)

    @property
    def delta_max(self) -> HalfInt:
        return min(self.a - self.sigma, self.b + self.sigma)

    @property
    def x_count(self) -> int:
        return (self.x_max - self.x_min).to_int() + 1

    @property
    def delta_count(self) -> int:
        return (self.delta_max - self.delta_min).to_int() + 1

    @property
    def size(self) -> int:
        return self.x_count

    def x_range_numbers(self) -> Tuple[int, int, int, int]:
        """2a+1, 2b+1, a+b+2 sigma+1, a+b-2 sigma+1"""
        a, b, s = self.a.twice, self.b.twice, self.sigma.twice
        return (a + 1, b + 1, (a + b) // 2 + s + 1, (a + b) // 2 - s + 1)

    def delta_range_numbers(self) -> Tuple[int, int, int, int]:
        """2a+1, a+b-2 sigma+1, a+b+2 sigma+1, 2b+1"""
        a, b, s = self.a.twice, self.b.twice, self.sigma.twice
        return (a + 1, (a + b) // 2 - s + 1, (a + b) // 2 + s + 1, b + 1)

    def x_labels(self) -> Tuple[HalfInt, ...]:
        return tuple(self.x_min + k for k in range(self.x_count))

    def delta_labels(self) -> Tuple[HalfInt, ...]:
        return tuple(self.delta_min + k for k in range(self.delta_count))

    def contains(self, x: HalfInt, delta: HalfInt) -> bool:
        return (self.x_min <= x <= self.x_max and self.delta_min <= delta <= self.delta_max
                and (x - self.x_min).is_integer and (delta - self.delta_min).is_integer)

    def args_at(self, x: HalfInt, delta: HalfInt) -> ThreeJArgs:
        return screen_args(self.a, self.b, x, self.sigma, delta)

    @property
    def is_canonical(self) -> bool:
        return not canonical_transform(self).steps

    def label(self) -> str:
        return f"({self.a},{self.b},{self.sigma})"

    def __str__(self) -> str:
        return self.label()


# ========== CANONICALIZATION ==========

_SCREEN_STEPS = {
    "swap": lambda s: exchange_columns(s, (0, 1)),
    "negate": negate_projections,
    "regge": regge_transform,
}


def _step_spec(spec: ScreenSpec, step: str) -> ScreenSpec:
    a, b, sigma = spec.a, spec.b, spec.sigma
    if step == "swap":
        return ScreenSpec(b, a, sigma)
    if step == "negate":
        return ScreenSpec(a, b, -sigma)
    if step == "regge":
        return ScreenSpec((a + b).half() + sigma, (a + b).half() - sigma, (a - b).half())
    raise ValueError(f"unknown screen step {step!r}")


@dataclass(frozen=True)
class ScreenTransform:
    """A chain of screen-preserving symmetries from one (a,b,sigma) to another

    swap: delta -> -delta, phase (-1)**(a+b+x); negate: (sigma, delta) ->
    (-sigma, -delta), same phase; regge: delta fixed, no phase.
    """

    source: ScreenSpec
    target: ScreenSpec
    steps: Tuple[str, ...]

    def map_point(self, x: HalfInt, delta: HalfInt) -> Tuple[HalfInt, HalfInt, int]:
        """(x, delta) on the source screen -> (x, delta', phase) on the target"""
        phase = 0
        for step in self.steps:
            if step in ("swap", "negate"):
                delta = -delta
                phase += (self.source.a + self.source.b + x).to_int()
        return x, delta, phase % 2

    def apply(self, args: ThreeJArgs) -> SymmetryRecord:
        """The symbol-level record for one entry of the source screen"""
        record = identity_record(args)
        for step in self.steps:
            record = record.then(_SCREEN_STEPS[step](record.target))
        return record

    def describe(self) -> str:
        return ", ".join(self.steps) if self.steps else "identity"


def canonical_transform(spec: ScreenSpec) -> ScreenTransform:
    """Pick the conjugate with the smallest a (then b), a <= b, sigma >= 0"""
    best = None
    for steps in ((), ("swap",), ("regge",), ("regge", "swap")):
        target = spec
        for step in steps:
            target = _step_spec(target, step)
        if target.sigma.twice < 0:
            steps = steps + ("negate",)
            target = _step_spec(target, "negate")
        key = (target.a.twice, target.b.twice, len(steps))
        if best is None or key < best[0]:
            best = (key, ScreenTransform(spec, target, steps))
    return best[1]


ScreenLike = Union[ScreenSpec, Tuple[HalfIntLike, HalfIntLike, HalfIntLike], ThreeJArgs]


def canonicalize(item: ScreenLike):
    """Move a screen (or a single symbol) onto its canonical conjugate

    Args:
        item: A ScreenSpec, an (a, b, sigma) triple or a ThreeJArgs

    Returns:
        (ScreenSpec, ScreenTransform) for screens and triples;
        (ScreenSpec, SymmetryRecord) for a single symbol.

    Raises:
        InfeasibleSpecError: the delta range is empty
        ParityError: a+b is not integral
    """
    if isinstance(item, ThreeJArgs):
        sigma, _ = sigma_delta(item.alpha, item.beta)
        transform = canonical_transform(ScreenSpec(item.a, item.b, sigma))
        return transform.target, transform.apply(item)
    spec = item if isinstance(item, ScreenSpec) else ScreenSpec.of(*item)
    transform = canonical_transform(spec)
    if transform.steps:
        logger.debug("screen %s canonicalized to %s via %s", spec, transform.target, transform.describe())
    return transform.target, transform


def allowed_sigmas(a: HalfInt, b: HalfInt) -> Tuple[HalfInt, ...]:
    """Every sigma on the half-integer lattice with a nonempty screen"""
    if (a.twice + b.twice) % 2:
        return ()
    top = (a + b).half()
    return tuple(HalfInt(t) for t in range(-top.twice, top.twice + 1))


def screen_specs(max_a: HalfIntLike, max_b: HalfIntLike, canonical_only: bool = True) -> Iterable[ScreenSpec]:
    """Every feasible screen with a <= max_a, b <= max_b, a+b integral"""
    max_a, max_b = HalfInt.of(max_a), HalfInt.of(max_b)
    for a2 in range(0, max_a.twice + 1):
        for b2 in range(0, max_b.twice + 1):
            a, b = HalfInt(a2), HalfInt(b2)
            for sigma in allowed_sigmas(a, b):
                spec = ScreenSpec(a, b, sigma)
                if not canonical_only or spec.is_canonical:
                    yield spec
