import pytest

from backend.errors import InfeasibleSpecError, ParityError
from backend.exact_core import exact_3j
from backend.halfint import HalfInt, ThreeJArgs
from backend.recurrence import u_value
from backend.symmetry import (
    ScreenSpec,
    alpha_beta,
    canonical_transform,
    canonicalize,
    exchange_columns,
    forced_zero,
    mirror_transform,
    negate_projections,
    orbit,
    regge_square,
    regge_transform,
    screen_args,
    screen_specs,
    sigma_delta,
)


def h(value) -> HalfInt:
    return HalfInt.of(value)


def random_symbol(rng, bound: int = 12) -> ThreeJArgs:
    """A symbol obeying the selection rules with every momentum <= bound"""
    while True:
        a2, b2 = (int(v) for v in rng.integers(0, 2 * bound + 1, size=2))
        lo, hi = abs(a2 - b2), min(a2 + b2, 2 * bound)
        if lo > hi:
            continue
        x2 = int(rng.integers(lo // 2, hi // 2 + 1)) * 2 + (lo % 2)
        if x2 > hi:
            continue
        alpha2 = int(rng.integers(0, a2 + 1)) * 2 - a2
        beta2 = int(rng.integers(0, b2 + 1)) * 2 - b2
        gamma2 = -(alpha2 + beta2)
        if abs(gamma2) > x2:
            continue
        return ThreeJArgs(*(HalfInt(v) for v in (a2, b2, x2, alpha2, beta2, gamma2)))


# ========== SCREEN VARIABLES ==========

def test_sigma_delta_examples():
    assert sigma_delta(h(1), h(0)) == (h("1/2"), h("1/2"))
    assert sigma_delta(h(0), h(0)) == (h(0), h(0))
    alpha, beta = alpha_beta(h("-3/2"), h(2))
    assert sigma_delta(alpha, beta) == (h("-3/2"), h(2))


def test_sigma_delta_rejects_off_lattice():
    with pytest.raises(ParityError):
        sigma_delta(h("1/2"), h(0))


def test_screen_args_layout():
    assert screen_args(h(2), h(2), h(2), h(1), h(0)) == ThreeJArgs.of(2, 2, 2, 1, 1, -2)


# ========== ELEMENTARY SYMMETRIES ==========

def test_exchange_first_two_columns():
    args = ThreeJArgs.of(1, 3, 2, 1, -1, 0)
    record = exchange_columns(args)
    assert record.target == ThreeJArgs.of(3, 1, 2, -1, 1, 0)
    assert record.phase == 0  # a+b+x = 6


def test_exchange_keeps_the_value():
    args = ThreeJArgs.of(1, 1, 2, 0, 0, 0)
    record = exchange_columns(args)
    assert record.target == args
    assert exact_3j(args) == exact_3j(record.target).with_phase(record.phase)


def test_cyclic_permutation_has_no_phase():
    args = ThreeJArgs.of(1, 1, 1, 1, 0, -1)
    record = exchange_columns(args, (0, 1)).then(exchange_columns(exchange_columns(args, (0, 1)).target, (1, 2)))
    assert record.phase == 0


def test_exchange_rejects_unknown_pairs():
    with pytest.raises(ValueError):
        exchange_columns(ThreeJArgs.of(1, 1, 2, 0, 0, 0), (0, 3))


def test_negation_self_map_forces_zero():
    args = ThreeJArgs.of(1, 1, 1, 0, 0, 0)
    record = negate_projections(args)
    assert record.target == args
    assert record.phase == 1
    assert exact_3j(args).is_zero

    even = negate_projections(ThreeJArgs.of(1, 3, 2, 0, 0, 0))
    assert even.phase == 0


def test_regge_example():
    record = regge_transform(ThreeJArgs.of(2, 2, 2, 1, 1, -2))
    assert record.target == ThreeJArgs.of(3, 1, 2, 0, 0, 0)
    assert record.phase == 0


def test_regge_keeps_x_and_delta_and_is_an_involution(rng):
    for _ in range(50):
        args = random_symbol(rng, 8)
        record = regge_transform(args)
        assert record.target.x == args.x
        assert record.target.alpha - record.target.beta == args.alpha - args.beta
        assert regge_transform(record.target).target == args
        assert exact_3j(args) == exact_3j(record.target)


def test_mirror_examples():
    record = mirror_transform(ThreeJArgs.of(1, 3, 2, 0, 0, 0))
    assert record.target == ThreeJArgs.of(1, 3, -3, 0, 0, 0)
    assert record.phase == 0

    half = mirror_transform(ThreeJArgs.of("1/2", "1/2", 1, "1/2", "-1/2", 0))
    assert half.target.x == h(-2)
    assert half.phase == 1


def test_mirror_twice_is_the_identity():
    args = ThreeJArgs.of("1/2", "1/2", 1, "1/2", "-1/2", 0)
    first = mirror_transform(args)
    back = first.then(mirror_transform(first.target))
    assert back.target == args
    assert back.phase == 0


# ========== ORBITS ==========

def test_trivial_orbit():
    assert len(orbit(ThreeJArgs.of(0, 0, 0, 0, 0, 0))) == 1


def test_generic_orbit_has_72_members():
    args = ThreeJArgs.of(3, 5, 4, 2, 2, -4)
    assert len(set(regge_square(args)[0] + regge_square(args)[1] + regge_square(args)[2])) == 9
    assert len(orbit(args)) == 72


def test_orbit_with_mirror_layer():
    args = ThreeJArgs.of(3, 5, 4, 2, 2, -4)
    members = orbit(args, include_mirror=True)
    assert len(members) == 144
    assert any(not r.target.is_physical for r in members)


def test_orbit_invariance_on_random_symbols(rng):
    for _ in range(200):
        args = random_symbol(rng)
        value = exact_3j(args)
        for record in orbit(args):
            assert exact_3j(record.target).with_phase(record.phase) == value


# ========== STRUCTURAL ZEROS ==========

@pytest.mark.parametrize("entries, expected", [
    ((1, 1, 1, 0, 0, 0), True),
    ((3, 2, 2, 2, -1, -1), True),
    ((1, 3, 2, 0, 0, 0), False),
    ((3, 5, 4, 2, 2, -4), False),
])
def test_forced_zero(entries, expected):
    assert forced_zero(ThreeJArgs.of(*entries)) is expected


def test_forced_zeros_really_vanish(rng):
    for _ in range(200):
        args = random_symbol(rng, 6)
        if forced_zero(args):
            assert exact_3j(args).is_zero


# ========== SCREENS ==========

def test_screen_spec_ranges(small_spec):
    assert (small_spec.x_min, small_spec.x_max) == (h(0), h(2))
    assert (small_spec.delta_min, small_spec.delta_max) == (h(-1), h(1))
    assert small_spec.x_count == small_spec.delta_count == 3
    assert small_spec.x_range_numbers() == (3, 3, 3, 3)


def test_screen_spec_validation():
    with pytest.raises(InfeasibleSpecError):
        ScreenSpec.of(1, 1, 2)
    with pytest.raises(ParityError):
        ScreenSpec.of("1/2", 1, 0)
    with pytest.raises(InfeasibleSpecError):
        ScreenSpec.of(-1, 1, 0)


def test_screen_is_square(rng):
    for _ in range(500):
        a2, b2 = (int(v) for v in rng.integers(0, 41, size=2))
        if (a2 + b2) % 2:
            b2 += 1
        top = (a2 + b2) // 2
        sigma = HalfInt(int(rng.integers(-top, top + 1)))
        spec = ScreenSpec(HalfInt(a2), HalfInt(b2), sigma)
        assert spec.x_count == spec.delta_count
        canonical, _ = canonicalize(spec)
        assert canonical.x_count == canonical.a.twice + 1
        assert canonical.x_count == spec.x_count


def test_canonical_examples():
    spec, transform = canonicalize((1, 3, 0))
    assert spec == ScreenSpec.of(1, 3, 0)
    assert transform.steps == ()
    assert transform.describe() == "identity"

    spec, transform = canonicalize((2, 2, 1))
    assert spec == ScreenSpec.of(1, 3, 0)
    assert transform.steps == ("regge", "swap")
    assert not ScreenSpec.of(2, 2, 1).is_canonical


def test_negative_sigma_is_negated():
    spec, transform = canonicalize((1, 3, -1))
    assert spec.sigma.twice >= 0
    assert spec.a <= spec.b
    assert "negate" in transform.steps


def test_map_point_relates_screen_values():
    source = ScreenSpec.of(2, 2, 1)
    transform = canonical_transform(source)
    for x in source.x_labels():
        for d in source.delta_labels():
            x_new, d_new, phase = transform.map_point(x, d)
            expected = u_value(transform.target, x_new, d_new) * (-1 if phase else 1)
            assert u_value(source, x, d) == pytest.approx(expected, abs=1e-15)


def test_canonicalize_single_symbol():
    args = ThreeJArgs.of(2, 2, 2, 1, 1, -2)
    spec, record = canonicalize(args)
    assert spec == ScreenSpec.of(1, 3, 0)
    assert exact_3j(args) == exact_3j(record.target).with_phase(record.phase)


def test_screen_specs_canonical_only():
    specs = list(screen_specs(2, 2))
    assert specs
    assert all(s.is_canonical for s in specs)
    assert ScreenSpec.of(1, 3, 0) not in specs  # b > max_b
    assert len(list(screen_specs(1, 1, canonical_only=False))) > len(list(screen_specs(1, 1)))


def test_orbit_sizes_divide_72(rng):
    sizes = set()
    for _ in range(100):
        size = len(orbit(random_symbol(rng)))
        assert 72 % size == 0, size
        sizes.add(size)
    assert 72 in sizes


def test_canonicalize_is_idempotent(rng):
    for _ in range(200):
        a2, b2 = (int(v) for v in rng.integers(0, 31, size=2))
        if (a2 + b2) % 2:
            b2 += 1
        top = (a2 + b2) // 2
        spec = ScreenSpec(HalfInt(a2), HalfInt(b2), HalfInt(int(rng.integers(-top, top + 1))))
        canonical, _ = canonicalize(spec)
        again, transform = canonicalize(canonical)
        assert again == canonical
        assert transform.steps == ()


def test_x_and_delta_ranges_share_their_numbers(rng):
    for _ in range(300):
        a2, b2 = (int(v) for v in rng.integers(0, 41, size=2))
        if (a2 + b2) % 2:
            b2 += 1
        top = (a2 + b2) // 2
        spec = ScreenSpec(HalfInt(a2), HalfInt(b2), HalfInt(int(rng.integers(-top, top + 1))))
        x_numbers, delta_numbers = spec.x_range_numbers(), spec.delta_range_numbers()
        assert sorted(x_numbers) == sorted(delta_numbers)
        assert min(x_numbers) == spec.x_count
        assert min(delta_numbers) == spec.delta_count
