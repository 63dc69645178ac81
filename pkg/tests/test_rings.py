"""Ring arithmetic, unit groups, divisibility, and the psi predicate."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triadeform import (
    DivisionByZeroDivisor,
    InvalidParameter,
    NotAUnit,
    ParseError,
    divides,
    eval_psi,
    fundamental_unit,
    is_square_unit,
    is_unit,
    parse_ring,
    unit_decompose,
    unit_group,
)
from triadeform.errors import NotInSubgroupB

# ---------------------------------------------------------------------------
# parsing and the basic ring contract


@pytest.mark.parametrize(
    "spec, kind",
    [
        ("Z", "Integers"),
        ("Q", "Rationals"),
        ("Z/7", "IntegersMod"),
        ("Z[sqrt(2)]", "QuadraticOrder"),
        ("Z[i]", "GaussianIntegers"),
    ],
)
def test_parse_ring_kinds(spec, kind):
    assert parse_ring(spec).kind == kind


def test_parse_ring_rejects_garbage():
    for bad in ("Z/1", "Z[sqrt(4)]", "Z[sqrt(1)]", "GF(9)", ""):
        with pytest.raises((ParseError, InvalidParameter)):
            parse_ring(bad)


@pytest.mark.parametrize("spec", ["Z", "Q", "Z/6", "Z[sqrt(2)]", "Z[sqrt(-5)]", "Z[i]"])
def test_ring_axioms_on_samples(spec, rng):
    r = parse_ring(spec)
    xs = [r.random_elem(rng) for _ in range(8)] + [r.zero, r.one]
    for x in xs:
        assert r.add(x, r.zero) == x
        assert r.mul(x, r.one) == x
        assert r.add(x, r.neg(x)) == r.zero
    for x in xs:
        for y in xs:
            assert r.add(x, y) == r.add(y, x)
            assert r.mul(x, y) == r.mul(y, x)
    for x in xs[:4]:
        for y in xs[:4]:
            for z in xs[:4]:
                assert r.mul(x, r.add(y, z)) == r.add(r.mul(x, y), r.mul(x, z))


@pytest.mark.parametrize("spec", ["Z", "Q", "Z/9", "Z[sqrt(3)]", "Z[i]"])
def test_elem_text_and_json_round_trip(spec, rng):
    r = parse_ring(spec)
    for _ in range(20):
        x = r.random_elem(rng)
        assert r.parse_elem(r.format_elem(x)) == x
        assert r.elem_from_json(r.elem_to_json(x)) == x


def test_rationals_stay_exact():
    q = parse_ring("Q")
    x = q.parse_elem("1/3")
    acc = q.zero
    for _ in range(3):
        acc = q.add(acc, x)
    assert acc == q.one
    assert isinstance(x, Fraction)


# ---------------------------------------------------------------------------
# Pell oracle: fundamental units found independently by brute force


def _pell_brute(d: int, y_cap: int = 10_000):
    # smallest unit > 1 solves x^2 - d y^2 = +-1 with minimal y
    best = None
    for y in range(1, y_cap + 1):
        for n in (1, -1):
            x2 = n + d * y * y
            if x2 <= 0:
                continue
            x = int(x2**0.5)
            for cand in (x - 1, x, x + 1):
                if cand > 0 and cand * cand == x2:
                    best = (cand, y)
                    break
            if best:
                return best
    raise AssertionError(f"no Pell solution with y <= {y_cap} for d={d}")


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10])
def test_fundamental_unit_matches_pell_brute_force(d):
    assert fundamental_unit(d) == _pell_brute(d)


def test_fundamental_unit_sqrt2_pinned():
    assert fundamental_unit(2) == (1, 1)


# ---------------------------------------------------------------------------
# divisibility against an independent exact solver


def _divides_oracle(d: int, a, b) -> bool:
    # solve (a0 + a1 s)(x + y s) = b over Q and test integrality;
    # uses Fraction linear algebra, not the conjugate-norm shortcut
    a0, a1 = a
    b0, b1 = b
    det = Fraction(a0 * a0 - d * a1 * a1)
    if det == 0:
        raise ZeroDivisionError
    x = (Fraction(b0) * a0 - d * Fraction(b1) * a1) / det
    y = (Fraction(b1) * a0 - Fraction(b0) * a1) / det
    return x.denominator == 1 and y.denominator == 1


@pytest.mark.parametrize("d", [2, 3, -5])
def test_quadratic_divides_matches_linear_solver(d, rng):
    r = parse_ring(f"Z[sqrt({d})]")
    checked = 0
    for _ in range(300):
        a = r.random_elem(rng)
        b = r.random_elem(rng)
        if r.norm(a) == 0:
            continue
        assert divides(r, a, b) == _divides_oracle(d, a, b)
        checked += 1
    assert checked > 250


def test_divides_by_zero_raises(ring_sqrt2):
    with pytest.raises(DivisionByZeroDivisor):
        divides(ring_sqrt2, ring_sqrt2.zero, ring_sqrt2.one)


def test_integer_and_rational_divides():
    z = parse_ring("Z")
    assert divides(z, 3, 12) and not divides(z, 5, 12)
    q = parse_ring("Q")
    assert divides(q, Fraction(7, 2), Fraction(1, 5))


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-6, 6), st.integers(-6, 6))
@settings(max_examples=200, deadline=None)
def test_divides_closed_under_products_hypothesis(a0, a1, c0, c1):
    r = parse_ring("Z[sqrt(2)]")
    a, c = (a0, a1), (c0, c1)
    if r.norm(a) == 0:
        return
    assert divides(r, a, r.mul(a, c))


# ---------------------------------------------------------------------------
# unit groups and decomposition


def test_unit_group_structures():
    assert unit_group(parse_ring("Z")).torsion_order == 2
    u5 = unit_group(parse_ring("Z/5"))
    assert u5.torsion_order == 4 and u5.is_finite
    uq = unit_group(parse_ring("Q"))
    assert uq.torsion_order == 2 and not uq.is_finite
    ui = unit_group(parse_ring("Z[i]"))
    assert ui.torsion_order == 4 and ui.torsion_generator == (0, 1)
    us = unit_group(parse_ring("Z[sqrt(2)]"))
    assert us.torsion_order == 2 and us.free_basis == ((1, 1),)


def test_non_cyclic_unit_group_refused():
    with pytest.raises(InvalidParameter):
        unit_group(parse_ring("Z/8"))


def test_unit_decompose_round_trip(ring_sqrt2, rng):
    u = unit_group(ring_sqrt2)
    for _ in range(40):
        x = ring_sqrt2.random_unit(rng)
        t, free = u.decompose(x)
        rebuilt = u.compose(t, free)
        assert rebuilt == x
    with pytest.raises(NotAUnit):
        u.decompose((2, 0))


def test_is_square_unit_sqrt2(ring_sqrt2):
    u = unit_group(ring_sqrt2)
    assert is_square_unit(u, (3, 2))
    assert not is_square_unit(u, (1, 1))
    assert not is_square_unit(u, (-1, 0))
    eps4 = ring_sqrt2.unit_pow((1, 1), 4)
    assert is_square_unit(u, eps4)


def test_unit_decompose_rationals():
    u = unit_group(parse_ring("Q"))
    t, free = u.decompose(Fraction(-8, 9))
    assert t == (1,)
    assert free == {2: 3, 3: -2}


def test_is_unit_per_ring():
    assert is_unit(parse_ring("Z"), -1) and not is_unit(parse_ring("Z"), 2)
    assert is_unit(parse_ring("Z/9"), 2) and not is_unit(parse_ring("Z/9"), 3)
    assert is_unit(parse_ring("Z[sqrt(2)]"), (1, 1))
    assert not is_unit(parse_ring("Z[sqrt(2)]"), (1, 2))


# ---------------------------------------------------------------------------
# the divisibility predicate psi


LAM = (3, 2)  # (1+sqrt(2))^2, generates the squares among the positive units


def _lam_pow(r, k):
    return r.unit_pow(LAM, k)


def test_psi_worked_fixture_true(ring_sqrt2):
    r = ring_sqrt2
    alpha = LAM
    beta = _lam_pow(r, 2)
    delta = _lam_pow(r, 6)
    gate = r.add(r.one, r.mul(r.sub(beta, r.one), alpha))
    a = r.mul(gate, (7, 0))
    assert eval_psi(r, 2, LAM, alpha, beta, delta, a) is True


def test_psi_worked_fixture_alpha_one_false(ring_sqrt2):
    r = ring_sqrt2
    a = r.mul(r.add(r.one, r.mul(r.sub(_lam_pow(r, 2), r.one), LAM)), (7, 0))
    assert eval_psi(r, 2, LAM, r.one, _lam_pow(r, 2), _lam_pow(r, 6), a) is False


def test_psi_worked_fixture_small_delta_false(ring_sqrt2):
    r = ring_sqrt2
    a = r.mul(r.add(r.one, r.mul(r.sub(_lam_pow(r, 2), r.one), LAM)), (7, 0))
    assert eval_psi(r, 2, LAM, LAM, _lam_pow(r, 2), LAM, a) is False


def test_psi_rejects_non_subgroup_arguments(ring_sqrt2):
    r = ring_sqrt2
    with pytest.raises(NotInSubgroupB):
        # 1+sqrt(2) is a unit but not a square, so it is outside B = (R^x)^2
        eval_psi(r, 2, LAM, (1, 1), _lam_pow(r, 2), _lam_pow(r, 6), r.one)
    with pytest.raises(NotInSubgroupB):
        eval_psi(r, 2, LAM, (2, 0), _lam_pow(r, 2), _lam_pow(r, 6), r.one)


def _psi_oracle(r, s, lam, alpha, beta, delta, a) -> bool:
    """Independent re-statement: same conjuncts, divisibility via the
    Fraction linear solver instead of the ring's conjugate-norm test."""
    if alpha == r.one or delta == r.one:
        return False
    d1 = r.sub(delta, r.one)
    for i in range(1, s + 1):
        lhs = r.sub(r.mul(alpha, r.unit_pow(lam, i)), r.one)
        if lhs == r.zero:
            if d1 != r.zero:
                return False
            continue
        if not _divides_oracle(r.d, lhs, d1):
            return False
    gate = r.add(r.one, r.mul(r.sub(beta, r.one), alpha))
    if gate == r.zero:
        return a == r.zero
    return _divides_oracle(r.d, gate, a)


def test_psi_matches_independent_oracle_on_seeded_instances(ring_sqrt2, rng):
    r = ring_sqrt2
    agree = 0
    for _ in range(200):
        s = rng.randint(1, 3)
        alpha = _lam_pow(r, rng.randint(-3, 4))
        beta = _lam_pow(r, rng.randint(-3, 4))
        delta = _lam_pow(r, rng.randint(-4, 5))
        a = r.random_elem(rng)
        expected = _psi_oracle(r, s, LAM, alpha, beta, delta, a)
        assert eval_psi(r, s, LAM, alpha, beta, delta, a) == expected
        agree += 1
    assert agree == 200


def test_psi_needs_real_quadratic_order():
    with pytest.raises(InvalidParameter):
        eval_psi(parse_ring("Z"), 1, 2, 3, 5, 7, 1)
    with pytest.raises(InvalidParameter):
        eval_psi(parse_ring("Z[i]"), 1, (0, 1), (1, 0), (1, 0), (1, 0), (1, 0))
