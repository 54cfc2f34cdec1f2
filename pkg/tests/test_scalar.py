import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rbtensor.scalar import (E1, E2, I, J, K, ONE, CPair, RBScalar, from_cpair, rb_conj,
                             rb_modulus, rb_mul, to_cpair)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
scalars = st.builds(RBScalar, finite, finite, finite, finite)


def close(a, b, tol=1e-14):
    scale = max(1.0, abs(a), abs(b))
    return all(abs(x - y) <= tol * scale * 4 for x, y in zip(a.as_tuple(), b.as_tuple()))


def test_unit_table():
    assert rb_mul(I, I) == RBScalar(-1.0)
    assert rb_mul(J, J) == ONE
    assert rb_mul(I, J) == K
    assert rb_mul(J, I) == K
    assert rb_mul(K, K) == RBScalar(-1.0)


def test_idempotents_split():
    assert rb_mul(E1, E2) == RBScalar()
    assert rb_mul(E1, E1) == E1
    assert rb_mul(E2, E2) == E2


def test_identity_product():
    q = RBScalar(1, 2, 3, 4)
    assert rb_mul(q, ONE) == q


def test_zero_divisor_witness():
    assert rb_mul(RBScalar(1, 0, 1), RBScalar(1, 0, -1)) == RBScalar()


def test_conj_examples():
    assert rb_conj(I) == RBScalar(0, -1)
    assert rb_conj(RBScalar(1, 2, 3, 4)) == RBScalar(1, -2, 3, -4)


def test_modulus_examples():
    assert rb_modulus(RBScalar(1, 1, 1, 1)) == 2.0
    assert rb_modulus(RBScalar()) == 0.0


def test_cpair_examples():
    assert to_cpair(J) == CPair(1, -1)
    assert to_cpair(ONE) == CPair(1, 1)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        RBScalar(0, bad)


def test_operators():
    a, b = RBScalar(1, 2, 3, 4), RBScalar(-1, 0.5, 2, 0)
    assert a + b == RBScalar(0, 2.5, 5, 4)
    assert a - a == RBScalar()
    assert -a == RBScalar(-1, -2, -3, -4)
    assert a * 2 == RBScalar(2, 4, 6, 8)
    assert 1j * ONE == I
    assert abs(a) == rb_modulus(a)
    with pytest.raises(TypeError):
        a * "x"


@given(scalars, scalars)
def test_commutative(a, b):
    assert close(rb_mul(a, b), rb_mul(b, a))


@given(scalars, scalars, scalars)
def test_associative(a, b, c):
    lhs, rhs = rb_mul(rb_mul(a, b), c), rb_mul(a, rb_mul(b, c))
    assert close(lhs, rhs, tol=1e-12)


@given(scalars, scalars)
def test_cpair_is_homomorphism(a, b):
    lhs = to_cpair(rb_mul(a, b))
    rhs = to_cpair(a) * to_cpair(b)
    scale = max(1.0, abs(lhs.c1), abs(lhs.c2))
    assert abs(lhs.c1 - rhs.c1) <= 1e-14 * scale * 4
    assert abs(lhs.c2 - rhs.c2) <= 1e-14 * scale * 4


@given(scalars)
def test_cpair_round_trip(q):
    assert close(from_cpair(to_cpair(q)), q)


@given(scalars)
def test_conj_involution(q):
    assert rb_conj(rb_conj(q)) == q


@given(scalars)
def test_modulus_matches_trace_form(q):
    # for a 1x1 matrix, |q|^2 is the real part of conj(q) q
    assert math.isclose(rb_modulus(q) ** 2, rb_mul(rb_conj(q), q).q0, rel_tol=1e-13, abs_tol=1e-300)


def test_modulus_via_cpair(rng):
    for _ in range(100):
        q = RBScalar(*rng.standard_normal(4))
        c = to_cpair(q)
        assert math.isclose(rb_modulus(q) ** 2, (abs(c.c1) ** 2 + abs(c.c2) ** 2) / 2, rel_tol=1e-14)


def test_isclose():
    assert RBScalar(1, 2, 3, 4).isclose(RBScalar(1, 2, 3, 4 + 1e-16))
    assert not RBScalar(1).isclose(RBScalar(1.001))
    assert np.isfinite(abs(RBScalar(1e300, 1e300)))
