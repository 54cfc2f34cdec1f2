import math

import numpy as np
import pytest

from rbtensor.matrix import (RBMatrix, conj_transpose, frobenius_norm, mat_mul, rb_pinv, rb_rank,
                             rb_svd, singular_pairs)
from rbtensor.scalar import E1, RBScalar, rb_modulus, rb_mul


def rand(rng, m, n):
    return RBMatrix.from_components(*rng.standard_normal((4, m, n)))


def naive_mul(a, b):
    """Triple loop in 1/i/j/k scalar arithmetic."""
    m, n, p = a.m, a.n, b.n
    out = np.zeros((m, p, 4))
    for i in range(m):
        for j in range(p):
            acc = RBScalar()
            for k in range(n):
                acc = acc + rb_mul(a.entry(i, k), b.entry(k, j))
            out[i, j] = acc.as_tuple()
    return RBMatrix.from_components(*np.moveaxis(out, -1, 0))


def test_component_round_trip(rng):
    comps = rng.standard_normal((3, 4, 4))
    a = RBMatrix.from_components(*np.moveaxis(comps, -1, 0))
    assert np.allclose(a.components(), comps, rtol=0, atol=1e-15)


def test_mul_identity(rng):
    b = rand(rng, 3, 4)
    assert (mat_mul(RBMatrix.identity(3), b) - b).norm() == 0


def test_mul_1x1_matches_scalar(rng):
    for _ in range(100):
        x, y = RBScalar(*rng.standard_normal(4)), RBScalar(*rng.standard_normal(4))
        a = RBMatrix.from_components(*[[[c]] for c in x.as_tuple()])
        b = RBMatrix.from_components(*[[[c]] for c in y.as_tuple()])
        assert (a @ b).entry(0, 0).isclose(rb_mul(x, y), tol=1e-14)


@pytest.mark.parametrize("shape", [(1, 1, 1), (2, 3, 4), (4, 4, 2)])
def test_mul_matches_naive(rng, shape):
    m, n, p = shape
    a, b = rand(rng, m, n), rand(rng, n, p)
    ref = naive_mul(a, b)
    assert (a @ b - ref).norm() <= 1e-12 * ref.norm()


def test_mul_shape_error(rng):
    with pytest.raises(ValueError):
        rand(rng, 2, 3) @ rand(rng, 2, 3)


def test_conj_transpose_product(rng):
    a, b = rand(rng, 4, 3), rand(rng, 3, 5)
    lhs, rhs = (a @ b).H, b.H @ a.H
    assert (lhs - rhs).norm() <= 1e-13 * rhs.norm()


def test_conj_transpose_scalar_rule(rng):
    a = rand(rng, 2, 3)
    ah = conj_transpose(a)
    for i in range(2):
        for j in range(3):
            assert ah.entry(j, i).isclose(a.entry(i, j).conj())


def test_conj_transpose_involution(rng):
    assert conj_transpose(RBMatrix.identity(3)).allclose(RBMatrix.identity(3))
    for _ in range(100):
        a = rand(rng, 3, 2)
        assert (a.H.H - a).norm() == 0
    c = rand(rng, 3, 3)
    h = c + c.H
    assert (h - h.H).norm() <= 1e-15


def test_norm_forms(rng):
    assert frobenius_norm(RBMatrix.zeros(2, 3)) == 0
    assert math.isclose(frobenius_norm(RBMatrix.identity(5)), math.sqrt(5))
    for _ in range(100):
        a = rand(rng, 3, 4)
        direct = math.sqrt(sum(rb_modulus(a.entry(i, j)) ** 2 for i in range(3) for j in range(4)))
        trace = math.sqrt(sum((a.H @ a).entry(i, i).q0 for i in range(4)))
        assert math.isclose(a.norm(), direct, rel_tol=1e-12)
        assert math.isclose(a.norm(), trace, rel_tol=1e-12)


def check_unitary(u, tol=1e-11):
    eye = RBMatrix.identity(u.m)
    return (u @ u.H - eye).norm() <= tol and (u.H @ u - eye).norm() <= tol


def test_svd_random(rng):
    for _ in range(100):
        a = rand(rng, 6, 4)
        u, s, v = rb_svd(a)
        assert (u @ s @ v.H - a).norm() <= 1e-11 * max(1, a.norm())
        assert check_unitary(u) and check_unitary(v)
        off = s.part1 * ~np.eye(6, 4, dtype=bool)
        assert np.all(off == 0)


def test_svd_identity_and_pairs():
    u, s, v = rb_svd(RBMatrix.identity(3))
    assert s.allclose(RBMatrix.identity(3))
    a = RBMatrix(np.array([[2.0]]), np.array([[3.0]]))  # 2 e1 + 3 e2
    assert np.allclose(singular_pairs(a), [[2.0, 3.0]])
    _, s, _ = rb_svd(a)
    assert np.isclose(s.part1[0, 0], 2) and np.isclose(s.part2[0, 0], 3)


def penrose(a, x):
    def r(p, q):
        return (p - q).norm() / max(1.0, q.norm())
    return max(r(a @ x @ a, a), r(x @ a @ x, x), r((a @ x).H, a @ x), r((x @ a).H, x @ a))


def test_pinv_examples(rng):
    assert rb_pinv(RBMatrix.identity(3)).allclose(RBMatrix.identity(3))
    e1i = RBMatrix.identity(2).scale(E1)
    p = rb_pinv(e1i)
    assert p.allclose(e1i)
    assert np.all(p.part2 == 0)
    assert penrose(e1i, p) <= 1e-10
    z = rb_pinv(RBMatrix.zeros(3, 2))
    assert z.shape == (2, 3) and z.norm() == 0


def test_pinv_penrose_random(rng):
    for _ in range(100):
        a = rand(rng, 5, 3)
        assert penrose(a, rb_pinv(a)) <= 1e-10


def test_pinv_hermitian_idempotent(rng):
    q = rand(rng, 5, 2)
    p = q @ rb_pinv(q)
    assert (rb_pinv(p) - p).norm() <= 1e-10 * p.norm()


def test_rank():
    assert rb_rank(RBMatrix.zeros(3, 3)) == 0
    assert rb_rank(RBMatrix.identity(3)) == 3
    e1i = RBMatrix.identity(2).scale(E1)
    assert rb_rank(e1i) == 2
    assert (e1i @ rb_pinv(e1i) @ e1i - e1i).norm() <= 1e-14


def test_rank_deficient(rng):
    a = rand(rng, 5, 2) @ rand(rng, 2, 4)
    assert rb_rank(a) == 2


def test_scale_and_entry():
    a = RBMatrix.identity(2).scale(RBScalar(0, 1))
    assert a.entry(0, 0) == RBScalar(0, 1)
    assert a.scale(2).entry(1, 1) == RBScalar(0, 2)
    with pytest.raises(ValueError):
        RBMatrix(np.zeros((2, 2)), np.zeros((2, 3)))
