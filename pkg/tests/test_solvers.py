import numpy as np
import pytest

from rbtensor import _backend, decomp, solvers
from rbtensor.scalar import E1
from rbtensor.tensor import RBTensor, ht_product, identity_tensor, tensor_frobenius_norm


def rand(rng, *shape):
    return RBTensor.random(shape, rng)


def nrm(t):
    return tensor_frobenius_norm(t)


def low_rank(rng, n1, n2, n3, r):
    return ht_product(rand(rng, n1, r, n3), rand(rng, r, n2, n3))


def test_general_consistent(rng):
    a = low_rank(rng, 5, 4, 3, 2)
    b = ht_product(a, rand(rng, 4, 2, 3))
    base = solvers.solve_general(a, b)
    assert base.consistent and base.min_norm and not base.failed
    assert base.residual <= 1e-9 * nrm(b)
    for _ in range(20):
        rep = solvers.solve_general(a, b, rand(rng, 4, 2, 3))
        assert rep.consistent and not rep.min_norm
        assert rep.residual <= 1e-9 * nrm(b)
        assert rep.solution_norm >= base.solution_norm - 1e-9


def test_general_inconsistent_flagged(rng):
    a = low_rank(rng, 5, 4, 3, 2)
    b = rand(rng, 5, 2, 3)
    rep = solvers.solve_general(a, b)
    assert not rep.consistent and rep.failed == ("range",)
    assert rep.conditions["range"] > 1e-3
    # the returned solution is still the least-squares one
    assert np.isclose(rep.residual, solvers.lstsq_axb(a, b).residual)


def test_hermitian(rng):
    a = rand(rng, 4, 4, 3)
    c = rand(rng, 4, 4, 3)
    b = ht_product(a, c + c.H)
    rep = solvers.solve_hermitian(a, b)
    assert rep.consistent
    x = rep.solution
    assert nrm(x - x.H) <= 1e-9 * nrm(x)
    assert rep.residual <= 1e-9 * nrm(b)


def test_hermitian_rank_deficient_free_parameter(rng):
    a = low_rank(rng, 4, 4, 3, 2)
    c = rand(rng, 4, 4, 3)
    b = ht_product(a, c + c.H)
    sols = []
    for _ in range(100):
        u = rand(rng, 4, 4, 3)
        rep = solvers.solve_hermitian(a, b, u + u.H)
        x = rep.solution
        assert rep.consistent
        assert nrm(x - x.H) <= 1e-9 * max(1, nrm(x))
        assert rep.residual <= 1e-9 * nrm(b)
        sols.append(x)
    # the free parameter really moves the solution
    assert nrm(sols[0] - sols[1]) > 1e-3


def test_hermitian_conditions_flagged(rng):
    a = rand(rng, 3, 3, 2)
    rep = solvers.solve_hermitian(a, ht_product(a, rand(rng, 3, 3, 2)))
    assert not rep.consistent
    assert rep.failed == ("hermitian_compatibility",)
    a = low_rank(rng, 4, 4, 2, 2)
    b = rand(rng, 4, 4, 2)
    b = b + b.H  # A B* = B A* fails too in general, range fails surely
    rep = solvers.solve_hermitian(a, b)
    assert "range" in rep.failed


def test_hermitian_rejects_non_hermitian_free(rng):
    a = rand(rng, 3, 3, 2)
    with pytest.raises(ValueError, match="not Hermitian"):
        solvers.solve_hermitian(a, a, rand(rng, 3, 3, 2))


def test_lstsq_axb_dominance(rng):
    a = low_rank(rng, 5, 4, 3, 2)
    b = rand(rng, 5, 2, 3)
    base = solvers.lstsq_axb(a, b)
    assert base.min_norm
    for _ in range(100):
        rep = solvers.lstsq_axb(a, b, rand(rng, 4, 2, 3))
        assert abs(rep.residual - base.residual) <= 1e-9 * max(1, base.residual)
        assert rep.solution_norm >= base.solution_norm - 1e-9


def test_lstsq_xab_dominance(rng):
    a = low_rank(rng, 4, 5, 3, 2)
    b = rand(rng, 2, 5, 3)
    base = solvers.lstsq_xab(a, b)
    for _ in range(100):
        rep = solvers.lstsq_xab(a, b, rand(rng, 2, 4, 3))
        assert abs(rep.residual - base.residual) <= 1e-9 * max(1, base.residual)
        assert rep.solution_norm >= base.solution_norm - 1e-9


def test_lstsq_residual_is_range_witness(rng):
    # e1 I is a zero divisor: its range misses the whole e2 half
    a = identity_tensor(3, 2).scale(E1)
    b = rand(rng, 3, 2, 2)
    rep = solvers.lstsq_axb(a, b)
    r = decomp.tensor_pinv(a).right_projector
    assert np.isclose(rep.residual, nrm(ht_product(r, b)), rtol=1e-12)
    assert np.isclose(rep.residual, rep.conditions["range"], rtol=1e-12)
    assert np.all(rep.solution.part2 == 0)


def test_shape_errors(rng):
    a = rand(rng, 3, 2, 2)
    with pytest.raises(ValueError):
        solvers.solve_general(a, rand(rng, 2, 2, 2))
    with pytest.raises(ValueError):
        solvers.solve_general(a, rand(rng, 3, 2, 2), rand(rng, 3, 2, 2))
    with pytest.raises(ValueError):
        solvers.solve_hermitian(a, rand(rng, 3, 3, 2))
    with pytest.raises(ValueError):
        solvers.lstsq_xab(a, rand(rng, 2, 3, 2))
    with pytest.raises(ValueError):
        solvers.lstsq_axb(a, rand(rng, 3, 1, 3))


def test_workers_do_not_change_results(rng):
    a = rand(rng, 6, 5, 4)
    b = rand(rng, 6, 2, 4)
    one = solvers.lstsq_axb(a, b).solution
    _backend.set_workers(4)
    try:
        four = solvers.lstsq_axb(a, b).solution
    finally:
        _backend.set_workers(1)
    assert np.array_equal(one.part1, four.part1) and np.array_equal(one.part2, four.part2)
