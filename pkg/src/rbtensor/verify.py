"""Executable algebraic property suite.

Each property draws seeded random tensors of a requested shape
``(n1, n2, n3)``, evaluates both sides of an identity and returns a
relative residual. A property passes when its residual is at most its
threshold. The suite backs ``rbtensor verify`` and the test-suite.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from rbtensor import decomp, solvers
from rbtensor.matrix import RBMatrix, rb_pinv
from rbtensor.tensor import (RBTensor, circ, fold, ht_product, ht_product_direct, identity_tensor,
                             is_f_diagonal, is_unitary, mode3_dft, mode3_idft,
                             tensor_conj_transpose, tensor_frobenius_norm, tensor_inverse, vec)

DEFAULT_SIZES = ((4, 3, 4), (3, 5, 3), (6, 6, 4), (2, 2, 1))


@dataclass(frozen=True)
class Property:
    name: str
    threshold: float
    check: Callable
    doc: str = ""


@dataclass(frozen=True)
class Outcome:
    name: str
    shape: tuple
    seed: int
    residual: float
    threshold: float

    @property
    def passed(self):
        return bool(self.residual <= self.threshold)


REGISTRY = {}


def prop(name, threshold):
    def wrap(fn):
        if name in REGISTRY:
            raise ValueError(f"duplicate property {name}")
        REGISTRY[name] = Property(name, threshold, fn, (fn.__doc__ or "").strip())
        return fn
    return wrap


def _n(t):
    return tensor_frobenius_norm(t)


def rel(x, y):
    """``||x - y||_F / max(1, ||y||_F)``."""
    return _n(x - y) / max(1.0, _n(y))


def _rand(rng, *shape):
    return RBTensor.random(shape, rng)


def _mul(*ts):
    out = ts[0]
    for t in ts[1:]:
        out = ht_product(out, t)
    return out


H = tensor_conj_transpose
P = decomp.pinv


def _flag(ok):
    return 0.0 if ok else math.inf


def _unitary(rng, n, n3):
    return decomp.ht_svd(_rand(rng, n, n, n3)).U


def _low_rank(rng, n1, n2, n3, r):
    return ht_product(_rand(rng, n1, r, n3), _rand(rng, r, n2, n3))


# -- Ht-product and transforms ------------------------------------------------

@prop("ht_product_dft_equivalence", 1e-12)
def _equivalence(rng, shape):
    """DFT-domain Ht-product equals the block circulant definition."""
    n1, n2, n3 = shape
    a, b = _rand(rng, n1, n2, n3), _rand(rng, n2, n1 + 1, n3)
    return rel(ht_product(a, b), ht_product_direct(a, b))


@prop("dft_round_trip", 1e-13)
def _round_trip(rng, shape):
    a = _rand(rng, *shape)
    return rel(mode3_idft(mode3_dft(a)), a)


@prop("dft_kronecker_form", 1e-12)
def _kronecker(rng, shape):
    """Vec of the transformed tensor is ``(sqrt(n3) F kron I) Vec(A)``."""
    n1, n2, n3 = shape
    a = _rand(rng, n1, n2, n3)
    idx = np.arange(n3)
    f = np.exp(-2j * np.pi * np.outer(idx, idx) / n3)
    k = np.kron(f, np.eye(n1))
    va = vec(a)
    expect = RBMatrix(k @ va.part1, k @ va.part2)
    got = vec(RBTensor(mode3_dft(a).part1, mode3_dft(a).part2))
    return (got - expect).norm() / max(1.0, expect.norm())


@prop("fold_vec_inverse", 0.0)
def _fold_vec(rng, shape):
    a = _rand(rng, *shape)
    return rel(fold(vec(a), a.n1, a.n3), a)


@prop("identity_neutral", 1e-13)
def _identity(rng, shape):
    n1, n2, n3 = shape
    a = _rand(rng, *shape)
    return max(rel(ht_product(identity_tensor(n1, n3), a), a),
               rel(ht_product(a, identity_tensor(n2, n3)), a))


@prop("associativity", 1e-11)
def _assoc(rng, shape):
    n1, n2, n3 = shape
    a, b, c = _rand(rng, n1, n2, n3), _rand(rng, n2, n1, n3), _rand(rng, n1, n2, n3)
    return rel(ht_product(ht_product(a, b), c), ht_product(a, ht_product(b, c)))


@prop("distributivity", 1e-11)
def _distrib(rng, shape):
    n1, n2, n3 = shape
    a, b, c = _rand(rng, n1, n2, n3), _rand(rng, n2, n1, n3), _rand(rng, n2, n1, n3)
    d, e = _rand(rng, n1, n2, n3), _rand(rng, n1, n2, n3)
    left = rel(ht_product(a, b + c), ht_product(a, b) + ht_product(a, c))
    right = rel(ht_product(d + e, b), ht_product(d, b) + ht_product(e, b))
    return max(left, right)


@prop("product_conj_transpose", 1e-11)
def _prod_ct(rng, shape):
    """``(A B)* = B* A*``."""
    n1, n2, n3 = shape
    a, b = _rand(rng, n1, n2, n3), _rand(rng, n2, n1, n3)
    return rel(H(ht_product(a, b)), ht_product(H(b), H(a)))


@prop("conj_transpose_involution", 0.0)
def _involution(rng, shape):
    a, b = _rand(rng, *shape), _rand(rng, *shape)
    return max(rel(H(H(a)), a), rel(H(a + b), H(a) + H(b)))


@prop("conj_transpose_dft_slices", 1e-12)
def _ct_dft(rng, shape):
    """Transformed slices of ``A*`` are the conjugate transposes of those of ``A``."""
    a = _rand(rng, *shape)
    lhs = mode3_dft(H(a)).slices()
    rhs = mode3_dft(a).slices().conj().swapaxes(-1, -2)
    return float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(rhs)))


@prop("zero_absorbs", 0.0)
def _zero(rng, shape):
    n1, n2, n3 = shape
    a = _rand(rng, n1, n2, n3)
    return max(_n(ht_product(a, RBTensor.zeros(n2, 2, n3))),
               _n(ht_product(RBTensor.zeros(2, n1, n3), a)))


@prop("norm_identity", 1e-12)
def _norm_identity(rng, shape):
    """``||A||_F = ||diag(A_hat)||_F / sqrt(n3)``."""
    a = _rand(rng, *shape)
    hat = mode3_dft(a)
    blk = math.sqrt((np.vdot(hat.part1, hat.part1).real + np.vdot(hat.part2, hat.part2).real) / 2)
    return abs(_n(a) - blk / math.sqrt(a.n3)) / _n(a)


@prop("unitary_iff_dft_slices_unitary", 1e-10)
def _unitary_slices(rng, shape):
    n, n3 = shape[0], shape[2]
    u = _unitary(rng, n, n3)
    s = mode3_dft(u).slices()
    eye = np.eye(n)
    slice_res = float(np.abs(s.conj().swapaxes(-1, -2) @ s - eye).max())
    # a non-unitary tensor must have a non-unitary slice
    v = u + _rand(rng, n, n, n3).scale(1e-3)
    sv = mode3_dft(v).slices()
    detect = float(np.abs(sv.conj().swapaxes(-1, -2) @ sv - eye).max()) > 1e-8 and not is_unitary(v)
    return max(slice_res, _flag(is_unitary(u) and detect))


@prop("inverse_two_sided", 1e-10)
def _inverse(rng, shape):
    n, n3 = shape[0], shape[2]
    a = _rand(rng, n, n, n3)
    inv = tensor_inverse(a)
    eye = identity_tensor(n, n3)
    return max(rel(ht_product(inv, a), eye), rel(ht_product(a, inv), eye))


# -- Ht-SVD and rank ---------------------------------------------------------

@prop("ht_svd_contract", 1e-10)
def _svd(rng, shape):
    a = _rand(rng, *shape)
    d = decomp.ht_svd(a)
    recon = rel(_mul(d.U, d.S, H(d.V)), a)
    n1, n2, n3 = shape
    uu = rel(ht_product(H(d.U), d.U), identity_tensor(n1, n3))
    vv = rel(ht_product(H(d.V), d.V), identity_tensor(n2, n3))
    return max(recon, uu, vv, _flag(is_f_diagonal(d.S)))


@prop("tubal_rank_construction", 0.0)
def _tubal(rng, shape):
    n1, n2, n3 = shape
    r = max(1, min(n1, n2) - 1)
    a = _low_rank(rng, n1, n2, n3, r)
    ok = decomp.tubal_rank(a) == r and decomp.tubal_rank(RBTensor.zeros(*shape)) == 0
    return _flag(ok)


@prop("rank_k_exact_at_rank", 1e-10)
def _rank_k(rng, shape):
    n1, n2, n3 = shape
    r = max(1, min(n1, n2) - 1)
    a = _low_rank(rng, n1, n2, n3, r)
    return rel(decomp.rank_k_approx(a, r), a)


# -- Moore-Penrose inverse ---------------------------------------------------

def penrose_residuals(a, x):
    """The four Penrose residuals of ``x`` as a candidate inverse of ``a``."""
    ax, xa = ht_product(a, x), ht_product(x, a)
    return (rel(ht_product(ax, a), a), rel(ht_product(xa, x), x),
            rel(H(ax), ax), rel(H(xa), xa))


@prop("pinv_penrose", 1e-9)
def _penrose(rng, shape):
    a = _rand(rng, *shape)
    return max(penrose_residuals(a, P(a)))


@prop("pinv_penrose_rank_deficient", 1e-9)
def _penrose_rd(rng, shape):
    n1, n2, n3 = shape
    a = _low_rank(rng, n1, n2, n3, max(1, min(n1, n2) - 1))
    return max(penrose_residuals(a, P(a)))


@prop("pinv_penrose_zero_divisor", 1e-9)
def _penrose_e1(rng, shape):
    """An ``e1``-only tensor (second part zero) is a zero divisor everywhere."""
    a = _rand(rng, *shape)
    a = RBTensor(a.part1, np.zeros_like(a.part2))
    return max(penrose_residuals(a, P(a)))


@prop("pinv_dual_path", 1e-9)
def _dual(rng, shape):
    a = _rand(rng, *shape)
    return rel(decomp.pinv_via_svd(a), P(a))


@prop("pinv_a_double", 1e-9)
def _pa(rng, shape):
    a = _rand(rng, *shape)
    return rel(P(P(a)), a)


@prop("pinv_b_conj_transpose", 1e-9)
def _pb(rng, shape):
    a = _rand(rng, *shape)
    return rel(H(P(a)), P(H(a)))


@prop("pinv_c_gram", 1e-9)
def _pc(rng, shape):
    a = _rand(rng, *shape)
    ap, ah = P(a), H(a)
    return max(rel(P(ht_product(a, ah)), ht_product(P(ah), ap)),
               rel(P(ht_product(ah, a)), ht_product(ap, P(ah))))


@prop("pinv_d_unitary_factors", 1e-9)
def _pd(rng, shape):
    n1, n2, n3 = shape
    a = _rand(rng, *shape)
    p, q = _unitary(rng, n1, n3), _unitary(rng, n2, n3)
    return rel(P(_mul(p, a, q)), _mul(H(q), P(a), H(p)))


@prop("pinv_e_f_diagonal", 1e-9)
def _pe(rng, shape):
    """f-diagonal input gives an f-diagonal inverse, equal to the inverse when it exists.

    For ``n3 = 1`` the inverse is also the entrywise RB scalar inverse.
    """
    n, n3 = shape[0], shape[2]
    a = _rand(rng, n, n, n3)
    mask = np.eye(n, dtype=bool)[:, :, None]
    d = RBTensor(a.part1 * mask, a.part2 * mask)
    dp = P(d)
    res = [_flag(is_f_diagonal(dp)), rel(dp, tensor_inverse(d))]
    single = RBTensor(d.part1[:, :, :1], d.part2[:, :, :1])
    entrywise = rb_pinv(RBMatrix(single.part1[:, :, 0], single.part2[:, :, 0]))
    got = P(single)
    res.append((RBMatrix(got.part1[:, :, 0], got.part2[:, :, 0]) - entrywise).norm()
               / max(1.0, entrywise.norm()))
    # zero-divisor diagonal entries: still f-diagonal
    z = RBTensor(d.part1, np.zeros_like(d.part2))
    res.append(_flag(is_f_diagonal(P(z))))
    return max(res)


@prop("pinv_f_gram_forms", 1e-9)
def _pf(rng, shape):
    a = _rand(rng, *shape)
    ap, ah = P(a), H(a)
    return max(rel(ht_product(ah, P(ht_product(a, ah))), ap),
               rel(ht_product(P(ht_product(ah, a)), ah), ap))


@prop("pinv_g", 1e-9)
def _pg(rng, shape):
    a = _rand(rng, *shape)
    ah = H(a)
    return max(rel(_mul(a, ah, P(ah)), a), rel(_mul(P(ah), ah, a), a))


@prop("pinv_h", 1e-9)
def _ph(rng, shape):
    a = _rand(rng, *shape)
    ah, ap = H(a), P(a)
    return max(rel(_mul(ah, a, ap), ah), rel(_mul(ap, a, ah), ah))


@prop("pinv_i", 1e-9)
def _pi(rng, shape):
    a = _rand(rng, *shape)
    ah, ap = H(a), P(a)
    return max(rel(ht_product(a, ap), ht_product(P(ah), ah)),
               rel(ht_product(ap, a), ht_product(ah, P(ah))))


@prop("pinv_j", 1e-9)
def _pj(rng, shape):
    a = _rand(rng, *shape)
    g = ht_product(a, H(a))
    lhs = ht_product(a, P(a))
    return max(rel(ht_product(P(g), g), lhs), rel(ht_product(g, P(g)), lhs))


@prop("pinv_k", 1e-9)
def _pk(rng, shape):
    a = _rand(rng, *shape)
    g = ht_product(H(a), a)
    lhs = ht_product(P(a), a)
    return max(rel(ht_product(P(g), g), lhs), rel(ht_product(g, P(g)), lhs))


@prop("pinv_l_normal", 1e-9)
def _pl(rng, shape):
    """For normal ``A`` the two projectors coincide."""
    n, n3 = shape[0], shape[2]
    u = _unitary(rng, n, n3)
    raw = _rand(rng, n, n, n3)
    mask = np.eye(n, dtype=bool)[:, :, None].copy()
    if n > 1:
        mask[-1, -1, :] = False  # one zero tube makes A singular
    d = RBTensor(raw.part1 * mask, raw.part2 * mask)
    a = _mul(u, d, H(u))
    normal = rel(ht_product(a, H(a)), ht_product(H(a), a))
    return max(normal, rel(ht_product(a, P(a)), ht_product(P(a), a)))


@prop("pinv_m_idempotent", 1e-9)
def _pm(rng, shape):
    a = _rand(rng, *shape)
    ap = P(a)
    x, y = ht_product(a, ap), ht_product(ap, a)
    return max(rel(ht_product(x, x), x), rel(ht_product(y, y), y))


@prop("pinv_n_hermitian_idempotent", 1e-9)
def _pn(rng, shape):
    n1, n2, n3 = shape
    q = _rand(rng, n1, max(1, min(n1, n2) - 1), n3)
    a = ht_product(q, P(q))
    return max(rel(H(a), a), rel(ht_product(a, a), a), rel(P(a), a))


# -- reverse order law ---------------------------------------------------------

def _reverse_order(a, b):
    return rel(P(ht_product(a, b)), ht_product(P(b), P(a)))


@prop("reverse_order_a_pinv", 1e-9)
def _ra(rng, shape):
    n1, n2, n3 = shape
    b = _rand(rng, n1, n2, n3)
    return _reverse_order(P(b), b)


@prop("reverse_order_b_conj_transpose", 1e-9)
def _rb(rng, shape):
    b = _rand(rng, *shape)
    return _reverse_order(H(b), b)


@prop("reverse_order_c_isometry", 1e-9)
def _rc(rng, shape):
    """``A* A = I`` for ``A`` made of leading lateral slices of a unitary tensor."""
    n1, n2, n3 = shape
    m = max(n1, n2)
    u = _unitary(rng, m, n3)
    a = RBTensor(u.part1[:, :n2], u.part2[:, :n2])
    b = _rand(rng, n2, n1, n3)
    iso = rel(ht_product(H(a), a), identity_tensor(n2, n3))
    return max(iso, _reverse_order(a, b))


@prop("reverse_order_d_coisometry", 1e-9)
def _rd(rng, shape):
    """``B B* = I`` for ``B`` made of leading horizontal slices of a unitary tensor."""
    n1, n2, n3 = shape
    m = max(n1, n2)
    u = _unitary(rng, m, n3)
    b = RBTensor(u.part1[:n2], u.part2[:n2])
    a = _rand(rng, n1, n2, n3)
    co = rel(ht_product(b, H(b)), identity_tensor(n2, n3))
    return max(co, _reverse_order(a, b))


# -- projectors --------------------------------------------------------------

def _projectors(a):
    res = decomp.tensor_pinv(a)
    return res.pinv, res.left_projector, res.right_projector


def _rd_or_full(rng, shape):
    n1, n2, n3 = shape
    # rank deficient on one side keeps both projectors non-trivial
    return _low_rank(rng, n1, n2, n3, max(1, min(n1, n2) - 1))


@prop("projector_a_annihilation", 1e-9)
def _qa(rng, shape):
    a = _rd_or_full(rng, shape)
    _, l, r = _projectors(a)
    return max(_n(ht_product(a, l)), _n(ht_product(r, a))) / max(1.0, _n(a))


@prop("projector_b_pinv_annihilation", 1e-9)
def _qb(rng, shape):
    a = _rd_or_full(rng, shape)
    ap, l, r = _projectors(a)
    return max(_n(ht_product(l, ap)), _n(ht_product(ap, r))) / max(1.0, _n(ap))


@prop("projector_c_conjugation", 1e-9)
def _qc(rng, shape):
    a = _rd_or_full(rng, shape)
    _, l, r = _projectors(a)
    _, lh, rh = _projectors(H(a))
    return max(rel(lh, H(r)), rel(lh, r), rel(rh, H(l)), rel(rh, l))


@prop("projector_d_idempotent", 1e-9)
def _qd(rng, shape):
    a = _rd_or_full(rng, shape)
    _, l, r = _projectors(a)
    return max(rel(ht_product(l, l), l), rel(ht_product(r, r), r))


@prop("projector_e_self_pinv", 1e-9)
def _qe(rng, shape):
    a = _rd_or_full(rng, shape)
    _, l, r = _projectors(a)
    # computed projectors carry round-off singular values far above eps, so
    # the default cutoff would invert them
    return max(rel(P(l, rtol=1e-8), l), rel(P(r, rtol=1e-8), r))


@prop("projector_f_gram", 1e-9)
def _qf(rng, shape):
    a = _rd_or_full(rng, shape)
    _, l, r = _projectors(a)
    _, l2, _ = _projectors(ht_product(H(a), a))
    _, _, r2 = _projectors(ht_product(a, H(a)))
    return max(rel(l2, l), rel(r2, r))


# -- equations ---------------------------------------------------------------

@prop("solve_general_consistent", 1e-9)
def _sg(rng, shape):
    n1, n2, n3 = shape
    a = _rd_or_full(rng, shape)
    b = ht_product(a, _rand(rng, n2, 2, n3))
    worst = 0.0
    for y in [None] + [_rand(rng, n2, 2, n3) for _ in range(3)]:
        rep = solvers.solve_general(a, b, y)
        worst = max(worst, rep.residual / max(1.0, _n(b)), _flag(rep.consistent))
    return worst


@prop("solve_general_inconsistent_flagged", 0.0)
def _sgi(rng, shape):
    n1, n2, n3 = shape
    a = _low_rank(rng, n1, n2, n3, max(1, min(n1, n2) - 1))
    _, _, r = _projectors(a)
    b = ht_product(a, _rand(rng, n2, 2, n3)) + ht_product(r, _rand(rng, n1, 2, n3))
    return _flag(not solvers.solve_general(a, b).consistent)


@prop("solve_hermitian", 1e-9)
def _sh(rng, shape):
    n1, n2, n3 = shape
    a = _rd_or_full(rng, shape)
    c = _rand(rng, n2, n2, n3)
    b = ht_product(a, c + H(c))
    worst = 0.0
    for _ in range(3):
        u = _rand(rng, n2, n2, n3)
        rep = solvers.solve_hermitian(a, b, u + H(u))
        x = rep.solution
        worst = max(worst, rep.residual / max(1.0, _n(b)), rel(H(x), x), _flag(rep.consistent))
    return worst


@prop("solve_hermitian_condition_flagged", 0.0)
def _shf(rng, shape):
    n, n3 = shape[0], shape[2]
    a = _rand(rng, n, n, n3)
    c = _rand(rng, n, n, n3)
    rep = solvers.solve_hermitian(a, ht_product(a, c))
    return _flag(not rep.consistent and "hermitian_compatibility" in rep.failed)


@prop("lstsq_axb_min_norm", 1e-9)
def _laxb(rng, shape):
    n1, n2, n3 = shape
    a = _rd_or_full(rng, shape)
    b = _rand(rng, n1, 2, n3)
    base = solvers.lstsq_axb(a, b)
    worst = 0.0
    for _ in range(10):
        rep = solvers.lstsq_axb(a, b, _rand(rng, n2, 2, n3))
        worst = max(worst, abs(rep.residual - base.residual),
                    max(0.0, base.solution_norm - rep.solution_norm))
    return worst


@prop("lstsq_xab_min_norm", 1e-9)
def _lxab(rng, shape):
    n1, n2, n3 = shape
    a = _rd_or_full(rng, shape)
    b = _rand(rng, 2, n2, n3)
    base = solvers.lstsq_xab(a, b)
    worst = 0.0
    for _ in range(10):
        rep = solvers.lstsq_xab(a, b, _rand(rng, 2, n1, n3))
        worst = max(worst, abs(rep.residual - base.residual),
                    max(0.0, base.solution_norm - rep.solution_norm))
    return worst


@prop("residual_norm_identity", 1e-12)
def _rni(rng, shape):
    """``||A X - B||_F`` equals the block-diagonal residual over ``sqrt(n3)``."""
    n1, n2, n3 = shape
    a, x, b = _rand(rng, n1, n2, n3), _rand(rng, n2, 2, n3), _rand(rng, n1, 2, n3)
    lhs = _n(ht_product(a, x) - b)
    ah, xh, bh = (mode3_dft(t).slices() for t in (a, x, b))
    d = ah @ xh - bh
    blk = math.sqrt(float(np.vdot(d, d).real) / 2)
    return abs(lhs - blk / math.sqrt(n3)) / max(1.0, lhs)


@prop("circ_first_block_column_is_vec", 0.0)
def _circ(rng, shape):
    a = _rand(rng, *shape)
    c = circ(a)
    v = vec(a)
    return float(max(np.abs(c.part1[:, :a.n2] - v.part1).max(),
                     np.abs(c.part2[:, :a.n2] - v.part2).max()))


def names():
    return list(REGISTRY)


def run_property(name, shape, seed):
    p = REGISTRY[name]
    # one independent stream per (seed, property, shape)
    key = [seed, *shape, *name.encode()]
    rng = np.random.default_rng(key)
    residual = float(p.check(rng, tuple(shape)))
    return Outcome(name, tuple(shape), seed, residual, p.threshold)


def run_suite(seed=0, sizes=DEFAULT_SIZES, select=None):
    """Run every property (or those in ``select``) at every size."""
    chosen = names() if select is None else list(select)
    return [run_property(n, s, seed) for n in chosen for s in sizes]


def summarize(outcomes):
    """Per-property worst outcome, in registry order."""
    worst = {}
    for o in outcomes:
        cur = worst.get(o.name)
        if cur is None or not (o.residual <= cur.residual):
            worst[o.name] = o
    return list(worst.values())
