"""Solution families for ``A *Ht X = B`` and ``X *Ht A = B``.

Every solver builds on the Moore-Penrose inverse ``A†`` and the projectors
``L_A = I - A† *Ht A`` and ``R_A = I - A *Ht A†``. Solvability is decided
numerically: a condition holds when its residual is at most
``tol * max(1, ||B||_F)``.
"""
from dataclasses import dataclass, field

from rbtensor import decomp
from rbtensor.tensor import (RBTensor, ht_product, tensor_conj_transpose,
                             tensor_frobenius_norm)

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve.

    Attributes
    ----------
    solution : RBTensor
        The returned solution. For an inconsistent system this is still the
        minimal-norm least-squares particular solution.
    consistent : bool
        Whether every solvability condition holds within tolerance.
    residual : float
        Frobenius norm of the equation residual at ``solution``.
    min_norm : bool
        True when ``solution`` is the minimal-norm (least-squares) solution.
    solution_norm : float
    conditions : dict
        Residual of each solvability condition, keyed by name.
    failed : tuple of str
        Names of the conditions that did not hold.
    """

    solution: RBTensor
    consistent: bool
    residual: float
    min_norm: bool
    solution_norm: float
    conditions: dict = field(default_factory=dict)
    failed: tuple = ()


def _norm(t):
    return tensor_frobenius_norm(t)


def _limit(b, tol):
    return tol * max(1.0, _norm(b))


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def _report(x, residual, conditions, limits, min_norm):
    failed = tuple(name for name, r in conditions.items() if r > limits[name])
    return SolveReport(x, not failed, residual, min_norm, _norm(x), dict(conditions), failed)


def solve_general(A, B, Y=None, rtol=None, tol=DEFAULT_TOL):
    """General solution ``X = A† B + L_A Y`` of ``A *Ht X = B``.

    Parameters
    ----------
    A : RBTensor
        Shape ``(n1, n2, n3)``.
    B : RBTensor
        Shape ``(n1, n4, n3)``.
    Y : RBTensor, optional
        Free parameter of shape ``(n2, n4, n3)``; zero gives ``A† B``.
    rtol : float, optional
        Relative cutoff for the pseudo-inverse.
    tol : float
        Consistency tolerance relative to ``max(1, ||B||_F)``.

    Returns
    -------
    SolveReport
        ``consistent`` is decided by ``||R_A B||_F``. When it is False the
        solution is the least-squares particular solution.
    """
    n1, n2, n3 = A.shape
    _require(B.n1 == n1 and B.n3 == n3, f"B must be ({n1}, n4, {n3}), got {B.shape}")
    if Y is not None:
        _require(Y.shape == (n2, B.n2, n3), f"Y must be {(n2, B.n2, n3)}, got {Y.shape}")
    res = decomp.tensor_pinv(A, rtol)
    x = ht_product(res.pinv, B)
    if Y is not None:
        x = x + ht_product(res.left_projector, Y)
    witness = _norm(ht_product(res.right_projector, B))
    residual = _norm(ht_product(A, x) - B)
    return _report(x, residual, {"range": witness}, {"range": _limit(B, tol)}, Y is None)


def solve_hermitian(A, B, U_free=None, rtol=None, tol=DEFAULT_TOL):
    """Hermitian solutions of ``A *Ht X = B``.

    ``X = A†B + (A†B)* - A† (A B*) (A†)* + L_A U L_A`` with ``U = U*``.
    A Hermitian solution exists iff ``A B* = B A*`` (condition
    ``"hermitian_compatibility"``) and ``R_A B = O`` (condition ``"range"``).
    Failed conditions are named in the report rather than raised.

    Raises
    ------
    ValueError
        On shape mismatch or when ``U_free`` is not Hermitian.
    """
    n1, n2, n3 = A.shape
    _require(B.shape == A.shape, f"A and B must share a shape, got {A.shape} and {B.shape}")
    if U_free is not None:
        _require(U_free.shape == (n2, n2, n3),
                 f"U_free must be {(n2, n2, n3)}, got {U_free.shape}")
        herm = _norm(U_free - tensor_conj_transpose(U_free))
        _require(herm <= 1e-10 * max(1.0, _norm(U_free)),
                 f"U_free is not Hermitian (||U - U*|| = {herm:.3e})")
    res = decomp.tensor_pinv(A, rtol)
    ap = res.pinv
    apb = ht_product(ap, B)
    bh = tensor_conj_transpose(B)
    abh = ht_product(A, bh)
    x = apb + tensor_conj_transpose(apb) - ht_product(ht_product(ap, abh), tensor_conj_transpose(ap))
    if U_free is not None:
        x = x + ht_product(ht_product(res.left_projector, U_free), res.left_projector)
    conditions = {
        "hermitian_compatibility": _norm(abh - ht_product(B, tensor_conj_transpose(A))),
        "range": _norm(ht_product(res.right_projector, B)),
    }
    limits = {
        # A B* scales with both factors
        "hermitian_compatibility": tol * max(1.0, _norm(A) * _norm(B)),
        "range": _limit(B, tol),
    }
    residual = _norm(ht_product(A, x) - B)
    return _report(x, residual, conditions, limits, False)


def lstsq_axb(A, B, W=None, rtol=None, tol=DEFAULT_TOL):
    """Least-squares solutions ``X = A† B + (I - A† A) W`` of ``A *Ht X = B``.

    With ``W`` omitted the result is the minimal-norm least-squares
    solution ``A† B`` and ``min_norm`` is set.
    """
    n1, n2, n3 = A.shape
    _require(B.n1 == n1 and B.n3 == n3, f"B must be ({n1}, n4, {n3}), got {B.shape}")
    if W is not None:
        _require(W.shape == (n2, B.n2, n3), f"W must be {(n2, B.n2, n3)}, got {W.shape}")
    res = decomp.tensor_pinv(A, rtol)
    x = ht_product(res.pinv, B)
    if W is not None:
        x = x + ht_product(res.left_projector, W)
    witness = _norm(ht_product(res.right_projector, B))
    residual = _norm(ht_product(A, x) - B)
    return _report(x, residual, {"range": witness}, {"range": _limit(B, tol)}, W is None)


def lstsq_xab(A, B, W=None, rtol=None, tol=DEFAULT_TOL):
    """Least-squares solutions ``X = B A† + W (I - A A†)`` of ``X *Ht A = B``.

    Parameters
    ----------
    A : RBTensor
        Shape ``(n1, n2, n3)``.
    B : RBTensor
        Shape ``(n4, n2, n3)``.
    W : RBTensor, optional
        Shape ``(n4, n1, n3)``.
    """
    n1, n2, n3 = A.shape
    _require(B.n2 == n2 and B.n3 == n3, f"B must be (n4, {n2}, {n3}), got {B.shape}")
    if W is not None:
        _require(W.shape == (B.n1, n1, n3), f"W must be {(B.n1, n1, n3)}, got {W.shape}")
    res = decomp.tensor_pinv(A, rtol)
    x = ht_product(B, res.pinv)
    if W is not None:
        x = x + ht_product(W, res.right_projector)
    witness = _norm(ht_product(B, res.left_projector))
    residual = _norm(ht_product(x, A) - B)
    return _report(x, residual, {"range": witness}, {"range": _limit(B, tol)}, W is None)
