"""Matrices over the reduced biquaternions.

An RB matrix ``A = A0 + A1 i + A2 j + A3 k = B1 + j B2`` is stored as the
pair of complex matrices ``part1 = B1 + B2`` and ``part2 = B1 - B2`` (the
``e1``/``e2`` coefficients), so that products, conjugate transposes,
SVDs and pseudo-inverses all act part by part.
"""
from dataclasses import dataclass

import numpy as np

from rbtensor import linalg
from rbtensor.scalar import RBScalar, to_cpair


def _as_cpair(value):
    if isinstance(value, RBScalar):
        return to_cpair(value)
    c = complex(value)
    return c, c


@dataclass(frozen=True, eq=False)
class RBMatrix:
    part1: np.ndarray
    part2: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.part1, dtype=np.complex128)
        p2 = np.asarray(self.part2, dtype=np.complex128)
        if p1.ndim != 2 or p1.shape != p2.shape:
            raise ValueError(f"parts must be equal-shape matrices, got {p1.shape} and {p2.shape}")
        object.__setattr__(self, "part1", p1)
        object.__setattr__(self, "part2", p2)

    @classmethod
    def from_components(cls, q0, q1=None, q2=None, q3=None):
        """Build from the real coefficient matrices of 1, i, j, k."""
        q0 = np.asarray(q0, dtype=np.float64)
        q1, q2, q3 = (np.zeros_like(q0) if q is None else np.asarray(q, dtype=np.float64)
                      for q in (q1, q2, q3))
        return cls.from_complex(q0 + 1j * q1, q2 + 1j * q3)

    @classmethod
    def from_complex(cls, b1, b2=None):
        """Build ``B1 + j B2`` from two complex matrices."""
        b1 = np.asarray(b1, dtype=np.complex128)
        b2 = np.zeros_like(b1) if b2 is None else np.asarray(b2, dtype=np.complex128)
        return cls(b1 + b2, b1 - b2)

    @classmethod
    def identity(cls, n):
        eye = np.eye(n, dtype=np.complex128)
        return cls(eye, eye.copy())

    @classmethod
    def zeros(cls, m, n):
        return cls(np.zeros((m, n), complex), np.zeros((m, n), complex))

    @property
    def shape(self):
        return self.part1.shape

    @property
    def m(self):
        return self.part1.shape[0]

    @property
    def n(self):
        return self.part1.shape[1]

    def complex_parts(self):
        """``(B1, B2)`` with ``A = B1 + j B2``."""
        return (self.part1 + self.part2) / 2, (self.part1 - self.part2) / 2

    def components(self):
        """Real array of shape ``(m, n, 4)`` holding the 1, i, j, k coefficients."""
        b1, b2 = self.complex_parts()
        return np.stack([b1.real, b1.imag, b2.real, b2.imag], axis=-1)

    def entry(self, i, j):
        return RBScalar(*self.components()[i, j])

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other):
        return RBMatrix(self.part1 + other.part1, self.part2 + other.part2)

    def __sub__(self, other):
        return RBMatrix(self.part1 - other.part1, self.part2 - other.part2)

    def __neg__(self):
        return RBMatrix(-self.part1, -self.part2)

    def scale(self, value):
        """Multiply every entry by an RB, complex or real scalar."""
        c1, c2 = _as_cpair(value)
        return RBMatrix(c1 * self.part1, c2 * self.part2)

    @property
    def H(self):
        return conj_transpose(self)

    def norm(self):
        return frobenius_norm(self)

    def allclose(self, other, atol=1e-12):
        return frobenius_norm(self - other) <= atol * max(1.0, frobenius_norm(other))


def mat_mul(a, b):
    if a.n != b.m:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return RBMatrix(a.part1 @ b.part1, a.part2 @ b.part2)


def conj_transpose(a):
    return RBMatrix(a.part1.conj().T, a.part2.conj().T)


def frobenius_norm(a):
    """Square root of the summed squared entry moduli.

    With ``|q|^2 = (|c1|^2 + |c2|^2) / 2`` this is computed directly from the
    two parts.
    """
    total = np.vdot(a.part1, a.part1).real + np.vdot(a.part2, a.part2).real
    return float(np.sqrt(total / 2))


def _part_svds(a):
    U, s, V = linalg.svd_batch(np.stack([a.part1, a.part2]))
    return U, s, V


def _cutoff(sigmas, rtol, shape):
    if rtol is None:
        rtol = linalg.default_rtol(*shape)
    if rtol < 0:
        raise ValueError("rtol must be non-negative")
    top = sigmas.max() if sigmas.size else 0.0
    return rtol * top, top


def rb_svd(a):
    """``A = U S V*`` with ``U``, ``V`` unitary RB matrices and ``S`` diagonal.

    Singular values of the two parts are paired by position (both sorted
    descending), so ``S`` generally has non-real RB diagonal entries.
    """
    U, s, V = _part_svds(a)
    m, n = a.shape
    S = np.zeros((2, m, n), dtype=np.complex128)
    k = s.shape[1]
    idx = np.arange(k)
    S[:, idx, idx] = s
    return RBMatrix(U[0], U[1]), RBMatrix(S[0], S[1]), RBMatrix(V[0], V[1])


def singular_pairs(a):
    """Positional pairs ``(sigma1_i, sigma2_i)`` of the part singular values."""
    _, s, _ = _part_svds(a)
    return s.T.copy()


def rb_pinv(a, rtol=None):
    """Moore-Penrose inverse, part by part.

    Both parts share one cutoff, ``rtol`` times the largest singular value
    over both parts, which keeps :func:`rb_pinv` consistent with
    :func:`rb_rank`.
    """
    m, n = a.shape
    if a.part1.size == 0:
        return RBMatrix.zeros(n, m)
    U, s, V = _part_svds(a)
    cutoff, top = _cutoff(s, rtol, a.shape)
    if top == 0:
        return RBMatrix.zeros(n, m)
    p = linalg.pinv_from_svd(U, s, V, cutoff)
    return RBMatrix(p[0], p[1])


def rb_rank(a, rtol=None):
    """Number of positional singular-value pairs with either part above the cutoff."""
    if a.part1.size == 0:
        return 0
    _, s, _ = _part_svds(a)
    cutoff, top = _cutoff(s, rtol, a.shape)
    if top == 0:
        return 0
    return int(np.count_nonzero(s.max(axis=0) > cutoff))
