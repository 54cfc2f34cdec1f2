"""Single reduced biquaternions ``q = q0 + q1 i + q2 j + q3 k``.

Multiplication table: ``i^2 = -1``, ``j^2 = 1``, ``ij = ji = k``. The algebra
is commutative and splits over the idempotents ``e1 = (1 + j)/2`` and
``e2 = (1 - j)/2`` into two independent complex numbers::

    q = (qa + qb) e1 + (qa - qb) e2,   qa = q0 + q1 i,  qb = q2 + q3 i
"""
import math
from dataclasses import dataclass
from typing import NamedTuple


class CPair(NamedTuple):
    """Coefficients of ``e1`` and ``e2``."""

    c1: complex
    c2: complex

    def __mul__(self, other):
        return CPair(self.c1 * other.c1, self.c2 * other.c2)


@dataclass(frozen=True)
class RBScalar:
    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    def __post_init__(self):
        for name in ("q0", "q1", "q2", "q3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def __add__(self, other):
        other = _coerce(other)
        return RBScalar(self.q0 + other.q0, self.q1 + other.q1,
                        self.q2 + other.q2, self.q3 + other.q3)

    __radd__ = __add__

    def __neg__(self):
        return RBScalar(-self.q0, -self.q1, -self.q2, -self.q3)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return rb_mul(self, _coerce(other))

    __rmul__ = __mul__

    def conj(self):
        return rb_conj(self)

    def __abs__(self):
        return rb_modulus(self)

    def to_cpair(self):
        return to_cpair(self)

    def as_tuple(self):
        return (self.q0, self.q1, self.q2, self.q3)

    def isclose(self, other, tol=1e-14):
        other = _coerce(other)
        return abs(self - other) <= tol * max(1.0, abs(self), abs(other))


def _coerce(value):
    if isinstance(value, RBScalar):
        return value
    if isinstance(value, complex):
        return RBScalar(value.real, value.imag)
    if isinstance(value, (int, float)):
        return RBScalar(value)
    raise TypeError(f"cannot use {type(value).__name__} as a reduced biquaternion")


ONE = RBScalar(1.0)
I = RBScalar(0.0, 1.0)
J = RBScalar(0.0, 0.0, 1.0)
K = RBScalar(0.0, 0.0, 0.0, 1.0)
E1 = RBScalar(0.5, 0.0, 0.5)
E2 = RBScalar(0.5, 0.0, -0.5)


def rb_mul(a, b):
    """Product from the 1/i/j/k multiplication table."""
    return RBScalar(
        a.q0 * b.q0 - a.q1 * b.q1 + a.q2 * b.q2 - a.q3 * b.q3,
        a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 + a.q3 * b.q2,
        a.q0 * b.q2 + a.q2 * b.q0 - a.q1 * b.q3 - a.q3 * b.q1,
        a.q0 * b.q3 + a.q3 * b.q0 + a.q1 * b.q2 + a.q2 * b.q1,
    )


def rb_conj(a):
    return RBScalar(a.q0, -a.q1, a.q2, -a.q3)


def rb_modulus(a):
    return math.hypot(a.q0, a.q1, a.q2, a.q3)


def to_cpair(a):
    qa = complex(a.q0, a.q1)
    qb = complex(a.q2, a.q3)
    return CPair(qa + qb, qa - qb)


def from_cpair(p):
    qa = (p.c1 + p.c2) / 2
    qb = (p.c1 - p.c2) / 2
    return RBScalar(qa.real, qa.imag, qb.real, qb.imag)
