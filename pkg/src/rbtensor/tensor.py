"""Third-order reduced biquaternion tensors and the Ht-product.

A tensor of shape ``(n1, n2, n3)`` is stored, like :class:`RBMatrix`, as
its ``e1``/``e2`` complex parts; ``part1[:, :, k]`` and ``part2[:, :, k]``
form frontal slice ``k``. The Ht-product multiplies the block circulant
matrix of the left factor into the stacked slices of the right one;
after a DFT along mode 3 it becomes one matrix product per slice, which
is how :func:`ht_product` computes it. :func:`ht_product_direct` keeps
the block circulant route as a reference.
"""
import contextlib
from dataclasses import dataclass

import numpy as np

from rbtensor import linalg
from rbtensor.matrix import RBMatrix, _as_cpair

# flipped only by the mutation check in the verify suite
_FLIP_FORWARD_SIGN = False


class SingularTensorError(ArithmeticError):
    def __init__(self, index, part, rank, size):
        self.index = index
        self.part = part
        self.rank = rank
        self.deficiency = size - rank
        super().__init__(
            f"tensor is not invertible: DFT slice {index} (part e{part}) has rank "
            f"{rank} of {size} (deficiency {size - rank})")


@contextlib.contextmanager
def flipped_dft_sign():
    """Deliberately break the forward mode-3 DFT (for mutation testing)."""
    global _FLIP_FORWARD_SIGN
    saved = _FLIP_FORWARD_SIGN
    _FLIP_FORWARD_SIGN = True
    try:
        yield
    finally:
        _FLIP_FORWARD_SIGN = saved


def _check3(arr, name):
    arr = np.asarray(arr, dtype=np.complex128)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be a third-order array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class RBTensor:
    part1: np.ndarray
    part2: np.ndarray

    def __post_init__(self):
        p1 = _check3(self.part1, "part1")
        p2 = _check3(self.part2, "part2")
        if p1.shape != p2.shape:
            raise ValueError(f"part shapes differ: {p1.shape} vs {p2.shape}")
        object.__setattr__(self, "part1", p1)
        object.__setattr__(self, "part2", p2)

    @classmethod
    def from_complex(cls, b1, b2=None):
        b1 = _check3(b1, "b1")
        b2 = np.zeros_like(b1) if b2 is None else _check3(b2, "b2")
        return cls(b1 + b2, b1 - b2)

    @classmethod
    def from_components(cls, comps):
        """From a real array of shape ``(n1, n2, n3, 4)`` (1, i, j, k coefficients)."""
        comps = np.asarray(comps, dtype=np.float64)
        if comps.ndim != 4 or comps.shape[-1] != 4:
            raise ValueError(f"expected shape (n1, n2, n3, 4), got {comps.shape}")
        b1 = comps[..., 0] + 1j * comps[..., 1]
        b2 = comps[..., 2] + 1j * comps[..., 3]
        return cls.from_complex(b1, b2)

    @classmethod
    def zeros(cls, n1, n2, n3):
        z = np.zeros((n1, n2, n3), dtype=np.complex128)
        return cls(z, z.copy())

    @classmethod
    def random(cls, shape, rng=None):
        """All four components standard normal."""
        rng = np.random.default_rng(rng)
        return cls.from_components(rng.standard_normal(tuple(shape) + (4,)))

    @classmethod
    def from_slices(cls, slices):
        """From a ``(2, n3, n1, n2)`` stack of part slices."""
        s = np.moveaxis(np.asarray(slices), 1, -1)
        return cls(s[0], s[1])

    @property
    def shape(self):
        return self.part1.shape

    @property
    def n1(self):
        return self.part1.shape[0]

    @property
    def n2(self):
        return self.part1.shape[1]

    @property
    def n3(self):
        return self.part1.shape[2]

    def slice(self, k):
        """Frontal slice ``k`` (0-based) as an :class:`RBMatrix`."""
        return RBMatrix(self.part1[:, :, k], self.part2[:, :, k])

    def slices(self):
        """``(2, n3, n1, n2)`` stack of the part slices."""
        return np.moveaxis(np.stack([self.part1, self.part2]), -1, 1)

    def complex_parts(self):
        """``(T_1i, T_jk)`` with ``T = T_1i + j T_jk``."""
        return (self.part1 + self.part2) / 2, (self.part1 - self.part2) / 2

    def components(self):
        b1, b2 = self.complex_parts()
        return np.stack([b1.real, b1.imag, b2.real, b2.imag], axis=-1)

    def __add__(self, other):
        _same_shape(self, other)
        return RBTensor(self.part1 + other.part1, self.part2 + other.part2)

    def __sub__(self, other):
        _same_shape(self, other)
        return RBTensor(self.part1 - other.part1, self.part2 - other.part2)

    def __neg__(self):
        return RBTensor(-self.part1, -self.part2)

    def scale(self, value):
        c1, c2 = _as_cpair(value)
        return RBTensor(c1 * self.part1, c2 * self.part2)

    def __matmul__(self, other):
        return ht_product(self, other)

    @property
    def H(self):
        return tensor_conj_transpose(self)

    def norm(self):
        return tensor_frobenius_norm(self)

    def dft(self):
        return mode3_dft(self)

    def allclose(self, other, rtol=1e-12):
        return tensor_frobenius_norm(self - other) <= rtol * max(1.0, tensor_frobenius_norm(other))


@dataclass(frozen=True, eq=False)
class DftTensor:
    """A tensor in the mode-3 transformed domain."""

    part1: np.ndarray
    part2: np.ndarray

    @classmethod
    def from_slices(cls, slices):
        s = np.moveaxis(np.asarray(slices), 1, -1)
        return cls(s[0], s[1])

    @property
    def shape(self):
        return self.part1.shape

    def slice(self, k):
        return RBMatrix(self.part1[:, :, k], self.part2[:, :, k])

    def slices(self):
        return np.moveaxis(np.stack([self.part1, self.part2]), -1, 1)

    def block_diag(self):
        """The block-diagonal RB matrix of the transformed slices."""
        n1, n2, n3 = self.shape
        out = np.zeros((2, n1 * n3, n2 * n3), dtype=np.complex128)
        s = self.slices()
        for k in range(n3):
            out[:, k * n1:(k + 1) * n1, k * n2:(k + 1) * n2] = s[:, k]
        return RBMatrix(out[0], out[1])

    def idft(self):
        return mode3_idft(self)


def _same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")


def vec(t):
    """Stack the frontal slices vertically into an ``(n1*n3) x n2`` RB matrix."""
    n1, n2, n3 = t.shape
    s = t.slices().reshape(2, n3 * n1, n2)
    return RBMatrix(s[0], s[1])


def fold(m, n1, n3):
    """Inverse of :func:`vec`."""
    if m.m != n1 * n3:
        raise ValueError(f"cannot fold {m.shape} into {n1} rows x {n3} slices")
    s = np.stack([m.part1, m.part2]).reshape(2, n3, n1, m.n)
    return RBTensor.from_slices(s)


def circ(t):
    """Block circulant matrix; block ``(r, c)`` is slice ``(r - c) mod n3``."""
    n1, n2, n3 = t.shape
    s = t.slices()
    out = np.empty((2, n1 * n3, n2 * n3), dtype=np.complex128)
    for r in range(n3):
        for c in range(n3):
            out[:, r * n1:(r + 1) * n1, c * n2:(c + 1) * n2] = s[:, (r - c) % n3]
    return RBMatrix(out[0], out[1])


def mode3_dft(t):
    """Unnormalised DFT along every tube ``t[s, u, :]`` of both parts."""
    stacked = np.stack([t.part1, t.part2])
    if _FLIP_FORWARD_SIGN:
        hat = linalg.dft_forward(stacked.conj()).conj()
    else:
        hat = linalg.dft_forward(stacked)
    return DftTensor(hat[0], hat[1])


def mode3_idft(d):
    out = linalg.dft_inverse(np.stack([d.part1, d.part2]))
    return RBTensor(out[0], out[1])


def _check_product(a, b):
    if a.n2 != b.n1 or a.n3 != b.n3:
        raise ValueError(f"Ht-product needs (n1, n2, n3) x (n2, n4, n3); got {a.shape} x {b.shape}")


def ht_product_direct(a, b):
    """Ht-product through the explicit block circulant matrix (reference route)."""
    _check_product(a, b)
    return fold(circ(a) @ vec(b), a.n1, a.n3)


def ht_product(a, b):
    """Ht-product computed slice by slice in the DFT domain."""
    _check_product(a, b)
    ah = mode3_dft(a).slices()
    bh = mode3_dft(b).slices()
    return mode3_idft(DftTensor.from_slices(ah @ bh))


def tensor_conj_transpose(a):
    """Conjugate-transpose every slice, then reverse the order of slices 2..n3."""
    n3 = a.n3
    order = (-np.arange(n3)) % n3
    p1 = a.part1.conj().transpose(1, 0, 2)[:, :, order]
    p2 = a.part2.conj().transpose(1, 0, 2)[:, :, order]
    return RBTensor(p1, p2)


def identity_tensor(n, n3):
    if n < 1 or n3 < 1:
        raise ValueError("identity tensor needs n >= 1 and n3 >= 1")
    t = np.zeros((n, n, n3), dtype=np.complex128)
    t[:, :, 0] = np.eye(n)
    return RBTensor(t, t.copy())


def tensor_frobenius_norm(a):
    total = np.vdot(a.part1, a.part1).real + np.vdot(a.part2, a.part2).real
    return float(np.sqrt(total / 2))


def tensor_inverse(a, rtol=None):
    """Ht-inverse, raising :class:`SingularTensorError` for singular DFT slices."""
    n1, n2, n3 = a.shape
    if n1 != n2:
        raise ValueError(f"only tensors with square slices are invertible, got {a.shape}")
    s = mode3_dft(a).slices().reshape(2 * n3, n1, n1)
    U, sig, V = linalg.svd_batch(s)
    if rtol is None:
        rtol = linalg.default_rtol(n1 * n3, n1 * n3)
    top = sig.max()
    cutoff = rtol * top
    ranks = np.count_nonzero(sig > cutoff, axis=1).reshape(2, n3)
    if top == 0 or (ranks < n1).any():
        bad = [(k, p) for k in range(n3) for p in range(2) if ranks[p, k] < n1][0]
        k, p = bad
        raise SingularTensorError(k, p + 1, int(ranks[p, k]), n1)
    inv = linalg.pinv_from_svd(U, sig, V, cutoff).reshape(2, n3, n1, n1)
    return mode3_idft(DftTensor.from_slices(inv))


def _tol(a, tol):
    return (1e-10 if tol is None else tol) * max(1.0, tensor_frobenius_norm(a))


def _square(a, what):
    if a.n1 != a.n2:
        raise ValueError(f"{what} needs square frontal slices, got {a.shape}")


def is_f_diagonal(a, tol=None):
    mask = ~np.eye(a.n1, a.n2, dtype=bool)
    off = RBTensor(a.part1 * mask[:, :, None], a.part2 * mask[:, :, None])
    return tensor_frobenius_norm(off) <= _tol(a, tol)


def is_unitary(a, tol=None):
    _square(a, "is_unitary")
    eye = identity_tensor(a.n1, a.n3)
    ah = tensor_conj_transpose(a)
    limit = _tol(a, tol)
    return (tensor_frobenius_norm(ht_product(ah, a) - eye) <= limit
            and tensor_frobenius_norm(ht_product(a, ah) - eye) <= limit)


def is_hermitian(a, tol=None):
    _square(a, "is_hermitian")
    return tensor_frobenius_norm(a - tensor_conj_transpose(a)) <= _tol(a, tol)


def is_idempotent(a, tol=None):
    _square(a, "is_idempotent")
    return tensor_frobenius_norm(ht_product(a, a) - a) <= _tol(a, tol)
