"""Dense complex kernels used slice by slice by the RB layers.

Matrices are plain ``numpy`` complex128 arrays; stacks of matrices are
arrays of shape ``(batch, rows, cols)``. The heavy lifting (DFT and the
Jacobi SVD sweeps) is delegated to the active backend in
:mod:`rbtensor._backend`.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from rbtensor import _backend

EPS = np.finfo(np.float64).eps

# prime factors above this go through Bluestein instead of an O(p^2) butterfly
BLUESTEIN_MIN_PRIME = 61


class EmptyInputError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    """Jacobi SVD did not converge within the sweep cap."""

    def __init__(self, sweeps, index=None):
        self.sweeps = int(sweeps)
        self.index = index
        where = "" if index is None else f" (matrix {index} of batch)"
        super().__init__(f"SVD failed to converge after {self.sweeps} sweeps{where}")


class CSvd(NamedTuple):
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def factorize(n):
    """Prime factors of ``n`` in ascending order."""
    factors = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors.append(d)
            n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors


def _dft_rows(x, sign):
    n = x.shape[1]
    if n == 1:
        return x.copy()
    factors = factorize(n)
    if factors[-1] > BLUESTEIN_MIN_PRIME:
        return _bluestein(x, sign)
    return _backend.current().dft(x, tuple(factors), sign)


def _bluestein(x, sign):
    b, n = x.shape
    k = np.arange(n)
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    size = 1 << (2 * n - 2).bit_length()
    a = np.zeros((b, size), dtype=np.complex128)
    a[:, :n] = x * chirp
    kernel = np.zeros(size, dtype=np.complex128)
    kernel[:n] = chirp.conj()
    kernel[size - n + 1:] = chirp.conj()[1:][::-1]
    fa = _dft_rows(a, -1)
    fk = _dft_rows(kernel[None, :], -1)
    conv = _dft_rows(fa * fk, 1) / size
    return conv[:, :n] * chirp


def _dft(v, sign, axis):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim == 0:
        raise ValueError("dft needs at least one axis")
    n = v.shape[axis]
    if n == 0:
        raise EmptyInputError("cannot transform an empty sequence")
    moved = np.moveaxis(v, axis, -1)
    rows = np.ascontiguousarray(moved.reshape(-1, n))
    if rows.shape[0] == 0:
        return np.array(v, copy=True)
    out = _dft_rows(rows, sign).reshape(moved.shape)
    return np.moveaxis(out, -1, axis)


def dft_forward(v, axis=-1):
    """Unnormalised forward DFT, ``X[t] = sum_k v[k] exp(-2 pi i k t / n)``."""
    return _dft(v, -1, axis)


def dft_inverse(v, axis=-1):
    """Inverse of :func:`dft_forward` (scaled by ``1/n``)."""
    v = np.asarray(v)
    n = v.shape[axis] if v.ndim else 0
    return _dft(v, 1, axis) / max(n, 1)


def default_rtol(rows, cols):
    return max(rows, cols) * EPS


def _jacobi_batch(gt, tol, max_sweeps):
    kern = _backend.current()
    count = _backend.workers()
    if count == 1 or gt.shape[0] < 2:
        return kern.jacobi(gt, tol, max_sweeps)
    chunks = np.array_split(np.arange(gt.shape[0]), count)
    chunks = [c for c in chunks if len(c)]
    with ThreadPoolExecutor(max_workers=count) as pool:
        # reversed submission order: results are placed by index, not by finish time
        futures = {i: pool.submit(kern.jacobi, gt[c], tol, max_sweeps)
                   for i, c in reversed(list(enumerate(chunks)))}
        parts = [futures[i].result() for i in range(len(chunks))]
    return tuple(np.concatenate([p[j] for p in parts]) for j in range(4))


def _complete_columns(u, valid):
    """Replace invalid columns of ``u`` so that it becomes unitary."""
    m = u.shape[0]
    q = u[:, valid[:u.shape[1]]]
    fill = []
    eye = np.eye(m, dtype=np.complex128)
    for _ in range(m - q.shape[1]):
        w = eye - q @ (q.conj().T @ eye)
        w = w - q @ (q.conj().T @ w)
        norms = np.linalg.norm(w, axis=0)
        pick = int(np.argmax(norms))
        col = w[:, pick] / norms[pick]
        fill.append(col)
        q = np.column_stack([q, col])
    out = np.empty((m, m), dtype=np.complex128)
    cols = iter(fill)
    for j in range(m):
        if j < u.shape[1] and valid[j]:
            out[:, j] = u[:, j]
        else:
            out[:, j] = next(cols)
    return out


def _fix_phase(U, V, k):
    """Make the first significant entry of every column of U real >= 0."""
    mag = np.abs(U)
    lead = np.argmax(mag > 1e-8 * mag.max(axis=-2, keepdims=True), axis=-2)
    pick = np.take_along_axis(U, lead[..., None, :], axis=-2)[..., 0, :]
    phase = np.where(np.abs(pick) > 0, pick / np.where(np.abs(pick) > 0, np.abs(pick), 1), 1)
    U *= phase.conj()[..., None, :]
    V[..., :, :k] *= phase.conj()[..., None, :k]


def svd_batch(a, max_sweeps=None):
    """Full SVD of every matrix in ``a`` (shape ``(batch, m, n)``).

    Returns ``(U, sigma, V)`` with ``a[i] = U[i] @ diag(sigma[i]) @ V[i]^H``,
    ``sigma`` descending and of length ``min(m, n)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 3:
        raise ValueError("svd_batch expects a (batch, m, n) array")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    b, m, n = a.shape
    wide = m < n
    work = a.conj().transpose(0, 2, 1) if wide else a
    rows, cols = work.shape[1:]  # rows >= cols
    k = cols
    if max_sweeps is None:
        max_sweeps = 100 * max(m, n)
    # rows of gt are the columns of work
    gt = np.ascontiguousarray(work.transpose(0, 2, 1))
    tol = max(rows, 1) * EPS
    gt, vt, sweeps, converged = _jacobi_batch(gt, tol, max_sweeps)
    if not np.all(converged):
        bad = int(np.flatnonzero(~converged)[0])
        raise ConvergenceError(sweeps[bad], bad)
    sigma = np.linalg.norm(gt, axis=2)
    order = np.argsort(-sigma, axis=1, kind="stable")
    sigma = np.take_along_axis(sigma, order, axis=1)
    gt = np.take_along_axis(gt, order[:, :, None], axis=1)
    vt = np.take_along_axis(vt, order[:, :, None], axis=1)
    valid = sigma > np.finfo(np.float64).tiny * 1e6
    safe = np.where(valid, sigma, 1.0)
    u_thin = (gt / safe[:, :, None]).transpose(0, 2, 1)
    sigma = np.where(valid, sigma, 0.0)
    U = np.empty((b, rows, rows), dtype=np.complex128)
    for i in range(b):
        if rows == k and valid[i].all():
            U[i] = u_thin[i]
        else:
            U[i] = _complete_columns(u_thin[i], valid[i])
    V = np.ascontiguousarray(vt.transpose(0, 2, 1))
    if wide:
        U, V = V, U
    _fix_phase(U, V, k)
    return U, sigma, V


def complex_svd(M):
    """Full SVD of one complex matrix as a :class:`CSvd`."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError("complex_svd expects a 2-D matrix")
    U, s, V = svd_batch(M[None])
    return CSvd(U[0], s[0], V[0])


def numeric_rank(sigma, rtol=None, reference=None):
    """Count singular values above ``rtol * reference``.

    ``reference`` defaults to ``max(sigma)``; ``rtol`` defaults to
    ``len(sigma) * eps``.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0:
        return 0
    if rtol is None:
        rtol = sigma.size * EPS
    if reference is None:
        reference = sigma.max()
    if reference <= 0:
        return 0
    return int(np.count_nonzero(sigma > rtol * reference))


def pinv_from_svd(U, sigma, V, cutoff):
    """``V diag(1/sigma) U^H`` over the entries with ``sigma > cutoff`` (batched)."""
    k = sigma.shape[-1]
    keep = sigma > cutoff
    inv = np.where(keep, 1.0 / np.where(keep, sigma, 1.0), 0.0)
    return (V[..., :, :k] * inv[..., None, :]) @ U[..., :, :k].conj().swapaxes(-1, -2)


def complex_pinv(M, rtol=None):
    """Moore-Penrose inverse of a complex matrix via :func:`complex_svd`."""
    M = np.asarray(M, dtype=np.complex128)
    m, n = M.shape
    if rtol is None:
        rtol = default_rtol(m, n)
    if rtol < 0:
        raise ValueError("rtol must be non-negative")
    if M.size == 0:
        return np.zeros((n, m), dtype=np.complex128)
    U, s, V = complex_svd(M)
    smax = s.max() if s.size else 0.0
    if smax == 0:
        return np.zeros((n, m), dtype=np.complex128)
    return pinv_from_svd(U, s, V, rtol * smax)
