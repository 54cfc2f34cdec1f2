"""Ht-SVD, tubal rank, rank-k truncation and the Moore-Penrose inverse.

All routines work in the mode-3 DFT domain: each of the ``2 * n3``
complex slices (two parts times ``n3`` frequencies) is handled
independently, then transformed back.

Singular values are thresholded relative to the largest singular value
over *all* DFT slices and both parts, i.e. relative to the norm of the
block-diagonal transformed matrix, so a slice that is zero up to
round-off is treated as zero rather than inverted.
"""
from typing import NamedTuple

import numpy as np

from rbtensor import linalg
from rbtensor.tensor import (DftTensor, RBTensor, ht_product, identity_tensor, mode3_dft,
                             mode3_idft, tensor_conj_transpose)


class HtSvd(NamedTuple):
    U: RBTensor
    S: RBTensor
    V: RBTensor
    sigma: np.ndarray  # (2, n3, min(n1, n2)) singular values of the DFT slices


class PinvResult(NamedTuple):
    pinv: RBTensor
    left_projector: RBTensor
    right_projector: RBTensor


def default_rtol(shape):
    n1, n2, n3 = shape
    return linalg.default_rtol(n1 * n3, n2 * n3)


def _slice_svds(a):
    n1, n2, n3 = a.shape
    stack = mode3_dft(a).slices().reshape(2 * n3, n1, n2)
    try:
        U, s, V = linalg.svd_batch(stack)
    except linalg.ConvergenceError as err:
        part, k = divmod(err.index, n3)
        raise linalg.ConvergenceError(err.sweeps, f"DFT slice {k}, part e{part + 1}") from err
    return U, s, V


def _cutoff(sigma, shape, rtol):
    if rtol is None:
        rtol = default_rtol(shape)
    if rtol < 0:
        raise ValueError("rtol must be non-negative")
    top = float(sigma.max()) if sigma.size else 0.0
    return rtol * top, top


def _to_tensor(stack, n3):
    return mode3_idft(DftTensor.from_slices(stack.reshape((2, n3) + stack.shape[1:])))


def ht_svd(a):
    """Ht-SVD ``A = U *Ht S *Ht V*`` with U, V unitary and S f-diagonal."""
    n1, n2, n3 = a.shape
    U, s, V = _slice_svds(a)
    k = s.shape[1]
    S = np.zeros((2 * n3, n1, n2), dtype=np.complex128)
    idx = np.arange(k)
    S[:, idx, idx] = s
    return HtSvd(_to_tensor(U, n3), _to_tensor(S, n3), _to_tensor(V, n3),
                 s.reshape(2, n3, k))


def tubal_rank(a, rtol=None):
    """Largest numeric rank over the DFT slices of both parts."""
    _, s, _ = _slice_svds(a)
    cutoff, top = _cutoff(s, a.shape, rtol)
    if top == 0:
        return 0
    return int(np.count_nonzero(s > cutoff, axis=1).max())


def _check_k(a, k):
    w = min(a.n1, a.n2)
    if not 1 <= k <= w:
        raise ValueError(f"k must lie in [1, {w}], got {k}")


def rank_k_approx(a, k):
    """Keep the leading ``k`` singular triplets of every DFT slice."""
    _check_k(a, k)
    U, s, V = _slice_svds(a)
    approx = (U[:, :, :k] * s[:, None, :k]) @ V[:, :, :k].conj().swapaxes(1, 2)
    return _to_tensor(approx, a.n3)


def rank_k_approx_with_residual(a, k):
    """Like :func:`rank_k_approx`, also returning the discarded singular values."""
    _check_k(a, k)
    U, s, V = _slice_svds(a)
    approx = (U[:, :, :k] * s[:, None, :k]) @ V[:, :, :k].conj().swapaxes(1, 2)
    return _to_tensor(approx, a.n3), s[:, k:].reshape(2, a.n3, -1)


def tensor_pinv(a, rtol=None):
    """Moore-Penrose inverse from per-slice complex pseudo-inverses, plus projectors."""
    n1, n2, n3 = a.shape
    U, s, V = _slice_svds(a)
    cutoff, top = _cutoff(s, a.shape, rtol)
    if top == 0:
        pinv = RBTensor.zeros(n2, n1, n3)
    else:
        pinv = _to_tensor(linalg.pinv_from_svd(U, s, V, cutoff), n3)
    left = identity_tensor(n2, n3) - ht_product(pinv, a)
    right = identity_tensor(n1, n3) - ht_product(a, pinv)
    return PinvResult(pinv, left, right)


def pinv(a, rtol=None):
    return tensor_pinv(a, rtol).pinv


def pinv_via_svd(a, rtol=None):
    """``V *Ht S^+ *Ht U*`` assembled from :func:`ht_svd` (cross-check route)."""
    n1, n2, n3 = a.shape
    dec = ht_svd(a)
    s_hat = mode3_dft(dec.S).slices().reshape(2 * n3, n1, n2)
    cutoff, top = _cutoff(dec.sigma, a.shape, rtol)
    s_pinv = np.zeros((2 * n3, n2, n1), dtype=np.complex128)
    if top > 0:
        d = np.diagonal(s_hat, axis1=1, axis2=2).real
        keep = d > cutoff
        idx = np.arange(d.shape[1])
        s_pinv[:, idx, idx] = np.where(keep, 1.0 / np.where(keep, d, 1.0), 0.0)
    s_dag = _to_tensor(s_pinv, n3)
    return ht_product(ht_product(dec.V, s_dag), tensor_conj_transpose(dec.U))
