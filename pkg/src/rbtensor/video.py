"""Colour video as RB tensors: encoding, metrics, blur synthesis, compression, deblurring.

A video of ``t`` RGB frames of size ``h x w`` becomes an ``h x w x t``
tensor with the red, green and blue channels on the ``i``, ``j`` and ``k``
units and a zero real part. Pixel values stay on the 0..255 scale.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from rbtensor import decomp, linalg
from rbtensor.tensor import (DftTensor, RBTensor, SingularTensorError, ht_product, mode3_dft,
                             mode3_idft, tensor_frobenius_norm, tensor_inverse)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """``frames`` is a ``(t, h, w, 3)`` uint8 array."""

    frames: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frames)
        if f.ndim != 4 or f.shape[-1] != 3:
            raise ValueError(f"frames must have shape (t, h, w, 3), got {f.shape}")
        if f.shape[0] == 0:
            raise ValueError("a frame sequence needs at least one frame")
        if f.dtype != np.uint8:
            raise ValueError(f"frames must be uint8, got {f.dtype}")
        object.__setattr__(self, "frames", f)

    @property
    def count(self):
        return self.frames.shape[0]

    @property
    def height(self):
        return self.frames.shape[1]

    @property
    def width(self):
        return self.frames.shape[2]

    def __len__(self):
        return self.count

    def __eq__(self, other):
        return isinstance(other, FrameSequence) and np.array_equal(self.frames, other.frames)


def encode(frames):
    """RGB frames to a pure-imaginary ``h x w x t`` tensor (R on i, G on j, B on k)."""
    if not isinstance(frames, FrameSequence):
        frames = FrameSequence(np.asarray(frames))
    rgb = frames.frames.astype(np.float64).transpose(1, 2, 0, 3)  # (h, w, t, 3)
    comps = np.zeros(rgb.shape[:3] + (4,))
    comps[..., 1:] = rgb
    return RBTensor.from_components(comps)


def channels(t):
    """The ``(t, h, w, 3)`` float RGB view of a video tensor."""
    return t.components()[..., 1:].transpose(2, 0, 1, 3)


def decode_counted(t):
    """Decode and also return how many channel values had to be clamped."""
    rgb = np.rint(channels(t))  # half-to-even
    clamped = int(np.count_nonzero((rgb < 0) | (rgb > 255)))
    return FrameSequence(np.clip(rgb, 0, 255).astype(np.uint8)), clamped


def decode(t):
    """Round (half-to-even) and clamp a video tensor back to 8-bit frames."""
    frames, clamped = decode_counted(t)
    if clamped:
        log.warning("decode clamped %d channel values to [0, 255]", clamped)
    return frames


def _psnr(ref, test):
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {test.shape}")
    err = float(np.sum((ref - test) ** 2))
    if err == 0:
        return math.inf
    peak = float(np.max(np.abs(ref)))
    if peak == 0:
        return -math.inf
    h, w = ref.shape[:2]
    return 10 * math.log10(3 * h * w * peak ** 2 / err)


def _frame_arrays(x):
    if isinstance(x, FrameSequence):
        return x.frames
    if isinstance(x, RBTensor):
        return channels(x)
    return np.asarray(x)


def psnr(reference, test, frame_index=0):
    """PSNR in dB of one frame, ``10 log10(3 h w max|C|^2 / ||C - C~||_F^2)``.

    ``reference`` and ``test`` may be frame sequences, video tensors or
    ``(t, h, w, 3)`` arrays. Identical frames give ``inf``.
    """
    ref = _frame_arrays(reference)
    tst = _frame_arrays(test)
    if ref.shape != tst.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {tst.shape}")
    if not -ref.shape[0] <= frame_index < ref.shape[0]:
        raise IndexError(f"frame index {frame_index} out of range for {ref.shape[0]} frames")
    return _psnr(ref[frame_index], tst[frame_index])


def psnr_frames(reference, test):
    ref = _frame_arrays(reference)
    tst = _frame_arrays(test)
    if ref.shape != tst.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {tst.shape}")
    return [_psnr(r, s) for r, s in zip(ref, tst)]


def relative_error(a, approx):
    """``||A - A~||_F / ||A||_F``."""
    if a.shape != approx.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {approx.shape}")
    ref = tensor_frobenius_norm(a)
    if ref == 0:
        raise ValueError("relative error is undefined for a zero reference tensor")
    return tensor_frobenius_norm(a - approx) / ref


def _circulant(weights):
    n = len(weights)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return weights[idx]


def blur_kernel(n, kind="gaussian", sigma=1.0, support=None, length=3):
    """First row of an ``n x n`` circulant blur with unit row sums."""
    w = np.zeros(n)
    if kind == "gaussian":
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        if sigma == 0:
            w[0] = 1.0
            return w
        if support is None:
            support = int(math.ceil(3 * sigma))
        support = min(int(support), (n - 1) // 2)
        d = np.arange(-support, support + 1)
        np.add.at(w, d % n, np.exp(-d.astype(float) ** 2 / (2 * sigma ** 2)))
    elif kind == "motion":
        if not 1 <= length <= n:
            raise ValueError(f"motion length must lie in [1, {n}], got {length}")
        w[:length] = 1.0
    else:
        raise ValueError(f"unknown blur kind {kind!r}")
    return w / w.sum()


def synth_blur(n, n3, kind="gaussian", sigma=1.0, support=None, length=3, coupling=0.0):
    """Real ``n x n x n3`` blur tensor with a circulant first slice.

    Slice 1 is the circulant blur ``C``; with ``coupling`` c the second and
    last slices are ``c * C`` (a symmetric temporal spread). The result is
    checked to be invertible.

    Raises
    ------
    ValueError
        If the parameters give a singular blur tensor.
    """
    if n < 1 or n3 < 1:
        raise ValueError("blur tensor needs n >= 1 and n3 >= 1")
    c = _circulant(blur_kernel(n, kind, sigma, support, length))
    g = np.zeros((n, n, n3))
    g[:, :, 0] = c
    if coupling and n3 > 1:
        g[:, :, 1] += coupling * c
        g[:, :, -1] += coupling * c
    comps = np.zeros(g.shape + (4,))
    comps[..., 0] = g
    blur = RBTensor.from_components(comps)
    try:
        tensor_inverse(blur)
    except SingularTensorError as err:
        hint = "use a smaller sigma or support" if kind == "gaussian" else "change the motion length"
        raise ValueError(f"blur tensor is singular ({err}); {hint}, "
                         "or keep |coupling| < 0.5") from err
    return blur


def compress(t, k):
    """Rank-``k`` approximation of a video tensor with per-frame PSNR of the decoded result."""
    if not 1 <= k <= min(t.n1, t.n2):
        raise ValueError(f"k must lie in [1, {min(t.n1, t.n2)}], got {k}")
    approx = decomp.rank_k_approx(t, k)
    return approx, psnr_frames(decode(t), decode(approx))


def learn_deblur_filter(clean, blurred, rtol=None):
    """Filter ``F = A *Ht B†`` mapping blurred frames back to clean ones.

    ``B†`` is formed slice by slice in the DFT domain from the SVDs of the
    transformed blurred tensor; the cutoff is ``rtol`` times the largest
    singular value over all slices.
    """
    if clean.shape != blurred.shape:
        raise ValueError(f"shape mismatch: {clean.shape} vs {blurred.shape}")
    n1, n2, n3 = blurred.shape
    a_hat = mode3_dft(clean).slices()
    b_hat = mode3_dft(blurred).slices().reshape(2 * n3, n1, n2)
    U, s, V = linalg.svd_batch(b_hat)
    if rtol is None:
        rtol = decomp.default_rtol(blurred.shape)
    top = float(s.max())
    if top == 0:
        return RBTensor.zeros(n1, n1, n3)
    b_pinv = linalg.pinv_from_svd(U, s, V, rtol * top).reshape(2, n3, n2, n1)
    return mode3_idft(DftTensor.from_slices(a_hat @ b_pinv))


def apply_filter(f, blurred):
    return ht_product(f, blurred)


def synthetic_video(height=16, width=16, frames=4, rank=3, noise=0, seed=0):
    """Integer-valued test video whose channels share a tubal-rank-``rank`` factor.

    Each channel is ``P *t Q_c`` for one nonnegative small-integer ``P`` of
    shape ``(height, rank, frames)``, so the encoded tensor has tubal rank
    at most ``rank``. ``noise`` adds uniform integer noise in
    ``[-noise, noise]`` before clipping.
    """
    rng = np.random.default_rng(seed)
    hi = max(1, int(math.isqrt(255 // (rank * frames))))
    p = rng.integers(0, hi + 1, size=(height, rank, frames))
    # real t-product by direct circular convolution along mode 3
    out = np.zeros((height, width, frames, 3))
    for c in range(3):
        q = rng.integers(0, hi + 1, size=(rank, width, frames))
        for t in range(frames):
            for s in range(frames):
                out[:, :, t, c] += p[:, :, (t - s) % frames] @ q[:, :, s]
    if noise:
        out += rng.integers(-noise, noise + 1, size=out.shape)
    return FrameSequence(np.clip(out, 0, 255).astype(np.uint8).transpose(2, 0, 1, 3))
