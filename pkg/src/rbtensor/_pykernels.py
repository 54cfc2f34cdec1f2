"""Numpy implementations of the batched hot kernels.

This module is the fallback used when the compiled extension
``rbtensor._ckernels`` is missing. Both modules expose the same two
functions with identical semantics:

``dft(x, factors, sign)``
    Mixed-radix Stockham transform of every row of ``x``.
``jacobi(gt, tol, max_sweeps)``
    One-sided Jacobi orthogonalisation of the rows of every matrix in ``gt``.
"""
import numpy as np

NAME = "python"


def dft(x, factors, sign):
    """Unnormalised DFT of each row of ``x`` (shape ``(b, n)``).

    ``factors`` multiply to ``n``; ``sign`` is -1 for the forward
    transform and +1 for the (unscaled) inverse.
    """
    x = np.ascontiguousarray(x, dtype=np.complex128)
    b, n = x.shape
    buf = x.reshape(b, 1, n)
    done, rest = 1, n
    for p in factors:
        rest //= p
        span = done * p
        blocks = buf.reshape(b, done, p, rest)
        j = np.arange(done)[:, None]
        s = np.arange(p)[None, :]
        twiddle = np.exp(sign * 2j * np.pi * ((j * s) % span) / span)
        blocks = blocks * twiddle[None, :, :, None]
        ps = np.arange(p)
        small = np.exp(sign * 2j * np.pi * (np.outer(ps, ps) % p) / p)
        out = np.einsum("vs,bjsk->bvjk", small, blocks)
        buf = out.reshape(b, span, rest)
        done = span
    return buf.reshape(b, n)


def _round_robin(n):
    # circle-method schedule: n - 1 rounds of disjoint pairs covering all pairs
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi(gt, tol, max_sweeps):
    """Orthogonalise the rows of each ``gt[i]`` (shape ``(b, n, m)``).

    Rows play the role of matrix columns. Returns ``(gt, vt, sweeps,
    converged)`` where ``vt[i]`` holds the accumulated unitary transform
    in the same row-as-column layout.
    """
    g = np.array(gt, dtype=np.complex128, copy=True)
    b, n, _ = g.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), (b, n, n)).copy()
    sweeps = np.zeros(b, dtype=np.int64)
    converged = np.ones(b, dtype=bool)
    if n < 2:
        return g, v, sweeps, converged
    rounds = _round_robin(n)
    pending = np.ones(b, dtype=bool)
    for _ in range(max_sweeps):
        rotated = np.zeros(b, dtype=bool)
        for p, q in rounds:
            gp = g[:, p, :]
            gq = g[:, q, :]
            alpha = np.einsum("bkm,bkm->bk", gp.conj(), gp).real
            beta = np.einsum("bkm,bkm->bk", gq.conj(), gq).real
            gamma = np.einsum("bkm,bkm->bk", gp.conj(), gq)
            mag = np.abs(gamma)
            active = (mag > tol * np.sqrt(alpha * beta)) & (mag > 0.0)
            if not active.any():
                continue
            safe = np.where(active, mag, 1.0)
            zeta = (beta - alpha) / (2.0 * safe)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(active, c * t, 0.0)
            phase = np.where(active, gamma / safe, 1.0)
            cc = c[:, :, None]
            sp = (s * phase)[:, :, None]
            sm = (s * phase.conj())[:, :, None]
            g[:, p, :] = cc * gp - sm * gq
            g[:, q, :] = sp * gp + cc * gq
            vp = v[:, p, :]
            vq = v[:, q, :]
            v[:, p, :] = cc * vp - sm * vq
            v[:, q, :] = sp * vp + cc * vq
            rotated |= active.any(axis=1)
        sweeps += pending
        pending &= rotated
        if not pending.any():
            break
    converged = ~pending
    return g, v, sweeps, converged
