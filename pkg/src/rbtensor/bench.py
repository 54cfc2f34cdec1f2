"""Timing of the Ht-SVD against a naive block-circulant route."""
import time

import numpy as np

from rbtensor import _backend, decomp, linalg
from rbtensor.tensor import DftTensor, RBTensor, circ, mode3_idft

DEFAULT_SIZES = ((16, 16, 4), (16, 16, 8), (16, 16, 16), (16, 16, 32))
COLUMNS = ("n1", "n2", "n3", "method", "seconds")


def naive_ht_svd(a):
    """Ht-SVD that block-diagonalises ``circ(A)`` with explicit DFT matrices.

    Costs ``O((n1 n3)(n2 n3) n3 (n1 + n2))`` for the transform alone; kept
    as the baseline the FFT-style route is measured against.
    """
    n1, n2, n3 = a.shape
    idx = np.arange(n3)
    f = np.exp(-2j * np.pi * np.outer(idx, idx) / n3)
    left = np.kron(f, np.eye(n1))
    right = np.kron(f.conj(), np.eye(n2)) / n3
    c = circ(a)
    blocks = []
    for part in (c.part1, c.part2):
        d = left @ part @ right
        blocks.extend(d[k * n1:(k + 1) * n1, k * n2:(k + 1) * n2] for k in range(n3))
    U, s, V = linalg.svd_batch(np.stack(blocks))
    S = np.zeros((2 * n3, n1, n2), dtype=np.complex128)
    k = s.shape[1]
    S[:, np.arange(k), np.arange(k)] = s

    def back(stack):
        return mode3_idft(DftTensor.from_slices(stack.reshape((2, n3) + stack.shape[1:])))

    return decomp.HtSvd(back(U), back(S), back(V), s.reshape(2, n3, k))


def methods():
    """Method name to callable, one ``ht_svd`` entry per available backend."""
    out = {}
    for name in _backend.available():
        def run(a, _name=name):
            with _backend.use(_name):
                return decomp.ht_svd(a)
        out[f"ht_svd_{name}"] = run
    out["naive_circulant"] = naive_ht_svd
    return out


def run_bench(sizes=DEFAULT_SIZES, repeats=3, seed=0, select=None):
    """Time each method on seeded random tensors; one row per run.

    Rows are ``(n1, n2, n3, method, seconds)``, in a deterministic order.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    table = methods()
    names = list(table) if select is None else list(select)
    rows = []
    for shape in sizes:
        a = RBTensor.random(shape, np.random.default_rng([seed, *shape]))
        for name in names:
            fn = table[name]
            for _ in range(repeats):
                t0 = time.perf_counter()
                fn(a)
                rows.append((*shape, name, time.perf_counter() - t0))
    return rows


def loglog_slope(rows, method):
    """Least-squares slope of log(best time) against log(n3) for one method."""
    best = {}
    for n1, n2, n3, name, sec in rows:
        if name == method:
            best[n3] = min(sec, best.get(n3, np.inf))
    if len(best) < 2:
        raise ValueError(f"need at least two n3 values for {method}")
    n3s = np.array(sorted(best), dtype=float)
    secs = np.array([best[n] for n in sorted(best)])
    return float(np.polyfit(np.log(n3s), np.log(secs), 1)[0])
