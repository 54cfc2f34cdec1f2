"""Reduced biquaternion tensors: Ht-product, Ht-SVD, Moore-Penrose inverse and solvers."""
from rbtensor._backend import set_backend, set_workers
from rbtensor.decomp import (HtSvd, PinvResult, ht_svd, pinv, rank_k_approx, tensor_pinv,
                             tubal_rank)
from rbtensor.matrix import RBMatrix, rb_pinv, rb_svd
from rbtensor.scalar import RBScalar
from rbtensor.solvers import SolveReport, lstsq_axb, lstsq_xab, solve_general, solve_hermitian
from rbtensor.tensor import (RBTensor, SingularTensorError, ht_product, ht_product_direct,
                             identity_tensor, tensor_conj_transpose, tensor_inverse)

__version__ = "0.1.0"

__all__ = [
    "HtSvd", "PinvResult", "RBMatrix", "RBScalar", "RBTensor", "SingularTensorError",
    "SolveReport", "ht_product", "ht_product_direct", "ht_svd", "identity_tensor",
    "lstsq_axb", "lstsq_xab", "pinv", "rank_k_approx", "rb_pinv", "rb_svd", "set_backend",
    "set_workers", "solve_general", "solve_hermitian", "tensor_conj_transpose",
    "tensor_inverse", "tensor_pinv", "tubal_rank",
]
