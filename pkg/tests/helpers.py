"""Shared test utilities: finite-difference gradient oracle."""

import numpy as np

from somnus.tensor import Tensor


def numeric_grad(fn, tensors, index, step=1e-3):
    """Central finite differences of scalar fn w.r.t. tensors[index]."""
    target = tensors[index]
    grad = np.zeros_like(target.data)
    flat = target.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        hi = float(fn(*tensors).data)
        flat[i] = orig - step
        lo = float(fn(*tensors).data)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * step)
    return grad


def check_gradients(fn, arrays, rtol=1e-5, atol=1e-7, step=1e-3):
    """Assert analytic gradients of scalar fn match central differences.

    arrays: list of float64 ndarrays; all are treated as requiring grad.
    """
    tensors = [Tensor(a.astype(np.float64), requires_grad=True) for a in arrays]
    loss = fn(*tensors)
    loss.backward()
    for i, t in enumerate(tensors):
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        numeric = numeric_grad(fn, tensors, i, step=step)
        np.testing.assert_allclose(analytic, numeric, rtol=rtol, atol=atol,
                                   err_msg=f"gradient mismatch on input {i}")
