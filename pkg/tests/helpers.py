"""Shared test oracles: loop-level reference implementations and finite differences."""

import numpy as np

from gdposr import numcore as nc


def conv2d_reference(x, w, b=None):
    """Per-element convolution oracle: plain loops, zero padding, stride 1."""
    cout, cin, kh, kw = w.shape
    _, height, width = x.shape
    out = np.zeros((cout, height, width))
    for co in range(cout):
        for i in range(height):
            for j in range(width):
                acc = 0.0
                for ci in range(cin):
                    for di in range(kh):
                        for dj in range(kw):
                            ii = i + di - kh // 2
                            jj = j + dj - kw // 2
                            if 0 <= ii < height and 0 <= jj < width:
                                acc += x[ci, ii, jj] * w[co, ci, di, dj]
                out[co, i, j] = acc + (0.0 if b is None else b[co])
    return out


def finite_difference(scalar_fn, arrays, step=1e-4):
    """Central-difference gradients of scalar_fn(list of arrays) -> float."""
    grads = []
    for k, base in enumerate(arrays):
        g = np.zeros_like(base)
        flat = base.reshape(-1)
        gflat = g.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + step
            hi = scalar_fn(arrays)
            flat[idx] = orig - step
            lo = scalar_fn(arrays)
            flat[idx] = orig
            gflat[idx] = (hi - lo) / (2.0 * step)
        grads.append(g)
    return grads


def max_rel_err(analytic, numeric, floor=1e-6):
    """Worst relative disagreement, guarded against near-zero denominators."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def fd_check_params(loss_fn, params, step=1e-4, floor=1e-6):
    """Compare tape gradients of loss_fn() against central differences.

    loss_fn must close over ``params`` (mapping name -> Tensor) and return the
    scalar loss Tensor when called with no arguments.
    """
    with nc.Tape() as tape:
        loss = loss_fn()
    analytic = nc.backward(tape, loss, params)

    names = list(params)

    def eval_at(arrays):
        for name, arr in zip(names, arrays):
            params[name].data = arr
        return loss_fn().item()

    arrays = [params[name].data.copy() for name in names]
    numeric = finite_difference(lambda arrs: eval_at(arrs), arrays, step=step)
    # restore originals
    for name, arr in zip(names, arrays):
        params[name].data = arr
    return max_rel_err([analytic[n] for n in names], numeric, floor=floor)
