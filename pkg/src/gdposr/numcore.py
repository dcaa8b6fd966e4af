"""Dense-tensor arithmetic with reverse-mode differentiation and AdamW.

Everything runs in double precision on numpy arrays. The primitive set is
deliberately small -- 2D convolution (stride 1, zero padding), elementwise
add/mul, leaky rectifier, mean/sum reductions, squared error, sigmoid and
log -- and every trainable objective in this repository is composed from it.
Recording happens on an explicit Tape: ops executed while a Tape is active
append nodes in execution order, which is already a topological order, so
the backward sweep is a single reverse pass over the node list.

A Tape is confined to one logical thread; independent tapes may run
concurrently. Parameters must not be mutated between the forward pass and
``backward`` of the same step (the optimizer rebinds ``.data`` instead of
writing in place for exactly this reason).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ShapeError(ValueError):
    """Operand shapes do not conform; the message names the offending primitive."""


class GradientError(RuntimeError):
    """Backward failed: unreachable loss, non-scalar loss, or non-finite gradient."""


_STATE = threading.local()


def _active_tape():
    return getattr(_STATE, "tape", None)


class Node:
    """One recorded primitive: parent links plus a closure for its vjp."""

    __slots__ = ("op", "parents", "backward_fn", "grad", "tape")

    def __init__(self, op, parents, backward_fn, tape):
        self.op = op
        self.parents = parents
        self.backward_fn = backward_fn
        self.grad = None
        self.tape = tape


class Tape:
    """Execution-ordered record of primitives, used once for one backward sweep."""

    def __init__(self):
        self.nodes = []
        self._leaves = {}  # id(tensor) -> leaf Node

    def __enter__(self):
        if _active_tape() is not None:
            raise RuntimeError("tapes do not nest; finish the active tape first")
        _STATE.tape = self
        return self

    def __exit__(self, exc_type, exc, tb):
        _STATE.tape = None
        return False

    def _leaf(self, tensor):
        node = self._leaves.get(id(tensor))
        if node is None:
            node = Node("leaf", (), None, self)
            self._leaves[id(tensor)] = node
            self.nodes.append(node)
        return node

    def grad(self, tensor):
        """Gradient accumulated for a leaf tensor, or None if it never joined."""
        node = self._leaves.get(id(tensor))
        return None if node is None else node.grad


class Tensor:
    """A numpy float64 array plus an optional handle into the recording tape."""

    __slots__ = ("data", "requires_grad", "name", "node")

    def __init__(self, data, requires_grad=False, name=None):
        # finiteness is enforced at entry points (parameter creation, image
        # loading) and by the training loops' divergence checks, not on every
        # intermediate -- a per-op isfinite scan would dominate small convs
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self.node = None

    @property
    def shape(self):
        return self.data.shape

    def item(self):
        return float(self.data)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(other, -1.0) if isinstance(other, Tensor) else -other)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def constant(data):
    return data if isinstance(data, Tensor) else Tensor(data)


def parameter(data, name):
    arr = np.array(data, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"parameter '{name}' contains non-finite values")
    return Tensor(arr, requires_grad=True, name=name)


def _node_for(tensor, tape):
    """Node of a tensor on this tape: existing, fresh leaf (params), or None."""
    if tensor.node is not None and tensor.node.tape is tape:
        return tensor.node
    if tensor.requires_grad:
        return tape._leaf(tensor)
    return None


def _record(op, out_data, inputs, backward_fn):
    out = Tensor(out_data)
    tape = _active_tape()
    if tape is None:
        return out
    parents = tuple(_node_for(t, tape) for t in inputs)
    if all(p is None for p in parents):
        return out
    node = Node(op, parents, backward_fn, tape)
    tape.nodes.append(node)
    out.node = node
    return out


# ---------------------------------------------------------------------------
# primitives


def add(a, b):
    """Elementwise add. Supports same-shape tensors, a python scalar, or a
    per-channel bias: (C, H, W) + (C,)."""
    a = constant(a)
    if isinstance(b, (int, float)):
        return _record("add", a.data + b, (a,), lambda g: (g,))
    b = constant(b)
    if a.shape == b.shape:
        return _record("add", a.data + b.data, (a, b), lambda g: (g, g))
    if a.data.ndim == 3 and b.data.ndim == 1 and a.shape[0] == b.shape[0]:
        out = a.data + b.data[:, None, None]
        return _record("add", out, (a, b), lambda g: (g, g.sum(axis=(1, 2))))
    raise ShapeError(f"add: shapes {a.shape} and {b.shape} do not conform")


def mul(a, b):
    """Elementwise multiply by a same-shape tensor or a python scalar."""
    a = constant(a)
    if isinstance(b, (int, float)):
        s = float(b)
        return _record("mul", a.data * s, (a,), lambda g: (g * s,))
    b = constant(b)
    if a.shape != b.shape:
        raise ShapeError(f"mul: shapes {a.shape} and {b.shape} do not conform")
    ad, bd = a.data, b.data
    return _record("mul", ad * bd, (a, b), lambda g: (g * bd, g * ad))


def leaky_relu(x, alpha=0.1):
    x = constant(x)
    xd = x.data
    out = np.where(xd > 0, xd, alpha * xd)
    return _record("leaky_relu", out, (x,),
                   lambda g: (g * np.where(xd > 0, 1.0, alpha),))


def sigmoid(x):
    x = constant(x)
    xd = x.data
    # branch on sign so neither exp overflows
    out = np.where(xd >= 0, 1.0 / (1.0 + np.exp(-np.abs(xd))),
                   np.exp(-np.abs(xd)) / (1.0 + np.exp(-np.abs(xd))))
    return _record("sigmoid", out, (x,), lambda g: (g * out * (1.0 - out),))


def log(x):
    x = constant(x)
    xd = x.data

    def backward_fn(g):
        with np.errstate(divide="ignore"):
            return (g / xd,)

    with np.errstate(divide="ignore"):
        out = np.log(xd)
    return _record("log", out, (x,), backward_fn)


def squared_error(a, b):
    """Elementwise (a - b)^2."""
    a, b = constant(a), constant(b)
    if a.shape != b.shape:
        raise ShapeError(f"squared_error: shapes {a.shape} and {b.shape} do not conform")
    diff = a.data - b.data
    return _record("squared_error", diff * diff, (a, b),
                   lambda g: (2.0 * g * diff, -2.0 * g * diff))


def tsum(x):
    x = constant(x)
    shape = x.shape
    return _record("sum", np.asarray(x.data.sum()), (x,),
                   lambda g: (np.broadcast_to(g, shape).copy(),))


def tmean(x):
    x = constant(x)
    shape, n = x.shape, x.data.size
    return _record("mean", np.asarray(x.data.mean()), (x,),
                   lambda g: (np.broadcast_to(g / n, shape).copy(),))


def _cols(xd, kh, kw):
    """im2col for stride-1 same-size convolution with zero padding."""
    cin, h, w = xd.shape
    padded = np.pad(xd, ((0, 0), (kh // 2, kh // 2), (kw // 2, kw // 2)))
    win = sliding_window_view(padded, (kh, kw), axis=(1, 2))  # (cin, h, w, kh, kw)
    return win.transpose(1, 2, 0, 3, 4).reshape(h * w, cin * kh * kw)


def conv2d(x, w, b=None):
    """2D convolution, stride 1, zero padding to same size.

    x: (Cin, H, W), w: (Cout, Cin, kh, kw) with odd kh/kw, b: (Cout,) or None.
    """
    x, w = constant(x), constant(w)
    if x.data.ndim != 3 or w.data.ndim != 4:
        raise ShapeError(f"conv2d: expected x (C,H,W) and w (Cout,Cin,kh,kw), "
                         f"got {x.shape} and {w.shape}")
    cout, cin, kh, kw = w.shape
    if x.shape[0] != cin:
        raise ShapeError(f"conv2d: input has {x.shape[0]} channels, kernel expects {cin}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"conv2d: kernel extents must be odd, got {kh}x{kw}")
    _, h, wd_ = x.shape
    xd, wdat = x.data, w.data
    cols = _cols(xd, kh, kw)
    out = (cols @ wdat.reshape(cout, -1).T).T.reshape(cout, h, wd_)
    has_bias = b is not None
    if has_bias:
        b = constant(b)
        if b.shape != (cout,):
            raise ShapeError(f"conv2d: bias shape {b.shape}, expected ({cout},)")
        out = out + b.data[:, None, None]

    def backward_fn(g):
        gmat = g.reshape(cout, h * wd_).T
        cols_b = _cols(xd, kh, kw)  # recomputed; cheaper than holding it alive
        grad_w = (gmat.T @ cols_b).reshape(cout, cin, kh, kw)
        gwin = (gmat @ wdat.reshape(cout, -1)).reshape(h, wd_, cin, kh, kw)
        gpad = np.zeros((cin, h + kh - 1, wd_ + kw - 1))
        for i in range(kh):
            for j in range(kw):
                gpad[:, i:i + h, j:j + wd_] += gwin[:, :, :, i, j].transpose(2, 0, 1)
        grad_x = gpad[:, kh // 2:kh // 2 + h, kw // 2:kw // 2 + wd_]
        if has_bias:
            return grad_x, grad_w, g.sum(axis=(1, 2))
        return grad_x, grad_w

    inputs = (x, w, b) if has_bias else (x, w)
    return _record("conv2d", np.ascontiguousarray(out), inputs, backward_fn)


# derived ops (compositions of the primitive set)


def absolute(x):
    """|x| as leaky_relu(x, 0) + leaky_relu(-x, 0); subgradient 0 at the kink."""
    x = constant(x)
    return add(leaky_relu(x, 0.0), leaky_relu(mul(x, -1.0), 0.0))


def l1(a, b):
    """Mean absolute difference."""
    return tmean(absolute(add(constant(a), mul(constant(b), -1.0))))


def mse(a, b):
    """Mean squared difference (per-element mean)."""
    return tmean(squared_error(a, b))


# ---------------------------------------------------------------------------
# evaluation and backward


def forward_eval(fn, *inputs):
    """Run ``fn(*inputs)`` under a fresh tape; return (output, tape)."""
    with Tape() as tape:
        out = fn(*inputs)
    return out, tape


def backward(tape, loss, params=None):
    """Backward sweep over the tape from a scalar loss.

    Returns {name: gradient} for ``params`` (a mapping name -> Tensor);
    parameters the loss never touched get zero gradients. With params=None
    gradients are only accumulated on the tape (see ``Tape.grad``).
    """
    if loss.node is None or loss.node.tape is not tape:
        raise GradientError("loss was not recorded on this tape")
    if loss.data.shape != ():
        raise GradientError(f"loss must be scalar, got shape {loss.data.shape}")
    for node in tape.nodes:
        node.grad = None
    loss.node.grad = np.asarray(1.0)
    for node in reversed(tape.nodes):
        if node.grad is None or node.backward_fn is None:
            continue
        for parent, g in zip(node.parents, node.backward_fn(node.grad)):
            if parent is None:
                continue
            parent.grad = g if parent.grad is None else parent.grad + g
    if params is None:
        return {}
    grads = {}
    for name, p in params.items():
        g = tape.grad(p)
        grads[name] = np.zeros_like(p.data) if g is None else g
    return grads


# ---------------------------------------------------------------------------
# AdamW


@dataclass
class OptimizerState:
    """Per-parameter adaptive moments plus the shared step counter."""

    lr: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adamw_init(params, lr=5e-5, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
    state = OptimizerState(lr, beta1, beta2, eps, weight_decay)
    for name, p in params.items():
        state.m[name] = np.zeros_like(p.data)
        state.v[name] = np.zeros_like(p.data)
    return state


def adamw_step(params, grads, state):
    """One bias-corrected adaptive-moment update with decoupled weight decay.

    Rebinds each parameter's ``.data`` (never writes in place) so arrays saved
    by an earlier forward pass stay valid. Deterministic given its inputs.
    """
    for name in params:
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise GradientError(f"non-finite gradient for parameter block '{name}'")
        if g.shape != params[name].data.shape:
            raise ShapeError(f"adamw_step: gradient shape {g.shape} does not match "
                             f"parameter '{name}' {params[name].data.shape}")
    state.step += 1
    t = state.step
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    for name, p in params.items():
        g = grads[name]
        state.m[name] = state.beta1 * state.m[name] + (1.0 - state.beta1) * g
        state.v[name] = state.beta2 * state.v[name] + (1.0 - state.beta2) * (g * g)
        m_hat = state.m[name] / c1
        v_hat = state.v[name] / c2
        new = p.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
        if state.weight_decay != 0.0:
            new = new - state.lr * state.weight_decay * p.data
        p.data = new
    return params, state
