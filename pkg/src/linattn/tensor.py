"""Dense tensor helpers and the two scan primitives.

Tensors are plain contiguous numpy arrays of dtype float32 or float64.
Both scans accumulate strictly left-to-right (index ascending) so that the
reference and kernel paths are reproducible; there is no pairwise/tree
reduction anywhere in the scalar recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, ParameterError, ShapeError

SUPPORTED_DTYPES = (np.float32, np.float64)


def check_finite(a: np.ndarray, name: str = "tensor") -> None:
    """Reject NaN/Inf, reporting the first offending flat index."""
    finite = np.isfinite(a)
    if not finite.all():
        idx = int(np.flatnonzero(~finite.ravel())[0])
        raise DataError(f"{name} has a non-finite entry at flat index {idx}")


def as_tensor(a, dtype=None, name: str = "tensor") -> np.ndarray:
    """Validate external input as a contiguous f32/f64 array."""
    arr = np.ascontiguousarray(a, dtype=dtype)
    if arr.dtype.type not in SUPPORTED_DTYPES:
        arr = arr.astype(np.float64)
    if arr.size == 0:
        raise ShapeError(f"{name} is empty (dims {arr.shape})")
    check_finite(arr, name)
    return arr


def cumsum_rows(m: np.ndarray) -> np.ndarray:
    """Running sum over rows: out[i,:] = sum_{j<=i} m[j,:]."""
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"cumsum_rows needs a non-empty 2-D tensor, got dims {m.shape}")
    # add.accumulate walks the rows in ascending order, matching the
    # left-to-right contract bit for bit.
    return np.cumsum(m, axis=0)


def discounted_cumsum_rows(m: np.ndarray, lam: float) -> np.ndarray:
    """Discounted running sum: out[i,:] = m[i,:] + lam * out[i-1,:]."""
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"discounted_cumsum_rows needs a non-empty 2-D tensor, got dims {m.shape}")
    if not (0.0 <= lam <= 1.0):
        raise ParameterError(f"discount factor must lie in [0, 1], got {lam}")
    out = np.empty_like(m)
    out[0] = m[0]
    lam_s = m.dtype.type(lam)  # keep f32 inputs in f32 arithmetic
    for i in range(1, m.shape[0]):
        out[i] = m[i] + lam_s * out[i - 1]
    return out


@dataclass
class AttnInputs:
    """The (B, C, V) triple with batch/head structure and per-head decay.

    b, c: (batch, heads, N, r); v: (batch, heads, N, d);
    gamma: one decay factor per head; decay=False means the binary causal mask.
    """

    b: np.ndarray
    c: np.ndarray
    v: np.ndarray
    gamma: list = field(default_factory=list)
    decay: bool = False

    @property
    def batch(self):
        return self.b.shape[0]

    @property
    def heads(self):
        return self.b.shape[1]

    @property
    def seqlen(self):
        return self.b.shape[2]

    @property
    def rank(self):
        return self.b.shape[3]

    @property
    def dim(self):
        return self.v.shape[3]


def validate_inputs(inputs: AttnInputs) -> None:
    """Check shape/dtype/finiteness consistency of an AttnInputs triple."""
    b, c, v = inputs.b, inputs.c, inputs.v
    for name, t in (("B", b), ("C", c), ("V", v)):
        if t.ndim != 4:
            raise ShapeError(f"{name} must be 4-D (batch, heads, seqlen, width), got dims {t.shape}")
        if min(t.shape) < 1:
            raise ShapeError(f"{name} has a zero extent (dims {t.shape})")
        if t.dtype.type not in SUPPORTED_DTYPES:
            raise ShapeError(f"{name} has unsupported dtype {t.dtype}")
    if b.shape != c.shape:
        axis = next(i for i in range(4) if b.shape[i] != c.shape[i])
        axis_name = ("batch", "heads", "seqlen", "rank")[axis]
        raise ShapeError(f"B and C disagree on the {axis_name} axis: {b.shape[axis]} vs {c.shape[axis]}")
    if v.shape[:3] != b.shape[:3]:
        axis = next(i for i in range(3) if b.shape[i] != v.shape[i])
        axis_name = ("batch", "heads", "seqlen")[axis]
        raise ShapeError(f"V disagrees with B on the {axis_name} axis: {v.shape[axis]} vs {b.shape[axis]}")
    if not (b.dtype == c.dtype == v.dtype):
        raise ShapeError(f"dtype mismatch: B={b.dtype} C={c.dtype} V={v.dtype}")
    if len(inputs.gamma) != inputs.heads:
        raise ParameterError(f"gamma must have one entry per head ({inputs.heads}), got {len(inputs.gamma)}")
    for h, g in enumerate(inputs.gamma):
        if not (0.0 <= g <= 1.0):
            raise ParameterError(f"gamma[{h}] = {g} is outside [0, 1]")
    for name, t in (("B", b), ("C", c), ("V", v)):
        check_finite(t, name)


def make_inputs(b, c, v, gamma=None, decay=False, dtype=None) -> AttnInputs:
    """Build a validated AttnInputs, broadcasting 2-D inputs to (1, 1, N, ·)."""
    b = as_tensor(b, dtype, "B")
    c = as_tensor(c, dtype, "C")
    v = as_tensor(v, dtype, "V")
    if b.ndim == 2:
        b, c, v = b[None, None], c[None, None], v[None, None]
    if b.ndim != 4:
        raise ShapeError(f"B must be 2-D or 4-D, got dims {b.shape}")
    heads = b.shape[1]
    if gamma is None:
        gamma = [1.0] * heads
    elif np.isscalar(gamma):
        gamma = [float(gamma)] * heads
    else:
        gamma = [float(g) for g in gamma]
    inputs = AttnInputs(b=b, c=c, v=v, gamma=gamma, decay=decay)
    validate_inputs(inputs)
    return inputs
