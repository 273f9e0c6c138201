"""Brute-force reference: materialize the mask, form the full product.

This is the single source of numerical truth for every kernel. It always
accumulates in float64, loops (batch, head) slices sequentially, and
accepts the O(N^2) memory cost up to a configurable byte cap.
"""

from __future__ import annotations

import numpy as np

from .errors import ResourceError
from .masks import MaskKind, MaskSpec, materialize
from .tensor import AttnInputs, validate_inputs

DEFAULT_MEM_CAP = 2 << 30  # 2 GiB


def check_quadratic_buffer(n: int, itemsize: int, mem_cap: int, what: str) -> None:
    """Refuse an N x N buffer over the cap; mem_cap <= 0 disables the check."""
    if mem_cap > 0 and n * n * itemsize > mem_cap:
        raise ResourceError(
            f"{what} needs an {n}x{n} buffer ({n * n * itemsize} bytes) over the "
            f"{mem_cap}-byte cap; use a linear method (e.g. row-based or fleet)"
        )


def oracle_attn(inputs: AttnInputs, mem_cap: int = DEFAULT_MEM_CAP) -> np.ndarray:
    """(B C^T  (.) M) V per (batch, head) slice, computed densely in f64."""
    validate_inputs(inputs)
    n = inputs.seqlen
    check_quadratic_buffer(n, np.dtype(np.float64).itemsize, mem_cap, "oracle")
    out = np.empty_like(inputs.v)
    kind = MaskKind.EXP_DECAY if inputs.decay else MaskKind.BINARY_CAUSAL
    for bi in range(inputs.batch):
        for h in range(inputs.heads):
            mask = materialize(MaskSpec(kind, inputs.gamma[h]), n)
            b = inputs.b[bi, h].astype(np.float64)
            c = inputs.c[bi, h].astype(np.float64)
            v = inputs.v[bi, h].astype(np.float64)
            a = b @ c.T
            out[bi, h] = ((a * mask) @ v).astype(inputs.v.dtype)
    return out
