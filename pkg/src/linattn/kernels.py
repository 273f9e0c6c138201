"""The seven production kernels, each instrumented with a multiply-add counter.

Every kernel computes the same function as oracle.oracle_attn, supports both
mask kinds, loops (batch, head) slices with the per-head decay factor, and
returns (output, opcount). Opcounts count scalar multiply-adds in the
mathematical algorithm, not hardware instructions; they are the
hardware-independent complexity witness.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import LinAttnError, UsageError
from .masks import MaskKind, MaskSpec, decay_weights, materialize
from .oracle import DEFAULT_MEM_CAP, check_quadratic_buffer
from .tensor import AttnInputs, cumsum_rows, discounted_cumsum_rows, validate_inputs

MAX_RECURSION_DEPTH = 64


class MethodId(enum.Enum):
    VANILLA = "vanilla"
    ROW_BASED = "row-based"
    BLOCK_BASED = "block-based"
    RECURSION = "recursion"
    TWO_LEVEL_BLOCK = "two-level-block"
    FLEET = "fleet"
    FLEET_TILED = "fleet-tiled"
    AUTO = "auto"

    @classmethod
    def parse(cls, name: str) -> "MethodId":
        for m in cls:
            if m.value == name:
                return m
        known = ", ".join(m.value for m in cls)
        raise UsageError(f"unknown method {name!r} (known: {known})")


CONCRETE_METHODS = [m for m in MethodId if m is not MethodId.AUTO]


@dataclass
class BlockParams:
    """Tuning knobs shared by all kernels.

    block_size feeds block-based and two-level-block; row_block/col_block
    feed fleet-tiled (col_block None means min(d, 64)); term_size is the
    recursion base-case threshold; mem_cap bounds quadratic buffers
    (<= 0 disables the cap).
    """

    block_size: int = 64
    row_block: int = 64
    col_block: int | None = None
    term_size: int = 32
    mem_cap: int = DEFAULT_MEM_CAP


# ---------------------------------------------------------------------------
# per-(batch, head) slice kernels; b, c: (N, r), v: (N, d)

def _vanilla_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    check_quadratic_buffer(n, dt.itemsize, params.mem_cap, "vanilla")
    out = np.empty((n, d), dtype=dt)
    if decay:
        col = decay_weights(gamma, 0, n, dtype=dt)
    # The N x N product is streamed in row panels so the host survives the
    # complexity sweep; the cap above still enforces the quadratic budget.
    panel = max(1, (1 << 24) // max(n, 1))
    jj = np.arange(n)
    for s in range(0, n, panel):
        e = min(s + panel, n)
        a = b[s:e] @ c.T
        diff = np.arange(s, e)[:, None] - jj[None, :]
        if decay:
            w = np.where(diff >= 0, col[np.clip(diff, 0, n - 1)], dt.type(0))
            a *= w
        else:
            a *= diff >= 0
        out[s:e] = a @ v
    ops = n * n * r + n * n * d
    return out, ops


def _row_based_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    u = np.zeros((r, d), dtype=dt)
    out = np.empty((n, d), dtype=dt)
    g = dt.type(gamma)
    for i in range(n):
        if decay:
            u *= g
        u += np.outer(c[i], v[i])
        out[i] = b[i] @ u
    ops = n * r * d * (3 if decay else 2)
    return out, ops


def _block_based_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    bc = params.block_size
    u = np.zeros((r, d), dtype=dt)
    out = np.empty((n, d), dtype=dt)
    ops = 0
    for s in range(0, n, bc):
        e = min(s + bc, n)
        length = e - s
        bi, ci, vi = b[s:e], c[s:e], v[s:e]
        a = bi @ ci.T
        ops += length * length * r
        if decay:
            a *= materialize(MaskSpec(MaskKind.EXP_DECAY, gamma), length, dtype=dt)
            w_t = decay_weights(gamma, 1, length, dtype=dt)  # gamma^t, t = 1..L
            w_rev = decay_weights(gamma, 0, length, dtype=dt)[::-1]  # gamma^(L-t)
            out[s:e] = a @ vi + (w_t[:, None] * bi) @ u
            u = w_t[-1] * u + (w_rev[:, None] * ci).T @ vi
            ops += length * length + length * d * length + 2 * length * r
            ops += length * r * d + r * d + length * r * d
        else:
            a *= np.tri(length, dtype=dt)
            out[s:e] = a @ vi + bi @ u
            u = u + ci.T @ vi
            ops += length * length * d + 2 * length * r * d
    return out, ops


def _two_level_block_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    bc = params.block_size
    u = np.zeros((r, d), dtype=dt)
    out = np.empty((n, d), dtype=dt)
    ops = 0
    for s in range(0, n, bc):
        e = min(s + bc, n)
        length = e - s
        bi, ci, vi = b[s:e], c[s:e], v[s:e]
        if decay:
            m_local = materialize(MaskSpec(MaskKind.EXP_DECAY, gamma), length, dtype=dt)
            o_intra = ((bi @ ci.T) * m_local) @ vi
            w_t = decay_weights(gamma, 1, length, dtype=dt)
            o_inter = (w_t[:, None] * bi) @ u
            w_rev = decay_weights(gamma, 0, length, dtype=dt)[::-1]
            u = w_t[-1] * u + (w_rev[:, None] * ci).T @ vi
            ops += length * length * (r + d + 1) + 2 * length * r
            ops += 2 * length * r * d + r * d
        else:
            o_intra = ((bi @ ci.T) * np.tri(length, dtype=dt)) @ vi
            o_inter = bi @ u
            u = u + ci.T @ vi
            ops += length * length * (r + d) + 2 * length * r * d
        out[s:e] = o_intra + o_inter
    return out, ops


def _recursion_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    t_size = max(1, params.term_size)

    def rec(bs, cs, vs, depth):
        if depth > MAX_RECURSION_DEPTH:
            raise LinAttnError("recursion depth cap exceeded")
        m = bs.shape[0]
        if m <= t_size:
            return _row_based_slice(bs, cs, vs, gamma, decay, params)
        mid = m // 2
        o1, ops1 = rec(bs[:mid], cs[:mid], vs[:mid], depth + 1)
        o2, ops2 = rec(bs[mid:], cs[mid:], vs[mid:], depth + 1)
        lo = m - mid
        if decay:
            w1 = decay_weights(gamma, 0, lo, dtype=dt)  # row weights gamma^t
            w2 = decay_weights(gamma, 1, mid, dtype=dt)[::-1]  # gamma^(mid-s)
            cross = (w1[:, None] * bs[mid:]) @ ((w2[:, None] * cs[:mid]).T @ vs[:mid])
            ops3 = lo * r + mid * r + mid * r * d + lo * r * d
        else:
            cross = bs[mid:] @ (cs[:mid].T @ vs[:mid])
            ops3 = mid * r * d + lo * r * d
        out = np.concatenate([o1, o2 + cross], axis=0)
        return out, ops1 + ops2 + ops3 + lo * d

    return rec(b, c, v, 0)


def _fleet_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    out = np.zeros((n, d), dtype=v.dtype)
    ops = 0
    for j in range(r):
        x = c[:, j : j + 1] * v
        s = discounted_cumsum_rows(x, gamma) if decay else cumsum_rows(x)
        out += b[:, j : j + 1] * s
        ops += n * d + (n - 1) * d + n * d
    return out, ops


def _fleet_tiled_slice(b, c, v, gamma, decay, params):
    n, r = b.shape
    d = v.shape[1]
    dt = v.dtype
    br = params.row_block
    bcc = params.col_block if params.col_block is not None else min(d, 64)
    out = np.zeros((n, d), dtype=dt)
    ops = 0
    for cs in range(0, d, bcc):
        ce = min(cs + bcc, d)
        width = ce - cs
        carry = np.zeros((r, width), dtype=dt)  # prefix-sum rows, one per rank
        for s in range(0, n, br):
            e = min(s + br, n)
            length = e - s
            vk = v[s:e, cs:ce]
            if decay:
                w_t = decay_weights(gamma, 1, length, dtype=dt)[:, None]
                w_rev = decay_weights(gamma, 0, length, dtype=dt)[::-1, None]
            for j in range(r):
                x = c[s:e, j : j + 1] * vk
                if decay:
                    scan = discounted_cumsum_rows(x, gamma)
                    out[s:e, cs:ce] += b[s:e, j : j + 1] * (scan + w_t * carry[j])
                    carry[j] = w_t[-1, 0] * carry[j] + (w_rev * x).sum(axis=0)
                    ops += length * width * 6 + 2 * length
                else:
                    scan = cumsum_rows(x)
                    out[s:e, cs:ce] += b[s:e, j : j + 1] * (scan + carry[j])
                    carry[j] = carry[j] + x.sum(axis=0)
                    ops += length * width * 5
    return out, ops


_SLICE_KERNELS = {
    MethodId.VANILLA: _vanilla_slice,
    MethodId.ROW_BASED: _row_based_slice,
    MethodId.BLOCK_BASED: _block_based_slice,
    MethodId.RECURSION: _recursion_slice,
    MethodId.TWO_LEVEL_BLOCK: _two_level_block_slice,
    MethodId.FLEET: _fleet_slice,
    MethodId.FLEET_TILED: _fleet_tiled_slice,
}


def run_method(method: MethodId, inputs: AttnInputs, params: BlockParams | None = None,
               validate: bool = True):
    """Route to a concrete kernel; returns (output, total opcount).

    validate=False skips input validation for callers that already ran it
    (the benchmark loop, which must not time validation).
    """
    if method is MethodId.AUTO:
        raise UsageError("auto must be resolved by dispatch.decode, not run_method")
    if params is None:
        params = BlockParams()
    if validate:
        validate_inputs(inputs)
    kernel = _SLICE_KERNELS[method]
    out = np.empty_like(inputs.v)
    total_ops = 0
    for bi in range(inputs.batch):
        for h in range(inputs.heads):
            o, ops = kernel(
                inputs.b[bi, h], inputs.c[bi, h], inputs.v[bi, h],
                inputs.gamma[h], inputs.decay, params,
            )
            out[bi, h] = o
            total_ops += ops
    return out, total_ops
