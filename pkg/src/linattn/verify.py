"""Oracle-equivalence sweep shared by the CLI and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bench import gen_inputs
from .kernels import CONCRETE_METHODS, BlockParams, MethodId, run_method
from .oracle import oracle_attn

# max-norm relative tolerance per dtype
TOLERANCES = {"f64": 1e-10, "f32": 1e-3}

DEFAULT_SEQLENS = (1, 2, 3, 5, 16, 31, 32, 33, 64, 257)
DEFAULT_RANK_DIM = ((1, 1), (3, 3), (8, 8), (32, 32))
DEFAULT_GAMMAS = (0.0, 0.5, 0.9, 1.0)
DEFAULT_BATCH_HEADS = ((1, 1), (2, 3))


def max_rel_error(out: np.ndarray, ref: np.ndarray) -> float:
    denom = max(float(np.abs(ref).max()), np.finfo(np.float64).tiny)
    return float(np.abs(out.astype(np.float64) - ref.astype(np.float64)).max()) / denom


@dataclass
class Violation:
    method: MethodId
    config: tuple
    error: float


def default_grid(seqlens=DEFAULT_SEQLENS, rank_dim=DEFAULT_RANK_DIM,
                 gammas=DEFAULT_GAMMAS, batch_heads=DEFAULT_BATCH_HEADS,
                 masks=(False, True)):
    """Yield (batch, heads, seqlen, rank, dim, gamma, decay) configs."""
    for decay in masks:
        for batch, heads in batch_heads:
            for n in seqlens:
                for r, d in rank_dim:
                    for g in gammas:
                        yield (batch, heads, n, r, d, g, decay)


def verify_methods(methods=None, grid=None, dtype=np.float64, seed=7,
                   tolerance=None, params: BlockParams | None = None):
    """Run every method on every config against the f64 oracle.

    Returns (per-method max error dict, cases run, first Violation or None).
    """
    if methods is None:
        methods = CONCRETE_METHODS
    if grid is None:
        grid = list(default_grid())
    dtype_name = "f32" if np.dtype(dtype) == np.float32 else "f64"
    if tolerance is None:
        tolerance = TOLERANCES[dtype_name]
    max_err = {m: 0.0 for m in methods}
    cases = 0
    first = None
    for batch, heads, n, r, d, g, decay in grid:
        inputs = gen_inputs(batch, heads, n, r, d, dtype, seed, decay, g)
        ref = oracle_attn(inputs, mem_cap=0)
        for method in methods:
            out, _ = run_method(method, inputs, params)
            err = max_rel_error(out, ref)
            cases += 1
            if err > max_err[method]:
                max_err[method] = err
            if err > tolerance and first is None:
                first = Violation(method, (batch, heads, n, r, d, g, decay), err)
    return max_err, cases, first
