"""Lower-triangular mask semantics: binary causal and exponential decay."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError


class MaskKind(enum.Enum):
    BINARY_CAUSAL = "binary"
    EXP_DECAY = "decay"


@dataclass(frozen=True)
class MaskSpec:
    """Entry rule for M: 1/0 causal, or gamma^(i-j) below the diagonal.

    gamma^0 is defined as 1 even for gamma = 0, so the diagonal is always 1.
    """

    kind: MaskKind
    gamma: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.gamma <= 1.0):
            raise ParameterError(f"gamma = {self.gamma} is outside [0, 1]")


def decay_weights(gamma: float, start_exp: int, length: int, dtype=np.float64) -> np.ndarray:
    """[gamma^start_exp, gamma^(start_exp+1), ...] of the given length.

    Powers come from incremental multiplication, never pow() over a long
    range, so blocked kernels stay exact relative to each other.
    """
    if length < 1:
        raise ShapeError(f"decay_weights needs length >= 1, got {length}")
    if start_exp < 0:
        raise ParameterError(f"start_exp must be >= 0, got {start_exp}")
    out = np.empty(length, dtype=dtype)
    w = 1.0
    for _ in range(start_exp):
        w *= gamma
    for k in range(length):
        out[k] = w
        w *= gamma
    return out


def materialize(spec: MaskSpec, n: int, dtype=np.float64) -> np.ndarray:
    """Dense n x n mask; the strict upper triangle is exactly zero."""
    if n < 1:
        raise ShapeError(f"mask size must be >= 1, got {n}")
    m = np.zeros((n, n), dtype=dtype)
    if spec.kind is MaskKind.BINARY_CAUSAL:
        m[np.tril_indices(n)] = 1.0
        return m
    col = decay_weights(spec.gamma, 0, n, dtype=dtype)
    for j in range(n):
        m[j:, j] = col[: n - j]
    return m
