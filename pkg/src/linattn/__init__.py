"""Exponentially decaying causal linear attention kernels and benchmarks.

Computes O = (B C^T (.) M) V for a lower-triangular mask M (binary causal
or gamma^(i-j) decay) through seven interchangeable backends, verified
against a brute-force oracle.
"""

from .bench import BenchConfig, BenchReport, complexity_fit, gen_inputs, render_report, run_bench, summarize
from .dispatch import DispatchPolicy, decode, default_policy, explain, load_policy, parse_policy
from .errors import (
    DataError,
    FormatError,
    LinAttnError,
    ParameterError,
    ResourceError,
    ShapeError,
    UsageError,
)
from .kernels import CONCRETE_METHODS, BlockParams, MethodId, run_method
from .masks import MaskKind, MaskSpec, decay_weights, materialize
from .oracle import DEFAULT_MEM_CAP, oracle_attn
from .tensor import AttnInputs, cumsum_rows, discounted_cumsum_rows, make_inputs, validate_inputs
from .tensorio import read_tensor, write_tensor

__all__ = [
    "AttnInputs",
    "BenchConfig",
    "BenchReport",
    "BlockParams",
    "CONCRETE_METHODS",
    "DEFAULT_MEM_CAP",
    "DataError",
    "DispatchPolicy",
    "FormatError",
    "LinAttnError",
    "MaskKind",
    "MaskSpec",
    "MethodId",
    "ParameterError",
    "ResourceError",
    "ShapeError",
    "UsageError",
    "complexity_fit",
    "cumsum_rows",
    "decay_weights",
    "decode",
    "default_policy",
    "discounted_cumsum_rows",
    "explain",
    "gen_inputs",
    "load_policy",
    "make_inputs",
    "materialize",
    "oracle_attn",
    "parse_policy",
    "read_tensor",
    "render_report",
    "run_bench",
    "run_method",
    "summarize",
    "validate_inputs",
    "write_tensor",
]

__version__ = "0.1.0"
