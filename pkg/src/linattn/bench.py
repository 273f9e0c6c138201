"""Measurement engine: repeated timed runs, statistics, complexity fits.

Timing is wall-clock via the monotonic high-resolution clock; it excludes
input generation and validation, includes output allocation. Runs are
strictly sequential on one thread. CPU latency numbers are informational;
only opcount-based complexity claims are asserted anywhere.
"""

from __future__ import annotations

import math
import platform
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError, UsageError
from .kernels import BlockParams, MethodId, run_method
from .tensor import AttnInputs, validate_inputs

GENERATOR_NOTE = "numpy PCG64 via default_rng, seeded per config with [seed, batch, heads, seqlen, rank, dim]"


@dataclass
class BenchConfig:
    methods: list
    grid: list  # (batch, heads, seqlen, rank, dim) tuples
    decay: bool = False
    gamma: float = 0.9
    dtype: type = np.float32
    repeats: int = 15
    warmup: int = 2
    drop_extremes: bool = False
    seed: int = 0
    params: BlockParams = field(default_factory=BlockParams)


@dataclass
class BenchRow:
    method: MethodId
    batch: int
    heads: int
    seqlen: int
    rank: int
    dim: int
    mask: str
    gamma: float
    dtype: str
    mean_s: float | None
    std_s: float | None
    opcount: int | None
    status: str  # "ok" or "OOM"


@dataclass
class BenchReport:
    rows: list
    meta: dict


def summarize(times, drop_extremes: bool = False):
    """(mean, sample std) of the observations, optionally dropping one max
    and one min first. Std uses the n-1 denominator; 0.0 below two samples."""
    obs = sorted(float(t) for t in times)
    if drop_extremes:
        if len(obs) < 3:
            raise UsageError("drop_extremes needs at least 3 observations")
        obs = obs[1:-1]
    mean = sum(obs) / len(obs)
    if len(obs) < 2:
        return mean, 0.0
    var = sum((t - mean) ** 2 for t in obs) / (len(obs) - 1)
    return mean, math.sqrt(var)


def gen_inputs(batch, heads, seqlen, rank, dim, dtype=np.float32, seed=0,
               decay=False, gamma=0.9) -> AttnInputs:
    """Seeded standard-normal inputs; bitwise reproducible per (config, seed)."""
    rng = np.random.default_rng([seed, batch, heads, seqlen, rank, dim])
    b = rng.standard_normal((batch, heads, seqlen, rank)).astype(dtype)
    c = rng.standard_normal((batch, heads, seqlen, rank)).astype(dtype)
    v = rng.standard_normal((batch, heads, seqlen, dim)).astype(dtype)
    return AttnInputs(b=b, c=c, v=v, gamma=[gamma] * heads, decay=decay)


def run_bench(cfg: BenchConfig) -> BenchReport:
    if not cfg.grid:
        raise UsageError("benchmark grid is empty")
    if cfg.drop_extremes and cfg.repeats < 3:
        raise UsageError("drop_extremes requires repeats >= 3")
    for m in cfg.methods:
        if not isinstance(m, MethodId) or m is MethodId.AUTO:
            raise UsageError(f"bench needs concrete methods, got {m}")
    dtype_name = "f32" if np.dtype(cfg.dtype) == np.float32 else "f64"
    mask_name = "decay" if cfg.decay else "binary"
    rows = []
    for batch, heads, seqlen, rank, dim in cfg.grid:
        inputs = gen_inputs(batch, heads, seqlen, rank, dim, cfg.dtype,
                            cfg.seed, cfg.decay, cfg.gamma)
        validate_inputs(inputs)
        for method in cfg.methods:
            row = BenchRow(method, batch, heads, seqlen, rank, dim, mask_name,
                           cfg.gamma, dtype_name, None, None, None, "ok")
            try:
                opcount = None
                for _ in range(cfg.warmup):
                    _, opcount = run_method(method, inputs, cfg.params, validate=False)
                times = []
                for _ in range(cfg.repeats):
                    t0 = time.perf_counter()
                    _, opcount = run_method(method, inputs, cfg.params, validate=False)
                    times.append(time.perf_counter() - t0)
                row.mean_s, row.std_s = summarize(times, cfg.drop_extremes)
                row.opcount = opcount
            except ResourceError:
                row.status = "OOM"
            rows.append(row)
    meta = {
        "seed": cfg.seed,
        "dtype": dtype_name,
        "generator": GENERATOR_NOTE,
        "host": platform.node() or "unknown",
    }
    return BenchReport(rows=rows, meta=meta)


# ---------------------------------------------------------------------------
# complexity fitting

@dataclass
class ModelFit:
    name: str  # "N", "NlogN", "N^2"
    coeffs: tuple
    sse: float
    r2: float


@dataclass
class FitReport:
    method: MethodId
    n_grid: list
    opcounts: list
    fits: dict  # name -> ModelFit
    best: str


def _fit_models(ns, ys):
    n = np.asarray(ns, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    sst = float(((y - y.mean()) ** 2).sum())

    def sse_of(pred):
        return float(((y - pred) ** 2).sum())

    c_lin = float((n * y).sum() / (n * n).sum())
    fit_lin = ModelFit("N", (c_lin,), sse_of(c_lin * n), 0.0)

    x = np.stack([n * np.log2(n), n], axis=1)
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    fit_nlogn = ModelFit("NlogN", tuple(coef), sse_of(x @ coef), 0.0)

    q = float((n * n * y).sum() / (n ** 4).sum())
    fit_quad = ModelFit("N^2", (q,), sse_of(q * n * n), 0.0)

    for fit in (fit_lin, fit_nlogn, fit_quad):
        fit.r2 = 1.0 - fit.sse / sst if sst > 0 else 1.0
    return {f.name: f for f in (fit_lin, fit_nlogn, fit_quad)}


def _pick_best(fits):
    lin, nlogn, quad = fits["N"], fits["NlogN"], fits["N^2"]
    if quad.sse <= min(lin.sse, nlogn.sse):
        return "N^2"
    # NlogN nests N, so it never loses on raw SSE; only prefer it when the
    # improvement is substantial, not a least-squares technicality.
    if nlogn.sse < lin.sse / 100.0:
        return "NlogN"
    return "N"


def complexity_fit(method: MethodId, n_grid, rank=16, dim=16, dtype=np.float32,
                   seed=0, decay=False, gamma=0.9,
                   params: BlockParams | None = None) -> FitReport:
    """Instrumented opcounts over n_grid, least-squares fit of three models."""
    ns = sorted(set(int(n) for n in n_grid))
    if len(ns) < 4 or ns[-1] < 8 * ns[0]:
        raise UsageError("complexity fit needs >= 4 sequence lengths spanning at least 8x")
    if params is None:
        params = BlockParams(mem_cap=0)  # the sweep needs the full grid
    opcounts = []
    for n in ns:
        inputs = gen_inputs(1, 1, n, rank, dim, dtype, seed, decay, gamma)
        _, ops = run_method(method, inputs, params)
        opcounts.append(ops)
    fits = _fit_models(ns, opcounts)
    return FitReport(method, ns, opcounts, fits, _pick_best(fits))


# ---------------------------------------------------------------------------
# report rendering

def _sci(x: float) -> str:
    return np.format_float_scientific(x, precision=2, exp_digits=1, trim="-")


def cell_text(row: BenchRow) -> str:
    if row.status == "OOM":
        return "OOM"
    return f"{_sci(row.mean_s)} ± {_sci(row.std_s)}"


CSV_HEADER = "method,batch,heads,seqlen,rank,dim,mask,gamma,dtype,mean_s,std_s,opcount,status"


def render_report(report: BenchReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in report.rows:
            mean = "" if r.mean_s is None else repr(r.mean_s)
            std = "" if r.std_s is None else repr(r.std_s)
            ops = "" if r.opcount is None else str(r.opcount)
            lines.append(
                f"{r.method.value},{r.batch},{r.heads},{r.seqlen},{r.rank},{r.dim},"
                f"{r.mask},{r.gamma},{r.dtype},{mean},{std},{ops},{r.status}"
            )
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        seqlens = sorted(set(r.seqlen for r in report.rows))
        methods = []
        for r in report.rows:
            if r.method not in methods:
                methods.append(r.method)
        by_key = {}
        for r in report.rows:
            by_key.setdefault((r.method, r.seqlen), r)
        lines = ["| method | " + " | ".join(str(n) for n in seqlens) + " |",
                 "|" + "---|" * (len(seqlens) + 1)]
        for m in methods:
            cells = []
            for n in seqlens:
                r = by_key.get((m, n))
                cells.append(cell_text(r) if r is not None else "")
            lines.append(f"| {m.value} | " + " | ".join(cells) + " |")
        meta = ", ".join(f"{k}: {v}" for k, v in report.meta.items())
        lines.append("")
        lines.append(f"<!-- {meta} -->")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unknown report format {fmt!r} (expected csv or markdown)")
