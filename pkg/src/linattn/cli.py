"""Command-line front end: verify, bench, gen, decode, explain, complexity.

Exit codes: 0 success, 1 verification/classification failure, 2 usage error,
3 resource error. Environment: LINATTN_POLICY points at a dispatch policy
file, LINATTN_MEM_CAP overrides the quadratic-buffer byte cap.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import dispatch, tensorio, verify
from .errors import LinAttnError, ResourceError, UsageError
from .kernels import CONCRETE_METHODS, BlockParams, MethodId, run_method
from .oracle import DEFAULT_MEM_CAP
from .tensor import make_inputs

MEM_CAP_ENV_VAR = "LINATTN_MEM_CAP"


def _int_list(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}")


def _float_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated float list, got {text!r}")


def _methods(text: str):
    if text == "all":
        return list(CONCRETE_METHODS)
    return [MethodId.parse(tok.strip()) for tok in text.split(",") if tok.strip()]


def _dtype(name: str):
    return np.float32 if name == "f32" else np.float64


def _mem_cap(args) -> int:
    if args.mem_cap_bytes is not None:
        return args.mem_cap_bytes
    env = os.environ.get(MEM_CAP_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{MEM_CAP_ENV_VAR} must be an integer, got {env!r}")
    return DEFAULT_MEM_CAP


def _policy(args):
    path = getattr(args, "policy", None) or os.environ.get(dispatch.POLICY_ENV_VAR)
    if path:
        return dispatch.load_policy(path)
    return dispatch.default_policy()


def _pair_rank_dim(ranks, dims):
    if len(ranks) == 1:
        ranks = ranks * len(dims)
    if len(dims) == 1:
        dims = dims * len(ranks)
    if len(ranks) != len(dims):
        raise UsageError("--rank and --dim lists must pair up (equal length or length 1)")
    return list(zip(ranks, dims))


def cmd_verify(args) -> int:
    methods = _methods(args.methods)
    grid = list(verify.default_grid(
        seqlens=_int_list(args.seqlen),
        rank_dim=_pair_rank_dim(_int_list(args.rank), _int_list(args.dim)),
        gammas=_float_list(args.gamma),
        batch_heads=[(b, h) for b, h in (map(int, s.split("x")) for s in args.bh.split(","))],
        masks={"binary": (False,), "decay": (True,), "both": (False, True)}[args.masks],
    ))
    dtype = _dtype(args.dtype)
    tol = args.tol if args.tol is not None else verify.TOLERANCES[args.dtype]
    max_err, cases, violation = verify.verify_methods(
        methods, grid, dtype, args.seed, tol,
        BlockParams(mem_cap=_mem_cap(args)),
    )
    print(f"verified {cases} cases over {len(grid)} configs (dtype {args.dtype}, tol {tol:g})")
    print("method            max_rel_error")
    for m in methods:
        print(f"{m.value:<17} {max_err[m]:.3e}")
    if violation is not None:
        b, h, n, r, d, g, decay = violation.config
        mask = "decay" if decay else "binary"
        print(
            f"FAIL: {violation.method.value} on batch={b} heads={h} seqlen={n} "
            f"rank={r} dim={d} gamma={g} mask={mask}: error {violation.error:.3e} > {tol:g}",
            file=sys.stderr,
        )
        return 1
    print("all methods within tolerance")
    return 0


def cmd_bench(args) -> int:
    grid = [
        (b, args.heads, n, r, d)
        for b in _int_list(args.batch)
        for n in _int_list(args.seqlen)
        for r, d in _pair_rank_dim(_int_list(args.rank), _int_list(args.dim))
    ]
    cfg = bench_mod.BenchConfig(
        methods=_methods(args.methods),
        grid=grid,
        decay=args.mask == "decay",
        gamma=args.gamma,
        dtype=_dtype(args.dtype),
        repeats=args.repeats,
        warmup=args.warmup,
        drop_extremes=args.drop_extremes,
        seed=args.seed,
        params=BlockParams(block_size=args.block_size, mem_cap=_mem_cap(args)),
    )
    report = bench_mod.run_bench(cfg)
    text = bench_mod.render_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def cmd_gen(args) -> int:
    for name, val in (("batch", args.batch), ("heads", args.heads), ("seqlen", args.seqlen),
                      ("rank", args.rank), ("dim", args.dim)):
        if val < 1:
            raise UsageError(f"--{name} must be >= 1, got {val}")
    inputs = bench_mod.gen_inputs(args.batch, args.heads, args.seqlen, args.rank,
                                  args.dim, _dtype(args.dtype), args.seed)
    tensorio.write_tensor(inputs.b, args.out_b)
    tensorio.write_tensor(inputs.c, args.out_c)
    tensorio.write_tensor(inputs.v, args.out_v)
    print(f"wrote {args.out_b}, {args.out_c}, {args.out_v}")
    return 0


def cmd_decode(args) -> int:
    b = tensorio.read_tensor(args.b)
    c = tensorio.read_tensor(args.c)
    v = tensorio.read_tensor(args.v)
    inputs = make_inputs(b, c, v, gamma=args.gamma, decay=args.decay)
    method = MethodId.parse(args.method)
    params = BlockParams(mem_cap=_mem_cap(args))
    if method is MethodId.AUTO:
        method, _ = dispatch.explain(inputs, _policy(args))
        print(f"resolved: {method.value}", file=sys.stderr)
    out, _ = run_method(method, inputs, params)
    tensorio.write_tensor(out, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_explain(args) -> int:
    inputs = bench_mod.gen_inputs(args.batch, args.heads, args.seqlen, 1, 1,
                                  decay=args.mask == "decay")
    method, rule = dispatch.explain(inputs, _policy(args))
    print(f"{method.value}  ({rule})")
    return 0


EXPECTED_CLASS = {m: "N" for m in CONCRETE_METHODS}
EXPECTED_CLASS[MethodId.VANILLA] = "N^2"
EXPECTED_CLASS[MethodId.RECURSION] = "NlogN"


def cmd_complexity(args) -> int:
    methods = _methods(args.methods)
    n_grid = _int_list(args.seqlen)
    # the full sweep needs quadratic buffers past the default cap
    cap = args.mem_cap_bytes if args.mem_cap_bytes is not None else 0
    params = BlockParams(mem_cap=cap)
    ok = True
    for method in methods:
        fit = bench_mod.complexity_fit(method, n_grid, args.rank, args.dim,
                                       _dtype(args.dtype), args.seed,
                                       args.mask == "decay", args.gamma, params)
        expected = EXPECTED_CLASS[method]
        status = "ok" if fit.best == expected else "MISMATCH"
        if fit.best != expected:
            ok = False
        r2 = fit.fits[fit.best].r2
        print(f"{method.value:<17} best {fit.best:<6} (expected {expected:<6}) "
              f"R^2 {r2:.6f} opcounts {fit.opcounts}  {status}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linattn",
                                description="Causal linear attention kernels and benchmarks")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("verify", help="check every kernel against the brute-force oracle")
    q.add_argument("--methods", default="all")
    q.add_argument("--seqlen", default="1,2,3,5,16,31,32,33,64,257")
    q.add_argument("--rank", default="1,3,8,32")
    q.add_argument("--dim", default="1,3,8,32")
    q.add_argument("--gamma", default="0,0.5,0.9,1")
    q.add_argument("--bh", default="1x1,2x3", help="batchxheads combos, comma separated")
    q.add_argument("--masks", choices=["binary", "decay", "both"], default="both")
    q.add_argument("--dtype", choices=["f32", "f64"], default="f64")
    q.add_argument("--tol", type=float, default=None)
    q.add_argument("--seed", type=int, default=7)
    q.add_argument("--mem-cap-bytes", type=int, default=None)
    q.set_defaults(fn=cmd_verify)

    q = sub.add_parser("bench", help="time kernels over a configuration grid")
    q.add_argument("--methods", default="all")
    q.add_argument("--seqlen", default="128,512,2048")
    q.add_argument("--batch", default="1")
    q.add_argument("--heads", type=int, default=1)
    q.add_argument("--rank", default="16")
    q.add_argument("--dim", default="16")
    q.add_argument("--mask", choices=["binary", "decay"], default="binary")
    q.add_argument("--gamma", type=float, default=0.9)
    q.add_argument("--dtype", choices=["f32", "f64"], default="f32")
    q.add_argument("--repeats", type=int, default=15)
    q.add_argument("--warmup", type=int, default=2)
    q.add_argument("--drop-extremes", action="store_true")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--block-size", type=int, default=64)
    q.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    q.add_argument("--out", default=None)
    q.add_argument("--mem-cap-bytes", type=int, default=None)
    q.set_defaults(fn=cmd_bench)

    q = sub.add_parser("gen", help="write seeded standard-normal B, C, V tensor files")
    q.add_argument("--batch", type=int, default=1)
    q.add_argument("--heads", type=int, default=1)
    q.add_argument("--seqlen", type=int, required=True)
    q.add_argument("--rank", type=int, default=16)
    q.add_argument("--dim", type=int, default=16)
    q.add_argument("--dtype", choices=["f32", "f64"], default="f32")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out-b", default="B.ldt")
    q.add_argument("--out-c", default="C.ldt")
    q.add_argument("--out-v", default="V.ldt")
    q.set_defaults(fn=cmd_gen)

    q = sub.add_parser("decode", help="run attention on tensor files")
    q.add_argument("--b", required=True)
    q.add_argument("--c", required=True)
    q.add_argument("--v", required=True)
    q.add_argument("--gamma", type=float, default=1.0)
    q.add_argument("--decay", action="store_true")
    q.add_argument("--method", default="auto")
    q.add_argument("--out", default="O.ldt")
    q.add_argument("--policy", default=None)
    q.add_argument("--mem-cap-bytes", type=int, default=None)
    q.set_defaults(fn=cmd_decode)

    q = sub.add_parser("explain", help="show which kernel auto would pick")
    q.add_argument("--batch", type=int, default=1)
    q.add_argument("--heads", type=int, default=1)
    q.add_argument("--seqlen", type=int, required=True)
    q.add_argument("--mask", choices=["binary", "decay"], default="binary")
    q.add_argument("--policy", default=None)
    q.set_defaults(fn=cmd_explain)

    q = sub.add_parser("complexity", help="fit opcount growth against N, NlogN, N^2")
    q.add_argument("--methods", default="all")
    q.add_argument("--method", dest="methods", help="alias for --methods")
    q.add_argument("--seqlen", default="1024,2048,4096,8192,16384,32768")
    q.add_argument("--rank", type=int, default=16)
    q.add_argument("--dim", type=int, default=16)
    q.add_argument("--mask", choices=["binary", "decay"], default="binary")
    q.add_argument("--gamma", type=float, default=0.9)
    q.add_argument("--dtype", choices=["f32", "f64"], default="f32")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--mem-cap-bytes", type=int, default=None)
    q.set_defaults(fn=cmd_complexity)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LinAttnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
