import math

import numpy as np
import pytest

from linattn import (
    BenchConfig,
    BlockParams,
    MethodId,
    UsageError,
    complexity_fit,
    gen_inputs,
    render_report,
    run_bench,
    summarize,
)
from linattn.bench import BenchReport, BenchRow, cell_text


def test_drop_extremes_arithmetic():
    mean, std = summarize([3, 1, 2, 9, 2], drop_extremes=True)
    assert mean == pytest.approx(7 / 3)
    assert std == pytest.approx(np.std([3, 2, 2], ddof=1))


def test_plain_mean_std():
    mean, std = summarize([2, 2, 2])
    assert mean == 2 and std == 0
    mean, std = summarize([1.0, 2.0, 3.0, 4.0])
    assert mean == 2.5
    assert std == pytest.approx(math.sqrt(5 / 3))


def test_drop_extremes_needs_three():
    with pytest.raises(UsageError):
        summarize([1, 2], drop_extremes=True)


def test_seeded_inputs_reproducible():
    a = gen_inputs(2, 3, 16, 4, 5, np.float32, seed=9)
    b = gen_inputs(2, 3, 16, 4, 5, np.float32, seed=9)
    assert np.array_equal(a.b, b.b)
    assert np.array_equal(a.c, b.c)
    assert np.array_equal(a.v, b.v)
    c = gen_inputs(2, 3, 16, 4, 5, np.float32, seed=10)
    assert not np.array_equal(a.b, c.b)


def test_run_bench_basic():
    cfg = BenchConfig(
        methods=[MethodId.ROW_BASED, MethodId.FLEET],
        grid=[(1, 1, 16, 2, 2), (1, 1, 32, 2, 2)],
        repeats=3,
        warmup=1,
        seed=5,
    )
    report = run_bench(cfg)
    assert len(report.rows) == 4
    for row in report.rows:
        assert row.status == "ok"
        assert row.mean_s is not None and row.mean_s >= 0
        assert row.opcount > 0
    assert "PCG64" in report.meta["generator"]


def test_run_bench_oom_row_continues():
    cfg = BenchConfig(
        methods=[MethodId.VANILLA, MethodId.ROW_BASED],
        grid=[(1, 1, 2048, 2, 2)],
        repeats=3,
        warmup=0,
        params=BlockParams(mem_cap=1 << 20),
    )
    report = run_bench(cfg)
    by_method = {r.method: r for r in report.rows}
    assert by_method[MethodId.VANILLA].status == "OOM"
    assert by_method[MethodId.VANILLA].mean_s is None
    assert by_method[MethodId.ROW_BASED].status == "ok"


def test_run_bench_rejects_bad_config():
    with pytest.raises(UsageError):
        run_bench(BenchConfig(methods=[MethodId.FLEET], grid=[]))
    with pytest.raises(UsageError):
        run_bench(BenchConfig(methods=[MethodId.AUTO], grid=[(1, 1, 4, 1, 1)]))
    with pytest.raises(UsageError):
        run_bench(BenchConfig(methods=[MethodId.FLEET], grid=[(1, 1, 4, 1, 1)],
                              repeats=2, drop_extremes=True))


def test_opcount_independent_of_timing():
    cfg = BenchConfig(methods=[MethodId.FLEET], grid=[(1, 1, 64, 3, 3)],
                      repeats=3, warmup=0, seed=1)
    ops = [run_bench(cfg).rows[0].opcount for _ in range(2)]
    assert ops[0] == ops[1]


def _row(**kw):
    base = dict(method=MethodId.FLEET, batch=1, heads=1, seqlen=128, rank=4,
                dim=4, mask="binary", gamma=1.0, dtype="f32",
                mean_s=None, std_s=None, opcount=None, status="OOM")
    base.update(kw)
    return BenchRow(**base)


def test_render_empty_csv_is_header_only():
    text = render_report(BenchReport(rows=[], meta={}), "csv")
    assert text == ("method,batch,heads,seqlen,rank,dim,mask,gamma,dtype,"
                    "mean_s,std_s,opcount,status\n")


def test_render_oom_cell():
    row = _row()
    assert cell_text(row) == "OOM"
    md = render_report(BenchReport(rows=[row], meta={}), "markdown")
    assert "| OOM |" in md
    csv = render_report(BenchReport(rows=[row], meta={}), "csv")
    assert ",OOM" in csv.splitlines()[1]


def test_render_timed_cell_format():
    row = _row(mean_s=2.83e-3, std_s=7.4e-6, opcount=10, status="ok")
    assert cell_text(row) == "2.83e-3 ± 7.4e-6"


def test_complexity_fit_classes():
    grid = [256, 512, 1024, 2048, 4096]
    assert complexity_fit(MethodId.ROW_BASED, grid, 4, 4).best == "N"
    assert complexity_fit(MethodId.FLEET, grid, 4, 4).best == "N"
    assert complexity_fit(MethodId.VANILLA, grid, 4, 4).best == "N^2"
    assert complexity_fit(MethodId.RECURSION, grid, 4, 4).best == "NlogN"


def test_complexity_fit_rejects_degenerate_grid():
    with pytest.raises(UsageError):
        complexity_fit(MethodId.FLEET, [256, 512], 4, 4)
    with pytest.raises(UsageError):
        complexity_fit(MethodId.FLEET, [256, 300, 400, 512], 4, 4)
