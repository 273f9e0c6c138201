import numpy as np
import pytest

from linattn import read_tensor, write_tensor
from linattn.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_verify_small_grid(capsys):
    code = run_cli("verify", "--methods", "all", "--seqlen", "1,2,5,16",
                   "--rank", "1,3", "--dim", "2,3", "--gamma", "0.9", "--seed", "7")
    out = capsys.readouterr().out
    assert code == 0
    assert "all methods within tolerance" in out


def test_verify_seqlen_one(capsys):
    code = run_cli("verify", "--methods", "vanilla", "--seqlen", "1",
                   "--rank", "2", "--dim", "2", "--gamma", "1")
    assert code == 0


def test_verify_unknown_method():
    assert run_cli("verify", "--methods", "nosuch") == 2


def test_bench_markdown(capsys):
    code = run_cli("bench", "--methods", "fleet,row-based", "--seqlen", "16,32",
                   "--batch", "1", "--rank", "2", "--dim", "2",
                   "--repeats", "3", "--warmup", "0")
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("| method | 16 | 32 |")
    assert "±" in out


def test_bench_csv_to_file(tmp_path, capsys):
    out_file = tmp_path / "report.csv"
    code = run_cli("bench", "--methods", "fleet", "--seqlen", "16",
                   "--repeats", "3", "--warmup", "0", "--format", "csv",
                   "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("method,batch,heads,seqlen")
    assert lines[1].startswith("fleet,1,1,16")


def test_bench_drop_extremes(capsys):
    code = run_cli("bench", "--methods", "fleet", "--seqlen", "16",
                   "--repeats", "7", "--warmup", "0", "--drop-extremes")
    assert code == 0


def test_bench_oom_row(capsys):
    code = run_cli("bench", "--methods", "vanilla,fleet", "--seqlen", "4096",
                   "--rank", "2", "--dim", "2", "--repeats", "3", "--warmup", "0",
                   "--mem-cap-bytes", str(1 << 20), "--format", "csv")
    out = capsys.readouterr().out
    assert code == 0
    assert ",OOM" in out
    assert ",ok" in out


def test_gen_deterministic(tmp_path, capsys):
    args = ["gen", "--seqlen", "8", "--rank", "2", "--dim", "3", "--seed", "1",
            "--out-b", str(tmp_path / "B.ldt"), "--out-c", str(tmp_path / "C.ldt"),
            "--out-v", str(tmp_path / "V.ldt")]
    assert run_cli(*args) == 0
    first = (tmp_path / "B.ldt").read_bytes()
    assert run_cli(*args) == 0
    assert (tmp_path / "B.ldt").read_bytes() == first
    b = read_tensor(tmp_path / "B.ldt")
    assert b.shape == (1, 1, 8, 2)


def test_gen_rejects_zero_seqlen(tmp_path):
    assert run_cli("gen", "--seqlen", "0") == 2


def _write_ex_a(tmp_path):
    write_tensor(np.array([[2.0], [3.0]]), tmp_path / "B.ldt")
    write_tensor(np.array([[1.0], [4.0]]), tmp_path / "C.ldt")
    write_tensor(np.array([[5.0], [6.0]]), tmp_path / "V.ldt")
    return [str(tmp_path / f"{n}.ldt") for n in "BCV"]


def test_decode_fleet(tmp_path, capsys):
    b, c, v = _write_ex_a(tmp_path)
    out = tmp_path / "O.ldt"
    code = run_cli("decode", "--b", b, "--c", c, "--v", v,
                   "--method", "fleet", "--out", str(out))
    assert code == 0
    np.testing.assert_allclose(read_tensor(out)[0, 0], [[10.0], [87.0]], atol=1e-12)


def test_decode_decayed(tmp_path):
    b, c, v = _write_ex_a(tmp_path)
    out = tmp_path / "O.ldt"
    code = run_cli("decode", "--b", b, "--c", c, "--v", v,
                   "--decay", "--gamma", "0.5", "--method", "row-based",
                   "--out", str(out))
    assert code == 0
    np.testing.assert_allclose(read_tensor(out)[0, 0], [[10.0], [79.5]], atol=1e-12)


def test_decode_auto_resolves_row_based_for_batch_16(tmp_path, capsys):
    rng = np.random.default_rng(70)
    write_tensor(rng.standard_normal((16, 1, 4, 2)), tmp_path / "B.ldt")
    write_tensor(rng.standard_normal((16, 1, 4, 2)), tmp_path / "C.ldt")
    write_tensor(rng.standard_normal((16, 1, 4, 2)), tmp_path / "V.ldt")
    code = run_cli("decode", "--b", str(tmp_path / "B.ldt"),
                   "--c", str(tmp_path / "C.ldt"), "--v", str(tmp_path / "V.ldt"),
                   "--method", "auto", "--out", str(tmp_path / "O.ldt"))
    captured = capsys.readouterr()
    assert code == 0
    assert "resolved: row-based" in captured.err


def test_decode_shape_mismatch_exits_2(tmp_path, capsys):
    write_tensor(np.ones((2, 3)), tmp_path / "B.ldt")
    write_tensor(np.ones((2, 4)), tmp_path / "C.ldt")
    write_tensor(np.ones((2, 2)), tmp_path / "V.ldt")
    code = run_cli("decode", "--b", str(tmp_path / "B.ldt"),
                   "--c", str(tmp_path / "C.ldt"), "--v", str(tmp_path / "V.ldt"))
    assert code == 2
    assert "rank" in capsys.readouterr().err


def test_decode_vanilla_over_cap_exits_3(tmp_path, capsys):
    rng = np.random.default_rng(71)
    for name in "BCV":
        write_tensor(rng.standard_normal((256, 2)), tmp_path / f"{name}.ldt")
    code = run_cli("decode", "--b", str(tmp_path / "B.ldt"),
                   "--c", str(tmp_path / "C.ldt"), "--v", str(tmp_path / "V.ldt"),
                   "--method", "vanilla", "--mem-cap-bytes", "1024",
                   "--out", str(tmp_path / "O.ldt"))
    assert code == 3
    assert "linear method" in capsys.readouterr().err


def test_decode_matches_library_bitwise(tmp_path):
    from linattn import MethodId, make_inputs, run_method

    b, c, v = _write_ex_a(tmp_path)
    out = tmp_path / "O.ldt"
    assert run_cli("decode", "--b", b, "--c", c, "--v", v,
                   "--method", "block-based", "--out", str(out)) == 0
    inp = make_inputs(read_tensor(b), read_tensor(c), read_tensor(v))
    ref, _ = run_method(MethodId.BLOCK_BASED, inp)
    assert read_tensor(out).tobytes() == ref.tobytes()


def test_explain(capsys):
    assert run_cli("explain", "--seqlen", "8192") == 0
    assert "two-level-block" in capsys.readouterr().out
    assert run_cli("explain", "--seqlen", "64") == 0
    assert "vanilla" in capsys.readouterr().out
    assert run_cli("explain", "--batch", "16", "--seqlen", "25600") == 0
    assert "row-based" in capsys.readouterr().out


def test_explain_policy_file(tmp_path, capsys, monkeypatch):
    policy = tmp_path / "policy.txt"
    policy.write_text("*,*,*,*,*,fleet\n")
    monkeypatch.setenv("LINATTN_POLICY", str(policy))
    assert run_cli("explain", "--seqlen", "64") == 0
    assert "fleet" in capsys.readouterr().out


def test_complexity_small_grid(capsys):
    code = run_cli("complexity", "--methods", "row-based,vanilla,recursion",
                   "--seqlen", "256,512,1024,2048", "--rank", "4", "--dim", "4")
    out = capsys.readouterr().out
    assert code == 0
    assert "row-based" in out and "best N " in out
    assert "vanilla" in out and "N^2" in out
    assert "recursion" in out and "NlogN" in out


def test_complexity_fleet(capsys):
    assert run_cli("complexity", "--method", "fleet",
                   "--seqlen", "256,512,1024,2048", "--rank", "4", "--dim", "4") == 0
