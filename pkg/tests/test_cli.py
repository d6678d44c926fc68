import json

from ministep.cli import main
from ministep.trace import load_json


def write(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return str(path)


def test_step_text_format(tmp_path, capsys):
    src = write(tmp_path, "fac.ml", "let f x = (x * 2) - 1 ;; f 4 + 10 * 100\n")
    assert main(["step", src]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "(* Step 0 *) f 4 + (10 * 100)[@stepper.redex]"
    assert "(* Application 1 start *)" in out


def test_step_json_to_file(tmp_path, capsys):
    src = write(tmp_path, "a.ml", "(1 + 2 * 3) + 4\n")
    out_path = tmp_path / "trace.json"
    assert main(["step", "--format", "json", "--output", str(out_path), src]) == 0
    t = load_json(out_path.read_bytes())
    assert len(t.steps) == 3
    assert t.result_kind == "value"
    assert t.result_text == "11"


def test_step_uncaught_exception_exits_zero(tmp_path, capsys):
    src = write(tmp_path, "raise_top.ml", "3 + (raise 4) - 5\n")
    assert main(["step", src]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1] == "(* Step 1 *) (raise 4)[@stepper.reduct]"


def test_step_limit_exit_code(tmp_path, capsys):
    src = write(tmp_path, "loop.ml", "let rec loop x = loop x ;; loop 0\n")
    assert main(["step", "--max-steps", "5", src]) == 3
    out = capsys.readouterr().out
    assert out.count("(* Step") == 10  # 5 steps, two lines each


def test_step_parse_error_exit_one(tmp_path, capsys):
    src = write(tmp_path, "bad.ml", "let = 3\n")
    assert main(["step", src]) == 1
    assert capsys.readouterr().err != ""


def test_step_stuck_exit_two(tmp_path, capsys):
    src = write(tmp_path, "stuck.ml", "1 2\n")
    assert main(["step", src]) == 2
    assert "not a function" in capsys.readouterr().err


def test_env_var_sets_default_max_steps(tmp_path, capsys, monkeypatch):
    src = write(tmp_path, "loop.ml", "let rec loop x = loop x ;; loop 0\n")
    monkeypatch.setenv("MINISTEP_MAX_STEPS", "7")
    assert main(["step", src]) == 3
    assert capsys.readouterr().out.count("(* Step") == 14
    # an explicit flag wins over the environment
    assert main(["step", "--max-steps", "2", src]) == 3
    assert capsys.readouterr().out.count("(* Step") == 4


def test_run_prints_result(tmp_path, capsys):
    src = write(
        tmp_path,
        "fac.ml",
        "let rec fac n = if n = 0 then 1 else n * fac (n - 1) ;; fac 4\n",
    )
    assert main(["run", src]) == 0
    assert capsys.readouterr().out == "- : int = 24\n"


def test_run_echoes_output_then_unit(tmp_path, capsys):
    src = write(tmp_path, "hello.ml", 'print_string "hello"\n')
    assert main(["run", src]) == 0
    assert capsys.readouterr().out == "hello- : unit = ()\n"


def test_run_stuck(tmp_path, capsys):
    src = write(tmp_path, "stuck.ml", "1 2\n")
    assert main(["run", src]) == 2
    assert "not a function" in capsys.readouterr().err


def test_run_uncaught(tmp_path, capsys):
    src = write(tmp_path, "r.ml", "2 + 3 + (raise 4) + 5\n")
    assert main(["run", src]) == 0
    assert capsys.readouterr().out == "Exception: 4\n"


def test_check_source_ok(tmp_path, capsys):
    src = write(tmp_path, "ok.ml", "print_int (1 + 1)\n")
    assert main(["check", src]) == 0
    assert "ok:" in capsys.readouterr().out


def test_check_valid_trace_file(tmp_path, capsys):
    src = write(tmp_path, "a.ml", "try (2 + 3 * (raise 4) + 5) with x -> x\n")
    trace_path = tmp_path / "a.json"
    assert main(["step", "--format", "json", "--output", str(trace_path), src]) == 0
    assert main(["check", str(trace_path)]) == 0


def test_check_corrupted_trace_reports_chain_break(tmp_path, capsys):
    src = write(tmp_path, "a.ml", "(1 + 2 * 3) + 4\n")
    trace_path = tmp_path / "a.json"
    assert main(["step", "--format", "json", "--output", str(trace_path), src]) == 0
    doc = json.loads(trace_path.read_text())
    doc["steps"][1]["pre"] = {"text": "2 + 6 + 4", "span": [0, 5]}
    trace_path.write_text(json.dumps(doc))
    assert main(["check", str(trace_path)]) == 1
    assert "ChainBreak" in capsys.readouterr().err


def test_check_detects_output_tampering(tmp_path, capsys):
    src = write(tmp_path, "p.ml", 'print_string "a"\n')
    trace_path = tmp_path / "p.json"
    assert main(["step", "--format", "json", "--output", str(trace_path), src]) == 0
    doc = json.loads(trace_path.read_text())
    doc["steps"][0]["output"] = "b"
    trace_path.write_text(json.dumps(doc))
    assert main(["check", str(trace_path)]) == 1
    assert "output mismatch" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["step", str(tmp_path / "nope.ml")]) == 1
    assert main(["run", str(tmp_path / "nope.ml")]) == 1
    assert main(["check", str(tmp_path / "nope.ml")]) == 1


def test_output_files_use_lf(tmp_path):
    src = write(tmp_path, "a.ml", "1 + 1\n")
    out_path = tmp_path / "t.txt"
    assert main(["step", "--output", str(out_path), src]) == 0
    data = out_path.read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")
