import csv
import io
import json
import math
from contextlib import redirect_stdout

import pytest

import andor_mpe as am
from andor_mpe.cli import (CSV_COLUMNS, EXIT_INPUT_ERROR, EXIT_SOLVED,
                           EXIT_TIMEOUT, RunRecord, main, run_instance)

from helpers import TWO_VAR_UAI, close


@pytest.fixture
def two_var_files(tmp_path):
    uai = tmp_path / "net.uai"
    uai.write_text(TWO_VAR_UAI)
    evid = tmp_path / "net.uai.evid"
    evid.write_text("1 1 1\n")
    return uai, evid


def solve_stdout(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_run_instance_two_vars():
    net = am.parse_uai(TWO_VAR_UAI)
    record, assignment = run_instance(net, {}, algorithm="aobf", ibound=2)
    assert record.status == "solved"
    assert close(record.mpe_log10, math.log10(0.54))
    assert close(record.mpe_prob, 0.54, tol=1e-12)
    assert assignment == {0: 1, 1: 1}


def test_run_instance_reports_evidence_adjusted_probability():
    net = am.parse_uai(TWO_VAR_UAI)
    record, assignment = run_instance(net, {1: 1})
    # max_A P(A, B=1) = 0.6 * 0.9
    assert close(record.mpe_prob, 0.54, tol=1e-12)
    assert assignment == {0: 1, 1: 1}
    assert record.e == 1 and record.n == 2


def test_run_instance_all_evidence():
    net = am.parse_uai(TWO_VAR_UAI)
    record, assignment = run_instance(net, {0: 0, 1: 0})
    assert record.status == "solved"
    assert close(record.mpe_prob, 0.4 * 0.8, tol=1e-12)
    assert assignment == {0: 0, 1: 0}


def test_run_instance_algorithms_agree():
    net = am.gen_random(10, 2, 8, 2, seed=5)
    probs = []
    for algorithm in ("aobf", "aobb", "brute", "be"):
        record, _ = run_instance(net, {}, algorithm=algorithm, ibound=3)
        assert record.status == "solved"
        probs.append(record.mpe_log10)
    assert max(probs) - min(probs) <= 1e-9


def test_run_instance_timeout_status():
    net = am.gen_random(10, 2, 8, 2, seed=5)
    record, assignment = run_instance(net, {}, time_limit=0.0)
    assert record.status == "timeout"
    assert record.mpe_log10 is None and assignment is None


def test_run_instance_memout_status():
    net = am.gen_random(16, 2, 14, 2, seed=5)
    record, _ = run_instance(net, {}, heuristic="smb", ibound=8,
                             memory_limit_mb=1e-5)
    assert record.status == "memout"


def test_csv_row_formatting():
    rec = RunRecord(instance="x", n=3, e=0, w_star=2, h=2, algorithm="aobf",
                    heuristic="smb", ibound=4, seed=0, status="solved",
                    mpe_log10=-math.inf, mpe_prob=0.0, nodes=7, cache_hits=1,
                    cache_entries=5, time_s=0.25)
    row = rec.row()
    assert len(row) == len(CSV_COLUMNS)
    assert row[CSV_COLUMNS.index("mpe_log10")] == "-inf"
    assert row[CSV_COLUMNS.index("mpe_prob")] == "0"
    assert rec.row(redact_time=True)[CSV_COLUMNS.index("time_s")] == "-"


def test_solve_command_csv_output(two_var_files):
    uai, _ = two_var_files
    code, out = solve_stdout(["solve", "--input", str(uai), "--csv-header",
                              "--redact-time"])
    assert code == EXIT_SOLVED
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == CSV_COLUMNS
    rec = dict(zip(CSV_COLUMNS, rows[1]))
    assert rec["status"] == "solved"
    assert close(float(rec["mpe_prob"]), 0.54, tol=1e-10)
    assert rec["time_s"] == "-"


def test_solve_command_with_evidence(two_var_files):
    uai, evid = two_var_files
    code, out = solve_stdout(["solve", "--input", str(uai),
                              "--evidence", str(evid)])
    assert code == EXIT_SOLVED
    rec = dict(zip(CSV_COLUMNS, next(csv.reader(io.StringIO(out)))))
    assert rec["e"] == "1"
    assert close(float(rec["mpe_prob"]), 0.54, tol=1e-10)


def test_solve_command_missing_file_exit_code(tmp_path, capsys):
    code = main(["solve", "--input", str(tmp_path / "nope.uai")])
    assert code == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_solve_command_timeout_exit_code(two_var_files):
    uai, _ = two_var_files
    code, _ = solve_stdout(["solve", "--input", str(uai),
                            "--time-limit", "0"])
    assert code == EXIT_TIMEOUT


def test_solve_command_print_assignment(two_var_files, capsys):
    uai, _ = two_var_files
    code = main(["solve", "--input", str(uai), "--print-assignment"])
    assert code == EXIT_SOLVED
    err = capsys.readouterr().err
    assert "0=1" in err and "1=1" in err


def test_generate_writes_instance_and_sidecars(tmp_path):
    out = tmp_path / "inst"
    code = main(["generate", "--family", "grid", "--out", str(out),
                 "--n", "3", "--det-fraction", "0.5", "--num-evidence", "2",
                 "--seed", "9"])
    assert code == EXIT_SOLVED
    net = am.parse_uai((tmp_path / "inst.uai").read_text())
    assert len(net.variables) == 9
    evid = am.parse_evidence((tmp_path / "inst.uai.evid").read_text())
    assert len(evid) == 2
    spec = json.loads((tmp_path / "inst.json").read_text())
    assert spec == {"family": "grid",
                    "params": {"n": 3, "det_fraction": 0.5, "num_evidence": 2},
                    "seed": 9}


def test_generate_rejects_bad_params(tmp_path, capsys):
    code = main(["generate", "--family", "random", "--out",
                 str(tmp_path / "x"), "--n", "5", "--c", "4", "--p", "2"])
    assert code == EXIT_INPUT_ERROR


def test_generate_then_solve_round_trip(tmp_path):
    out = tmp_path / "r"
    main(["generate", "--family", "random", "--out", str(out),
          "--n", "8", "--d", "2", "--c", "6", "--p", "2", "--seed", "3"])
    code, text = solve_stdout(["solve", "--input", str(out) + ".uai",
                               "--algorithm", "aobb"])
    assert code == EXIT_SOLVED
    rec = dict(zip(CSV_COLUMNS, next(csv.reader(io.StringIO(text)))))
    reparsed = am.parse_uai((tmp_path / "r.uai").read_text())
    exact = am.enumerate_mpe(reparsed).mpe_log
    assert close(float(rec["mpe_log10"]) * math.log(10), exact, tol=1e-6)


def _make_manifest(tmp_path, n_instances=2):
    instances = []
    for k in range(n_instances):
        prefix = tmp_path / f"b{k}"
        main(["generate", "--family", "random", "--out", str(prefix),
              "--n", "7", "--d", "2", "--c", "5", "--p", "2",
              "--seed", str(40 + k)])
        instances.append({"id": f"b{k}", "uai": str(prefix) + ".uai"})
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "instances": instances,
        "algorithms": ["aobf", "aobb"],
        "ibounds": [2, 3],
        "heuristic": "smb",
        "seed": 0,
    }))
    return manifest


def test_bench_runs_sweep_and_averages(tmp_path):
    manifest = _make_manifest(tmp_path)
    out_csv = tmp_path / "out.csv"
    plot = tmp_path / "plot.dat"
    code = main(["bench", "--manifest", str(manifest), "--out", str(out_csv),
                 "--plot-data", str(plot), "--redact-time"])
    assert code == EXIT_SOLVED
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == CSV_COLUMNS
    body = rows[1:]
    plain = [r for r in body if not r[0].startswith("AVERAGE")]
    avg = [r for r in body if r[0].startswith("AVERAGE")]
    assert len(plain) == 2 * 2 * 2  # instances x algorithms x ibounds
    assert len(avg) == 4
    # every solved cell agrees with enumeration
    for r in plain:
        rec = dict(zip(CSV_COLUMNS, r))
        assert rec["status"] == "solved"
        k = int(rec["instance"][1:])
        reparsed = am.parse_uai((tmp_path / f"b{k}.uai").read_text())
        exact = am.enumerate_mpe(reparsed).mpe_log
        assert abs(float(rec["mpe_log10"]) * math.log(10) - exact) <= 1e-9
    plot_lines = plot.read_text().splitlines()
    assert plot_lines[0].startswith("# i ")
    assert len(plot_lines) == 3  # header + one line per i-bound


def test_bench_deterministic_with_redacted_time(tmp_path):
    manifest = _make_manifest(tmp_path, n_instances=1)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["bench", "--manifest", str(manifest), "--out", str(a),
          "--redact-time"])
    main(["bench", "--manifest", str(manifest), "--out", str(b),
          "--redact-time"])
    assert a.read_bytes() == b.read_bytes()


def test_bench_parallel_matches_serial(tmp_path):
    manifest = _make_manifest(tmp_path, n_instances=2)
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    main(["bench", "--manifest", str(manifest), "--out", str(serial),
          "--redact-time"])
    main(["bench", "--manifest", str(manifest), "--out", str(parallel),
          "--redact-time", "--workers", "2"])
    assert serial.read_bytes() == parallel.read_bytes()


def test_bench_missing_manifest(tmp_path, capsys):
    code = main(["bench", "--manifest", str(tmp_path / "missing.json")])
    assert code == EXIT_INPUT_ERROR
