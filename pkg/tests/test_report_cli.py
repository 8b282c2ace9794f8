import json
from fractions import Fraction

import pytest

from dkspectra.cli import CEILING_ENV, UsageError, main, parse_config
from dkspectra.graphs import named_family
from dkspectra.report import (
    CSV_HEADER,
    Report,
    RunConfig,
    build_report,
    check_clt,
    check_decomposition,
    check_identity38,
    check_lln,
    check_zdecay,
    render,
    run_convergence,
)


def cfg(tag="K:2", **kw):
    t, p = tag.split(":")
    return RunConfig(graph=named_family(t, int(p)), graph_source=tag, **kw)


def test_parse_config_valid():
    c = parse_config("--family K:2 --k 2 --mmax 4 --N 4,8,16".split())
    assert (c.k, c.m_max, c.N_schedule, c.engine, c.output) == (2, 4, (4, 8, 16), "tensor", "json")
    assert c.graph.vertex_count == 2


def test_parse_defaults():
    c = parse_config(["--family", "C:5", "--k", "1"])
    assert c.m_max == 6 and c.N_schedule == (4, 8, 16, 32, 64)
    assert c.engine == "tensor" and c.output == "json" and c.checks == ()


def test_brute_over_ceiling_parses_then_fails_at_run(capsys):
    argv = "--family K:2 --k 2 --N 16 --engine brute --explicit-ceiling 4096".split()
    c = parse_config(argv)
    assert c.engine == "brute"
    assert main(argv) == 3
    assert "N=16" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv, flag",
    [
        ("--family Q:3 --k 1", "--family"),
        ("--family K:2 --graph x.txt --k 1", "--graph"),
        ("--family K:2 --k 1 --N 4,x", "--N"),
        ("--family K:2 --k 1 --N 8,4", "--N"),
        ("--family K:2 --k 0", "--k"),
        ("--family K:2 --k 1 --mmax 0", "--mmax"),
        ("--family K:2 --k 1 --hist 3:1", "--hist"),
        ("--family K:2 --k 1 --check nope", "--check"),
        ("--family K:2 --k 1 --explicit-ceiling 0", "--explicit-ceiling"),
    ],
)
def test_usage_errors_name_the_flag(argv, flag, capsys):
    with pytest.raises(UsageError) as exc:
        parse_config(argv.split())
    assert exc.value.flag == flag
    assert main(argv.split()) == 2
    assert flag in capsys.readouterr().err


def test_argparse_errors_exit_2(capsys):
    assert main(["--family", "K:2"]) == 2
    assert "--k" in capsys.readouterr().err
    assert main(["--family", "K:2", "--k", "1", "--engine", "gpu"]) == 2
    assert "--engine" in capsys.readouterr().err


def test_graph_file(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text("0 1\n1 2\n0 2\n")
    c = parse_config(["--graph", str(p), "--k", "1"])
    assert c.graph.edge_count == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2 3\n")
    with pytest.raises(UsageError, match="--graph"):
        parse_config(["--graph", str(bad), "--k", "1"])
    with pytest.raises(UsageError, match="--graph"):
        parse_config(["--graph", str(tmp_path / "missing"), "--k", "1"])


def test_ceiling_from_environment(monkeypatch):
    monkeypatch.setenv(CEILING_ENV, "64")
    assert parse_config(["--family", "K:2", "--k", "1"]).explicit_ceiling == 64
    assert parse_config(["--family", "K:2", "--k", "1", "--explicit-ceiling", "8"]).explicit_ceiling == 8
    monkeypatch.setenv(CEILING_ENV, "lots")
    with pytest.raises(UsageError):
        parse_config(["--family", "K:2", "--k", "1"])


def test_k2_rows_closed_form():
    rep = run_convergence(cfg(k=2, m_max=3))
    for r in rep.rows:
        N = r["N"]
        if r["m"] == 2:
            assert Fraction(r["raw_exact"]) / N**2 == Fraction(N - 1, 2 * N)
            assert r["limit_exact"] == "1/2"
            assert r["gap"] == pytest.approx(1 / (2 * N), rel=1e-15)
        if r["m"] == 1:
            assert (r["normalized"], r["limit"], r["gap"]) == (0, 0, 0)
    assert [(r["N"], r["m"]) for r in rep.rows] == sorted((r["N"], r["m"]) for r in rep.rows)


def test_odd_km_limit_is_zero():
    rep = run_convergence(cfg("C:5", k=3, m_max=5, N_schedule=(4, 8)))
    assert all(r["limit_exact"] == "0" for r in rep.rows if r["m"] % 2)


def test_both_engines_certify():
    rep = run_convergence(cfg("P:3", k=2, m_max=4, N_schedule=(1, 2, 3), engine="both"))
    assert all(r["certified"] for r in rep.rows)


def test_partition_table():
    rep = run_convergence(cfg("P:3", k=2, m_max=2, N_schedule=(4,)))
    labels = {(p["partition"], p["elementary"]) for p in rep.partitions}
    assert labels == {("1+1", True), ("2", False)}
    assert not run_convergence(cfg(k=1, m_max=2, N_schedule=(4,))).partitions


def test_check_decomposition_example():
    out = check_decomposition(cfg("P:3", k=2, N_schedule=(2,)))
    assert out["passed"] and out["details"]["first_failure"] is None


def test_check_identity38():
    assert check_identity38(cfg("K:3", k=2, N_schedule=(3,)))["passed"]


def test_check_clt_example():
    out = check_clt(cfg("K:3", k=1, m_max=4, N_schedule=(16, 256, 1024)))
    assert out["passed"]
    fourth = out["details"]["orders"][3]
    assert fourth["gaps"][-1] == pytest.approx(3 / 2048, rel=1e-14)


def test_check_zdecay_example():
    out = check_zdecay(cfg("K:3", k=1, N_schedule=(4, 16, 64)))
    assert out["passed"]
    assert out["details"]["terms"][0]["values"] == ["1/8", "1/32", "1/128"]


def test_check_lln(graph):
    c = RunConfig(graph=graph, graph_source="corpus", k=1, N_schedule=(4, 8, 16, 32, 64))
    assert check_lln(c)["passed"]


def test_csv_example_row():
    text = render(run_convergence(cfg(k=2, m_max=2, N_schedule=(4,))), "csv")
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[2] == "4,2,6,0.375,1/2,0.5,0.125"


def test_empty_report():
    rep = Report(metadata={})
    assert render(rep, "csv") == ",".join(CSV_HEADER) + "\n"
    assert json.loads(render(rep, "json"))["rows"] == []


def test_json_key_order():
    doc = json.loads(render(build_report(cfg(k=1, m_max=2, N_schedule=(4,))), "json"))
    assert list(doc) == ["metadata", "rows", "partitions", "histograms", "checks", "passed"]
    assert doc["metadata"]["c"] == "1"


def test_reruns_are_byte_identical(capsys):
    argv = "--family C:5 --k 2 --mmax 4 --N 2,4,8 --check all --hist 8:-3:3".split()
    for out in ("json", "csv"):
        main(argv + ["--out", out])
        first = capsys.readouterr().out
        main(argv + ["--out", out])
        assert capsys.readouterr().out == first


def test_hist_block():
    rep = run_convergence(cfg("K:2", k=2, m_max=2, N_schedule=(3, 20), hist=(2, -1.0, 1.0)))
    spectra = [h for h in rep.histograms if h["kind"] == "spectrum"]
    assert [h["N"] for h in spectra] == [3]
    assert spectra[0]["counts"] == [6, 2]
    sample = rep.histograms[-1]
    assert sample["kind"] == "limit_sample" and sample["heuristic"] is True
    assert sum(sample["counts"]) + sample["underflow"] + sample["overflow"] == sample["total"]


def test_exit_codes(capsys):
    assert main("--family K:3 --k 1 --mmax 4 --N 16,256,1024 --check clt --check zdecay".split()) == 0
    assert "check clt: PASS" in capsys.readouterr().err
    # 3^64 is far above the explicit ceiling, so the check cannot run and fails.
    assert main("--family K:3 --k 2 --N 64 --check decomposition".split()) == 1
