import pytest

from ctd.app.cli import main
from ctd.app.bundle import load_factors


@pytest.fixture
def edges(tmp_path):
    path = tmp_path / "edges.txt"
    lines = ["% src dst weight time"]
    for t in range(12):
        for s in range(4):
            lines.append(f"h{s} h{(s + t) % 5} {1 + (s * t) % 3} {100 + t}")
    path.write_text("\n".join(lines) + "\n")
    return path


def test_static_and_eval(edges, tmp_path, capsys):
    out = tmp_path / "bundle"
    assert main(["static", "--input", str(edges), "--samples", "20", "--out", str(out)]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header.split("\t")[0] == "mode" and len(row.split("\t")) == 8
    assert load_factors(out).mode == 0
    assert main(["eval", "--factors", str(out), "--input", str(edges)]) == 0
    assert capsys.readouterr().out.startswith("error\tmemory_usage\tkept_fibers\n")


def test_stream_output(edges, capsys):
    assert main(["stream", "--input", str(edges), "--samples", "30", "--d", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "step\terror\tseconds\tmemory_usage\tkept_fibers"
    assert len(lines) == 1 + 3 + 1  # 12 bins, 9 historical


def test_exit_codes(edges, tmp_path, capsys):
    assert main(["static", "--input", str(edges), "--mode", "4"]) == 4
    assert main(["static", "--input", str(edges), "--samples", "0"]) == 2
    assert main(["static", "--input", str(tmp_path / "missing.txt")]) == 9
    bad = tmp_path / "bad.txt"
    bad.write_text("a b 1\n")
    assert main(["static", "--input", str(bad)]) == 3
    assert main(["eval", "--factors", str(tmp_path), "--input", str(edges)]) == 6
    assert main(["stream", "--input", str(edges), "--split", "1.5"]) == 2
    err = capsys.readouterr().err
    assert "ParseError" in err and "BundleError" in err


def test_ddos_command(capsys):
    assert main(["ddos", "--attacks", "1", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "attacks\trecall\tprecision\tf1" in out
