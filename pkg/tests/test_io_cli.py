import gzip
import json
import subprocess
import sys

import pytest

from privebc.cli import main
from privebc.graph import generate_graph
from privebc.io import ParseError, labeled_edges, load_edge_list, write_edge_list, write_mapping


@pytest.fixture
def star_file(tmp_path):
    p = tmp_path / "star.txt"
    p.write_text("% star\n0 1\n0 2\n0 3\n")
    return p


def test_konect_with_comments_and_weights(tmp_path):
    p = tmp_path / "out.pgp"
    p.write_text("% sym unweighted\n% 3 3 3\n10 20 1 1234\n20 30 1 99\n\n10 30\n")
    g = load_edge_list(p, "konect")
    assert g.labels == ("10", "20", "30")
    assert g.graph.edges == {(0, 1), (1, 2), (0, 2)}


def test_snap_comments(tmp_path):
    p = tmp_path / "email.txt"
    p.write_text("# Directed graph\n# FromNodeId\tToNodeId\n1\t2\n2\t1\n")
    g = load_edge_list(p, "snap")
    assert g.graph.num_edges == 1 and g.duplicates == 1


def test_self_loops_and_duplicates_counted(tmp_path, caplog):
    p = tmp_path / "g.txt"
    p.write_text("a b\nb a\nc c\na b\nb c\n")
    g = load_edge_list(p)
    assert (g.self_loops, g.duplicates, g.graph.num_edges) == (1, 2, 2)
    assert "dropped 1 self-loops and 2 duplicate" in caplog.text


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 2\n3\n")
    with pytest.raises(ParseError, match=":2:"):
        load_edge_list(p)
    (tmp_path / "empty.txt").write_text("% nothing\n")
    with pytest.raises(ParseError):
        load_edge_list(tmp_path / "empty.txt")


def test_missing_file_hint(tmp_path):
    with pytest.raises(FileNotFoundError, match="konect.cc"):
        load_edge_list(tmp_path / "nope", "konect")


def test_gzip_and_round_trip(tmp_path):
    g = generate_graph("erdos-renyi", 40, p=0.2, seed=6)
    labels = [f"n{i * 7}" for i in range(40)]
    plain = tmp_path / "g.txt"
    write_edge_list(g, plain, labels)
    first = load_edge_list(plain)
    gz = tmp_path / "g.txt.gz"
    with gzip.open(gz, "wt") as fh:
        fh.write(plain.read_text())
    again = tmp_path / "again.txt"
    write_edge_list(first.graph, again, first.labels)
    assert labeled_edges(first) == labeled_edges(load_edge_list(gz)) == labeled_edges(load_edge_list(again))
    write_mapping(first.labels, tmp_path / "map.txt")
    assert (tmp_path / "map.txt").read_text().splitlines()[0] == f"{first.labels[0]} 0"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_exact(capsys, caplog, star_file):
    caplog.set_level("INFO", logger="privebc")
    code, out, _ = run_cli(capsys, "exact", "--edges", str(star_file), "--ego", "0")
    assert code == 0 and out == "3.0\n"
    assert '"command": "exact"' in caplog.text


def test_cli_bound(capsys):
    code, out, _ = run_cli(capsys, "-q", "bound", "--gamma", "3", "--alpha", "0.5")
    assert code == 0 and abs(float(out) - 2.079) <= 1e-3
    code, out, _ = run_cli(capsys, "-q", "bound", "--epsilon", "5", "--ego-size", "4",
                           "--universe", "10", "--t", "128")
    assert float(out) == pytest.approx(0.9999999999041779, abs=1e-15)


def test_cli_exit_codes(capsys, tmp_path, star_file):
    assert run_cli(capsys, "exact", "--edges", str(tmp_path / "missing"), "--ego", "0")[0] == 2
    assert run_cli(capsys, "exact", "--edges", str(star_file), "--ego", "zz")[0] == 2
    assert run_cli(capsys, "private", "--edges", str(star_file), "--ego", "0", "--epsilon", "-1")[0] == 2
    assert run_cli(capsys, "frobnicate")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n")
    assert run_cli(capsys, "exact", "--edges", str(bad), "--ego", "1")[0] == 1
    assert run_cli(capsys, "bound", "--gamma", "0.5", "--alpha", "0.5")[0] == 1


def test_cli_private_repeatable(capsys, tmp_path):
    args = ["-q", "private", "--gen", "barabasi-albert", "--n", "200", "--m", "2", "--ego", "5",
            "--parties", "3", "--epsilon", "2", "--seed", "7"]
    code, first, _ = run_cli(capsys, *args, "--transcript", str(tmp_path / "t1"))
    assert code == 0
    assert run_cli(capsys, *args, "--transcript", str(tmp_path / "t2"))[1] == first
    assert (tmp_path / "t1").read_bytes() == (tmp_path / "t2").read_bytes()
    assert "private_ebc" in first and first.count("epsilon_spent 2.0") == 3


def test_cli_config_file(capsys, tmp_path, star_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"edges": str(star_file), "ego": "0", "noiseless": True,
                               "parties": [2], "epsilon": [1.0]}))
    code, out, _ = run_cli(capsys, "--config", str(cfg), "-q", "private")
    assert code == 0 and out.startswith("private_ebc 3.0\n")
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run_cli(capsys, "--config", str(cfg), "exact")[0] == 2


def test_cli_gen_and_sweep(capsys, tmp_path):
    g = tmp_path / "g.txt"
    assert run_cli(capsys, "-q", "gen", "--model", "erdos-renyi", "--n", "60", "--p", "0.1",
                   "--seed", "2", "--out", str(g))[0] == 0
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["-q", "sweep", "--edges", str(g), "--epsilon", "1,3", "--parties", "2",
            "--egos", "4", "--seed", "5"]
    assert run_cli(capsys, *base, "--out", str(out1))[0] == 0
    assert run_cli(capsys, *base, "--out", str(out2), "--workers", "2")[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 9


def test_console_script_entry_point(star_file):
    res = subprocess.run([sys.executable, "-m", "privebc.cli", "-q", "exact", "--edges",
                          str(star_file), "--ego", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "3.0\n"
