import io
import os
from contextlib import redirect_stdout

import pytest

from phylonet import cli
from phylonet.newick import write_network, write_tree


def run_cli(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.run(args)
    return code, buf.getvalue()


@pytest.fixture
def files(tmp_path, fig1, fig6):
    t1, t2 = fig1
    n6, t6 = fig6
    trees = tmp_path / "fig1.nwk"
    trees.write_text(write_tree(t1) + "\n" + write_tree(t2) + "\n")
    netf = tmp_path / "fig6N.txt"
    netf.write_text(write_network(n6))
    treef = tmp_path / "fig6T.nwk"
    treef.write_text(write_tree(t6) + "\n")
    return str(trees), str(netf), str(treef)


def test_utc_no(files):
    trees, netf, treef = files
    code, out = run_cli(["utc", "--network", netf, "--tree", treef])
    assert code == 1 and out == "NO\n"


def test_uhn_yes(files):
    trees, netf, treef = files
    code, out = run_cli(["uhn", "--trees", trees])
    assert code == 0
    assert out.startswith("h_u = 1\n")
    assert "image " in out


def test_ruhn_yes(files):
    trees, netf, treef = files
    code, out = run_cli(["ruhn", "--trees", trees, "--kmax", "3"])
    assert code == 0
    assert out.startswith("h_ru = 2\n")
    assert "root t0 " in out and "network " in out


def test_ruhn_exceeds_kmax(files):
    trees, netf, treef = files
    code, out = run_cli(["ruhn", "--trees", trees, "--kmax", "1"])
    assert code == 1 and out.startswith("NO")


def test_usage_errors(tmp_path):
    assert run_cli(["bogus"])[0] == 2
    assert run_cli([])[0] == 2
    bad = tmp_path / "bad.nwk"
    bad.write_text("((a,b);\n")
    assert run_cli(["uhn", "--trees", str(bad)])[0] == 2
    assert run_cli(["utc", "--network", "/nonexistent", "--tree",
                    str(bad)])[0] == 2


def test_guard_exit_code(files):
    trees, netf, treef = files
    os.environ["PHYLONET_GUARD_ORACLE_EDGES"] = "5"
    try:
        code, out = run_cli(["oracle", "--network", netf, "--tree",
                             treef])
    finally:
        del os.environ["PHYLONET_GUARD_ORACLE_EDGES"]
    assert code == 3


def test_gen_ndp_is_seeded():
    a = run_cli(["gen-ndp", "--seed", "7"])
    b = run_cli(["gen-ndp", "--seed", "7"])
    c = run_cli(["gen-ndp", "--seed", "8"])
    assert a == b
    assert a != c
    assert a[1].startswith("graph ")


def test_gen_lemma4(files):
    trees_rooted = files[0].replace("fig1.nwk", "rooted.nwk")
    with open(trees_rooted, "w") as f:
        f.write("((a,b),c);\n((a,c),b);\n")
    code, out = run_cli(["gen-lemma4", "--trees", trees_rooted])
    assert code == 0
    assert out.count(";") == 2 and "c0" in out and "d0" in out


def test_export_dot(files):
    trees, netf, treef = files
    code, out = run_cli(["export-dot", "--network", netf])
    assert code == 0 and out.startswith("graph")


def test_threads_flag_does_not_change_output(files):
    trees, netf, treef = files
    a = run_cli(["uhn", "--trees", trees, "--threads", "1"])
    b = run_cli(["uhn", "--trees", trees, "--threads", "8"])
    assert a == b
