import io
import json

import pytest

from anet.cli import EXIT_NOT_CONJUGATE, EXIT_OK, EXIT_PRECONDITION, EXIT_SIZE_GUARD, main, run
from anet.core import Digraph, FunctionTable, dumps


def call(*argv):
    out = io.StringIO()
    result = run(list(argv), out=out)
    return result, out.getvalue()


@pytest.fixture
def universal(tmp_path):
    path = tmp_path / "f.json"
    result, _ = call("construct", "threshold-universal", "--n", "2", "--factors", "3,3", "-o", str(path))
    assert result.exit_code == EXIT_OK
    return path


def write(path, data):
    path.write_text(dumps(data))
    return str(path)


def test_construct_and_check(universal):
    result, text = call("check", str(universal))
    assert result.exit_code == EXIT_OK
    assert json.loads(text)["universal"] is True


def test_check_identity(tmp_path):
    path = write(tmp_path / "id.json", FunctionTable.identity(2, 2).to_json())
    _, text = call("check", path)
    data = json.loads(text)
    assert data == {
        "two_nilpotent": False,
        "preimage_property": False,
        "lnn_factorization": None,
        "universal": False,
        "reason": "not 2-nilpotent",
    }


def test_certify_all(universal, tmp_path):
    cert = tmp_path / "cert.json"
    result, _ = call("certify", str(universal), "--coverage", "all", "-o", str(cert))
    data = json.loads(cert.read_text())
    assert result.exit_code == EXIT_OK
    assert data["verified"] == 15 and data["valid"]


def test_certify_sample_threads_do_not_change_output(universal):
    _, a = call("certify", str(universal), "--coverage", "sample:6", "--seed", "2", "--threads", "1")
    _, b = call("--threads", "3", "certify", str(universal), "--coverage", "sample:6", "--seed", "2")
    assert a == b
    assert json.loads(a)["coverage"] == {"sample": 6, "seed": 2}


def test_output_round_trips(universal):
    text = universal.read_text()
    f = FunctionTable.from_json(json.loads(text))
    data = json.loads(text)
    data.update(f.to_json())
    assert dumps(data) == text


def test_witness_and_iso(universal, tmp_path):
    g = write(tmp_path / "g.json", Digraph.cycle(2).to_json())
    h = tmp_path / "h.json"
    dot = tmp_path / "h.dot"
    result, _ = call("witness", str(universal), "--graph", g, "-o", str(h), "--dot", str(dot))
    assert result.exit_code == EXIT_OK
    assert "1 -> 2;" in dot.read_text()
    assert call("iso", str(universal), str(h))[0].exit_code == EXIT_OK
    other = write(tmp_path / "c.json", FunctionTable.constant(2, 9).to_json())
    assert call("iso", str(universal), other)[0].exit_code == EXIT_NOT_CONJUGATE


def test_iso_dimension_mismatch(tmp_path, universal):
    other = write(tmp_path / "o.json", FunctionTable.identity(2, 2).to_json())
    assert call("iso", str(universal), other)[0].exit_code == EXIT_PRECONDITION


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "hamiltonian", "--n", "3", "--q", "3"],
        ["construct", "dperm", "--n", "2", "--q", "8", "--d", "2"],
        ["construct", "augmentation", "--n", "3"],
        ["construct", "induced", "--k", "2"],
    ],
)
def test_construct_family_bases(argv):
    result, text = call(*argv)
    assert result.exit_code == EXIT_OK
    data = json.loads(text)
    assert data["role"] == "base" and data["kind"] == argv[1]


@pytest.mark.parametrize(
    "kind,extra",
    [
        ("hamiltonian", ["--n", "3", "--q", "4"]),
        ("dperm", ["--n", "3", "--q", "9", "--d", "3"]),
        ("twoperm", []),
        ("nilpotent", ["--q", "3"]),
        ("regular-universal", ["--q", "64", "--factors", "2,2,2"]),
    ],
)
def test_construct_with_graph(tmp_path, kind, extra):
    from anet.core import interaction_graph

    g = Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (0, 0)])
    path = write(tmp_path / "g.json", g.to_json())
    result, text = call("construct", kind, "--graph", path, *extra)
    assert result.exit_code == EXIT_OK, result.message
    assert interaction_graph(FunctionTable.from_json(json.loads(text))) == g


def test_full_dynamics_dot(tmp_path):
    dot = tmp_path / "f.dot"
    call("construct", "augmentation", "--n", "2", "--dot", str(dot), "--full-dynamics")
    assert dot.read_text().count("->") == 4
    result, _ = call("construct", "threshold-universal", "--n", "2", "--factors", "65,65", "--dot", str(dot), "--full-dynamics")
    assert result.exit_code == EXIT_SIZE_GUARD


def test_reports(tmp_path):
    _, text = call("census", "--n", "2", "--q", "2")
    assert json.loads(text)["gamma"] == 6
    _, text = call("incompat", "--n", "2")
    assert json.loads(text)["violations"] == 0
    _, text = call("stats", "--n", "2")
    assert json.loads(text)["counts"]["hamiltonian"] == 4
    _, text = call("induced", "--k", "1", "--n", "2")
    assert json.loads(text)["exists"] is True
    _, text = call("induced", "--k", "2")
    assert json.loads(text)["family"]["verified"] == 16
    path = write(tmp_path / "c.json", FunctionTable.constant(2, 2).to_json())
    _, text = call("gset", path)
    assert json.loads(text)["count"] == 1


def test_reports_have_no_floats(universal):
    _, text = call("certify", str(universal))
    assert "." not in text.replace('"', "")


def test_error_exit_codes(tmp_path, universal):
    assert call("nonsense")[0].exit_code == EXIT_PRECONDITION
    assert call("check", str(tmp_path / "missing.json"))[0].exit_code == EXIT_PRECONDITION
    assert call("gset", str(universal))[0].exit_code == EXIT_SIZE_GUARD
    assert call("construct", "threshold-universal", "--n", "2", "--factors", "2,3")[0].exit_code == EXIT_PRECONDITION
    assert call("construct", "hamiltonian", "--n", "3")[0].exit_code == EXIT_PRECONDITION
    assert call("certify", str(universal), "--coverage", "sample:x")[0].exit_code == EXIT_PRECONDITION
    assert call("check", "--bogus-flag", str(universal))[0].exit_code == EXIT_PRECONDITION


def test_main_returns_exit_code(universal, capsys):
    assert main(["check", str(universal)]) == EXIT_OK
    assert main(["gset", str(universal)]) == EXIT_SIZE_GUARD
    assert "q^n" in capsys.readouterr().err
