import json

import pytest

from efmarket.cli import main
from efmarket.instance import Instance


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return _write


HB = Instance.build(3, [(4, 10, [0, 1, 2])]).to_json()
LB = Instance.build(1, [(2, 1, [0])]).to_json()


def test_run_and_verify_round_trip(write, tmp_path, capsys):
    inst = write("hb.json", HB)
    out = tmp_path / "out.json"
    assert main(["run", inst, "--verify", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["revenue"] == "20/3" and report["verification"]["passed"]
    assert capsys.readouterr().out == "revenue 20/3\n"
    assert main(["verify", inst, str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["passed"]


def test_concrete_epsilon(write, capsys):
    inst = write("hb.json", HB)
    assert main(["run", inst, "--eps", "1/100"]) == 0
    assert json.loads(capsys.readouterr().out)["revenue"] == "1003/150"
    # an epsilon too large to keep payments within budget fails verification
    assert main(["run", inst, "--eps", "10", "--verify"]) == 2


def test_regime_mismatch(write):
    assert main(["run", write("lb.json", LB), "--algo", "hb"]) == 4
    mixed = Instance.build(2, [(1, 1, [0]), (2, 1, [1])]).to_json()
    assert main(["run", write("mixed.json", mixed)]) == 4
    assert main(["run", write("lb.json", LB)]) == 0


def test_parse_errors(write):
    assert main(["run", write("bad.json", "{not json")]) == 3
    floats = {"m": 1, "buyers": [{"v": 1.5, "b": "1", "S": [0]}]}
    assert main(["run", write("floats.json", floats)]) == 3
    assert main(["run", "/nonexistent/instance.json"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["run", write("hb.json", HB), "--algo", "nope"])
    assert exc.value.code == 3


def test_oracle_size_cap(write, capsys):
    big = Instance.build(6, [(1, 1, [j]) for j in range(6)]).to_json()
    assert main(["oracle", write("big.json", big)]) == 5
    assert main(["oracle", write("big.json", big), "--oracle-cap", "6,6"]) == 0
    assert json.loads(capsys.readouterr().out)["optimal_revenue"] == "6"


def test_gen_is_seeded(capsys):
    assert main(["gen", "--n", "4", "--m", "3", "--seed", "9", "--regime", "LowBudget"]) == 0
    first = capsys.readouterr().out
    main(["gen", "--n", "4", "--m", "3", "--seed", "9", "--regime", "LowBudget"])
    assert capsys.readouterr().out == first
    assert Instance.from_json(json.loads(first)).n == 4


def test_gap(capsys):
    assert main(["gap", "--n", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["optimal"] == "25/3" and rep["fixed_revenue"] == "4"
    assert rep["ratio_optimal_to_fixed"] == "25/12" and rep["oracle_optimal"] == "25/3"


def test_bench_is_byte_identical(capsys):
    args = ["bench", "--seed", "3", "--count", "15", "--n", "4", "--m", "4"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["regimes"]["HighBudget"]["violations"] == 0
