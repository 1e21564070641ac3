import json
import os
import subprocess
import sys

import pytest

from tstruct import io
from tstruct.cli import main
from tstruct.complexes import cohomology_dims, signature
from tstruct.linalg import QQ
from tstruct.space import chain3, sier
from tstruct.supports import SupportDatum, example_oco


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    sp = write(tmp_path, "sier.json", sier().to_json())
    return {
        "space": sp,
        "oco": write(tmp_path, "oco.json", {"space": "sier.json", "p": {"eta": 0, "x": 2}}),
        "oco_levels": write(tmp_path, "oco_lv.json", {"space": "sier.json", "levels": {"1": ["x"], "2": ["x"]}, "full_below": 0}),
        "S": write(tmp_path, "S.json", {"space": "sier.json", "p": {"eta": 0, "x": 1}}),
        "T": write(tmp_path, "T.json", {"space": "sier.json", "p": {"eta": 0, "x": 0}}),
        "jk": write(tmp_path, "jk.json", {"space": "sier.json", "field": "F2", "terms": {"0": {"stalks": {"eta": 1, "x": 0}}}, "differentials": {}}),
        "kX": write(
            tmp_path,
            "kX.json",
            {"space": "sier.json", "field": "F2", "terms": {"0": {"stalks": {"eta": 1, "x": 1}, "transitions": {"x->eta": [[1]]}}}},
        ),
        "tmp": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_datum_exit_codes(capsys, files):
    code, out, _ = run(capsys, "check-datum", "--datum", files["oco"])
    rep = json.loads(out)
    assert code == 1 and rep["verdict"] is False and rep["witness"] == ["eta", "x"]
    assert set(rep["conditions"]) == {"ii", "iii", "iv", "v"}
    code, out, _ = run(capsys, "check-datum", "--datum", files["S"])
    assert code == 0 and json.loads(out)["verdict"] is True
    code, _, _ = run(capsys, "check-datum", "--datum", files["T"])
    assert code == 0


def test_levels_form_matches_function_form(capsys, files):
    a = io.load_datum(files["oco"])
    b = io.load_datum(files["oco_levels"])
    assert a == b == example_oco(sier())


def test_levels_form_fills_gaps():
    X = chain3()
    phi = io.datum_from_json({"levels": {"1": ["y"], "3": ["x"]}}, X)
    # level 2 copies level 3; full below the smallest key
    assert phi.as_map() == {"eta": 0, "x": 3, "y": 1}


def test_datum_commands(capsys, files):
    code, out, _ = run(capsys, "convolve", "--datum", files["S"], "--datum2", files["S"])
    assert code == 0 and out == '{"p":{"eta":0,"x":2}}\n'
    code, out, _ = run(capsys, "dual", "--datum", files["T"])
    assert code == 0 and json.loads(out) == {"p": {"eta": 0, "x": 1}}
    code, out, _ = run(capsys, "residuate", "--datum", files["oco"], "--datum2", files["S"])
    res = json.loads(out)
    assert code == 1 and res["no_solution"] and res["witness"] == ["eta", "x"]
    code, out, _ = run(capsys, "residuate", "--datum", files["S"], "--datum2", files["oco"])
    assert code == 0 and json.loads(out) == {"p": {"eta": 0, "x": 1}}


def test_dual_on_chain3_named_space(capsys, tmp_path):
    path = write(tmp_path, "t.json", {"p": {"eta": 0, "y": 0, "x": 0}})
    code, out, _ = run(capsys, "dual", "--space", "CHAIN3", "--datum", path)
    assert code == 0 and json.loads(out) == {"p": {"eta": 0, "x": 2, "y": 1}}


def test_truncate_oco(capsys, files):
    code, out, _ = run(capsys, "truncate", "--datum", files["oco"], "--complex", files["jk"])
    assert code == 0
    res = json.loads(out)
    assert res["cohomology"]["lt"] == {"1": {"eta": 0, "x": 1}}
    assert res["cohomology"]["geq"] == {"0": {"eta": 1, "x": 1}}
    assert res["certificates"]["lt"]["member"] and res["certificates"]["geq"]["member"]
    # emitted pieces parse back to complexes with the same cohomology
    X = sier()
    lt = io.complex_from_json(res["lt"], X)
    geq = io.complex_from_json(res["geq"], X)
    assert cohomology_dims(lt) == {1: (0, 1)} and cohomology_dims(geq) == {0: (1, 1)}


def test_truncate_constant_sheaf_with_s(capsys, files):
    code, out, _ = run(capsys, "truncate", "--datum", files["S"], "--complex", files["kX"])
    res = json.loads(out)
    assert code == 0 and res["cohomology"]["lt"] == {} and res["cohomology"]["geq"] == {"0": {"eta": 1, "x": 1}}


def test_phi_cohomology(capsys, files):
    code, out, _ = run(capsys, "phi-cohomology", "--datum", files["oco"], "--complex", files["jk"], "--n", "-1")
    res = json.loads(out)
    assert code == 0 and res["cohomology"] == {"1": {"eta": 0, "x": 1}}
    code, _, err = run(capsys, "phi-cohomology", "--datum", files["oco"], "--complex", files["jk"])
    assert code == 2 and "--n" in err


@pytest.mark.parametrize(
    "bad",
    [
        "not json",
        '{"space": "sier.json", "p": {"eta": 2, "x": 0}}',
        '{"space": "sier.json", "p": {"eta": 0}}',
        '{"space": "sier.json", "p": {"eta": 0, "x": 1.5}}',
        '{"space": "sier.json", "p": {"eta": 0, "x": 1, "zz": 3}}',
        '{"space": "sier.json"}',
        '{"p": {"eta": 0, "x": 1}}',
        "[1, 2]",
    ],
)
def test_bad_datum_exits_2(capsys, files, bad):
    path = files["tmp"] / "bad.json"
    path.write_text(bad)
    code, _, err = run(capsys, "check-datum", "--datum", str(path))
    assert code == 2 and "error" in err


@pytest.mark.parametrize(
    "cplx",
    [
        {"terms": {"0": {"stalks": {"eta": 1, "x": 1}}}},
        {"terms": {"0": {"stalks": {"eta": 1, "x": 1}, "transitions": {"eta->x": [[1]]}}}},
        {"terms": {"0": {"stalks": {"eta": 1, "x": 1}, "transitions": {"x->eta": [[1, 0]]}}}},
        {"terms": {"0": {"stalks": {"eta": 1}}, "1": {"stalks": {"eta": 1}}}, "differentials": {"0": {"eta": [[0.5]]}}},
        {"terms": {"0": {"stalks": {"eta": 1}}, "1": {"stalks": {"eta": 1}}, "2": {"stalks": {"eta": 1}}}, "differentials": {"0": {"eta": [[1]]}, "1": {"eta": [[1]]}}},
        {"field": "Q", "terms": {}},
        {"terms": {"0": {"stalks": {"eta": -1}}}},
    ],
)
def test_bad_complex_exits_2(capsys, files, cplx):
    cplx = {"space": "sier.json", **cplx}
    path = write(files["tmp"], "badc.json", cplx)
    code, _, err = run(capsys, "truncate", "--datum", files["S"], "--complex", path, "--field", "F2")
    assert code == 2, err


def test_unknown_command_and_suite(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    code, _, _ = run(capsys, "verify", "--suite", "nope")
    assert code == 2


def test_rational_output_round_trips():
    X = sier()
    data = {"field": "Q", "terms": {"0": {"stalks": {"eta": 1, "x": 1}, "transitions": {"x->eta": [["1/2"]]}}}}
    C = io.complex_from_json(data, X)
    assert C.field == QQ
    back = io.complex_from_json(io.complex_to_json(C), X)
    assert signature(back) == signature(C)
    assert io.complex_to_json(back)["terms"]["0"]["transitions"] == {"x->eta": [["1/2"]]}


def test_space_round_trip():
    X = chain3()
    assert io.space_from_json(json.loads(io.dumps(X.to_json()))) == X


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--space", "SIER")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == len({json.dumps(r["p"], sort_keys=True) for r in rows})
    oco = next(r for r in rows if r["p"] == {"eta": 0, "x": 2})
    assert oco["t_structure"] is False
    code, out, _ = run(capsys, "enumerate", "--max-points", "2")
    assert code == 0 and len(out.splitlines()) > 4


def test_verify_single_point_is_degenerate_pass(capsys):
    code, out, err = run(capsys, "verify", "--max-points", "1", "--suite", "criterion,convolution,residuation")
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert recs and all(r["verdict"] == "pass" for r in recs)
    assert set(recs[0]) == {"suite", "case_id", "seed", "verdict", "witness"}
    assert json.loads(err)["failed"] == 0


def test_verify_is_byte_deterministic_and_seed_env_wins():
    env = dict(os.environ)
    env.pop("TSTRUCT_SEED", None)
    cmd = [sys.executable, "-m", "tstruct", "verify", "--suite", "oco,exactness", "--samples", "3", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    assert a == b and a
    assert all(json.loads(line)["seed"] == 5 for line in a.splitlines())
    env["TSTRUCT_SEED"] = "11"
    c = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    assert all(json.loads(line)["seed"] == 11 for line in c.splitlines())


def test_canonical_json():
    assert io.dumps({"b": 1, "a": [2, {"d": 3, "c": 4}]}) == '{"a":[2,{"c":4,"d":3}],"b":1}'
    with pytest.raises(ValueError):
        io.dumps({"a": float("nan")})


def test_datum_json_sorted(files):
    X = chain3()
    phi = SupportDatum.from_map(X, {"y": 1, "x": 2, "eta": 0})
    assert io.dumps(io.datum_to_json(phi)) == '{"p":{"eta":0,"x":2,"y":1}}'


def test_hidden_mutate_flag_turns_verify_red(capsys):
    code, out, _ = run(capsys, "verify", "--max-points", "2", "--suite", "criterion", "--mutate", "drop-monotonicity")
    recs = [json.loads(line) for line in out.splitlines()]
    failing = [r for r in recs if r["verdict"] == "fail"]
    assert code == 1 and failing and all(r["witness"] for r in failing)
    code, _, _ = run(capsys, "verify", "--max-points", "2", "--suite", "criterion")
    assert code == 0
    assert "--mutate" not in main.__globals__["build_parser"]().format_help()
