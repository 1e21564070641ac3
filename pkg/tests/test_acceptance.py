"""Acceptance criteria 1-8, all exact (zero tolerance).

Each ``criterion_N`` returns ``(ok, detail)``.  Under pytest every criterion
prints one ``PASS``/``FAIL`` line; ``python tests/test_acceptance.py`` prints
the same lines without pytest.
"""
from __future__ import annotations

import json
import os
import sys
import tempfile
import time
from contextlib import redirect_stdout
from io import StringIO

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from tstruct.cli import main as cli_main  # noqa: E402
from tstruct.mutations import mutated  # noqa: E402
from tstruct.space import enumerate_spaces, sier  # noqa: E402
from tstruct.suites import RunConfig, run_suites, suite_axioms, suite_convolution, suite_criterion  # noqa: E402
from tstruct.suites import suite_exactness, suite_lemmas, suite_residuation  # noqa: E402
from tstruct.supports import check_t_criterion, convolve, example_oco, standard_S  # noqa: E402

_timings: dict[str, float] = {}
_records: dict[str, list] = {}


def _timed(key, fn, *args):
    """Run a suite once per session and remember its records and wall time."""
    if key not in _records:
        t = time.perf_counter()
        _records[key] = fn(*args)
        _timings[key] = time.perf_counter() - t
    return _records[key]


def _fails(recs):
    return [r for r in recs if not r.verdict]


def criterion_1():
    recs = _timed("criterion", suite_criterion, RunConfig())
    agree = [r for r in recs if r.suite == "criterion/agreement"]
    expected = sum(1 for _ in enumerate_spaces(4))
    bad = _fails(recs)
    # convolution identities share the budget
    conv = _timed("convolution", suite_convolution, RunConfig())
    secs = _timings["criterion"] + _timings["convolution"]
    ok = not bad and len(agree) == expected and secs < 60 and not _fails(conv)
    return ok, f"{len(agree)} spaces (expected {expected}), {len(bad)} disagreements, {secs:.1f}s incl. convolution"


def criterion_2():
    t = time.perf_counter()
    X = sier()
    phi = example_oco(X)
    rep = check_t_criterion(phi)
    S = standard_S(X)
    with tempfile.TemporaryDirectory() as d:
        dpath = os.path.join(d, "oco.json")
        cpath = os.path.join(d, "jk.json")
        with open(dpath, "w") as fh:
            json.dump({"space": "SIER", "p": {"eta": 0, "x": 2}}, fh)
        with open(cpath, "w") as fh:
            json.dump({"space": "SIER", "field": "F2", "terms": {"0": {"stalks": {"eta": 1, "x": 0}}}}, fh)
        buf = StringIO()
        with redirect_stdout(buf):
            code = cli_main(["truncate", "--datum", dpath, "--complex", cpath])
    secs = time.perf_counter() - t
    out = json.loads(buf.getvalue())
    coh = out["cohomology"]
    ok = (
        not rep.holds
        and rep.witness == ("eta", "x")
        and convolve(S, S) == phi
        and code == 0
        and coh["lt"] == {"1": {"eta": 0, "x": 1}}
        and coh["geq"] == {"0": {"eta": 1, "x": 1}}
        and secs < 1
    )
    return ok, f"witness={rep.witness}, lt={coh['lt']}, geq={coh['geq']}, {secs:.2f}s"


def criterion_3():
    recs = _timed("convolution", suite_convolution, RunConfig())
    kinds = sorted({r.suite.split("/")[1] for r in recs})
    bad = _fails(recs)
    need = {"pointwise-sum", "unit", "distributive-meet", "distributive-join", "cancellation"}
    return not bad and need <= set(kinds), f"{len(recs)} records over {kinds}, {len(bad)} failures"


def criterion_4():
    recs = _timed("residuation", suite_residuation, RunConfig())
    kinds = sorted({r.suite.split("/")[1] for r in recs})
    bad = _fails(recs)
    need = {"iff-jump-inequality", "unique-solution", "dual-T-S"}
    return not bad and need <= set(kinds), f"{len(recs)} records over {kinds}, {len(bad)} failures, {_timings['residuation']:.1f}s"


def criterion_5():
    recs = _timed("axioms", suite_axioms, RunConfig(samples=50))
    bad = _fails(recs)
    per = {}
    for r in recs:
        if r.suite == "axioms/decomposition":
            key = r.case_id.rsplit("/", 1)[0]
            per[key] = per.get(key, 0) + 1
    enough = len(per) == 9 and all(v >= 50 for v in per.values())
    secs = _timings["axioms"]
    return not bad and enough and secs < 120, f"{len(recs)} records, {len(bad)} failures, cases per (space,datum)={sorted(set(per.values()))}, {secs:.1f}s"


def criterion_6():
    recs = _timed("lemmas", suite_lemmas, RunConfig(aux_samples=20))
    bad = _fails(recs)
    secs = _timings["lemmas"]
    return not bad and secs < 60, f"{len(recs)} records, {len(bad)} failures, {secs:.1f}s"


def criterion_7():
    recs = _timed("exactness", suite_exactness, RunConfig(aux_samples=20))
    bad = _fails(recs)
    secs = _timings["exactness"]
    return not bad and bool(recs) and secs < 60, f"{len(recs)} records, {len(bad)} failures, {secs:.1f}s"


def criterion_8():
    cfg = {
        "drop-monotonicity": RunConfig(max_points=3, suites=("criterion",)),
        "break-d2": RunConfig(samples=20, aux_samples=3, suites=("axioms",)),
        "sigma-convention": RunConfig(max_points=3, suites=("criterion",)),
    }
    counts = {}
    ok = True
    for name, c in cfg.items():
        with mutated(name):
            recs = run_suites(c)
        failing = [r for r in recs if not r.verdict and r.witness is not None]
        counts[name] = len(failing)
        ok &= bool(failing)
    # and the unmutated runs of the same configurations are green
    for c in cfg.values():
        ok &= not _fails(run_suites(c))
    return ok, f"failing checks with witness per mutant: {counts}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _line(i, ok, detail):
    return f"acceptance criterion {i}: {'PASS' if ok else 'FAIL'} ({detail})"


def _check(i, capsys):
    ok, detail = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + _line(i, ok, detail))
    assert ok, detail


def test_criterion_1(capsys):
    _check(1, capsys)


def test_criterion_2(capsys):
    _check(2, capsys)


def test_criterion_3(capsys):
    _check(3, capsys)


def test_criterion_4(capsys):
    _check(4, capsys)


def test_criterion_5(capsys):
    _check(5, capsys)


def test_criterion_6(capsys):
    _check(6, capsys)


def test_criterion_7(capsys):
    _check(7, capsys)


def test_criterion_8(capsys):
    _check(8, capsys)


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failed += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
