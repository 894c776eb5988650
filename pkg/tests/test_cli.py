import io
import json
import subprocess
import sys

import pytest

from torilat import cli
from torilat.resolutions import Claim, ComplexVerificationError


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def doc(*argv):
    code, out, _ = call(*argv)
    assert code == 0, out
    return json.loads(out)


def test_envelope_and_catalog():
    d = doc("catalog", "--max-order", "8")
    assert d["schema"] == "torilat/1" and d["command"] == "catalog"
    assert "version" in d


def test_classify_positive_and_negative():
    d = doc("classify", "--group", "D8", "--subgroups", "<t>,<st>")
    assert d["verdict"]["status"] == "QuasiPermutation"
    assert (d["verdict"]["witness"]["m"], d["verdict"]["witness"]["nu"]) == (1, 3)
    d = doc("classify", "--group", "C4xC2", "--subgroups", "<s>,<t>")
    assert d["verdict"]["status"] == "NotQuasiInvertible"
    assert d["verdict"]["failing_condition"]


def test_classify_replay_and_trace():
    d = doc("classify", "--group", "C3xD4", "--subgroups", "<t>,<s^2t>,<st>", "--with-trace", "--replay")
    text = json.dumps(d)
    assert "NILPOTENT_BETA" in text and "steps" in text


def test_cohomology_routes_agree():
    a = doc("cohomology", "--group", "D4", "--multiset", "<t>", "--op", "h2")
    b = doc("cohomology", "--group", "D4", "--multiset", "<t>", "--op", "h2", "--route", "bar")
    assert a["result"] == b["result"] == {"free_rank": 0, "text": "Z/2", "torsion": [2]}
    assert (a["route"], b["route"]) == ("crossed", "bar")


def test_sha_command():
    d = doc("cohomology", "--group", "C4xC2", "--multiset", "<s>,<st>,<t>", "--op", "sha2")
    assert d["result"]["torsion"] == [2]


def test_reduce_restrict_quotient():
    assert doc("reduce", "--group", "D8", "--multiset", "<t>,<s^2t>,<st>", "--op", "strongly", "--replay")
    assert doc("restrict", "--group", "D4", "--multiset", "<t>", "--to", "<s>", "--replay")
    assert doc("quotient", "--group", "C2xC2xC2", "--multiset", "<r>,<s,t>", "--by", "<r>", "--replay")


@pytest.mark.parametrize("argv", [
    ["classify", "--group", "D8", "--subgroups", "<t>,<st>", "--with-trace"],
    ["cohomology", "--group", "C4xC2", "--multiset", "<s>,<st>,<t>", "--op", "report"],
    ["verify-resolution", "v4", "--rebase", "2"],
    ["sweep", "--max-order", "4"],
])
def test_output_is_byte_identical_across_runs(argv):
    first = call(*argv)
    second = call(*argv)
    assert first == second and first[0] == 0


def test_sweep_parallel_matches_serial():
    a = call("sweep", "--groups", "D4,Q8,C4xC2", "--max-members", "2", "--jobs", "1")
    b = call("sweep", "--groups", "D4,Q8,C4xC2", "--max-members", "2", "--jobs", "2")
    assert a == b and a[0] == 0
    rows = [json.loads(line) for line in a[1].splitlines()]
    assert len(rows) > 20
    assert {r["group"] for r in rows} == {"D4", "Q8", "C4xC2"}
    assert all(r["status"] in ("QuasiPermutation", "NotQuasiInvertible") or "error" in r for r in rows)


def test_text_format():
    code, out, _ = call("classify", "--group", "D8", "--subgroups", "<t>,<st>", "--format", "text")
    assert code == 0 and "QuasiPermutation" in out


@pytest.mark.parametrize("argv", [
    ["classify", "--group", "S4", "--subgroups", "<a>"],
    ["classify", "--group", "NoSuchGroup", "--subgroups", "<t>"],
    ["classify", "--group", "D4", "--subgroups", "<q>"],
    ["cohomology", "--group", "C3xD4", "--multiset", "<t>", "--op", "h2"],
    ["quotient", "--group", "D4", "--multiset", "<t>", "--by", "<t>"],
    ["verify-resolution", "nlqp:4:2"],
])
def test_bad_requests_exit_two(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert err.strip()
    assert "error" in json.loads(out)


def test_failed_fixture_exits_one(monkeypatch):
    bad = Claim("Exact", "somewhere", "exact", "not exact", False)

    def broken(spec):
        raise ComplexVerificationError(spec, [bad])

    monkeypatch.setattr(cli, "fixture", broken)
    code, out, err = call("verify-resolution", "v4")
    assert code == 1 and "v4" in err
    d = json.loads(out)
    assert d["ok"] is False and d["claims"][0]["holds"] is False


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "torilat", "classify", "--group", "C2xC2", "--subgroups", "<s>,<t>"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "ENDO2001" in proc.stdout
