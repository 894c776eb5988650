import itertools

import pytest

from torilat.classifier import (
    NQI,
    QP,
    classify,
    classify_elementary_abelian,
    classify_norm_one,
    classify_odd_pgroup,
    classify_two_group,
    cross_check,
    psdp_reduce,
)
from torilat.cohomology import obstruction_report
from torilat.errors import OutOfScope, PreconditionFailed
from torilat.groups import (
    all_subgroups,
    catalog_group,
    center,
    intersection,
    parse_subgroup_list,
    sylow_subgroups_if_nilpotent,
)
from torilat.multinorm import MultinormData


def members(G, text):
    if text == "1":
        return [G.trivial]
    if text == "Z":
        return [center(G)]
    return parse_subgroup_list(G, text)


# (group, members, status, rule tag, witness (m, nu) or None)
CASES = [
    ("C8", "1", QP, "EMN1", None),
    ("D4", "<t>", NQI, "EMN1", None),
    ("D3", "1", QP, "EMQP", None),
    ("C2xC2", "<s>,<t>", QP, "ENDO2001", None),
    ("C3xC3", "<s>,<t>", NQI, "ENDO2001", None),
    ("C9", "1", QP, "EMN1", None),
    ("Heis27", "Z", NQI, "EMN1", None),
    ("D8", "<t>,<st>", QP, "TWO_GROUP_II", (1, 3)),
    ("D4", "<s^2,t>", QP, "EMN1", None),
    ("C4xC2", "<s>,<t>", NQI, "TWO_GROUP_II", None),
    ("C4xC2", "<s>,<st>,<t>", NQI, "TWO_GROUP_II", None),
    ("C2xC2xC2", "<r>,<s,t>", NQI, "TWO_GROUP_II", None),
    ("C12", "1", QP, "NILPOTENT_ALPHA", None),
    ("C3xD4", "<t>,<st>", QP, "NILPOTENT_BETA", (3, 2)),
    ("C3xD4", "<r,t>,<r,st>", QP, "NILPOTENT_BETA", (1, 2)),
    ("Q8", "<i>,<j>", QP, "TWO_GROUP_II", (1, 1)),
    ("A4", "1", NQI, "EMQP", None),
    ("S4", "1", NQI, "EMQP", None),
    ("D6", "<t>,<st>", QP, "DIHEDRAL_PAIR", None),
]


@pytest.mark.parametrize("name, text, status, tag, shape", CASES, ids=[f"{c[0]}:{c[1]}" for c in CASES])
def test_verdicts(name, text, status, tag, shape):
    G = catalog_group(name)
    v = classify(G, members(G, text))
    assert (v.status, v.rationale) == (status, tag)
    if status == QP:
        assert v.witness is not None and v.failing is None
        if shape is not None:
            assert (v.witness.m, v.witness.nu) == shape
        assert v.witness.xi is not None
    else:
        assert v.failing
    if v.trace is not None:
        v.trace.verify()
    for extra in v.extra_traces:
        extra.verify()
    assert v.to_json(with_trace=True)["status"] == status


def test_out_of_scope_inputs():
    S4 = catalog_group("S4")
    with pytest.raises(OutOfScope):
        classify(S4, parse_subgroup_list(S4, "<a>"))
    D5 = catalog_group("D5")
    with pytest.raises(OutOfScope):
        classify(D5, parse_subgroup_list(D5, "<t>"))


def test_unit_weights_required():
    G = catalog_group("D4")
    (t,) = parse_subgroup_list(G, "<t>")
    with pytest.raises(PreconditionFailed):
        classify(G, MultinormData(((t, (2,)),)))


def test_rule_preconditions():
    G = catalog_group("C4xC2")
    with pytest.raises(PreconditionFailed):
        classify_elementary_abelian(G, parse_subgroup_list(G, "<s>"))
    with pytest.raises(PreconditionFailed):
        classify_odd_pgroup(G, parse_subgroup_list(G, "<s>"))


def test_norm_one_rule():
    G = catalog_group("C8")
    assert classify_norm_one(G, G.trivial).is_qp
    D = catalog_group("D4")
    assert not classify_norm_one(D, parse_subgroup_list(D, "<t>")[0]).is_qp


def test_two_group_rule_on_dihedral_pairs():
    for name in ("D4", "D8", "D16"):
        G = catalog_group(name)
        v = classify_two_group(G, parse_subgroup_list(G, "<t>,<st>"))
        assert v.is_qp


def test_redundant_inputs_reduce_to_the_same_verdict():
    G = catalog_group("D8")
    base = classify(G, parse_subgroup_list(G, "<t>,<st>"))
    padded = classify(G, parse_subgroup_list(G, "<t>,<s^2t>,<st>,<st>") + [G.trivial])
    assert (base.status, base.rationale) == (padded.status, padded.rationale)
    padded.trace.verify()
    padded.trace.replay()


def test_psdp_reduce_matches_sylow_parts():
    G = catalog_group("C3xC2xC2")
    HH = parse_subgroup_list(G, "<r,t>,<s>")
    syl = sylow_subgroups_if_nilpotent(G)
    for p in (2, 3):
        out, tr = psdp_reduce(G, HH, p)
        tr.verify()
        parts_in = {intersection(H, syl[p]) for H in HH}
        maximal_in = {P for P in parts_in if not any(P != Q and P.issubset(Q) for Q in parts_in)}
        assert {intersection(H, syl[p]) for H in out.set} == maximal_in


def test_psdp_identity_on_p_groups():
    G = catalog_group("D4")
    HH = parse_subgroup_list(G, "<t>,<st>")
    out, tr = psdp_reduce(G, HH, 2)
    assert set(out.set) == set(HH) and not tr.steps


@pytest.mark.parametrize("name", ["D4", "Q8", "C4xC2", "C2xC2xC2", "D8", "Q16", "C2xD4"])
def test_positive_verdicts_have_no_obstruction(name):
    G = catalog_group(name)
    subs = [H for H in all_subgroups(G) if H.order < G.order]
    seen = 0
    for a, b in itertools.combinations(subs, 2):
        if a.issubset(b) or b.issubset(a):
            continue
        v = classify(G, [a, b])
        if v.is_qp:
            assert obstruction_report(G, v.data).is_empty
            seen += 1
        if seen > 12:
            break


def test_cross_check_reports():
    G = catalog_group("C4xC2")
    rep = cross_check(G, parse_subgroup_list(G, "<s>,<st>,<t>"))
    assert rep.consistent and rep.obstructions
    D = catalog_group("D8")
    rep = cross_check(D, parse_subgroup_list(D, "<t>,<st>"))
    assert rep.consistent and not rep.obstructions
    assert rep.to_json()["consistent"]
