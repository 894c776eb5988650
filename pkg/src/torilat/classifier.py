"""Decision procedures for quasi-permutation character lattices of multinorm one tori.

Scope: nilpotent G (p-groups included), plus two extras for arbitrary G:
the norm one torus of a Galois extension (``{{1}}``) and the dihedral
two-reflection family.  Inside the nilpotent scope quasi-permutation and
quasi-invertible coincide, so a verdict has only two outcomes.

Negative verdicts report the first failing condition in this fixed order:
Sylow parts by increasing prime, then (for p = 2) #H, core quotient shape,
member images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import NotNilpotent, OutOfScope, PreconditionFailed, VerificationError
from .groups import (
    FiniteGroup,
    Subgroup,
    are_conjugate,
    closure,
    conjugate,
    cyclic_generator,
    hall_odd_part,
    index,
    intersection,
    is_abelian,
    is_normal,
    join,
    normal_core,
    prime_factors,
    quotient,
    subgroup_as_group,
    subgroup_label,
    sylow_subgroups_if_nilpotent,
)
from .multinorm import (
    MultinormData,
    ReductionTrace,
    TraceStep,
    collapse_step,
    is_strongly_reduced,
    quotient_descend,
    rded_step,
    rdtr_step,
    reduce_to_reduced,
    srd_choice,
    strongly_reduce,
    xi_injection,
)

QP = "QuasiPermutation"
NQI = "NotQuasiInvertible"

TAGS = (
    "EMQP",
    "EMN1",
    "ENDO2001",
    "ODD_P",
    "TWO_GROUP_I",
    "TWO_GROUP_II",
    "NILPOTENT_ALPHA",
    "NILPOTENT_BETA",
    "DIHEDRAL_PAIR",
)


@dataclass
class WitnessData:
    """Positive certificate: the reduced set H' < H and its shape data."""

    group: FiniteGroup
    members: tuple[Subgroup, ...]
    xi: dict[Subgroup, Subgroup] | None = None
    normal_subgroup: Subgroup | None = None  # N (alpha) or the core of H' (beta)
    m: int | None = None
    nu: int | None = None
    pair: tuple[Subgroup, Subgroup] | None = None
    generators: dict[str, int] = field(default_factory=dict)  # rho, sigma, tau lifted to G

    def to_json(self) -> dict:
        G = self.group
        out = {"members": [subgroup_label(G, H) for H in self.members]}
        if self.xi is not None:
            out["xi"] = {subgroup_label(G, a): subgroup_label(G, b) for a, b in self.xi.items()}
        if self.normal_subgroup is not None:
            out["normal_subgroup"] = subgroup_label(G, self.normal_subgroup)
        if self.m is not None:
            out["m"] = self.m
        if self.nu is not None:
            out["nu"] = self.nu
        if self.pair is not None:
            out["pair"] = [subgroup_label(G, H) for H in self.pair]
        if self.generators:
            out["generators"] = {k: G.name(v) for k, v in sorted(self.generators.items())}
        return out


@dataclass
class Verdict:
    status: str
    rationale: str
    group: FiniteGroup
    data: MultinormData
    witness: WitnessData | None = None
    trace: ReductionTrace | None = None
    failing: str | None = None
    extra_traces: list[ReductionTrace] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in (QP, NQI):
            raise ValueError(self.status)
        if self.rationale not in TAGS:
            raise ValueError(self.rationale)
        if self.status == QP and self.witness is None:
            raise VerificationError("positive verdicts must carry a witness")

    @property
    def is_qp(self) -> bool:
        return self.status == QP

    def to_json(self, with_trace: bool = False) -> dict:
        out = {
            "status": self.status,
            "rationale": self.rationale,
            "input": self.data.to_json(self.group),
        }
        if self.failing:
            out["failing_condition"] = self.failing
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if with_trace and self.trace is not None:
            out["trace"] = self.trace.to_json()
            if self.extra_traces:
                out["extra_traces"] = [t.to_json() for t in self.extra_traces]
        return out


def _data(HH) -> MultinormData:
    data = MultinormData.make(HH)
    if not data.is_unit:
        raise PreconditionFailed("classification takes a multiset with unit weights")
    return data


def _is_reduced_set(S: Sequence[Subgroup]) -> bool:
    return len(set(S)) == len(S) and not any(a != b and a.issubset(b) for a in S for b in S)


def _prime_of(G: FiniteGroup) -> int | None:
    ps = prime_factors(G.order)
    return ps[0] if len(ps) == 1 else None


# ---------------------------------------------------------------------------
# dihedral recognition of a pair of subgroup images


@dataclass(frozen=True)
class DihedralPair:
    """``Q = <sigma, tau>`` dihedral with ``A = <tau>`` and ``B = <sigma tau>``."""

    n: int  # rotation order; |Q| = 2n
    sigma: int
    tau: int


def dihedral_pair(Q: FiniteGroup, A: Subgroup, B: Subgroup) -> DihedralPair | None:
    """Recognise ``(Q, A, B) = (D_n, <tau>, <sigma tau>)`` with n even.

    Equivalently: A and B have order 2, are not conjugate, generate Q, and Q
    is dihedral (for |Q| = 4: the Klein four group).
    """
    if A.order != 2 or B.order != 2 or A == B:
        return None
    if Q.order % 4:
        return None
    if closure(Q, list(A.elements) + list(B.elements)).order != Q.order:
        return None
    a = A.elements[1]
    b = B.elements[1]
    if Q.order > 4:
        if are_conjugate(Q, A, B) is not None:
            return None
        n = Q.order // 2
        rot = Q.mul(b, a)
        if Q.element_order(rot) != n:
            return None
        C = closure(Q, [rot])
        if any(Q.element_order(x) != 2 for x in range(Q.order) if x not in C):
            return None
    else:
        if cyclic_generator(Q) is not None:
            return None
        rot = Q.mul(b, a)
    return DihedralPair(Q.order // 2, rot, a)


# ---------------------------------------------------------------------------
# elementary rules


def _emqp_structure(G: FiniteGroup) -> dict | None:
    """Generators exhibiting ``G = C_m x| C_{2^nu}`` with an involutive action."""
    C = hall_odd_part(G)
    if C is None:
        return None
    emb = subgroup_as_group(G, C)
    cg = cyclic_generator(emb.group)
    if cg is None:
        return None
    c = emb.to_parent[cg]
    two = G.order // C.order
    for t in range(G.order):
        if G.element_order(t) != two:
            continue
        t2 = G.mul(t, t)
        if G.conj(t2, c) == c:
            return {"rho": c, "tau": t}
    return None


def _noncyclic_sylow_prime(G: FiniteGroup) -> int | None:
    """Smallest p whose Sylow p-subgroup is not cyclic (no element of full p-power order)."""
    from .groups import p_part

    for p in prime_factors(G.order):
        full = p_part(G.order, p)
        if not any(G.element_order(g) == full for g in range(G.order)):
            return p
    return None


def classify_norm_one(G: FiniteGroup, H: Subgroup) -> Verdict:
    """Norm one torus: p-groups (any H) or arbitrary G with H = {1}."""
    data = MultinormData.unit([H])
    p = _prime_of(G)
    if H.order == 1 and (p is None or G.order == 1):
        st = _emqp_structure(G)
        if st is not None:
            w = WitnessData(G, (H,), {H: H}, normal_subgroup=H, generators=st)
            return Verdict(QP, "EMQP", G, data, w)
        bad = _noncyclic_sylow_prime(G)
        if bad is None:
            # not quasi-permutation, but quasi-invertibility is not settled by this rule
            raise OutOfScope("J_G is not quasi-permutation; all Sylow subgroups are cyclic, so quasi-invertibility is undecided")
        return Verdict(NQI, "EMQP", G, data, failing=f"Sylow {bad}-subgroup is not cyclic")
    if p is None:
        raise OutOfScope("norm one tori of non-Galois extensions are decided only for p-groups here")
    N = normal_core(G, [H])
    if cyclic_generator(quotient(G, N).target) is not None:
        return Verdict(QP, "EMN1", G, data, WitnessData(G, (H,), {H: H}, normal_subgroup=N))
    return Verdict(NQI, "EMN1", G, data, failing="G/N^G(H) is not cyclic")


def classify_elementary_abelian(G: FiniteGroup, HH) -> Verdict:
    data = _data(HH)
    S = data.set
    p = _prime_of(G)
    if p is None or not is_abelian(G) or any(G.element_order(g) not in (1, p) for g in range(G.order)):
        raise PreconditionFailed("G must be elementary abelian")
    if not data.multiset.is_set or not _is_reduced_set(S):
        raise PreconditionFailed("the set must be reduced")
    if any(index(G, H) != p for H in S):
        raise PreconditionFailed("all members must have index p")
    if len(S) == 1 or (p == 2 and len(S) == 2):
        return Verdict(QP, "ENDO2001", G, data, WitnessData(G, S, {H: H for H in S}, normal_subgroup=normal_core(G, S)))
    return Verdict(NQI, "ENDO2001", G, data, failing=f"#H = {len(S)} with p = {p}")


def classify_odd_pgroup(G: FiniteGroup, HH) -> Verdict:
    data = _data(HH)
    S = data.set
    p = _prime_of(G)
    if p is None or p == 2:
        raise PreconditionFailed("G must be a p-group for an odd prime p")
    if not data.multiset.is_set or not _is_reduced_set(S):
        raise PreconditionFailed("the set must be reduced")
    N = normal_core(G, S)
    if len(S) != 1:
        return Verdict(NQI, "ODD_P", G, data, failing=f"#H = {len(S)} > 1")
    if cyclic_generator(quotient(G, N).target) is None:
        return Verdict(NQI, "ODD_P", G, data, failing="G/N^G(H) is not cyclic")
    return Verdict(QP, "ODD_P", G, data, WitnessData(G, S, {S[0]: S[0]}, normal_subgroup=N))


def _qphc_prefilter(G: FiniteGroup, S: Sequence[Subgroup], N: Subgroup) -> str | None:
    """Necessary conditions for a dihedral pair of order >= 8; returns the failure."""
    from .groups import _recognize_maximal_class

    mu = min(index(G, H) for H in S)
    if index(G, N) != 2 * mu:
        return "(G:N^G(H)) != 2 mu(H)"
    Q = quotient(G, N).target
    if _recognize_maximal_class(Q).kind == "No":
        return "G/N^G(H) is not of maximal class"
    from .groups import normalizer

    for H in S:
        if H.order // normal_core(G, [H]).order != 2 or normalizer(G, H).order // H.order != 2:
            return "(H:N^G(H)) = (N_G(H):H) = 2 fails"
    return None


def classify_two_group(G: FiniteGroup, HH) -> Verdict:
    data = _data(HH)
    S = data.set
    if _prime_of(G) != 2:
        raise PreconditionFailed("G must be a 2-group")
    if not data.multiset.is_set or not is_strongly_reduced(G, S):
        raise PreconditionFailed("the set must be strongly reduced")
    N = normal_core(G, S)
    q = quotient(G, N)
    if len(S) == 1:
        if cyclic_generator(q.target) is not None:
            return Verdict(QP, "TWO_GROUP_I", G, data, WitnessData(G, S, {S[0]: S[0]}, normal_subgroup=N))
        return Verdict(NQI, "TWO_GROUP_I", G, data, failing="#H = 1 but G/N^G(H) is not cyclic")
    if len(S) != 2:
        return Verdict(NQI, "TWO_GROUP_II", G, data, failing=f"#H = {len(S)} > 2")
    if q.target.order > 4:
        reason = _qphc_prefilter(G, S, N)
        if reason is not None:
            return Verdict(NQI, "TWO_GROUP_II", G, data, failing=reason)
    A, B = (q.image(H) for H in S)
    for first, second, Hs in ((A, B, S), (B, A, S[::-1])):
        dp = dihedral_pair(q.target, first, second)
        if dp is not None:
            gens = {"sigma": q.representatives[dp.sigma], "tau": q.representatives[dp.tau]}
            w = WitnessData(
                G, S, {H: H for H in S}, normal_subgroup=N, m=1, nu=_log2(dp.n),
                pair=(Hs[0], Hs[1]), generators=gens,
            )
            return Verdict(QP, "TWO_GROUP_II", G, data, w)
    return Verdict(NQI, "TWO_GROUP_II", G, data, failing="images are not two non-conjugate reflections of a dihedral quotient")


def _log2(n: int) -> int:
    return n.bit_length() - 1


# ---------------------------------------------------------------------------
# mixed primes


def _p_part_subgroup(G: FiniteGroup, Gp: Subgroup, H: Subgroup) -> Subgroup:
    return intersection(Gp, H)


def _reduced_parts(G: FiniteGroup, Gp: Subgroup, S: Sequence[Subgroup]) -> list[Subgroup]:
    parts = {_p_part_subgroup(G, Gp, H) for H in S}
    return sorted((A for A in parts if not any(A != B and A.issubset(B) for B in parts)), key=lambda H: H.key())


def _tag_status(G: FiniteGroup, step: TraceStep) -> None:
    S = step.target.set
    step.notes["target_reduced"] = step.target.is_unit and step.target.multiset.is_set and _is_reduced_set(S)
    step.notes["target_strongly_reduced"] = step.notes["target_reduced"] and is_strongly_reduced(G, S)


def psdp_reduce(G: FiniteGroup, HH, p: int) -> tuple[MultinormData, ReductionTrace]:
    """Make the p-parts of the members equal to the maximal p-parts of the input.

    Each round adds ``H0 N1`` (twice, weights ((H0N1:H0), (H0N1:H1 n H0N1)))
    and ``H1 n H0N1`` through certified transfer steps, then collapses and
    reduces.  Every step records whether its output is reduced or strongly
    reduced.
    """
    data = _data(HH)
    syl = sylow_subgroups_if_nilpotent(G)
    if syl is None:
        raise PreconditionFailed("G must be the direct product of its Sylow subgroups")
    if p not in syl:
        raise PreconditionFailed(f"{p} does not divide |G|")
    Gp = syl[p]
    target_parts = _reduced_parts(G, Gp, data.set)
    cur, trace = reduce_to_reduced(G, data)
    for s in trace.steps:
        _tag_status(G, s)
    guard = 0
    while True:
        S = cur.set
        parts = [_p_part_subgroup(G, Gp, H) for H in S]
        maxima = [A for A in parts if not any(A != B and A.issubset(B) for B in parts)]
        H0 = next((H for H, A in zip(S, parts) if A not in maxima), None)
        if H0 is None:
            break
        guard += 1
        if guard > 4 * len(data.set) + 8:
            raise VerificationError("psdp reduction did not terminate")
        A0 = _p_part_subgroup(G, Gp, H0)
        H1 = next(H for H, A in zip(S, parts) if A in maxima and A0.issubset(A) and A0 != A)
        N1 = _p_part_subgroup(G, Gp, H1)
        H0N1 = join(G, H0, N1)
        D = intersection(H1, H0N1)
        a = H0N1.order // H0.order
        b = H0N1.order // D.order
        if H0N1 in S:
            raise VerificationError("H0 N1 already present although the set is reduced")
        tilde = cur.plus(H0N1, (a, b))
        if D != H1:
            if D in S or D == H0N1:
                raise VerificationError("auxiliary intersection collides with a member")
            tilde = tilde.plus(D, (1,))
        # certified path  tilde -> cur
        w = tilde.weight(H0N1)
        s1 = rdtr_step(G, tilde, H0N1, w.index(a), H0)
        s2 = rdtr_step(G, s1.target, H0N1, 0, D)
        forward = [s1, s2]
        if D != H1:
            forward.append(rded_step(G, s2.target, D, 0, H1, 0))
        if forward[-1].target != cur:
            raise VerificationError("auxiliary multiset does not reduce back to the current set")
        for s in reversed(forward):
            rev = TraceStep(s.rule, s.primitive, G, s.target, s.source, s.split_off, s.certificate, reverse=True, notes=dict(s.notes))
            _tag_status(G, rev)
            trace.append(rev)
        c = collapse_step(G, tilde, H0N1)
        _tag_status(G, c)
        trace.append(c)
        cur, tr2 = reduce_to_reduced(G, c.target)
        for s in tr2.steps:
            _tag_status(G, s)
        trace.extend(tr2)
    got = sorted({_p_part_subgroup(G, Gp, H) for H in cur.set}, key=lambda H: H.key())
    if got != target_parts:
        raise VerificationError("p-parts of the output differ from the reduced p-parts of the input")
    if xi_injection(list(cur.set), list(data.set)) is None:
        raise VerificationError("output is not dominated by the input")
    return cur, trace


def _iii_beta(G: FiniteGroup, S: Sequence[Subgroup]):
    """Check (iii-beta) directly in G; returns (N, m, nu, pair, generators) or None."""
    if len(S) != 2:
        return None
    N = normal_core(G, S)
    q = quotient(G, N)
    Q = q.target
    syl = sylow_subgroups_if_nilpotent(Q)
    if syl is None or 2 not in syl:
        return None
    odd = hall_odd_part(Q)
    m = odd.order
    rho_bar = None
    if m > 1:
        emb_o = subgroup_as_group(Q, odd)
        cg = cyclic_generator(emb_o.group)
        if cg is None:
            return None
        rho_bar = emb_o.to_parent[cg]
    T = syl[2]
    emb = subgroup_as_group(Q, T)
    A, B = (q.image(H) for H in S)
    if not (A.issubset(T) and B.issubset(T)):
        return None
    for first, second, pair in ((A, B, (S[0], S[1])), (B, A, (S[1], S[0]))):
        dp = dihedral_pair(emb.group, emb.pull(first), emb.pull(second))
        if dp is None:
            continue
        gens = {"sigma": q.representatives[emb.to_parent[dp.sigma]], "tau": q.representatives[emb.to_parent[dp.tau]]}
        if rho_bar is not None:
            gens["rho"] = q.representatives[rho_bar]
        return N, m, _log2(dp.n), pair, gens
    return None


def classify_nilpotent(G: FiniteGroup, HH) -> Verdict:
    data = _data(HH)
    syl = sylow_subgroups_if_nilpotent(G)
    if syl is None:
        raise NotNilpotent(f"{G} is not nilpotent")
    if G.order == 1:
        S = data.set
        return Verdict(QP, "NILPOTENT_ALPHA", G, data, WitnessData(G, S[:1], {S[0]: S[0]}, normal_subgroup=S[0]))
    # Sylow tests on the Mackey restrictions (their sets are the p-parts)
    for p in sorted(syl):
        Gp = syl[p]
        parts = _reduced_parts(G, Gp, data.set)
        emb = subgroup_as_group(G, Gp)
        P = emb.group
        local = [emb.pull(A) for A in parts]
        if p != 2:
            v = classify_odd_pgroup(P, local)
            if not v.is_qp:
                return Verdict(NQI, "ODD_P", G, data, failing=f"Sylow {p}-part: {v.failing}")
        else:
            v = classify_two_group(P, srd_choice(P, local))
            if not v.is_qp:
                return Verdict(NQI, v.rationale, G, data, failing=f"Sylow 2-part: {v.failing}")
    # constructive chain  H -> H'' -> H' = srd(H'')
    cur = data
    trace = ReductionTrace(G, data)
    for p in sorted(syl):
        cur, tr = psdp_reduce(G, cur, p)
        trace.extend(tr)
    cur2, tr = strongly_reduce(G, cur)
    for s in tr.steps:
        _tag_status(G, s)
    trace.extend(tr)
    S = cur2.set
    xi = xi_injection(list(S), list(data.set))
    if xi is None:
        raise VerificationError("witness is not dominated by the input")
    if len(S) == 1 and is_normal(G, S[0]) and cyclic_generator(quotient(G, S[0]).target) is not None:
        w = WitnessData(G, S, xi, normal_subgroup=S[0])
        return Verdict(QP, "NILPOTENT_ALPHA", G, data, w, trace)
    beta = _iii_beta(G, S)
    if beta is not None:
        N, m, nu, pair, gens = beta
        w = WitnessData(G, S, xi, normal_subgroup=N, m=m, nu=nu, pair=pair, generators=gens)
        return Verdict(QP, "NILPOTENT_BETA", G, data, w, trace)
    raise VerificationError("Sylow conditions hold but the reduced witness has neither admissible shape")


# ---------------------------------------------------------------------------
# non-nilpotent extras


def classify_dihedral_pair(G: FiniteGroup, HH) -> Verdict:
    """Two-reflection family: ``G/N = D_{2m}`` with the members mapping to ``<tau>``, ``<sigma tau>``."""
    data = _data(HH)
    red, tr = reduce_to_reduced(G, data)
    srd, tr2 = strongly_reduce(G, red)
    tr.extend(tr2)
    S = srd.set
    if len(S) != 2:
        raise OutOfScope("the dihedral family needs exactly two strongly reduced members")
    N = normal_core(G, S)
    q = quotient(G, N)
    A, B = (q.image(H) for H in S)
    for first, second, pair in ((A, B, (S[0], S[1])), (B, A, (S[1], S[0]))):
        dp = dihedral_pair(q.target, first, second)
        if dp is not None and dp.n % 2 == 0:
            Q, qdata, qtr = quotient_descend(G, srd, None, N)
            xi = xi_injection(list(S), list(data.set))
            gens = {"sigma": q.representatives[dp.sigma], "tau": q.representatives[dp.tau]}
            w = WitnessData(G, S, xi, normal_subgroup=N, m=dp.n // 2, pair=pair, generators=gens)
            return Verdict(QP, "DIHEDRAL_PAIR", G, data, w, tr, extra_traces=[qtr])
    raise OutOfScope("not of the dihedral two-reflection shape")


def classify(G: FiniteGroup, HH) -> Verdict:
    """Dispatch on the shape of G; refuses non-nilpotent inputs outside the two extras."""
    data = _data(HH)
    syl = sylow_subgroups_if_nilpotent(G)
    p = _prime_of(G)
    if syl is not None and (p is not None or G.order == 1):
        red, tr = reduce_to_reduced(G, data)
        srd, tr2 = strongly_reduce(G, red)
        tr.extend(tr2)
        S = srd.set
        if len(S) == 1:
            v = classify_norm_one(G, S[0])
        elif p is not None and all(index(G, H) == p for H in S) and is_abelian(G) and all(
            G.element_order(g) in (1, p) for g in range(G.order)
        ):
            v = classify_elementary_abelian(G, S)
        elif p == 2:
            v = classify_two_group(G, S)
        else:
            v = classify_odd_pgroup(G, S)
        return _rebase(v, G, data, tr)
    if syl is not None:
        return classify_nilpotent(G, data)
    red, tr = reduce_to_reduced(G, data)
    S = red.set
    if len(S) == 1 and is_normal(G, S[0]):
        N = S[0]
        Q, qdata, qtr = quotient_descend(G, red, None, N)
        v = classify_norm_one(Q, Q.trivial)
        if v.is_qp:
            w = WitnessData(G, S, xi_injection(list(S), list(data.set)), normal_subgroup=N, generators={
                k: quotient(G, N).representatives[x] for k, x in v.witness.generators.items()
            })
            return Verdict(QP, "EMQP", G, data, w, tr, extra_traces=[qtr])
        return Verdict(NQI, "EMQP", G, data, trace=tr, failing=f"G/N: {v.failing}")
    try:
        return classify_dihedral_pair(G, data)
    except OutOfScope:
        raise OutOfScope(f"{G} is not nilpotent and the input is outside the documented extras") from None


def _rebase(v: Verdict, G: FiniteGroup, data: MultinormData, trace: ReductionTrace) -> Verdict:
    """Attach the original input and the reduction trace to a verdict on the reduced set."""
    w = v.witness
    if w is not None:
        w.xi = xi_injection(list(w.members), list(data.set))
        if w.xi is None:
            raise VerificationError("witness is not dominated by the input")
    return Verdict(v.status, v.rationale, G, data, w, trace, v.failing)


# ---------------------------------------------------------------------------
# consistency with the cohomological oracle


@dataclass
class ConsistencyReport:
    verdict: Verdict
    obstructions: list  # (Subgroup, FinAb)
    consistent: bool
    note: str

    def to_json(self) -> dict:
        G = self.verdict.group
        return {
            "status": self.verdict.status,
            "rationale": self.verdict.rationale,
            "consistent": self.consistent,
            "note": self.note,
            "obstructions": [{"subgroup": subgroup_label(G, H), "sha": str(A)} for H, A in self.obstructions],
        }


def cross_check(G: FiniteGroup, HH) -> ConsistencyReport:
    from .cohomology import obstruction_report

    v = classify(G, HH)
    rep = obstruction_report(G, v.data)
    if v.is_qp:
        ok = rep.is_empty
        note = "no obstruction, as required" if ok else "positive verdict contradicted by a nonzero Sha"
    else:
        ok = True
        note = "obstruction detected" if not rep.is_empty else "no Sha obstruction; negativity rests on the structural argument"
    return ConsistencyReport(v, rep.entries, ok, note)
