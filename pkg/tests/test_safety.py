import random

import pytest

from mpst.core import END, Endpoint
from mpst.errors import PartialUndefined
from mpst.safety import Verdict, dual, is_consistent, is_deadlock_free, is_live, partial_project
from mpst.semantics import canonical, step
from mpst.syntax import parse_context, parse_local, pretty_partial

from conftest import read
from generators import mutate_context, projectable_globals, random_context
from oracles import naive_deadlock_free, naive_live

C, L = parse_context, parse_local
CYCLIC = read("cyclic.ctx")


def test_verdict_needs_witness():
    with pytest.raises(ValueError):
        Verdict("liveness", False)


def test_three_role_separation(three_role_ctx):
    assert is_live(three_role_ctx).holds
    assert is_deadlock_free(three_role_ctx).holds
    v = is_consistent(three_role_ctx)
    assert not v.holds
    assert v.witness["pair"] == [Endpoint("s", "p"), Endpoint("s", "r")]


def test_two_inputs_not_live():
    v = is_live(C("s[p]: q?{ m. end }, s[q]: p?{ m. end }"))
    assert not v.holds
    assert v.witness["state_id"] == 0 and v.witness["endpoint"] == Endpoint("s", "p")
    assert v.witness["trace"] == []


def test_cyclic_wait():
    ctx = C(CYCLIC)
    assert is_consistent(ctx).holds
    assert not is_live(ctx).holds
    d = is_deadlock_free(ctx)
    assert not d.holds and d.witness["state_id"] == 0


def test_empty_context():
    assert is_live(C("")).holds and is_deadlock_free(C("")).holds and is_consistent(C("")).holds


def test_missing_peer_not_live_but_consistent():
    ctx = C("s[p]: q!{ m. end }")
    assert not is_live(ctx).holds
    assert is_consistent(ctx).holds


def test_output_without_matching_input_not_live():
    # q can fire via 'a' but is offered 'b' it cannot accept
    ctx = C("s[p]: q!{ a. end, b. end }, s[q]: p?{ a. end }")
    v = is_live(ctx)
    assert not v.holds and "b" in v.witness["reason"]


def test_liveness_is_existential():
    # q may starve r forever, but some path lets r fire
    ctx = C("s[p]: rec X. q!{ again. X, done. end }, s[q]: rec X. p?{ again. X, done. r!{ go. end } },"
            " s[r]: q?{ go. end }")
    assert is_live(ctx).holds


def test_partial_project_examples():
    with pytest.raises(PartialUndefined):
        partial_project(L(read("S_p.local")), "r")
    assert pretty_partial(partial_project(L("q!{ m(int). end }"), "q")) == "!{m(int). end}"
    assert partial_project(L("q!{ m(int). end }"), "r") == END


def test_dual_examples():
    assert dual(END, END)
    assert dual(partial_project(L("q!{ m(int). end }"), "q"), partial_project(L("p?{ m(int). end }"), "p"))
    assert not dual(L("q!{ m(int). end }"), L("q?{ m(str). end }"))
    assert dual(L("rec X. q!{ a. X }"), L("q?{ a. rec Y. q?{ a. Y } }"))


def test_consistent_two_party():
    assert is_consistent(C("s[p]: q!{ m(int). end }, s[q]: p?{ m(int). end }")).holds


def _corpus(seed=31, n=400):
    rng = random.Random(seed)
    out = []
    for _, ctx in projectable_globals(seed, n // 2):
        out.append(ctx)
        out.append(mutate_context(rng, ctx))
    out += [random_context(rng, rng.randint(2, 3), 3) for _ in range(n // 2)]
    return out


def test_live_implies_deadlock_free_and_oracles():
    counts = [0, 0]
    for ctx in _corpus():
        live = is_live(ctx)
        dead = is_deadlock_free(ctx)
        assert live.holds == naive_live(ctx)
        assert dead.holds == naive_deadlock_free(ctx)
        if live.holds:
            assert dead.holds
        counts[live.holds] += 1
    assert min(counts) > 20


def test_witnesses_replay():
    for ctx in _corpus(32):
        v = is_live(ctx)
        if v.holds:
            continue
        state = ctx
        for a in v.witness["trace"]:
            state = step(state, a)
        assert canonical(state) == v.witness["state"]
        assert v.witness["endpoint"] in v.witness["state"]


def test_dual_symmetric():
    for ctx in _corpus(33, 200):
        eps = list(ctx)
        for a in eps:
            for b in eps:
                if a == b:
                    continue
                try:
                    pa, pb = partial_project(ctx[a], b.role), partial_project(ctx[b], a.role)
                except PartialUndefined:
                    continue
                assert dual(pa, pb) == dual(pb, pa)
