import json
import random

import pytest

from mpst.core import INT, UNIT, Endpoint, unfold
from mpst.errors import NotEnabled, StateLimitExceeded
from mpst.semantics import CtxAction, canonical, enabled, is_final, reachable, step
from mpst.syntax import parse_context

from conftest import read
from generators import projectable_globals, random_context
from oracles import explore, isomorphic, tree_nodes

C = parse_context


def act(sender, receiver, label, sort=UNIT, session="s"):
    return CtxAction(session, sender, receiver, label, sort)


def test_enabled_three_role(three_role_ctx):
    assert enabled(three_role_ctx) == [act("p", "q", "m1", INT), act("p", "q", "stop")]
    assert [str(a) for a in enabled(three_role_ctx)] == ["s: p->q: m1(int)", "s: p->q: stop(unit)"]


def test_enabled_trivial():
    assert enabled(C("s[p]: end")) == []
    assert enabled(C("s[p]: q?{ m. end }, s[q]: p?{ m. end }")) == []


def test_enabled_payload_must_agree():
    ctx = C("s[p]: q!{ m(int). end }, s[q]: p?{ m(str). end }")
    assert enabled(ctx) == []


def test_step_three_role(three_role_ctx):
    after_stop = step(three_role_ctx, act("p", "q", "stop"))
    assert after_stop == C("s[p]: end, s[q]: r!{ quit. end }, "
                           "s[r]: q?{ m2(str). p!{ m3(bool). end }, quit. end }")
    after_m1 = step(three_role_ctx, act("p", "q", "m1", INT))
    assert after_m1 == C("s[p]: r?{ m3(bool). end }, s[q]: r!{ m2(str). end }, "
                         "s[r]: q?{ m2(str). p!{ m3(bool). end }, quit. end }")


def test_step_not_enabled(three_role_ctx):
    with pytest.raises(NotEnabled):
        step(C("s[p]: end"), act("p", "q", "m1", INT))
    with pytest.raises(NotEnabled):
        step(three_role_ctx, act("p", "q", "m1", UNIT))
    with pytest.raises(NotEnabled):
        step(three_role_ctx, act("q", "r", "m2"))


def test_reachable_trivial():
    lts = reachable(C("s[p]: end"))
    assert len(lts.states) == 1 and lts.edges == ()
    assert len(reachable(C("")).states) == 1


def test_reachable_three_role(three_role_ctx):
    lts = reachable(three_role_ctx)
    # the m3 and quit branches meet in the same finished context
    assert len(lts.states) == 5 and len(lts.edges) == 5
    assert tree_nodes(three_role_ctx) == 6
    finals = [i for i, s in enumerate(lts.states) if len(s) == 0]
    assert len(finals) == 1
    assert sum(1 for _, _, d in lts.edges if d == finals[0]) == 2


def test_reachable_recursive_loop():
    lts = reachable(C(read("loop.ctx")))
    assert len(lts.states) == 1
    assert lts.edges == ((0, act("p", "q", "l", INT), 0),)


def test_state_limit(three_role_ctx):
    with pytest.raises(StateLimitExceeded):
        reachable(three_role_ctx, max_states=3)


def test_is_final(three_role_ctx):
    assert is_final(C(""))
    assert is_final(C("s[p]: end, s[q]: rec X. end"))
    assert not is_final(three_role_ctx)


def test_canonical_drops_end_and_unfolds():
    ctx = C("s[p]: end, s[q]: rec X. p?{ a. X }")
    can = canonical(ctx)
    assert list(can) == [Endpoint("s", "q")]
    assert can[Endpoint("s", "q")] == unfold(ctx[Endpoint("s", "q")])


def test_trace_replays(three_role_ctx):
    lts = reachable(three_role_ctx)
    for i, state in enumerate(lts.states):
        ctx = three_role_ctx
        for a in lts.trace_to(i):
            ctx = step(ctx, a)
        assert canonical(ctx) == state


def test_exports_deterministic(three_role_ctx):
    a = json.dumps(reachable(three_role_ctx).to_json(), sort_keys=True)
    b = json.dumps(reachable(C(read("three_role.ctx"))).to_json(), sort_keys=True)
    assert a == b
    data = json.loads(a)
    assert data["initial"] == 0 and len(data["states"]) == 5
    dot = reachable(three_role_ctx).to_dot()
    assert dot.startswith("digraph") and dot.count(" -> ") == 5


def _corpus(n=200):
    rng = random.Random(21)
    out = [ctx for _, ctx in projectable_globals(22, n // 2)]
    out += [random_context(rng, rng.randint(2, 3), 3) for _ in range(n // 2)]
    return out


def test_frame_and_determinism():
    for ctx in _corpus():
        for a in enabled(ctx):
            nxt = step(ctx, a)
            assert nxt == step(ctx, a)
            changed = {ep for ep in ctx if nxt[ep] != ctx[ep]}
            assert changed <= set(a.endpoints)


def test_enabled_step_agreement():
    for ctx in _corpus(100):
        en = set(enabled(ctx))
        for ep, t in ctx.items():
            for ep2 in ctx:
                if ep2.session != ep.session or ep2 == ep:
                    continue
                for label in ("a", "b", "c", "m1", "m2", "stop"):
                    for sort in (INT, UNIT):
                        a = CtxAction(ep.session, ep.role, ep2.role, label, sort)
                        try:
                            step(ctx, a)
                            ok = True
                        except NotEnabled:
                            ok = False
                        assert ok == (a in en)


def test_matches_oracle_exploration():
    for ctx in _corpus():
        lts = reachable(ctx)
        order, trans = explore(ctx)
        assert set(lts.states) == set(order)
        assert len(lts.edges) == sum(len(v) for v in trans.values())


def test_unfolding_an_entry_gives_isomorphic_lts():
    n = 0
    for ctx in _corpus(300):
        for ep, t in ctx.items():
            if type(t).__name__ == "Rec":
                other = ctx.update({ep: unfold(t)})
                assert isomorphic(reachable(ctx), reachable(other))
                n += 1
    assert n > 20
