import random

from hypothesis import given, settings, strategies as st

from mpst.core import EMPTY, Judgement, ProcessEnv, compose, subtype, unfold
from mpst.errors import OverlappingEndpoint, Unmergeable
from mpst.proc import Par, check_system, mirror_context, proc_step, typecheck
from mpst.projection import merge
from mpst.safety import dual, is_deadlock_free, is_live
from mpst.semantics import canonical, enabled, reachable, step
from mpst.syntax import parse_global, parse_local, parse_process, pretty

from generators import (
    implement_system, projectable_globals, random_context, random_global, random_local,
    random_process, widen,
)
from oracles import isomorphic, naive_live

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_roundtrip(seed):
    rng = random.Random(seed)
    g = random_global(rng)
    assert parse_global(pretty(g)) == g
    t = random_local(rng)
    assert parse_local(pretty(t)) == t
    p = random_process(rng)
    assert parse_process(pretty(p)) == p


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_subtype_preorder(seed):
    rng = random.Random(seed)
    a = random_local(rng, 5)
    b = widen(rng, a)
    c = widen(rng, b)
    assert subtype(a, a)
    assert subtype(a, b) and subtype(b, c) and subtype(a, c)
    assert subtype(a, unfold(a)) and subtype(unfold(a), a)
    x, y = random_local(rng, 3, ("p",)), random_local(rng, 3, ("p",))
    if subtype(x, y) and subtype(y, a):
        assert subtype(x, a)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_merge_laws(seed):
    rng = random.Random(seed)
    a = random_local(rng, 3, ("p", "q"), session_sorts=False)
    b = widen(rng, a) if rng.random() < 0.5 else random_local(rng, 3, ("p", "q"), session_sorts=False)
    assert merge(a, a) == a
    try:
        ab = merge(a, b)
    except Unmergeable:
        try:
            merge(b, a)
        except Unmergeable:
            return
        raise AssertionError("merge is not symmetric in definedness")
    assert merge(b, a) == ab


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_compose_laws(seed):
    rng = random.Random(seed)
    parts = [random_context(rng, 2, 2, session) for session in ("s", "t", "u")]
    a, b, c = parts
    assert compose(a, b) == compose(b, a)
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(a, EMPTY) == a
    if len(a):
        try:
            compose(a, a)
        except OverlappingEndpoint:
            pass
        else:
            raise AssertionError("overlap accepted")


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_dual_symmetric(seed):
    rng = random.Random(seed)
    a = random_local(rng, 3, ("p",), session_sorts=False)
    b = random_local(rng, 3, ("p",), session_sorts=False)
    assert dual(a, b) == dual(b, a)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_context_semantics(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, rng.randint(2, 3), 3)
    for a in enabled(ctx):
        nxt = step(ctx, a)
        assert nxt == step(ctx, a)
        assert {ep for ep in ctx if nxt[ep] != ctx[ep]} <= set(a.endpoints)
    live = is_live(ctx)
    assert live.holds == naive_live(ctx)
    if live.holds:
        assert is_deadlock_free(ctx).holds
    else:
        state = ctx
        for a in live.witness["trace"]:
            state = step(state, a)
        assert canonical(state) == live.witness["state"]


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_unfold_isomorphism(seed):
    rng = random.Random(seed)
    ctx = random_context(rng, 3, 3)
    for ep, t in ctx.items():
        other = ctx.update({ep: unfold(t)})
        assert isomorphic(reachable(ctx), reachable(other))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_typed_systems_mirror_and_split(seed):
    rng = random.Random(seed)
    _, ctx = next(projectable_globals(seed, 1))
    p = implement_system(ctx, rng)
    assert check_system(p, ctx).holds
    for action, _ in proc_step(p):
        mirror_context(ctx, action)
    if isinstance(p, Par):
        swapped = typecheck(Judgement(ProcessEnv(), ctx, EMPTY, Par(p.right, p.left)))
        assert swapped.holds
