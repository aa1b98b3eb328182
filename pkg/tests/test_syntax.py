import random

import pytest

from mpst.core import BOOL, END, GEND, INT, STR, UNIT, Branch, Choice, Comm, Endpoint, Rec, Select, Var
from mpst.errors import DuplicateEndpoint, ParseError, UnboundVariable, WellFormednessError
from mpst.proc.terms import NIL, Par, PBranch, PSelect, Res
from mpst.syntax import (
    parse_context, parse_global, parse_local, parse_process, parse_sort, pretty,
)

from conftest import read
from generators import random_context, random_global, random_local, random_process


def test_three_role_global_structure(three_role_global):
    g = three_role_global
    assert isinstance(g, Comm) and (g.sender, g.receiver) == ("p", "q")
    assert g.labels == ("m1", "stop")
    assert g.get("m1").sort == INT and g.get("stop").sort == UNIT
    inner = g.get("m1").cont
    assert (inner.sender, inner.receiver, inner.get("m2").sort) == ("q", "r", STR)
    assert inner.get("m2").cont.get("m3").sort == BOOL


def test_trivial_parses():
    assert parse_global("end") == GEND
    assert parse_local("end") == END
    assert parse_process("0") == NIL
    assert parse_context("") == {}
    assert parse_process("(new t)(0 | 0)") == Res("t", Par(NIL, NIL))


def test_rec_local():
    assert parse_local("rec X. q!{ l(int). X }") == Rec("X", Select("q", [Choice("l", INT, Var("X"))]))


def test_single_branch_braces_optional():
    assert parse_local("q!m(int).end") == parse_local("q!{ m(int). end }")
    assert parse_global("p->q l. end") == parse_global("p->q{ l. end }")


def test_session_sort():
    s = parse_sort("<r?{ x. end }>")
    assert s.type == Branch("r", [Choice("x", UNIT, END)])


def test_context_entries_and_duplicates():
    ctx = parse_context("s[p]: end")
    assert dict(ctx) == {Endpoint("s", "p"): END}
    assert len(parse_context(read("three_role.ctx"))) == 3
    with pytest.raises(DuplicateEndpoint):
        parse_context("s[p]: end, s[p]: end")


@pytest.mark.parametrize("text, parser", [
    ("q!{ }", parse_local),
    ("p->q{ l. }", parse_global),
    ("s[p]: end,", parse_context),
    ("s[p][q]!l(1)", parse_process),
    ("q!{ a. end", parse_local),
    ("@", parse_local),
])
def test_parse_errors_have_positions(text, parser):
    with pytest.raises(ParseError) as info:
        parser(text, "f.txt")
    err = info.value
    assert 0 <= err.span.start <= err.span.end <= len(text) + 1
    assert str(err).startswith("f.txt:1:")
    assert "expected" in str(err) and "found" in str(err)


def test_parse_error_line_col():
    text = "q!{ a. end,\n   b. }"
    with pytest.raises(ParseError) as info:
        parse_local(text, "x")
    assert str(info.value).startswith("x:2:7:")


@pytest.mark.parametrize("text", ["p->p{ l. end }", "p->q{ a. end, a. end }", "rec X. X", "X",
                                  "p->q{ l. Y }"])
def test_global_well_formedness(text):
    with pytest.raises(WellFormednessError):
        parse_global(text)


def test_unbound_process_variables():
    with pytest.raises(UnboundVariable):
        parse_process("s[p][q]!l(x). 0")
    with pytest.raises(UnboundVariable):
        parse_process("X")


def test_process_shapes():
    p = parse_process("s[p][q]!m1(42). s[p][r]?{ m3(b). 0 }")
    assert isinstance(p, PSelect) and p.label == "m1" and p.chan == Endpoint("s", "p")
    assert isinstance(p.cont, PBranch) and p.cont.arm("m3").binder == "b"
    whole = parse_process(read("three_role.proc"))
    assert isinstance(whole, Par)


def test_prefix_binds_tighter_than_par():
    p = parse_process("s[p][q]!a. 0 | 0")
    assert isinstance(p, Par) and isinstance(p.left, PSelect)


def test_comments_ignored():
    assert parse_local("// hello\nq!{ a. end } // bye") == parse_local("q!a.end")


def test_pretty_end_and_three_role():
    assert pretty(END) == "end"
    sp = "q!{ m1(int). r?{ m3(bool). end }, stop. end }"
    assert parse_local(pretty(parse_local(sp))) == parse_local(sp)
    g = parse_global(read("three_role.global"))
    assert "".join(pretty(g).split()) == "p->q{m1(int).q->r{m2(str).r->p{m3(bool).end}},stop.q->r{quit.end}}"


def test_pretty_string_escapes_roundtrip():
    p = parse_process('s[p][q]!m("a \\"b\\" c"). 0')
    assert parse_process(pretty(p)) == p


def test_roundtrip_generated():
    rng = random.Random(11)
    for _ in range(300):
        g = random_global(rng)
        assert parse_global(pretty(g)) == g
        t = random_local(rng)
        assert parse_local(pretty(t)) == t
        c = random_context(rng)
        assert parse_context(pretty(c)) == c
        p = random_process(rng)
        assert parse_process(pretty(p)) == p
