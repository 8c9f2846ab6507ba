import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.diagrams import F, Ident, NotComposable, S, Still, event_arity, still_compose, still_frame, still_sym

from conftest import stills


@pytest.mark.parametrize("name, arity", [("Cup", (0, 2)), ("Cap", (2, 0)), ("NE", (2, 2)), ("NW", (2, 2))])
def test_event_arity(name, arity):
    assert event_arity(name) == arity


def test_framed_arity():
    f = F(3, "Cap", 1)
    assert (f.source, f.target) == (6, 4)
    assert (Ident(4).source, Ident(4).target) == (4, 4)


def test_compose_cup_cap():
    s = still_compose(S(F(0, "Cup", 0)), S(F(0, "Cap", 0)))
    assert s == S(F(0, "Cup", 0), F(0, "Cap", 0))
    assert (s.source, s.target) == (0, 0)


def test_compose_keeps_identity_event():
    s = still_compose(Still.identity(2), S(F(0, "NE", 0)))
    assert s.events == (Ident(2), F(0, "NE", 0))


def test_compose_arity_mismatch():
    with pytest.raises(NotComposable):
        still_compose(S(F(0, "Cap", 0)), S(F(0, "Cap", 0)))


def test_frame_examples():
    assert still_frame(3, S(F(0, "Cap", 0)), 1) == S(F(3, "Cap", 1))
    s = S(F(2, "NW", 0), F(1, "Cap", 1))
    assert still_frame(0, s, 0) == s
    assert still_frame(1, Still.identity(2), 2) == Still.identity(5)


def test_sym_examples():
    assert still_sym("f", S(F(2, "NW", 0), F(1, "Cap", 1))) == S(F(2, "NE", 0), F(1, "Cap", 1))
    assert still_sym("t", S(F(0, "Cup", 0), F(0, "NE", 0))) == S(F(0, "NW", 0), F(0, "Cap", 0))


def test_source_target_of_example_still():
    s = S(F(2, "NW", 0), F(1, "Cap", 1), F(0, "NE", 0))
    assert (s.source, s.target) == (4, 2)


@settings(max_examples=1000)
@given(st.data())
def test_compose_associative_and_arities(data):
    a = data.draw(stills())
    b = data.draw(stills(source=a.target))
    c = data.draw(stills(source=b.target))
    ab = still_compose(a, b)
    assert (ab.source, ab.target) == (a.source, b.target)
    assert still_compose(ab, c) == still_compose(a, still_compose(b, c))


@settings(max_examples=1000)
@given(st.data(), st.integers(0, 2), st.integers(0, 2))
def test_frame_distributes(data, m, n):
    a = data.draw(stills())
    b = data.draw(stills(source=a.target))
    assert still_frame(m, still_compose(a, b), n) == still_compose(still_frame(m, a, n), still_frame(m, b, n))


@settings(max_examples=1000)
@given(st.data())
def test_symmetries(data):
    a = data.draw(stills())
    b = data.draw(stills(source=a.target))
    for pi in "ft":
        assert still_sym(pi, still_sym(pi, a)) == a
    assert still_sym("f", still_sym("t", a)) == still_sym("t", still_sym("f", a))
    assert still_sym("t", still_compose(a, b)) == still_compose(still_sym("t", b), still_sym("t", a))
