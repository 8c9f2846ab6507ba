import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from artifact.diagrams import Event, Framed, Ident, Still
from artifact.exactalg import LaurentPoly, RatFunc

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

EVENTS = list(Event)

# (criterion, status, detail) lines collected by test_acceptance
ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{status} criterion {n}: {detail}")


@st.composite
def laurent(draw, max_terms=4, span=5, bound=6):
    n = draw(st.integers(0, max_terms))
    coeffs = {}
    for _ in range(n):
        coeffs[draw(st.integers(-span, span))] = draw(st.integers(-bound, bound))
    return LaurentPoly(coeffs)


@st.composite
def nonzero_laurent(draw, **kw):
    p = draw(laurent(**kw))
    return p if p else LaurentPoly.monomial(draw(st.integers(-3, 3)), draw(st.sampled_from([1, -1, 2])))


@st.composite
def ratfunc(draw):
    return RatFunc(draw(laurent(max_terms=3)), draw(nonzero_laurent(max_terms=2, span=3, bound=3)))


@st.composite
def nonzero_ratfunc(draw):
    return RatFunc(draw(nonzero_laurent(max_terms=3)), draw(nonzero_laurent(max_terms=2, span=3, bound=3)))


@st.composite
def stills(draw, source=None, max_events=4, max_width=4):
    """A random still whose widths stay at most max_width."""
    w = draw(st.integers(0, max_width)) if source is None else source
    evs = []
    for _ in range(draw(st.integers(1, max_events))):
        options = []
        for e in EVENTS:
            if w - e.source + e.target > max_width or w < e.source:
                continue
            for m in range(w - e.source + 1):
                options.append(Framed(m, e, w - e.source - m))
        choice = draw(st.sampled_from(options + [Ident(w)]))
        evs.append(choice)
        w = choice.target
    return Still(tuple(evs))


@st.composite
def semi_normal(draw):
    """A strongly normal assignment with random Laurent coordinates."""
    from artifact.ampsolve import AmplitudeAssignment, all_params

    return AmplitudeAssignment({p: draw(laurent(max_terms=2, span=3, bound=4)) for p in all_params()})


@pytest.fixture(scope="session")
def balanced():
    """Lazily built and solved Assoc(U), shared across modules."""
    from artifact.ampsolve import build_system, solve_system

    cache = {}

    def get(u: str):
        if u not in cache:
            system = build_system(u)
            cache[u] = (system, solve_system(system.deduped))
        return cache[u]

    return get


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_fraction(r: random.Random) -> Fraction:
    return Fraction(r.randint(-9, 9), r.randint(1, 6))


def _segment(events, width):
    return Still(tuple(events)) if events else Still.identity(width)


def flicker_options(s: Still, max_width: int = 5):
    """Flickers with source s from catalog transitions and distant commutations, skipping identity padding."""
    from artifact.movemoves import swapped
    from artifact.movies import Flicker
    from artifact.transitions import catalog_finite, match_segments

    core = list(s.core())
    widths = [s.source] + [e.target for e in core]
    out = []
    for e in catalog_finite():
        if e.ttype == 0:
            continue
        sc = e.src.core()
        k = len(sc)
        for i in range(len(core) - k + 1):
            w = widths[i]
            if k:
                m = core[i].m - sc[0].m
                n = w - e.in_ - m
                if m < 0 or n < 0 or tuple(x.framed(m, n) for x in sc) != tuple(core[i:i + k]):
                    continue
                framings = [(m, n)]
            else:
                framings = [(m, w - e.in_ - m) for m in range(w - e.in_ + 1)] if w >= e.in_ else []
            for m, n in framings:
                if w - e.in_ + e.out > max_width:
                    continue
                out.append(Flicker(e, _segment(core[:i], widths[0]), m, n, _segment(core[i + k:], widths[i + k])))
    for i in range(len(core) - 1):
        try:
            new = swapped(core[i], core[i + 1])
        except ValueError:
            continue
        for mt in match_segments(_segment(core[i:i + 2], widths[i]), Still(new)):
            if mt.et.ttype == 8:
                out.append(Flicker(mt.et, _segment(core[:i], widths[0]), mt.m, mt.n, _segment(core[i + 2:], widths[i + 2])))
    return out


@st.composite
def movies(draw, max_steps=4):
    """Random walks through the transition graph."""
    from artifact.movies import Movie

    cur = draw(stills(max_events=3, max_width=3)).reduced()
    flickers = []
    for _ in range(draw(st.integers(1, max_steps))):
        opts = flicker_options(cur)
        if not opts:
            break
        f = draw(st.sampled_from(opts))
        flickers.append(f)
        cur = f.target()
    if not flickers:
        return Movie.identity(cur)
    return Movie(tuple(flickers))
