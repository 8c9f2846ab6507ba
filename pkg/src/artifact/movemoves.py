"""Movie-moves: the reduced catalog, the type-31 generator, symmetry and derivation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Optional, Sequence

from .diagrams import Event, Framed, Still, concat
from .movies import Flicker, Movie, NotComposable
from .transitions import (
    SYM,
    ElementaryTransition,
    catalog_finite,
    et8_make,
    lookup,
    sym_apply_et,
)

B_TYPES = tuple(range(1, 15)) + (21,) + tuple(range(23, 31))

# number of BL-reduced moves of each type in B
N_RED = {
    1: 1, 2: 1, 3: 1, 4: 1, 5: 6, 6: 6, 7: 2, 8: 1, 9: 1, 10: 1, 11: 2, 12: 2, 13: 1, 14: 3,
    21: 1, 23: 2, 24: 1, 25: 2, 26: 1, 27: 1, 28: 1, 29: 1, 30: 1,
}


class NotGrammatical(ValueError):
    pass


class CountMismatch(ValueError):
    def __init__(self, ttype: int, expected: int, got: int):
        super().__init__(f"type {ttype}: expected {expected} reduced moves, found {got}")
        self.ttype, self.expected, self.got = ttype, expected, got


class TypeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class MoviePair:
    """A movie-move (left == right)."""

    left: Movie
    right: Movie
    mmtype: Optional[int] = None
    reduced: bool = False

    def __post_init__(self):
        if not (
            self.left.source().same_reduced(self.right.source())
            and self.left.target().same_reduced(self.right.target())
        ):
            raise NotGrammatical(f"type {self.mmtype}: movies differ in source or target")

    @property
    def in_(self) -> int:
        return self.left.in_

    @property
    def out(self) -> int:
        return self.left.out

    def key(self) -> tuple:
        return (self.left, self.right)

    def sym(self, pi: str) -> "MoviePair":
        return MoviePair(self.left.sym(pi), self.right.sym(pi), self.mmtype, self.reduced)

    def converse(self) -> "MoviePair":
        return MoviePair(self.right, self.left, self.mmtype, self.reduced)


def sym_closure(pairs: Iterable[MoviePair]) -> list[MoviePair]:
    """All pi.P for pi in SYM, duplicates removed, in (pair, symmetry) order."""
    seen: dict[tuple, MoviePair] = {}
    for p in pairs:
        for pi in SYM:
            q = p.sym(pi)
            seen.setdefault(q.key(), q)
    return list(seen.values())


def derive(
    p: MoviePair,
    pi: str = "I",
    m: int = 0,
    n: int = 0,
    lower: Optional[Still] = None,
    upper: Optional[Still] = None,
    flip: bool = False,
) -> MoviePair:
    """lower o (m . (pi . p) . n) o upper, optionally conversed."""
    q = p.sym(pi)
    left, right = q.left.frame(m, n), q.right.frame(m, n)
    lo = lower if lower is not None else Still.identity(left.in_)
    up = upper if upper is not None else Still.identity(left.out)
    if lo.target != left.in_ or up.source != left.out:
        raise NotComposable("sandwich stills do not fit the framed movie-move")
    out = MoviePair(left.sandwich(lo, up), right.sandwich(lo, up), p.mmtype, False)
    return out.converse() if flip else out


# ---------------------------------------------------------------------------
# Movie-move 31
# ---------------------------------------------------------------------------


def mm31(e1: ElementaryTransition, e2: ElementaryTransition, m1: int, n1: int, m2: int, n2: int) -> MoviePair:
    """The pair (M1, M2): E1 then E2 versus E2 then E1, with E1 below E2."""
    if m1 + e1.out + n1 != m2 + e2.in_ + n2:
        raise NotComposable("framings violate m1+out(E1)+n1 = m2+in(E2)+n2")
    u1, v1 = e1.src.frame(m1, n1), e1.tgt.frame(m1, n1)
    u2, v2 = e2.src.frame(m2, n2), e2.tgt.frame(m2, n2)
    w_in, w_out = u1.source, u2.target
    one_in, one_out = Still.identity(w_in), Still.identity(w_out)
    left = Movie((
        Flicker(e1, one_in, m1, n1, u2),
        Flicker(e2, v1, m2, n2, one_out),
    ))
    right = Movie((
        Flicker(e2, u1, m2, n2, one_out),
        Flicker(e1, one_in, m1, n1, v2),
    ))
    return MoviePair(left, right, 31, True)


def algorithm_a_quadruples(t1: int, t2: int) -> list[tuple[int, int, int, int]]:
    """The t1+t2+1 framings (m1, n1, m2, n2) of the reduced type-31 moves."""
    out: list[tuple[int, int, int, int]] = []
    if t1 < t2:
        out += [(0, t2 - s, t1 - s, 0) for s in range(t1 + 1)]
        out += [(s1, t2 - t1 - s1, 0, 0) for s1 in range(1, t2 - t1)]
        out += [(t2 - s, 0, 0, t1 - s) for s in range(t1 + 1)]
    elif t1 == t2:
        out += [(0, t1 - s, t1 - s, 0) for s in range(t1)]
        out.append((0, 0, 0, 0))
        out += [(t1 - s, 0, 0, t1 - s) for s in range(t1)]
    else:
        out += [(0, t2 - s, t1 - s, 0) for s in range(t2 + 1)]
        out += [(0, 0, s1, t1 - t2 - s1) for s1 in range(t1 - t2 + 1)]
        out += [(t2 - s, 0, 0, t1 - s) for s in range(t2 + 1)]
        # 3A(t2) and 3C(t2) coincide with the two extreme 3B framings
        out = list(dict.fromkeys(out))
    return out


def base_pairs(ordered: bool = False, include_et0: bool = True) -> list[tuple[ElementaryTransition, ElementaryTransition]]:
    cat = [e for e in catalog_finite() if include_et0 or e.ttype != 0]
    if ordered:
        return [(a, b) for a in cat for b in cat]
    return [(cat[i], cat[j]) for i in range(len(cat)) for j in range(i, len(cat))]


def gen_mm31_reduced(ordered: bool = False, include_et0: bool = True) -> list[MoviePair]:
    out = []
    for e1, e2 in base_pairs(ordered, include_et0):
        for quad in algorithm_a_quadruples(e1.out, e2.in_):
            out.append(mm31(e1, e2, *quad))
    return out


# ---------------------------------------------------------------------------
# The BL-reduced catalog
# ---------------------------------------------------------------------------


def _parse_catalog(text: str) -> Iterator[tuple[int, str, str]]:
    from .sfnotation import SfSyntaxError

    ttype: Optional[int] = None
    buf: list[str] = []
    movies: list[str] = []
    for raw in text.splitlines():
        line = raw.split("%", 1)[0]
        m = re.match(r"\s*type\s+(\d+)\s*$", line)
        if m:
            if buf and "".join(buf).strip():
                raise SfSyntaxError(f"unterminated movie before type {m.group(1)}")
            ttype = int(m.group(1))
            buf, movies = [], []
            continue
        rest = line
        while "#" in rest:
            head, rest = rest.split("#", 1)
            buf.append(head)
            movies.append(" ".join(buf) + " #")
            buf = []
            if len(movies) == 2:
                if ttype is None:
                    raise SfSyntaxError("movie pair without a type line")
                yield ttype, movies[0], movies[1]
                movies = []
        buf.append(rest)


def load_bl_reduced(text: Optional[str] = None, check_counts: bool = True) -> list[MoviePair]:
    """Read the reduced catalog (types in B) from sf-notation records."""
    from .sfnotation import parse_movie

    if text is None:
        text = resources.files("artifact").joinpath("data").joinpath("bl_reduced.txt").read_text()
    out = []
    for ttype, a, b in _parse_catalog(text):
        out.append(MoviePair(parse_movie(a, "cpp"), parse_movie(b, "cpp"), ttype, True))
    if check_counts:
        counts: dict[int, int] = {}
        for p in out:
            counts[p.mmtype] = counts.get(p.mmtype, 0) + 1
        for t in sorted(set(N_RED) | set(counts)):
            if counts.get(t, 0) != N_RED.get(t, 0):
                raise CountMismatch(t, N_RED.get(t, 0), counts.get(t, 0))
    return out


@lru_cache(maxsize=1)
def bl_catalog() -> tuple[MoviePair, ...]:
    return tuple(load_bl_reduced())


def type1_reduced() -> MoviePair:
    """[0,Cap,0] => [0,NW,0][0,Cap,0] => [0,Cap,0] versus the identity on [0,Cap,0]."""
    cap = lookup("ET1tR").src
    left = Movie((Flicker.bare(lookup("ET1tR")), Flicker.bare(lookup("ET1t"))))
    return MoviePair(left, Movie.identity(cap), 1, True)


TYPE5_ETS = ("ET3tmb", "ET3tbm", "ET3mbt", "ET3tmbR", "ET3tbmR", "ET3mbtR")


def type5_reduced() -> list[MoviePair]:
    """S => T => S (a type-3 transition and its reverse) versus the identity on S."""
    out = []
    for name in TYPE5_ETS:
        e = lookup(name)
        back = sym_apply_et("R", e)
        left = Movie((Flicker.bare(e), Flicker.bare(back)))
        out.append(MoviePair(left, Movie.identity(e.src), 5, True))
    return out


# ---------------------------------------------------------------------------
# Building movies by local rewrites
# ---------------------------------------------------------------------------


def _core_widths(s: Still) -> tuple[list[Framed], list[int]]:
    core = list(s.core())
    widths = [s.source] + [e.target for e in core]
    return core, widths


def _segment(events: Sequence[Framed], width: int) -> Still:
    return Still(tuple(events)) if events else Still.identity(width)


def rewrite_flicker(s: Still, i: int, j: int, new: Sequence[Framed], ttype: Optional[int] = None) -> Flicker:
    """The flicker replacing core events i..j-1 of s by new (types checked when given)."""
    from .transitions import match_segments

    core, widths = _core_widths(s)
    if not 0 <= i <= j <= len(core):
        raise IndexError(f"segment {i}:{j} outside a still of {len(core)} events")
    src_seg = _segment(core[i:j], widths[i])
    tgt_seg = _segment(new, widths[i])
    found = [mt for mt in match_segments(src_seg, tgt_seg) if ttype is None or mt.et.ttype == ttype]
    if ttype is None and len(found) > 1:
        found = [mt for mt in found if mt.et.ttype != 0] or found
    if len(found) != 1:
        raise ValueError(f"{len(found)} transitions match {src_seg} => {tgt_seg}")
    mt = found[0]
    return Flicker(mt.et, _segment(core[:i], widths[0]), mt.m, mt.n, _segment(core[j:], widths[j]))


def swapped(a: Framed, b: Framed) -> tuple[Framed, Framed]:
    """Commute two distant events, a below b; returns (b', a') with b' now below."""
    ea, eb = a.event, b.event
    if b.m >= a.m + ea.target:
        return Framed(b.m - ea.target + ea.source, eb, b.n), Framed(a.m, ea, a.n - eb.source + eb.target)
    if b.m + eb.source <= a.m:
        return Framed(b.m, eb, b.n - ea.target + ea.source), Framed(a.m - eb.source + eb.target, ea, a.n)
    raise ValueError(f"{a} and {b} are not distant")


def commute_flicker(s: Still, i: int) -> Flicker:
    core, _ = _core_widths(s)
    return rewrite_flicker(s, i, i + 2, swapped(core[i], core[i + 1]), 8)


Step = tuple  # ("c", i) to commute events i, i+1, or (i, j, new_events[, ttype])


def movie_from_steps(start: Still, steps: Sequence[Step]) -> Movie:
    """Apply local rewrites one after another; an empty step list gives the identity movie."""
    if not steps:
        return Movie.identity(start)
    flickers = []
    cur = start
    for st in steps:
        if st[0] == "c":
            f = commute_flicker(cur, st[1])
        else:
            f = rewrite_flicker(cur, *st)
        flickers.append(f)
        cur = f.target()
    return Movie(tuple(flickers))


# ---------------------------------------------------------------------------
# The families L, L', L'', L''' for types 17-20
# ---------------------------------------------------------------------------

L_TYPE = {17: 3, 18: 5, 19: 1, 20: 4}


def _slide_down(start: Still, pos: int, left_side: bool) -> list[Flicker]:
    """Commute the event at core position pos down to the bottom, keeping it on its side."""
    out = []
    cur = start
    for k in range(pos - 1, -1, -1):
        core = cur.core()
        f, g = core[k], core[k + 1]
        a, b = g.event.source, g.event.target
        if left_side:
            new = (Framed(0, g.event, f.source - a), Framed(f.m - a + b, f.event, f.n))
        else:
            new = (Framed(f.source - a, g.event, 0), Framed(f.m, f.event, f.n - a + b))
        fl = rewrite_flicker(cur, k, k + 2, new, 8)
        out.append(fl)
        cur = fl.target()
    return out


def build_L_family(i: int, e: Event | str, n: int, t: ElementaryTransition, variant: str = "L") -> MoviePair:
    """The movie-move built from the datum (E, n, T); variants L, L', L'', L'''."""
    if i not in L_TYPE:
        raise ValueError(f"no L-family for type {i}")
    if t.ttype != L_TYPE[i]:
        raise TypeMismatch(f"type {i} needs a transition of type {L_TYPE[i]}, got {t.name}")
    if variant in ("L''", "L'''"):
        base = build_L_family(i, e, n, sym_apply_et("R", t), variant[:-2])
        return MoviePair(base.right.sym("R"), base.left.sym("R"), i, True)
    if variant not in ("L", "L'"):
        raise ValueError(f"unknown variant {variant!r}")
    e = Event(e)
    a, b = e.source, e.target
    p, q = len(t.src.core()), len(t.tgt.core())
    if variant == "L":
        start = concat([t.src.frame(a + n, 0), Still.of(Framed(0, e, n + t.out))])
        low_in, low_out = Framed(0, e, n + t.in_), Framed(0, e, n + t.out)
        m_low, n_low, m_high, n_high = b + n, 0, a + n, 0
    else:
        start = concat([t.src.frame(0, n + a), Still.of(Framed(n + t.out, e, 0))])
        low_in, low_out = Framed(n + t.in_, e, 0), Framed(n + t.out, e, 0)
        m_low, n_low, m_high, n_high = 0, n + b, 0, n + a
    left = _slide_down(start, p, variant == "L")
    left.append(Flicker(t, Still.of(low_in), m_low, n_low, Still.identity(m_low + t.out + n_low)))
    first = Flicker(t, Still.identity(m_high + t.in_ + n_high), m_high, n_high, Still.of(low_out))
    right = [first] + _slide_down(first.target(), q, variant == "L")
    return MoviePair(Movie(tuple(left)), Movie(tuple(right)), i, True)
