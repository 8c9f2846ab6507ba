"""Parsing and printing movies in sf-notation.

A still is written as a word of framed events ``[m,E,n]`` and identities
``1_n``.  Within a movie the letters ``s`` and ``f`` mark, respectively, the
source segment of the next flicker and the target segment of the previous
one; ``=>`` (optionally followed by the type digit) separates stills.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Literal, Optional, Sequence, Union

from .diagrams import Event, Framed, FramedEvent, Ident, Still
from .movies import AnyFlicker, Flicker, IdentityFlicker, Movie
from .transitions import FramedMatch, UnknownTransition, match_segments

Dialect = Literal["auto", "cpp", "java"]


class SfSyntaxError(SyntaxError):
    """Malformed sf-notation; ``position`` is the character offset."""

    def __init__(self, message: str, position: int = -1, text: str | None = None):
        if text is not None and position >= 0:
            line = text.count("\n", 0, position) + 1
            col = position - (text.rfind("\n", 0, position) + 1) + 1
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)
        self.position = position


class ArityError(ValueError):
    def __init__(self, index: int, message: str = ""):
        super().__init__(message or f"event {index} does not compose with its predecessor")
        self.index = index


class AmbiguousTransition(ValueError):
    def __init__(self, candidates: Sequence[FramedMatch]):
        names = ", ".join(f"{c.m}.{c.et.name}.{c.n}" for c in candidates)
        super().__init__(f"marked segments match several transitions: {names}")
        self.candidates = list(candidates)


class TypeDigitMismatch(ValueError):
    pass


class FrameMismatch(ValueError):
    pass


@dataclass
class SfDocument:
    movies: list[Movie] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_EVENT_RE = re.compile(r"\[\s*(\d+)\s*,\s*([A-Za-z]+)\s*,\s*(\d+)\s*\]")
_IDENT_RE = re.compile(r"1_(\d+)")
_ARROW_RE = re.compile(r"=>[ \t]*([0-8])(?![_\d])|=>")
_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9' ]*?\s*(?:=(?!>)|:)")


@dataclass(frozen=True)
class _Tok:
    kind: str  # ev, mark, arrow, end
    pos: int
    value: object = None


Item = Union[FramedEvent, str]


def _strip_comments(text: str, dialect: str) -> str:
    prefix = "%" if dialect == "cpp" else "#"
    out = []
    for line in text.split("\n"):
        if line.lstrip().startswith(prefix):
            out.append(" " * len(line))
        else:
            out.append(line)
    return "\n".join(out)


def detect_dialect(text: str) -> str:
    body = [ln for ln in text.split("\n") if not ln.lstrip().startswith(("%", "#"))]
    return "java" if any("." in ln for ln in body) else "cpp"


def _tokenize(text: str, dialect: str) -> Iterator[_Tok]:
    terminator = "#" if dialect == "cpp" else "."
    i, n = 0, len(text)
    at_movie_start = True
    while i < n:
        ch = text[i]
        if ch.isspace() or ch == ";":
            i += 1
            continue
        if at_movie_start:
            m = _LABEL_RE.match(text, i)
            if m and not re.fullmatch(r"[sf]+\s*", text[i:m.end() - 1]):
                i = m.end()
                at_movie_start = False
                continue
        at_movie_start = False
        if ch == "[":
            m = _EVENT_RE.match(text, i)
            if m:
                a, name, b = int(m.group(1)), m.group(2), int(m.group(3))
                if name.lower() == "null":
                    yield _Tok("ev", i, Ident(a + b))
                else:
                    try:
                        ev = Event(name)
                    except ValueError:
                        raise SfSyntaxError(f"unknown event {name!r}", i, text) from None
                    yield _Tok("ev", i, Framed(a, ev, b))
                i = m.end()
                continue
            i += 1  # optional flicker bracket
            continue
        if ch == "]":
            i += 1
            continue
        if text.startswith("1_", i):
            m = _IDENT_RE.match(text, i)
            if not m:
                raise SfSyntaxError("malformed identity", i, text)
            yield _Tok("ev", i, Ident(int(m.group(1))))
            i = m.end()
            continue
        if text.startswith("=>", i):
            m = _ARROW_RE.match(text, i)
            digit = int(m.group(1)) if m.group(1) is not None else None
            yield _Tok("arrow", i, digit)
            i = m.end()
            continue
        if ch in "sf":
            yield _Tok("mark", i, ch)
            i += 1
            continue
        if ch == terminator:
            yield _Tok("end", i)
            i += 1
            at_movie_start = True
            continue
        raise SfSyntaxError(f"unexpected character {ch!r}", i, text)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def parse_still(text: str) -> Still:
    """Parse a bare still such as ``[2,NW,0][1,Cap,1][0,NE,0]`` or ``1_3``."""
    events: list[FramedEvent] = []
    for tok in _tokenize(text, "cpp"):
        if tok.kind != "ev":
            raise SfSyntaxError(f"unexpected {tok.kind} token in a still", tok.pos, text)
        events.append(tok.value)
    if not events:
        raise SfSyntaxError("empty still", 0, text)
    _check_arity(events)
    return Still(tuple(events))


def _check_arity(events: Sequence[FramedEvent]) -> None:
    for k in range(1, len(events)):
        if events[k - 1].target != events[k].source:
            raise ArityError(
                k,
                f"event {k + 1} ({events[k]}) has source {events[k].source}, "
                f"but its predecessor has target {events[k - 1].target}",
            )


@dataclass
class _RawStill:
    items: list[Item]
    pos: int

    def events(self) -> list[FramedEvent]:
        return [x for x in self.items if not isinstance(x, str)]

    def marks(self, letter: str) -> int:
        return sum(1 for x in self.items if x == letter)


def _widths(raw: _RawStill, default: int) -> list[int]:
    """Width of the diagram at each item boundary (len(items)+1 entries)."""
    evs = raw.events()
    w = evs[0].source if evs else default
    out = [w]
    for x in raw.items:
        if not isinstance(x, str):
            w = x.target
        out.append(w)
    return out


def _split(raw: _RawStill, letter: str, default: int) -> tuple[Still, Still, Still]:
    """(bottom, segment, top) of a still with respect to a pair of markers."""
    idx = [k for k, x in enumerate(raw.items) if x == letter]
    a, b = idx
    widths = _widths(raw, default)

    def still(items: Sequence[Item], width: int) -> Still:
        evs = tuple(x for x in items if not isinstance(x, str))
        return Still(evs) if evs else Still.identity(width)

    return (
        still(raw.items[:a], widths[0]),
        still(raw.items[a + 1:b], widths[a + 1]),
        still(raw.items[b + 1:], widths[-1]),
    )


def _identify(
    src: tuple[Still, Still, Still],
    tgt: tuple[Still, Still, Still],
    digit: Optional[int],
    index: int,
) -> Flicker:
    bs, seg_s, ts = src
    bt, seg_t, tt = tgt
    if not bs.same_reduced(bt) or not ts.same_reduced(tt):
        raise FrameMismatch(f"flicker {index}: unmarked parts of source and target differ")
    cands = match_segments(seg_s, seg_t)
    if not cands:
        raise UnknownTransition(f"flicker {index}: no transition takes {seg_s} to {seg_t}")
    if digit is not None:
        typed = [c for c in cands if c.et.ttype == digit]
        if not typed:
            found = sorted({c.et.ttype for c in cands})
            raise TypeDigitMismatch(f"flicker {index}: declared type {digit}, found type {found}")
        cands = typed
    if len(cands) > 1:
        raise AmbiguousTransition(cands)
    c = cands[0]
    return Flicker(c.et, bs, c.m, c.n, ts)


def _movie_from_stills(stills: list[_RawStill], digits: list[Optional[int]], text: str) -> Movie:
    for raw in stills:
        try:
            _check_arity(raw.events())
        except ArityError:
            raise
    widths = [raw.events()[0].source for raw in stills if raw.events()]
    default = widths[0] if widths else 0
    if len(stills) == 1:
        raw = stills[0]
        if raw.marks("s") or raw.marks("f"):
            raise SfSyntaxError("a single-still movie carries no markers", raw.pos, text)
        evs = raw.events()
        return Movie.identity(Still(tuple(evs)) if evs else Still.identity(0))
    last = len(stills) - 1
    for k, raw in enumerate(stills):
        want_s = 0 if k == last else 2
        want_f = 0 if k == 0 else 2
        if raw.marks("s") != want_s or raw.marks("f") != want_f:
            raise SfSyntaxError(
                f"still {k + 1} needs {want_s} s-markers and {want_f} f-markers",
                raw.pos,
                text,
            )
    flickers: list[AnyFlicker] = []
    for k in range(last):
        src = _split(stills[k], "s", default)
        tgt = _split(stills[k + 1], "f", default)
        flickers.append(_identify(src, tgt, digits[k], k + 1))
    return Movie(tuple(flickers))


def parse_document(text: str, dialect: Dialect = "auto") -> SfDocument:
    """Parse a stream of movies, each closed by the dialect's terminator."""
    if dialect == "auto":
        dialect = detect_dialect(text)
    if dialect not in ("cpp", "java"):
        raise ValueError(f"unknown dialect {dialect!r}")
    body = _strip_comments(text, dialect)
    doc = SfDocument()
    stills: list[_RawStill] = []
    digits: list[Optional[int]] = []
    current: Optional[_RawStill] = None

    def close(pos: int) -> None:
        nonlocal stills, digits, current
        if current is None:
            if stills:
                raise SfSyntaxError("movie ends with '=>'", pos, text)
            return
        stills.append(current)
        doc.movies.append(_movie_from_stills(stills, digits, text))
        stills, digits, current = [], [], None

    for tok in _tokenize(body, dialect):
        if tok.kind in ("ev", "mark"):
            if current is None:
                current = _RawStill([], tok.pos)
            current.items.append(tok.value)
        elif tok.kind == "arrow":
            if current is None:
                raise SfSyntaxError("'=>' without a preceding still", tok.pos, text)
            stills.append(current)
            digits.append(tok.value)
            current = None
        else:
            if current is None and not stills:
                doc.diagnostics.append(f"empty movie at offset {tok.pos}")
                continue
            close(tok.pos)
    if current is not None or stills:
        doc.diagnostics.append("last movie has no terminator")
        close(len(text))
    return doc


def parse_movie(text: str, dialect: Dialect = "auto") -> Movie:
    """Parse exactly one movie."""
    doc = parse_document(text, dialect)
    if len(doc.movies) != 1:
        raise SfSyntaxError(f"expected one movie, found {len(doc.movies)}", 0, text)
    return doc.movies[0]


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _view(bottom: Still, seg: Still, top: Still) -> tuple[int, int, list[list[int]]]:
    """Core indices [b, e) covered by the segment and the identities in each of its gaps."""
    b = len(bottom.core())
    gaps: list[list[int]] = [[]]
    for ev in seg.events:
        if isinstance(ev, Ident):
            gaps[-1].append(ev.n)
        else:
            gaps.append([])
    return b, b + len(gaps) - 1, gaps


def _flicker_views(f: AnyFlicker) -> tuple[tuple, tuple]:
    if isinstance(f, IdentityFlicker):
        w = f.still.source
        empty = Still.identity(0)
        v = _view(empty, Still.identity(w), f.still)
        return v, v
    src = _view(f.bottom, f.et.src.frame(f.m, f.n), f.top)
    tgt = _view(f.bottom, f.et.tgt.frame(f.m, f.n), f.top)
    return src, tgt


def _render_still(core: Sequence[Framed], views: list[tuple[str, tuple]]) -> str:
    out: list[str] = []
    for g in range(len(core) + 1):
        closers, middles, empties, openers = [], [], [], []
        for letter, (b, e, gaps) in views:
            idents = "".join(f"1_{k}" for k in gaps[g - b]) if b <= g <= e else ""
            if b == e == g:
                empties.append(letter + letter)
            elif g == e:
                closers.append(idents + letter)
            elif g == b:
                openers.append(letter + idents)
            elif b < g < e:
                middles.append(idents)
        out.extend(closers + middles + empties + openers)
        if g < len(core):
            out.append(str(core[g]))
    return "".join(out)


def render_movie(m: Movie, digits: bool = True, terminator: str = " #") -> str:
    """sf-notation for a movie; ``digits=False`` omits the type digits as in the published listings."""
    fl = m.flickers
    if len(fl) == 1 and isinstance(fl[0], IdentityFlicker):
        return str(fl[0].still.reduced()) + terminator
    views = [_flicker_views(f) for f in fl]
    parts: list[str] = []
    for k in range(len(fl) + 1):
        still = fl[k].source() if k < len(fl) else fl[-1].target()
        vs: list[tuple[str, tuple]] = []
        if k > 0:
            vs.append(("f", views[k - 1][1]))
        if k < len(fl):
            vs.append(("s", views[k][0]))
        parts.append(_render_still(still.core(), vs))
        if k < len(fl):
            t = fl[k].ttype
            parts.append(f"=>{t if t is not None else 0}" if digits else "=>")
    return " ".join(parts) + terminator


def render_still(s: Still) -> str:
    return str(s)
