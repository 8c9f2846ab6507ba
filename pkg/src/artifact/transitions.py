"""The catalog of elementary transitions ET0-ET8 and the action of SYM."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .diagrams import Event, F, Framed, Ident, S, Still, still_sym

SYM = ("I", "R", "t", "tR", "f", "fR", "ft", "ftR")


class UnknownTransition(LookupError):
    pass


@dataclass(frozen=True)
class ElementaryTransition:
    name: str
    ttype: int
    src: Still
    tgt: Still

    def __post_init__(self):
        if self.src.source != self.tgt.source or self.src.target != self.tgt.target:
            raise ValueError(f"{self.name}: source and target stills have different arities")

    @property
    def in_(self) -> int:
        return self.src.source

    @property
    def out(self) -> int:
        return self.src.target

    def __str__(self) -> str:
        return f"{self.name}: [{self.src} => {self.tgt}]"


def _et(name: str, ttype: int, src: Still, tgt: Still) -> ElementaryTransition:
    return ElementaryTransition(name, ttype, src, tgt)


def _pairs_with_reverse(ttype: int, base: Iterable[tuple[str, Still, Still]]) -> list[ElementaryTransition]:
    out = []
    for name, a, b in base:
        out.append(_et(f"ET{ttype}{name}", ttype, a, b))
        out.append(_et(f"ET{ttype}{name}R", ttype, b, a))
    return out


def _id(n: int) -> Still:
    return Still.identity(n)


def _et0() -> list[ElementaryTransition]:
    out = []
    for ev in (Event.CUP, Event.CAP, Event.NE, Event.NW):
        pi = S(F(0, ev, 0))
        left = Still((Ident(ev.source),) + pi.events)
        right = Still(pi.events + (Ident(ev.target),))
        out.append(_et(f"ET0{ev}l", 0, pi, left))
        out.append(_et(f"ET0{ev}lR", 0, left, pi))
        out.append(_et(f"ET0{ev}r", 0, pi, right))
        out.append(_et(f"ET0{ev}rR", 0, right, pi))
    return out


def _et1() -> list[ElementaryTransition]:
    cup, cap = S(F(0, "Cup", 0)), S(F(0, "Cap", 0))
    return [
        _et("ET1I", 1, S(F(0, "Cup", 0), F(0, "NE", 0)), cup),
        _et("ET1R", 1, cup, S(F(0, "Cup", 0), F(0, "NE", 0))),
        _et("ET1t", 1, S(F(0, "NW", 0), F(0, "Cap", 0)), cap),
        _et("ET1tR", 1, cap, S(F(0, "NW", 0), F(0, "Cap", 0))),
        _et("ET1f", 1, S(F(0, "Cup", 0), F(0, "NW", 0)), cup),
        _et("ET1fR", 1, cup, S(F(0, "Cup", 0), F(0, "NW", 0))),
        _et("ET1ft", 1, S(F(0, "NE", 0), F(0, "Cap", 0)), cap),
        _et("ET1ftR", 1, cap, S(F(0, "NE", 0), F(0, "Cap", 0))),
    ]


def _et2() -> list[ElementaryTransition]:
    return [
        _et("ET2I", 2, S(F(0, "NE", 0), F(0, "NW", 0)), _id(2)),
        _et("ET2R", 2, _id(2), S(F(0, "NE", 0), F(0, "NW", 0))),
        _et("ET2f", 2, S(F(0, "NW", 0), F(0, "NE", 0)), _id(2)),
        _et("ET2fR", 2, _id(2), S(F(0, "NW", 0), F(0, "NE", 0))),
    ]


_ET3_WORDS = {
    # name: (bottom, middle, top) crossing types of the source word [0,*,1][1,*,0][0,*,1]
    "bmt": ("NE", "NE", "NE"),
    "btm": ("NW", "NE", "NE"),
    "mbt": ("NE", "NE", "NW"),
    "mtb": ("NW", "NW", "NE"),
    "tbm": ("NE", "NW", "NW"),
    "tmb": ("NW", "NW", "NW"),
}


def _et3() -> list[ElementaryTransition]:
    base = []
    for name, (a, b, c) in _ET3_WORDS.items():
        src = S(F(0, a, 1), F(1, b, 0), F(0, c, 1))
        tgt = S(F(1, c, 0), F(0, b, 1), F(1, a, 0))
        base.append((name, src, tgt))
    return _pairs_with_reverse(3, base)


def _et4() -> list[ElementaryTransition]:
    return [
        _et("ET4I", 4, S(F(1, "Cup", 0), F(0, "NE", 1)), S(F(0, "Cup", 1), F(1, "NW", 0))),
        _et("ET4R", 4, S(F(0, "Cup", 1), F(1, "NW", 0)), S(F(1, "Cup", 0), F(0, "NE", 1))),
        _et("ET4t", 4, S(F(0, "NW", 1), F(1, "Cap", 0)), S(F(1, "NE", 0), F(0, "Cap", 1))),
        _et("ET4tR", 4, S(F(1, "NE", 0), F(0, "Cap", 1)), S(F(0, "NW", 1), F(1, "Cap", 0))),
        _et("ET4f", 4, S(F(1, "Cup", 0), F(0, "NW", 1)), S(F(0, "Cup", 1), F(1, "NE", 0))),
        _et("ET4fR", 4, S(F(0, "Cup", 1), F(1, "NE", 0)), S(F(1, "Cup", 0), F(0, "NW", 1))),
        _et("ET4ft", 4, S(F(0, "NE", 1), F(1, "Cap", 0)), S(F(1, "NW", 0), F(0, "Cap", 1))),
        _et("ET4ftR", 4, S(F(1, "NW", 0), F(0, "Cap", 1)), S(F(0, "NE", 1), F(1, "Cap", 0))),
    ]


def _et5() -> list[ElementaryTransition]:
    return [
        _et("ET5I", 5, S(F(1, "Cup", 0), F(0, "Cap", 1)), _id(1)),
        _et("ET5R", 5, _id(1), S(F(1, "Cup", 0), F(0, "Cap", 1))),
        _et("ET5t", 5, S(F(0, "Cup", 1), F(1, "Cap", 0)), _id(1)),
        _et("ET5tR", 5, _id(1), S(F(0, "Cup", 1), F(1, "Cap", 0))),
    ]


def _et67() -> list[ElementaryTransition]:
    return [
        _et("ET6I", 6, S(F(0, "Cup", 0), F(0, "Cap", 0)), _id(0)),
        _et("ET6R", 6, _id(0), S(F(0, "Cup", 0), F(0, "Cap", 0))),
        _et("ET7I", 7, S(F(0, "Cap", 0), F(0, "Cup", 0)), _id(2)),
        _et("ET7R", 7, _id(2), S(F(0, "Cap", 0), F(0, "Cup", 0))),
    ]


@lru_cache(maxsize=1)
def catalog_finite() -> tuple[ElementaryTransition, ...]:
    """The 56 transitions of types 0-7, ordered by type then as listed."""
    return tuple(_et0() + _et1() + _et2() + _et3() + _et4() + _et5() + _et67())


@lru_cache(maxsize=1)
def _by_name() -> dict[str, ElementaryTransition]:
    return {e.name: e for e in catalog_finite()}


@lru_cache(maxsize=1)
def _by_pair() -> dict[tuple[Still, Still], ElementaryTransition]:
    return {(e.src, e.tgt): e for e in catalog_finite()}


def lookup(name: str) -> ElementaryTransition:
    """Find a transition by canonical name, including ET8 and identity families."""
    if name in _by_name():
        return _by_name()[name]
    if name.startswith("ET8"):
        import re

        m = re.fullmatch(r"ET8([LU])_(\d+)\((\w+),(\w+)\)", name)
        if m:
            return et8_make(m.group(1), Event(m.group(3)), Event(m.group(4)), int(m.group(2)))
    if name.startswith("ET0Id_"):
        return et0_identity(int(name[len("ET0Id_"):]))
    raise UnknownTransition(name)


def et0_make(e: Event, side: str, reversed: bool = False) -> ElementaryTransition:
    return lookup(f"ET0{Event(e)}{side}{'R' if reversed else ''}")


def et0_identity(k: int) -> ElementaryTransition:
    """[1_k => 1_k]: the trivial insertion used by listings with empty marked segments."""
    return _et(f"ET0Id_{k}", 0, _id(k), _id(k))


def L_still(e1: Event, e2: Event, n: int) -> Still:
    e1, e2 = Event(e1), Event(e2)
    return S(F(0, e1, n + e2.source), F(n + e1.target, e2, 0))


def U_still(e1: Event, e2: Event, n: int) -> Still:
    e1, e2 = Event(e1), Event(e2)
    return S(F(n + e1.source, e2, 0), F(0, e1, n + e2.target))


def et8_make(direction: str, e1: Event, e2: Event, n: int) -> ElementaryTransition:
    e1, e2 = Event(e1), Event(e2)
    lo, up = L_still(e1, e2, n), U_still(e1, e2, n)
    name = f"ET8{direction}_{n}({e1},{e2})"
    if direction == "L":
        return _et(name, 8, lo, up)
    if direction == "U":
        return _et(name, 8, up, lo)
    raise ValueError(f"direction must be L or U, got {direction!r}")


def _et8_from_src(src: Still) -> list[ElementaryTransition]:
    """All ET8 transitions whose source still is exactly src."""
    evs = src.events
    if len(evs) != 2 or not all(isinstance(e, Framed) for e in evs):
        return []
    a, b = evs
    out = []
    # L form: [0,E,N+s(E')][N+t(E),E',0]
    if a.m == 0 and b.n == 0:
        big_n = a.n - b.event.source
        if big_n >= 0 and b.m == big_n + a.event.target:
            out.append(et8_make("L", a.event, b.event, big_n))
    # U form: [N+s(E),E',0][0,E,N+t(E')]
    if a.n == 0 and b.m == 0:
        big_n = b.n - a.event.target
        if big_n >= 0 and a.m == big_n + b.event.source:
            out.append(et8_make("U", b.event, a.event, big_n))
    return out


def transition_from_pair(src: Still, tgt: Still) -> ElementaryTransition:
    """Identify the transition with exactly this (source, target) pair of stills."""
    e = _by_pair().get((src, tgt))
    if e is not None:
        return e
    if src == tgt and src.is_identity() and len(src) == 1:
        return et0_identity(src.source)
    for cand in _et8_from_src(src):
        if cand.tgt == tgt:
            return cand
    raise UnknownTransition(f"[{src} => {tgt}]")


def _sym_letters(pi: str) -> str:
    if pi not in SYM:
        raise ValueError(f"unknown symmetry {pi!r}")
    return "" if pi == "I" else pi


def sym_compose(a: str, b: str) -> str:
    """The product of two elements of SYM (an elementary abelian group)."""
    letters = {"R": 0, "t": 0, "f": 0}
    for ch in _sym_letters(a) + _sym_letters(b):
        letters[ch] ^= 1
    word = ("f" if letters["f"] else "") + ("t" if letters["t"] else "") + ("R" if letters["R"] else "")
    return word or "I"


def sym_pair(pi: str, src: Still, tgt: Still) -> tuple[Still, Still]:
    for ch in _sym_letters(pi):
        if ch == "R":
            src, tgt = tgt, src
        else:
            src, tgt = still_sym(ch, src), still_sym(ch, tgt)
    return src, tgt


def sym_apply_et(pi: str, e: ElementaryTransition) -> ElementaryTransition:
    src, tgt = sym_pair(pi, e.src, e.tgt)
    out = transition_from_pair(src, tgt)
    if out.ttype != e.ttype:
        raise AssertionError("symmetry changed the transition type")
    return out


def reverse(e: ElementaryTransition) -> ElementaryTransition:
    return sym_apply_et("R", e)


def catalog_by_type() -> dict[int, list[ElementaryTransition]]:
    out: dict[int, list[ElementaryTransition]] = {}
    for e in catalog_finite():
        out.setdefault(e.ttype, []).append(e)
    return out


# ---------------------------------------------------------------------------
# Matching marked segments against the catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramedMatch:
    et: ElementaryTransition
    m: int
    n: int


@lru_cache(maxsize=1)
def _core_index() -> dict[tuple, list[ElementaryTransition]]:
    idx: dict[tuple, list[ElementaryTransition]] = {}
    for e in catalog_finite():
        if e.ttype == 0:
            continue
        key = (tuple(f.event for f in e.src.core()), tuple(f.event for f in e.tgt.core()))
        idx.setdefault(key, []).append(e)
    return idx


def _offset(seg: tuple[Framed, ...], base: tuple[Framed, ...]) -> int | None:
    if not seg:
        return None
    return seg[0].m - base[0].m


def match_segments(src_seg: Still, tgt_seg: Still) -> list[FramedMatch]:
    """All (transition, m, n) with m.src.n ~ src_seg and m.tgt.n ~ tgt_seg.

    Types 1-8 compare after dropping identity events; catalog ET0 entries are
    matched literally; two empty segments match the trivial ET0 identity.
    """
    if src_seg.source != tgt_seg.source or src_seg.target != tgt_seg.target:
        return []
    w_in = src_seg.source
    cs, ct = src_seg.core(), tgt_seg.core()
    out: list[FramedMatch] = []
    if not cs and not ct:
        return [FramedMatch(et0_identity(w_in), 0, 0)]
    key = (tuple(f.event for f in cs), tuple(f.event for f in ct))
    for e in _core_index().get(key, []):
        bs, bt = e.src.core(), e.tgt.core()
        m = _offset(cs, bs) if bs else _offset(ct, bt)
        if m is None or m < 0:
            continue
        n = w_in - e.in_ - m
        if n < 0:
            continue
        if tuple(f.framed(m, n) for f in bs) == cs and tuple(f.framed(m, n) for f in bt) == ct:
            out.append(FramedMatch(e, m, n))
    # ET0 catalog entries, literal comparison
    if cs == ct and len(cs) == 1:
        for e in catalog_by_type()[0]:
            bs = e.src.core()
            if bs[0].event != cs[0].event:
                continue
            m = cs[0].m - bs[0].m
            n = w_in - e.in_ - m
            if m < 0 or n < 0:
                continue
            if e.src.frame(m, n) == src_seg and e.tgt.frame(m, n) == tgt_seg:
                out.append(FramedMatch(e, m, n))
    # ET8
    if len(cs) == 2 and len(ct) == 2:
        a, b = cs
        for m in range(0, min(a.m, b.m) + 1):
            for n in range(0, min(a.n, b.n) + 1):
                unframed = Still((Framed(a.m - m, a.event, a.n - n), Framed(b.m - m, b.event, b.n - n)))
                for e in _et8_from_src(unframed):
                    if e.tgt.frame(m, n).core() == ct:
                        out.append(FramedMatch(e, m, n))
    return out
