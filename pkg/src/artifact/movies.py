"""Flickers and movies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .diagrams import Still, concat, still_sym
from .transitions import ElementaryTransition, sym_apply_et, _sym_letters


class ArityMismatch(ValueError):
    pass


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class Flicker:
    """(E, B, m, n, T): the framed transition m.E.n between bottom B and top T.

    B and T are kept in reduced form (identity events dropped).
    """

    et: ElementaryTransition
    bottom: Still
    m: int
    n: int
    top: Still

    def __post_init__(self):
        object.__setattr__(self, "bottom", self.bottom.reduced())
        object.__setattr__(self, "top", self.top.reduced())
        if self.bottom.target != self.m + self.et.in_ + self.n:
            raise ArityMismatch(f"bottom target {self.bottom.target} != {self.m}+{self.et.in_}+{self.n}")
        if self.top.source != self.m + self.et.out + self.n:
            raise ArityMismatch(f"top source {self.top.source} != {self.m}+{self.et.out}+{self.n}")

    @classmethod
    def bare(cls, et: ElementaryTransition, m: int = 0, n: int = 0) -> "Flicker":
        return cls(et, Still.identity(m + et.in_ + n), m, n, Still.identity(m + et.out + n))

    @property
    def ttype(self) -> int:
        return self.et.ttype

    @property
    def in_(self) -> int:
        return self.bottom.source

    @property
    def out(self) -> int:
        return self.top.target

    def source(self) -> Still:
        return concat([self.bottom, self.et.src.frame(self.m, self.n), self.top])

    def target(self) -> Still:
        return concat([self.bottom, self.et.tgt.frame(self.m, self.n), self.top])

    def frame(self, p: int, q: int) -> "Flicker":
        return Flicker(self.et, self.bottom.frame(p, q), self.m + p, self.n + q, self.top.frame(p, q))

    def sandwich(self, lower: Still, upper: Still) -> "Flicker":
        return Flicker(self.et, lower.compose(self.bottom), self.m, self.n, self.top.compose(upper))

    def sym(self, pi: str) -> "Flicker":
        f = self
        for ch in _sym_letters(pi):
            if ch == "R":
                f = Flicker(sym_apply_et("R", f.et), f.bottom, f.m, f.n, f.top)
            elif ch == "t":
                f = Flicker(sym_apply_et("t", f.et), still_sym("t", f.top), f.m, f.n, still_sym("t", f.bottom))
            else:
                f = Flicker(sym_apply_et("f", f.et), still_sym("f", f.bottom), f.m, f.n, still_sym("f", f.top))
        return f

    def __str__(self) -> str:
        return f"({self.et.name}, {self.bottom}, {self.m}, {self.n}, {self.top})"


@dataclass(frozen=True)
class IdentityFlicker:
    """1_S: the flicker that leaves S unchanged."""

    still: Still

    def __post_init__(self):
        object.__setattr__(self, "still", self.still.reduced())

    ttype = None
    et = None

    @property
    def in_(self) -> int:
        return self.still.source

    @property
    def out(self) -> int:
        return self.still.target

    def source(self) -> Still:
        return self.still

    def target(self) -> Still:
        return self.still

    def frame(self, p: int, q: int) -> "IdentityFlicker":
        return IdentityFlicker(self.still.frame(p, q))

    def sandwich(self, lower: Still, upper: Still) -> "IdentityFlicker":
        return IdentityFlicker(concat([lower, self.still, upper]))

    def sym(self, pi: str) -> "IdentityFlicker":
        s = self.still
        for ch in _sym_letters(pi):
            if ch != "R":
                s = still_sym(ch, s)
        return IdentityFlicker(s)

    def __str__(self) -> str:
        return f"1_({self.still})"


AnyFlicker = Union[Flicker, IdentityFlicker]


def flicker_source_target(f: AnyFlicker) -> tuple[Still, Still]:
    return f.source(), f.target()


def flicker_frame(p: int, f: AnyFlicker, q: int) -> AnyFlicker:
    return f.frame(p, q)


@dataclass(frozen=True)
class Movie:
    """A non-empty sequence of flickers, each target matching the next source."""

    flickers: tuple[AnyFlicker, ...]

    def __post_init__(self):
        fl = tuple(self.flickers)
        if not fl:
            raise ValueError("a movie has at least one flicker")
        for i in range(len(fl) - 1):
            if not fl[i].target().same_reduced(fl[i + 1].source()):
                raise NotComposable(f"flicker {i + 1} target {fl[i].target()} != flicker {i + 2} source {fl[i + 1].source()}")
        object.__setattr__(self, "flickers", fl)

    @classmethod
    def identity(cls, s: Still) -> "Movie":
        return cls((IdentityFlicker(s),))

    @classmethod
    def of(cls, flickers: Iterable[AnyFlicker]) -> "Movie":
        return cls(tuple(flickers))

    def __len__(self) -> int:
        return len(self.flickers)

    @property
    def in_(self) -> int:
        return self.flickers[0].in_

    @property
    def out(self) -> int:
        return self.flickers[0].out

    def source(self) -> Still:
        return self.flickers[0].source()

    def target(self) -> Still:
        return self.flickers[-1].target()

    def stills(self) -> list[Still]:
        return [self.flickers[0].source()] + [f.target() for f in self.flickers]

    def types(self) -> list[int | None]:
        return [f.ttype for f in self.flickers]

    def is_compact(self) -> bool:
        empty = Still.empty()
        return self.source().same_reduced(empty) and self.target().same_reduced(empty)

    def compose(self, other: "Movie") -> "Movie":
        if not self.target().same_reduced(other.source()):
            raise NotComposable("target of the first movie differs from the source of the second")
        return Movie(self.flickers + other.flickers)

    def frame(self, p: int, q: int) -> "Movie":
        return Movie(tuple(f.frame(p, q) for f in self.flickers))

    def sandwich(self, lower: Still, upper: Still) -> "Movie":
        if lower.target != self.in_ or upper.source != self.out:
            raise ArityMismatch("sandwich stills do not fit the movie")
        return Movie(tuple(f.sandwich(lower, upper) for f in self.flickers))

    def sym(self, pi: str) -> "Movie":
        fl: Sequence[AnyFlicker] = self.flickers
        for ch in _sym_letters(pi):
            if ch == "R":
                fl = tuple(f.sym("R") for f in reversed(fl))
            else:
                fl = tuple(f.sym(ch) for f in fl)
        return Movie(tuple(fl))

    def __str__(self) -> str:
        return " ; ".join(str(f) for f in self.flickers)


def movie_compose(a: Movie, b: Movie) -> Movie:
    return a.compose(b)


def movie_frame(p: int, m: Movie, q: int) -> Movie:
    return m.frame(p, q)


def movie_sandwich(lower: Still, m: Movie, upper: Still) -> Movie:
    return m.sandwich(lower, upper)


def movie_sym(pi: str, m: Movie) -> Movie:
    return m.sym(pi)


def is_compact(m: Movie) -> bool:
    return m.is_compact()
