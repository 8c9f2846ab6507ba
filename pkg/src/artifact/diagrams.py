"""Elementary events, framed events and stills."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union


class NotComposable(ValueError):
    def __init__(self, target: int, source: int):
        super().__init__(f"cannot compose: target {target} != source {source}")
        self.target = target
        self.source = source


class Event(str, Enum):
    CUP = "Cup"
    CAP = "Cap"
    NE = "NE"
    NW = "NW"

    def __str__(self) -> str:
        return self.value

    @property
    def source(self) -> int:
        return _ARITY[self][0]

    @property
    def target(self) -> int:
        return _ARITY[self][1]

    def flip(self) -> "Event":
        return _FLIP.get(self, self)

    def reverse_time(self) -> "Event":
        return _TIME[self]


_ARITY = {Event.CUP: (0, 2), Event.CAP: (2, 0), Event.NE: (2, 2), Event.NW: (2, 2)}
_FLIP = {Event.NE: Event.NW, Event.NW: Event.NE}
_TIME = {Event.CUP: Event.CAP, Event.CAP: Event.CUP, Event.NE: Event.NW, Event.NW: Event.NE}


def event_arity(e: Event) -> tuple[int, int]:
    return _ARITY[Event(e)]


@dataclass(frozen=True)
class Framed:
    """[m, E, n]: the event E with m strands on its left and n on its right."""

    m: int
    event: Event
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("framing must be non-negative")
        object.__setattr__(self, "event", Event(self.event))

    @property
    def source(self) -> int:
        return self.m + self.n + self.event.source

    @property
    def target(self) -> int:
        return self.m + self.n + self.event.target

    def framed(self, m: int, n: int) -> "Framed":
        return Framed(self.m + m, self.event, self.n + n)

    def __str__(self) -> str:
        return f"[{self.m},{self.event},{self.n}]"


@dataclass(frozen=True)
class Ident:
    """1_n: n vertical strands."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("identity width must be non-negative")

    @property
    def source(self) -> int:
        return self.n

    @property
    def target(self) -> int:
        return self.n

    def framed(self, m: int, n: int) -> "Ident":
        return Ident(self.n + m + n)

    def __str__(self) -> str:
        return f"1_{self.n}"


FramedEvent = Union[Framed, Ident]


@dataclass(frozen=True)
class Still:
    """A non-empty composable word of framed events, read bottom to top."""

    events: tuple[FramedEvent, ...]

    def __post_init__(self):
        evs = tuple(self.events)
        if not evs:
            raise ValueError("a still has at least one framed event (use Still.empty())")
        for i in range(len(evs) - 1):
            if evs[i].target != evs[i + 1].source:
                raise NotComposable(evs[i].target, evs[i + 1].source)
        object.__setattr__(self, "events", evs)

    @classmethod
    def of(cls, *events: FramedEvent) -> "Still":
        return cls(tuple(events))

    @classmethod
    def identity(cls, n: int) -> "Still":
        return cls((Ident(n),))

    @classmethod
    def empty(cls) -> "Still":
        return cls.identity(0)

    @property
    def source(self) -> int:
        return self.events[0].source

    @property
    def target(self) -> int:
        return self.events[-1].target

    def __len__(self) -> int:
        return len(self.events)

    def compose(self, other: "Still") -> "Still":
        """self then other (self at the bottom)."""
        if self.target != other.source:
            raise NotComposable(self.target, other.source)
        return Still(self.events + other.events)

    def frame(self, m: int, n: int) -> "Still":
        if m == 0 and n == 0:
            return self
        return Still(tuple(e.framed(m, n) for e in self.events))

    def sym(self, pi: str) -> "Still":
        return still_sym(pi, self)

    def is_identity(self) -> bool:
        return all(isinstance(e, Ident) for e in self.events)

    def reduced(self) -> "Still":
        """Drop identity events; an all-identity still becomes a single 1_n."""
        core = tuple(e for e in self.events if isinstance(e, Framed))
        if not core:
            return Still.identity(self.source)
        if len(core) == len(self.events):
            return self
        return Still(core)

    def core(self) -> tuple[Framed, ...]:
        return tuple(e for e in self.events if isinstance(e, Framed))

    def same_reduced(self, other: "Still") -> bool:
        return (
            self.source == other.source
            and self.target == other.target
            and self.core() == other.core()
        )

    def __str__(self) -> str:
        return "".join(str(e) for e in self.events)

    def __repr__(self) -> str:
        return f"Still({self})"


def concat(stills: Iterable[Still]) -> Still:
    """Compose several stills bottom to top."""
    evs: list[FramedEvent] = []
    for s in stills:
        if evs and evs[-1].target != s.source:
            raise NotComposable(evs[-1].target, s.source)
        evs.extend(s.events)
    return Still(tuple(evs))


def still_compose(s: Still, t: Still) -> Still:
    return s.compose(t)


def still_frame(m: int, s: Still, n: int) -> Still:
    return s.frame(m, n)


def _event_f(e: FramedEvent) -> FramedEvent:
    if isinstance(e, Ident):
        return e
    return Framed(e.m, e.event.flip(), e.n)


def _event_t(e: FramedEvent) -> FramedEvent:
    if isinstance(e, Ident):
        return e
    return Framed(e.m, e.event.reverse_time(), e.n)


def still_sym(pi: str, s: Still) -> Still:
    """Apply f (mirror crossings) and/or t (reverse time); pi is a word in {f, t}."""
    out = s
    for ch in pi:
        if ch == "f":
            out = Still(tuple(_event_f(e) for e in out.events))
        elif ch == "t":
            out = Still(tuple(_event_t(e) for e in reversed(out.events)))
        elif ch in "I":
            continue
        else:
            raise ValueError(f"unknown still symmetry {ch!r}")
    return out


def F(m: int, e: str, n: int) -> Framed:
    """Shorthand constructor used throughout the catalogs."""
    return Framed(m, Event(e), n)


def S(*events: FramedEvent) -> Still:
    return Still(tuple(events))
