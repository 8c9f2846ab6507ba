"""Kauffman amplitudes of events and stills (modified normalization)."""

from __future__ import annotations

from functools import lru_cache

from .diagrams import Event, Framed, FramedEvent, Ident, Still
from .exactalg import ONE, AmplMatrix, LaurentPoly, pad_identity

q = LaurentPoly.monomial


def _generators() -> dict[Event, AmplMatrix]:
    # basis of V (x) V: e00, e01, e10, e11 -> indices 0..3
    cup = AmplMatrix(4, 1, {(1, 0): -q(1), (2, 0): q(-1)})
    cap = AmplMatrix(1, 4, {(0, 1): q(1), (0, 2): -q(-1)})
    ne = AmplMatrix(4, 4, {
        (0, 0): q(1), (3, 3): q(1),
        (2, 1): q(-1),
        (1, 2): q(-1), (2, 2): q(1) - q(-3),
    })
    nw = AmplMatrix(4, 4, {
        (0, 0): q(-1), (3, 3): q(-1),
        (1, 2): q(1),
        (1, 1): q(-1) - q(3), (2, 1): q(1),
    })
    return {Event.CUP: cup, Event.CAP: cap, Event.NE: ne, Event.NW: nw}


_GEN = _generators()


def bracket_event(e: Event) -> AmplMatrix:
    return _GEN[Event(e)]


@lru_cache(maxsize=None)
def bracket_framed(f: FramedEvent) -> AmplMatrix:
    if isinstance(f, Ident):
        return AmplMatrix.identity(1 << f.n)
    return pad_identity(f.m, _GEN[f.event], f.n)


@lru_cache(maxsize=200_000)
def bracket_still(s: Still) -> AmplMatrix:
    """<S> = <F_s> ... <F_1>; shape (2^target, 2^source)."""
    result: AmplMatrix | None = None
    for ev in s.events:
        if isinstance(ev, Ident):
            continue
        b = bracket_framed(ev)
        result = b if result is None else b @ result
    if result is None:
        return AmplMatrix.identity(1 << s.source)
    return result


def closed_loop() -> LaurentPoly:
    return -q(2) - q(-2)


__all__ = ["bracket_event", "bracket_framed", "bracket_still", "closed_loop", "ONE"]
