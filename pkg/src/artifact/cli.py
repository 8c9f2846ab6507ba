"""Command-line driver: parse movies, evaluate amplitudes, build and solve the balanced systems."""

from __future__ import annotations

import sys
from contextlib import contextmanager
from typing import Iterator, TextIO

import click

from . import ampsolve as A
from .movemoves import NotGrammatical, CountMismatch, gen_mm31_reduced, load_bl_reduced
from .sfnotation import SfSyntaxError, parse_document, render_movie
from .transitions import catalog_finite

DIALECTS = click.Choice(["cpp", "java", "auto"])


@contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _resolve_assignment(name: str) -> A.AmplitudeAssignment:
    if name.startswith("file:"):
        return A.load_assignment_file(name[5:])
    return A.named_assignment(name)


def _read_movies(path: str, dialect: str):
    with open(path) as fh:
        text = fh.read()
    return parse_document(text, dialect)


@click.group()
def main() -> None:
    """Amplitude invariants of knotted-surface movies."""


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--dialect", type=DIALECTS, default="auto", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def parse(files: tuple[str, ...], dialect: str, out: str | None) -> None:
    """Validate movies and report flicker counts, types and compactness."""
    failed = False
    with _output(out) as fh:
        for path in files:
            try:
                doc = _read_movies(path, dialect)
            except (SfSyntaxError, ValueError) as exc:
                click.echo(f"{path}: error: {exc}", err=True)
                failed = True
                continue
            n = len(doc.movies)
            fh.write(f"{path}: {n} movie{'s' if n != 1 else ''}\n")
            for k, m in enumerate(doc.movies, 1):
                types = ",".join(str(t if t is not None else "id") for t in m.types())
                compact = "compact" if m.is_compact() else "not compact"
                fh.write(
                    f"  movie {k}: {len(m)} flicker{'s' if len(m) != 1 else ''} (types {types}), "
                    f"{compact}, in {m.in_}, out {m.out}\n"
                )
            for d in doc.diagnostics:
                fh.write(f"  note: {d}\n")
    if failed:
        sys.exit(1)


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--assignment", "assignments", multiple=True, default=A.NAMED, show_default=True,
              help="A0..A4, Aa, Ab or file:<path>; repeatable.")
@click.option("--dialect", type=DIALECTS, default="auto", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def amp(files: tuple[str, ...], assignments: tuple[str, ...], dialect: str, out: str | None) -> None:
    """Print the amplitude of every movie under each assignment."""
    resolved = [(name, _resolve_assignment(name)) for name in assignments]
    with _output(out) as fh:
        for path in files:
            doc = _read_movies(path, dialect)
            for k, m in enumerate(doc.movies, 1):
                for name, a in resolved:
                    if m.is_compact():
                        value = str(A.amp_compact(a, m))
                    else:
                        value = str(A.amp_movie(a, m))
                    fh.write(f"{path}[{k}] {name}: {value}\n")


def _parse_u_option(spec: str):
    try:
        u = A.parse_u(spec)
    except (ValueError, A.ImproperU) as exc:
        raise click.BadParameter(str(exc), param_hint="--u") from exc
    if u >= A.ALL_TYPES:
        raise click.BadParameter("U must be a proper subset of {1..31}", param_hint="--u")
    return u


@main.command("gen-eqs")
@click.option("--u", "u_spec", default="31", show_default=True, help="'none' or a comma list of move types.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def gen_eqs(u_spec: str, out: str | None) -> None:
    """Dump the deduplicated associated equations, one per line."""
    system = A.build_system(_parse_u_option(u_spec))
    with _output(out) as fh:
        for e in system.deduped:
            fh.write(A.format_equation(e) + "\n")
    click.echo(f"raw {len(system.raw)}, deduped {len(system.deduped)}", err=True)


@main.command()
@click.option("--u", "u_spec", default="31", show_default=True, help="'none' or a comma list of move types.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def solve(u_spec: str, out: str | None) -> None:
    """Solve Assoc(U) and print the parametrized family of balanced assignments."""
    u = _parse_u_option(u_spec)
    system = A.build_system(u)
    sol = A.solve_system(system.deduped)
    with _output(out) as fh:
        label = ",".join(map(str, sorted(u))) or "none"
        fh.write(f"U = {label}\n")
        for k, v in system.sources.items():
            fh.write(f"{k}: {v}\n")
        fh.write(f"equations: raw {len(system.raw)}, deduped {len(system.deduped)}\n")
        if not sol.consistent:
            fh.write("inconsistent system\n")
            return
        fh.write(f"rank {sol.rank}, affine rank {sol.affine_rank}\n")
        fh.write(A.format_solution(sol) + "\n")


@main.command()
@click.argument("kind", type=click.Choice(["ets", "mm-reduced", "mm31-reduced"]))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def catalog(kind: str, out: str | None) -> None:
    """List the transitions, the reduced movie-moves, or the reduced type-31 moves."""
    with _output(out) as fh:
        if kind == "ets":
            cat = catalog_finite()
            fh.write(f"{len(cat)} finite elementary transitions\n")
            for e in cat:
                fh.write(f"{e.name} (type {e.ttype}): {e.src} => {e.tgt}\n")
            fh.write("ET0 family: insertion or removal of an identity event next to any event\n")
            fh.write("ET8 family: commutation of two distant events, any number of strands between them\n")
            return
        if kind == "mm-reduced":
            try:
                pairs = load_bl_reduced()
            except (CountMismatch, NotGrammatical) as exc:
                click.echo(f"error: {exc}", err=True)
                sys.exit(1)
        else:
            pairs = gen_mm31_reduced()
        fh.write(f"{len(pairs)} movie-moves\n")
        for p in pairs:
            fh.write(f"type {p.mmtype}\n{render_movie(p.left)}\n{render_movie(p.right)}\n\n")


if __name__ == "__main__":
    main()
