"""Amplitude-assignments, amplitudes of flickers and movies, and the balanced systems."""

from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Union

from .diagrams import F, S, Still, concat
from .exactalg import (
    RF_ONE,
    RF_ZERO,
    AffineExpr,
    AmplMatrix,
    LaurentPoly,
    Q,
    RatFunc,
    SolutionSpace,
    solve_affine,
)
from .kauffman import bracket_still
from .movies import AnyFlicker, Flicker, IdentityFlicker, Movie
from .transitions import ElementaryTransition, catalog_finite


class NotInP(KeyError):
    pass


class ImproperU(ValueError):
    pass


class NotGrammatical(ValueError):
    pass


# ---------------------------------------------------------------------------
# Basic stills and normal coordinates
# ---------------------------------------------------------------------------

_BASIS: dict[tuple[int, int], tuple[Still, ...]] = {
    (0, 0): (Still.identity(0),),
    (2, 0): (S(F(0, "Cap", 0)),),
    (1, 1): (Still.identity(1),),
    (0, 2): (S(F(0, "Cup", 0)),),
    (3, 1): (S(F(1, "Cap", 0)), S(F(0, "Cap", 1))),
    (2, 2): (Still.identity(2), S(F(0, "Cap", 0), F(0, "Cup", 0))),
    (1, 3): (S(F(1, "Cup", 0)), S(F(0, "Cup", 1))),
    (3, 3): (
        Still.identity(3),
        S(F(1, "Cap", 0), F(1, "Cup", 0)),
        S(F(0, "Cap", 1), F(0, "Cup", 1)),
        S(F(0, "Cap", 1), F(1, "Cup", 0)),
        S(F(1, "Cap", 0), F(0, "Cup", 1)),
    ),
}


def basis_stills(m: int, n: int) -> list[Still]:
    """The ordered basic stills with source m and target n."""
    try:
        return list(_BASIS[(m, n)])
    except KeyError:
        raise NotInP((m, n)) from None


@dataclass(frozen=True)
class ParamId:
    """Normal coordinate PE_j of the elementary transition E."""

    et_name: str
    j: int

    def __str__(self) -> str:
        return f"P_{self.et_name}_{self.j}"


@lru_cache(maxsize=1)
def normal_ets() -> tuple[ElementaryTransition, ...]:
    return tuple(e for e in catalog_finite() if 1 <= e.ttype <= 7)


@lru_cache(maxsize=1)
def all_params() -> tuple[ParamId, ...]:
    """The 102 normal coordinates in canonical (table) order."""
    out = []
    for e in normal_ets():
        for j in range(1, len(basis_stills(e.in_, e.out)) + 1):
            out.append(ParamId(e.name, j))
    return tuple(out)


@lru_cache(maxsize=1)
def param_order() -> dict[ParamId, int]:
    return {p: i for i, p in enumerate(all_params())}


def params_of(e: ElementaryTransition) -> list[ParamId]:
    return [ParamId(e.name, j) for j in range(1, len(basis_stills(e.in_, e.out)) + 1)]


# ---------------------------------------------------------------------------
# Assignments
# ---------------------------------------------------------------------------


@dataclass
class AmplitudeAssignment:
    """A strongly normal assignment given by its 102 coordinates."""

    coords: dict[ParamId, RatFunc]
    name: str = ""

    def __post_init__(self):
        missing = [p for p in all_params() if p not in self.coords]
        if missing:
            raise KeyError(f"assignment lacks coordinates {', '.join(map(str, missing[:5]))}")
        self.coords = {p: RatFunc.coerce(self.coords[p]) for p in all_params()}


class SymbolicAssignment:
    """Each coordinate is its own formal parameter."""

    name = "symbolic"


SYMBOLIC = SymbolicAssignment()
Assignment = Union[AmplitudeAssignment, SymbolicAssignment]


# ---------------------------------------------------------------------------
# Linear forms: constant matrix plus one matrix per coordinate
# ---------------------------------------------------------------------------


class LinForm:
    """sum_p P_p * M_p + M_const, each M a Laurent matrix; key None is the constant."""

    __slots__ = ("rows", "cols", "parts")

    def __init__(self, rows: int, cols: int, parts: Optional[dict] = None):
        self.rows, self.cols = rows, cols
        self.parts: dict[Optional[ParamId], AmplMatrix] = parts or {}

    def add(self, key: Optional[ParamId], m: AmplMatrix, sign: int = 1) -> None:
        if m.shape != (self.rows, self.cols):
            raise ValueError("shape mismatch in linear form")
        m = m if sign == 1 else -m
        cur = self.parts.get(key)
        self.parts[key] = m if cur is None else cur + m

    def __sub__(self, other: "LinForm") -> "LinForm":
        out = LinForm(self.rows, self.cols, dict(self.parts))
        for k, m in other.parts.items():
            out.add(k, m, -1)
        return out

    def entries(self) -> dict[tuple[int, int], AffineExpr]:
        acc: dict[tuple[int, int], tuple[dict, object]] = {}
        for key, m in self.parts.items():
            for rc, v in m.items():
                if not v:
                    continue
                const, terms = acc.get(rc, (None, {}))
                if key is None:
                    const = v
                else:
                    terms[key] = v
                acc[rc] = (const, terms)
        out = {}
        for rc, (const, terms) in acc.items():
            e = AffineExpr(RatFunc.from_poly(const) if const is not None else None, {k: RatFunc.from_poly(v) for k, v in terms.items()})
            if e:
                out[rc] = e
        return out

    def evaluate(self, coords: Mapping[ParamId, RatFunc]) -> AmplMatrix:
        out: dict[tuple[int, int], RatFunc] = {}
        for key, m in self.parts.items():
            c = RF_ONE if key is None else coords[key]
            if not c:
                continue
            for rc, v in m.items():
                out[rc] = out.get(rc, RF_ZERO) + c * RatFunc.from_poly(v)
        return AmplMatrix(self.rows, self.cols, out)


def _shape(s: Still) -> tuple[int, int]:
    return 1 << s.target, 1 << s.source


def _flicker_stills(f: Flicker) -> list[tuple[Optional[ParamId], Still]]:
    """(coordinate, still) pairs with <F> = sum coordinate * <still>."""
    e = f.et
    if e.ttype in (0, 8):
        return [(None, f.source())]
    out = []
    for p, b in zip(params_of(e), basis_stills(e.in_, e.out)):
        out.append((p, concat([f.bottom, b.frame(f.m, f.n), f.top])))
    return out


def flicker_form(f: AnyFlicker) -> LinForm:
    if isinstance(f, IdentityFlicker):
        s = f.still
        lf = LinForm(*_shape(s))
        lf.add(None, bracket_still(s))
        return lf
    s0 = f.source()
    lf = LinForm(*_shape(s0))
    for key, s in _flicker_stills(f):
        lf.add(key, bracket_still(s))
    return lf


def movie_form(m: Movie) -> LinForm:
    """<S1> - <F1> + <S2> - ... - <Fs> + <S_{s+1}> as a linear form."""
    stills = m.stills()
    lf = LinForm(*_shape(stills[0]))
    for s in stills:
        lf.add(None, bracket_still(s))
    for f in m.flickers:
        for key, m2 in flicker_form(f).parts.items():
            lf.add(key, m2, -1)
    return lf


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------


def amp_et(a: Assignment, e: ElementaryTransition) -> AmplMatrix:
    """<E>_A: the basic-still combination for types 1-7, <src(E)> for types 0 and 8."""
    if e.ttype in (0, 8):
        return bracket_still(e.src)
    bs = basis_stills(e.in_, e.out)
    if isinstance(a, SymbolicAssignment):
        out: dict = {}
        for p, b in zip(params_of(e), bs):
            for rc, v in bracket_still(b).items():
                out[rc] = out.get(rc, AffineExpr()) + AffineExpr(None, {p: RatFunc.from_poly(v)})
        return AmplMatrix(1 << e.out, 1 << e.in_, {k: v for k, v in out.items() if v})
    lf = LinForm(1 << e.out, 1 << e.in_)
    for p, b in zip(params_of(e), bs):
        lf.add(p, bracket_still(b))
    return lf.evaluate(a.coords)


def _realize(lf: LinForm, a: Assignment) -> AmplMatrix:
    if isinstance(a, SymbolicAssignment):
        return AmplMatrix(lf.rows, lf.cols, lf.entries())
    return lf.evaluate(a.coords)


def amp_flicker(a: Assignment, f: AnyFlicker) -> AmplMatrix:
    return _realize(flicker_form(f), a)


def amp_movie(a: Assignment, m: Movie) -> AmplMatrix:
    return _realize(movie_form(m), a)


def amp_compact(a: AmplitudeAssignment, m: Movie) -> Union[LaurentPoly, RatFunc]:
    """The scalar amplitude of a compact movie; a Laurent polynomial when possible."""
    mat = amp_movie(a, m)
    if mat.shape != (1, 1):
        raise ValueError("movie is not compact")
    v = RatFunc.coerce(mat[0, 0])
    return v.to_poly() if v.is_poly() else v


# ---------------------------------------------------------------------------
# Tables of the published solution families
# ---------------------------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul}


def eval_coordinate(text: str, symbols: Mapping[str, object]) -> object:
    """Evaluate an arithmetic expression in q and the given symbols."""

    def ev(node: ast.AST) -> object:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return RatFunc.coerce(node.value)
        if isinstance(node, ast.Name):
            if node.id == "q":
                return RatFunc.from_poly(Q)
            if node.id in symbols:
                return symbols[node.id]
            raise ValueError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = ev(node.right)
                k = RatFunc.coerce(exp).to_poly()
                if not k.is_constant():
                    raise ValueError("non-integer exponent")
                return ev(node.left) ** k.coeffs.get(0, 0)
            if type(node.op) in _OPS:
                return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression: {ast.dump(node)}")

    text = text.strip().replace("^", "**")
    # printed form writes 3q**2 and (a)(b); make the products explicit
    text = re.sub(r"(\d)\s*(?=[A-Za-z(])", r"\1*", text)
    text = re.sub(r"\)\s*(?=[A-Za-z0-9(])", ")*", text)
    return ev(ast.parse(text, mode="eval"))


def _read_table(lines: Iterable[str], symbols: Mapping[str, object]) -> dict[ParamId, object]:
    out: dict[ParamId, object] = {}
    for raw in lines:
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        lhs, rhs = line.split("=", 1)
        m = re.fullmatch(r"(?:P_)?(\w+?)(?:_|\s+)(\d+)", lhs.strip())
        if not m:
            raise ValueError(f"bad coordinate name {lhs.strip()!r}")
        out[ParamId(m.group(1), int(m.group(2)))] = eval_coordinate(rhs, symbols)
    return out


def _data_text(name: str) -> str:
    return resources.files("artifact").joinpath("data").joinpath(name).read_text()


TABLE_SYMBOLS = {"u31": ("t1", "t2", "t3", "t4"), "empty": ("t",)}


@lru_cache(maxsize=None)
def table_family(which: str) -> dict[ParamId, AffineExpr]:
    """The published parametrized solution family: 'u31' (t1..t4) or 'empty' (t)."""
    syms = {s: AffineExpr.param(s) for s in TABLE_SYMBOLS[which]}
    raw = _read_table(_data_text(f"table_{which}.txt").splitlines(), syms)
    if list(raw) != list(all_params()):
        raise AssertionError("table order differs from the canonical parameter order")
    return {p: v if isinstance(v, AffineExpr) else AffineExpr(v) for p, v in raw.items()}


def family_point(which: str, values: Mapping[str, object]) -> AmplitudeAssignment:
    fam = table_family(which)
    vals = {k: RatFunc.coerce(v) for k, v in values.items()}
    coords = {}
    for p, e in fam.items():
        v = e.constant
        for k, c in e.terms.items():
            v = v + c * vals[k]
        coords[p] = v
    return AmplitudeAssignment(coords)


NAMED = ("A0", "A1", "A2", "A3", "A4", "Aa", "Ab")


def named_assignment(name: str) -> AmplitudeAssignment:
    """A0-A4 from the {31} family (t_i = 1, others 0), Aa/Ab from the empty family (t = 0/1)."""
    if name in ("A0", "A1", "A2", "A3", "A4"):
        i = int(name[1])
        vals = {f"t{k}": 1 if k == i else 0 for k in range(1, 5)}
        a = family_point("u31", vals)
    elif name in ("Aa", "Ab"):
        a = family_point("empty", {"t": 0 if name == "Aa" else 1})
    else:
        raise KeyError(f"unknown assignment {name!r}")
    a.name = name
    return a


def load_assignment_file(path: str) -> AmplitudeAssignment:
    with open(path) as fh:
        raw = _read_table(fh, {})
    return AmplitudeAssignment({p: RatFunc.coerce(v) for p, v in raw.items()}, name=path)


# ---------------------------------------------------------------------------
# Associated equations and systems
# ---------------------------------------------------------------------------


def _check_grammatical(left: Movie, right: Movie) -> None:
    if not (left.source().same_reduced(right.source()) and left.target().same_reduced(right.target())):
        raise NotGrammatical("movies of a movie-move must share source and target")


def pair_form(left: Movie, right: Movie) -> LinForm:
    _check_grammatical(left, right)
    return movie_form(left) - movie_form(right)


def assoc_equations(left: Movie, right: Movie) -> list[AffineExpr]:
    """All 2^(in+out) entries of <left> - <right>, row-major; zero entries included."""
    lf = pair_form(left, right)
    ent = lf.entries()
    return [ent.get((r, c), AffineExpr()) for r in range(lf.rows) for c in range(lf.cols)]


def respects(a: AmplitudeAssignment, left: Movie, right: Movie) -> bool:
    return pair_form(left, right).evaluate(a.coords).is_zero()


def dedupe(equations: Iterable[AffineExpr]) -> list[AffineExpr]:
    """Drop 0 = 0 and exact repetitions, keeping first occurrences."""
    return list(dict.fromkeys(e for e in equations if e))


@dataclass
class EquationSystem:
    raw: list[AffineExpr]
    deduped: list[AffineExpr]
    sources: dict[str, int] = field(default_factory=dict)


def solve_system(eqs: Sequence[AffineExpr]) -> SolutionSpace:
    return solve_affine(eqs, all_params())


ALL_TYPES = frozenset(range(1, 32))


def parse_u(spec: Union[str, Iterable[int], None]) -> frozenset[int]:
    """'none' or '' gives the empty set; otherwise a comma list of move types."""
    if spec is None:
        return frozenset()
    if isinstance(spec, str):
        spec = spec.strip()
        if spec.lower() in ("", "none", "empty"):
            return frozenset()
        u = frozenset(int(x) for x in spec.split(","))
    else:
        u = frozenset(int(x) for x in spec)
    if not u <= ALL_TYPES:
        raise ImproperU(f"move types must lie in 1..31, got {sorted(u - ALL_TYPES)}")
    return u


@lru_cache(maxsize=2)
def mm31_equations(include_et0: bool = True) -> tuple[int, tuple[AffineExpr, ...]]:
    """Pair count and raw equations of the reduced type-31 moves; shared by every U without 31."""
    from .movemoves import gen_mm31_reduced

    mm = gen_mm31_reduced(include_et0=include_et0)
    eqs: list[AffineExpr] = []
    for p in mm:
        eqs.extend(assoc_equations(p.left, p.right))
    return len(mm), tuple(eqs)


def build_system(u: Union[str, Iterable[int], None], include_et0: bool = True) -> EquationSystem:
    """Assoc(U): the reduced catalog moves of types outside U, closed under SYM, plus type 31 if allowed."""
    from .movemoves import B_TYPES, bl_catalog, sym_closure

    u = parse_u(u)
    if u >= ALL_TYPES:
        raise ImproperU("U must be a proper subset of {1..31}")
    keep = [p for p in bl_catalog() if p.mmtype in B_TYPES and p.mmtype not in u]
    raw: list[AffineExpr] = []
    sources: dict[str, int] = {}
    closure = sym_closure(keep)
    for p in closure:
        raw.extend(assoc_equations(p.left, p.right))
    sources["catalog_pairs"] = len(closure)
    sources["catalog_raw"] = len(raw)
    sources["catalog_deduped"] = len(dedupe(raw))
    if 31 not in u:
        n_pairs, eqs31 = mm31_equations(include_et0)
        sources["mm31_pairs"] = n_pairs
        sources["mm31_raw"] = len(eqs31)
        sources["mm31_deduped"] = len(dedupe(eqs31))
        raw.extend(eqs31)
    return EquationSystem(raw, dedupe(raw), sources)


def solve_balanced(u: Union[str, Iterable[int], None]) -> SolutionSpace:
    return solve_system(build_system(u).deduped)


def format_equation(e: AffineExpr) -> str:
    order = param_order()
    parts = []
    for p in sorted(e.terms, key=order.__getitem__):
        parts.append(f"({e.terms[p]})*{p}")
    parts.append(f"({e.constant})")
    return " + ".join(parts) + " = 0"


def format_solution(sol: SolutionSpace, symbol_names: Optional[Mapping[Hashable, str]] = None) -> str:
    """One line per coordinate, ``P_ET1I_1 = ...``, free parameters named by symbol_names."""
    names = symbol_names or {}
    lines = []
    for p in all_params():
        e = sol.general[p]
        terms = [(names.get(k, str(k)), v) for k, v in e.terms.items()]
        terms.sort()
        parts = [f"({v})*{k}" if not v.is_poly() or len(v.num.coeffs) > 1 or v != RF_ONE else k for k, v in terms]
        if e.constant or not parts:
            parts.append(str(e.constant))
        lines.append(f"{p} = " + " + ".join(parts))
    return "\n".join(lines)
