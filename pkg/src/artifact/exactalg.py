"""Exact arithmetic over Z[q, q^-1] and Q(q), sparse-storage matrices, affine solving."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_inner_gcd


class DivisionByZero(ZeroDivisionError):
    pass


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Element of Z[q, q^-1], stored as a sparse map exponent -> nonzero int."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        if coeffs:
            self._c = {int(e): int(v) for e, v in coeffs.items() if v}
        else:
            self._c = {}
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        p = object.__new__(cls)
        p._c = coeffs
        p._hash = None
        return p

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls._raw({0: int(c)} if c else {})

    @classmethod
    def monomial(cls, exp: int = 1, coeff: int = 1) -> "LaurentPoly":
        return cls._raw({int(exp): int(coeff)} if coeff else {})

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """Parse strings such as ``-2q^-14 + 3 + q^{2} - q``."""
        s = text.replace(" ", "").replace("{", "").replace("}", "").replace("*", "")
        if not s or s == "0":
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        out: dict[int, int] = {}
        pos = 0
        pat = re.compile(r"([+-])(\d*)(q(?:\^(-?\d+))?)?")
        while pos < len(s):
            m = pat.match(s, pos)
            if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
                raise ValueError(f"cannot parse Laurent polynomial {text!r}")
            c = int(m.group(2)) if m.group(2) else 1
            if m.group(1) == "-":
                c = -c
            e = 0
            if m.group(3):
                e = int(m.group(4)) if m.group(4) is not None else 1
            out[e] = out.get(e, 0) + c
            pos = m.end()
        return cls(out)

    # -- queries ----------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def min_exp(self) -> int:
        return min(self._c)

    def max_exp(self) -> int:
        return max(self._c)

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    def is_one(self) -> bool:
        return len(self._c) == 1 and self._c.get(0) == 1

    def content(self) -> int:
        from math import gcd

        g = 0
        for v in self._c.values():
            g = gcd(g, v)
        return g

    def evaluate(self, x, modulus: int | None = None):
        """Evaluate at q = x (exactly, or modulo a prime)."""
        if modulus is None:
            x = Fraction(x)
            return sum((Fraction(v) * x**e for e, v in self._c.items()), Fraction(0))
        inv = pow(x, -1, modulus)
        total = 0
        for e, v in self._c.items():
            total += v * (pow(x, e, modulus) if e >= 0 else pow(inv, -e, modulus))
        return total % modulus

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._c:
            return self
        if not self._c:
            return o
        c = dict(self._c)
        for e, v in o._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._c or not o._c:
            return LaurentPoly._raw({})
        if len(o._c) == 1:
            (e2, v2), = o._c.items()
            return LaurentPoly._raw({e + e2: v * v2 for e, v in self._c.items()})
        if len(self._c) == 1:
            (e1, v1), = self._c.items()
            return LaurentPoly._raw({e + e1: v * v1 for e, v in o._c.items()})
        c: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in o._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return LaurentPoly._raw({e: v for e, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if len(self._c) == 1:
                (e, v), = self._c.items()
                if v in (1, -1):
                    return LaurentPoly._raw({-e * (-k): v ** (-k)})
            raise DivisionByZero("negative power of a non-unit Laurent polynomial")
        result = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by q^k."""
        return LaurentPoly._raw({e + k: v for e, v in self._c.items()})

    def bar(self) -> "LaurentPoly":
        """The involution q -> q^-1."""
        return LaurentPoly._raw({-e: v for e, v in self._c.items()})

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, RatFunc):
                return other == self
            return NotImplemented
        return self._c == o._c

    def __hash__(self) -> int:
        if self._hash is None:
            c = self._c
            if not c:
                self._hash = 0
            elif len(c) == 1 and 0 in c:
                self._hash = hash(c[0])
            else:
                self._hash = hash(frozenset(c.items()))
        return self._hash

    # -- dense conversion for gcd ----------------------------------------
    def _to_dup(self) -> tuple[int, list]:
        """Return (shift, descending coefficient list) with nonzero constant term."""
        lo, hi = min(self._c), max(self._c)
        return lo, [ZZ(self._c.get(e, 0)) for e in range(hi, lo - 1, -1)]

    @staticmethod
    def _from_dup(shift: int, coeffs: Sequence) -> "LaurentPoly":
        n = len(coeffs)
        return LaurentPoly._raw({shift + n - 1 - i: int(v) for i, v in enumerate(coeffs) if v})

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        return format_terms(sorted(self._c.items()))


def format_terms(items: Iterable[tuple[int, int]]) -> str:
    parts: list[str] = []
    for e, v in items:
        sign = "-" if v < 0 else "+"
        a = abs(v)
        if e == 0:
            body = str(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if a == 1 else f"{a}{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    s = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


Q = LaurentPoly.monomial(1)
ONE = LaurentPoly.const(1)
ZERO_LP = LaurentPoly()


def lp_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Gcd in Z[q, q^-1], normalized to an ordinary polynomial with positive leading coefficient."""
    if not a:
        return _normalize_unit(b)
    if not b:
        return _normalize_unit(a)
    _, da = a._to_dup()
    _, db = b._to_dup()
    h, _, _ = dup_inner_gcd(da, db, ZZ)
    return _normalize_unit(LaurentPoly._from_dup(0, h))


def _normalize_unit(p: LaurentPoly) -> LaurentPoly:
    if not p:
        return p
    p = p.shift(-p.min_exp())
    if p._c[p.max_exp()] < 0:
        p = -p
    return p


def poly_exquo(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact division in Z[q, q^-1]; raises if b does not divide a."""
    if not b:
        raise DivisionByZero("division by zero polynomial")
    if not a:
        return a
    if len(b._c) == 1:
        (eb, vb), = b._c.items()
        out = {}
        for e, v in a._c.items():
            qv, r = divmod(v, vb)
            if r:
                raise ArithmeticError("inexact division")
            out[e - eb] = qv
        return LaurentPoly._raw(out)
    from sympy.polys.densearith import dup_div

    sa, da = a._to_dup()
    sb, db = b._to_dup()
    quo, rem = dup_div(da, db, ZZ)
    if rem:
        raise ArithmeticError("inexact division")
    return LaurentPoly._from_dup(sa - sb, quo)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RatFunc:
    """Element of Q(q) in canonical form num/den.

    den is an integer polynomial with nonzero constant term and positive leading
    coefficient; num carries any power of q; num and den are coprime over Q[q]
    and their integer contents are jointly coprime.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly | int = 0, den: LaurentPoly | int = 1):
        if isinstance(num, int):
            num = LaurentPoly.const(num)
        if isinstance(den, int):
            den = LaurentPoly.const(den)
        if not den:
            raise DivisionByZero("zero denominator")
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        r = object.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    @classmethod
    def from_poly(cls, p: LaurentPoly | int) -> "RatFunc":
        if isinstance(p, int):
            p = LaurentPoly.const(p)
        return cls._raw(p, ONE)

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "RatFunc":
        return cls(LaurentPoly.const(fr.numerator), LaurentPoly.const(fr.denominator))

    @classmethod
    def parse(cls, text: str) -> "RatFunc":
        if "/" in text:
            a, b = text.split("/", 1)
            return cls(LaurentPoly.parse(a.strip().strip("()")), LaurentPoly.parse(b.strip().strip("()")))
        return cls.from_poly(LaurentPoly.parse(text))

    @staticmethod
    def coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (LaurentPoly, int)):
            return RatFunc.from_poly(x)
        if isinstance(x, Fraction):
            return RatFunc.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")

    def is_poly(self) -> bool:
        return self.den.is_one()

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def _co(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (LaurentPoly, int)):
            return RatFunc.from_poly(other)
        if isinstance(other, Fraction):
            return RatFunc.from_fraction(other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den.is_one() and o.den.is_one():
            return RatFunc._raw(self.num + o.num, ONE)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if not self.num or not o.num:
            return RatFunc._raw(ZERO_LP, ONE)
        if self.den.is_one() and o.den.is_one():
            return RatFunc._raw(self.num * o.num, ONE)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._raw(self.num**k, self.den**k)

    def __eq__(self, other) -> bool:
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.num) if self.den.is_one() else hash((self.num, self.den))
        return self._hash

    def evaluate(self, x, modulus: int | None = None):
        if modulus is None:
            return self.num.evaluate(x) / self.den.evaluate(x)
        d = self.den.evaluate(x, modulus)
        if d == 0:
            raise DivisionByZero("denominator vanishes at evaluation point")
        return self.num.evaluate(x, modulus) * pow(d, -1, modulus) % modulus

    def to_poly(self) -> LaurentPoly:
        if not self.den.is_one():
            raise ValueError("not a Laurent polynomial")
        return self.num

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        n = str(self.num)
        if len(self.num._c) > 1:
            n = f"({n})"
        d = str(self.den)
        if len(self.den._c) > 1:
            d = f"({d})"
        return f"{n}/{d}"


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if not num:
        return ZERO_LP, ONE
    if den.is_one():
        return num, ONE
    sn, dn = num._to_dup()
    sd, dd = den._to_dup()
    if len(dd) == 1:
        # den is a monomial c*q^k
        c = int(dd[0])
        g = num.content()
        from math import gcd

        g = gcd(g, c)
        if c < 0:
            g = -g
        num2 = LaurentPoly._raw({e - sd: v // g for e, v in num._c.items()})
        return num2, LaurentPoly.const(c // g)
    _, cff, cfg = dup_inner_gcd(dn, dd, ZZ)
    n2 = LaurentPoly._from_dup(sn - sd, cff)
    d2 = LaurentPoly._from_dup(0, cfg)
    if d2._c[d2.max_exp()] < 0:
        n2, d2 = -n2, -d2
    return n2, d2


def rf_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


RF_ZERO = RatFunc._raw(ZERO_LP, ONE)
RF_ONE = RatFunc._raw(ONE, ONE)


# ---------------------------------------------------------------------------
# Affine expressions in formal parameters
# ---------------------------------------------------------------------------


class AffineExpr:
    """constant + sum of coeff * parameter, coefficients in Q(q)."""

    __slots__ = ("constant", "terms", "_hash")

    def __init__(self, constant=None, terms: Mapping[Hashable, object] | None = None):
        self.constant = RF_ZERO if constant is None else RatFunc.coerce(constant)
        self.terms: dict[Hashable, RatFunc] = {}
        if terms:
            for k, v in terms.items():
                v = RatFunc.coerce(v)
                if v:
                    self.terms[k] = v
        self._hash = None

    @classmethod
    def param(cls, p: Hashable) -> "AffineExpr":
        return cls(None, {p: RF_ONE})

    def __bool__(self) -> bool:
        return bool(self.constant) or bool(self.terms)

    def is_zero(self) -> bool:
        return not self

    def _co(self, other):
        if isinstance(other, AffineExpr):
            return other
        if isinstance(other, (RatFunc, LaurentPoly, int, Fraction)):
            return AffineExpr(other)
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, v in o.terms.items():
            s = terms.get(k, RF_ZERO) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        r = AffineExpr(self.constant + o.constant)
        r.terms = terms
        return r

    __radd__ = __add__

    def __neg__(self) -> "AffineExpr":
        r = AffineExpr(-self.constant)
        r.terms = {k: -v for k, v in self.terms.items()}
        return r

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, AffineExpr):
            if other.terms and self.terms:
                raise TypeError("product of two non-constant affine expressions")
            if not self.terms:
                return other * self.constant
            other = other.constant
        c = RatFunc.coerce(other)
        if not c:
            return AffineExpr()
        r = AffineExpr(self.constant * c)
        r.terms = {k: v * c for k, v in self.terms.items()}
        return r

    __rmul__ = __mul__

    def substitute(self, values: Mapping[Hashable, object]) -> object:
        """Replace parameters by values (RatFunc or AffineExpr)."""
        acc: object = AffineExpr(self.constant)
        for k, v in self.terms.items():
            acc = acc + values[k] * v
        return acc

    def __eq__(self, other) -> bool:
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self.constant == o.constant and self.terms == o.terms

    def key(self) -> tuple:
        return (self.constant, frozenset(self.terms.items()))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def format(self, order: Callable[[Hashable], object] | None = None, name: Callable[[Hashable], str] = str) -> str:
        keys = sorted(self.terms, key=order) if order else list(self.terms)
        parts = [f"({self.terms[k]})*{name(k)}" for k in keys]
        parts.append(f"({self.constant})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"AffineExpr({self.format()})"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class AmplMatrix:
    """A rows x cols matrix (dense semantics, zero entries not stored).

    Entries may be LaurentPoly, RatFunc or AffineExpr. Rows index the target
    basis, columns the source basis.
    """

    __slots__ = ("rows", "cols", "_d")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        self.rows = rows
        self.cols = cols
        self._d: dict[int, dict[int, object]] = {}
        if entries:
            for (r, c), v in entries.items():
                if v:
                    if not (0 <= r < rows and 0 <= c < cols):
                        raise IndexError((r, c))
                    self._d.setdefault(r, {})[c] = v

    @classmethod
    def _from_rows(cls, rows: int, cols: int, d: dict[int, dict[int, object]]) -> "AmplMatrix":
        m = object.__new__(cls)
        m.rows, m.cols, m._d = rows, cols, d
        return m

    @classmethod
    def identity(cls, n: int, one=ONE) -> "AmplMatrix":
        return cls._from_rows(n, n, {i: {i: one} for i in range(n)})

    @classmethod
    def from_dense(cls, grid: Sequence[Sequence[object]]) -> "AmplMatrix":
        rows = len(grid)
        cols = len(grid[0]) if rows else 0
        return cls(rows, cols, {(r, c): v for r, row in enumerate(grid) for c, v in enumerate(row)})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, rc: tuple[int, int]):
        r, c = rc
        return self._d.get(r, {}).get(c, 0)

    def items(self) -> Iterator[tuple[tuple[int, int], object]]:
        for r in sorted(self._d):
            row = self._d[r]
            for c in sorted(row):
                yield (r, c), row[c]

    def nnz(self) -> int:
        return sum(len(r) for r in self._d.values())

    def dense(self) -> list[list[object]]:
        return [[self[r, c] for c in range(self.cols)] for r in range(self.rows)]

    def column(self, c: int) -> dict[int, object]:
        return {r: row[c] for r, row in self._d.items() if c in row}

    def map(self, fn: Callable[[object], object]) -> "AmplMatrix":
        d = {}
        for r, row in self._d.items():
            nr = {}
            for c, v in row.items():
                w = fn(v)
                if w:
                    nr[c] = w
            if nr:
                d[r] = nr
        return AmplMatrix._from_rows(self.rows, self.cols, d)

    def __matmul__(self, other: "AmplMatrix") -> "AmplMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "AmplMatrix") -> "AmplMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        d = {r: dict(row) for r, row in self._d.items()}
        for r, row in other._d.items():
            tgt = d.setdefault(r, {})
            for c, v in row.items():
                if c in tgt:
                    s = tgt[c] + v
                    if s:
                        tgt[c] = s
                    else:
                        del tgt[c]
                else:
                    tgt[c] = v
            if not tgt:
                del d[r]
        return AmplMatrix._from_rows(self.rows, self.cols, d)

    def __neg__(self) -> "AmplMatrix":
        return self.map(lambda v: -v)

    def __sub__(self, other: "AmplMatrix") -> "AmplMatrix":
        return self + (-other)

    def scale(self, s) -> "AmplMatrix":
        return self.map(lambda v: v * s)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AmplMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return not (self - other)._d

    def is_zero(self) -> bool:
        return not self._d

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.items())))

    def __repr__(self) -> str:
        return f"AmplMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def format(self) -> str:
        return "\n".join("[" + ", ".join(str(v) for v in row) + "]" for row in self.dense())


def mat_mul(a: AmplMatrix, b: AmplMatrix) -> AmplMatrix:
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    bd = b._d
    out: dict[int, dict[int, object]] = {}
    for r, arow in a._d.items():
        acc: dict[int, object] = {}
        for k, av in arow.items():
            brow = bd.get(k)
            if not brow:
                continue
            for c, bv in brow.items():
                p = av * bv
                if c in acc:
                    acc[c] = acc[c] + p
                else:
                    acc[c] = p
        acc = {c: v for c, v in acc.items() if v}
        if acc:
            out[r] = acc
    return AmplMatrix._from_rows(a.rows, b.cols, out)


def mat_tensor(a: AmplMatrix, b: AmplMatrix) -> AmplMatrix:
    """Kronecker product; the first factor indexes the most significant bits."""
    out: dict[int, dict[int, object]] = {}
    for ra, arow in a._d.items():
        for rb, brow in b._d.items():
            row = {}
            for ca, av in arow.items():
                for cb, bv in brow.items():
                    p = av * bv
                    if p:
                        row[ca * b.cols + cb] = p
            if row:
                out[ra * b.rows + rb] = row
    return AmplMatrix._from_rows(a.rows * b.rows, a.cols * b.cols, out)


def pad_identity(m: int, a: AmplMatrix, n: int) -> AmplMatrix:
    """Id_{2^m} (x) a (x) Id_{2^n}, computed without forming the identities."""
    if m == 0 and n == 0:
        return a
    wl, wr = 1 << m, 1 << n
    out: dict[int, dict[int, object]] = {}
    for left in range(wl):
        for ra, arow in a._d.items():
            for right in range(wr):
                out[(left * a.rows + ra) * wr + right] = {
                    (left * a.cols + ca) * wr + right: v for ca, v in arow.items()
                }
    return AmplMatrix._from_rows(wl * a.rows * wr, wl * a.cols * wr, out)


# ---------------------------------------------------------------------------
# Affine linear systems
# ---------------------------------------------------------------------------


@dataclass
class SolutionSpace:
    params: list[Hashable]
    rank: int
    affine_rank: int
    particular: dict[Hashable, RatFunc] | None
    homogeneous_basis: list[dict[Hashable, RatFunc]]
    free_params: list[Hashable]
    general: dict[Hashable, AffineExpr] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.affine_rank >= 0

    def point(self, values: Mapping[Hashable, object]) -> dict[Hashable, RatFunc]:
        """The member of the family with the given values of the free parameters."""
        out = {}
        for p, expr in self.general.items():
            v = expr.constant
            for k, c in expr.terms.items():
                v = v + c * RatFunc.coerce(values[k])
            out[p] = v
        return out


_PRIME = (1 << 61) - 1


def _eq_mod(e: AffineExpr, index: Mapping[Hashable, int], x: int) -> dict[int, int] | None:
    row: dict[int, int] = {}
    try:
        for k, v in e.terms.items():
            val = v.evaluate(x, _PRIME)
            if val:
                row[index[k]] = val
        c = e.constant.evaluate(x, _PRIME)
    except DivisionByZero:
        return None
    if c:
        row[-1] = c
    return row


class _ModRREF:
    """Incremental reduced row echelon form modulo a prime; used to select rows."""

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}
        self.inconsistent = False

    def add(self, row: dict[int, int]) -> bool:
        p = _PRIME
        row = dict(row)
        while True:
            hit = [k for k in row if k in self.pivots]
            if not hit:
                break
            col = hit[0]
            f = row[col]
            for k, v in self.pivots[col].items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        cols = [k for k in row if k >= 0]
        if not cols:
            if row.get(-1):
                self.inconsistent = True
                return True
            return False
        piv = min(cols)
        inv = pow(row[piv], -1, p)
        row = {k: v * inv % p for k, v in row.items()}
        for other in self.pivots.values():
            f = other.get(piv)
            if f:
                for k, v in row.items():
                    nv = (other.get(k, 0) - f * v) % p
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self.pivots[piv] = row
        return True


def _row_primitive(row: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
    g = ZERO_LP
    for v in row.values():
        g = poly_gcd(g, v)
        if g.is_one():
            break
    lead = row[min(row)]
    if lead._c[lead.max_exp()] < 0:
        g = -g
    if g.is_one():
        return row
    return {k: poly_exquo(v, g) for k, v in row.items()}


def _exact_rows(eqs: Sequence[AffineExpr], index: Mapping[Hashable, int]) -> list[dict[int, LaurentPoly]]:
    """Clear denominators: each equation becomes a primitive row over Z[q, q^-1]."""
    rows = []
    for e in eqs:
        entries = [(index[k], v) for k, v in e.terms.items()]
        if e.constant:
            entries.append((-1, e.constant))
        den = ONE
        for _, v in entries:
            if not v.den.is_one():
                den = poly_exquo(den * v.den, poly_gcd(den, v.den))
        row = {k: v.num * poly_exquo(den, v.den) for k, v in entries}
        rows.append(_row_primitive(row) if row else row)
    return rows


def _fraction_free_solve(rows: list[dict[int, LaurentPoly]], n: int):
    """Forward elimination over Z[q, q^-1] (gcd-reduced), pivots in column order.

    Returns (pivot_rows, inconsistent) where pivot_rows maps column -> row.
    """
    work = [r for r in rows if r]
    pivots: dict[int, dict[int, LaurentPoly]] = {}
    for col in range(n):
        cand = [i for i, r in enumerate(work) if col in r]
        if not cand:
            continue
        # deterministic: fewest nonzeros, then input order
        pi = min(cand, key=lambda i: (len(work[i]), i))
        prow = work[pi]
        pv = prow[col]
        rest = []
        for i, r in enumerate(work):
            if i == pi:
                continue
            if col in r:
                f = r[col]
                new: dict[int, LaurentPoly] = {}
                for k in set(r) | set(prow):
                    v = r.get(k, ZERO_LP) * pv - prow.get(k, ZERO_LP) * f
                    if v:
                        new[k] = v
                r = _row_primitive(new) if new else new
            if r:
                rest.append(r)
        pivots[col] = prow
        work = rest
    inconsistent = any(set(r) == {-1} for r in work)
    return pivots, inconsistent


def solve_affine(
    equations: Sequence[AffineExpr],
    params: Sequence[Hashable],
    seed: int = 20240611,
) -> SolutionSpace:
    """Exact solution space of the affine system {e = 0}.

    A modular pass picks a row basis, the exact fraction-free elimination runs on
    those rows, and every input equation is then checked exactly against the
    resulting family; any equation that fails is added and the step repeated.
    """
    params = list(params)
    index = {p: i for i, p in enumerate(params)}
    n = len(params)
    eqs = list(dict.fromkeys(e for e in equations if e))
    rng = random.Random(seed)
    x = rng.randrange(2, _PRIME - 2)
    mod = _ModRREF()
    chosen: list[AffineExpr] = []
    for e in eqs:
        r = _eq_mod(e, index, x)
        if r is None or mod.add(r):
            chosen.append(e)
    while True:
        pivots, inconsistent = _fraction_free_solve(_exact_rows(chosen, index), n)
        if inconsistent:
            return SolutionSpace(params, len(pivots), -1, None, [], [], {})
        general = _back_substitute(pivots, params)
        failing = [e for e in eqs if e.substitute(general)]
        if not failing:
            break
        chosen.extend(f for f in failing if f not in chosen)
    free = [params[i] for i in range(n) if i not in pivots]
    particular = {p: general[p].constant for p in params}
    basis = []
    for f in free:
        basis.append({p: general[p].terms.get(f, RF_ZERO) for p in params})
    rank = len(pivots)
    return SolutionSpace(params, rank, n - rank, particular, basis, free, general)


def _back_substitute(pivots: dict[int, dict[int, LaurentPoly]], params: Sequence[Hashable]) -> dict[Hashable, AffineExpr]:
    n = len(params)
    sol: dict[int, AffineExpr] = {i: AffineExpr.param(params[i]) for i in range(n) if i not in pivots}
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        acc = AffineExpr(RatFunc.from_poly(row[-1]) if -1 in row else None)
        for k, v in row.items():
            if k == col or k == -1:
                continue
            acc = acc + sol[k] * RatFunc.from_poly(v)
        sol[col] = acc * (-RatFunc.from_poly(row[col]).inverse())
    return {params[i]: sol[i] for i in range(n)}
