"""Exact coefficients: rational functions over the Gaussian rationals.

A :class:`Scalar` is a reduced fraction ``num/den`` of sparse polynomials
with Gaussian-rational coefficients in finitely many named variables.  The
polynomial arithmetic itself (including multivariate gcd) is delegated to
sympy's sparse ``PolyRing`` over ``QQ_I``; this module owns normalization,
variable bookkeeping, parsing and rendering.

Variables are ordered globally by first registration, so that every ring a
Scalar lives in is a sub-list of one fixed order.  That keeps normal forms
stable when Scalars from different rings are combined.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyRing

__all__ = [
    "GaussianRational",
    "MultiPoly",
    "Scalar",
    "ScalarError",
    "DivisionByZeroError",
    "ParseError",
    "UnknownIdentifierError",
    "SubstitutionError",
    "register_variables",
    "scalar_arith",
    "parse_scalar",
    "render",
    "substitute",
    "normalize",
    "S",
]


class ScalarError(Exception):
    pass


class DivisionByZeroError(ScalarError, ZeroDivisionError):
    pass


class ParseError(ScalarError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class SubstitutionError(ScalarError):
    pass


# ---------------------------------------------------------------------------
# variable registry and rings

_RANK: dict[str, int] = {}
_RINGS: dict[tuple[str, ...], PolyRing] = {}
_QQ_RINGS: dict[tuple[str, ...], PolyRing] = {}
_EMBED: dict[tuple[tuple[str, ...], tuple[str, ...]], tuple[int, ...]] = {}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def register_variables(names: Iterable[str]) -> None:
    """Give each new name a slot in the global variable order."""
    for name in names:
        if not _IDENT.match(name) or name == "i":
            raise ValueError(f"invalid variable name {name!r}")
        if name not in _RANK:
            _RANK[name] = len(_RANK)


def _sorted_names(names: Iterable[str]) -> tuple[str, ...]:
    names = set(names)
    register_variables(sorted(n for n in names if n not in _RANK))
    return tuple(sorted(names, key=_RANK.__getitem__))


def _ring(names: tuple[str, ...]) -> PolyRing:
    R = _RINGS.get(names)
    if R is None:
        R = PolyRing(names, QQ_I, grlex) if names else PolyRing((), QQ_I, grlex)
        _RINGS[names] = R
    return R


def _qq_ring(names: tuple[str, ...]) -> PolyRing:
    R = _QQ_RINGS.get(names)
    if R is None:
        R = PolyRing(names, QQ, grlex)
        _QQ_RINGS[names] = R
    return R


def _embed(p, src: tuple[str, ...], dst: tuple[str, ...], R: PolyRing):
    if src == dst:
        return p
    key = (src, dst)
    pos = _EMBED.get(key)
    if pos is None:
        pos = tuple(dst.index(n) for n in src)
        _EMBED[key] = pos
    n = len(dst)
    out = {}
    for m, c in p.items():
        e = [0] * n
        for k, j in zip(m, pos):
            e[j] = k
        out[tuple(e)] = c
    return R.from_dict(out) if out else R.zero


# ---------------------------------------------------------------------------
# value types exposed in the public surface


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def _from_domain(cls, c) -> "GaussianRational":
        return cls(_to_fraction(c.x), _to_fraction(c.y))

    def _to_domain(self):
        return QQ_I(QQ(self.re.numerator, self.re.denominator), QQ(self.im.numerator, self.im.denominator))

    def __str__(self) -> str:
        return _render_coeff(self.re, self.im)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class MultiPoly:
    """Read-only view of a polynomial: exponent vectors -> coefficients."""

    variables: tuple[str, ...]
    terms: Mapping[tuple[int, ...], GaussianRational]

    @classmethod
    def _from_ring(cls, p, names: tuple[str, ...]) -> "MultiPoly":
        return cls(names, {m: GaussianRational._from_domain(c) for m, c in p.terms()})

    def _to_ring(self):
        names = _sorted_names(self.variables)
        R = _ring(names)
        src = _ring(self.variables) if self.variables == names else None
        d = {m: c._to_domain() for m, c in self.terms.items() if c.re or c.im}
        if src is not None:
            return R.from_dict(d) if d else R.zero, names
        pos = [names.index(v) for v in self.variables]
        out = {}
        for m, c in d.items():
            e = [0] * len(names)
            for k, j in zip(m, pos):
                e[j] = k
            out[tuple(e)] = c
        return (R.from_dict(out) if out else R.zero), names

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return (Scalar._from_poly(*self._to_ring()) + Scalar._from_poly(*other._to_ring())).num

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        return (Scalar._from_poly(*self._to_ring()) * Scalar._from_poly(*other._to_ring())).num

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return Scalar._from_poly(*self._to_ring()) == Scalar._from_poly(*other._to_ring())

    def __hash__(self) -> int:
        return hash(Scalar._from_poly(*self._to_ring()))

    def __str__(self) -> str:
        p, names = self._to_ring()
        return _render_poly(p, names)


# ---------------------------------------------------------------------------
# Scalar


def _is_one(p) -> bool:
    return len(p) == 1 and p.LC == p.ring.domain.one and not any(p.LM)


def _all_real(p) -> bool:
    return all(not c.y for c in p.values())


def _to_qq(p, Q):
    return Q.from_dict({m: c.x for m, c in p.items()}) if p else Q.zero


def _norm(p, Q):
    """p·p̄ as a polynomial over QQ."""
    conj = p.ring.from_dict({m: QQ_I(c.x, -c.y) for m, c in p.items()})
    return _to_qq(p * conj, Q)


def _gaussian_cancel(num, den, names):
    """Cancel over QQ_I.  A common factor g satisfies g·ḡ | gcd_QQ(N(num), N(den)),
    so that rational gcd screens out the usual coprime case cheaply.  Otherwise
    each QQ-irreducible factor f of it is divided out directly, or split over
    QQ_I first when f = c·g·ḡ.  sympy's direct multivariate gcd over QQ_I can
    take minutes on small inputs."""
    Q = _qq_ring(names)
    h = _norm(num, Q).gcd(_norm(den, Q))
    if h.is_ground:
        return num, den
    R = num.ring
    for f_q, _ in h.factor_list()[1]:
        f = R.from_dict({m: QQ_I(c, 0) for m, c in f_q.items()})
        num, den, hit = _divide_out(num, den, f)
        if hit:
            continue
        _, parts = f.factor_list()
        if len(parts) > 1:
            for g, _ in parts:
                num, den, _ = _divide_out(num, den, g)
    return num, den


def _divide_out(num, den, f):
    hit = False
    while True:
        try:
            qn, qd = num.exquo(f), den.exquo(f)
        except ExactQuotientFailed:
            return num, den, hit
        num, den, hit = qn, qd, True


def _cancel(num, den, names):
    """Divide out gcd(num, den) and make the grlex-leading coefficient of den 1."""
    R = num.ring
    if len(den) == 1:
        (m, c), = den.items()
        if any(m):
            # monomial denominator: cancel the common monomial factor only
            low = list(m)
            for mm in num.keys():
                low = [min(a, b) for a, b in zip(low, mm)]
                if not any(low):
                    break
            if any(low):
                low = tuple(low)
                num = R.from_dict({tuple(a - b for a, b in zip(mm, low)): cc for mm, cc in num.items()})
                den = R.from_dict({tuple(a - b for a, b in zip(m, low)): c})
    elif _all_real(num) and _all_real(den):
        Q = _qq_ring(names)
        qn = Q.from_dict({m: c.x for m, c in num.items()})
        qd = Q.from_dict({m: c.x for m, c in den.items()})
        qn, qd = qn.cancel(qd)
        num = R.from_dict({m: QQ_I(c, 0) for m, c in qn.items()}) if qn else R.zero
        den = R.from_dict({m: QQ_I(c, 0) for m, c in qd.items()})
    else:
        num, den = _gaussian_cancel(num, den, names)
    lc = den.LC
    if lc != R.domain.one:
        inv = R.domain.one / lc
        num = num.mul_ground(inv)
        den = den.mul_ground(inv)
    return num, den


class Scalar:
    """Element of Q(i)(variables), kept in lowest terms."""

    __slots__ = ("_names", "_num", "_den", "_hash")

    def __init__(self, value: "int | Fraction | str | Scalar" = 0):
        if isinstance(value, Scalar):
            self._names, self._num, self._den = value._names, value._num, value._den
        elif isinstance(value, str):
            s = parse_scalar(value, None)
            self._names, self._num, self._den = s._names, s._num, s._den
        else:
            R = _ring(())
            f = Fraction(value)
            self._names = ()
            self._num = R.ground_new(QQ_I(QQ(f.numerator, f.denominator), 0)) if f else R.zero
            self._den = R.one
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, names, num, den) -> "Scalar":
        s = object.__new__(cls)
        s._names, s._num, s._den, s._hash = names, num, den, None
        return s

    @classmethod
    def _make(cls, names, num, den) -> "Scalar":
        if not den:
            raise DivisionByZeroError("zero denominator")
        R = num.ring
        if not num:
            return cls._raw(names, R.zero, R.one)
        if _is_one(den):
            return cls._raw(names, num, den)
        num, den = _cancel(num, den, names)
        return cls._raw(names, num, den)

    @classmethod
    def _from_poly(cls, p, names) -> "Scalar":
        return cls._raw(names, p, p.ring.one)

    @classmethod
    def var(cls, name: str) -> "Scalar":
        names = _sorted_names([name])
        return cls._from_poly(_ring(names).gens[0], names)

    @classmethod
    def gaussian(cls, re: "int | Fraction", im: "int | Fraction" = 0) -> "Scalar":
        re, im = Fraction(re), Fraction(im)
        R = _ring(())
        c = QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))
        return cls._from_poly(R.ground_new(c) if (re or im) else R.zero, ())

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return _small_int(x) if isinstance(x, int) else cls(x)
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        raise TypeError(f"cannot convert {type(x).__name__} to Scalar")

    # read-only views -------------------------------------------------------
    @property
    def num(self) -> MultiPoly:
        return MultiPoly._from_ring(self._num, self._names)

    @property
    def den(self) -> MultiPoly:
        return MultiPoly._from_ring(self._den, self._names)

    def numerator(self) -> "Scalar":
        return Scalar._from_poly(self._num, self._names)

    def denominator(self) -> "Scalar":
        return Scalar._from_poly(self._den, self._names)

    @property
    def variables(self) -> tuple[str, ...]:
        return self._names

    def free_vars(self) -> set[str]:
        used = set()
        for p in (self._num, self._den):
            for m in p.keys():
                used.update(n for n, k in zip(self._names, m) if k)
        return used

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return not self.free_vars()

    def is_polynomial(self) -> bool:
        return _is_one(self._den)

    def __bool__(self) -> bool:
        return bool(self._num)

    # arithmetic -------------------------------------------------------------
    def _unify(self, other: "Scalar"):
        if self._names == other._names:
            return self._names, self._num, self._den, other._num, other._den
        names = _sorted_names(self._names + other._names)
        R = _ring(names)
        return (
            names,
            _embed(self._num, self._names, names, R),
            _embed(self._den, self._names, names, R),
            _embed(other._num, other._names, names, R),
            _embed(other._den, other._names, names, R),
        )

    def __add__(self, other) -> "Scalar":
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._num:
            return self
        if not self._num:
            return other
        names, an, ad, bn, bd = self._unify(other)
        if ad == bd:
            return Scalar._make(names, an + bn, ad)
        return Scalar._make(names, an * bd + bn * ad, ad * bd)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(self._names, -self._num, self._den)

    def __sub__(self, other) -> "Scalar":
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not self._num or not other._num:
            return ZERO
        names, an, ad, bn, bd = self._unify(other)
        if _is_one(ad) and _is_one(bd):
            return Scalar._raw(names, an * bn, ad)
        return Scalar._make(names, an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._num:
            raise DivisionByZeroError("division by zero")
        return Scalar._make(self._names, self._den, self._num)

    def __truediv__(self, other) -> "Scalar":
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar._raw(self._names, self._num**k, self._den**k)

    def conjugate(self) -> "Scalar":
        """Complex conjugate of the coefficients (variables treated as real)."""
        R = self._num.ring

        def conj(p):
            return R.from_dict({m: QQ_I(c.x, -c.y) for m, c in p.items()}) if p else R.zero

        return Scalar._make(self._names, conj(self._num), conj(self._den))

    def diff(self, name: str) -> "Scalar":
        """Partial derivative with respect to a variable."""
        if name not in self._names:
            return ZERO
        k = self._names.index(name)
        g = self._num.ring.gens[k]
        n, d = self._num, self._den
        if _is_one(d):
            return Scalar._raw(self._names, n.diff(g), d)
        return Scalar._make(self._names, n.diff(g) * d - n * d.diff(g), d * d)

    # comparison -------------------------------------------------------------
    def __eq__(self, other) -> bool:
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self._names == other._names:
            return self._num == other._num and self._den == other._den
        _, an, ad, bn, bd = self._unify(other)
        return an == bn and ad == bd

    def __hash__(self) -> int:
        if self._hash is None:
            def key(p):
                return frozenset(
                    (tuple((n, k) for n, k in zip(self._names, m) if k), (c.x, c.y)) for m, c in p.items()
                )
            self._hash = hash((key(self._num), key(self._den)))
        return self._hash

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Scalar({render(self)!r})"


_INTS: dict[int, Scalar] = {}


def _small_int(k: int) -> Scalar:
    s = _INTS.get(k)
    if s is None:
        s = Scalar(k)
        if -64 <= k <= 64:
            _INTS[k] = s
    return s


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar.gaussian(0, 1)


def S(x) -> Scalar:
    """Shorthand constructor: ints, Fractions, or expression strings."""
    if isinstance(x, str):
        return parse_scalar(x, None)
    return Scalar.coerce(x)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def normalize(s: Scalar) -> Scalar:
    """Re-reduce a Scalar; the identity on values already in normal form."""
    return Scalar._make(s._names, s._num, s._den)


# ---------------------------------------------------------------------------
# substitution


def substitute(s: Scalar, bindings: Mapping[str, "Scalar | int | Fraction | str"]) -> Scalar:
    vals = {k: (parse_scalar(v, None) if isinstance(v, str) else Scalar.coerce(v)) for k, v in bindings.items()}
    if not any(n in vals for n in s._names):
        return s
    keep = tuple(n for n in s._names if n not in vals)
    R = _ring(keep)
    cache: dict[tuple[str, int], Scalar] = {}

    def power(name: str, k: int) -> Scalar:
        key = (name, k)
        if key not in cache:
            cache[key] = vals[name] ** k
        return cache[key]

    def evaluate(p) -> Scalar:
        groups: dict[tuple, dict] = {}
        for m, c in p.items():
            sub = tuple((n, k) for n, k in zip(s._names, m) if k and n in vals)
            rest = tuple(k for n, k in zip(s._names, m) if n not in vals)
            groups.setdefault(sub, {})[rest] = c
        total = ZERO
        for sub, d in groups.items():
            term = Scalar._from_poly(R.from_dict(d), keep)
            for name, k in sub:
                term = term * power(name, k)
            total = total + term
        return total

    num = evaluate(s._num)
    den = evaluate(s._den)
    if den.is_zero():
        raise SubstitutionError("denominator vanishes under substitution")
    return num / den


# ---------------------------------------------------------------------------
# rendering


def _render_rational(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _render_coeff(re_: Fraction, im: Fraction) -> str:
    if not im:
        return _render_rational(re_)
    if not re_:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_render_rational(im)}*i"
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    imag = "i" if mag == 1 else f"{_render_rational(mag)}*i"
    return f"({_render_rational(re_)} {sign} {imag})"


def _render_poly(p, names: tuple[str, ...]) -> str:
    if not p:
        return "0"
    out = []
    for m, c in p.terms():  # grlex-descending
        re_, im = _to_fraction(c.x), _to_fraction(c.y)
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, m) if k)
        neg = False
        if not im and re_ < 0:
            neg, re_ = True, -re_
        elif not re_ and im < 0:
            neg, im = True, -im
        coeff = _render_coeff(re_, im)
        if mono:
            body = mono if coeff == "1" else f"{coeff}*{mono}"
        else:
            body = coeff
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _needs_parens(p) -> bool:
    if len(p) > 1:
        return True
    (m, c), = p.items()
    return bool(c.x and c.y)


def render(s: Scalar) -> str:
    num = _render_poly(s._num, s._names)
    if _is_one(s._den):
        return num
    den = _render_poly(s._den, s._names)
    if _needs_parens(s._num) or "/" in num:
        num = f"({num})"
    if len(s._den) > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.)")


class _Parser:
    def __init__(self, text: str, variables: "Iterable[str] | None"):
        self.text = text
        self.allowed = None if variables is None else set(variables)
        if variables is not None:
            register_variables(variables)
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            start = m.start(m.lastindex)
            if m.group(1):
                self.toks.append(("int", m.group(1), start))
            elif m.group(2):
                self.toks.append(("id", m.group(2), start))
            else:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise ParseError(f"unexpected character {ch!r}", self._off(start))
                self.toks.append((ch, ch, start))
            pos = m.end()
        self.toks.append(("end", "", len(text)))
        self.i = 0

    def _off(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str | None = None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", self._off(tok[2]))
        self.i += 1
        return tok

    def parse(self) -> Scalar:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self._off(0))
        v = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self._off(tok[2]))
        return v

    def expr(self) -> Scalar:
        v = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> Scalar:
        v = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", self._off(pos))
                v = v / rhs
        return v

    def unary(self) -> Scalar:
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Scalar:
        kind = self.peek()[0]
        v = self.atom()
        while self.peek()[0] == "^":
            _, _, pos = self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            k = int(self.take("int")[1])
            if neg:
                if kind not in ("id", "("):
                    raise ParseError("negative exponent needs an identifier or parenthesized base", self._off(pos))
                if v.is_zero():
                    raise ParseError("negative power of zero", self._off(pos))
                v = v ** (-k)
            else:
                v = v**k
            kind = "("
        return v

    def atom(self) -> Scalar:
        kind, text, pos = self.peek()
        if kind == "int":
            self.take()
            return Scalar(int(text))
        if kind == "id":
            self.take()
            if text == "i":
                return I
            if self.allowed is not None and text not in self.allowed:
                raise UnknownIdentifierError(f"unknown identifier {text!r}", self._off(pos))
            return Scalar.var(text)
        if kind == "(":
            self.take()
            v = self.expr()
            self.take(")")
            return v
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", self._off(pos))


def parse_scalar(text: str, variables: "Iterable[str] | None" = None) -> Scalar:
    """Parse an expression.

    ``variables`` lists the identifiers that may appear; ``None`` accepts any
    identifier (used by the shorthand :func:`S`).
    """
    return _Parser(text, variables).parse()
