"""Exact supercommutative Laurent-Grassmann algebra.

Elements live in Q[z1^{+-1},...,zp^{+-1}] (x) Lambda[t1,...,tq]: finite sums of
terms  c * z^e * t_S  with c an exact Fraction, e an integer exponent vector
(negative exponents allowed) and S a strictly increasing subset of the odd
variables.  Multiplication uses the Koszul sign rule t_i t_j = -t_j t_i, and
every element is kept in canonical form: a dict mapping (exponents, odd-mask)
to a nonzero Fraction.  With q odd variables the ideal J generated by them
satisfies J^{q+1} = 0, which makes every computation here finite and exact.

No floats are used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class SuperError(ValueError):
    """Base class for algebra errors."""


class TableMismatch(SuperError):
    """Operands belong to different variable tables."""


class NotAUnit(SuperError):
    """invert_unit was applied to an element whose body is not a single term."""


class ParseError(SuperError):
    """Malformed expression text."""


@dataclass(frozen=True)
class VarTable:
    """Ordered even and odd variable names of one coordinate system.

    The order is significant: it fixes exponent-vector positions, the odd-mask
    bit positions, and later the row/column order of Jacobians.
    """

    even: tuple[str, ...]
    odd: tuple[str, ...]

    def __post_init__(self):
        names = list(self.even) + list(self.odd)
        if len(set(names)) != len(names):
            raise SuperError(f"duplicate variable names in table: {names}")

    def even_index(self, name: str) -> int:
        return self.even.index(name)

    def odd_index(self, name: str) -> int:
        return self.odd.index(name)

    @property
    def names(self) -> tuple[str, ...]:
        return self.even + self.odd


Key = tuple[tuple[int, ...], int]  # (even exponents, odd bitmask)


def _mask_sign(s: int, t: int) -> int:
    """Koszul sign for merging sorted odd blocks t_s * t_t (disjoint masks).

    Counts inversions: each generator of t moves left past the generators of s
    that have a larger index.
    """
    sign = 1
    m = t
    while m:
        low = m & -m
        i = low.bit_length() - 1
        if (s >> (i + 1)).bit_count() & 1:
            sign = -sign
        m ^= low
    return sign


def _mask_names(mask: int, table: VarTable) -> list[str]:
    return [table.odd[i] for i in range(len(table.odd)) if mask >> i & 1]


class SuperElem:
    """A canonical-form element of the Laurent-Grassmann algebra."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[Key, Fraction] | None = None):
        self.table = table
        self.terms: dict[Key, Fraction] = {}
        if terms:
            for key, c in terms.items():
                if c:
                    self.terms[key] = Fraction(c)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable) -> "SuperElem":
        return cls(table)

    @classmethod
    def const(cls, table: VarTable, c) -> "SuperElem":
        c = Fraction(c)
        if not c:
            return cls(table)
        return cls(table, {((0,) * len(table.even), 0): c})

    @classmethod
    def one(cls, table: VarTable) -> "SuperElem":
        return cls.const(table, 1)

    @classmethod
    def var(cls, table: VarTable, name: str) -> "SuperElem":
        if name in table.even:
            e = [0] * len(table.even)
            e[table.even_index(name)] = 1
            return cls(table, {(tuple(e), 0): Fraction(1)})
        if name in table.odd:
            return cls(table, {((0,) * len(table.even), 1 << table.odd_index(name)): Fraction(1)})
        raise SuperError(f"unknown variable {name!r} for table {table.names}")

    # -- inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_even(self) -> bool:
        return all((mask.bit_count() & 1) == 0 for _, mask in self.terms)

    def is_odd(self) -> bool:
        return all((mask.bit_count() & 1) == 1 for _, mask in self.terms)

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) and mask == 0 for exps, mask in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise SuperError(f"not a constant: {format_elem(self)}")
        return next(iter(self.terms.values()))

    def body(self) -> "SuperElem":
        """The J-degree-0 part (no odd factors)."""
        return SuperElem(self.table, {k: c for k, c in self.terms.items() if k[1] == 0})

    def j_degrees(self) -> set[int]:
        return {mask.bit_count() for _, mask in self.terms}

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "SuperElem") -> None:
        if self.table != other.table:
            raise TableMismatch(f"{self.table.names} vs {other.table.names}")

    def __add__(self, other):
        other = _coerce(self.table, other)
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return SuperElem(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return SuperElem(self.table, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(self.table, other))

    def __rsub__(self, other):
        return _coerce(self.table, other) + (-self)

    def __mul__(self, other):
        other = _coerce(self.table, other)
        self._check(other)
        terms: dict[Key, Fraction] = {}
        for (e1, m1), c1 in self.terms.items():
            for (e2, m2), c2 in other.terms.items():
                if m1 & m2:
                    continue  # repeated odd variable squares to zero
                sign = _mask_sign(m1, m2)
                key = (tuple(a + b for a, b in zip(e1, e2)), m1 | m2)
                s = terms.get(key, Fraction(0)) + sign * c1 * c2
                if s:
                    terms[key] = s
                else:
                    terms.pop(key, None)
        return SuperElem(self.table, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(self.table, other)
        return self * invert_unit(other)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise SuperError("exponents must be integers")
        base = self
        if n < 0:
            base, n = invert_unit(self), -n
        out = SuperElem.one(self.table)
        for _ in range(n):
            out = out * base
        return out

    def __eq__(self, other):
        if not isinstance(other, SuperElem):
            if isinstance(other, (int, Fraction)):
                other = SuperElem.const(self.table, other)
            else:
                return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"SuperElem({format_elem(self)!r})"

    def __str__(self):
        return format_elem(self)


def _coerce(table: VarTable, x) -> SuperElem:
    if isinstance(x, SuperElem):
        return x
    if isinstance(x, (int, Fraction)):
        return SuperElem.const(table, x)
    raise SuperError(f"cannot interpret {x!r} as an algebra element")


# -- free-function API ---------------------------------------------------


def add(a: SuperElem, b: SuperElem) -> SuperElem:
    return a + b


def mul(a: SuperElem, b: SuperElem) -> SuperElem:
    return a * b


def invert_unit(a: SuperElem) -> SuperElem:
    """Exact inverse of a unit.

    Requires the body (J-degree-0 part) to be a single nonzero Laurent term u.
    Then a = u + n with n nilpotent, and
        a^{-1} = u^{-1} * sum_j (-n u^{-1})^j,
    a finite sum because J^{q+1} = 0.
    """
    a = a if isinstance(a, SuperElem) else a
    body = [(k, c) for k, c in a.terms.items() if k[1] == 0]
    if len(body) != 1:
        raise NotAUnit(f"body is not a single Laurent term: {format_elem(a)}")
    (exps, _), c = body[0]
    u_inv = SuperElem(a.table, {(tuple(-e for e in exps), 0): 1 / Fraction(c)})
    n = a - SuperElem(a.table, {(exps, 0): c})
    out = SuperElem.one(a.table)
    m = n * u_inv
    power = SuperElem.one(a.table)
    for _ in range(len(a.table.odd)):
        power = power * (-m)
        if power.is_zero():
            break
        out = out + power
    return u_inv * out


def substitute(a: SuperElem, images: Mapping[str, SuperElem]) -> SuperElem:
    """Apply the algebra homomorphism sending each variable to its image.

    Every variable that occurs in `a` must have an image; all images must live
    over one common table, even variables must get even images (with unit body
    whenever a negative power has to be resolved) and odd variables odd images.
    Products of odd images are taken in the source order, so Koszul signs come
    out of the multiplication itself.
    """
    if not images:
        raise SuperError("empty substitution")
    target = next(iter(images.values())).table
    for name, img in images.items():
        if img.table != target:
            raise TableMismatch(f"image of {name!r} lives over a different table")
        if name in a.table.even:
            if not img.is_even():
                raise SuperError(f"even variable {name!r} mapped to non-even element")
        elif name in a.table.odd:
            if not img.is_odd():
                raise SuperError(f"odd variable {name!r} mapped to non-odd element")
        else:
            raise SuperError(f"image given for {name!r}, not a variable of the source table")

    pow_cache: dict[tuple[str, int], SuperElem] = {}

    def image_power(name: str, e: int) -> SuperElem:
        got = pow_cache.get((name, e))
        if got is None:
            img = images[name]
            if e < 0:
                try:
                    got = invert_unit(img) ** (-e)
                except NotAUnit as exc:
                    raise SuperError(
                        f"negative power of {name!r} needs a unit-body image"
                    ) from exc
            else:
                got = img ** e
            pow_cache[(name, e)] = got
        return got

    out = SuperElem.zero(target)
    for (exps, mask), c in a.terms.items():
        term = SuperElem.const(target, c)
        for i, e in enumerate(exps):
            if e == 0:
                continue
            name = a.table.even[i]
            if name not in images:
                raise SuperError(f"no image for variable {name!r}")
            term = term * image_power(name, e)
            if term.is_zero():
                break
        if term.is_zero():
            continue
        for name in _mask_names(mask, a.table):
            if name not in images:
                raise SuperError(f"no image for variable {name!r}")
            term = term * images[name]
            if term.is_zero():
                break
        out = out + term
    return out


def deriv_even(a: SuperElem, name: str) -> SuperElem:
    """d/dz for an even variable (odd factors are inert constants)."""
    i = a.table.even_index(name)
    terms: dict[Key, Fraction] = {}
    for (exps, mask), c in a.terms.items():
        e = exps[i]
        if e == 0:
            continue
        new = list(exps)
        new[i] = e - 1
        key = (tuple(new), mask)
        terms[key] = terms.get(key, Fraction(0)) + c * e
    return SuperElem(a.table, {k: c for k, c in terms.items() if c})


def deriv_odd_left(a: SuperElem, name: str) -> SuperElem:
    """Left derivative d/dt: strip t from the front, paying a sign per hop.

    For t at position p of the increasing product t_S the sign is (-1)^p, so
    the leading factor differentiates with sign +1.
    """
    i = a.table.odd_index(name)
    bit = 1 << i
    terms: dict[Key, Fraction] = {}
    for (exps, mask), c in a.terms.items():
        if not mask & bit:
            continue
        sign = -1 if ((mask & (bit - 1)).bit_count() & 1) else 1
        key = (exps, mask ^ bit)
        terms[key] = terms.get(key, Fraction(0)) + sign * c
    return SuperElem(a.table, {k: c for k, c in terms.items() if c})


def truncate_J(a: SuperElem, k: int) -> SuperElem:
    """Drop every term with J-degree (number of odd factors) >= k."""
    return SuperElem(a.table, {key: c for key, c in a.terms.items() if key[1].bit_count() < k})


# -- parsing and formatting --------------------------------------------------
#
# expr   := term (('+'|'-') term)*
# term   := factor (('*'|'/') factor)*
# factor := INT | IDENT ('^' signed-int)? | '(' expr ')' | '-' factor
#
# The unary minus is an extension so that formatted output (which may lead
# with a negative coefficient) always re-parses; parse(format(x)) == x.

_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, table: VarTable, bindings: Mapping[str, Fraction]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.table = table
        self.bindings = bindings

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[1]!r} at position {tok[2]}")
        return tok

    def parse_expr(self) -> SuperElem:
        out = self.parse_term()
        while self.peek()[0] in "+-":
            op = self.next()[0]
            rhs = self.parse_term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def parse_term(self) -> SuperElem:
        out = self.parse_factor()
        while self.peek()[0] in "*/":
            op = self.next()[0]
            rhs = self.parse_factor()
            if op == "*":
                out = out * rhs
            else:
                try:
                    out = out / rhs
                except NotAUnit as exc:
                    raise ParseError(f"division by a non-unit: {exc}") from exc
        return out

    def parse_factor(self) -> SuperElem:
        kind, value, pos = self.peek()
        if kind == "-":
            self.next()
            return -self.parse_factor()
        if kind == "int":
            self.next()
            return SuperElem.const(self.table, int(value))
        if kind == "(":
            self.next()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if kind == "ident":
            self.next()
            if value in self.table.even or value in self.table.odd:
                base = SuperElem.var(self.table, value)
            elif value in self.bindings:
                base = SuperElem.const(self.table, self.bindings[value])
            else:
                raise ParseError(f"unknown identifier {value!r} at position {pos}")
            if self.peek()[0] == "^":
                self.next()
                sign = 1
                if self.peek()[0] == "-":
                    self.next()
                    sign = -1
                tok = self.expect("int")
                exp = sign * int(tok[1])
                try:
                    base = base ** exp
                except NotAUnit as exc:
                    raise ParseError(f"negative power of non-unit at position {pos}") from exc
            return base
        raise ParseError(f"unexpected token {value!r} at position {pos}")


def parse(text: str, table: VarTable, bindings: Mapping[str, Fraction] | None = None) -> SuperElem:
    """Parse expression text over the given variable table.

    `bindings` may supply rational constants for extra identifiers (used for
    the deformation parameter in atlas construction).
    """
    parser = _Parser(text, table, dict(bindings or {}))
    out = parser.parse_expr()
    parser.expect("end")
    return out


def _format_coeff(c: Fraction) -> str:
    return str(c)  # "p" or "p/q", exact


def format_elem(a: SuperElem) -> str:
    """Deterministic canonical text; parse(format(a)) == a."""
    if not a.terms:
        return "0"
    pieces = []
    for (exps, mask), c in sorted(a.terms.items()):
        factors = []
        for name, e in zip(a.table.even, exps):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{e}")
        factors.extend(_mask_names(mask, a.table))
        mag = abs(c)
        if not factors or mag != 1:
            factors.insert(0, _format_coeff(mag))
        body = "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
