"""Exact multivariate polynomial arithmetic over the rationals.

Everything downstream computes in the fixed polynomial ring

    Q[d, l, m, g, b]

where ``d`` is the module generator (partial), ``l``, ``m``, ``g`` are the
three spectral variables (lambda, mu, gamma) and ``b`` is the structure
parameter of the two-family loop algebras.  The variable set is closed: no
identity in scope needs anything else, and the fixed arity keeps a monomial
a plain 5-tuple of exponents.

A ``Poly`` maps monomials to nonzero ``Fraction`` coefficients; the zero
polynomial is the empty map.  Coefficients are exact rationals, never
floats, so equality is exact and "residual == 0" is a decidable check.
Values are immutable after construction and every operation is a pure
function; they may be shared freely between threads.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union

# Exact rational scalar used throughout the package.
Rational = Fraction

Scalar = Union[int, Fraction]


class Var(Enum):
    """The five formal variables, in canonical order d > l > m > g > b."""

    D = "d"
    L = "l"
    M = "m"
    G = "g"
    B = "b"

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def slot(self) -> int:
        """Position of this variable in a monomial exponent tuple."""
        return _SLOTS[self]


_SLOTS = {Var.D: 0, Var.L: 1, Var.M: 2, Var.G: 3, Var.B: 4}

VARS = (Var.D, Var.L, Var.M, Var.G, Var.B)

# Variables allowed to carry a bracket's spectral parameter.
SPECTRAL_VARS = (Var.L, Var.M, Var.G)

# A monomial is a 5-tuple of non-negative exponents, one slot per Var.
Monomial = tuple

UNIT_MONOMIAL: Monomial = (0, 0, 0, 0, 0)

_ZERO_FRACTION = Fraction(0)


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise TypeError(f"expected an int or Fraction, got {type(value).__name__}")


class Poly:
    """Immutable sparse polynomial in Q[d, l, m, g, b].

    ``terms`` maps exponent 5-tuples to nonzero Fraction coefficients.
    Construction drops zero coefficients, so two equal polynomials always
    have identical term maps (canonical form).
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                if len(mono) != 5 or any(e < 0 for e in mono):
                    raise ValueError(f"bad monomial {mono!r}")
                c = _as_fraction(coeff)
                if c:
                    clean[tuple(mono)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "Poly":
        # Internal constructor: terms must already be canonical.
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls) -> "Poly":
        return ZERO

    @classmethod
    def one(cls) -> "Poly":
        return ONE

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        c = _as_fraction(value)
        return cls._raw({UNIT_MONOMIAL: c}) if c else ZERO

    @classmethod
    def variable(cls, var: Var) -> "Poly":
        return _VAR_POLYS[var]

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Scalar = 1) -> "Poly":
        return cls({tuple(mono): coeff})

    # -- queries ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(tuple(mono), _ZERO_FRACTION)

    def constant_value(self) -> Fraction:
        """The coefficient of the unit monomial."""
        return self.terms.get(UNIT_MONOMIAL, _ZERO_FRACTION)

    def variables(self) -> tuple[Var, ...]:
        """Variables that actually occur, in slot order."""
        used = [False] * 5
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used[i] = True
        return tuple(v for v in VARS if used[v.slot])

    def total_degree(self) -> int:
        return max((sum(mono) for mono in self.terms), default=0)

    def degree_in(self, var: Var) -> int:
        slot = var.slot
        return max((mono[slot] for mono in self.terms), default=0)

    # -- ring operations -------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(other)
        return None

    def __add__(self, other) -> "Poly":
        other = Poly._coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = c
            else:
                s = s + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        other = Poly._coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = -c
            else:
                s = s - c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Poly._raw(out)

    def __rsub__(self, other) -> "Poly":
        return as_poly(other) - self

    def __neg__(self) -> "Poly":
        return Poly._raw({mono: -c for mono, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            a, b = self.terms, other.terms
            if not a or not b:
                return ZERO
            out: dict[Monomial, Fraction] = {}
            for m1, c1 in a.items():
                for m2, c2 in b.items():
                    mono = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2],
                            m1[3] + m2[3], m1[4] + m2[4])
                    s = out.get(mono)
                    out[mono] = c1 * c2 if s is None else s + c1 * c2
            return Poly._raw({m: c for m, c in out.items() if c})
        if not isinstance(other, (int, Fraction)) or isinstance(other, bool):
            return NotImplemented
        c = Fraction(other)
        if not c:
            return ZERO
        return Poly._raw({mono: coeff * c for mono, coeff in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ONE
        for _ in range(exponent):
            result = result * self
        return result

    # -- substitution and coefficient extraction --------------------------

    def subst(self, assignments: Mapping[Var, "Poly | Scalar"]) -> "Poly":
        """Simultaneously replace variables by polynomials.

        Variables absent from ``assignments`` are left alone.  This is a
        ring homomorphism: subst distributes over + and *.
        """
        if not assignments or not self.terms:
            return self
        amap = {var.slot: as_poly(value) for var, value in assignments.items()}
        if not any(mono[slot] for mono in self.terms for slot in amap):
            return self
        total = ZERO
        powers: dict[tuple[int, int], Poly] = {}
        for mono, coeff in self.terms.items():
            base = list(mono)
            factors = []
            for slot, replacement in amap.items():
                e = mono[slot]
                if e:
                    base[slot] = 0
                    key = (slot, e)
                    f = powers.get(key)
                    if f is None:
                        f = replacement ** e
                        powers[key] = f
                    factors.append(f)
            term = Poly._raw({tuple(base): coeff})
            for f in factors:
                term = term * f
            total = total + term
        return total

    def coefficients(self, split_vars: Iterable[Var]) -> dict[Monomial, "Poly"]:
        """Group terms by their monomial in ``split_vars``.

        Keys are monomials supported only on ``split_vars``; values are
        polynomials in the remaining variables.  Summing key * value over
        the map reconstructs the polynomial exactly.
        """
        slots = {v.slot for v in split_vars}
        if not slots:
            raise ValueError("split_vars must be nonempty")
        groups: dict[Monomial, dict[Monomial, Fraction]] = {}
        for mono, coeff in self.terms.items():
            key = tuple(e if i in slots else 0 for i, e in enumerate(mono))
            rest = tuple(0 if i in slots else e for i, e in enumerate(mono))
            groups.setdefault(key, {})[rest] = coeff
        return {key: Poly._raw(rest) for key, rest in groups.items()}

    # -- comparison and printing ------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self) -> str:
        """Canonical form: graded lexicographic order, d > l > m > g > b.

        The output conforms to the parse_poly grammar, and
        parse_poly(str(p)) == p.
        """
        if not self.terms:
            return "0"
        monos = sorted(self.terms, key=lambda mo: (sum(mo), mo), reverse=True)
        parts = []
        for mono in monos:
            coeff = self.terms[mono]
            magnitude = -coeff if coeff < 0 else coeff
            factors = []
            if magnitude != 1 or not any(mono):
                factors.append(str(magnitude))
            for var in VARS:
                factors.extend([var.symbol] * mono[var.slot])
            text = "*".join(factors)
            if not parts:
                parts.append(text if coeff > 0 else "-" + text)
            else:
                parts.append(("+ " if coeff > 0 else "- ") + text)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self})"


def as_poly(value) -> Poly:
    """Coerce an int or Fraction to a constant polynomial."""
    if isinstance(value, Poly):
        return value
    return Poly.const(_as_fraction(value))


ZERO = Poly._raw({})
ONE = Poly._raw({UNIT_MONOMIAL: Fraction(1)})

_VAR_POLYS = {
    var: Poly._raw({tuple(1 if i == var.slot else 0 for i in range(5)): Fraction(1)})
    for var in VARS
}

# Convenience instances for building expressions in code: D + 2 * L etc.
D = _VAR_POLYS[Var.D]
L = _VAR_POLYS[Var.L]
M = _VAR_POLYS[Var.M]
G = _VAR_POLYS[Var.G]
B = _VAR_POLYS[Var.B]


# ---------------------------------------------------------------------------
# Expression parsing
# ---------------------------------------------------------------------------

class ParseError(ValueError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_DIGITS = "0123456789"
_VAR_BY_SYMBOL = {v.value: v for v in VARS}


def parse_poly(text: str) -> Poly:
    """Parse the expression grammar used by every file format here.

        expr     := term (("+"|"-") term)*
        term     := factor ("*" factor)*
        factor   := rational | var | "(" expr ")" | "-" factor
        rational := integer ("/" positive-integer)?
        var      := "d" | "l" | "m" | "g" | "b"

    Whitespace is insignificant.  A "/" anywhere but inside a rational
    constant is rejected, as is any identifier other than the five
    variables.  str() on the result emits this same grammar.
    """
    parser = _Parser(text)
    value = parser.parse_expr()
    if parser.peek():
        raise ParseError(f"unexpected character {parser.peek()!r}", parser.pos)
    return value


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        text, n = self.text, len(self.text)
        pos = self.pos
        while pos < n and text[pos].isspace():
            pos += 1
        self.pos = pos
        return text[pos] if pos < n else ""

    def parse_expr(self) -> Poly:
        value = self.parse_term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                value = value + self.parse_term()
            elif ch == "-":
                self.pos += 1
                value = value - self.parse_term()
            else:
                return value

    def parse_term(self) -> Poly:
        value = self.parse_factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                value = value * self.parse_factor()
            elif ch == "/":
                raise ParseError(
                    "division is only allowed inside a rational constant", self.pos)
            else:
                return value

    def parse_factor(self) -> Poly:
        ch = self.peek()
        if not ch:
            raise ParseError("unexpected end of input", self.pos)
        if ch == "-":
            self.pos += 1
            return -self.parse_factor()
        if ch == "(":
            self.pos += 1
            value = self.parse_expr()
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return value
        if ch in _DIGITS:
            return self.parse_rational()
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalpha():
                self.pos += 1
            name = self.text[start:self.pos]
            var = _VAR_BY_SYMBOL.get(name)
            if var is None:
                raise ParseError(f"unknown identifier {name!r}", start)
            return Poly.variable(var)
        raise ParseError(f"unexpected character {ch!r}", self.pos)

    def parse_rational(self) -> Poly:
        numerator = self.parse_integer()
        if self.peek() == "/":
            self.pos += 1
            denom_pos = self.pos
            if self.peek() not in _DIGITS:
                raise ParseError("expected a positive integer denominator", self.pos)
            denominator = self.parse_integer()
            if denominator == 0:
                raise ParseError("denominator must be positive", denom_pos)
            return Poly.const(Fraction(numerator, denominator))
        return Poly.const(numerator)

    def parse_integer(self) -> int:
        text, n = self.text, len(self.text)
        start = self.pos
        pos = start
        while pos < n and text[pos] in _DIGITS:
            pos += 1
        self.pos = pos
        return int(text[start:pos])
