"""Conformal bilinear maps on a bracket-table algebra, and the residuals
of the four biderivation identities.

A bilinear map phi is a table of Element values on generator pairs
(absent pair = zero), with coefficients in d, l, b only.  It is evaluated
on general elements by the same slot rules as the bracket: coefficient
p(d) on the left enters as p(-s), q(d) on the right as q(d+s), and the
table value's l is renamed to the requested spectral parameter.

Each identity is checked as a left-minus-right residual that must vanish
identically:

  def1a   phi_l(x,y) + phi_{-d-l}(y,x)                          (skew)
  def1b   phi_l(x,[y_m z]) - [(phi_l(x,y))_{l+m} z] - [y_m phi_l(x,z)]
  lem1    phi_{l+m}([x_m y],z) - [x_m phi_l(y,z)] + [y_l phi_m(x,z)]
  lem2    [(phi_m(x,y))_{m+g} [u_l v]] - [[x_m y]_{m+g} phi_l(u,v)]

def1b and lem1 are equivalent forms of the Leibniz rule for maps that
satisfy def1a; lem2 is a consequence of def1a + def1b.  Both facts are
exercised by the test suite rather than assumed.

Residuals are linear in the map, which is what the classification solver
builds on.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .algebra import (
    Algebra,
    AlgebraError,
    Element,
    GeneratorId,
    _spectral_poly,
    bracket,
    parse_generator,
    second_slot_subst,
)
from .poly import ParseError, Poly, Scalar, Var, parse_poly

TAGS = ("def1a", "def1b", "lem1", "lem2")

TAG_ARITY = {"def1a": 2, "def1b": 3, "lem1": 3, "lem2": 4}

_TABLE_VARS = frozenset({Var.D, Var.L, Var.B})


class MapError(ValueError):
    """Invalid bilinear map table or map file."""


class FamilyError(ValueError):
    """Invalid closed-form family request."""


def normalize_tags(tags: Iterable[str]) -> tuple[str, ...]:
    """Validate identity tags and return them in canonical order."""
    tags = set(tags)
    bad = tags - set(TAGS)
    if bad:
        raise MapError(f"unknown identity tag(s): {', '.join(sorted(bad))}")
    if not tags:
        raise MapError("at least one identity tag is required")
    return tuple(t for t in TAGS if t in tags)


GenPair = tuple[GeneratorId, GeneratorId]


class BilinearMap:
    """Table of Element values phi(e_i, e_j) on generator pairs.

    Coefficients are restricted to d, l, b; spectral variables other than
    l never appear in a table (they only arise inside residuals).
    """

    __slots__ = ("algebra", "table")

    def __init__(self, algebra: Algebra, table: Mapping[GenPair, Element]):
        clean: dict[GenPair, Element] = {}
        for (gi, gj), value in table.items():
            gi = algebra.gen(gi.family, gi.index)
            gj = algebra.gen(gj.family, gj.index)
            if value.algebra is not algebra and value.algebra != algebra:
                raise MapError("table value over a different algebra")
            for coeff in value.terms.values():
                if any(v not in _TABLE_VARS for v in coeff.variables()):
                    raise MapError(f"entry ({gi},{gj}): coefficients may use only d, l, b")
            if not value.is_zero:
                clean[(gi, gj)] = value
        self.algebra = algebra
        self.table = clean

    @classmethod
    def zero(cls, algebra: Algebra) -> "BilinearMap":
        return cls(algebra, {})

    def entry(self, gi: GeneratorId, gj: GeneratorId) -> Element:
        return self.table.get((gi, gj), self.algebra.zero_element())

    @property
    def is_zero(self) -> bool:
        return not self.table

    def pairs(self) -> list[GenPair]:
        key = self.algebra.gen_sort_key
        return sorted(self.table, key=lambda p: (key(p[0]), key(p[1])))

    def __add__(self, other: "BilinearMap") -> "BilinearMap":
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise MapError("mismatched algebras")
        out = dict(self.table)
        for pair, value in other.table.items():
            prev = out.get(pair)
            total = value if prev is None else prev + value
            if total.is_zero:
                out.pop(pair, None)
            else:
                out[pair] = total
        return BilinearMap(self.algebra, out)

    def __mul__(self, factor: Scalar) -> "BilinearMap":
        c = Fraction(factor)
        if not c:
            return BilinearMap(self.algebra, {})
        return BilinearMap(self.algebra,
                           {pair: value * c for pair, value in self.table.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "BilinearMap":
        return self * -1

    def __sub__(self, other: "BilinearMap") -> "BilinearMap":
        return self + (-1 * other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return (self.algebra is other.algebra or self.algebra == other.algebra) \
            and self.table == other.table

    def __repr__(self) -> str:
        entries = "; ".join(f"({gi},{gj}) -> {self.table[(gi, gj)]}"
                            for gi, gj in self.pairs())
        return f"BilinearMap({entries or '0'})"


def map_eval(phi: BilinearMap, x: Element, y: Element,
             spectral: Union[Var, Poly] = Var.L) -> Element:
    """Evaluate phi_s(x, y) by the conformal bilinear slot rules.

    For x = p(d) e_i and y = q(d) e_j the result is
    p(-s) * q(d+s) * phi(e_i, e_j) with the table value's l renamed to s,
    extended bilinearly.  As with the bracket, s may be a polynomial in
    the spectral variables.
    """
    alg = phi.algebra
    if (x.algebra is not alg and x.algebra != alg) or \
       (y.algebra is not alg and y.algebra != alg):
        raise MapError("mismatched algebras")
    s = _spectral_poly(spectral)
    d_plus_s = Poly.variable(Var.D) + s
    neg_s = -s
    acc: dict[GeneratorId, Poly] = {}
    for gi, p in x.terms.items():
        pw = p.subst({Var.D: neg_s})
        if pw.is_zero:
            continue
        for gj, q in y.terms.items():
            value = phi.table.get((gi, gj))
            if value is None:
                continue
            factor = pw * q.subst({Var.D: d_plus_s})
            if factor.is_zero:
                continue
            for gt, c in value.terms.items():
                coeff = factor * c.subst({Var.L: s})
                if coeff.is_zero:
                    continue
                prev = acc.get(gt)
                acc[gt] = coeff if prev is None else prev + coeff
    return Element._raw(alg, {g: c for g, c in acc.items() if not c.is_zero})


# ---------------------------------------------------------------------------
# Identity residuals
# ---------------------------------------------------------------------------

@dataclass
class Residual:
    """Left minus right of one identity at one generator tuple."""

    tag: str
    args: tuple[GeneratorId, ...]
    value: Element

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero

    def __str__(self) -> str:
        args = ", ".join(str(g) for g in self.args)
        return f"{self.tag} ({args}): {self.value}"


def residual(phi: BilinearMap, tag: str, args: Sequence[GeneratorId]) -> Residual:
    """Compute the residual of one identity at one generator tuple."""
    if tag not in TAGS:
        raise MapError(f"unknown identity tag {tag!r}")
    if len(args) != TAG_ARITY[tag]:
        raise MapError(f"{tag} takes {TAG_ARITY[tag]} generators, got {len(args)}")
    alg = phi.algebra
    e = [alg.gen_element(g) for g in args]
    lam, mu, gam = Var.L, Var.M, Var.G

    if tag == "def1a":
        x, y = e
        value = map_eval(phi, x, y, lam) \
            + second_slot_subst(map_eval(phi, y, x, lam), lam)
    elif tag == "def1b":
        x, y, z = e
        lam_plus_mu = Poly.variable(lam) + Poly.variable(mu)
        value = map_eval(phi, x, bracket(y, z, mu), lam) \
            - bracket(map_eval(phi, x, y, lam), z, lam_plus_mu) \
            - bracket(y, map_eval(phi, x, z, lam), mu)
    elif tag == "lem1":
        x, y, z = e
        lam_plus_mu = Poly.variable(lam) + Poly.variable(mu)
        value = map_eval(phi, bracket(x, y, mu), z, lam_plus_mu) \
            - bracket(x, map_eval(phi, y, z, lam), mu) \
            + bracket(y, map_eval(phi, x, z, mu), lam)
    else:  # lem2
        x, y, u, v = e
        mu_plus_gam = Poly.variable(mu) + Poly.variable(gam)
        value = bracket(map_eval(phi, x, y, mu), bracket(u, v, lam), mu_plus_gam) \
            - bracket(bracket(x, y, mu), map_eval(phi, u, v, lam), mu_plus_gam)

    return Residual(tag, tuple(args), value)


@dataclass
class VerifyReport:
    """Residual sweep of a map over all generator tuples of the given tags."""

    algebra: str
    tags: tuple[str, ...]
    checked: int
    failures: list[Residual]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "tags": list(self.tags),
            "checked": self.checked,
            "passed": self.passed,
            "failures": [
                {"tag": r.tag, "args": [str(g) for g in r.args], "residual": str(r.value)}
                for r in self.failures
            ],
        }

    def to_text(self) -> str:
        lines = [f"algebra {self.algebra}",
                 f"identities {','.join(self.tags)}: {self.checked} residuals checked"]
        for r in self.failures:
            lines.append(f"FAIL {r}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def verify_map(phi: BilinearMap, tags: Iterable[str] = TAGS) -> VerifyReport:
    """Evaluate every residual of the given tags over all generator tuples.

    The report lists every nonzero residual with its canonical polynomial
    string, ordered by (tag, tuple).
    """
    tags = normalize_tags(tags)
    gens = phi.algebra.generators()
    failures: list[Residual] = []
    checked = 0
    for tag in tags:
        for args in itertools.product(gens, repeat=TAG_ARITY[tag]):
            r = residual(phi, tag, args)
            checked += 1
            if not r.is_zero:
                failures.append(r)
    return VerifyReport(phi.algebra.name, tags, checked, failures)


# ---------------------------------------------------------------------------
# Closed-form families
# ---------------------------------------------------------------------------

def make_family(algebra: Algebra, kind: str, *, t: Scalar = 1, shift: int = 0,
                a: Scalar = 1, g: Scalar = 0) -> BilinearMap:
    """Build one of the closed-form map families.

    inner      phi(x, y) = t [x_l y], on any algebra.
    cw_shift   phi(L_i, L_j) = a (d+2l) L_{i+j+shift}, on a single-family
               algebra; the shift=0 slice is the inner map with t = a.
    clw_shift  the two-family version: every bracket coefficient is kept
               and only the target index is shifted, scaled by a; the
               g-component additionally routes g (d+2l) G_{i+j+shift} into
               the (L, L) entries and exists only at b = -1.
    """
    gens = algebra.generators()
    if kind == "inner":
        t = Fraction(t)
        table: dict[GenPair, Element] = {}
        for gi in gens:
            ei = algebra.gen_element(gi)
            for gj in gens:
                value = bracket(ei, algebra.gen_element(gj), Var.L) * t
                if not value.is_zero:
                    table[(gi, gj)] = value
        return BilinearMap(algebra, table)

    if kind == "cw_shift":
        if len(algebra.families) != 1:
            raise FamilyError("cw_shift requires a single-family algebra")
        fam = algebra.families[0]
        rule = algebra.rule(fam, fam)
        if rule.target != fam:
            raise FamilyError("cw_shift requires the family to close on itself")
        a = Fraction(a)
        table = {}
        for gi in gens:
            for gj in gens:
                tgt = algebra.gen(fam, gi.index + gj.index + shift)
                value = algebra.element({tgt: rule.coeff * a})
                if not value.is_zero:
                    table[(gi, gj)] = value
        return BilinearMap(algebra, table)

    if kind == "clw_shift":
        if algebra.families != ("L", "G"):
            raise FamilyError("clw_shift requires families L, G")
        a, g = Fraction(a), Fraction(g)
        if g and algebra.b_value != Fraction(-1):
            raise FamilyError("the g-component exists only at b = -1")
        ll = algebra.rule("L", "L")
        table = {}
        for gi in gens:
            for gj in gens:
                value = algebra.zero_element()
                rule = algebra.rule(gi.family, gj.family)
                if a and rule.target is not None:
                    tgt = algebra.gen(rule.target, gi.index + gj.index + shift)
                    value = value + algebra.element({tgt: rule.coeff * a})
                if g and gi.family == "L" and gj.family == "L":
                    tgt = algebra.gen("G", gi.index + gj.index + shift)
                    value = value + algebra.element({tgt: ll.coeff * g})
                if not value.is_zero:
                    table[(gi, gj)] = value
        return BilinearMap(algebra, table)

    raise FamilyError(f"unknown family kind {kind!r}; expected inner, cw_shift or clw_shift")


# ---------------------------------------------------------------------------
# Map files
# ---------------------------------------------------------------------------

def map_to_dict(phi: BilinearMap) -> dict:
    """Serialize a map to the JSON table format, canonically ordered."""
    alg = phi.algebra
    entries = []
    for gi, gj in phi.pairs():
        value = phi.table[(gi, gj)]
        gens = sorted(value.terms, key=alg.gen_sort_key)
        entries.append({
            "left": str(gi),
            "right": str(gj),
            "value": [{"gen": str(g), "coeff": str(value.terms[g])} for g in gens],
        })
    return {"algebra": alg.name, "entries": entries}


def map_from_dict(data: dict, algebra: Algebra) -> BilinearMap:
    """Build a map from the JSON table format against a known algebra.

    {"algebra": str, "entries": [{"left": "L:0", "right": "L:1",
      "value": [{"gen": "L:1", "coeff": expr-string}]}]}
    """
    if not isinstance(data, dict):
        raise MapError("map definition must be a JSON object")
    name = data.get("algebra")
    if name != algebra.name:
        raise MapError(f"map is for algebra {name!r}, not {algebra.name!r}")
    entries = data.get("entries")
    if not isinstance(entries, list):
        raise MapError("entries must be a list")
    table: dict[GenPair, Element] = {}
    for entry in entries:
        try:
            left, right, value = entry["left"], entry["right"], entry["value"]
        except (KeyError, TypeError):
            raise MapError("each entry needs left, right and value") from None
        try:
            gi = algebra.gen(*parse_generator(left))
            gj = algebra.gen(*parse_generator(right))
        except AlgebraError as exc:
            raise MapError(str(exc)) from None
        if (gi, gj) in table:
            raise MapError(f"duplicate entry for pair ({gi},{gj})")
        terms: dict[GeneratorId, Poly] = {}
        for item in value:
            try:
                gen_text, coeff_text = item["gen"], item["coeff"]
            except (KeyError, TypeError):
                raise MapError("each value item needs gen and coeff") from None
            try:
                gt = algebra.gen(*parse_generator(gen_text))
                coeff = parse_poly(coeff_text)
            except (AlgebraError, ParseError) as exc:
                raise MapError(f"entry ({left},{right}): {exc}") from None
            terms[gt] = terms.get(gt, Poly.zero()) + coeff
        table[(gi, gj)] = algebra.element(terms)
    return BilinearMap(algebra, table)


def load_map(path: str | Path, algebra: Algebra) -> BilinearMap:
    """Load a bilinear map file (JSON) against a known algebra."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MapError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapError(f"invalid JSON in {path}: {exc}") from None
    return map_from_dict(data, algebra)
