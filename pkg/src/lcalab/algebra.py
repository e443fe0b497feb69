"""Z_m-graded Lie conformal algebras presented by bracket tables.

An algebra has a finite set of generator families; each family contributes
one generator per residue class mod m.  The bracket of two generators is a
per-family-pair rule: a single coefficient polynomial c(d, l, b) attached
to a target family, with indices adding mod m,

    [x_i lambda y_j] = c(d, l, b) * target_{i+j mod m}.

Evaluation on general module elements follows the sesquilinearity rules: a
coefficient p(d) in the left slot enters as p(-lambda), one in the right
slot as q(d + lambda).  Spectral variables already present in coefficients
pass through untouched, which is what makes nested brackets (Jacobi,
Leibniz, and friends) straightforward residual computations.

Index reduction mod m is a ring map on indices, so all axioms survive the
quotient; m = 1 recovers the non-loop algebras.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .poly import (
    ParseError,
    Poly,
    Scalar,
    SPECTRAL_VARS,
    Var,
    ZERO,
    as_poly,
    parse_poly,
)


class AlgebraError(ValueError):
    """Invalid algebra definition, element, or evaluation request."""


@dataclass(frozen=True)
class GeneratorId:
    """A graded generator: family name plus index reduced mod m."""

    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}:{self.index}"


def parse_generator(text: str) -> tuple[str, int]:
    """Split a "family:index" generator string."""
    family, sep, index = text.partition(":")
    if not sep or not family:
        raise AlgebraError(f"bad generator {text!r}, expected \"family:index\"")
    try:
        return family, int(index)
    except ValueError:
        raise AlgebraError(f"bad generator index in {text!r}") from None


class Element:
    """Finite formal sum of polynomial coefficients on graded generators."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "Algebra", terms: Mapping[GeneratorId, Poly | Scalar] | None = None):
        clean: dict[GeneratorId, Poly] = {}
        if terms:
            for gid, coeff in terms.items():
                gid = algebra.gen(gid.family, gid.index)
                poly = as_poly(coeff)
                if poly.is_zero:
                    continue
                prev = clean.get(gid)
                poly = poly if prev is None else prev + poly
                if poly.is_zero:
                    clean.pop(gid, None)
                else:
                    clean[gid] = poly
        self.algebra = algebra
        self.terms = clean

    @classmethod
    def _raw(cls, algebra: "Algebra", terms: dict[GeneratorId, Poly]) -> "Element":
        e = object.__new__(cls)
        e.algebra = algebra
        e.terms = terms
        return e

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _require_same_algebra(self, other: "Element") -> None:
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("mismatched algebras")

    def __add__(self, other: "Element") -> "Element":
        self._require_same_algebra(other)
        out = dict(self.terms)
        for gid, coeff in other.terms.items():
            s = out.get(gid)
            s = coeff if s is None else s + coeff
            if s.is_zero:
                out.pop(gid, None)
            else:
                out[gid] = s
        return Element._raw(self.algebra, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element._raw(self.algebra, {g: -c for g, c in self.terms.items()})

    def __mul__(self, factor) -> "Element":
        """Module action: multiply every coefficient by a Poly or scalar."""
        poly = as_poly(factor)
        if poly.is_zero:
            return Element._raw(self.algebra, {})
        return Element._raw(self.algebra, {g: c * poly for g, c in self.terms.items()})

    __rmul__ = __mul__

    def subst_coeffs(self, assignments: Mapping[Var, Poly | Scalar]) -> "Element":
        out = {}
        for gid, coeff in self.terms.items():
            c = coeff.subst(assignments)
            if not c.is_zero:
                out[gid] = c
        return Element._raw(self.algebra, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return (self.algebra is other.algebra or self.algebra == other.algebra) \
            and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        gens = sorted(self.terms, key=self.algebra.gen_sort_key)
        return " + ".join(f"({self.terms[g]})*{g}" for g in gens)

    def __repr__(self) -> str:
        return f"Element({self})"


@dataclass(frozen=True)
class BracketRule:
    """Bracket of one ordered family pair: coeff on target_{i+j mod m}.

    ``target is None`` means the bracket of this pair is identically zero.
    The coefficient may use only d, l and b.
    """

    left: str
    right: str
    target: Optional[str]
    coeff: Poly


_RULE_VARS = frozenset({Var.D, Var.L, Var.B})


class Algebra:
    """A Z_m-graded Lie conformal algebra given by its bracket table.

    ``b`` controls the structure parameter: None keeps it symbolic (it
    stays a polynomial variable through every computation), a Fraction
    substitutes it out of every rule coefficient at construction time.
    """

    def __init__(self, name: str, modulus: int, families: Sequence[str],
                 rules: Iterable[BracketRule], b: Scalar | None = None):
        if not isinstance(modulus, int) or modulus < 1:
            raise AlgebraError(f"modulus must be a positive integer, got {modulus!r}")
        families = tuple(families)
        if not families or len(set(families)) != len(families) or not all(families):
            raise AlgebraError("families must be a nonempty list of distinct names")
        b_value = None if b is None else Fraction(b)

        table: dict[tuple[str, str], BracketRule] = {}
        for rule in rules:
            for fam in (rule.left, rule.right):
                if fam not in families:
                    raise AlgebraError(f"unknown family {fam!r} in rule")
            if rule.target is not None and rule.target not in families:
                raise AlgebraError(f"unknown target family {rule.target!r} in rule "
                                   f"({rule.left},{rule.right})")
            key = (rule.left, rule.right)
            if key in table:
                raise AlgebraError(f"duplicate rule for pair ({rule.left},{rule.right})")
            coeff = rule.coeff
            if any(v not in _RULE_VARS for v in coeff.variables()):
                raise AlgebraError(f"rule ({rule.left},{rule.right}): coefficient may "
                                   f"use only d, l, b")
            if b_value is not None:
                coeff = coeff.subst({Var.B: b_value})
            target = rule.target if not coeff.is_zero else None
            table[key] = BracketRule(rule.left, rule.right, target,
                                     coeff if target is not None else ZERO)
        for lf in families:
            for rf in families:
                table.setdefault((lf, rf), BracketRule(lf, rf, None, ZERO))

        self.name = name
        self.modulus = modulus
        self.families = families
        self.b_value = b_value
        self._rules = table

    # -- structure access --------------------------------------------------

    def rule(self, left_family: str, right_family: str) -> BracketRule:
        try:
            return self._rules[(left_family, right_family)]
        except KeyError:
            raise AlgebraError(f"unknown family pair ({left_family},{right_family})") from None

    def rules(self) -> list[BracketRule]:
        order = {f: i for i, f in enumerate(self.families)}
        return sorted(self._rules.values(), key=lambda r: (order[r.left], order[r.right]))

    def gen(self, family: str, index: int) -> GeneratorId:
        if family not in self.families:
            raise AlgebraError(f"unknown family {family!r}")
        return GeneratorId(family, index % self.modulus)

    def generators(self) -> list[GeneratorId]:
        return [GeneratorId(f, i) for f in self.families for i in range(self.modulus)]

    def gen_sort_key(self, gid: GeneratorId):
        return (self.families.index(gid.family), gid.index)

    # -- element constructors ----------------------------------------------

    def element(self, terms: Mapping[GeneratorId, Poly | Scalar]) -> Element:
        return Element(self, terms)

    def gen_element(self, gid: GeneratorId | tuple[str, int]) -> Element:
        if isinstance(gid, tuple):
            gid = self.gen(*gid)
        else:
            gid = self.gen(gid.family, gid.index)
        return Element._raw(self, {gid: Poly.one()})

    def zero_element(self) -> Element:
        return Element._raw(self, {})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return (self.name == other.name and self.modulus == other.modulus
                and self.families == other.families and self.b_value == other.b_value
                and self._rules == other._rules)

    def __repr__(self) -> str:
        return f"Algebra({self.name})"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _spectral_poly(spectral: Union[Var, Poly]) -> Poly:
    if isinstance(spectral, Var):
        if spectral not in SPECTRAL_VARS:
            raise AlgebraError("spectral variable must be one of l, m, g")
        return Poly.variable(spectral)
    if isinstance(spectral, Poly):
        if any(v not in SPECTRAL_VARS for v in spectral.variables()):
            raise AlgebraError("spectral parameter may use only l, m, g")
        return spectral
    raise TypeError(f"bad spectral parameter {spectral!r}")


def bracket(x: Element, y: Element, spectral: Union[Var, Poly] = Var.L) -> Element:
    """Evaluate [x_s y] with the spectral parameter named (or given as) s.

    For x = p(d) e_i and y = q(d) e_j with rule coefficient c(d, l) the
    result is p(-s) * q(d+s) * c(d, s) on the target generator at index
    i+j mod m, extended bilinearly.  s may itself be a polynomial in the
    spectral variables (needed for the nested identities, e.g. l+m).
    """
    alg = x.algebra
    x._require_same_algebra(y)
    s = _spectral_poly(spectral)
    d_plus_s = Poly.variable(Var.D) + s
    neg_s = -s
    coeff_cache: dict[tuple[str, str], Poly] = {}
    acc: dict[GeneratorId, Poly] = {}
    for gi, p in x.terms.items():
        pw = p.subst({Var.D: neg_s})
        if pw.is_zero:
            continue
        for gj, q in y.terms.items():
            rule = alg._rules[(gi.family, gj.family)]
            if rule.target is None:
                continue
            key = (gi.family, gj.family)
            c = coeff_cache.get(key)
            if c is None:
                c = rule.coeff.subst({Var.L: s})
                coeff_cache[key] = c
            coeff = pw * q.subst({Var.D: d_plus_s}) * c
            if coeff.is_zero:
                continue
            tgt = GeneratorId(rule.target, (gi.index + gj.index) % alg.modulus)
            prev = acc.get(tgt)
            acc[tgt] = coeff if prev is None else prev + coeff
    return Element._raw(alg, {g: c for g, c in acc.items() if not c.is_zero})


def second_slot_subst(e: Element, spectral: Var = Var.L) -> Element:
    """Replace the spectral variable by -d - spectral in every coefficient.

    This realizes the skew move: the d here is the ordinary polynomial
    variable acting on coefficients.  Applying it twice is the identity.
    """
    if spectral not in SPECTRAL_VARS:
        raise AlgebraError("spectral variable must be one of l, m, g")
    replacement = -Poly.variable(Var.D) - Poly.variable(spectral)
    return e.subst_coeffs({spectral: replacement})


# ---------------------------------------------------------------------------
# Axiom checking
# ---------------------------------------------------------------------------

@dataclass
class AxiomReport:
    """Skew and Jacobi residuals for every generator pair / triple."""

    algebra: str
    skew: list[tuple[tuple[GeneratorId, GeneratorId], Element]]
    jacobi: list[tuple[tuple[GeneratorId, GeneratorId, GeneratorId], Element]]

    @property
    def passed(self) -> bool:
        return all(r.is_zero for _, r in self.skew) and \
            all(r.is_zero for _, r in self.jacobi)

    def failures(self) -> list[tuple[str, tuple, Element]]:
        out = [("skew", args, r) for args, r in self.skew if not r.is_zero]
        out += [("jacobi", args, r) for args, r in self.jacobi if not r.is_zero]
        return out

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "passed": self.passed,
            "checked": {"skew": len(self.skew), "jacobi": len(self.jacobi)},
            "failures": [
                {"identity": kind, "args": [str(g) for g in args], "residual": str(r)}
                for kind, args, r in self.failures()
            ],
        }

    def to_text(self) -> str:
        lines = [f"algebra {self.algebra}",
                 f"skew residuals: {len(self.skew)} checked",
                 f"jacobi residuals: {len(self.jacobi)} checked"]
        for kind, args, r in self.failures():
            lines.append(f"FAIL {kind} ({', '.join(str(g) for g in args)}): {r}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def check_axioms(algebra: Algebra) -> AxiomReport:
    """Residual check of skew-symmetry and the Jacobi identity.

    Sesquilinearity is built into evaluation, so these two residual
    families are exactly what can fail in a bracket table.  The skew
    residual of a pair (x, y) is [x_l y] + ([y_l x] with l -> -d-l); the
    Jacobi residual of a triple is
    [x_l [y_m z]] - [[x_l y]_{l+m} z] - [y_m [x_l z]].
    """
    gens = algebra.generators()
    basis = {g: algebra.gen_element(g) for g in gens}
    lam, mu = Var.L, Var.M
    lam_plus_mu = Poly.variable(lam) + Poly.variable(mu)

    lam_table = {(gi, gj): bracket(basis[gi], basis[gj], lam)
                 for gi in gens for gj in gens}
    mu_table = {(gi, gj): bracket(basis[gi], basis[gj], mu)
                for gi in gens for gj in gens}

    skew = []
    for gi in gens:
        for gj in gens:
            r = lam_table[(gi, gj)] + second_slot_subst(lam_table[(gj, gi)], lam)
            skew.append(((gi, gj), r))

    jacobi = []
    for gi, gj, gk in itertools.product(gens, repeat=3):
        t1 = bracket(basis[gi], mu_table[(gj, gk)], lam)
        t2 = bracket(lam_table[(gi, gj)], basis[gk], lam_plus_mu)
        t3 = bracket(basis[gj], bracket(basis[gi], basis[gk], lam), mu)
        jacobi.append(((gi, gj, gk), t1 - t2 - t3))

    return AxiomReport(algebra.name, skew, jacobi)


# ---------------------------------------------------------------------------
# Catalog and file loading
# ---------------------------------------------------------------------------

def make_catalog(kind: str, m: int = 1, b: Scalar | None = None) -> Algebra:
    """Built-in bracket tables.

    kind "vir": rank one, single family L with [L_l L] = (d+2l)L; m must
    be 1.  kind "cw": the loop version, one family L per residue class
    mod m.  kind "clw": two families L, G with parameter b; b = None keeps
    it symbolic, a Fraction instantiates it.
    """
    d, lam, bb = Poly.variable(Var.D), Poly.variable(Var.L), Poly.variable(Var.B)
    if not isinstance(m, int) or m < 1:
        raise AlgebraError(f"modulus must be a positive integer, got {m!r}")
    if kind == "vir":
        if m != 1:
            raise AlgebraError("vir is rank one; use kind 'cw' for m > 1")
        if b is not None:
            raise AlgebraError("b is only accepted for kind 'clw'")
        return Algebra("Vir", 1, ["L"], [BracketRule("L", "L", "L", d + 2 * lam)])
    if kind == "cw":
        if b is not None:
            raise AlgebraError("b is only accepted for kind 'clw'")
        return Algebra(f"CW(m={m})", m, ["L"],
                       [BracketRule("L", "L", "L", d + 2 * lam)])
    if kind == "clw":
        b_text = "symbolic" if b is None else str(Fraction(b))
        rules = [
            BracketRule("L", "L", "L", d + 2 * lam),
            BracketRule("L", "G", "G", d + lam - bb * lam),
            BracketRule("G", "L", "G", -(bb * d + (bb - 1) * lam)),
            BracketRule("G", "G", None, ZERO),
        ]
        return Algebra(f"CLW(m={m}, b={b_text})", m, ["L", "G"], rules, b=b)
    raise AlgebraError(f"unknown catalog kind {kind!r}; expected vir, cw or clw")


def algebra_from_dict(data: dict) -> Algebra:
    """Build an Algebra from the JSON definition format.

    {"name": str, "modulus": int, "families": [str],
     "b": "symbolic" | "p/q",
     "rules": [{"left": str, "right": str, "target": str|null,
                "coeff": expr-string}]}

    Coefficient expressions use the d/l/b subset of the expression grammar.
    Pairs without a rule get the zero bracket.  The loaded table is
    validated structurally only; run check_axioms separately.
    """
    if not isinstance(data, dict):
        raise AlgebraError("algebra definition must be a JSON object")
    try:
        name = data["name"]
        modulus = data["modulus"]
        families = data["families"]
        raw_rules = data["rules"]
    except KeyError as exc:
        raise AlgebraError(f"algebra definition missing key {exc.args[0]!r}") from None
    if not isinstance(name, str):
        raise AlgebraError("name must be a string")
    if not isinstance(families, list) or not all(isinstance(f, str) for f in families):
        raise AlgebraError("families must be a list of strings")

    b_raw = data.get("b", "symbolic")
    if b_raw == "symbolic":
        b = None
    else:
        try:
            b = Fraction(b_raw)
        except (ValueError, TypeError, ZeroDivisionError):
            raise AlgebraError(f"bad b value {b_raw!r}") from None

    if not isinstance(raw_rules, list):
        raise AlgebraError("rules must be a list")
    rules = []
    for entry in raw_rules:
        if not isinstance(entry, dict):
            raise AlgebraError("each rule must be a JSON object")
        try:
            left, right = entry["left"], entry["right"]
            target, coeff_text = entry["target"], entry["coeff"]
        except KeyError as exc:
            raise AlgebraError(f"rule missing key {exc.args[0]!r}") from None
        if not isinstance(coeff_text, str):
            raise AlgebraError(f"rule ({left},{right}): coeff must be a string")
        try:
            coeff = parse_poly(coeff_text)
        except ParseError as exc:
            raise AlgebraError(f"rule ({left},{right}): {exc}") from None
        rules.append(BracketRule(left, right, target, coeff))
    return Algebra(name, modulus, families, rules, b=b)


def load_algebra(path: str | Path) -> Algebra:
    """Load and validate an algebra definition file (JSON)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise AlgebraError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"invalid JSON in {path}: {exc}") from None
    return algebra_from_dict(data)


def algebra_to_dict(algebra: Algebra) -> dict:
    """Inverse of algebra_from_dict, emitting canonical coefficient strings."""
    return {
        "name": algebra.name,
        "modulus": algebra.modulus,
        "families": list(algebra.families),
        "b": "symbolic" if algebra.b_value is None else str(algebra.b_value),
        "rules": [
            {"left": r.left, "right": r.right, "target": r.target, "coeff": str(r.coeff)}
            for r in algebra.rules()
        ],
    }
