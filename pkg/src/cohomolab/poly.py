"""Exact sparse polynomial ring in the cotangent variables (x, xi).

A polynomial lives in one of two rings over the rationals:

  single :  Q[x1..xn, xi1..xin]            (functions on T*R^n, fiberwise polynomial)
  doubled:  Q[x, xi, y1..yn, eta1..etan]   (two-point calculus for bilinear operators)

Terms are stored sparsely as a map from exponent tuples to coefficients.
Coefficients are exact rationals; integral values are normalized to Python
ints so that the common integer case stays on the fast arithmetic path
(Fraction(2) == 2 and hash(Fraction(2)) == hash(2), so dict semantics are
unaffected).  The zero polynomial has an empty term map; equality and
hashing are structural.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Coeff = int | Fraction
Exponent = tuple[int, ...]


class StructureError(ValueError):
    """Raised on ring/dimension mismatches and malformed inputs."""


class ResourceLimitError(RuntimeError):
    """Raised when an operation would exceed the configured term budget."""


def _term_budget() -> int:
    raw = os.environ.get("COHOMOLAB_MAX_TERMS", "")
    try:
        return int(raw) if raw else 2_000_000
    except ValueError:
        return 2_000_000


def check_term_budget(n_terms: int) -> None:
    cap = _term_budget()
    if n_terms > cap:
        raise ResourceLimitError(
            f"term count {n_terms} exceeds COHOMOLAB_MAX_TERMS={cap}")


def norm_coeff(c: Coeff) -> Coeff:
    """Normalize a coefficient: Fractions with denominator 1 become ints."""
    if type(c) is int:
        return c
    if c.denominator == 1:
        return c.numerator
    return c


def rat(value) -> Coeff:
    """Parse an exact rational from an int, Fraction, or 'num/den' string."""
    if isinstance(value, bool):
        raise StructureError("boolean is not a rational coefficient")
    if isinstance(value, (int, Fraction)):
        return norm_coeff(Fraction(value))
    if isinstance(value, str):
        return norm_coeff(Fraction(value))
    raise StructureError(f"not an exact rational: {value!r}")


def rat_str(c: Coeff) -> str:
    """Canonical 'num/den' form, denominator omitted when 1."""
    c = norm_coeff(c)
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class Ring:
    """Variable layout for a polynomial ring of dimension n.

    Variable indices: x_i at i, xi_i at n+i, and in doubled mode y_i at
    2n+i, eta_i at 3n+i (all 0-based internally, printed 1-based).
    """

    n: int
    doubled: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise StructureError(f"dimension must be positive, got {self.n}")

    @property
    def nvars(self) -> int:
        return 4 * self.n if self.doubled else 2 * self.n

    def x(self, i: int) -> int:
        self._check_coord(i)
        return i

    def xi(self, i: int) -> int:
        self._check_coord(i)
        return self.n + i

    def y(self, i: int) -> int:
        if not self.doubled:
            raise StructureError("y variables exist only in the doubled ring")
        self._check_coord(i)
        return 2 * self.n + i

    def eta(self, i: int) -> int:
        if not self.doubled:
            raise StructureError("eta variables exist only in the doubled ring")
        self._check_coord(i)
        return 3 * self.n + i

    def _check_coord(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise StructureError(f"coordinate index {i} out of range for n={self.n}")

    def var_name(self, idx: int) -> str:
        n = self.n
        if not 0 <= idx < self.nvars:
            raise StructureError(f"variable index {idx} out of range")
        block, pos = divmod(idx, n)
        prefix = ("x", "xi", "y", "eta")[block]
        return f"{prefix}{pos + 1}"

    def var_index(self, name: str) -> int:
        for prefix, block in (("eta", 3), ("xi", 1), ("x", 0), ("y", 2)):
            if name.startswith(prefix) and name[len(prefix):].isdigit():
                pos = int(name[len(prefix):]) - 1
                if block >= 2 and not self.doubled:
                    raise StructureError(f"variable {name!r} needs the doubled ring")
                self._check_coord(pos)
                return block * self.n + pos
        raise StructureError(f"unknown variable {name!r}")

    def single(self) -> "Ring":
        return Ring(self.n, False)


@lru_cache(maxsize=None)
def single_ring(n: int) -> Ring:
    return Ring(n, False)


@lru_cache(maxsize=None)
def doubled_ring(n: int) -> Ring:
    return Ring(n, True)


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms", "_hash", "_tdeg")

    def __init__(self, ring: Ring, terms: dict[Exponent, Coeff], *, _clean: bool = False):
        self.ring = ring
        self._tdeg = None
        if _clean:
            self.terms = terms
        else:
            nv = ring.nvars
            clean: dict[Exponent, Coeff] = {}
            for exp, c in terms.items():
                if len(exp) != nv:
                    raise StructureError(
                        f"exponent {exp} has length {len(exp)}, ring has {nv} variables")
                if any(e < 0 for e in exp):
                    raise StructureError(f"negative exponent in {exp}")
                c = norm_coeff(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                if c != 0:
                    clean[tuple(exp)] = c
            self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ring: Ring) -> "Poly":
        return Poly(ring, {}, _clean=True)

    @staticmethod
    def constant(ring: Ring, c) -> "Poly":
        c = rat(c)
        if c == 0:
            return Poly.zero(ring)
        return Poly(ring, {(0,) * ring.nvars: c}, _clean=True)

    @staticmethod
    def variable(ring: Ring, idx: int) -> "Poly":
        exp = [0] * ring.nvars
        exp[idx] = 1
        return Poly(ring, {tuple(exp): 1}, _clean=True)

    @staticmethod
    def monomial(ring: Ring, exp: Exponent, c=1) -> "Poly":
        return Poly(ring, {tuple(exp): rat(c)})

    # -- structural --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(
                (e, Fraction(c)) for e, c in self.terms.items())))
        return self._hash

    def _check_same_ring(self, other: "Poly") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise StructureError(
                f"ring mismatch: {self.ring} vs {other.ring}")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        self._check_same_ring(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, 0) + c
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = norm_coeff(s)
        return Poly(self.ring, out, _clean=True)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly(self.ring, {e: -c for e, c in self.terms.items()}, _clean=True)

    def scale(self, c) -> "Poly":
        c = rat(c)
        if c == 0:
            return Poly.zero(self.ring)
        if c == 1:
            return self
        return Poly(self.ring,
                    {e: norm_coeff(v * c) for e, v in self.terms.items()},
                    _clean=True)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check_same_ring(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.ring)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Exponent, Coeff] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                key = tuple(i + j for i, j in zip(ea, eb))
                s = out.get(key, 0) + ca * cb
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        check_term_budget(len(out))
        return Poly(self.ring, {e: norm_coeff(c) for e, c in out.items()}, _clean=True)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise StructureError("negative power")
        out = Poly.constant(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ----------------------------------------------------------

    def diff(self, var: int) -> "Poly":
        """Exact formal partial derivative with respect to variable index var."""
        if not 0 <= var < self.ring.nvars:
            raise StructureError(f"unknown variable index {var}")
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            e = exp[var]
            if e:
                key = exp[:var] + (e - 1,) + exp[var + 1:]
                s = out.get(key, 0) + c * e
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = norm_coeff(s)
        return Poly(self.ring, out, _clean=True)

    def diff_multi(self, multi: Exponent) -> "Poly":
        """Iterated partial derivative d^multi, computed in one pass per term."""
        active = [(var, m) for var, m in enumerate(multi) if m]
        if not active:
            return self
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            fac = 1
            new = list(exp)
            for var, m in active:
                e = exp[var]
                if e < m:
                    fac = 0
                    break
                for step in range(m):
                    fac *= e - step
                new[var] = e - m
            if fac:
                key = tuple(new)
                s = out.get(key, 0) + c * fac
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = norm_coeff(s)
        return Poly(self.ring, out, _clean=True)

    # -- grading and slot moves ---------------------------------------------

    def xi_degree_of_term(self, exp: Exponent) -> int:
        n = self.ring.n
        d = sum(exp[n:2 * n])
        if self.ring.doubled:
            d += sum(exp[3 * n:4 * n])
        return d

    def xi_degree_decompose(self) -> list[tuple[int, "Poly"]]:
        """Split into xi-homogeneous parts; returns (degree, part) sorted by degree."""
        if self.ring.doubled:
            raise StructureError("grading decomposition expects the single ring")
        buckets: dict[int, dict[Exponent, Coeff]] = {}
        for exp, c in self.terms.items():
            buckets.setdefault(self.xi_degree_of_term(exp), {})[exp] = c
        return [(k, Poly(self.ring, t, _clean=True))
                for k, t in sorted(buckets.items())]

    def xi_degree(self) -> int | None:
        """The xi-degree if xi-homogeneous (0 for the zero polynomial), else None."""
        degs = {self.xi_degree_of_term(e) for e in self.terms}
        if not degs:
            return 0
        if len(degs) == 1:
            return degs.pop()
        return None

    def total_degree(self) -> int:
        if self._tdeg is None:
            self._tdeg = max((sum(e) for e in self.terms), default=0)
        return self._tdeg

    def x_degree(self) -> int:
        n = self.ring.n
        return max((sum(e[:n]) for e in self.terms), default=0)

    def restrict_diagonal(self) -> "Poly":
        """Substitute y := x, eta := xi; the result lives in the single ring."""
        if not self.ring.doubled:
            raise StructureError("restrict_diagonal expects a doubled-ring polynomial")
        n2 = 2 * self.ring.n
        target = self.ring.single()
        out: dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            key = tuple(exp[i] + exp[n2 + i] for i in range(n2))
            s = out.get(key, 0) + c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = norm_coeff(s)
        return Poly(target, out, _clean=True)

    def embed_first_slot(self) -> "Poly":
        """View a single-ring polynomial as a function of (x, xi) in the doubled ring."""
        if self.ring.doubled:
            raise StructureError("already doubled")
        target = doubled_ring(self.ring.n)
        pad = (0,) * (2 * self.ring.n)
        return Poly(target, {exp + pad: c for exp, c in self.terms.items()}, _clean=True)

    def embed_second_slot(self) -> "Poly":
        """View a single-ring polynomial as a function of (y, eta) in the doubled ring."""
        if self.ring.doubled:
            raise StructureError("already doubled")
        target = doubled_ring(self.ring.n)
        pad = (0,) * (2 * self.ring.n)
        return Poly(target, {pad + exp: c for exp, c in self.terms.items()}, _clean=True)

    # -- text form -----------------------------------------------------------

    def __str__(self) -> str:
        return poly_str(self)

    def __repr__(self) -> str:
        return f"Poly({self.ring.n}{'d' if self.ring.doubled else ''}: {poly_str(self)})"


def poly_str(p: Poly) -> str:
    """Canonical text form: terms in lexicographic exponent order.

    Coefficients always print, as 'num/den' with the denominator omitted
    when 1; negatives keep their sign inside the coefficient.
    """
    if not p.terms:
        return "0"
    parts = []
    for exp in sorted(p.terms):
        c = p.terms[exp]
        factors = [rat_str(c)]
        for idx, e in enumerate(exp):
            if e == 0:
                continue
            name = p.ring.var_name(idx)
            factors.append(name if e == 1 else f"{name}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def parse_poly(ring: Ring, text: str) -> Poly:
    """Parse the canonical text form produced by poly_str."""
    text = text.strip()
    if text == "0":
        return Poly.zero(ring)
    terms: dict[Exponent, Coeff] = {}
    for part in text.split(" + "):
        factors = part.strip().split("*")
        coeff = rat(factors[0])
        exp = [0] * ring.nvars
        for f in factors[1:]:
            if "^" in f:
                name, e = f.split("^")
                exp[ring.var_index(name)] += int(e)
            else:
                exp[ring.var_index(f)] += 1
        key = tuple(exp)
        prev = terms.get(key, 0) + coeff
        if prev == 0:
            terms.pop(key, None)
        else:
            terms[key] = norm_coeff(prev)
    return Poly(ring, terms, _clean=True)


@dataclass(frozen=True)
class SymbolSection:
    """A polynomial symbol homogeneous of a fixed degree in the fiber variables."""

    poly: Poly
    degree: int

    def __post_init__(self):
        if self.poly.ring.doubled:
            raise StructureError("symbols live in the single ring")
        d = self.poly.xi_degree()
        if d is None or (self.poly.terms and d != self.degree):
            raise StructureError(
                f"polynomial is not xi-homogeneous of degree {self.degree}")


def symbol(p: Poly) -> SymbolSection:
    """Wrap a xi-homogeneous polynomial as a SymbolSection."""
    d = p.xi_degree()
    if d is None:
        raise StructureError("polynomial is not xi-homogeneous")
    return SymbolSection(p, d)


def xi_degree_sections(p: Poly) -> list[SymbolSection]:
    """Homogeneous components wrapped as sections, ascending degree."""
    return [SymbolSection(part, k) for k, part in p.xi_degree_decompose()]


def check_vector_field(X: Poly) -> Poly:
    """Validate the degree-1 symbol identification of a vector field."""
    if X.ring.doubled:
        raise StructureError("vector fields live in the single ring")
    if not X.is_zero() and X.xi_degree() != 1:
        raise StructureError("a vector field symbol must have xi-degree exactly 1")
    return X
