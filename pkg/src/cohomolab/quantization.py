"""Differential operators on weighted densities and the quantization cocycles.

With the flat volume trivialization a density is just its coefficient
function, and the weight lambda enters only through the Lie derivative

    L_X = X^i d_i + lambda div(X).

Normal ordering  tau : p(x) xi^v  |->  p(x) d^v  is a section of the
principal symbol, and the connecting cocycle of the symbol filtration is

    gamma(X)(P) = [L_X, tau(P)] - tau(L_X P),

an operator of order at most k-1 on degree-k input (top orders cancel).
Its symbol projections are vector-field cocycles with operator values; the
top projection is trivial exactly at the halfway weight, where the explicit
splitting witness found by the coboundary solver lets the next projection
be formed, reproducing the degree-two-lowering class.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .cocycles import OneCocycle
from .operators import (
    PolyDiffOp,
    _leibniz_subsets,
    falling,
    monomials_up_to,
    xi_simplex,
)
from .poly import (
    Exponent,
    Poly,
    StructureError,
    check_vector_field,
    rat,
    single_ring,
)
from .symbols import divergence, hamiltonian_action


def _check_x_only(p: Poly) -> Poly:
    if p.terms and p.xi_degree() != 0:
        raise StructureError("density coefficients must be xi-free")
    return p


class DensityOperator:
    """A differential operator on densities: sparse sum of a_alpha(x) d^alpha."""

    __slots__ = ("n", "weight", "terms")

    def __init__(self, n: int, weight, terms: dict[Exponent, Poly]):
        self.n = n
        self.weight = rat(weight)
        clean = {}
        for alpha, coeff in terms.items():
            if len(alpha) != n or any(a < 0 for a in alpha):
                raise StructureError(f"bad derivative index {alpha}")
            if not coeff.is_zero():
                clean[tuple(alpha)] = _check_x_only(coeff)
        self.terms = clean

    @staticmethod
    def zero(n: int, weight) -> "DensityOperator":
        return DensityOperator(n, weight, {})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return (self.n, self.weight) == (other.n, other.weight) \
            and self.terms == other.terms

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def _like(self, terms) -> "DensityOperator":
        out = DensityOperator.zero(self.n, self.weight)
        out.terms = {a: c for a, c in terms.items() if not c.is_zero()}
        return out

    def __add__(self, other: "DensityOperator") -> "DensityOperator":
        self._check_compatible(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            prev = out.get(a)
            out[a] = c if prev is None else prev + c
        return self._like(out)

    def __sub__(self, other: "DensityOperator") -> "DensityOperator":
        return self + other.scale(-1)

    def scale(self, c) -> "DensityOperator":
        c = rat(c)
        return self._like({a: coeff.scale(c) for a, coeff in self.terms.items()})

    def _check_compatible(self, other: "DensityOperator") -> None:
        if self.n != other.n or self.weight != other.weight:
            raise StructureError("density operators live on different spaces")

    def apply(self, f: Poly) -> Poly:
        _check_x_only(f)
        ring = f.ring
        pad = (0,) * ring.n
        out = Poly.zero(ring)
        for alpha, coeff in self.terms.items():
            d = f.diff_multi(tuple(alpha) + pad)
            if not d.is_zero():
                out = out + coeff * d
        return out

    def compose(self, other: "DensityOperator") -> "DensityOperator":
        self._check_compatible(other)
        pad = (0,) * self.n
        out: dict[Exponent, Poly] = {}
        for alpha, f in self.terms.items():
            for beta, g in other.terms.items():
                gdeg = g.total_degree()
                for sub, b, sub_total in _leibniz_subsets(alpha):
                    if sub_total > gdeg:
                        break
                    dg = g.diff_multi(tuple(sub) + pad)
                    if dg.is_zero():
                        continue
                    coeff = f * dg
                    if b != 1:
                        coeff = coeff.scale(b)
                    key = tuple(a - s + bb for a, s, bb in zip(alpha, sub, beta))
                    prev = out.get(key)
                    out[key] = coeff if prev is None else prev + coeff
        return self._like(out)

    def commutator(self, other: "DensityOperator") -> "DensityOperator":
        return self.compose(other) - other.compose(self)

    def principal_symbol(self, j: int) -> Poly:
        """The degree-j symbol sum_{|alpha| = j} a_alpha(x) xi^alpha."""
        if self.order > j:
            raise StructureError(
                f"operator order {self.order} exceeds requested symbol degree {j}")
        ring = single_ring(self.n)
        out = Poly.zero(ring)
        for alpha, coeff in self.terms.items():
            if sum(alpha) == j:
                out = out + coeff * Poly.monomial(ring, (0,) * self.n + alpha)
        return out

    def drop_top_order(self, j: int) -> "DensityOperator":
        """The part of order < j (exact when the order-j symbol is removed)."""
        return self._like({a: c for a, c in self.terms.items() if sum(a) < j})

    def __repr__(self) -> str:
        inner = " + ".join(f"({c})*d^{a}" for a, c in sorted(self.terms.items()))
        return f"DensityOperator[{self.weight}]({inner or '0'})"


def weighted_lie_derivative(X: Poly, weight) -> DensityOperator:
    """L_X = X^i d_i + weight * div(X) on densities of the given weight."""
    check_vector_field(X)
    ring = X.ring
    n = ring.n
    terms: dict[Exponent, Poly] = {}
    for i in range(n):
        comp = X.diff(ring.xi(i))
        if not comp.is_zero():
            alpha = [0] * n
            alpha[i] = 1
            key = tuple(alpha)
            prev = terms.get(key)
            terms[key] = comp if prev is None else prev + comp
    dv = divergence(X).scale(rat(weight))
    if not dv.is_zero():
        terms[(0,) * n] = terms.get((0,) * n, Poly.zero(ring)) + dv
    return DensityOperator(n, weight, terms)


def normal_order_section(P: Poly, weight) -> DensityOperator:
    """tau: replace each xi-monomial by the derivative monomial, coefficients left."""
    n = P.ring.n
    terms: dict[Exponent, Poly] = {}
    for exp, c in P.terms.items():
        u, v = exp[:n], exp[n:]
        coeff = Poly.monomial(P.ring, u + (0,) * n, c)
        prev = terms.get(v)
        terms[v] = coeff if prev is None else prev + coeff
    return DensityOperator(n, weight, terms)


def right_order_section(P: Poly, weight) -> DensityOperator:
    """The section placing coefficients to the right: p xi^v |-> d^v o (p .)."""
    n = P.ring.n
    out = DensityOperator.zero(n, weight)
    pad = (0,) * n
    for exp, c in P.terms.items():
        u, v = exp[:n], exp[n:]
        mult = DensityOperator(n, weight,
                               {pad: Poly.monomial(P.ring, u + pad, c)})
        dv = DensityOperator(n, weight, {v: Poly.constant(P.ring, 1)})
        out = out + dv.compose(mult)
    return out


def symmetrized_section(P: Poly, weight) -> DensityOperator:
    """Average of the left- and right-ordered sections; still a symbol section."""
    left = normal_order_section(P, weight)
    right = right_order_section(P, weight)
    return (left + right).scale(Fraction(1, 2))


def sequence_cocycle(X: Poly, P: Poly, weight,
                     section=normal_order_section) -> DensityOperator:
    """The connecting cocycle value [L_X, tau(P)] - tau(L_X P); order <= k-1."""
    check_vector_field(X)
    k = P.xi_degree()
    if k is None:
        raise StructureError("the symbol argument must be xi-homogeneous")
    L = weighted_lie_derivative(X, weight)
    tau_P = section(P, weight)
    out = L.compose(tau_P) - tau_P.compose(L) - section(hamiltonian_action(X, P), weight)
    if P.terms and out.order > max(k - 1, 0):
        raise StructureError("top symbols failed to cancel in the sequence cocycle")
    return out


def operator_from_symbol_values(n: int, k: int, ell: int, value_fn,
                                max_x_order: int) -> PolyDiffOp:
    """Reconstruct the operator S_k -> S_ell from its values on monomials.

    value_fn(u, v) must return the value on x^u xi^v.  Coefficients of the
    x-part are recovered degree by degree through the falling-factorial
    triangular system; the result is re-checked against fresh evaluations
    one degree beyond the requested order and rejected on mismatch, so a
    too-small max_x_order cannot produce a silently wrong operator.
    """
    ring = single_ring(n)
    pad = (0,) * n
    # recovered[(v, w)][alpha] -> x-only Poly coefficient
    recovered: dict[tuple, dict[Exponent, Poly]] = {}
    us = monomials_up_to(n, max_x_order)
    for v in xi_simplex(n, k):
        values: dict[Exponent, dict[Exponent, Poly]] = {}
        for u in us:
            val = value_fn(u, v)
            by_w: dict[Exponent, Poly] = {}
            for exp, c in val.terms.items():
                w = exp[n:]
                mono = Poly.monomial(ring, exp[:n] + pad, c)
                prev = by_w.get(w)
                by_w[w] = mono if prev is None else prev + mono
            values[u] = by_w
        ws = sorted({w for by_w in values.values() for w in by_w})
        for w in ws:
            if sum(w) != ell:
                raise StructureError(
                    f"value outside the target degree {ell}: output {w}")
            coeffs: dict[Exponent, Poly] = {}
            for u in us:
                residue = values[u].get(w, Poly.zero(ring))
                for alpha, c_alpha in coeffs.items():
                    fac = falling(u, alpha)
                    if fac == 0:
                        continue
                    shift = tuple(ui - ai for ui, ai in zip(u, alpha))
                    residue = residue - c_alpha * Poly.monomial(ring, shift + pad, fac)
                if not residue.is_zero():
                    fact = 1
                    for ui in u:
                        fact *= factorial(ui)
                    coeffs[u] = residue.scale(Fraction(1, fact))
            if coeffs:
                recovered[(v, w)] = coeffs

    terms: dict[Exponent, Poly] = {}
    for (v, w), coeffs in recovered.items():
        vfact = 1
        for vi in v:
            vfact *= factorial(vi)
        for alpha, c_alpha in coeffs.items():
            deriv = tuple(alpha) + tuple(v)
            contrib = c_alpha * Poly.monomial(ring, pad + w, Fraction(1, vfact))
            prev = terms.get(deriv)
            terms[deriv] = contrib if prev is None else prev + contrib
    op = PolyDiffOp(ring, terms)

    for v in xi_simplex(n, k):
        for u in xi_simplex(n, max_x_order + 1):
            expected = value_fn(u, v)
            got = op.apply(Poly.monomial(ring, tuple(u) + v))
            if expected != got:
                raise StructureError(
                    "operator reconstruction inconsistent; raise max_x_order")
    return op


def quantization_top_cocycle(n: int, k: int, weight,
                             section=normal_order_section) -> OneCocycle:
    """The top symbol of the connecting cocycle, as a cocycle S_k -> S_(k-1)."""
    if k < 1:
        raise StructureError("the quantization cocycle needs degree >= 1")
    ring = single_ring(n)
    weight = rat(weight)

    def rule(X: Poly) -> PolyDiffOp:
        def value(u, v):
            P = Poly.monomial(ring, tuple(u) + tuple(v))
            return sequence_cocycle(X, P, weight, section).principal_symbol(k - 1)

        return operator_from_symbol_values(n, k, k - 1, value, max_x_order=2)

    return OneCocycle(n, k, k - 1, f"sigma{k - 1}-quantization", rule)


def quantization_projected_cocycle(n: int, k: int, weight,
                                   splitting: PolyDiffOp) -> OneCocycle:
    """The next symbol projection after removing the top part with a splitting.

    The splitting witness B solves  sigma_(k-1) gamma(X) = X.B; subtracting
    the corresponding coboundary of  P |-> tau(B(P))  pushes the cocycle
    into operators of order <= k-2, whose top symbol is again a cocycle.
    """
    if k < 2:
        raise StructureError("the projected cocycle needs degree >= 2")
    ring = single_ring(n)
    weight = rat(weight)

    def corrected(X: Poly, P: Poly) -> DensityOperator:
        gamma = sequence_cocycle(X, P, weight)
        L = weighted_lie_derivative(X, weight)
        tau_BP = normal_order_section(splitting.apply(P), weight)
        tau_BXP = normal_order_section(
            splitting.apply(hamiltonian_action(X, P)), weight)
        correction = L.compose(tau_BP) - tau_BP.compose(L) - tau_BXP
        out = gamma - correction
        if P.terms and out.order > max(k - 2, 0):
            raise StructureError("splitting witness failed to cancel the top symbol")
        return out

    def rule(X: Poly) -> PolyDiffOp:
        def value(u, v):
            P = Poly.monomial(ring, tuple(u) + tuple(v))
            return corrected(X, P).principal_symbol(k - 2)

        return operator_from_symbol_values(n, k, k - 2, value, max_x_order=3)

    return OneCocycle(n, k, k - 2, f"sigma{k - 2}-quantization", rule)
