"""Vector-field actions on polynomial symbols and the affine/projective generators.

A vector field X = X^i d/dx^i is identified with the degree-1 symbol
X = X^i xi_i.  Its action on symbols is the Hamiltonian vector field

    L_X = (dX/dxi_i) d/dx^i - (dX/dx^i) d/dxi_i,

which on degree-1 arguments reduces to the Lie bracket of vector fields.
The module also provides the Euler and divergence operators generating the
commutant of the affine action, the generators of the projective subalgebra
sl(n+1, R) inside Vect(R^n), and the divergence-type multiplication cocycles
attached to a closed polynomial 1-form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import Poly, Ring, StructureError, check_vector_field, rat, single_ring


def schouten_bracket(f: Poly, g: Poly) -> Poly:
    """Canonical Poisson bracket on (x, xi), extending the vector-field bracket."""
    if f.ring is not g.ring and f.ring != g.ring:
        raise StructureError("bracket arguments must share a ring")
    if f.ring.doubled:
        raise StructureError("the bracket is defined on the single ring")
    ring = f.ring
    acc: dict = {}
    for i in range(ring.n):
        xv, xiv = ring.x(i), ring.xi(i)
        for sign, a, b in ((1, f.diff(xiv), g.diff(xv)),
                           (-1, f.diff(xv), g.diff(xiv))):
            if a.is_zero() or b.is_zero():
                continue
            for exp, c in (a * b).terms.items():
                s = acc.get(exp, 0) + sign * c
                if s == 0:
                    acc.pop(exp, None)
                else:
                    acc[exp] = s
    from .poly import norm_coeff
    return Poly(ring, {e: norm_coeff(c) for e, c in acc.items()}, _clean=True)


def hamiltonian_action(X: Poly, p: Poly) -> Poly:
    """Action of the vector field X on a symbol: L_X p = {X, p}."""
    check_vector_field(X)
    return schouten_bracket(X, p)


def euler_op(p: Poly) -> Poly:
    """E = xi_i d/dxi_i; multiplies each xi-homogeneous part by its degree."""
    if p.ring.doubled:
        raise StructureError("euler_op expects the single ring")
    ring = p.ring
    out = Poly.zero(ring)
    for i in range(ring.n):
        out = out + Poly.variable(ring, ring.xi(i)) * p.diff(ring.xi(i))
    return out


def div_op(p: Poly) -> Poly:
    """D = (d/dx^i)(d/dxi_i); lowers both the x-degree and the xi-degree by one."""
    if p.ring.doubled:
        raise StructureError("div_op expects the single ring")
    ring = p.ring
    out = Poly.zero(ring)
    for i in range(ring.n):
        out = out + p.diff(ring.x(i)).diff(ring.xi(i))
    return out


def divergence(X: Poly) -> Poly:
    """div X = dX^i/dx^i for the flat volume form; a xi-free polynomial."""
    check_vector_field(X)
    return div_op(X)


@dataclass(frozen=True)
class GeneratorFamily:
    """The sl(n+1, R) generators inside Vect(R^n) as degree-1 symbols.

    translations[i]      X_i   = xi_i
    linear[(i, j)]       X_ij  = x^i xi_j
    quadratic[i]         Xbar_i = x^i (x^j xi_j)
    """

    n: int
    translations: tuple[Poly, ...]
    linear: dict[tuple[int, int], Poly]
    quadratic: tuple[Poly, ...]

    def labeled(self) -> list[tuple[str, Poly]]:
        """All generators with their CLI labels, in canonical order."""
        out = [(f"T {i + 1}", X) for i, X in enumerate(self.translations)]
        for (i, j) in sorted(self.linear):
            out.append((f"L {i + 1} {j + 1}", self.linear[(i, j)]))
        out.extend((f"Q {i + 1}", X) for i, X in enumerate(self.quadratic))
        return out

    def all(self) -> list[Poly]:
        return [X for _, X in self.labeled()]

    def affine(self) -> list[Poly]:
        return list(self.translations) + [self.linear[k] for k in sorted(self.linear)]

    def by_label(self, label: str) -> Poly:
        for lab, X in self.labeled():
            if lab == label:
                return X
        raise StructureError(f"unknown generator label {label!r}")


def sl_generators(n: int) -> GeneratorFamily:
    """Generators of the projective action on R^n; requires n >= 2."""
    if n < 2:
        raise StructureError(f"projective generators need dimension >= 2, got {n}")
    ring = single_ring(n)
    translations = tuple(Poly.variable(ring, ring.xi(i)) for i in range(n))
    linear = {
        (i, j): Poly.variable(ring, ring.x(i)) * Poly.variable(ring, ring.xi(j))
        for i in range(n) for j in range(n)
    }
    euler_field = Poly.zero(ring)
    for j in range(n):
        euler_field = euler_field + linear[(j, j)]
    quadratic = tuple(Poly.variable(ring, ring.x(i)) * euler_field for i in range(n))
    return GeneratorFamily(n, translations, linear, quadratic)


def euler_field(n: int) -> Poly:
    """The dilation field x^i d/dx^i as a degree-1 symbol."""
    ring = single_ring(n)
    out = Poly.zero(ring)
    for i in range(n):
        out = out + Poly.variable(ring, ring.x(i)) * Poly.variable(ring, ring.xi(i))
    return out


def _check_one_form(omega: list[Poly], ring: Ring) -> None:
    if len(omega) != ring.n:
        raise StructureError(f"a 1-form on R^{ring.n} needs {ring.n} components")
    for w in omega:
        if w.ring != ring:
            raise StructureError("1-form components must live in the same ring")
        if not w.is_zero() and w.xi_degree() != 0:
            raise StructureError("1-form components must be xi-free")


def is_closed(omega: list[Poly], ring: Ring) -> bool:
    """Closedness of omega_i dx^i, i.e. symmetry of the component Jacobian."""
    _check_one_form(omega, ring)
    for i in range(ring.n):
        for j in range(i + 1, ring.n):
            if omega[i].diff(ring.x(j)) != omega[j].diff(ring.x(i)):
                return False
    return True


def one_form_primitive(omega: list[Poly], ring: Ring) -> Poly:
    """A polynomial f with df = omega, via the radial homotopy formula.

    Every closed polynomial 1-form on R^n is exact; for a monomial component
    c x^a dx^i the homotopy integral contributes c x^(a+e_i) / (|a| + 1).
    """
    if not is_closed(omega, ring):
        raise StructureError("the 1-form is not closed")
    f = Poly.zero(ring)
    for i, w in enumerate(omega):
        for exp, c in w.terms.items():
            lifted = list(exp)
            lifted[ring.x(i)] += 1
            f = f + Poly.monomial(ring, tuple(lifted), rat(c) * rat(f"1/{sum(exp) + 1}"))
    for i in range(ring.n):
        if f.diff(ring.x(i)) != omega[i]:
            raise StructureError("primitive reconstruction failed")
    return f


def divergence_cocycle(a, omega: list[Poly], X: Poly) -> Poly:
    """The multiplication cocycle  X  |->  a div(X) + i_X omega  (xi-degree 0).

    omega must be a closed polynomial 1-form given by its components; the
    contraction reads the components X^i = dX/dxi_i off the degree-1 symbol.
    """
    check_vector_field(X)
    ring = X.ring
    if not is_closed(omega, ring):
        raise StructureError("divergence cocycle requires a closed 1-form")
    out = divergence(X).scale(rat(a))
    for i in range(ring.n):
        out = out + X.diff(ring.xi(i)) * omega[i]
    return out
