"""Differential operators with polynomial coefficients on symbol spaces.

A PolyDiffOp is stored in normal form: a sparse sum of terms

    coefficient(x, xi) * d^mu,       mu a multi-index over all ring variables,

with all derivatives to the right of coefficients.  Composition re-expands
through the Leibniz rule, so operator equality is decidable by comparing
term maps.

Operators acting on the finite-dimensional xi-monomial slice of fixed degree
k admit an exact canonical form (SymbolMap below): the xi-part becomes a
matrix over the degree-k exponent simplex while the x-part keeps its faithful
normal form.  Two operators agree as maps on degree-k symbols if and only if
their SymbolMaps are equal, which turns every identity check in this package
into a finite exact comparison rather than a sampled one.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from .poly import (
    Coeff,
    Exponent,
    Poly,
    ResourceLimitError,
    Ring,
    StructureError,
    check_term_budget,
    check_vector_field,
    norm_coeff,
    poly_str,
    rat,
    single_ring,
)

Deriv = tuple[int, ...]


def xi_simplex(n: int, k: int) -> list[Exponent]:
    """All xi-exponent tuples of total degree k, in lexicographic order."""
    if k == 0:
        return [(0,) * n]
    out = []
    for combo in combinations_with_replacement(range(n), k):
        exp = [0] * n
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    return sorted(set(out))


def monomials_up_to(n: int, d: int) -> list[Exponent]:
    """All exponent tuples in n variables of total degree <= d, lexicographic."""
    out: list[Exponent] = []
    for k in range(d + 1):
        out.extend(xi_simplex(n, k))
    return sorted(set(out))


def falling(v: Exponent, beta: Exponent) -> int:
    """Product of falling factorials v_i (v_i - 1) ... (v_i - beta_i + 1)."""
    out = 1
    for vi, bi in zip(v, beta):
        for step in range(bi):
            out *= vi - step
            if out == 0:
                return 0
    return out


def multi_binom(mu: Deriv, nu: Deriv) -> int:
    out = 1
    for m, s in zip(mu, nu):
        out *= comb(m, s)
    return out


def _sub_multi_indices(mu: Deriv):
    """All nu <= mu componentwise, including 0 and mu."""
    if not mu:
        yield ()
        return
    head, rest = mu[0], mu[1:]
    for tail in _sub_multi_indices(rest):
        for h in range(head + 1):
            yield (h,) + tail


@lru_cache(maxsize=None)
def _leibniz_subsets(mu: Deriv) -> tuple:
    """Triples (nu, binom(mu, nu), |nu|) for all nu <= mu, ordered by |nu|.

    The ordering lets composition stop scanning once |nu| exceeds the degree
    of the coefficient being differentiated.
    """
    subs = [(nu, multi_binom(mu, nu), sum(nu)) for nu in _sub_multi_indices(mu)]
    subs.sort(key=lambda t: (t[2], t[0]))
    return tuple(subs)


class PolyDiffOp:
    """A differential operator in normal form with Poly coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: dict[Deriv, Poly], *, _clean: bool = False):
        self.ring = ring
        if _clean:
            self.terms = terms
        else:
            clean: dict[Deriv, Poly] = {}
            for mu, coeff in terms.items():
                if len(mu) != ring.nvars or any(e < 0 for e in mu):
                    raise StructureError(f"bad derivative multi-index {mu}")
                if coeff.ring != ring:
                    raise StructureError("coefficient ring mismatch")
                if not coeff.is_zero():
                    clean[tuple(mu)] = coeff
            self.terms = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(ring: Ring) -> "PolyDiffOp":
        return PolyDiffOp(ring, {}, _clean=True)

    @staticmethod
    def identity(ring: Ring) -> "PolyDiffOp":
        return PolyDiffOp(ring, {(0,) * ring.nvars: Poly.constant(ring, 1)}, _clean=True)

    @staticmethod
    def single(ring: Ring, coeff: Poly, deriv: Deriv) -> "PolyDiffOp":
        return PolyDiffOp(ring, {tuple(deriv): coeff})

    @staticmethod
    def derivative(ring: Ring, var: int) -> "PolyDiffOp":
        mu = [0] * ring.nvars
        mu[var] = 1
        return PolyDiffOp(ring, {tuple(mu): Poly.constant(ring, 1)}, _clean=True)

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def order(self) -> int:
        return max((sum(mu) for mu in self.terms), default=0)

    def x_order(self) -> int:
        n = self.ring.n
        return max((sum(mu[:n]) for mu in self.terms), default=0)

    def __add__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        if self.ring != other.ring:
            raise StructureError("operator ring mismatch")
        out = dict(self.terms)
        for mu, coeff in other.terms.items():
            s = out.get(mu)
            s = coeff if s is None else s + coeff
            if s.is_zero():
                out.pop(mu, None)
            else:
                out[mu] = s
        return PolyDiffOp(self.ring, out, _clean=True)

    def __sub__(self, other: "PolyDiffOp") -> "PolyDiffOp":
        return self + other.scale(-1)

    def __neg__(self) -> "PolyDiffOp":
        return self.scale(-1)

    def scale(self, c) -> "PolyDiffOp":
        c = rat(c)
        if c == 0:
            return PolyDiffOp.zero(self.ring)
        return PolyDiffOp(self.ring,
                          {mu: coeff.scale(c) for mu, coeff in self.terms.items()},
                          _clean=True)

    def scale_poly(self, p: Poly) -> "PolyDiffOp":
        out = {mu: p * coeff for mu, coeff in self.terms.items()}
        return PolyDiffOp(self.ring, out)

    # -- action and composition ----------------------------------------------

    def apply(self, p: Poly) -> Poly:
        if p.ring is not self.ring and p.ring != self.ring:
            raise StructureError("operand ring mismatch")
        acc: dict[Deriv, Coeff] = {}
        for mu, coeff in self.terms.items():
            d = p.diff_multi(mu)
            if not d.terms:
                continue
            for exp, c in (coeff * d).terms.items():
                s = acc.get(exp, 0) + c
                if s == 0:
                    acc.pop(exp, None)
                else:
                    acc[exp] = s
        return Poly(self.ring,
                    {e: norm_coeff(c) for e, c in acc.items()}, _clean=True)

    def compose(self, other: "PolyDiffOp") -> "PolyDiffOp":
        """Normal form of self o other via the Leibniz expansion."""
        if self.ring != other.ring:
            raise StructureError("operator ring mismatch")
        out: dict[Deriv, Poly] = {}
        for mu, f in self.terms.items():
            subs = _leibniz_subsets(mu)
            for nu, g in other.terms.items():
                gdeg = g.total_degree()
                for sub, b, sub_total in subs:
                    if sub_total > gdeg:
                        break
                    dg = g.diff_multi(sub)
                    if dg.is_zero():
                        continue
                    coeff = f * dg
                    if b != 1:
                        coeff = coeff.scale(b)
                    key = tuple(m - s + nn for m, s, nn in zip(mu, sub, nu))
                    prev = out.get(key)
                    out[key] = coeff if prev is None else prev + coeff
        check_term_budget(len(out))
        return PolyDiffOp(self.ring,
                          {k: v for k, v in out.items() if not v.is_zero()},
                          _clean=True)

    def commutator(self, other: "PolyDiffOp") -> "PolyDiffOp":
        return self.compose(other) - other.compose(self)

    def power(self, k: int) -> "PolyDiffOp":
        out = PolyDiffOp.identity(self.ring)
        for _ in range(k):
            out = out.compose(self)
        return out

    # -- canonical form on a fixed symbol degree ------------------------------

    def symbol_map(self, k: int) -> "SymbolMap":
        return SymbolMap.from_operator(self, k)

    def __repr__(self) -> str:
        return f"PolyDiffOp({op_str(self)})"


class SymbolMap:
    """Exact canonical form of an operator restricted to degree-k symbols.

    Entries map (v, w, alpha, a) -> coefficient, encoding the rule

        x^u xi^v  |->  sum  coeff * x^a * d^alpha(x^u) * xi^w .

    The x-part keeps its faithful normal form (a, alpha); the xi-part is a
    matrix over the exponent simplices.  Equality of SymbolMaps is equality
    of the underlying maps on all symbols of degree k.
    """

    __slots__ = ("n", "k", "entries")

    def __init__(self, n: int, k: int, entries: dict):
        self.n = n
        self.k = k
        self.entries = {key: c for key, c in entries.items() if c != 0}

    @staticmethod
    def from_operator(op: PolyDiffOp, k: int) -> "SymbolMap":
        ring = op.ring
        if ring.doubled:
            raise StructureError("symbol maps are single-ring objects")
        n = ring.n
        entries: dict = {}
        simplex = xi_simplex(n, k)
        for mu, coeff in op.terms.items():
            alpha, beta = mu[:n], mu[n:]
            for exp, c in coeff.terms.items():
                a, b = exp[:n], exp[n:]
                for v in simplex:
                    fac = falling(v, beta)
                    if fac == 0:
                        continue
                    w = tuple(vi - bi + bbi for vi, bi, bbi in zip(v, beta, b))
                    key = (v, w, alpha, a)
                    s = entries.get(key, 0) + c * fac
                    if s == 0:
                        entries.pop(key, None)
                    else:
                        entries[key] = norm_coeff(s)
        return SymbolMap(n, k, entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolMap):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and self.entries == other.entries

    def __sub__(self, other: "SymbolMap") -> "SymbolMap":
        if (self.n, self.k) != (other.n, other.k):
            raise StructureError("symbol map shape mismatch")
        out = dict(self.entries)
        for key, c in other.entries.items():
            s = out.get(key, 0) - c
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = norm_coeff(s)
        return SymbolMap(self.n, self.k, out)

    def output_degrees(self) -> set[int]:
        return {sum(w) for (_, w, _, _) in self.entries}

    def apply(self, p: Poly) -> Poly:
        """Evaluate the map on a degree-k symbol (for spot checks)."""
        ring = p.ring
        out = Poly.zero(ring)
        for exp, c in p.terms.items():
            u, v = exp[:self.n], exp[self.n:]
            for (vv, w, alpha, a), coeff in self.entries.items():
                if vv != v:
                    continue
                fac = falling(u, alpha)
                if fac == 0:
                    continue
                new_x = tuple(ui - al + ai for ui, al, ai in zip(u, alpha, a))
                out = out + Poly.monomial(ring, new_x + w, rat(c) * rat(coeff) * fac)
        return out


def op_str(op: PolyDiffOp) -> str:
    """Canonical operator text: '(coeff) * dx1 * dxi2^2' terms in derivative order."""
    if not op.terms:
        return "(0)"
    parts = []
    for mu in sorted(op.terms):
        factors = [f"({poly_str(op.terms[mu])})"]
        for idx, e in enumerate(mu):
            if e == 0:
                continue
            name = "d" + op.ring.var_name(idx)
            factors.append(name if e == 1 else f"{name}^{e}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


def parse_op(ring: Ring, text: str) -> PolyDiffOp:
    """Parse the canonical operator text form produced by op_str."""
    from .poly import parse_poly

    terms: dict[Deriv, Poly] = {}
    for part in text.split(" + ("):
        part = part.strip()
        if not part.startswith("("):
            part = "(" + part
        close = part.rindex(")")
        coeff = parse_poly(ring, part[1:close])
        mu = [0] * ring.nvars
        rest = part[close + 1:].strip()
        if rest:
            for factor in rest.split("*"):
                factor = factor.strip()
                if not factor:
                    continue
                if "^" in factor:
                    name, e = factor.split("^")
                    mu[ring.var_index(name[1:])] += int(e)
                else:
                    mu[ring.var_index(factor[1:])] += 1
        key = tuple(mu)
        prev = terms.get(key)
        terms[key] = coeff if prev is None else prev + coeff
    return PolyDiffOp(ring, terms)


# -- standard operators ------------------------------------------------------


def euler_diffop(ring: Ring) -> PolyDiffOp:
    """E = xi_i d/dxi_i as a normal-form operator."""
    terms: dict[Deriv, Poly] = {}
    for i in range(ring.n):
        mu = [0] * ring.nvars
        mu[ring.xi(i)] = 1
        terms[tuple(mu)] = Poly.variable(ring, ring.xi(i))
    return PolyDiffOp(ring, terms)


def divergence_diffop(ring: Ring) -> PolyDiffOp:
    """D = (d/dx^i)(d/dxi_i) as a normal-form operator."""
    terms: dict[Deriv, Poly] = {}
    one = Poly.constant(ring, 1)
    for i in range(ring.n):
        mu = [0] * ring.nvars
        mu[ring.x(i)] = 1
        mu[ring.xi(i)] = 1
        terms[tuple(mu)] = one
    return PolyDiffOp(ring, terms)


def lie_derivative_op(X: Poly) -> PolyDiffOp:
    """The Hamiltonian vector field of a degree-1 symbol, as an operator."""
    check_vector_field(X)
    ring = X.ring
    op = PolyDiffOp.zero(ring)
    for i in range(ring.n):
        cx = X.diff(ring.xi(i))
        if not cx.is_zero():
            op = op + PolyDiffOp.single(ring, cx, _unit(ring, ring.x(i)))
        cxi = X.diff(ring.x(i))
        if not cxi.is_zero():
            op = op + PolyDiffOp.single(ring, -cxi, _unit(ring, ring.xi(i)))
    return op


def _unit(ring: Ring, var: int) -> Deriv:
    mu = [0] * ring.nvars
    mu[var] = 1
    return tuple(mu)


def module_action(X: Poly, A: PolyDiffOp, k: int, ell: int,
                  *, check_contract: bool = True) -> PolyDiffOp:
    """The vector-field action X.A = L_X o A - A o L_X on maps S_k -> S_ell."""
    if X.ring != A.ring:
        raise StructureError("ring mismatch in module action")
    if check_contract:
        degrees = A.symbol_map(k).output_degrees()
        if not degrees <= {ell}:
            raise StructureError(
                f"operator does not map degree {k} to degree {ell}: outputs {sorted(degrees)}")
    L = lie_derivative_op(X)
    return L.compose(A) - A.compose(L)


def affine_equivariant_basis(n: int, k: int, ell: int, max_order: int,
                             *, max_candidates: int = 60_000) -> list[PolyDiffOp]:
    """Exact basis of the affine-equivariant operators from degree-k to degree-ell symbols.

    Candidates are constant-coefficient terms xi^b d_x^alpha d_xi^beta of
    total order <= max_order with the degree bookkeeping |b| - |beta| =
    ell - k.  Equivariance under translations holds term by term; the
    commutators with the linear generators x^i d/dx^j are imposed exactly
    through the degree-k canonical form, and the resulting solution space is
    reduced to operators that are independent as maps on degree-k symbols.
    """
    from .linalg import RowReducer, nullspace

    if k < 0 or ell < 0:
        raise StructureError("symbol degrees must be nonnegative")
    ring = single_ring(n)
    shift = ell - k
    candidates: list[PolyDiffOp] = []
    for total in range(max_order + 1):
        for alpha in monomials_up_to(n, total):
            rem = total - sum(alpha)
            for beta in xi_simplex(n, rem) if rem <= k else []:
                bdeg = shift + sum(beta)
                if bdeg < 0:
                    continue
                for b in xi_simplex(n, bdeg):
                    coeff = Poly.monomial(ring, (0,) * n + b)
                    candidates.append(
                        PolyDiffOp.single(ring, coeff, alpha + beta))
    # drop duplicate normal forms arising from the order-stratified loop
    seen = set()
    unique = []
    for cand in candidates:
        key = next(iter(cand.terms.items()))
        sig = (key[0], frozenset(key[1].terms.items()))
        if sig not in seen:
            seen.add(sig)
            unique.append(cand)
    candidates = unique
    if len(candidates) > max_candidates:
        raise ResourceLimitError(
            f"{len(candidates)} candidate terms exceed the cap {max_candidates}")

    gens: list[Poly] = []
    for i in range(n):
        gens.append(Poly.variable(ring, ring.xi(i)))
    for i in range(n):
        for j in range(n):
            gens.append(Poly.variable(ring, ring.x(i)) * Poly.variable(ring, ring.xi(j)))

    rows: dict = {}
    for col, cand in enumerate(candidates):
        for g_idx, X in enumerate(gens):
            defect = module_action(X, cand, k, ell, check_contract=False).symbol_map(k)
            for key, c in defect.entries.items():
                rows.setdefault((g_idx, key), {})[col] = c
    solution = nullspace(list(rows.values()), len(candidates))

    # reduce to operators independent as maps on degree-k symbols
    basis: list[PolyDiffOp] = []
    reducer = RowReducer(0)
    key_index: dict = {}
    for vec in solution:
        op = PolyDiffOp.zero(ring)
        for col, c in enumerate(vec):
            if c != 0:
                op = op + candidates[col].scale(c)
        sm = op.symbol_map(k)
        if sm.is_zero():
            continue
        row = {}
        for key, c in sm.entries.items():
            idx = key_index.setdefault(key, len(key_index))
            row[idx] = c
        reducer.ncols = len(key_index)
        if reducer.add_row(row):
            basis.append(op)
    return basis
