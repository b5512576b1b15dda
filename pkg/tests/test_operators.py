import random
from fractions import Fraction
from itertools import product

import pytest

from cohomolab.poly import Poly, StructureError, single_ring
from cohomolab.operators import (
    PolyDiffOp,
    affine_equivariant_basis,
    divergence_diffop,
    euler_diffop,
    lie_derivative_op,
    module_action,
    monomials_up_to,
    op_str,
    parse_op,
    xi_simplex,
)
from cohomolab.symbols import div_op, sl_generators

R2 = single_ring(2)
R3 = single_ring(3)


def x(i, ring=R2):
    return Poly.variable(ring, ring.x(i))


def xi(i, ring=R2):
    return Poly.variable(ring, ring.xi(i))


def random_op(rng, ring, max_order=2, max_coeff_degree=2):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        mu = [0] * ring.nvars
        for _ in range(rng.randint(0, max_order)):
            mu[rng.randrange(ring.nvars)] += 1
        exp = [0] * ring.nvars
        for _ in range(rng.randint(0, max_coeff_degree)):
            exp[rng.randrange(ring.nvars)] += 1
        coeff = Poly.monomial(ring, tuple(exp), rng.randint(-5, 5))
        key = tuple(mu)
        terms[key] = terms.get(key, Poly.zero(ring)) + coeff
    return PolyDiffOp(ring, terms)


def random_poly(rng, ring, max_degree=4):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        exp = [0] * ring.nvars
        for _ in range(rng.randint(0, max_degree)):
            exp[rng.randrange(ring.nvars)] += 1
        terms[tuple(exp)] = rng.randint(-7, 7)
    return Poly(ring, terms)


def test_identity_application():
    rng = random.Random(1)
    A = PolyDiffOp.identity(R2)
    for _ in range(10):
        p = random_poly(rng, R2)
        assert A.apply(p) == p


def test_divergence_operator_matches_div_op():
    D = divergence_diffop(R2)
    p = x(0) * xi(0) * xi(0)
    assert D.apply(p) == xi(0).scale(2)
    rng = random.Random(2)
    for _ in range(20):
        q = random_poly(rng, R2)
        assert D.apply(q) == div_op(q)


def test_coefficient_times_derivative():
    A = PolyDiffOp.single(R2, xi(0), (0, 0, 1, 0))
    assert A.apply(xi(0) * xi(1)) == xi(0) * xi(1)


def test_euler_squared_eigenvalue():
    E = euler_diffop(R2)
    assert E.compose(E).apply(xi(0) * xi(1)) == (xi(0) * xi(1)).scale(4)


def test_commutator_euler_divergence_normal_form():
    for ring in (R2, R3):
        E, D = euler_diffop(ring), divergence_diffop(ring)
        assert E.commutator(D) == -D


def test_self_commutator_vanishes():
    rng = random.Random(3)
    for _ in range(10):
        A = random_op(rng, R2)
        assert A.commutator(A).is_zero()


def test_compose_agrees_with_iterated_apply():
    rng = random.Random(4)
    for _ in range(100):
        A = random_op(rng, R2)
        B = random_op(rng, R2)
        P = random_poly(rng, R2)
        assert A.compose(B).apply(P) == A.apply(B.apply(P))


def test_normalization_is_order_independent():
    rng = random.Random(6)
    for _ in range(10):
        parts = [random_op(rng, R2) for _ in range(4)]
        forward = PolyDiffOp.zero(R2)
        for p in parts:
            forward = forward + p
        backward = PolyDiffOp.zero(R2)
        for p in reversed(parts):
            backward = backward + p
        assert forward == backward


def test_lie_derivative_operator_matches_bracket():
    from cohomolab.symbols import hamiltonian_action

    rng = random.Random(7)
    for _ in range(20):
        X = Poly.zero(R2)
        for _ in range(3):
            exp = [0] * 4
            for _ in range(rng.randint(0, 3)):
                exp[rng.randrange(2)] += 1
            exp[2 + rng.randrange(2)] += 1
            X = X + Poly.monomial(R2, tuple(exp), rng.randint(-5, 5))
        P = random_poly(rng, R2)
        assert lie_derivative_op(X).apply(P) == hamiltonian_action(X, P)


def test_module_action_on_identity_is_zero():
    fam = sl_generators(2)
    I = PolyDiffOp.identity(R2)
    for X in fam.all():
        assert module_action(X, I, 2, 2).is_zero()


def test_module_action_translation_on_divergence_is_zero():
    D = divergence_diffop(R2)
    assert module_action(xi(0), D, 2, 1).is_zero()


def relation_rhs(ring, i):
    E = euler_diffop(ring)
    I = PolyDiffOp.identity(ring)
    dxi = PolyDiffOp.derivative(ring, ring.xi(i))
    return (E.scale(2) + I.scale(ring.n + 1)).compose(dxi)


def test_quadratic_commutation_relation_normal_form():
    for ring in (R2, R3):
        fam = sl_generators(ring.n)
        D = divergence_diffop(ring)
        for i in range(ring.n):
            L = lie_derivative_op(fam.quadratic[i])
            assert L.compose(D) - D.compose(L) == relation_rhs(ring, i)


def test_quadratic_commutation_relation_on_monomials():
    ring = R2
    fam = sl_generators(2)
    D = divergence_diffop(ring)
    L = lie_derivative_op(fam.quadratic[0])
    lhs = L.compose(D) - D.compose(L)
    rhs = relation_rhs(ring, 0)
    for exp in product(range(7), repeat=4):
        if sum(exp) > 6:
            continue
        m = Poly.monomial(ring, exp)
        assert lhs.apply(m) == rhs.apply(m)


def test_relation_worked_instance():
    # n=2, i=1, applied to xi1: both sides give 3
    ring = R2
    fam = sl_generators(2)
    D = divergence_diffop(ring)
    L = lie_derivative_op(fam.quadratic[0])
    val = L.apply(D.apply(xi(0))) - D.apply(L.apply(xi(0)))
    assert val == Poly.constant(ring, 3)
    assert relation_rhs(ring, 0).apply(xi(0)) == Poly.constant(ring, 3)


def test_module_action_matches_relation():
    for ring in (R2, R3):
        fam = sl_generators(ring.n)
        D = divergence_diffop(ring)
        for k in (2, 3):
            got = module_action(fam.quadratic[0], D, k, k - 1)
            assert got == relation_rhs(ring, 0)


def test_module_action_lie_axiom():
    # every pair from the generator family together with 20 random cubic fields
    rng = random.Random(11)
    fam = sl_generators(2)
    fields = fam.all()
    for _ in range(20):
        exp = [0] * 4
        for _ in range(3):
            exp[rng.randrange(2)] += 1
        exp[2 + rng.randrange(2)] += 1
        fields.append(Poly.monomial(R2, tuple(exp), rng.randint(1, 5)))
    from cohomolab.symbols import schouten_bracket

    A = divergence_diffop(R2)
    k, ell = 2, 1
    actions = [module_action(X, A, k, ell) for X in fields]
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            X, Y = fields[i], fields[j]
            lhs = (module_action(X, actions[j], k, ell, check_contract=False)
                   - module_action(Y, actions[i], k, ell, check_contract=False))
            rhs = module_action(schouten_bracket(X, Y), A, k, ell)
            assert lhs.symbol_map(k) == rhs.symbol_map(k)


def test_symbol_map_apply_matches_operator_apply():
    rng = random.Random(19)
    for _ in range(25):
        A = random_op(rng, R2)
        k = rng.randint(0, 3)
        sm = A.symbol_map(k)
        exp = [rng.randint(0, 3), rng.randint(0, 3), 0, 0]
        for _ in range(k):
            exp[2 + rng.randrange(2)] += 1
        P = Poly.monomial(R2, tuple(exp), rng.randint(-4, 4))
        assert sm.apply(P) == A.apply(P)


def test_symbol_map_identifies_euler_with_scalar():
    E = euler_diffop(R2)
    I = PolyDiffOp.identity(R2)
    for k in (0, 1, 2, 3):
        assert E.symbol_map(k) == I.scale(k).symbol_map(k)
    assert E.symbol_map(2) != I.symbol_map(2)


def test_symbol_map_detects_degree_contract():
    D = divergence_diffop(R2)
    assert D.symbol_map(3).output_degrees() == {2}
    with pytest.raises(StructureError):
        module_action(xi(0), D, 3, 1)


def test_affine_basis_is_divergence_power():
    for n in (2, 3):
        ring = single_ring(n)
        D = divergence_diffop(ring)
        for (k, ell, r) in [(2, 1, 3), (3, 1, 4), (3, 2, 2)]:
            basis = affine_equivariant_basis(n, k, ell, r)
            assert len(basis) == 1
            sm = basis[0].symbol_map(k)
            target = D.power(k - ell).symbol_map(k)
            # proportional as maps on degree-k symbols
            key = next(iter(target.entries))
            ratio = Fraction(sm.entries[key]) / Fraction(target.entries[key])
            assert sm == D.power(k - ell).scale(ratio).symbol_map(k)


def test_affine_basis_order_zero_contains_identity():
    basis = affine_equivariant_basis(2, 2, 2, 0)
    assert len(basis) == 1
    I = PolyDiffOp.identity(R2)
    sm = basis[0].symbol_map(2)
    key = next(iter(sm.entries))
    ratio = sm.entries[key]
    assert sm == I.scale(ratio).symbol_map(2)


def test_divergence_power_is_not_projectively_equivariant():
    # the assertable form of the no-equivariant-operator lemma
    for n in (2, 3):
        fam = sl_generators(n)
        D = divergence_diffop(single_ring(n))
        for k, ell in [(2, 1), (3, 1), (3, 2)]:
            B = D.power(k - ell)
            assert any(not module_action(Xq, B, k, ell).symbol_map(k).is_zero()
                       for Xq in fam.quadratic)


def test_op_str_roundtrip():
    rng = random.Random(13)
    for _ in range(20):
        A = random_op(rng, R2)
        assert parse_op(R2, op_str(A)) == A
    assert parse_op(R2, op_str(PolyDiffOp.zero(R2))).is_zero()


def test_simplex_enumeration():
    assert xi_simplex(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert len(xi_simplex(3, 5)) == 21
    assert len(monomials_up_to(2, 3)) == 10
