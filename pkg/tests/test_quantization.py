import random
from fractions import Fraction

import pytest

from cohomolab.cocycles import (
    OneCocycle,
    builtin_c1,
    builtin_c2,
    class_proportionality,
    coboundary_solve,
    cocycle_check,
    vanishes_on_affine,
)
from cohomolab.operators import divergence_diffop
from cohomolab.poly import Poly, StructureError, single_ring
from cohomolab.quantization import (
    DensityOperator,
    normal_order_section,
    operator_from_symbol_values,
    quantization_projected_cocycle,
    quantization_top_cocycle,
    right_order_section,
    sequence_cocycle,
    symmetrized_section,
    weighted_lie_derivative,
)
from cohomolab.symbols import hamiltonian_action, schouten_bracket, sl_generators

R2 = single_ring(2)


def x(i, ring=R2):
    return Poly.variable(ring, ring.x(i))


def xi(i, ring=R2):
    return Poly.variable(ring, ring.xi(i))


def random_field(rng, ring, max_x=3):
    out = Poly.zero(ring)
    for _ in range(rng.randint(1, 3)):
        exp = [0] * ring.nvars
        for _ in range(rng.randint(0, max_x)):
            exp[ring.x(rng.randrange(ring.n))] += 1
        exp[ring.xi(rng.randrange(ring.n))] += 1
        out = out + Poly.monomial(ring, tuple(exp), rng.randint(-5, 5))
    return out


def test_translation_lie_derivative():
    L = weighted_lie_derivative(xi(0), Fraction(3, 7))
    assert L == DensityOperator(2, Fraction(3, 7), {(1, 0): Poly.constant(R2, 1)})


def test_dilation_lie_derivative_weight_one():
    L = weighted_lie_derivative(x(0) * xi(0), 1)
    expected = DensityOperator(2, 1, {(1, 0): x(0), (0, 0): Poly.constant(R2, 1)})
    assert L == expected


def test_weight_zero_matches_symbol_action_on_functions():
    rng = random.Random(1)
    for _ in range(15):
        X = random_field(rng, R2)
        f = Poly.monomial(R2, (rng.randint(0, 3), rng.randint(0, 3), 0, 0),
                          rng.randint(-5, 5))
        assert weighted_lie_derivative(X, 0).apply(f) == hamiltonian_action(X, f)


def test_lie_derivative_is_lie_morphism():
    # every pair from the generator family together with random cubic fields
    rng = random.Random(2)
    lam = Fraction(2, 5)
    fam = sl_generators(2)
    fields = fam.all() + [random_field(rng, R2) for _ in range(20)]
    lie_ops = [weighted_lie_derivative(X, lam) for X in fields]
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            LB = weighted_lie_derivative(
                schouten_bracket(fields[i], fields[j]), lam)
            assert lie_ops[i].commutator(lie_ops[j]) == LB


def test_principal_symbol_examples():
    A = DensityOperator(2, 0, {(1, 1): Poly.constant(R2, 1)})
    assert A.principal_symbol(2) == xi(0) * xi(1)
    B = weighted_lie_derivative(x(0) * xi(0), 1)
    assert B.principal_symbol(1) == x(0) * xi(0)
    with pytest.raises(StructureError):
        A.principal_symbol(1)


def test_normal_order_examples():
    assert normal_order_section(xi(0) * xi(1), 0) == DensityOperator(
        2, 0, {(1, 1): Poly.constant(R2, 1)})
    assert normal_order_section(x(0) * xi(0) ** 2, 0) == DensityOperator(
        2, 0, {(2, 0): x(0)})


def test_sections_are_sections_and_linear():
    rng = random.Random(3)
    for section in (normal_order_section, right_order_section, symmetrized_section):
        for _ in range(12):
            k = rng.randint(0, 4)
            exp = [rng.randint(0, 2), rng.randint(0, 2), 0, 0]
            for _ in range(k):
                exp[2 + rng.randrange(2)] += 1
            P = Poly.monomial(R2, tuple(exp), rng.randint(-5, 5))
            Q = Poly.monomial(R2, tuple(exp[:2]) + (exp[3], exp[2]), rng.randint(-5, 5))
            assert section(P, 0).principal_symbol(k) == P
            assert section(P + Q, 0) == section(P, 0) + section(Q, 0)


def test_compose_matches_iterated_apply():
    rng = random.Random(4)
    for _ in range(40):
        def rand_dop():
            terms = {}
            for _ in range(rng.randint(1, 3)):
                a = (rng.randint(0, 2), rng.randint(0, 2))
                terms[a] = Poly.monomial(
                    R2, (rng.randint(0, 2), rng.randint(0, 2), 0, 0), rng.randint(-4, 4))
            return DensityOperator(2, 0, terms)

        A, B = rand_dop(), rand_dop()
        f = Poly.monomial(R2, (rng.randint(0, 4), rng.randint(0, 4), 0, 0), 3)
        assert A.compose(B).apply(f) == A.apply(B.apply(f))


def test_sequence_cocycle_vanishes_for_affine_fields():
    fam = sl_generators(2)
    P = Poly.monomial(R2, (1, 0, 2, 1))
    for lam in (0, Fraction(1, 2), Fraction(2, 3)):
        for G in fam.affine():
            assert sequence_cocycle(G, P, lam).is_zero()


def test_sequence_cocycle_order_drop():
    rng = random.Random(5)
    for _ in range(15):
        X = random_field(rng, R2)
        k = rng.randint(1, 4)
        exp = [rng.randint(0, 2), 0, 0, 0]
        for _ in range(k):
            exp[2 + rng.randrange(2)] += 1
        P = Poly.monomial(R2, tuple(exp))
        g = sequence_cocycle(X, P, Fraction(1, 3))
        assert g.order <= k - 1


def test_sequence_cocycle_frozen_quadratic_value():
    # n=2, k=2, weight 0: the top symbol on the first quadratic generator
    # applied to xi1^2 is -2 xi1, which is -1/2 times the Hessian
    # contraction value on the same input
    fam = sl_generators(2)
    P = xi(0) * xi(0)
    g = sequence_cocycle(fam.quadratic[0], P, 0)
    assert g.principal_symbol(1) == xi(0).scale(-2)
    from cohomolab.cocycles import builtin_gamma1_flat
    hess = builtin_gamma1_flat(2, 2).evaluate(fam.quadratic[0]).apply(P)
    assert hess == xi(0).scale(4)
    assert g.principal_symbol(1) == hess.scale(Fraction(-1, 2))


def test_top_cocycle_identity_and_affine_vanishing():
    for k in (2, 3):
        for lam in (0, Fraction(1, 2)):
            c = quantization_top_cocycle(2, k, lam)
            assert vanishes_on_affine(c)
            assert cocycle_check(c, 3).holds


def test_top_cocycle_nontrivial_away_from_half():
    D = divergence_diffop(R2)
    for k in (2, 3):
        for lam in (0, 1, Fraction(1, 3)):
            c = quantization_top_cocycle(2, k, lam)
            assert not coboundary_solve(c, [D], 3).is_coboundary


def test_top_cocycle_proportional_to_first_class():
    D = divergence_diffop(R2)
    # scalars are linear in the weight and vanish exactly at one half
    frozen = {(2, 0): Fraction(-3, 10), (2, 1): Fraction(3, 10),
              (2, Fraction(1, 3)): Fraction(-1, 10),
              (3, 0): Fraction(-3, 14), (3, 1): Fraction(3, 14),
              (3, Fraction(1, 3)): Fraction(-1, 14)}
    for k in (2, 3):
        for lam in (0, 1, Fraction(1, 3)):
            c = quantization_top_cocycle(2, k, lam)
            res = class_proportionality(c, builtin_c1(2, k), [D], 3)
            assert res is not None
            mu, _ = res
            assert mu == frozen[(k, lam)]
            assert mu != 0


def test_half_weight_splits_with_explicit_witness():
    D = divergence_diffop(R2)
    for k in (2, 3):
        c = quantization_top_cocycle(2, k, Fraction(1, 2))
        res = coboundary_solve(c, [D], 3)
        assert res.is_coboundary
        assert res.witness == D.scale(Fraction(-1, 2))


def test_projected_cocycle_is_nontrivial():
    D = divergence_diffop(R2)
    for k in (2, 3):
        witness = coboundary_solve(
            quantization_top_cocycle(2, k, Fraction(1, 2)), [D], 3).witness
        proj = quantization_projected_cocycle(2, k, Fraction(1, 2), witness)
        assert cocycle_check(proj, 3).holds
        assert not coboundary_solve(proj, [D.power(2)], 3).is_coboundary
        res = class_proportionality(proj, builtin_c2(2, k), [D.power(2)], 3)
        assert res is not None and res[0] != 0


def test_class_independent_of_section_choice():
    D = divergence_diffop(R2)
    for k in (2, 3):
        lam = Fraction(1, 3)
        c_left = quantization_top_cocycle(2, k, lam)
        c_sym = quantization_top_cocycle(2, k, lam, section=symmetrized_section)
        diff = OneCocycle(2, k, k - 1, "section-diff",
                          lambda X: c_left.evaluate(X) - c_sym.evaluate(X))
        assert coboundary_solve(diff, [D], 3).is_coboundary


def test_reconstruction_rejects_truncated_order():
    D = divergence_diffop(R2)

    def value(u, v):
        return D.apply(Poly.monomial(R2, tuple(u) + tuple(v)))

    with pytest.raises(StructureError):
        operator_from_symbol_values(2, 2, 1, value, max_x_order=0)
    rebuilt = operator_from_symbol_values(2, 2, 1, value, max_x_order=1)
    assert rebuilt.symbol_map(2) == D.symbol_map(2)
