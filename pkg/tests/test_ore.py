import random
from math import factorial

import pytest

from qhflag.ore import (
    OreOp,
    OreReductionError,
    left_buchberger,
    left_normal_form,
    parse_ore_op,
    standard_operator_basis,
)
from qhflag.poly import Poly, bvar, hvar, parse_poly, qvar
from qhflag.toda import quantum_relations, quantize


def Q(i):
    return Poly.variable(qvar(i))


H = Poly.variable(hvar())


def const_op(p, r):
    return OreOp(r, {(0,) * r: p})


def test_commutation_same_variable():
    d1 = OreOp.generator(1, 1)
    got = d1 * const_op(Q(1), 1)
    assert got == OreOp(1, {(1,): Q(1) * H, (0,): H * Q(1)})


def test_commutation_independent_variable():
    d1 = OreOp.generator(1, 2)
    got = d1 * const_op(Q(2), 2)
    assert got == OreOp(2, {(1, 0): Q(2) * H})


def test_double_application():
    # verified against the action on monomials: del(q1^a) = a q1^a
    d1 = OreOp.generator(1, 1)
    got = d1 * d1 * const_op(Q(1), 1)
    want = OreOp(
        1,
        {(2,): Q(1) * H ** 2, (1,): 2 * H ** 2 * Q(1), (0,): H ** 2 * Q(1)},
    )
    assert got == want


def test_action_on_q_monomials():
    # (h del_i) q^a = h a_i q^a + q^a (h del_i)
    rng = random.Random(31)
    for _ in range(25):
        a = (rng.randrange(4), rng.randrange(4))
        mono = Poly.from_exponents({qvar(1): a[0], qvar(2): a[1]})
        for i in (1, 2):
            got = OreOp.generator(i, 2) * const_op(mono, 2)
            e = tuple(1 if k == i - 1 else 0 for k in range(2))
            want = OreOp(2, {e: mono * H, (0, 0): a[i - 1] * H * mono})
            assert got == want


def random_op(rng, r=2):
    op = OreOp.zero(r)
    for _ in range(rng.randrange(4)):
        e = tuple(rng.randrange(3) for _ in range(r))
        coeff = Poly.from_exponents(
            {qvar(1): rng.randrange(2), qvar(2): rng.randrange(2), hvar(): rng.randrange(2)},
            rng.randrange(-4, 5),
        )
        op = op + OreOp(r, {e: coeff})
    return op


def test_mul_associative_randomised():
    rng = random.Random(41)
    for _ in range(30):
        a, b, c = (random_op(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_quantize_and_symbol_round_trip():
    for n in (2, 3, 4):
        rels = quantum_relations(n)
        for rel, op in zip(rels, quantize(rels)):
            assert op.symbol() == rel


def test_dform_round_trips():
    op = parse_ore_op("d1^2 - d1*d2 + d2^2 - q1 - q2", 2)
    assert OreOp.from_dform(op.to_dform(), 2) == op
    assert OreOp.from_json(op.to_json(), 2) == op
    assert parse_ore_op(str(op), 2) == op


def test_gl2_normal_form():
    basis = left_buchberger([parse_ore_op("d1^2 - q1", 1)])
    nf, hden = left_normal_form(parse_ore_op("d1^2", 1), basis)
    assert hden == 0
    assert nf == const_op(Q(1), 1)


def test_standard_monomial_is_fixed():
    basis = left_buchberger(quantize(quantum_relations(3)))
    p = OreOp.monomial((1, 1), 2)
    nf, hden = left_normal_form(p, basis)
    assert (nf, hden) == (p, 0)


def test_gl3_column_reduction():
    # reducing (h del_2) * (h^3 del_2^2 del_1) reproduces the last connection
    # column: degree-raising part (q1 q2 + q2^2, 0, 0, -q2, 2 q2, 0)
    basis = left_buchberger(quantize(quantum_relations(3)))
    op = OreOp.generator(2, 2) * OreOp.monomial((1, 2), 2)
    nf, hden = left_normal_form(op, basis)
    assert hden == 0
    coeffs = {e: c for e, c in nf.terms.items()}
    assert coeffs[(0, 0)] == Q(1) * Q(2) + Q(2) ** 2
    assert coeffs[(0, 2)] == -Q(2) * H ** 2
    assert coeffs[(1, 1)] == 2 * Q(2) * H ** 2
    assert coeffs[(1, 0)] == Q(2) * H ** 2  # the h-level layer above the 1/h part
    assert (0, 1) not in coeffs


def test_generators_reduce_to_zero():
    for n in (2, 3, 4):
        ops = quantize(quantum_relations(n))
        basis = left_buchberger(ops)
        for g in list(ops) + list(basis.generators):
            nf, hden = left_normal_form(g, basis)
            assert nf.is_zero() and hden == 0


def test_left_multiples_reduce_to_zero():
    rng = random.Random(53)
    ops = quantize(quantum_relations(3))
    basis = left_buchberger(ops)
    for _ in range(15):
        x = random_op(rng)
        g = ops[rng.randrange(2)]
        nf, _ = left_normal_form(x * g, basis)
        assert nf.is_zero()


def test_gl3_basis_and_shadows():
    basis = left_buchberger(quantize(quantum_relations(3)))
    ops_shadows = standard_operator_basis(basis)
    dforms = [str(op.to_dform()) for op, _ in ops_shadows]
    assert dforms == ["1", "d2", "d1", "d2^2", "d1*d2", "d1*d2^2"]
    shadows = [str(c) for _, c in ops_shadows]
    assert shadows == ["1", "b2", "b1", "b2^2", "b1*b2", "b1*b2^2"]


def test_gl4_staircase():
    basis = left_buchberger(quantize(quantum_relations(4)))
    exps = basis.standard_exponents()
    assert len(exps) == 24
    assert all(e[0] <= 1 and e[1] <= 2 and e[2] <= 3 for e in exps)
    assert exps[-1] == (1, 2, 3)


def test_quotient_rank_is_factorial():
    for n in (2, 3, 4, 5):
        basis = left_buchberger(quantize(quantum_relations(n)))
        assert len(basis.standard_exponents()) == factorial(n)


def test_bad_leading_coefficient_signals():
    # leading coefficient q1 * h cannot be divided by
    bad = OreOp(1, {(2,): Q(1) * H ** 2, (0,): Poly.one()})
    with pytest.raises(OreReductionError):
        left_buchberger([bad])


def test_h_denominator_tracking():
    # del_1^2 (without its h^2) reduces to q1 / h^2
    basis = left_buchberger([parse_ore_op("d1^2 - q1", 1)])
    bare = OreOp(1, {(2,): Poly.one()})
    nf, hden = left_normal_form(bare, basis)
    assert hden == 2
    assert nf == const_op(Q(1), 1)
