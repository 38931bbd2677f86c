from qhflag.poly import Poly, bvar, parse_poly, qvar
from qhflag.toda import (
    classical_relations,
    quantize,
    quantum_relations,
    toda_matrix,
    char_coefficients,
)


def B(i):
    return Poly.variable(bvar(i))


def Q(i):
    return Poly.variable(qvar(i))


def test_matrix_n2():
    tm = toda_matrix(2)
    z = tm.entries
    assert z[0, 0] == B(1) and z[1, 1] == -B(1)
    assert z[0, 1] == Q(1) and z[1, 0] == Poly.rational(-1)


def test_matrix_n3():
    z = toda_matrix(3).entries
    assert [z[i, i] for i in range(3)] == [B(1), B(2) - B(1), -B(2)]
    assert z[0, 1] == Q(1) and z[1, 2] == Q(2)
    assert z[1, 0] == Poly.rational(-1) and z[2, 1] == Poly.rational(-1)
    assert z[0, 2].is_zero() and z[2, 0].is_zero()


def test_trace_vanishes():
    for n in range(2, 6):
        z = toda_matrix(n).entries
        trace = sum((z[i, i] for i in range(n)), Poly.zero())
        assert trace.is_zero()
        # equivalently the lambda^(n-1) coefficient of the characteristic poly
        assert char_coefficients(toda_matrix(n))[n - 1].is_zero()


def test_relations_n2():
    assert quantum_relations(2) == [parse_poly("b1^2 - q1")]


def test_relations_n3_match_display():
    r1, r2 = quantum_relations(3)
    assert r1 == parse_poly("b1^2 + b2^2 - b1*b2 - q1 - q2")
    assert r2 == parse_poly("b1*b2^2 - b1^2*b2 + q1*b2 - q2*b1")


def test_relation_degrees():
    for n in range(2, 6):
        rels = quantum_relations(n)
        assert len(rels) == n - 1
        for i, rel in enumerate(rels, 1):
            assert rel.is_homogeneous(2 * (i + 1))


def test_relation_q_part_n3():
    r1, _ = quantum_relations(3)
    specialised = r1.substitute({bvar(1): 0, bvar(2): 0})
    assert specialised == -Q(1) - Q(2)


def test_quantize_displays():
    from qhflag.ore import parse_ore_op

    ops = quantize(quantum_relations(3))
    assert ops[0] == parse_ore_op("d1^2 + d2^2 - d1*d2 - q1 - q2", 2)
    assert ops[1] == parse_ore_op("d1*d2^2 - d1^2*d2 + q1*d2 - q2*d1", 2)
    assert quantize(quantum_relations(2))[0] == parse_ore_op("d1^2 - q1", 1)


def test_symbol_inverts_quantize():
    for n in (2, 3, 4, 5):
        rels = quantum_relations(n)
        assert [op.symbol() for op in quantize(rels)] == rels


def test_classical_quotient_dimension():
    from math import factorial

    from qhflag.grobner import buchberger

    for n in (2, 3, 4):
        gb = buchberger(classical_relations(n), n - 1)
        assert len(gb.standard_monomials()) == factorial(n)
