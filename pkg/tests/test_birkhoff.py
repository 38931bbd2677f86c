import pytest

from qhflag.birkhoff import (
    ConstantTermError,
    NotClosedError,
    diagonal_parts,
    gauge_check,
    integrate_closed_form,
    solve_order,
)
from qhflag.matrix import PolyMatrix, invert_unipotent
from qhflag.poly import Poly, parse_poly, qvar


def Q(i):
    return Poly.variable(qvar(i))


def test_solve_order_smallest_is_last_unknown():
    for m in range(3, 11):
        order = solve_order(m)
        assert order[0] == (m - 2, m)


def test_solve_order_m3():
    assert solve_order(3) == [(1, 3)]


def test_solve_order_m6_matches_display():
    # descending, the even-parity symbols read
    # Q1^[5] > Q2^[6] > Q1^[3] > Q2^[4] > Q3^[5] > Q4^[6]
    order = solve_order(6)
    even = [s for s in order if (s[1] - s[0]) % 2 == 0]
    assert list(reversed(even)) == [(1, 5), (2, 6), (1, 3), (2, 4), (3, 5), (4, 6)]
    assert len(order) == 10  # odd-parity symbols are solved (to zero) as well


def test_diagonal_parts_identity(gl3):
    parts = diagonal_parts(PolyMatrix.identity(6), gl3.context)
    assert list(parts) == [0]
    assert parts[0] == PolyMatrix.identity(6)


def test_diagonal_parts_of_omega(gl3):
    cd = gl3.connection
    assert sorted(diagonal_parts(cd.omega[0], gl3.context)) == [-1, 1, 3]
    assert sorted(diagonal_parts(cd.omega[1], gl3.context)) == [-1, 1, 3]
    # theta^(0) is supported on (and above) block diagonal 2
    assert all(k >= 2 for k in diagonal_parts(cd.thetas[0][1], gl3.context))
    total = PolyMatrix.zero(6, 6)
    for part in diagonal_parts(cd.omega[0], gl3.context).values():
        total = total + part
    assert total == cd.omega[0]


def test_integrate_zero():
    z = PolyMatrix.zero(2, 2)
    assert integrate_closed_form([z, z]).is_zero()


def test_integrate_single_monomial():
    e = PolyMatrix(2, 2, {(0, 1): Poly.one()})
    a2 = e.scale(Q(2))
    got = integrate_closed_form([PolyMatrix.zero(2, 2), a2])
    assert got == a2  # q2 integrates to q2 along the second axis


def test_integrate_mixed_monomial():
    # coefficients 2*q1^2*q2 and q1^2*q2 are the two logarithmic derivatives
    # of q1^2*q2, axis consistency included
    e = PolyMatrix(1, 1, {(0, 0): Poly.one()})
    mono = Q(1) ** 2 * Q(2)
    got = integrate_closed_form([e.scale(2 * mono), e.scale(mono)])
    assert got == e.scale(mono)


def test_integrate_rejects_unclosed():
    e = PolyMatrix(1, 1, {(0, 0): Poly.one()})
    with pytest.raises(NotClosedError):
        integrate_closed_form([e.scale(Q(2)), PolyMatrix.zero(1, 1)])


def test_integrate_rejects_constant_term():
    e = PolyMatrix(1, 1, {(0, 0): Poly.one()})
    with pytest.raises(ConstantTermError):
        integrate_closed_form([e, PolyMatrix.zero(1, 1)])


def test_gl2_factor_trivial(gl2):
    lp = gl2.lplus
    assert lp.q0 == PolyMatrix.identity(2)
    assert lp.qs == []


def test_gl3_factor(gl3):
    lp = gl3.lplus
    assert all(q.is_zero() for q in lp.qs)
    expected = PolyMatrix.identity(6) + PolyMatrix(6, 6, {(0, 3): Q(2), (2, 5): Q(2)})
    assert lp.q0 == expected
    # Q0 is exactly I + the 2-diagonal slice of the h-layer's second direction
    assert lp.q0 - PolyMatrix.identity(6) == gl3.connection.thetas[0][1]


def test_gl3_q0_inverse(gl3):
    inv = gl3.lplus.q0_inverse()
    assert inv == PolyMatrix.identity(6) - PolyMatrix(6, 6, {(0, 3): Q(2), (2, 5): Q(2)})
    assert inv @ gl3.lplus.q0 == PolyMatrix.identity(6)


def test_gl4_factor_vanishing_pattern(gl4):
    lp = gl4.lplus
    ctx = gl4.context
    assert [i + 1 for i, q in enumerate(lp.qs) if q] == [1]
    q1 = lp.qs[0]
    # Q1 is supported on block diagonal 3 and integrates theta^(1)'s 3-slice
    from qhflag.birkhoff import diagonal_slice

    assert q1 == diagonal_slice(q1, ctx, 3)
    theta1 = gl4.connection.thetas[1]
    for axis in range(3):
        assert q1.t_derivative(axis + 1) == diagonal_slice(theta1[axis], ctx, 3)


def test_gl2_gauge_is_identity(gl2):
    result = gauge_check(gl2.lplus, gl2.connection)
    assert result.report.ok
    assert result.omega_hat[0] == gl2.connection.omega[0]


def test_gauge_integrability(gl3, gl4):
    for pipe in (gl3, gl4):
        hat = pipe.omega_hat
        for i in range(pipe.r):
            for j in range(i + 1, pipe.r):
                assert hat[j].t_derivative(i + 1) == hat[i].t_derivative(j + 1)


def test_invert_unipotent_rejects_non_unipotent():
    with pytest.raises(ValueError):
        invert_unipotent(PolyMatrix(2, 2, {(0, 0): Poly.rational(2), (1, 1): Poly.one()}))


def test_basepoint_conditions(gl3, gl4):
    for pipe in (gl3, gl4):
        lp = pipe.lplus
        qzero = {qvar(i): 0 for i in range(1, pipe.n)}
        assert lp.q0.substitute(qzero) == PolyMatrix.identity(pipe.context.size)
        for q in lp.qs:
            assert q.substitute(qzero).is_zero()
