import pytest

from qhflag.connection import (
    ConnectionCheckError,
    ConnectionData,
    FlagContext,
    check_structure,
    connection_matrices,
    flatness_check,
    poincare_block_sizes,
)
from qhflag.matrix import PolyMatrix, from_rows
from qhflag.poly import Poly, hvar, parse_poly


def test_poincare_block_sizes():
    assert poincare_block_sizes(2) == (1, 1)
    assert poincare_block_sizes(3) == (1, 2, 2, 1)
    assert poincare_block_sizes(4) == (1, 3, 5, 6, 5, 3, 1)
    assert sum(poincare_block_sizes(5)) == 120


def test_context_block_data(gl3, gl4):
    assert gl3.context.alpha == (0, 1, 1, 2, 2, 3)
    assert gl4.context.m == 6 and gl4.context.size == 24
    assert gl4.context.alpha[:5] == (0, 1, 1, 1, 2)


def test_gl2_connection(gl2):
    cd = gl2.connection
    assert cd.p == -1  # no theta levels at all
    assert cd.omega[0] == from_rows([[0, parse_poly("q1")], [1, 0]])


def _mat(rows):
    return from_rows([[parse_poly(str(e)) for e in row] for row in rows])


def test_gl3_connection_matrices(gl3):
    cd = gl3.connection
    w1 = _mat(
        [
            [0, 0, "q1 + q2", 0, 0, "q1*q2 + q2^2"],
            [0, 0, 0, 0, "q1", 0],
            [1, 0, 0, 0, "-q2", 0],
            [0, 0, -1, 0, 0, "q1 - q2"],
            [0, 1, 1, 0, 0, "q2"],
            [0, 0, 0, 1, 1, 0],
        ]
    )
    w2 = _mat(
        [
            [0, 0, 0, 0, 0, "q1*q2 + q2^2"],
            [1, 0, 0, "q2", 0, 0],
            [0, 0, 0, "q2", 0, 0],
            [0, 1, 0, 0, 0, "-q2"],
            [0, 0, 1, 0, 0, "2*q2"],
            [0, 0, 0, 0, 1, 0],
        ]
    )
    assert cd.omega[0] == w1
    assert cd.omega[1] == w2
    assert cd.p == 0  # theta^(1) and beyond vanish
    assert cd.thetas[0][0].is_zero()
    theta2 = _mat(
        [
            [0, 0, 0, "q2", 0, 0],
            [0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, "q2"],
            [0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0],
        ]
    )
    assert cd.thetas[0][1] == theta2


def test_gl4_theta_levels_vanish(gl4):
    # only the 1/h, h^0 and h^1 layers survive
    assert gl4.connection.p == 1


def test_reassembly_identity(gl3):
    cd = gl3.connection
    h = Poly.variable(hvar())
    for i in (1, 2):
        reassembled = cd.omega[i - 1] + cd.thetas[0][i - 1].scale(h)
        assert reassembled == cd.h_matrix(i)


def test_generator_columns(gl3):
    # column 0 of omega_i picks out the basis element equal to b_i
    cd = gl3.connection
    ctx = gl3.context
    for i in (1, 2):
        col = cd.omega[i - 1].column(0)
        for k, entry in enumerate(col):
            want = Poly.one() if ctx.basis_shadows[k] == parse_poly(f"b{i}") else Poly.zero()
            assert entry == want


def test_structure_checks_pass(gl2, gl3, gl4):
    for pipe in (gl2, gl3, gl4):
        assert check_structure(pipe.connection).ok
        assert flatness_check(pipe.connection).ok


def test_constructed_triangularity_violation(gl3):
    cd = gl3.connection
    bad_omega = [m for m in cd.omega]
    # plant a nonzero entry two blocks below the diagonal: alpha 3 -> alpha 1
    entries = dict(bad_omega[0].entries)
    entries[(5, 1)] = Poly.one()
    bad_omega[0] = PolyMatrix(6, 6, entries)
    bad = ConnectionData(ctx=cd.ctx, omega=bad_omega, thetas=cd.thetas)
    report = check_structure(bad)
    assert not report.ok
    assert any("omega_1[5,1]" in f for f in report.failures)
    with pytest.raises(ConnectionCheckError):
        report.require()


def test_perturbed_flatness_fails_locally(gl3):
    cd = gl3.connection
    entries = dict(cd.omega[0].entries)
    entries[(0, 2)] = entries[(0, 2)] + parse_poly("q1")
    bad = ConnectionData(
        ctx=cd.ctx,
        omega=[PolyMatrix(6, 6, entries), cd.omega[1]],
        thetas=cd.thetas,
    )
    report = flatness_check(bad)
    assert not report.ok
    assert all("(1,2)" in f for f in report.failures)


def test_custom_generators_escape_hatch():
    # the pipeline accepts externally supplied operator generators
    from qhflag.pipeline import Pipeline
    from qhflag.toda import quantize, quantum_relations

    pipe = Pipeline(3, generators=quantize(quantum_relations(3)))
    assert pipe.context.size == 6
    assert pipe.lplus.q0[0, 3] == parse_poly("q2")
