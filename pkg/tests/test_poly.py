import random
from fractions import Fraction

import pytest

from qhflag.poly import (
    Poly,
    bvar,
    grevlex_key,
    hvar,
    parse_poly,
    qvar,
    xvar,
)


def B(i):
    return Poly.variable(bvar(i))


def Q(i):
    return Poly.variable(qvar(i))


H = Poly.variable(hvar())


def random_poly(rng, nterms=4, varpool=None):
    varpool = varpool or [bvar(1), bvar(2), qvar(1), qvar(2), hvar()]
    p = Poly.zero()
    for _ in range(rng.randrange(nterms + 1)):
        mono = {}
        for _ in range(rng.randrange(4)):
            v = rng.choice(varpool)
            mono[v] = mono.get(v, 0) + rng.randrange(1, 3)
        p = p + Poly.from_exponents(mono, Fraction(rng.randrange(-5, 6), rng.randrange(1, 4)))
    return p


def test_difference_of_squares():
    assert (B(1) + Q(1)) * (B(1) - Q(1)) == B(1) ** 2 - Q(1) ** 2


def test_zero_annihilates():
    p = B(1) * B(2) ** 3 - Q(2)
    assert Poly.zero() * p == Poly.zero()
    assert (p * 0).is_zero()


def test_worked_product():
    # the degree-8 evaluation class times a generator
    assert (B(2) ** 2 - Q(2)) * B(1) == B(2) ** 2 * B(1) - Q(2) * B(1)


def test_ring_axioms_randomised():
    rng = random.Random(7)
    for _ in range(60):
        a, b, c = (random_poly(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_weighted_degree():
    assert (Q(1) * B(2)).weighted_degree() == 6
    assert (B(1) ** 2 + Q(1)).weighted_degree() == 4
    assert (B(1) + Q(1)).weighted_degree() is None
    assert Poly.zero().is_homogeneous()
    assert (H * B(1)).weighted_degree() == 4


def test_degree_multiplicativity():
    rng = random.Random(11)
    for _ in range(40):
        a, b = random_poly(rng), random_poly(rng)
        if a.is_zero() or b.is_zero():
            continue
        da, db = a.weighted_degree(), b.weighted_degree()
        if da is None or db is None:
            continue
        assert (a * b).weighted_degree() == da + db


def test_substitute_specialisation():
    p = B(2) ** 2 - Q(2)
    assert p.substitute({qvar(1): 0, qvar(2): 0}) == B(2) ** 2
    assert p.substitute({}) == p
    assert (Q(1) * Q(2) + Q(2) ** 2).substitute({qvar(1): 0}) == Q(2) ** 2


def test_substitution_commutes():
    rng = random.Random(3)
    for _ in range(30):
        p = random_poly(rng)
        once = p.substitute({qvar(1): 0}).substitute({qvar(2): 0})
        both = p.substitute({qvar(1): 0, qvar(2): 0})
        assert once == both


def test_substitute_by_polynomial():
    p = Poly.variable(xvar(1)) ** 2
    image = B(1) - B(2)
    assert p.substitute({xvar(1): image}) == image * image


def test_t_derivative():
    assert (Q(1) ** 2 * Q(2)).t_derivative(1) == 2 * (Q(1) ** 2 * Q(2))
    assert Q(2).t_derivative(1).is_zero()
    assert (Q(1) * Q(2) + Q(2) ** 2).t_derivative(2) == Q(1) * Q(2) + 2 * Q(2) ** 2


def test_t_derivative_leibniz():
    rng = random.Random(5)
    pool = [qvar(1), qvar(2), hvar()]
    for _ in range(40):
        p, q = random_poly(rng, varpool=pool), random_poly(rng, varpool=pool)
        for i in (1, 2):
            lhs = (p * q).t_derivative(i)
            rhs = p * q.t_derivative(i) + q * p.t_derivative(i)
            assert lhs == rhs


def test_t_derivative_rejects_b():
    with pytest.raises(ValueError):
        B(1).t_derivative(1)


def test_text_round_trip():
    rng = random.Random(13)
    for _ in range(50):
        p = random_poly(rng)
        assert parse_poly(str(p)) == p
    assert parse_poly("0").is_zero()
    assert str(Poly.zero()) == "0"


def test_json_round_trip():
    rng = random.Random(17)
    for _ in range(50):
        p = random_poly(rng)
        assert Poly.from_json(p.to_json()) == p


def test_rendering_examples():
    assert str(B(1) ** 2 - Q(1)) == "b1^2 - q1"
    assert str(Poly.rational(Fraction(-3, 2)) * B(2)) == "-3/2*b2"
    assert str(Q(1) * Q(2) + Q(2) ** 2) == "q1*q2 + q2^2"


def test_grevlex_key_order():
    # b2 < b1, b2^2 < b2*b1, and ties are resolved by the last-ranked variable
    assert grevlex_key((0, 1)) < grevlex_key((1, 0))
    assert grevlex_key((0, 2)) < grevlex_key((1, 1))
    assert grevlex_key((1, 1)) < grevlex_key((2, 0))
    assert grevlex_key((2, 0)) == grevlex_key((2, 0))
