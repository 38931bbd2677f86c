"""Quantum cohomology relations of the full flag manifold of GL_n.

The relations come from the characteristic polynomial of the tridiagonal
matrix with diagonal x_1, ..., x_n (eliminated in favour of the degree-two
classes b_i = x_1 + ... + x_i, with x_1 + ... + x_n = 0), superdiagonal
q_1, ..., q_{n-1} and subdiagonal -1.  Quantising b_i -> h del_i turns them
into the commuting conserved quantities of the quantum Toda lattice, which
generate the operator ideal the rest of the pipeline works with.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrix import PolyMatrix
from .ore import OreOp
from .poly import Poly, bvar, qvar


@dataclass(frozen=True)
class TodaMatrix:
    n: int
    entries: PolyMatrix  # n x n, tridiagonal in (b, q)


def toda_matrix(n: int) -> TodaMatrix:
    """The tridiagonal matrix whose characteristic coefficients are the relations."""
    if n < 2:
        raise ValueError("need n >= 2")
    b = [Poly.variable(bvar(i)) for i in range(1, n)]
    x = [b[0]]
    x.extend(b[i] - b[i - 1] for i in range(1, n - 1))
    x.append(-b[n - 2])
    entries: dict[tuple[int, int], Poly] = {}
    for i in range(n):
        entries[(i, i)] = x[i]
        if i + 1 < n:
            entries[(i, i + 1)] = Poly.variable(qvar(i + 1))
            entries[(i + 1, i)] = Poly.rational(-1)
    return TodaMatrix(n, PolyMatrix(n, n, entries))


def char_coefficients(tm: TodaMatrix) -> list[Poly]:
    """Coefficients of lambda^0..lambda^n in det(Z + lambda I).

    Uses the three-term recurrence for tridiagonal determinants; each minor is
    kept as its list of lambda-coefficients.
    """
    n = tm.n
    z = tm.entries
    prev2 = [Poly.one()]  # det of the empty matrix
    prev1 = [z[0, 0], Poly.one()]  # z_00 + lambda
    for k in range(1, n):
        diag = z[k, k]
        # (z_kk + lambda) * prev1
        cur = [Poly.zero()] * (k + 2)
        for d, c in enumerate(prev1):
            cur[d] = cur[d] + diag * c
            cur[d + 1] = cur[d + 1] + c
        # minus sub*super*prev2 = -(-1)*q_k*prev2
        qk = z[k - 1, k]
        for d, c in enumerate(prev2):
            cur[d] = cur[d] + qk * c
        prev2, prev1 = prev1, cur
    return prev1


def quantum_relations(n: int) -> list[Poly]:
    """The relations of the quantum cohomology ring, one per degree 4..2n.

    The i-th relation (1-based) is homogeneous of weighted degree 2(i+1); its
    sign matches the quantised generators used downstream.  The coefficient of
    lambda^{n-1} vanishes identically (trace zero) and is asserted.
    """
    coeffs = char_coefficients(toda_matrix(n))
    if coeffs[n] != Poly.one():
        raise AssertionError("characteristic polynomial is not monic")
    if coeffs[n - 1]:
        raise AssertionError("trace term did not cancel")
    rels = []
    for i in range(1, n):
        rel = -coeffs[n - 1 - i]
        if not rel.is_homogeneous(2 * (i + 1)):
            raise AssertionError(f"relation {i} is not homogeneous of degree {2*(i+1)}")
        rels.append(rel)
    return rels


def quantize(relations: list[Poly]) -> list[OreOp]:
    """Replace each b_i by h del_i, producing the Toda operators."""
    if not relations:
        raise ValueError("no relations")
    r = 0
    for rel in relations:
        for v in rel.variables():
            if v[0] == "b":
                r = max(r, v[1])
    return [OreOp.from_commutative(rel, r) for rel in relations]


def classical_relations(n: int) -> list[Poly]:
    """The q = 0 specialisations, generating the classical cohomology ideal."""
    zeros = {qvar(i): 0 for i in range(1, n)}
    return [rel.substitute(zeros) for rel in quantum_relations(n)]
