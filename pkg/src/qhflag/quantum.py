"""Quantum products, the Poincare pairing and Gromov-Witten numbers.

The inverse of the constant gauge factor turns the monomial basis classes
c_i into polynomials chat_i whose circ-evaluation (replace every b-monomial
by the circ-product of the degree-two classes, coefficients in Q[q]) equals
the class of c_i.  The conjugated matrices multiply by the degree-two
classes, so evaluating chat_i on them yields the multiplication matrix of
the class of c_i, and with it the full product table.  Pairing the table
against the top Schubert class extracts the 3-point genus-zero invariants
as exact integers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .connection import ConnectionCheckError, FlagContext, Report
from .grobner import GroebnerBasis, expand_in_basis
from .matrix import PolyMatrix, invert_constant
from .poly import Poly, qvar
from .birkhoff import LPlus


class QuantumTableError(Exception):
    """An exact consistency requirement of the product table failed."""


@dataclass
class QEvaluation:
    """The hatted basis polynomials and the matrix they came from."""

    ctx: FlagContext
    q0_inv: PolyMatrix
    hatted: list[Poly]


def quantum_evaluation(lp: LPlus, ctx: FlagContext) -> QEvaluation:
    """chat_i = sum_j (Q0^{-1})_{ji} c_j, with the defining laws verified."""
    q0_inv = lp.q0_inverse()
    shadows = ctx.basis_shadows
    hatted = []
    qzero = {qvar(i): 0 for i in range(1, ctx.r + 1)}
    for i in range(ctx.size):
        p = Poly.zero()
        for j in range(ctx.size):
            entry = q0_inv[j, i]
            if entry:
                p = p + entry * shadows[j]
        if p.substitute(qzero) != shadows[i]:
            raise QuantumTableError(f"chat_{i} does not specialise to c_{i} at q=0")
        if not p.is_homogeneous(2 * ctx.alpha[i]):
            raise QuantumTableError(f"chat_{i} is not homogeneous")
        hatted.append(p)
    for i in range(min(ctx.r + 1, ctx.size)):
        if hatted[i] != shadows[i]:
            raise QuantumTableError(f"chat_{i} must equal c_{i} in degrees 0 and 2")
    return QEvaluation(ctx=ctx, q0_inv=q0_inv, hatted=hatted)


class CircEvaluator:
    """Evaluates polynomials in the b's with the product circ of classes.

    Each b_i acts through its multiplication matrix; products of the
    commuting matrices represent circ-products of the degree-two classes.
    """

    def __init__(self, omega_hat: list[PolyMatrix], ctx: FlagContext):
        self.ctx = ctx
        self.omega_hat = omega_hat
        self._memo: dict[tuple[int, ...], PolyMatrix] = {
            (0,) * ctx.r: PolyMatrix.identity(ctx.size)
        }

    def monomial_matrix(self, bexp: tuple[int, ...]) -> PolyMatrix:
        cached = self._memo.get(bexp)
        if cached is not None:
            return cached
        l = next(i for i, e in enumerate(bexp) if e)
        lower = tuple(e - 1 if i == l else e for i, e in enumerate(bexp))
        result = self.omega_hat[l] @ self.monomial_matrix(lower)
        self._memo[bexp] = result
        return result

    def matrix_of(self, p: Poly) -> PolyMatrix:
        """The operator obtained by reading p with circ in place of products."""
        size = self.ctx.size
        out = PolyMatrix.zero(size, size)
        for mono, coeff in p.terms.items():
            bexp = [0] * self.ctx.r
            rest = []
            for v, e in mono:
                kind, idx = v
                if kind == "b":
                    bexp[idx - 1] = e
                elif kind == "q":
                    rest.append((v, e))
                else:
                    raise ValueError(f"cannot circ-evaluate variable {v}")
            scalar = Poly.monomial(tuple(rest), coeff)
            out = out + self.monomial_matrix(tuple(bexp)).scale(scalar)
        return out


def check_generator_commutativity(omega_hat: list[PolyMatrix]) -> None:
    r = len(omega_hat)
    for i in range(r):
        for j in range(i + 1, r):
            if not omega_hat[i].commutator(omega_hat[j]).is_zero():
                raise QuantumTableError(
                    f"multiplication matrices {i+1} and {j+1} do not commute"
                )


def product_by_generator(i: int, j: int, omega_hat: list[PolyMatrix]) -> list[Poly]:
    """Expansion of (class of b_i) circ (class of c_j): column j."""
    return omega_hat[i - 1].column(j)


@dataclass
class QTable:
    """Multiplication matrices of every basis class, with the product table."""

    ctx: FlagContext
    evaluator: CircEvaluator
    class_matrices: list[PolyMatrix]

    def product(self, i: int, j: int) -> list[Poly]:
        return self.class_matrices[i].column(j)


def full_product_table(omega_hat: list[PolyMatrix], qeval: QEvaluation) -> QTable:
    """Multiplication matrices M_i of all basis classes, fully cross-checked.

    Requires commuting generator matrices; verifies the evaluation identity
    (chat_i applied with circ to the unit class returns exactly class i) and
    the commutativity of the resulting table.
    """
    ctx = qeval.ctx
    check_generator_commutativity(omega_hat)
    ev = CircEvaluator(omega_hat, ctx)
    mats = []
    for i, chat in enumerate(qeval.hatted):
        mat = ev.matrix_of(chat)
        col0 = mat.column(0)
        expected = [Poly.one() if k == i else Poly.zero() for k in range(ctx.size)]
        if col0 != expected:
            raise QuantumTableError(
                f"circ-evaluation of chat_{i} applied to the unit is not class {i}"
            )
        mats.append(mat)
    for i in range(ctx.size):
        for j in range(i + 1, ctx.size):
            if mats[i].column(j) != mats[j].column(i):
                raise QuantumTableError(f"product table is not symmetric at ({i},{j})")
    return QTable(ctx=ctx, evaluator=ev, class_matrices=mats)


def check_table(
    table: QTable,
    relations: list[Poly],
    classical_gb: GroebnerBasis,
    sample_triples: int = 40,
    seed: int = 20260810,
) -> Report:
    """Relation vanishing, associativity, grading and q=0 degeneration."""
    ctx = table.ctx
    report = Report("product table")
    ev = table.evaluator

    for idx, rel in enumerate(relations, 1):
        mat = ev.matrix_of(rel)
        if not mat.is_zero():
            report.failures.append(f"relation {idx} does not vanish under circ")

    rng = random.Random(seed)
    size = ctx.size
    triples = [
        (rng.randrange(size), rng.randrange(size), rng.randrange(size))
        for _ in range(sample_triples)
    ]
    for i, j, k in triples:
        left = table.class_matrices[i].apply_to_vector(table.product(j, k))
        via = table.product(i, j)
        right = [Poly.zero()] * size
        for l, coeff in enumerate(via):
            if coeff:
                col = table.product(l, k)
                for t in range(size):
                    if col[t]:
                        right[t] = right[t] + coeff * col[t]
        if left != right:
            report.failures.append(f"associativity fails on triple ({i},{j},{k})")

    qzero = {qvar(i): 0 for i in range(1, ctx.r + 1)}
    exps = [op.leading_exponent() for op in ctx.basis_ops]
    for i in range(size):
        for j in range(i, size):
            vec = table.product(i, j)
            for k, entry in enumerate(vec):
                if entry and not entry.is_homogeneous(
                    2 * (ctx.alpha[i] + ctx.alpha[j] - ctx.alpha[k])
                ):
                    report.failures.append(
                        f"product ({i},{j}) entry {k} breaks the grading"
                    )
            classical = expand_in_basis(
                ctx.basis_shadows[i] * ctx.basis_shadows[j], classical_gb, exps
            )
            collapsed = [p.substitute(qzero) for p in vec]
            if collapsed != classical:
                report.failures.append(
                    f"product ({i},{j}) does not degenerate to the cup product at q=0"
                )
    return report


@dataclass
class Pairing:
    """The Poincare pairing on the monomial basis, normalised on the top class."""

    ctx: FlagContext
    matrix: list[list[Fraction]]

    def pair(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j]


def poincare_pairing(ctx: FlagContext, classical_gb: GroebnerBasis, c_matrix: PolyMatrix) -> Pairing:
    """Pairing <c_i, c_j>: top-Schubert-class coefficient of the cup product.

    Expands the classical product in the Schubert basis through the change of
    basis matrix and reads off the coefficient of the longest class, which is
    normalised to integrate to 1.
    """
    size = ctx.size
    c_inv = invert_constant(c_matrix).rational_entries()
    exps = [op.leading_exponent() for op in ctx.basis_ops]
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            if ctx.alpha[i] + ctx.alpha[j] != ctx.m:
                # homogeneity: the top-class coefficient of a product of the
                # wrong degree is zero, so only the anti-diagonal has content
                continue
            prod = ctx.basis_shadows[i] * ctx.basis_shadows[j]
            coords = expand_in_basis(prod, classical_gb, exps)
            consts = []
            for p in coords:
                if p.variables():
                    raise ConnectionCheckError("classical expansion is not constant")
                consts.append(p.constant_term())
            value = sum(
                (c_inv[size - 1][k] * consts[k] for k in range(size)), Fraction(0)
            )
            matrix[i][j] = value
            matrix[j][i] = value
    return Pairing(ctx=ctx, matrix=matrix)


def check_pairing(pairing: Pairing) -> Report:
    """Nondegeneracy of the pairing matrix."""
    ctx = pairing.ctx
    report = Report("Poincare pairing")
    size = ctx.size
    try:
        invert_constant(
            PolyMatrix(
                size,
                size,
                {
                    (i, j): Poly.rational(pairing.matrix[i][j])
                    for i in range(size)
                    for j in range(size)
                    if pairing.matrix[i][j]
                },
            )
        )
    except ValueError:
        report.failures.append("pairing matrix is singular")
    return report


@dataclass(frozen=True)
class GWRecord:
    """One 3-point genus-zero invariant <c_i, c_j, c_k> in curve degree d."""

    i: int
    j: int
    k: int
    degree: tuple[int, ...]
    value: int


def gw_invariants(table: QTable, pairing: Pairing) -> list[GWRecord]:
    """All nonzero invariants from the table, exact and integer-checked.

    The pairing is extended Q[q]-linearly over <c_i circ c_j, c_k>; the
    coefficient of q^d is the degree-d invariant.  A non-integer value means
    a pipeline bug and raises.
    """
    ctx = table.ctx
    size = ctx.size
    records = []
    for i in range(size):
        for j in range(i, size):
            vec = table.product(i, j)
            for k in range(j, size):
                paired = Poly.zero()
                for l, coeff in enumerate(vec):
                    if coeff and pairing.matrix[l][k]:
                        paired = paired + coeff * pairing.matrix[l][k]
                for mono, value in paired.terms.items():
                    degree = [0] * ctx.r
                    for v, e in mono:
                        if v[0] != "q":
                            raise QuantumTableError("paired product is not a q-polynomial")
                        degree[v[1] - 1] = e
                    if value.denominator != 1:
                        raise QuantumTableError(
                            f"non-integer invariant at ({i},{j},{k}) degree {degree}: {value}"
                        )
                    expected_dim = 2 * ctx.m + 4 * sum(degree)
                    if 2 * (ctx.alpha[i] + ctx.alpha[j] + ctx.alpha[k]) != expected_dim:
                        raise QuantumTableError(
                            f"dimension axiom fails at ({i},{j},{k}) degree {degree}"
                        )
                    records.append(
                        GWRecord(i=i, j=j, k=k, degree=tuple(degree), value=int(value))
                    )
    return records


def gw_lookup(records: list[GWRecord]) -> dict[tuple[int, int, int, tuple[int, ...]], int]:
    return {(rec.i, rec.j, rec.k, rec.degree): rec.value for rec in records}


def check_gw_symmetry(table: QTable, pairing: Pairing, records: list[GWRecord]) -> Report:
    """Full S3-symmetry of the invariants, recomputed from permuted slots."""
    ctx = table.ctx
    report = Report("GW symmetry")
    known = gw_lookup(records)

    def value_of(i: int, j: int, k: int, degree: tuple[int, ...]) -> Fraction:
        vec = table.product(i, j)
        paired = Poly.zero()
        for l, coeff in enumerate(vec):
            if coeff and pairing.matrix[l][k]:
                paired = paired + coeff * pairing.matrix[l][k]
        mono = tuple(
            ((("q", idx + 1), e)) for idx, e in enumerate(degree) if e
        )
        return paired.coefficient(tuple(mono))

    for (i, j, k, degree), value in known.items():
        for perm in ((i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)):
            other = value_of(*perm, degree)
            if other != value:
                report.failures.append(
                    f"<{i},{j},{k}>_{degree} = {value} but permuted slot gives {other}"
                )
    return report
