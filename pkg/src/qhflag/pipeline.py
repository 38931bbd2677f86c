"""Stage orchestration: one object owning the computation for a given n.

Stages are cached properties computed on demand in dependency order:
relations -> operators -> left Groebner basis -> connection -> factor ->
gauge -> products -> Schubert data.  ``structural_reports`` runs the laws
that need no reference data (grading, triangularity, parity, flatness,
closedness, the gauge identity); ``full_reports`` adds the product-table,
pairing and Schubert checks.  Reference comparisons live in `golden`.
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional, Sequence

from .birkhoff import GaugeResult, LPlus, check_factor, gauge_check, solve_Lplus
from .connection import (
    ConnectionData,
    FlagContext,
    Report,
    check_structure,
    connection_matrices,
    flatness_check,
)
from .grobner import GroebnerBasis, buchberger
from .matrix import PolyMatrix
from .ore import LeftIdealBasis, OreOp, left_buchberger
from .poly import Poly, qvar
from .quantum import (
    Pairing,
    QEvaluation,
    QTable,
    check_gw_symmetry,
    check_pairing,
    check_table,
    full_product_table,
    gw_invariants,
    poincare_pairing,
    quantum_evaluation,
)
from .schubert import SchubertFamily, change_of_basis, quantum_schubert, schubert_polynomials

DEFAULT_MAX_N = 5


class Pipeline:
    """All derived data for the flag manifold of GL_n, computed lazily."""

    def __init__(self, n: int, generators: Optional[Sequence[OreOp]] = None,
                 max_n: int = DEFAULT_MAX_N):
        if n < 2:
            raise ValueError("need n >= 2")
        if n > max_n:
            raise ValueError(
                f"n={n} exceeds the safety cap {max_n}; raise max_n explicitly"
            )
        self.n = n
        self.r = n - 1
        self._generators = list(generators) if generators is not None else None

    @cached_property
    def relations(self) -> list[Poly]:
        from .toda import quantum_relations

        return quantum_relations(self.n)

    @cached_property
    def classical_relations(self) -> list[Poly]:
        zeros = {qvar(i): 0 for i in range(1, self.n)}
        return [rel.substitute(zeros) for rel in self.relations]

    @cached_property
    def operators(self) -> list[OreOp]:
        if self._generators is not None:
            return list(self._generators)
        from .toda import quantize

        return quantize(self.relations)

    @cached_property
    def basis(self) -> LeftIdealBasis:
        return left_buchberger(self.operators)

    @cached_property
    def context(self) -> FlagContext:
        return FlagContext.from_basis(self.n, self.basis)

    @cached_property
    def connection(self) -> ConnectionData:
        cd = connection_matrices(self.basis, self.context)
        check_structure(cd).require()
        return cd

    @cached_property
    def lplus(self) -> LPlus:
        return solve_Lplus(self.connection, self.context)

    @cached_property
    def gauge(self) -> GaugeResult:
        result = gauge_check(self.lplus, self.connection)
        result.report.require()
        return result

    @property
    def omega_hat(self) -> list[PolyMatrix]:
        return self.gauge.omega_hat

    @cached_property
    def evaluation(self) -> QEvaluation:
        return quantum_evaluation(self.lplus, self.context)

    @cached_property
    def table(self) -> QTable:
        return full_product_table(self.omega_hat, self.evaluation)

    @cached_property
    def classical_basis(self) -> GroebnerBasis:
        return buchberger(self.classical_relations, self.r)

    @cached_property
    def schubert_family(self) -> SchubertFamily:
        return schubert_polynomials(self.n)

    @cached_property
    def schubert_matrix(self) -> PolyMatrix:
        return change_of_basis(self.schubert_family, self.classical_basis, self.context)

    @cached_property
    def reduced_schubert_classes(self) -> list[Poly]:
        """Schubert classes rewritten over the standard monomials (via C)."""
        c = self.schubert_matrix
        ctx = self.context
        out = []
        for i in range(ctx.size):
            p = Poly.zero()
            for k in range(ctx.size):
                if c[k, i]:
                    p = p + c[k, i] * ctx.basis_shadows[k]
            out.append(p)
        return out

    @cached_property
    def quantum_schubert(self) -> tuple[PolyMatrix, list[Poly]]:
        return quantum_schubert(self.schubert_family, self.lplus, self.schubert_matrix)

    @cached_property
    def pairing(self) -> Pairing:
        return poincare_pairing(self.context, self.classical_basis, self.schubert_matrix)

    @cached_property
    def gw_records(self):
        return gw_invariants(self.table, self.pairing)

    # -- verification bundles -------------------------------------------------

    def structural_reports(self) -> list[Report]:
        reports = [
            check_structure(self.connection),
            flatness_check(self.connection),
            check_factor(self.lplus),
            self.gauge.report,
        ]
        reports.append(self._rank_report())
        return reports

    def _rank_report(self) -> Report:
        from math import factorial

        report = Report("quotient rank and block census")
        ctx = self.context  # construction already validates; report for the record
        if ctx.size != factorial(self.n):
            report.failures.append(f"rank {ctx.size} != {factorial(self.n)}")
        return report

    def quantum_reports(self) -> list[Report]:
        reports = [
            check_table(self.table, self.relations, self.classical_basis),
            check_pairing(self.pairing),
            check_gw_symmetry(self.table, self.pairing, self.gw_records),
            self._schubert_report(),
        ]
        return reports

    def _schubert_report(self) -> Report:
        report = Report("Schubert checks")
        ctx = self.context
        r_matrix, hatted = self.quantum_schubert
        qzero = {qvar(i): 0 for i in range(1, self.n)}
        if r_matrix.substitute(qzero) != self.schubert_matrix:
            report.failures.append("R at q=0 is not C")
        for i, (hp, cls) in enumerate(zip(hatted, self.reduced_schubert_classes)):
            if hp.substitute(qzero) != cls:
                report.failures.append(f"deformed class {i} does not specialise at q=0")
        # circ-evaluation of each deformed class gives exactly the Schubert class
        ev = self.table.evaluator
        c = self.schubert_matrix
        for i, hp in enumerate(hatted):
            got = ev.matrix_of(hp).column(0)
            want = c.column(i)
            if got != want:
                report.failures.append(
                    f"circ-evaluation of deformed class {i} is not Schubert class {i}"
                )
        # duality: <S_w, S_{w0 w}> = 1, other complementary pairs vanish
        from .schubert import longest_element, perm_length

        fam = self.schubert_family
        w0 = longest_element(self.n)
        alpha = [perm_length(w) for w in fam.perms]
        cm = c.rational_entries()
        pairing = self.pairing
        size = ctx.size
        for a in range(size):
            for b in range(size):
                if alpha[a] + alpha[b] != ctx.m:
                    continue
                value = sum(
                    cm[k][a] * pairing.matrix[k][l] * cm[l][b]
                    for k in range(size)
                    for l in range(size)
                    if cm[k][a] and pairing.matrix[k][l] and cm[l][b]
                )
                dual = tuple(w0[v - 1] for v in fam.perms[a])
                want = 1 if fam.perms[b] == dual else 0
                if value != want:
                    report.failures.append(
                        f"Schubert duality fails at classes ({a},{b}): {value} != {want}"
                    )
        return report

    def primed_rerun_matrix(self) -> PolyMatrix:
        """Re-run the solver on the Schubert-primed operator basis; return Q0'.

        The primed basis P'_i = sum_j C_{ji} P_j changes every connection
        matrix by constant conjugation; solving the same system there must
        give exactly C^{-1} Q0 C, which the caller asserts.
        """
        from .connection import ConnectionData
        from .matrix import invert_constant
        from .ore import left_normal_form

        ctx = self.context
        c = self.schubert_matrix
        c_inv = invert_constant(c)
        size = ctx.size
        # honest recomputation: reduce (h del_i) P'_j and express in primed coords
        primed = []
        for j in range(size):
            op = OreOp.zero(self.r)
            for k in range(size):
                if c[k, j]:
                    op = op + c[k, j] * ctx.basis_ops[k]
            primed.append(op)
        exps = [op.leading_exponent() for op in ctx.basis_ops]
        index = {e: k for k, e in enumerate(exps)}
        h_mats = []
        for i in range(1, self.r + 1):
            gen = OreOp.generator(i, self.r)
            entries = {}
            for j, pj in enumerate(primed):
                nf, hden = left_normal_form(gen * pj, self.basis)
                if hden:
                    raise AssertionError("primed reduction produced an h-denominator")
                column = [Poly.zero()] * size
                for e, coeff in nf.terms.items():
                    column[index[e]] = coeff.mul_h_power(-sum(e))
                # convert standard coordinates to primed coordinates
                for k in range(size):
                    acc = Poly.zero()
                    for l in range(size):
                        if c_inv[k, l] and column[l]:
                            acc = acc + c_inv[k, l] * column[l]
                    if acc:
                        entries[(k, j)] = acc
            h_mats.append(PolyMatrix(size, size, entries))
        # split and solve in the primed frame (same block data: C is degree 0)
        omegas, theta_levels = [], {}
        for i in range(self.r):
            om_entries, level_entries = {}, {}
            for key, entry in h_mats[i].entries.items():
                for k, layer in entry.h_split().items():
                    if k == 0:
                        om_entries[key] = layer
                    else:
                        theta_levels.setdefault(k - 1, [dict() for _ in range(self.r)])[i][key] = layer
            omegas.append(PolyMatrix(size, size, om_entries))
        p = max(theta_levels) if theta_levels else -1
        thetas = [
            [PolyMatrix(size, size, theta_levels[j][i]) if j in theta_levels else PolyMatrix.zero(size, size)
             for i in range(self.r)]
            for j in range(p + 1)
        ]
        cd = ConnectionData(ctx=ctx, omega=omegas, thetas=thetas)
        lp = solve_Lplus(cd, ctx)
        return lp.q0
