"""Connection matrices of the operator module and their structural laws.

For each direction i the action of del_i on the quotient module is encoded by
the matrix H_i with [h del_i P_j] = sum_k (H_i)_kj [P_k] over the standard
operator basis P_0, ..., P_s.  Splitting H_i by powers of h gives the exact
1-form data the solver consumes:

    H_i = omega_i + h * theta_i^(0) + h^2 * theta_i^(1) + ...

Rows and columns are indexed by the basis; columns are sources.  The basis is
graded, and the block of index alpha collects basis elements of weighted
degree 2*alpha; block sizes match the Poincare polynomial of the flag
manifold.  Every law checked here (homogeneity, triangularity, parity of the
block diagonals, zero curvature) is an exact statement about polynomials and
is verified entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from .matrix import PolyMatrix
from .ore import LeftIdealBasis, OreOp, left_normal_form, standard_operator_basis
from .poly import Poly


class ConnectionCheckError(Exception):
    """The connection matrices failed an exactness or structure requirement."""


def poincare_block_sizes(n: int) -> tuple[int, ...]:
    """Coefficients of prod_{k=1}^{n-1} (1 + z^2 + ... + z^(2k)) in z^(2a)."""
    coeffs = [1]
    for k in range(1, n):
        new = [0] * (len(coeffs) + k)
        for d, c in enumerate(coeffs):
            for j in range(k + 1):
                new[d + j] += c
        coeffs = new
    return tuple(coeffs)


@dataclass(frozen=True)
class FlagContext:
    """Graded bookkeeping for the rank-n! quotient module of GL_n."""

    n: int
    r: int
    m: int
    block_sizes: tuple[int, ...]
    basis_ops: tuple[OreOp, ...]
    basis_shadows: tuple[Poly, ...]
    alpha: tuple[int, ...]  # block index of each basis element

    @staticmethod
    def from_basis(n: int, basis: LeftIdealBasis) -> "FlagContext":
        r = n - 1
        m = n * (n - 1) // 2
        if basis.r != r:
            raise ValueError(f"basis rank {basis.r} does not match n={n}")
        ops_shadows = standard_operator_basis(basis)
        size = len(ops_shadows)
        if size != factorial(n):
            raise ConnectionCheckError(f"quotient rank {size} != n! = {factorial(n)}")
        alphas = []
        for _, shadow in ops_shadows:
            deg = shadow.weighted_degree()
            if deg is None or deg % 2:
                raise ConnectionCheckError(f"basis shadow {shadow} has bad degree")
            alphas.append(deg // 2)
        if alphas != sorted(alphas):
            raise ConnectionCheckError("basis is not ordered by ascending degree")
        blocks = poincare_block_sizes(n)
        census = [0] * (m + 1)
        for a in alphas:
            census[a] += 1
        if tuple(census) != blocks:
            raise ConnectionCheckError(
                f"block census {census} does not match Poincare sizes {blocks}"
            )
        return FlagContext(
            n=n,
            r=r,
            m=m,
            block_sizes=blocks,
            basis_ops=tuple(op for op, _ in ops_shadows),
            basis_shadows=tuple(sh for _, sh in ops_shadows),
            alpha=tuple(alphas),
        )

    @property
    def size(self) -> int:
        return len(self.alpha)

    def diagonal_of(self, row: int, col: int) -> int:
        return self.alpha[col] - self.alpha[row]


@dataclass
class ConnectionData:
    """The h-split connection: omega (1/h part) and theta levels (h^j parts)."""

    ctx: FlagContext
    omega: list[PolyMatrix]  # one matrix per direction i = 1..r
    thetas: list[list[PolyMatrix]]  # thetas[j][i-1] is theta_i^(j)

    @property
    def p(self) -> int:
        return len(self.thetas) - 1

    def h_matrix(self, i: int) -> PolyMatrix:
        """Reassemble h * Omega_i = omega_i + h theta_i^(0) + ... exactly."""
        from .poly import hvar

        h = Poly.variable(hvar())
        out = self.omega[i - 1]
        for j, level in enumerate(self.thetas):
            out = out + level[i - 1].scale(h ** (j + 1))
        return out


def connection_matrices(basis: LeftIdealBasis, ctx: FlagContext) -> ConnectionData:
    """Extract the connection by reducing (h del_i) P_j for every i, j.

    Every coefficient of [P_k] must be polynomial in h after dividing by the
    h-power carried by P_k itself; any leftover h-denominator aborts.
    """
    size = ctx.size
    exps = [op.leading_exponent() for op in ctx.basis_ops]
    index = {e: k for k, e in enumerate(exps)}
    h_mats: list[dict[tuple[int, int], Poly]] = [dict() for _ in range(ctx.r)]
    for i in range(1, ctx.r + 1):
        gen = OreOp.generator(i, ctx.r)
        for j, pj in enumerate(ctx.basis_ops):
            nf, hden = left_normal_form(gen * pj, basis)
            if hden:
                raise ConnectionCheckError(
                    f"reduction of (h del_{i}) P_{j} produced an h-denominator"
                )
            for e, c in nf.terms.items():
                k = index.get(e)
                if k is None:
                    raise ConnectionCheckError(
                        f"normal form of (h del_{i}) P_{j} is not standard: {e}"
                    )
                weight = sum(e)
                if c.h_valuation() < weight:
                    raise ConnectionCheckError(
                        f"entry ({k},{j}) of direction {i} has an h-denominator"
                    )
                h_mats[i - 1][(k, j)] = c.mul_h_power(-weight)
    # split by powers of h
    omegas: list[dict[tuple[int, int], Poly]] = [dict() for _ in range(ctx.r)]
    theta_levels: dict[int, list[dict[tuple[int, int], Poly]]] = {}
    for i in range(ctx.r):
        for key, c in h_mats[i].items():
            for k, layer in c.h_split().items():
                if k == 0:
                    omegas[i][key] = layer
                else:
                    level = theta_levels.setdefault(
                        k - 1, [dict() for _ in range(ctx.r)]
                    )
                    level[i][key] = layer
    p = max(theta_levels) if theta_levels else -1
    thetas = [
        [
            PolyMatrix(size, size, theta_levels[j][i]) if j in theta_levels else PolyMatrix.zero(size, size)
            for i in range(ctx.r)
        ]
        for j in range(p + 1)
    ]
    cd = ConnectionData(
        ctx=ctx,
        omega=[PolyMatrix(size, size, omegas[i]) for i in range(ctx.r)],
        thetas=thetas,
    )
    return cd


@dataclass
class Report:
    """Outcome of an exact verification; failures list one string per entry."""

    title: str
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def require(self) -> None:
        if self.failures:
            detail = "; ".join(self.failures[:8])
            more = f" (+{len(self.failures) - 8} more)" if len(self.failures) > 8 else ""
            raise ConnectionCheckError(f"{self.title}: {detail}{more}")

    def __str__(self) -> str:
        if self.ok:
            return f"{self.title}: ok"
        return f"{self.title}: {len(self.failures)} failure(s)\n  " + "\n  ".join(
            self.failures
        )


def check_structure(cd: ConnectionData) -> Report:
    """Homogeneity, triangularity and parity of omega and the theta levels.

    omega entries at blocks (a, b) are homogeneous of degree 2(b - a + 1) and
    vanish below the block subdiagonal; theta^(j) entries are homogeneous of
    degree 2(b - a - j) and vanish below the (j+2)-nd block superdiagonal.
    Block diagonals of omega vanish for even offsets, those of theta^(j) when
    offset - j is odd (the q-degrees cannot match otherwise).
    """
    ctx = cd.ctx
    report = Report("connection structure")

    def check_matrix(mat: PolyMatrix, name: str, degree_shift: int, min_diag: int, parity: int):
        for (k, j), entry in mat.entries.items():
            diag = ctx.diagonal_of(k, j)
            want = 2 * (diag + degree_shift)
            if not entry.is_homogeneous(want):
                report.failures.append(
                    f"{name}[{k},{j}] not homogeneous of degree {want}: {entry}"
                )
            if diag < min_diag:
                report.failures.append(
                    f"{name}[{k},{j}] nonzero below block diagonal {min_diag}"
                )
            if (diag - parity) % 2 == 0:
                report.failures.append(
                    f"{name}[{k},{j}] nonzero on excluded parity diagonal {diag}"
                )

    for i in range(1, ctx.r + 1):
        check_matrix(cd.omega[i - 1], f"omega_{i}", 1, -1, 0)
        for j, level in enumerate(cd.thetas):
            check_matrix(level[i - 1], f"theta^({j})_{i}", -j, j + 2, j + 1)
    return report


def flatness_check(cd: ConnectionData) -> Report:
    """Zero curvature of d + (1/h) * (assembled connection), exactly.

    Written with the h cleared: for all i < j,
    h d_i H_j - h d_j H_i + [H_i, H_j] = 0 where H_i = h * Omega_i.
    """
    from .poly import hvar

    ctx = cd.ctx
    h = Poly.variable(hvar())
    report = Report("flatness")
    mats = [cd.h_matrix(i) for i in range(1, ctx.r + 1)]
    for i in range(ctx.r):
        for j in range(i + 1, ctx.r):
            curv = (
                mats[j].t_derivative(i + 1).scale(h)
                - mats[i].t_derivative(j + 1).scale(h)
                + mats[i].commutator(mats[j])
            )
            for (k, l), entry in curv.entries.items():
                report.failures.append(
                    f"curvature ({i+1},{j+1}) entry [{k},{l}] = {entry}"
                )
    return report
