"""Triangular factorization of the connection by quadrature.

The positive loop-group factor is L+ = Q0 (I + h Q1 + ... + h^(m-2) Q_{m-2})
with Q0 unipotent (Q0 - I supported strictly above the block diagonal) and
Q_i block (i+2)-triangular.  The gauge-fixing p.d.e. system decomposes along
block diagonals into a strictly triangular family: each unknown slice Q_i^[j]
(the part of Q_i on block diagonal j) has a right-hand side built only from
slices that precede it in the total order

    (i1, j1) < (i2, j2)  iff  j1 - i1 < j2 - i2, or equal and j2 < j1,

so everything is found by integrating exact 1-forms in the q's, one slice at
a time.  Closedness of every right-hand side and vanishing of the slices with
j - i odd are verified, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .connection import ConnectionData, FlagContext, Report
from .matrix import PolyMatrix, invert_unipotent
from .poly import Poly, hvar, qvar


class NotClosedError(Exception):
    """A quadrature right-hand side failed the exact closedness test."""


class ConstantTermError(Exception):
    """A quadrature right-hand side has a q-free term and cannot integrate to 0 at q=0."""


class SolveOrderError(Exception):
    """A right-hand side touched a slice that the solve order has not produced yet."""


def diagonal_parts(mat: PolyMatrix, ctx: FlagContext) -> dict[int, PolyMatrix]:
    """Split a matrix into its block diagonals; zero slices are omitted."""
    slices: dict[int, dict[tuple[int, int], Poly]] = {}
    for (i, j), v in mat.entries.items():
        k = ctx.diagonal_of(i, j)
        slices.setdefault(k, {})[(i, j)] = v
    return {
        k: PolyMatrix(mat.nrows, mat.ncols, entries)
        for k, entries in sorted(slices.items())
    }


def diagonal_slice(mat: PolyMatrix, ctx: FlagContext, k: int) -> PolyMatrix:
    entries = {
        key: v for key, v in mat.entries.items() if ctx.diagonal_of(*key) == k
    }
    return PolyMatrix(mat.nrows, mat.ncols, entries)


def solve_order(m: int) -> list[tuple[int, int]]:
    """All unknown slices (i, j), 1 <= i, i+2 <= j <= m, smallest first."""
    if m < 1:
        raise ValueError("need m >= 1")
    symbols = [(i, j) for i in range(1, m - 1) for j in range(i + 2, m + 1)]
    symbols.sort(key=lambda s: (s[1] - s[0], -s[1]))
    return symbols


def integrate_closed_form(components: Sequence[PolyMatrix]) -> PolyMatrix:
    """The unique Q with Q|_{q=0} = 0 and q_i dQ/dq_i = components[i-1].

    Entries integrate monomial by monomial: the coefficient of q^a in Q is the
    corresponding coefficient of the i-th component divided by a_i, for any
    axis i with a_i nonzero.  A q-free term raises ConstantTermError; any
    cross-axis disagreement raises NotClosedError.
    """
    r = len(components)
    if r == 0:
        raise ValueError("no components")
    nrows, ncols = components[0].nrows, components[0].ncols
    for i in range(r):
        for j in range(i + 1, r):
            diff = components[j].t_derivative(i + 1) - components[i].t_derivative(j + 1)
            if not diff.is_zero():
                key, val = next(iter(diff.entries.items()))
                raise NotClosedError(
                    f"d_{i+1}(component {j+1}) != d_{j+1}(component {i+1}), "
                    f"e.g. entry {key}: {val}"
                )
    out: dict[tuple[int, int], Poly] = {}
    for i, comp in enumerate(components):
        axis = i + 1
        v = qvar(axis)
        for key, entry in comp.entries.items():
            acc = out.get(key, Poly.zero())
            for mono, coeff in entry.terms.items():
                exps = dict(mono)
                a = exps.get(v, 0)
                if a == 0:
                    if all(exps.get(qvar(k + 1), 0) == 0 for k in range(r)):
                        raise ConstantTermError(
                            f"entry {key} of component {axis} has q-free term {coeff}"
                        )
                    continue  # another axis integrates this monomial
                first_axis = next(
                    k + 1 for k in range(r) if exps.get(qvar(k + 1), 0)
                )
                if first_axis != axis:
                    continue  # already integrated via the first nonzero axis
                acc = acc + Poly.monomial(mono, coeff / a)
            if acc:
                out[key] = acc
            elif key in out:
                del out[key]
    q = PolyMatrix(nrows, ncols, out)
    # re-verify every axis against the candidate (cross-axis consistency)
    for i, comp in enumerate(components):
        if q.t_derivative(i + 1) != comp:
            raise NotClosedError(f"integrated matrix fails axis {i+1} re-check")
    return q


@dataclass
class LPlus:
    """The polynomial factor: Q0 and the higher coefficients Q1..Q_{m-2}."""

    ctx: FlagContext
    q0: PolyMatrix
    qs: list[PolyMatrix]  # qs[i-1] = Q_i, absent tail entries are zero

    def q_coefficient(self, i: int) -> PolyMatrix:
        size = self.ctx.size
        if i == 0:
            return self.q0
        if 1 <= i <= len(self.qs):
            return self.qs[i - 1]
        return PolyMatrix.zero(size, size)

    def q0_inverse(self) -> PolyMatrix:
        return invert_unipotent(self.q0, nilpotency_bound=self.ctx.m + 1)

    def h_polynomial(self) -> list[PolyMatrix]:
        """Coefficients B_k of L+ = sum_k h^k B_k, i.e. B_k = Q0 Q_k."""
        out = [self.q0]
        out.extend(self.q0 @ qk for qk in self.qs)
        while len(out) > 1 and out[-1].is_zero():
            out.pop()
        return out


class _SliceStore:
    """Solved slices of the unknowns, guarding the solve order."""

    def __init__(self, ctx: FlagContext):
        self.ctx = ctx
        self.solved: dict[tuple[int, int], PolyMatrix] = {}
        self.zero = PolyMatrix.zero(ctx.size, ctx.size)

    def get(self, i: int, j: int) -> PolyMatrix:
        if i < 1 or j < i + 2 or j > self.ctx.m:
            return self.zero  # structurally zero by triangularity
        value = self.solved.get((i, j))
        if value is None:
            raise SolveOrderError(f"slice Q_{i}^[{j}] accessed before being solved")
        return value

    def put(self, i: int, j: int, value: PolyMatrix) -> None:
        self.solved[(i, j)] = value

    def assemble(self, i: int) -> PolyMatrix:
        out = self.zero
        for j in range(i + 2, self.ctx.m + 1):
            out = out + self.solved[(i, j)]
        return out


def _form_slices(mats: Sequence[PolyMatrix], ctx: FlagContext) -> dict[int, list[PolyMatrix]]:
    """Per-diagonal slices of a matrix 1-form, indexed [k][axis]."""
    zero = PolyMatrix.zero(ctx.size, ctx.size)
    out: dict[int, list[PolyMatrix]] = {}
    for axis, mat in enumerate(mats):
        for k, part in diagonal_parts(mat, ctx).items():
            out.setdefault(k, [zero] * len(mats))[axis] = part
    return out


def solve_Lplus(cd: ConnectionData, ctx: FlagContext) -> LPlus:
    """Solve the gauge-fixing system slice by slice, smallest symbol first.

    Right-hand sides are assembled from already-solved slices only; each one
    is integrated exactly with basepoint zero, and the parity, triangularity,
    homogeneity and basepoint laws are asserted on the results.
    """
    m, r, size = ctx.m, ctx.r, ctx.size
    zero = PolyMatrix.zero(size, size)
    omega_sl = _form_slices(cd.omega, ctx)
    theta_sl = [_form_slices(level, ctx) for level in cd.thetas]

    def theta_slice(level: int, k: int) -> Optional[list[PolyMatrix]]:
        if level >= len(theta_sl):
            return None
        return theta_sl[level].get(k)

    store = _SliceStore(ctx)

    def rhs_for(i: int, j: int) -> list[PolyMatrix]:
        """Block-diagonal-j part of the equation for dQ_i, one matrix per axis."""
        acc = [zero] * r

        def add_form(mat_by_axis: Sequence[PolyMatrix], coeff_left: Optional[PolyMatrix] = None,
                     coeff_right: Optional[PolyMatrix] = None, sign: int = 1):
            for ax in range(r):
                term = mat_by_axis[ax]
                if coeff_left is not None:
                    term = coeff_left @ term
                if coeff_right is not None:
                    term = term @ coeff_right
                acc[ax] = acc[ax] + term if sign > 0 else acc[ax] - term

        # theta^(i),[j]
        t = theta_slice(i, j)
        if t:
            add_form(t)
        # sum_{k=1}^{i-1} (Q_k theta^(i-k))^[j]
        for k in range(1, i):
            for c, tslice in (theta_sl[i - k].items() if i - k < len(theta_sl) else ()):
                add_form(tslice, coeff_left=store.get(k, j - c))
        # [Q_i, theta^(0)]^[j]
        for c, tslice in (theta_sl[0].items() if theta_sl else ()):
            qi = store.get(i, j - c)
            if qi:
                add_form(tslice, coeff_left=qi)
                add_form(tslice, coeff_right=qi, sign=-1)
        # [Q_{i+1}, omega]^[j]
        for c, wslice in omega_sl.items():
            qnext = store.get(i + 1, j - c)
            if qnext:
                add_form(wslice, coeff_left=qnext)
                add_form(wslice, coeff_right=qnext, sign=-1)
        # -([Q_1, omega] Q_i)^[j]; Q_i^[j-c-l] forces l <= j-i-1, within which
        # every Q_1 slice precedes (i, j) in the solve order
        for l in range(3, min(m, j - i - 1) + 1):
            q1 = store.get(1, l)
            if not q1:
                continue
            for c, wslice in omega_sl.items():
                qi = store.get(i, j - c - l)
                if not qi:
                    continue
                for ax in range(r):
                    w = wslice[ax]
                    acc[ax] = acc[ax] - (q1 @ w - w @ q1) @ qi
        return acc

    for i, j in solve_order(m):
        rhs = rhs_for(i, j)
        for ax, mat in enumerate(rhs):
            for key in mat.entries:
                if ctx.diagonal_of(*key) != j:
                    raise AssertionError(
                        f"rhs for Q_{i}^[{j}] leaks off diagonal {j} at {key}"
                    )
        try:
            value = integrate_closed_form(rhs)
        except (NotClosedError, ConstantTermError) as exc:
            raise type(exc)(f"while solving Q_{i}^[{j}]: {exc}") from exc
        if (j - i) % 2 == 1 and not value.is_zero():
            raise AssertionError(f"parity violation: Q_{i}^[{j}] != 0 with j-i odd")
        store.put(i, j, value)

    qs = [store.assemble(i) for i in range(1, max(m - 1, 1))]

    # Q0: dQ0 = Q0 * (theta^(0) + [Q_1, omega]), ascending block diagonals
    q1_full = qs[0] if qs else zero
    n_form = []
    for ax in range(r):
        t0 = cd.thetas[0][ax] if cd.thetas else zero
        n_form.append(t0 + q1_full.commutator(cd.omega[ax]))
    n_slices = _form_slices(n_form, ctx)
    if any(k < 2 for k in n_slices):
        raise AssertionError("Q0 right-hand side has slices below diagonal 2")
    q0_slices: dict[int, PolyMatrix] = {}
    for j in range(2, m + 1):
        rhs = [zero] * r
        for k, nsl in n_slices.items():
            if k == j:
                for ax in range(r):
                    rhs[ax] = rhs[ax] + nsl[ax]
            elif 2 <= j - k:
                left = q0_slices.get(j - k)
                if left:
                    for ax in range(r):
                        rhs[ax] = rhs[ax] + left @ nsl[ax]
        try:
            value = integrate_closed_form(rhs)
        except (NotClosedError, ConstantTermError) as exc:
            raise type(exc)(f"while solving Q_0^[{j}]: {exc}") from exc
        if j % 2 == 1 and not value.is_zero():
            raise AssertionError(f"parity violation: Q_0^[{j}] != 0 with j odd")
        q0_slices[j] = value
    q0 = PolyMatrix.identity(size)
    for value in q0_slices.values():
        q0 = q0 + value

    lp = LPlus(ctx=ctx, q0=q0, qs=qs)
    check_factor(lp).require()
    return lp


def check_factor(lp: LPlus) -> Report:
    """Triangularity, homogeneity, parity and basepoint laws of the factor."""
    ctx = lp.ctx
    report = Report("L+ factor structure")
    qzero = {qvar(i): 0 for i in range(1, ctx.r + 1)}
    for i in range(0, max(ctx.m - 1, 1)):
        qi = lp.q_coefficient(i)
        base = qi.substitute(qzero)
        if i == 0:
            if base != PolyMatrix.identity(ctx.size):
                report.failures.append("Q_0 at q=0 is not the identity")
        else:
            if not base.is_zero():
                report.failures.append(f"Q_{i} at q=0 is nonzero")
        for (k, j), entry in qi.entries.items():
            diag = ctx.diagonal_of(k, j)
            if i == 0 and k == j:
                continue  # unit diagonal
            if diag < i + 2:
                report.failures.append(
                    f"Q_{i}[{k},{j}] nonzero below block diagonal {i + 2}"
                )
            if (diag - i) % 2 == 1:
                report.failures.append(
                    f"Q_{i}[{k},{j}] nonzero on odd parity diagonal {diag}"
                )
            want = 2 * (diag - i)
            if not entry.is_homogeneous(want):
                report.failures.append(
                    f"Q_{i}[{k},{j}] not homogeneous of degree {want}: {entry}"
                )
    return report


@dataclass
class GaugeResult:
    omega_hat: list[PolyMatrix]
    report: Report


def gauge_check(lp: LPlus, cd: ConnectionData) -> GaugeResult:
    """Conjugated form omega_hat = Q0 omega Q0^{-1}, with the full gauge law.

    Verifies, at every power of h and per direction, the identity
    omega_hat B_k = sum_j B_{k-j} (h Omega)_j - d B_{k-1} where B are the
    h-coefficients of L+ and (h Omega)_0 = omega, (h Omega)_{j+1} = theta^(j).
    Also verifies integrability q_i d(omega_hat_j)/dq_i symmetry and that the
    conjugated form keeps the block structure of omega.
    """
    ctx = lp.ctx
    report = Report("gauge transform")
    q0_inv = lp.q0_inverse()
    omega_hat = [lp.q0 @ w @ q0_inv for w in cd.omega]

    bs = lp.h_polynomial()
    homega = [cd.omega] + [level for level in cd.thetas]
    size = ctx.size
    zero = PolyMatrix.zero(size, size)
    max_k = len(bs) + len(homega)
    for ax in range(ctx.r):
        for k in range(max_k + 1):
            lhs = omega_hat[ax] @ (bs[k] if k < len(bs) else zero)
            rhs = zero
            for j, level in enumerate(homega):
                if 0 <= k - j < len(bs):
                    rhs = rhs + bs[k - j] @ level[ax]
            if 1 <= k <= len(bs):
                rhs = rhs - bs[k - 1].t_derivative(ax + 1)
            if lhs != rhs:
                diff = lhs - rhs
                key, val = next(iter(diff.entries.items()))
                report.failures.append(
                    f"gauge identity fails at h^{k}, direction {ax+1}, entry {key}: {val}"
                )

    for i in range(ctx.r):
        for j in range(i + 1, ctx.r):
            diff = omega_hat[j].t_derivative(i + 1) - omega_hat[i].t_derivative(j + 1)
            if not diff.is_zero():
                report.failures.append(
                    f"omega_hat integrability fails for directions ({i+1},{j+1})"
                )

    for ax in range(ctx.r):
        for (k, j), entry in omega_hat[ax].entries.items():
            diag = ctx.diagonal_of(k, j)
            if diag < -1:
                report.failures.append(
                    f"omega_hat_{ax+1}[{k},{j}] nonzero below block diagonal -1"
                )
            if not entry.is_homogeneous(2 * (diag + 1)):
                report.failures.append(
                    f"omega_hat_{ax+1}[{k},{j}] not homogeneous of degree {2*(diag+1)}"
                )
    return GaugeResult(omega_hat=omega_hat, report=report)
