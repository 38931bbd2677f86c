"""The algebra of differential operators generated by h*del_1, ..., h*del_r.

Here del_i = q_i d/dq_i, so the only nontrivial commutation rule is
(h del_i) q_j = q_j (h del_i) + delta_ij h q_j.  An operator is stored in left
normal form as a dict from del-exponent vectors to coefficients in Q[q, h];
all coefficients sit to the left of the del-monomials.

Rendered form uses d1, d2, ... for the degree-two generators h del_i, so an
operator prints like ``d1^2 - q1``.  An operator admits this form exactly when
every coefficient of del^a is divisible by h^|a| (true for everything the
pipeline produces); rendering raises otherwise.

Left Groebner bases divide only by leading coefficients of the shape
(rational) * h^k.  This works over the h-localised coefficient ring and covers
the quantised Toda relations, whose leading coefficients are pure h-powers; a
different leading coefficient raises OreReductionError.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from .grobner import InfiniteQuotientError, staircase
from .poly import Poly, Scalar, bvar, dvar, grevlex_key, hvar

DExp = tuple[int, ...]


class OreReductionError(Exception):
    """A reduction required division by a coefficient outside Q* x h^Z."""


class OreOp:
    """Differential operator sum_a c_a(q, h) del^a in left normal form."""

    __slots__ = ("r", "terms")

    def __init__(self, r: int, terms: Optional[dict[DExp, Union[Poly, Scalar]]] = None):
        clean: dict[DExp, Poly] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != r:
                    raise ValueError(f"exponent {e} has wrong length for r={r}")
                p = c if isinstance(c, Poly) else Poly.rational(c)
                if p.has_kind("b") or p.has_kind("d") or p.has_kind("x"):
                    raise ValueError("operator coefficients live in Q[q, h]")
                if p:
                    clean[tuple(e)] = p
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("OreOp is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(r: int) -> "OreOp":
        return OreOp(r)

    @staticmethod
    def generator(i: int, r: int) -> "OreOp":
        """The operator h*del_i."""
        e = tuple(1 if k == i - 1 else 0 for k in range(r))
        return OreOp(r, {e: Poly.variable(hvar())})

    @staticmethod
    def monomial(e: DExp, r: int) -> "OreOp":
        """The operator (h del_1)^e1 ... (h del_r)^er, i.e. h^|e| del^e."""
        return OreOp(r, {tuple(e): Poly.variable(hvar()) ** sum(e)})

    @staticmethod
    def from_commutative(p: Poly, r: int) -> "OreOp":
        """Quantise: replace each b_i by h del_i, coefficients on the left."""
        h = Poly.variable(hvar())
        terms: dict[DExp, Poly] = {}
        for m, c in p.terms.items():
            dexp = [0] * r
            rest = []
            for v, e in m:
                kind, idx = v
                if kind == "b":
                    if not 1 <= idx <= r:
                        raise ValueError(f"b{idx} outside operator algebra with r={r}")
                    dexp[idx - 1] = e
                else:
                    rest.append((v, e))
            coeff = Poly.monomial(tuple(rest), c) * h ** sum(dexp)
            key = tuple(dexp)
            terms[key] = terms.get(key, Poly.zero()) + coeff
        return OreOp(r, terms)

    # -- ring structure ------------------------------------------------------

    def __add__(self, other: "OreOp") -> "OreOp":
        if self.r != other.r:
            raise ValueError("rank mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            p = c if s is None else s + c
            if p:
                out[e] = p
            else:
                out.pop(e, None)
        return _raw(self.r, out)

    def __sub__(self, other: "OreOp") -> "OreOp":
        return self + (-other)

    def __neg__(self) -> "OreOp":
        return _raw(self.r, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: Union["OreOp", Poly, Scalar]) -> "OreOp":
        if not isinstance(other, OreOp):
            other = OreOp(self.r, {(0,) * self.r: other})
        if self.r != other.r:
            raise ValueError("rank mismatch")
        out: dict[DExp, Poly] = {}
        for a, ca in self.terms.items():
            partial = other.terms
            for i, k in enumerate(a):
                for _ in range(k):
                    partial = _apply_del(partial, i + 1)
            for e, c in partial.items():
                p = ca * c
                s = out.get(e)
                p = p if s is None else s + p
                if p:
                    out[e] = p
                else:
                    out.pop(e, None)
        return _raw(self.r, out)

    def __rmul__(self, other: Union[Poly, Scalar]) -> "OreOp":
        # coefficient multiplication from the left: no commutation needed
        p = other if isinstance(other, Poly) else Poly.rational(other)
        out = {e: p * c for e, c in self.terms.items()}
        return _raw(self.r, {e: c for e, c in out.items() if c})

    def __pow__(self, n: int) -> "OreOp":
        if n < 0:
            raise ValueError("negative operator power")
        result = OreOp(self.r, {(0,) * self.r: Poly.one()})
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OreOp):
            return NotImplemented
        return self.r == other.r and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- views ----------------------------------------------------------------

    def leading_exponent(self) -> DExp:
        if not self.terms:
            raise ValueError("zero operator has no leading term")
        return max(self.terms, key=grevlex_key)

    def to_dform(self) -> Poly:
        """Rewrite with (h del)^a as the monomial basis, as a d-variable Poly.

        Requires every coefficient of del^a to be divisible by h^|a|.
        """
        out = Poly.zero()
        for e, c in self.terms.items():
            k = sum(e)
            if c.h_valuation() < k:
                raise ValueError(
                    "operator is not in the span of (h del)^a monomials over Q[q, h]"
                )
            dmono = Poly.monomial(tuple((dvar(i + 1), x) for i, x in enumerate(e) if x))
            out = out + c.mul_h_power(-k) * dmono
        return out

    @staticmethod
    def from_dform(p: Poly, r: int) -> "OreOp":
        h = Poly.variable(hvar())
        terms: dict[DExp, Poly] = {}
        for m, c in p.terms.items():
            dexp = [0] * r
            rest = []
            for v, e in m:
                kind, idx = v
                if kind == "d":
                    if not 1 <= idx <= r:
                        raise ValueError(f"d{idx} outside operator algebra with r={r}")
                    dexp[idx - 1] = e
                elif kind in ("q", "h"):
                    rest.append((v, e))
                else:
                    raise ValueError(f"unexpected variable {v} in operator text")
            coeff = Poly.monomial(tuple(rest), c) * h ** sum(dexp)
            key = tuple(dexp)
            terms[key] = terms.get(key, Poly.zero()) + coeff
        return OreOp(r, terms)

    def symbol(self) -> Poly:
        """The h -> 0 limit after replacing each h del_i by b_i."""
        dform = self.to_dform()
        return dform.substitute({hvar(): 0}).substitute(
            {dvar(i + 1): Poly.variable(bvar(i + 1)) for i in range(self.r)}
        )

    def weighted_degree(self) -> Optional[int]:
        return self.to_dform().weighted_degree()

    def __str__(self) -> str:
        return str(self.to_dform())

    def __repr__(self) -> str:
        return f"OreOp({self})"

    def to_json(self) -> list[dict]:
        return self.to_dform().to_json()

    @staticmethod
    def from_json(data: list[dict], r: int) -> "OreOp":
        return OreOp.from_dform(Poly.from_json(data), r)


def _raw(r: int, terms: dict[DExp, Poly]) -> OreOp:
    op = OreOp.__new__(OreOp)
    object.__setattr__(op, "r", r)
    object.__setattr__(op, "terms", terms)
    return op


def _apply_del(terms: dict[DExp, Poly], i: int) -> dict[DExp, Poly]:
    """Compose del_i with sum c_e del^e from the left."""
    out: dict[DExp, Poly] = {}
    for e, c in terms.items():
        up = tuple(x + 1 if k == i - 1 else x for k, x in enumerate(e))
        s = out.get(up)
        p = c if s is None else s + c
        if p:
            out[up] = p
        else:
            out.pop(up, None)
        dc = c.t_derivative(i)
        if dc:
            s = out.get(e)
            p = dc if s is None else s + dc
            if p:
                out[e] = p
            else:
                out.pop(e, None)
    return out


def ore_mul(a: OreOp, b: OreOp) -> OreOp:
    return a * b


def parse_ore_op(text: str, r: int) -> OreOp:
    from .poly import parse_poly

    return OreOp.from_dform(parse_poly(text), r)


# -- left Groebner bases -------------------------------------------------------


def _normalise(op: OreOp) -> OreOp:
    """Canonical generator: pure h-power leading coefficient, content zero.

    Scaling by rationals and h-powers (units of the localised ring) leaves the
    left ideal unchanged.
    """
    if op.is_zero():
        raise ValueError("cannot normalise the zero operator")
    lm = op.leading_exponent()
    lc = op.terms[lm]
    layers = lc.h_split()
    if len(layers) != 1:
        raise OreReductionError(f"leading coefficient {lc} is not (rational)*h^k")
    k, base = next(iter(layers.items()))
    if base.variables():
        raise OreReductionError(f"leading coefficient {lc} is not (rational)*h^k")
    unit = base.constant_term()
    scaled = {e: c * (1 / unit) for e, c in op.terms.items()}
    content = min(c.h_valuation() - sum(e) for e, c in scaled.items())
    if content:
        scaled = {e: c.mul_h_power(-content) for e, c in scaled.items()}
    return _raw(op.r, scaled)


class LeftIdealBasis:
    """A reduced left Groebner basis for an ideal of the operator algebra."""

    def __init__(self, generators: Sequence[OreOp]):
        if not generators:
            raise ValueError("empty basis")
        self.r = generators[0].r
        self.generators = [_normalise(g) for g in generators]
        self.generators.sort(key=lambda g: grevlex_key(g.leading_exponent()))
        self._items = []
        for g in self.generators:
            lm = g.leading_exponent()
            k = g.terms[lm].h_valuation()  # leading coefficient is exactly h^k
            self._items.append((lm, k, g))

    @property
    def leading_exponents(self) -> list[DExp]:
        return [lm for lm, _, _ in self._items]

    def standard_exponents(self) -> list[DExp]:
        return staircase(self.leading_exponents, self.r)

    def __len__(self) -> int:
        return len(self.generators)


def left_normal_form(op: OreOp, basis: LeftIdealBasis) -> tuple[OreOp, int]:
    """Remainder of op under left reduction, as (numerator, h_denominator).

    The true normal form over the h-localised ring is numerator / h^k with the
    returned k >= 0 minimal; k is 0 whenever op lies in the span of the
    (h del)^a monomials, in particular for every connection-matrix reduction.
    """
    r = op.r
    work = dict(op.terms)
    shift = 0
    while True:
        target = None
        for e in sorted(work, key=grevlex_key, reverse=True):
            for lm, k, g in basis._items:
                if all(x <= y for x, y in zip(lm, e)):
                    target = (e, lm, k, g)
                    break
            if target:
                break
        if target is None:
            break
        e, lm, k, g = target
        c = work[e]
        v = c.h_valuation()
        if v < k:
            bump = k - v
            work = {ee: cc.mul_h_power(bump) for ee, cc in work.items()}
            shift += bump
            c = work[e]
        cof = c.mul_h_power(-k)
        mono_exp = tuple(x - y for x, y in zip(e, lm))
        reducer = _raw(r, {mono_exp: cof}) * g
        for ee, cc in reducer.terms.items():
            s = work.get(ee)
            p = -cc if s is None else s - cc
            if p:
                work[ee] = p
            else:
                work.pop(ee, None)
        if e in work:
            raise AssertionError("leading term failed to cancel in left reduction")
    if work and shift:
        clear = min(shift, min(c.h_valuation() for c in work.values()))
        if clear:
            work = {e: c.mul_h_power(-clear) for e, c in work.items()}
            shift -= clear
    if not work:
        shift = 0
    return _raw(r, work), shift


def _spair(f: OreOp, kf: int, g: OreOp, kg: int) -> OreOp:
    lf, lg = f.leading_exponent(), g.leading_exponent()
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    h = Poly.variable(hvar())
    mf = _raw(f.r, {tuple(a - b for a, b in zip(lcm, lf)): h**kg})
    mg = _raw(g.r, {tuple(a - b for a, b in zip(lcm, lg)): h**kf})
    return mf * f - mg * g


def left_buchberger(generators: Sequence[OreOp]) -> LeftIdealBasis:
    """Reduced left Groebner basis of the ideal generated by `generators`."""
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ValueError("no nonzero generators")
    basis = [_normalise(g) for g in gens]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    steps = 0
    while pairs:
        def lcm_degree(pr):
            li = basis[pr[0]].leading_exponent()
            lj = basis[pr[1]].leading_exponent()
            return sum(max(a, b) for a, b in zip(li, lj))

        pairs.sort(key=lambda pr: (lcm_degree(pr), pr))
        i, j = pairs.pop(0)
        current = LeftIdealBasis(basis)
        ki = basis[i].terms[basis[i].leading_exponent()].h_valuation()
        kj = basis[j].terms[basis[j].leading_exponent()].h_valuation()
        rem, _ = left_normal_form(_spair(basis[i], ki, basis[j], kj), current)
        if rem:
            basis.append(_normalise(rem))
            new = len(basis) - 1
            pairs.extend((k, new) for k in range(new))
            steps += 1
            if steps > 2000:
                raise RuntimeError("left Buchberger failed to terminate plausibly")

    # interreduce
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            g = basis[i]
            if g is None:
                continue
            others = [o for k, o in enumerate(basis) if k != i and o is not None]
            if not others:
                continue
            rem, _ = left_normal_form(g, LeftIdealBasis(others))
            if rem != g:
                basis[i] = _normalise(rem) if rem else None
                changed = True
    return LeftIdealBasis([g for g in basis if g])


def standard_operator_basis(basis: LeftIdealBasis) -> list[tuple[OreOp, Poly]]:
    """Standard monomials P_i (as operators) with commutative shadows c_i.

    Ordered ascending, so P_0 = 1 and the c_i enumerate the monomial basis of
    the quotient; raises InfiniteQuotientError for non-finite quotients.
    """
    out = []
    for e in basis.standard_exponents():
        op = OreOp.monomial(e, basis.r)
        shadow = Poly.monomial(tuple((bvar(i + 1), x) for i, x in enumerate(e) if x))
        out.append((op, shadow))
    return out


__all__ = [
    "DExp",
    "InfiniteQuotientError",
    "LeftIdealBasis",
    "OreOp",
    "OreReductionError",
    "left_buchberger",
    "left_normal_form",
    "ore_mul",
    "parse_ore_op",
    "standard_operator_basis",
]
