"""Commutative Groebner bases in the b-variables over Q[q].

The engine works in Q[q][b_1..b_r] with graded reverse lexicographic order on
the b's (b_1 > ... > b_r, each weight one).  Coefficients are exact
polynomials in the q's; division is only ever performed by rational leading
coefficients, which suffices for every ideal arising from the Toda relations
(their leading coefficients are +-1).  Specialising the q's to rationals
before building the basis gives the classical (q = 0) mode.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iter_product
from typing import Optional, Sequence

from .poly import Poly, bvar, grevlex_key, mono_mul

BExp = tuple[int, ...]


class CoefficientDivisionError(Exception):
    """Division by a q-dependent leading coefficient was required."""


class InfiniteQuotientError(Exception):
    """The quotient by the ideal is not a finite-dimensional module."""


def grevlex_compare(a: BExp, b: BExp) -> int:
    """Compare b-exponent vectors: -1 if a < b, 0 if equal, 1 if a > b."""
    ka, kb = grevlex_key(a), grevlex_key(b)
    return (ka > kb) - (ka < kb)


def bexp_monomial(e: BExp) -> Poly:
    return Poly.monomial(tuple((bvar(i + 1), k) for i, k in enumerate(e) if k))


def _divides(a: BExp, b: BExp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def staircase(leading: Sequence[BExp], r: int) -> list[BExp]:
    """Exponents outside the monomial ideal of `leading`, ascending grevlex.

    Finiteness requires a pure power of every variable among the leading
    monomials; otherwise InfiniteQuotientError is raised.
    """
    bounds = []
    for i in range(r):
        pure = [lm[i] for lm in leading if all(lm[j] == 0 for j in range(r) if j != i)]
        if not pure:
            raise InfiniteQuotientError(
                f"no pure power of variable {i+1} among leading monomials; quotient is infinite"
            )
        bounds.append(min(pure))
    cands = [
        e
        for e in iter_product(*(range(b) for b in bounds))
        if not any(_divides(lm, e) for lm in leading)
    ]
    cands.sort(key=grevlex_key)
    return cands


def _to_bq(p: Poly, r: int) -> dict[BExp, Poly]:
    """View a mixed (b, q)-polynomial as b-monomials with q-coefficients."""
    out: dict[BExp, Poly] = {}
    for m, c in p.terms.items():
        bexp = [0] * r
        rest = []
        for v, e in m:
            kind, idx = v
            if kind == "b":
                if not 1 <= idx <= r:
                    raise ValueError(f"b{idx} outside context with r={r}")
                bexp[idx - 1] = e
            elif kind == "q":
                rest.append((v, e))
            else:
                raise ValueError(f"unexpected variable {v} in Groebner input")
        key = tuple(bexp)
        coeff = Poly.monomial(tuple(rest), c)
        out[key] = out.get(key, Poly.zero()) + coeff
    return {k: v for k, v in out.items() if v}


def _from_bq(d: dict[BExp, Poly]) -> Poly:
    out = Poly.zero()
    for e, c in d.items():
        out = out + c * bexp_monomial(e)
    return out


def _leading(d: dict[BExp, Poly]) -> BExp:
    return max(d, key=grevlex_key)


def _rational_lc(d: dict[BExp, Poly]) -> Fraction:
    lc = d[_leading(d)]
    if lc.variables():
        raise CoefficientDivisionError(
            f"leading coefficient {lc} is q-dependent; specialise q first"
        )
    return lc.constant_term()


def _reduce(d: dict[BExp, Poly], items: Sequence[tuple[BExp, Fraction, dict[BExp, Poly]]]) -> dict[BExp, Poly]:
    """Full normal form of d against (lm, lc, terms) reducers."""
    work = dict(d)
    while True:
        target = None
        for e in sorted(work, key=grevlex_key, reverse=True):
            for lm, lc, g in items:
                if _divides(lm, e):
                    target = (e, lm, lc, g)
                    break
            if target:
                break
        if target is None:
            return work
        e, lm, lc, g = target
        shift = tuple(x - y for x, y in zip(e, lm))
        cof = work[e] * (1 / lc)
        for ge, gc in g.items():
            key = tuple(x + y for x, y in zip(ge, shift))
            s = work.get(key, Poly.zero()) - cof * gc
            if s:
                work[key] = s
            else:
                work.pop(key, None)
        if e in work:  # exact cancellation of the target is guaranteed
            raise AssertionError("leading term failed to cancel")


class GroebnerBasis:
    """A reduced Groebner basis with grevlex order b_1 > ... > b_r."""

    def __init__(self, generators: Sequence[Poly], r: int):
        self.r = r
        self.generators = list(generators)
        self._items: list[tuple[BExp, Fraction, dict[BExp, Poly]]] = []
        for g in self.generators:
            d = _to_bq(g, r)
            if not d:
                raise ValueError("zero generator in Groebner basis")
            lm = _leading(d)
            lc = _rational_lc(d)
            self._items.append((lm, lc, d))

    @property
    def leading_monomials(self) -> list[BExp]:
        return [lm for lm, _, _ in self._items]

    def normal_form(self, p: Poly) -> Poly:
        return _from_bq(_reduce(_to_bq(p, self.r), self._items))

    def reduces_to_zero(self, p: Poly) -> bool:
        return not _reduce(_to_bq(p, self.r), self._items)

    def standard_monomials(self) -> list[BExp]:
        """All monomials outside the leading-term ideal, ascending grevlex."""
        return staircase(self.leading_monomials, self.r)

    def standard_monomial_polys(self) -> list[Poly]:
        return [bexp_monomial(e) for e in self.standard_monomials()]


def _spair(f: dict[BExp, Poly], g: dict[BExp, Poly]) -> dict[BExp, Poly]:
    lf, lg = _leading(f), _leading(g)
    cf, cg = _rational_lc(f), _rational_lc(g)
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    sf = tuple(a - b for a, b in zip(lcm, lf))
    sg = tuple(a - b for a, b in zip(lcm, lg))
    out: dict[BExp, Poly] = {}
    for e, c in f.items():
        key = tuple(a + b for a, b in zip(e, sf))
        out[key] = out.get(key, Poly.zero()) + c * (1 / cf)
    for e, c in g.items():
        key = tuple(a + b for a, b in zip(e, sg))
        s = out.get(key, Poly.zero()) - c * (1 / cg)
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def buchberger(generators: Sequence[Poly], r: int) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by `generators`.

    Coefficients stay in Q[q]; a q-dependent leading coefficient anywhere in
    the computation raises CoefficientDivisionError (use the specialised mode
    by substituting rational values for the q's beforehand).
    """
    basis: list[dict[BExp, Poly]] = []
    for g in generators:
        d = _to_bq(g, r)
        if d:
            basis.append(d)
    if not basis:
        raise ValueError("no nonzero generators")

    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    pair_counter = 0
    while pairs:
        # normal strategy: smallest lcm degree first, then insertion order
        def lcm_degree(pair):
            li = _leading(basis[pair[0]])
            lj = _leading(basis[pair[1]])
            return sum(max(a, b) for a, b in zip(li, lj))

        pairs.sort(key=lambda pr: (lcm_degree(pr), pr))
        i, j = pairs.pop(0)
        li, lj = _leading(basis[i]), _leading(basis[j])
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials: S-pair reduces to zero
        items = [(_leading(g), _rational_lc(g), g) for g in basis]
        rem = _reduce(_spair(basis[i], basis[j]), items)
        if rem:
            basis.append(rem)
            new = len(basis) - 1
            pairs.extend((k, new) for k in range(new))
            pair_counter += 1
            if pair_counter > 10000:
                raise RuntimeError("Buchberger failed to terminate plausibly")

    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            g = basis[i]
            if g is None:
                continue
            others = [
                (_leading(o), _rational_lc(o), o)
                for k, o in enumerate(basis)
                if k != i and o is not None
            ]
            if not others:
                continue
            rem = _reduce(g, others)
            if rem != g:
                basis[i] = rem if rem else None
                changed = True
    final = [g for g in basis if g]
    # normalise: monic leading coefficient, sorted by leading monomial
    final.sort(key=lambda g: grevlex_key(_leading(g)))
    normalised = []
    for g in final:
        lc = _rational_lc(g)
        normalised.append({e: c * (1 / lc) for e, c in g.items()})
    return GroebnerBasis([_from_bq(g) for g in normalised], r)


def normal_form(p: Poly, gb: GroebnerBasis) -> Poly:
    return gb.normal_form(p)


def standard_monomials(gb: GroebnerBasis) -> list[BExp]:
    return gb.standard_monomials()


def expand_in_basis(p: Poly, gb: GroebnerBasis, basis_exponents: Sequence[BExp]) -> list[Poly]:
    """Coordinates of the normal form of p in the standard-monomial basis."""
    nf = _to_bq(gb.normal_form(p), gb.r)
    index = {e: i for i, e in enumerate(basis_exponents)}
    coords = [Poly.zero()] * len(basis_exponents)
    for e, c in nf.items():
        if e not in index:
            raise ValueError(f"normal form contains non-standard monomial {e}")
        coords[index[e]] = c
    return coords
