"""Schubert polynomials, the change of basis C, and their q-deformations.

Schubert polynomials are built top-down by divided differences from the
staircase monomial x_1^{n-1} x_2^{n-2} ... x_{n-1}.  Classes are ordered by
ascending length with ties broken by the lexicographically smallest reduced
word, which reproduces the standard table order.  The Chern-root variables
translate into the degree-two classes by x_j -> b_{n-j} - b_{n-j+1} (with
b_n = 0), after which every class is expanded over the monomial basis by a
classical normal form, giving the constant matrix C.  The q-deformed classes
come from R = Q0^{-1} C; their circ-evaluations are exactly the Schubert
classes, which the quantum module verifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as iter_permutations

from .connection import FlagContext
from .grobner import GroebnerBasis, expand_in_basis
from .matrix import PolyMatrix
from .poly import Poly, bvar, xvar
from .birkhoff import LPlus

Perm = tuple[int, ...]


def perm_length(w: Perm) -> int:
    return sum(
        1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j]
    )


def longest_element(n: int) -> Perm:
    return tuple(range(n, 0, -1))


def apply_transposition(w: Perm, i: int) -> Perm:
    """Right multiplication by s_i: swap positions i, i+1 (1-based)."""
    out = list(w)
    out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


def lex_minimal_reduced_word(w: Perm) -> tuple[int, ...]:
    """Lexicographically smallest reduced word for w, greedily by left descents.

    The first letter of a reduced word s_{i1} s_{i2} ... is a left descent;
    taking the smallest available one at every step yields the lex-minimal
    word (peeling a letter never removes a smaller available descent later).
    """
    word = []
    current = w
    while True:
        positions = {v: p for p, v in enumerate(current)}
        i = next(
            (k for k in range(1, len(w)) if positions[k + 1] < positions[k]),
            None,
        )
        if i is None:
            return tuple(word)
        word.append(i)
        # left multiplication by s_i swaps the values i and i+1
        current = tuple(
            i + 1 if v == i else i if v == i + 1 else v for v in current
        )


def ordered_permutations(n: int) -> list[Perm]:
    """All of S_n by ascending length, ties by smallest reduced word."""
    perms = list(iter_permutations(range(1, n + 1)))
    return sorted(perms, key=lambda w: (perm_length(w), lex_minimal_reduced_word(w)))


def divided_difference(p: Poly, i: int) -> Poly:
    """(p - s_i p) / (x_i - x_{i+1}), exactly, term by term."""
    xi, xi1 = xvar(i), xvar(i + 1)
    out = Poly.zero()
    for mono, coeff in p.terms.items():
        exps = dict(mono)
        a = exps.pop(xi, 0)
        b = exps.pop(xi1, 0)
        if a == b:
            continue
        rest = tuple(sorted(exps.items(), key=lambda t: (t[0][0], t[0][1])))
        lo, hi, sign = (b, a, 1) if a > b else (a, b, -1)
        for j in range(lo, hi):
            extra = {}
            if j:
                extra[xi] = j
            if a + b - 1 - j:
                extra[xi1] = a + b - 1 - j
            merged = dict(rest)
            merged.update(extra)
            key = tuple(sorted(merged.items(), key=lambda t: (t[0][0], t[0][1])))
            out = out + Poly.monomial(key, sign * coeff)
    return out


def to_b_variables(p: Poly, n: int) -> Poly:
    """Substitute x_j -> b_{n-j} - b_{n-j+1} (b_n = 0); rejects x_n and beyond."""
    bindings = {}
    for v in p.variables():
        if v[0] != "x":
            continue
        j = v[1]
        if j >= n:
            raise ValueError(f"x{j} cannot be translated for n={n}")
        image = Poly.variable(bvar(n - j))
        if n - j + 1 <= n - 1:
            image = image - Poly.variable(bvar(n - j + 1))
        bindings[v] = image
    return p.substitute(bindings)


@dataclass
class SchubertFamily:
    """All Schubert polynomials of S_n in table order."""

    n: int
    perms: list[Perm]
    x_polys: list[Poly]
    b_polys: list[Poly]

    def index_of(self, w: Perm) -> int:
        return self.perms.index(w)


def schubert_polynomials(n: int) -> SchubertFamily:
    """Divided-difference family, with degrees checked against lengths."""
    if n < 2:
        raise ValueError("need n >= 2")
    w0 = longest_element(n)
    top = Poly.one()
    for j in range(1, n):
        top = top * Poly.variable(xvar(j)) ** (n - j)
    table: dict[Perm, Poly] = {w0: top}
    order = sorted(iter_permutations(range(1, n + 1)), key=perm_length, reverse=True)
    for w in order:
        if w in table:
            continue
        i = next(k for k in range(1, n) if w[k - 1] < w[k])
        higher = apply_transposition(w, i)
        if higher not in table:
            raise AssertionError("descent recursion out of order")
        table[w] = divided_difference(table[higher], i)
    perms = ordered_permutations(n)
    x_polys = [table[w] for w in perms]
    b_polys = [to_b_variables(p, n) for p in x_polys]
    for w, p, bp in zip(perms, x_polys, b_polys):
        want = 2 * perm_length(w)
        if not (p.is_homogeneous(want) and bp.is_homogeneous(want)):
            raise AssertionError(f"Schubert polynomial of {w} has wrong degree")
    if x_polys[0] != Poly.one():
        raise AssertionError("identity class is not 1")
    return SchubertFamily(n=n, perms=perms, x_polys=x_polys, b_polys=b_polys)


def change_of_basis(fam: SchubertFamily, classical_gb: GroebnerBasis, ctx: FlagContext) -> PolyMatrix:
    """Constant matrix C with column i the expansion of Schubert class i.

    Expansion is the classical normal form over the standard monomials; any
    q-dependence in a coordinate is a hard error.
    """
    size = ctx.size
    if len(fam.b_polys) != size:
        raise ValueError("family size does not match the basis")
    exps = [op.leading_exponent() for op in ctx.basis_ops]
    entries = {}
    for i, bp in enumerate(fam.b_polys):
        coords = expand_in_basis(bp, classical_gb, exps)
        for k, c in enumerate(coords):
            if c:
                if c.variables():
                    raise ValueError(f"class {i} expansion has q-dependence: {c}")
                if ctx.alpha[k] != perm_length(fam.perms[i]):
                    raise ValueError(f"class {i} expansion leaves its degree block")
                entries[(k, i)] = c
    return PolyMatrix(size, size, entries)


def quantum_schubert(fam: SchubertFamily, lp: LPlus, c_matrix: PolyMatrix) -> tuple[PolyMatrix, list[Poly]]:
    """R = Q0^{-1} C and the deformed classes chat'_i = sum_k R_{ki} c_k."""
    ctx = lp.ctx
    r_matrix = lp.q0_inverse() @ c_matrix
    shadows = ctx.basis_shadows
    hatted = []
    for i in range(ctx.size):
        p = Poly.zero()
        for k in range(ctx.size):
            entry = r_matrix[k, i]
            if entry:
                p = p + entry * shadows[k]
        hatted.append(p)
    return r_matrix, hatted
