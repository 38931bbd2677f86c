"""Exact sparse multivariate polynomial arithmetic over the rationals.

Polynomials live in the graded ring Q[b_1..b_r, q_1..q_r, h] (plus auxiliary
Chern-root variables x_1..x_n used by the Schubert module).  A variable is a
``(kind, index)`` pair, a monomial is a sorted tuple of ``(variable, exponent)``
pairs with positive exponents, and a polynomial is a dict mapping monomials to
nonzero ``Fraction`` coefficients.  The empty dict is the zero polynomial.

The grading gives b and h weight 2, q weight 4 (and x weight 2), so that the
quantum-cohomology relations and all connection-matrix entries are homogeneous.
All arithmetic is exact; there are no floats anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Union

Var = tuple[str, int]
Monomial = tuple[tuple[Var, int], ...]
Scalar = Union[int, Fraction]

# Display / storage rank of each variable kind: b1 > b2 > ... > q1 > ... > h > d1 > ... > x1 > ...
# (the d's are the operator generators h*del_i in rendered form)
_KIND_RANK = {"b": 0, "q": 1, "h": 2, "d": 3, "x": 4}

# Weighted degree per unit exponent.
_KIND_WEIGHT = {"b": 2, "q": 4, "h": 2, "d": 2, "x": 2}

_ONE = Fraction(1)


def bvar(i: int) -> Var:
    return ("b", i)


def qvar(i: int) -> Var:
    return ("q", i)


def hvar() -> Var:
    return ("h", 0)


def xvar(i: int) -> Var:
    return ("x", i)


def var_name(v: Var) -> str:
    kind, idx = v
    return "h" if kind == "h" else f"{kind}{idx}"


def dvar(i: int) -> Var:
    return ("d", i)


def var_from_name(name: str) -> Var:
    if name == "h":
        return ("h", 0)
    m = re.fullmatch(r"([bqdx])(\d+)", name)
    if m is None:
        raise ValueError(f"unknown variable name {name!r}")
    return (m.group(1), int(m.group(2)))


def _var_rank(v: Var) -> tuple[int, int]:
    return (_KIND_RANK[v[0]], v[1])


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Merge two sorted monomials, adding exponents."""
    if not a:
        return b
    if not b:
        return a
    out: list[tuple[Var, int]] = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        ra, rb = _var_rank(va), _var_rank(vb)
        if ra == rb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif ra < rb:
            out.append((va, ea))
            i += 1
        else:
            out.append((vb, eb))
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_weighted_degree(m: Monomial) -> int:
    return sum(_KIND_WEIGHT[v[0]] * e for v, e in m)


def mono_total_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_sort_key(m: Monomial, varlist: tuple[Var, ...]) -> tuple:
    # Ascending grevlex key relative to a fixed variable list (ranked order).
    exps = dict(m)
    vec = [exps.get(v, 0) for v in varlist]
    return (sum(vec), tuple(-e for e in reversed(vec)))


class Poly:
    """An immutable exact polynomial: dict from monomial to nonzero Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[m] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return _ZERO

    @staticmethod
    def one() -> "Poly":
        return _ONE_POLY

    @staticmethod
    def rational(c: Scalar) -> "Poly":
        c = Fraction(c)
        return Poly({(): c}) if c else _ZERO

    @staticmethod
    def variable(v: Var) -> "Poly":
        return Poly({((v, 1),): _ONE})

    @staticmethod
    def monomial(m: Monomial, c: Scalar = 1) -> "Poly":
        return Poly({m: Fraction(c)})

    @staticmethod
    def from_exponents(exponents: Mapping[Var, int], c: Scalar = 1) -> "Poly":
        """Monomial from a variable->exponent mapping (zeros dropped)."""
        key = tuple(
            sorted(((v, e) for v, e in exponents.items() if e), key=lambda t: _var_rank(t[0]))
        )
        return Poly({key: Fraction(c)})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: Union["Poly", Scalar]) -> "Poly":
        if not isinstance(other, Poly):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Poly.rational(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return _raw(out)

    __radd__ = __add__

    def __sub__(self, other: Union["Poly", Scalar]) -> "Poly":
        if not isinstance(other, Poly):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Poly.rational(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = -c
            else:
                s = s - c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return _raw(out)

    def __neg__(self) -> "Poly":
        return _raw({m: -c for m, c in self.terms.items()})

    def __mul__(self, other: Union["Poly", Scalar]) -> "Poly":
        if not isinstance(other, Poly):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            c = Fraction(other)
            if not c:
                return _ZERO
            return _raw({m: co * c for m, co in self.terms.items()})
        if not self.terms or not other.terms:
            return _ZERO
        # iterate over the shorter factor outside
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict[Monomial, Fraction] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                s = out.get(m)
                if s is None:
                    out[m] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        out[m] = s
                    else:
                        del out[m]
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = _ONE_POLY
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.rational(other)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure queries -------------------------------------------------

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m}

    def has_kind(self, kind: str) -> bool:
        return any(v[0] == kind for m in self.terms for v, _ in m)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def weighted_degree(self) -> Optional[int]:
        """Common weighted degree if homogeneous and nonzero, else None.

        The zero polynomial is homogeneous of every degree; callers test
        ``is_zero`` first when that distinction matters.
        """
        degs = {mono_weighted_degree(m) for m in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        if not self.terms:
            return True
        d = self.weighted_degree()
        if d is None:
            return False
        return degree is None or d == degree

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    # -- calculus and substitution ------------------------------------------

    def substitute(self, bindings: Mapping[Var, Union["Poly", Scalar]]) -> "Poly":
        """Exact substitution of a subset of variables by polynomials."""
        if not bindings:
            return self
        values = {
            v: (p if isinstance(p, Poly) else Poly.rational(p))
            for v, p in bindings.items()
        }
        out = _ZERO
        for m, c in self.terms.items():
            kept: list[tuple[Var, int]] = []
            factor = Poly.rational(c)
            for v, e in m:
                p = values.get(v)
                if p is None:
                    kept.append((v, e))
                else:
                    factor = factor * p**e
                    if factor.is_zero():
                        break
            if factor.is_zero():
                continue
            out = out + factor * Poly.monomial(tuple(kept))
        return out

    def t_derivative(self, i: int) -> "Poly":
        """Apply q_i * d/dq_i (the logarithmic derivative along t_i = log q_i).

        Variables other than the q's are treated as constant parameters; b or
        x variables indicate a misuse and are rejected.
        """
        v = qvar(i)
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for mv, e in m:
                if mv[0] in ("b", "x"):
                    raise ValueError("t_derivative applies to functions of q (and h) only")
            exp = dict(m).get(v, 0)
            if exp:
                out[m] = c * exp
        return _raw(out)

    # -- h bookkeeping (used by the operator algebra) ------------------------

    def h_split(self) -> dict[int, "Poly"]:
        """Split into h-degree layers: {k: p_k} with self = sum h^k * p_k."""
        h = hvar()
        layers: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            k = exps.pop(h, 0)
            rest = tuple(sorted(exps.items(), key=lambda t: _var_rank(t[0])))
            layers.setdefault(k, {})[rest] = c
        return {k: _raw(t) for k, t in sorted(layers.items())}

    def h_valuation(self) -> int:
        """Smallest h-exponent across terms (0 for the zero polynomial)."""
        if not self.terms:
            return 0
        h = hvar()
        return min(dict(m).get(h, 0) for m in self.terms)

    def mul_h_power(self, k: int) -> "Poly":
        """Multiply by h^k; k may be negative if every term allows it."""
        if k == 0 or not self.terms:
            return self
        h = hvar()
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(h, 0) + k
            if e < 0:
                raise ValueError("negative h power after shift")
            if e:
                exps[h] = e
            else:
                exps.pop(h, None)
            out[tuple(sorted(exps.items(), key=lambda t: _var_rank(t[0])))] = c
        return _raw(out)

    # -- rendering -----------------------------------------------------------

    def sorted_monomials(self, reverse: bool = True) -> list[Monomial]:
        varlist = tuple(sorted(self.variables(), key=_var_rank))
        return sorted(
            self.terms, key=lambda m: _mono_sort_key(m, varlist), reverse=reverse
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for m in self.sorted_monomials():
            c = self.terms[m]
            body = "*".join(
                var_name(v) + (f"^{e}" if e > 1 else "") for v, e in sorted(m, key=lambda t: _var_rank(t[0]))
            )
            if not body:
                text = str(abs(c))
            elif abs(c) == 1:
                text = body
            else:
                text = f"{abs(c)}*{body}"
            if not pieces:
                pieces.append(text if c > 0 else f"-{text}")
            else:
                pieces.append(("+ " if c > 0 else "- ") + text)
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def to_json(self) -> list[dict]:
        return [
            {
                "exponents": [[var_name(v), e] for v, e in m],
                "num": str(self.terms[m].numerator),
                "den": str(self.terms[m].denominator),
            }
            for m in self.sorted_monomials()
        ]

    @staticmethod
    def from_json(data: Iterable[dict]) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for term in data:
            m = tuple(
                sorted(
                    ((var_from_name(name), int(e)) for name, e in term["exponents"]),
                    key=lambda t: _var_rank(t[0]),
                )
            )
            c = Fraction(int(term["num"]), int(term["den"]))
            if c:
                out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)


def _raw(terms: dict[Monomial, Fraction]) -> Poly:
    p = Poly.__new__(Poly)
    object.__setattr__(p, "terms", terms)
    return p


_ZERO = _raw({})
_ONE_POLY = _raw({(): _ONE})


def weighted_degree(p: Poly) -> Optional[int]:
    return p.weighted_degree()


def t_derivative(p: Poly, i: int) -> Poly:
    return p.t_derivative(i)


# -- parsing ------------------------------------------------------------------

_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?P<body>(?:\d+(?:/\d+)?|[a-z]\d*(?:\^-?\d+)?)"
    r"(?:\s*\*\s*(?:\d+(?:/\d+)?|[a-z]\d*(?:\^-?\d+)?))*)"
)


def parse_poly(text: str) -> Poly:
    """Parse the canonical text rendering back into a Poly (round-trip safe)."""
    text = text.strip()
    if text == "0" or not text:
        return Poly.zero()
    pos = 0
    result = Poly.zero()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at: {text[pos:]!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coeff = Fraction(sign)
        mono: dict[Var, int] = {}
        for factor in re.split(r"\s*\*\s*", m.group("body")):
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coeff *= Fraction(factor)
                continue
            if "^" in factor:
                name, exp_s = factor.split("^")
                exp = int(exp_s)
            else:
                name, exp = factor, 1
            if exp < 0:
                raise ValueError(f"negative exponent in {factor!r}")
            v = var_from_name(name)
            mono[v] = mono.get(v, 0) + exp
        key = tuple(sorted(((v, e) for v, e in mono.items() if e), key=lambda t: _var_rank(t[0])))
        result = result + Poly.monomial(key, coeff)
        pos = m.end()
    return result


# -- grevlex on a single kind (used by the Groebner engines) ------------------

def grevlex_key(exponents: tuple[int, ...]) -> tuple:
    """Ascending graded-reverse-lex key for a fixed-length exponent vector.

    Variable 1 is ranked highest; ties are broken by the smallest exponent in
    the last-ranked variable, scanning upward.
    """
    return (sum(exponents), tuple(-e for e in reversed(exponents)))


def iter_monomials(p: Poly) -> Iterator[tuple[Monomial, Fraction]]:
    return iter(p.terms.items())
