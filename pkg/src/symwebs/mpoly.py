"""Sparse multivariate polynomials in X0..X_{k-1} over an exact field.

Terms are stored as ``{exponent tuple: raw coefficient}`` with no zero
coefficients.  Python tuple comparison on exponent vectors is exactly the
lexicographic order with X0 > X1 > ..., which is the canonical term order
used for leading terms, exact division and rendering.
"""
from __future__ import annotations

import re
from typing import Iterable, Optional

from .errors import (
    DimensionMismatch,
    DomainError,
    FieldMismatch,
    FormatError,
    IndexOutOfRange,
    InexactDivision,
    NotHomogeneous,
    ZeroPolynomial,
)
from .exactfield import FieldSpec, Scalar


class _ZeroDegree:
    """Marker returned by :meth:`MPoly.is_homogeneous` for the zero polynomial."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"


ZERO = _ZeroDegree()


class MPoly:
    __slots__ = ("field", "nvars", "terms", "_hash")

    def __init__(self, field: FieldSpec, nvars: int, terms: Optional[dict] = None):
        self.field = field
        self.nvars = nvars
        self.terms = {} if terms is None else {e: c for e, c in terms.items() if c}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, field, nvars):
        return cls(field, nvars)

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: field.coerce(c)})

    @classmethod
    def var(cls, field, nvars, i):
        if not 0 <= i < nvars:
            raise IndexOutOfRange(f"variable X{i} with {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): field.one})

    @classmethod
    def linear_form(cls, field, coeffs):
        """sum_i coeffs[i] * X_i for raw or coercible coefficients."""
        k = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = field.coerce(c)
            if c:
                e = [0] * k
                e[i] = 1
                terms[tuple(e)] = c
        return cls(field, k, terms)

    @classmethod
    def from_dict(cls, field, nvars, d):
        return cls(field, nvars, {tuple(e): field.coerce(c) for e, c in d.items()})

    def _new(self, terms):
        p = MPoly.__new__(MPoly)
        p.field, p.nvars, p.terms, p._hash = self.field, self.nvars, terms, None
        return p

    def _check(self, other):
        if not isinstance(other, MPoly):
            raise TypeError(f"expected MPoly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(self.field, self.nvars, other)

    # -- basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def total_degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def is_homogeneous(self):
        """Common degree of all terms, ``None`` if mixed, :data:`ZERO` for 0."""
        if not self.terms:
            return ZERO
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def leading_exponent(self):
        return max(self.terms)

    def leading_coefficient(self):
        return self.terms[max(self.terms)]

    def coefficient(self, exps) -> Scalar:
        return Scalar(self.field, self.terms.get(tuple(exps), self.field.zero))

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = F.add(out.get(e, F.zero), c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return self._new({e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self.scale(other)
        self._check(other)
        F = self.field
        out: dict = {}
        if F.p is not None:
            p = F.p
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
            return self._new({e: c % p for e, c in out.items() if c % p})
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return self._new({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c):
        F = self.field
        c = F.coerce(c)
        if not c:
            return self._new({})
        return self._new({e: F.mul(c, v) for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.constant(self.field, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return (self.field, self.nvars, self.terms) == (other.field, other.nvars, other.terms)
        if isinstance(other, (int, Scalar)):
            return self == MPoly.constant(self.field, self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def monic(self) -> "MPoly":
        """Scale so the lex-leading coefficient is 1 (zero stays zero)."""
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.leading_coefficient()))

    # -- substitution and derivatives -----------------------------------------
    def substitute_linear(self, A) -> "MPoly":
        """Return f(AX), i.e. X_i -> sum_j A[i][j] X_j.

        ``A`` is a square matrix of raw or coercible entries of size nvars.
        """
        F, k = self.field, self.nvars
        if len(A) != k or any(len(row) != k for row in A):
            raise DimensionMismatch(f"substitution matrix must be {k}x{k}")
        forms = [MPoly.linear_form(F, row) for row in A]
        one = MPoly.constant(F, k, 1)
        powers: list[list[MPoly]] = [[one] for _ in range(k)]

        def power(i, d):
            while len(powers[i]) <= d:
                powers[i].append(powers[i][-1] * forms[i])
            return powers[i][d]

        out = MPoly.zero(F, k)
        for e, c in self.terms.items():
            term = MPoly.constant(F, k, c)
            for i, d in enumerate(e):
                if d:
                    term = term * power(i, d)
            out = out + term
        return out

    def partial_derivative(self, i: int) -> "MPoly":
        if not 0 <= i < self.nvars:
            raise IndexOutOfRange(f"no variable X{i}")
        F = self.field
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = F.mul(c, F.coerce(e[i]))
                if v:
                    d = list(e)
                    d[i] -= 1
                    out[tuple(d)] = v
        return self._new(out)

    # -- division ----------------------------------------------------------
    def divmod_lex(self, g: "MPoly"):
        """Multivariate division by one polynomial in lex order.

        Returns ``(q, r)`` with self = q*g + r, where no term of r is
        divisible by the leading term of g.
        """
        self._check(g)
        if not g.terms:
            raise ZeroPolynomial("division by zero polynomial")
        F = self.field
        lg = g.leading_exponent()
        inv_lc = F.inv(g.terms[lg])
        gterms = list(g.terms.items())
        rem = dict(self.terms)
        q: dict = {}
        r: dict = {}
        while rem:
            e = max(rem)
            c = rem.pop(e)
            if all(a >= b for a, b in zip(e, lg)):
                shift = tuple(a - b for a, b in zip(e, lg))
                t = F.mul(c, inv_lc)
                q[shift] = t
                for ge, gc in gterms:
                    if ge == lg:
                        continue
                    ne = tuple(a + b for a, b in zip(ge, shift))
                    v = F.sub(rem.get(ne, F.zero), F.mul(t, gc))
                    if v:
                        rem[ne] = v
                    else:
                        rem.pop(ne, None)
            else:
                r[e] = c
        return self._new(q), self._new(r)

    def exact_div(self, g: "MPoly") -> "MPoly":
        """Quotient self/g; raises :class:`InexactDivision` on a nonzero remainder."""
        self._check(g)
        if not g.terms:
            raise ZeroPolynomial("division by zero polynomial")
        F = self.field
        lg = g.leading_exponent()
        inv_lc = F.inv(g.terms[lg])
        gterms = [(e, c) for e, c in g.terms.items() if e != lg]
        rem = dict(self.terms)
        q = {}
        while rem:
            e = max(rem)
            c = rem.pop(e)
            if not all(a >= b for a, b in zip(e, lg)):
                raise InexactDivision("nonzero remainder")
            shift = tuple(a - b for a, b in zip(e, lg))
            t = F.mul(c, inv_lc)
            q[shift] = t
            for ge, gc in gterms:
                ne = tuple(a + b for a, b in zip(ge, shift))
                v = F.sub(rem.get(ne, F.zero), F.mul(t, gc))
                if v:
                    rem[ne] = v
                else:
                    rem.pop(ne, None)
        return self._new(q)

    def divides(self, f: "MPoly") -> bool:
        try:
            f.exact_div(self)
        except InexactDivision:
            return False
        return True

    # -- univariate views for the gcd ---------------------------------------
    def coefficients_in(self, v: int) -> dict[int, "MPoly"]:
        """{d: c_d} with self = sum_d c_d X_v^d and c_d free of X_v."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            d = e[v]
            ee = e[:v] + (0,) + e[v + 1:]
            out.setdefault(d, {})[ee] = c
        return {d: self._new(t) for d, t in out.items()}

    def _shift(self, v, d):
        return self._new({e[:v] + (e[v] + d,) + e[v + 1:]: c for e, c in self.terms.items()})

    # -- text ----------------------------------------------------------------
    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"MPoly({self.field}, {render(self)!r})"


def _content(f: MPoly, v: int) -> MPoly:
    g = MPoly.zero(f.field, f.nvars)
    for c in f.coefficients_in(v).values():
        g = poly_gcd(g, c)
        if g.is_constant() and g:
            break
    return g


def _primitive_part(f: MPoly, v: int) -> MPoly:
    if not f:
        return f
    return f.exact_div(_content(f, v)).monic()


def _prem(a: MPoly, b: MPoly, v: int) -> MPoly:
    db = b.degree_in(v)
    lcb = b.coefficients_in(v)[db]
    r = a
    while r and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lcr = r.coefficients_in(v)[dr]
        r = lcb * r - (lcr * b)._shift(v, dr - db)
    return r


def poly_gcd(f: MPoly, g: MPoly) -> MPoly:
    """Monic gcd (leading coefficient 1 in lex order) by primitive PRS.

    The polynomials are viewed as univariate in the lowest-index variable
    occurring in either argument, with coefficients in the ring of the
    remaining variables; contents are handled recursively.
    """
    f._check(g)
    if not f:
        return g.monic()
    if not g:
        return f.monic()
    present = f.variables() | g.variables()
    if not present:
        return MPoly.constant(f.field, f.nvars, 1)
    v = min(present)
    cf, cg = _content(f, v), _content(g, v)
    c = poly_gcd(cf, cg)
    a, b = f.exact_div(cf), g.exact_div(cg)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while b and b.degree_in(v) > 0:
        r = _prem(a, b, v)
        a, b = b, _primitive_part(r, v)
    h = _primitive_part(a, v) if not b else MPoly.constant(f.field, f.nvars, 1)
    return (c * h).monic()


def gcd_many(polys: Iterable[MPoly]) -> MPoly:
    polys = list(polys)
    g = MPoly.zero(polys[0].field, polys[0].nvars)
    for p in polys:
        g = poly_gcd(g, p)
        if g.total_degree() == 0:
            break
    return g


def is_homogeneous(f: MPoly):
    return f.is_homogeneous()


def partial_derivative(f: MPoly, i: int) -> MPoly:
    return f.partial_derivative(i)


def is_geometrically_squarefree(f: MPoly) -> bool:
    """True iff gcd(f, df/dX0, ..., df/dXm) is a constant.

    Both supported base fields are perfect, so this is squarefreeness over
    an algebraic closure.  When every partial vanishes (a p-th power in
    characteristic p) the gcd is f itself and the answer is False.
    """
    if not f:
        raise ZeroPolynomial("the zero polynomial has every factor")
    deg = f.is_homogeneous()
    if deg is None:
        raise NotHomogeneous(str(f))
    if deg == 0:
        return True
    g = f
    for i in range(f.nvars):
        g = poly_gcd(g, f.partial_derivative(i))
        if g.total_degree() == 0:
            return True
    return g.total_degree() == 0


def multiplicity(f: MPoly, g: MPoly) -> int:
    """Largest e with g**e dividing f."""
    if not f:
        raise ZeroPolynomial("multiplicity in the zero polynomial")
    if g.is_constant():
        raise DomainError("multiplicity of a constant is undefined")
    e = 0
    while True:
        try:
            f = f.exact_div(g)
        except InexactDivision:
            return e
        e += 1


def proportional(f: MPoly, g: MPoly) -> Optional[Scalar]:
    """The unit u with f == u*g, or None.  Two zero polynomials give u = 1."""
    f._check(g)
    F = f.field
    if not f and not g:
        return Scalar(F, F.one)
    if not f or not g or f.terms.keys() != g.terms.keys():
        return None
    e = f.leading_exponent()
    u = F.div(f.terms[e], g.terms[e])
    if all(F.mul(u, c) == f.terms[k] for k, c in g.terms.items()):
        return Scalar(F, u)
    return None


# -- text rendering and parsing ---------------------------------------------

def _monomial(e) -> str:
    parts = []
    for i, d in enumerate(e):
        if d == 1:
            parts.append(f"X{i}")
        elif d:
            parts.append(f"X{i}^{d}")
    return "*".join(parts)


def render(f: MPoly) -> str:
    """Canonical text: descending lex order, ``c*X0^2*X1`` style terms."""
    if not f.terms:
        return "0"
    F = f.field
    out = []
    for idx, e in enumerate(sorted(f.terms, reverse=True)):
        c = f.terms[e]
        mono = _monomial(e)
        if F.p is None:
            neg = c < 0
            c = -c if neg else c
        else:
            neg = False
        cs = F.render(c)
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|X(\d+)|([-+*/^]))")


def parse_poly(text: str, field: FieldSpec, nvars: int) -> MPoly:
    """Parse the rendering grammar (whitespace tolerant) back to an MPoly."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormatError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("var", int(m.group(2))))
        else:
            tokens.append(("op", m.group(3)))
    if not tokens:
        raise FormatError("empty polynomial")
    i = 0
    result = MPoly.zero(field, nvars)

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    first = True
    while i < len(tokens):
        sign = 1
        kind, val = peek()
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            raise FormatError(f"expected '+' or '-' in {text!r}")
        first = False
        coeff = field.coerce(sign)
        exps = [0] * nvars
        while True:
            kind, val = peek()
            if kind == "num":
                i += 1
                num = val
                if peek() == ("op", "/"):
                    i += 1
                    kind2, den = peek()
                    if kind2 != "num" or den == 0:
                        raise FormatError(f"bad fraction in {text!r}")
                    i += 1
                    coeff = field.mul(coeff, field.parse_scalar(f"{num}/{den}"))
                else:
                    coeff = field.mul(coeff, field.coerce(num))
            elif kind == "var":
                i += 1
                if val >= nvars:
                    raise FormatError(f"X{val} out of range for {nvars} variables")
                d = 1
                if peek() == ("op", "^"):
                    i += 1
                    kind2, d = peek()
                    if kind2 != "num":
                        raise FormatError(f"bad exponent in {text!r}")
                    i += 1
                exps[val] += d
            else:
                raise FormatError(f"expected a factor in {text!r}")
            if peek() == ("op", "*"):
                i += 1
                continue
            break
        result = result + MPoly(field, nvars, {tuple(exps): coeff})
    return result
