"""Exact base fields: prime fields F_p (p < 2**31) and the rationals.

Internally every algorithm works on *raw* values (a Python ``int`` in
``[0, p)`` for F_p, a :class:`fractions.Fraction` for Q) and asks the
:class:`FieldSpec` to do the arithmetic.  :class:`Scalar` is the public,
operator-overloaded wrapper around one raw value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import DivisionByZero, FieldMismatch, FormatError, NotEnumerable

PRIME_BOUND = 2**31


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for p < 4 759 123 141."""
    if p < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 61):
        if p % small == 0:
            return p == small
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 7, 61):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either F_p (``p`` a prime) or Q (``p is None``)."""

    p: Optional[int] = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or not (2 <= self.p < PRIME_BOUND) or not is_prime(self.p):
                raise ValueError(f"not a prime below 2**31: {self.p!r}")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(int(p))

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Accepts ``Q``, ``F 5``, ``F5`` or a bare prime ``5``."""
        t = text.strip().replace(" ", "")
        if t in ("Q", "QQ"):
            return cls.rationals()
        if t[:1] in ("F", "f"):
            t = t[1:]
        if t.lstrip("_").isdigit():
            try:
                return cls.prime(int(t.lstrip("_")))
            except ValueError as exc:
                raise FormatError(str(exc)) from None
        raise FormatError(f"unknown field {text!r}")

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def order(self) -> Optional[int]:
        return self.p

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"

    # -- raw arithmetic -------------------------------------------------
    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def coerce(self, x):
        """Map an int / Fraction / numeric string / Scalar to a raw value."""
        if isinstance(x, Scalar):
            if x.spec != self:
                raise FieldMismatch(f"{x.spec} element used in {self}")
            return x.value
        if isinstance(x, str):
            return self.parse_scalar(x)
        if self.p is not None:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise DivisionByZero(f"denominator of {x} vanishes in {self}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return a * b % self.p if self.p is not None else a * b

    def neg(self, a):
        return -a % self.p if self.p is not None else -a

    def inv(self, a):
        if not a:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.p) if self.p is not None else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e: int):
        if self.p is not None:
            return pow(a, e, self.p)
        return a**e

    def normalize(self, a):
        if self.p is not None and not isinstance(a, Fraction):
            return int(a) % self.p
        return self.coerce(a)

    # -- enumeration and text --------------------------------------------
    def elements(self) -> Iterator["Scalar"]:
        if self.p is None:
            raise NotEnumerable("Q is infinite")
        return (Scalar(self, v) for v in range(self.p))

    def parse_scalar(self, text: str):
        t = text.strip()
        try:
            if "/" in t:
                num, den = t.split("/")
                if not den.strip().isdigit() or int(den) == 0:
                    raise ValueError
                frac = Fraction(int(num), int(den))
            else:
                frac = Fraction(int(t))
        except ValueError:
            raise FormatError(f"malformed scalar {text!r}") from None
        return self.coerce(frac)

    def render(self, a) -> str:
        if self.p is not None:
            return str(a)
        return str(a) if a.denominator != 1 else str(a.numerator)

    def __call__(self, x) -> "Scalar":
        return Scalar(self, self.coerce(x))


F2, F3, F5 = FieldSpec(2), FieldSpec(3), FieldSpec(5)
QQ = FieldSpec(None)


def characteristic(spec: FieldSpec) -> int:
    return spec.characteristic


def enumerate_elements(spec: FieldSpec) -> list[Scalar]:
    return list(spec.elements())


@dataclass(frozen=True)
class Scalar:
    """An element of a :class:`FieldSpec`; immutable and hashable."""

    spec: FieldSpec
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.spec.normalize(self.value))

    def _other(self, y):
        if isinstance(y, Scalar):
            if y.spec != self.spec:
                raise FieldMismatch(f"{self.spec} vs {y.spec}")
            return y.value
        return self.spec.coerce(y)

    def __add__(self, y):
        return Scalar(self.spec, self.spec.add(self.value, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return Scalar(self.spec, self.spec.sub(self.value, self._other(y)))

    def __rsub__(self, y):
        return Scalar(self.spec, self.spec.sub(self._other(y), self.value))

    def __mul__(self, y):
        return Scalar(self.spec, self.spec.mul(self.value, self._other(y)))

    __rmul__ = __mul__

    def __truediv__(self, y):
        return Scalar(self.spec, self.spec.div(self.value, self._other(y)))

    def __rtruediv__(self, y):
        return Scalar(self.spec, self.spec.div(self._other(y), self.value))

    def __neg__(self):
        return Scalar(self.spec, self.spec.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return Scalar(self.spec, self.spec.power(self.value, e))

    def inv(self) -> "Scalar":
        return Scalar(self.spec, self.spec.inv(self.value))

    def __eq__(self, y):
        if isinstance(y, Scalar):
            if y.spec != self.spec:
                raise FieldMismatch(f"{self.spec} vs {y.spec}")
            return self.value == y.value
        try:
            return self.value == self.spec.coerce(y)
        except (TypeError, ValueError, DivisionByZero):
            return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.value))

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"{self.spec}({self.spec.render(self.value)})"

    def __str__(self):
        return self.spec.render(self.value)
