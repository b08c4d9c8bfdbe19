"""Exact scalars in Q(v) and its quadratic extension by alpha, alpha^2 = v + 1/v.

Elements of Q(v) are stored as ``v**shift * num / den`` with integer polynomials
``num`` and ``den`` that do not vanish at v = 0, are coprime over Z[v], and where
``den`` has a positive leading coefficient.  This form is unique, so equality is
structural.  Polynomial arithmetic is delegated to python-flint.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

import flint

Number = Union[int, Fraction, "QV", "FieldElement"]


class ScalarError(ArithmeticError):
    """Raised on division by zero, poles at a sample point, or a missing alpha branch."""


def _strip_v(p: flint.fmpz_poly) -> tuple[flint.fmpz_poly, int]:
    coeffs = p.coeffs()
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    if k == 0:
        return p, 0
    return flint.fmpz_poly(coeffs[k:]), k


class QV:
    """An element of Q(v) in canonical form."""

    __slots__ = ("num", "den", "shift", "_key")

    def __init__(self, num, den=None, shift: int = 0, _canonical: bool = False):
        num = num if isinstance(num, flint.fmpz_poly) else flint.fmpz_poly(num)
        den = flint.fmpz_poly([1]) if den is None else (
            den if isinstance(den, flint.fmpz_poly) else flint.fmpz_poly(den))
        if not _canonical:
            if den.is_zero():
                raise ScalarError("zero denominator")
            if num.is_zero():
                num, den, shift = flint.fmpz_poly([]), flint.fmpz_poly([1]), 0
            else:
                num, a = _strip_v(num)
                den, b = _strip_v(den)
                shift += a - b
                g = num.gcd(den)
                if not g.is_one():
                    num, den = num // g, den // g
                if den.leading_coefficient() < 0:
                    num, den = -num, -den
        self.num, self.den, self.shift = num, den, shift
        self._key = None

    # construction helpers
    @classmethod
    def from_int(cls, n) -> "QV":
        if isinstance(n, Fraction):
            return cls([n.numerator], [n.denominator])
        return cls([int(n)])

    @classmethod
    def v_power(cls, e: int) -> "QV":
        return cls(flint.fmpz_poly([1]), flint.fmpz_poly([1]), e, _canonical=True)

    @classmethod
    def laurent(cls, terms: dict[int, int]) -> "QV":
        """Build sum c * v**e from an exponent -> integer coefficient map."""
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return cls([0])
        lo = min(terms)
        coeffs = [0] * (max(terms) - lo + 1)
        for e, c in terms.items():
            coeffs[e - lo] = c
        return cls(coeffs, [1], lo)

    def key(self):
        if self._key is None:
            self._key = (tuple(int(c) for c in self.num.coeffs()),
                         tuple(int(c) for c in self.den.coeffs()), self.shift)
        return self._key

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        other = _as_qv(other)
        if other is NotImplemented:
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def _lift(self, other: "QV"):
        """Bring two elements to a common v-shift; returns polynomials."""
        lo = min(self.shift, other.shift)
        a = self.num * flint.fmpz_poly([0] * (self.shift - lo) + [1])
        b = other.num * flint.fmpz_poly([0] * (other.shift - lo) + [1])
        return a, b, lo

    def __add__(self, other):
        other = _as_qv(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        a, b, lo = self._lift(other)
        if self.den == other.den:
            return QV(a + b, self.den, lo)
        return QV(a * other.den + b * self.den, self.den * other.den, lo)

    __radd__ = __add__

    def __neg__(self):
        return QV(-self.num, self.den, self.shift, _canonical=True)

    def __sub__(self, other):
        other = _as_qv(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_qv(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return QV([0])
        return QV(self.num * other.num, self.den * other.den, self.shift + other.shift)

    __rmul__ = __mul__

    def inverse(self) -> "QV":
        if self.is_zero():
            raise ScalarError("division by zero")
        return QV(self.den, self.num, -self.shift)

    def __truediv__(self, other):
        other = _as_qv(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_qv(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return QV(self.num ** e, self.den ** e, self.shift * e)

    def specialize(self, v_value) -> Fraction:
        v_value = Fraction(v_value)
        if v_value == 0:
            raise ScalarError("v = 0 is not an admissible sample")
        d = _eval(self.den, v_value)
        if d == 0:
            raise ScalarError(f"pole at v = {v_value}")
        return _eval(self.num, v_value) / d * v_value ** self.shift

    def __repr__(self):
        return f"QV({self})"

    def __str__(self):
        n = _fmt_poly(self.num, self.shift)
        if self.den.is_one():
            return n
        return f"({n})/({_fmt_poly(self.den, 0)})"


def _eval(p: flint.fmpz_poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p.coeffs()):
        acc = acc * x + int(c)
    return acc


def _fmt_poly(p: flint.fmpz_poly, shift: int) -> str:
    parts = []
    for i, c in enumerate(p.coeffs()):
        c = int(c)
        if c:
            e = i + shift
            mono = "" if e == 0 else ("v" if e == 1 else f"v^{e}")
            if mono and abs(c) == 1:
                parts.append(("-" if c < 0 else "+") + mono)
            else:
                parts.append(f"{c:+d}" + (("*" + mono) if mono else ""))
    s = "".join(parts) or "0"
    return s[1:] if s.startswith("+") else s


def _as_qv(x):
    if isinstance(x, QV):
        return x
    if isinstance(x, (int, Fraction)):
        return QV.from_int(x)
    return NotImplemented


# alpha^2 = v + v^-1
_ALPHA_SQ = QV.laurent({1: 1, -1: 1})


class FieldElement:
    """a + b*alpha with a, b in Q(v) and alpha^2 = v + 1/v."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if isinstance(a, QV) else QV.from_int(a)
        self.b = b if isinstance(b, QV) else QV.from_int(b)

    # constructors
    @classmethod
    def v(cls, e: int = 1) -> "FieldElement":
        return cls(QV.v_power(e))

    @classmethod
    def q(cls, e: int = 1) -> "FieldElement":
        return cls(QV.v_power(2 * e))

    @classmethod
    def alpha(cls) -> "FieldElement":
        return cls(0, 1)

    @classmethod
    def coerce(cls, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, QV):
            return cls(x)
        if isinstance(x, (int, Fraction)):
            return cls(QV.from_int(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to FieldElement")

    def has_alpha(self) -> bool:
        return not self.b.is_zero()

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __add__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return FieldElement(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b)

    def __sub__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return FieldElement(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return FieldElement.coerce(other) - self

    def __mul__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.has_alpha() and not other.has_alpha():
            return FieldElement(self.a * other.a)
        a = self.a * other.a + self.b * other.b * _ALPHA_SQ
        b = self.a * other.b + self.b * other.a
        return FieldElement(a, b)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ScalarError("division by zero")
        if not self.has_alpha():
            return FieldElement(self.a.inverse())
        norm = self.a * self.a - self.b * self.b * _ALPHA_SQ
        inv = norm.inverse()
        return FieldElement(self.a * inv, -self.b * inv)

    def __truediv__(self, other):
        try:
            other = FieldElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return FieldElement.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = FieldElement(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def normalize(self) -> "FieldElement":
        # elements are canonical on construction
        return self

    def specialize(self, v_value, alpha_branch=None) -> Fraction:
        """Evaluate at v = v_value; alpha needs an explicit exact branch value."""
        a = self.a.specialize(v_value)
        if not self.has_alpha():
            return a
        if alpha_branch is None:
            raise ScalarError("alpha branch missing for an element with an alpha part")
        return a + self.b.specialize(v_value) * alpha_branch

    def to_json(self) -> dict:
        def terms(p, shift):
            return [[int(c), i + shift] for i, c in enumerate(p.coeffs()) if c]
        out = {"num": terms(self.a.num, self.a.shift), "den": terms(self.a.den, 0)}
        if self.has_alpha():
            out["alpha_num"] = terms(self.b.num, self.b.shift)
            out["alpha_den"] = terms(self.b.den, 0)
        return out

    @classmethod
    def from_json(cls, d: dict) -> "FieldElement":
        def part(n, dd):
            return QV.laurent({e: c for c, e in n}) / QV.laurent({e: c for c, e in dd})
        a = part(d["num"], d["den"])
        b = part(d["alpha_num"], d["alpha_den"]) if "alpha_num" in d else QV.from_int(0)
        return cls(a, b)

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        if not self.has_alpha():
            return str(self.a)
        return f"{self.a} + ({self.b})*alpha"


def field_arithmetic(x, y, op: str) -> FieldElement:
    """Apply op in {add, sub, mul, div}; division by zero raises ScalarError."""
    x, y = FieldElement.coerce(x), FieldElement.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def specialize(x, v_value, alpha_branch=None) -> Fraction:
    return FieldElement.coerce(x).specialize(v_value, alpha_branch)


def q_int(m: int, v_exp: int) -> FieldElement:
    """[m] for q_i = v**v_exp."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return FieldElement(0)
    # (x^m - x^-m)/(x - x^-1) = sum_{k} x^{m-1-2k}
    return FieldElement(QV.laurent({v_exp * (m - 1 - 2 * k): 1 for k in range(m)}))


def q_factorial(m: int, v_exp: int) -> FieldElement:
    out = FieldElement(1)
    for k in range(1, m + 1):
        out = out * q_int(k, v_exp)
    return out


def quantum_integer(m: int, i: int, cartan) -> FieldElement:
    """[m]_i with q_i = q^((alpha_i|alpha_i)/2), i.e. v^((alpha_i|alpha_i))."""
    return q_int(m, cartan.v_exponent(i))


def sum_elements(xs: Iterable[FieldElement]) -> FieldElement:
    out = FieldElement(0)
    for x in xs:
        out = out + x
    return out
