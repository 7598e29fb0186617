"""Exact coefficients: multivariate polynomials and rational functions over Q.

Coefficients of field terms live in Q(a, abar, k, Tstar, nu), with extra
symbols allowed for the ansatz unknowns.  Nothing here uses floating point
except :meth:`ParamRational.eval`.

Zero testing never needs a polynomial GCD.  A :class:`ParamRational` keeps
its denominator as a product of normalized factors, combines fractions over
the least common multiple of those factor multisets, and only ever cancels
a factor when trial division is exact.  ``x == 0`` is decided by the
numerator expanding to the zero polynomial.
"""

from __future__ import annotations

import re
from math import gcd
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable name

PARAM_NAMES = ("a", "abar", "k", "Tstar", "nu")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_div(m1: Monomial, m2: Monomial):
    """m1 / m2 when m2 divides m1, else None."""
    d = dict(m1)
    for v, e in m2:
        got = d.get(v, 0)
        if got < e:
            return None
        if got == e:
            del d[v]
        else:
            d[v] = got - e
    return tuple(sorted(d.items()))


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Poly:
    """Sparse multivariate polynomial with :class:`Fraction` coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self._terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p._terms = terms
        return p

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"polynomial {self} is not constant")
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self._terms), default=0)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly()
        return Poly._raw({m: v * c for m, v in self._terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def _lex_key(self, order: list):
        def key(m):
            d = dict(m)
            return tuple(d.get(v, 0) for v in order)
        return key

    def leading(self, order: list | None = None):
        """Leading (monomial, coefficient) in lex order over sorted variable names."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        order = order or sorted(self.variables())
        m = max(self._terms, key=self._lex_key(order))
        return m, self._terms[m]

    def divexact(self, divisor: "Poly"):
        """Quotient if ``divisor`` divides ``self`` exactly, else ``None``."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Poly()
        order = sorted(self.variables() | divisor.variables())
        lm_d, lc_d = divisor.leading(order)
        key = self._lex_key(order)
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            lm_r = max(rem, key=key)
            m = _mono_div(lm_r, lm_d)
            if m is None:
                return None
            c = rem[lm_r] / lc_d
            quot[m] = quot.get(m, 0) + c
            for md, cd in divisor._terms.items():
                mm = _mono_mul(m, md)
                s = rem.get(mm, 0) - c * cd
                if s:
                    rem[mm] = s
                else:
                    rem.pop(mm, None)
        return Poly(quot)

    def primitive(self):
        """Split into (content, p) with p integral, coprime, positive leading coefficient."""
        _, lc = self.leading()
        den = 1
        for c in self._terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self._terms.values():
            g = gcd(g, int(c * den))
        content = Fraction(g, den) * (1 if lc > 0 else -1)
        return content, self.scale(1 / content)

    def eval(self, values: Mapping[str, object]):
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                try:
                    term = term * values[v] ** e
                except KeyError:
                    raise KeyError(f"no value bound for parameter {v!r}") from None
            total = total + term
        return total

    def sorted_items(self):
        def key(item):
            m, _ = item
            return (-sum(e for _, e in m), tuple((v, -e) for v, e in m))
        return sorted(self._terms.items(), key=key)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_items():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                body = _fmt_rational(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{_fmt_rational(abs(c))}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Poly({self})"


Scalar = Union[int, Fraction, "ParamRational"]
_COERCIBLE = (int, Rational, Poly)


class ParamRational:
    """Exact rational function ``numerator / prod(factor**mult)``.

    Denominator factors are primitive integral, non-constant polynomials.  Instances are
    immutable; all arithmetic returns new objects.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: Poly, factors: Iterable = ()):
        merged: dict = {}
        for f, e in factors:
            if f.is_constant():
                num = num.scale(Fraction(1) / f.constant_value() ** e)
                continue
            lc, mf = f.primitive()
            num = num.scale(Fraction(1) / lc ** e)
            merged[mf] = merged.get(mf, 0) + e
        self.num, self.factors = _cancel(num, merged)

    @classmethod
    def _raw(cls, num: Poly, factors: tuple) -> "ParamRational":
        r = object.__new__(cls)
        r.num = num
        r.factors = factors
        return r

    @classmethod
    def coerce(cls, x) -> "ParamRational":
        if isinstance(x, ParamRational):
            return x
        if isinstance(x, Poly):
            return cls._raw(x, ())
        if isinstance(x, (int, Rational)):
            return cls._raw(Poly.const(Fraction(x)), ())
        if isinstance(x, str):
            return parse_param(x)
        raise TypeError(f"cannot interpret {x!r} as an exact coefficient")

    @classmethod
    def symbol(cls, name: str) -> "ParamRational":
        return cls._raw(Poly.var(name), ())

    @property
    def denominator(self) -> Poly:
        d = Poly.const(1)
        for f, e in self.factors:
            d = d * f ** e
        return d

    @property
    def numerator(self) -> Poly:
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.factors and self.num.is_constant()

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return self.num.constant_value()

    def variables(self) -> set:
        out = self.num.variables()
        for f, _ in self.factors:
            out |= f.variables()
        return out

    def __add__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        other = ParamRational.coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.factors == other.factors:
            return ParamRational._raw(*_cancel(self.num + other.num, dict(self.factors)))
        d1, d2 = dict(self.factors), dict(other.factors)
        lcm = {f: max(d1.get(f, 0), d2.get(f, 0)) for f in set(d1) | set(d2)}
        n1 = self.num * _expand({f: e - d1.get(f, 0) for f, e in lcm.items()})
        n2 = other.num * _expand({f: e - d2.get(f, 0) for f, e in lcm.items()})
        return ParamRational._raw(*_cancel(n1 + n2, lcm))

    __radd__ = __add__

    def __neg__(self) -> "ParamRational":
        return ParamRational._raw(-self.num, self.factors)

    def __sub__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        return self + (-ParamRational.coerce(other))

    def __rsub__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        return ParamRational.coerce(other) - self

    def __mul__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        if isinstance(other, (int, Rational)):
            if other == 0:
                return ZERO
            return ParamRational._raw(self.num.scale(other), self.factors)
        other = ParamRational.coerce(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        num = self.num * other.num
        if not self.factors and not other.factors:
            return ParamRational._raw(num, ())
        merged = dict(self.factors)
        for f, e in other.factors:
            merged[f] = merged.get(f, 0) + e
        return ParamRational._raw(*_cancel(num, merged))

    __rmul__ = __mul__

    def inverse(self) -> "ParamRational":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of a zero coefficient")
        return ParamRational(self.denominator, [(self.num, 1)])

    def __truediv__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return ParamRational._raw(self.num.scale(Fraction(1) / Fraction(other)), self.factors)
        return self * ParamRational.coerce(other).inverse()

    def __rtruediv__(self, other) -> "ParamRational":
        if not isinstance(other, _COERCIBLE + (ParamRational,)):
            return NotImplemented
        return ParamRational.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "ParamRational":
        if n < 0:
            return self.inverse() ** (-n)
        return ParamRational._raw(self.num ** n, tuple((f, e * n) for f, e in self.factors))

    def __eq__(self, other) -> bool:
        try:
            other = ParamRational.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def subs(self, mapping: Mapping[str, Scalar]) -> "ParamRational":
        """Substitute exact values or rational functions for symbols."""
        mapping = {v: ParamRational.coerce(x) for v, x in mapping.items()}
        out = _poly_subs(self.num, mapping)
        for f, e in self.factors:
            out = out / (_poly_subs(f, mapping) ** e)
        return out

    def eval(self, values: Mapping[str, object]):
        """Numeric value; Fractions in give a Fraction out, floats give a float."""
        from .errors import DomainError

        num = self.num.eval(values)
        den = 1
        for f, e in self.factors:
            den = den * f.eval(values) ** e
        if den == 0:
            raise DomainError(f"coefficient denominator {self.denominator} vanishes at the given parameters")
        return num / den

    def __float__(self) -> float:
        return float(self.as_fraction())

    def __str__(self) -> str:
        n = str(self.num)
        if not self.factors:
            return n
        dens = []
        for f, e in self.factors:
            dens.append(f"({f})" if e == 1 else f"({f})^{e}")
        n = n if len(self.num._terms) == 1 and not n.startswith("-") else f"({n})"
        return f"{n}/{'*'.join(dens) if len(dens) == 1 else '(' + '*'.join(dens) + ')'}"

    def __repr__(self) -> str:
        return f"ParamRational({self})"


def _expand(factors: Mapping[Poly, int]) -> Poly:
    out = Poly.const(1)
    for f, e in factors.items():
        if e:
            out = out * f ** e
    return out


def _cancel(num: Poly, factors: Mapping[Poly, int]):
    """Drop denominator factors that divide ``num`` exactly; returns (num, factors)."""
    if num.is_zero():
        return num, ()
    kept = []
    for f in sorted(factors, key=str):
        e = factors[f]
        while e > 0:
            q = num.divexact(f)
            if q is None:
                break
            num = q
            e -= 1
        if e > 0:
            kept.append((f, e))
    return num, tuple(kept)


def _poly_subs(p: Poly, mapping: Mapping[str, ParamRational]) -> ParamRational:
    out = ZERO
    for m, c in p._terms.items():
        term = ParamRational.coerce(c)
        for v, e in m:
            term = term * (mapping[v] ** e if v in mapping else ParamRational.symbol(v) ** e)
        out = out + term
    return out


ZERO = ParamRational._raw(Poly(), ())
ONE = ParamRational._raw(Poly.const(1), ())

A = ParamRational.symbol("a")
ABAR = ParamRational.symbol("abar")
K = ParamRational.symbol("k")
TSTAR = ParamRational.symbol("Tstar")
NU = ParamRational.symbol("nu")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def parse_param(text: str) -> ParamRational:
    """Parse an exact coefficient such as ``"2*k*abar/(2*a + 1)"`` or ``"-1/2"``."""
    tokens = []
    for num, ident, op in _TOKEN.findall(text):
        if num:
            tokens.append(("num", int(num)))
        elif ident:
            tokens.append(("id", ident))
        elif op.strip():
            tokens.append(("op", op))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in (("op", "*"), ("op", "/")):
            _, op = take()
            rhs = unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            neg = False
            if peek() == ("op", "-"):
                take()
                neg = True
            kind, n = take()
            if kind != "num":
                raise ValueError(f"integer exponent expected in {text!r}")
            base = base ** (-n if neg else n)
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return ParamRational.coerce(val)
        if kind == "id":
            return ParamRational.symbol(val)
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError(f"unbalanced parentheses in {text!r}")
            return inner
        raise ValueError(f"unexpected token {val!r} in {text!r}")

    result = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result
