"""Exact scalar fields built from the generators x1, x2, x3, R = x1^2 + x2^2, s = T* - t.

A :class:`SymField` is a finite sum of terms

    coeff * x1^p1 * x2^p2 * x3^p3 * R^pR * s^pS [* T^pT]

with ``coeff`` in :class:`~mhdblowup.polys.ParamRational` and every exponent an
:class:`AffineExp` (a rational constant plus rational multiples of symbols,
normally just ``a``).  Cylindrical fields reuse the same terms with ``r = R^(1/2)``
and ``z = x3``.  ``T`` stands for the constant T* itself; it only shows up
after :func:`freeze_time` substitutes ``s -> T*``.

Canonical form: like terms are merged, zero coefficients dropped, and any
non-negative integer power ``x1^n`` with ``n >= 2`` is rewritten through
``x1^2 = R - x2^2``.  With x1-degree in {0, 1} the remaining monomials are
linearly independent, so a field is zero iff its canonical term set is empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, UnsupportedField
from .polys import ONE, ZERO, ParamRational, parse_param

VARIABLES = ("x1", "x2", "x3", "t", "r", "z")
_SLOTS = ("p1", "p2", "p3", "pR", "pS", "pT")
_GEN_NAMES = ("x1", "x2", "x3", "R", "s", "T")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {x!r}")


@dataclass(frozen=True, order=True)
class AffineExp:
    """Exponent ``c0 + sum(c_i * sym_i)``; with only ``a`` this is ``c0 + c1*a``."""

    c0: Fraction = Fraction(0)
    lin: tuple = ()

    @classmethod
    def of(cls, c0=0, c1=0, **others) -> "AffineExp":
        coeffs = {"a": _frac(c1)}
        coeffs.update({name: _frac(v) for name, v in others.items()})
        return cls(_frac(c0), tuple(sorted((n, c) for n, c in coeffs.items() if c != 0)))

    @classmethod
    def coerce(cls, x) -> "AffineExp":
        if isinstance(x, AffineExp):
            return x
        if isinstance(x, ParamRational):
            return cls.from_param(x)
        return cls(_frac(x))

    @classmethod
    def from_param(cls, p: ParamRational) -> "AffineExp":
        """Read a degree <= 1 polynomial coefficient as an exponent."""
        if p.factors:
            raise UnsupportedField(f"exponent {p} is not affine in the parameters")
        c0, lin = Fraction(0), {}
        for mono, c in p.num.terms.items():
            if not mono:
                c0 = c
            elif len(mono) == 1 and mono[0][1] == 1:
                lin[mono[0][0]] = c
            else:
                raise UnsupportedField(f"exponent {p} is not affine in the parameters")
        return cls(c0, tuple(sorted(lin.items())))

    @property
    def c1(self) -> Fraction:
        return dict(self.lin).get("a", Fraction(0))

    def coeff(self, name: str) -> Fraction:
        return dict(self.lin).get(name, Fraction(0))

    def is_constant(self) -> bool:
        return not self.lin

    def is_zero(self) -> bool:
        return not self.lin and self.c0 == 0

    def is_integer(self) -> bool:
        return not self.lin and self.c0.denominator == 1

    @property
    def value(self) -> Fraction:
        if self.lin:
            raise ValueError(f"exponent {self} depends on {[n for n, _ in self.lin]}")
        return self.c0

    def __add__(self, other) -> "AffineExp":
        other = AffineExp.coerce(other)
        lin = dict(self.lin)
        for n, c in other.lin:
            lin[n] = lin.get(n, 0) + c
        return AffineExp(self.c0 + other.c0, tuple(sorted((n, c) for n, c in lin.items() if c != 0)))

    __radd__ = __add__

    def __neg__(self) -> "AffineExp":
        return AffineExp(-self.c0, tuple((n, -c) for n, c in self.lin))

    def __sub__(self, other) -> "AffineExp":
        return self + (-AffineExp.coerce(other))

    def __rsub__(self, other) -> "AffineExp":
        return AffineExp.coerce(other) - self

    def __mul__(self, q) -> "AffineExp":
        q = _frac(q)
        if q == 0:
            return AffineExp()
        return AffineExp(self.c0 * q, tuple((n, c * q) for n, c in self.lin))

    __rmul__ = __mul__

    def as_param(self) -> ParamRational:
        out = ParamRational.coerce(self.c0)
        for n, c in self.lin:
            out = out + c * ParamRational.symbol(n)
        return out

    def subs(self, mapping: Mapping[str, object]) -> "AffineExp":
        out = AffineExp(self.c0)
        for n, c in self.lin:
            if n in mapping:
                out = out + AffineExp.coerce(mapping[n]) * c
            else:
                out = out + AffineExp(Fraction(0), ((n, c),))
        return out

    def eval(self, values: Mapping[str, object]) -> float:
        total = float(self.c0)
        for n, c in self.lin:
            try:
                total += float(c) * float(values[n])
            except KeyError:
                raise DomainError(f"exponent {self} needs a value for {n!r}") from None
        return total

    def text(self, force_parens: bool = False) -> str:
        if not self.lin and not force_parens:
            return _fmt_q(self.c0)
        lin = dict(self.lin)
        parts = [_fmt_q(self.c0), f"{_fmt_q(lin.pop('a', Fraction(0)))}*a"]
        parts += [f"{_fmt_q(c)}*{n}" for n, c in sorted(lin.items())]
        return "(" + "+".join(parts) + ")"

    def __str__(self) -> str:
        return self.text()


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_ZERO_EXP = AffineExp()
Key = tuple  # (p1, p2, p3, pR, pS, pT) of AffineExp


@dataclass(frozen=True)
class Term:
    coeff: ParamRational
    p1: AffineExp = _ZERO_EXP
    p2: AffineExp = _ZERO_EXP
    p3: AffineExp = _ZERO_EXP
    pR: AffineExp = _ZERO_EXP
    pS: AffineExp = _ZERO_EXP
    pT: AffineExp = _ZERO_EXP

    @property
    def key(self) -> Key:
        return (self.p1, self.p2, self.p3, self.pR, self.pS, self.pT)

    def text(self) -> str:
        c = str(self.coeff)
        parts = [f"({c})"]
        parts += [f"x1^{self.p1.text()}", f"x2^{self.p2.text()}", f"x3^{self.p3.text()}",
                  f"R^{self.pR.text()}", f"s^{self.pS.text(force_parens=True)}"]
        if not self.pT.is_zero():
            parts.append(f"T^{self.pT.text(force_parens=True)}")
        return " * ".join(parts)


def _reduce_into(out: dict, key: Key, coeff: ParamRational) -> None:
    """Accumulate one term into ``out``, applying the x1^2 = R - x2^2 rewrite."""
    stack = [(key, coeff)]
    while stack:
        key, coeff = stack.pop()
        p1 = key[0]
        if p1.is_integer() and p1.c0 >= 2:
            base = (p1 - 2,) + key[1:]
            stack.append(((base[0], base[1], base[2], base[3] + 1, base[4], base[5]), coeff))
            stack.append(((base[0], base[1] + 2, base[2], base[3], base[4], base[5]), -coeff))
            continue
        prev = out.get(key)
        total = coeff if prev is None else prev + coeff
        if total.is_zero():
            out.pop(key, None)
        else:
            out[key] = total


class SymField:
    """Immutable, canonically normalized sum of :class:`Term` objects."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        out: dict = {}
        for t in terms:
            if not t.coeff.is_zero():
                _reduce_into(out, t.key, t.coeff)
        self._terms = out

    @classmethod
    def _from_map(cls, mapping: dict) -> "SymField":
        f = object.__new__(cls)
        f._terms = mapping
        return f

    @classmethod
    def zero(cls) -> "SymField":
        return cls._from_map({})

    @classmethod
    def const(cls, c) -> "SymField":
        return cls([Term(ParamRational.coerce(c))])

    @classmethod
    def monomial(cls, coeff=1, x1=0, x2=0, x3=0, R=0, s=0, T=0) -> "SymField":
        exps = [AffineExp.coerce(e) for e in (x1, x2, x3, R, s, T)]
        return cls([Term(ParamRational.coerce(coeff), *exps)])

    @property
    def terms(self) -> tuple:
        return tuple(Term(c, *k) for k, c in sorted(self._terms.items(), key=lambda kv: kv[0]))

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def normalize(self) -> "SymField":
        return SymField(self.terms)

    def __add__(self, other) -> "SymField":
        other = _as_field(other)
        if not other._terms:
            return self
        out = dict(self._terms)
        for k, c in other._terms.items():
            _reduce_into(out, k, c)
        return SymField._from_map(out)

    __radd__ = __add__

    def __neg__(self) -> "SymField":
        return SymField._from_map({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "SymField":
        return self + (-_as_field(other))

    def __rsub__(self, other) -> "SymField":
        return _as_field(other) - self

    def __mul__(self, other) -> "SymField":
        if isinstance(other, (int, Rational, ParamRational)):
            c = ParamRational.coerce(other)
            if c.is_zero():
                return SymField.zero()
            return SymField._from_map({k: v * c for k, v in self._terms.items()})
        other = _as_field(other)
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = tuple(e1 + e2 for e1, e2 in zip(k1, k2))
                _reduce_into(out, key, c1 * c2)
        return SymField._from_map(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SymField":
        if isinstance(other, (int, Rational, ParamRational)):
            return self * ParamRational.coerce(other).inverse()
        return self * _as_field(other).reciprocal()

    def __rtruediv__(self, other) -> "SymField":
        return _as_field(other) * self.reciprocal()

    def reciprocal(self) -> "SymField":
        """1/f for a single-term field."""
        if len(self._terms) != 1:
            raise UnsupportedField("only single-term fields can be inverted inside the class")
        (key, c), = self._terms.items()
        return SymField._from_map({tuple(-e for e in key): c.inverse()})

    def __pow__(self, n) -> "SymField":
        if isinstance(n, int) and n >= 0:
            out = SymField.const(1)
            for _ in range(n):
                out = out * self
            return out
        if len(self._terms) != 1:
            raise UnsupportedField("non-integer powers need a single-term field")
        (key, c), = self._terms.items()
        e = AffineExp.coerce(n)
        if not c == ONE:
            if not e.is_integer():
                raise UnsupportedField("non-integer power of a field with a non-unit coefficient")
            c = c ** int(e.value)
        return SymField([Term(c, *_scale_key(key, e))])

    def __eq__(self, other) -> bool:
        try:
            other = _as_field(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def diff(self, var: str) -> "SymField":
        return diff(self, var)

    def subs(self, mapping: Mapping[str, object]) -> "SymField":
        """Substitute parameter symbols in coefficients and exponents."""
        out: dict = {}
        for key, c in self._terms.items():
            new_key = tuple(e.subs(mapping) for e in key)
            _reduce_into(out, new_key, c.subs(mapping))
        return SymField._from_map(out)

    def eval(self, point, params: Mapping[str, object], tstar=None):
        return evaluate(self, point, params, tstar=tstar)

    def text(self) -> str:
        return to_text(self)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"SymField({to_text(self)})"


def _scale_key(key: Key, e: AffineExp) -> Key:
    out = []
    for k in key:
        if k.is_zero():
            out.append(k)
        elif k.is_constant():
            out.append(e * k.c0)
        elif e.is_constant():
            out.append(k * e.c0)
        else:
            raise UnsupportedField("exponent would be quadratic in the parameters")
    return tuple(out)


def _as_field(x) -> SymField:
    if isinstance(x, SymField):
        return x
    if isinstance(x, (int, Rational, ParamRational)):
        return SymField.const(x)
    raise TypeError(f"cannot use {x!r} as a field")


# generators
X1 = SymField.monomial(x1=1)
X2 = SymField.monomial(x2=1)
X3 = SymField.monomial(x3=1)
RSQ = SymField.monomial(R=1)
S = SymField.monomial(s=1)
RCYL = SymField.monomial(R=Fraction(1, 2))
Z = X3


def diff(f: SymField, var: str) -> SymField:
    """Exact partial derivative in ``x1, x2, x3, t`` (Cartesian) or ``r, z`` (cylindrical).

    The time derivative acts through ``s = T* - t`` so ``d/dt s^e = -e s^(e-1)``;
    ``e`` may depend on ``a`` and is folded into the coefficient polynomial.
    """
    if var not in VARIABLES:
        raise ValueError(f"unknown variable {var!r}; expected one of {VARIABLES}")
    out: dict = {}
    one = AffineExp(Fraction(1))
    for key, c in f.items():
        p1, p2, p3, pR, pS, pT = key
        if var in ("x1", "x2"):
            p, idx = (p1, 0) if var == "x1" else (p2, 1)
            if not p.is_zero():
                k = list(key)
                k[idx] = p - one
                _reduce_into(out, tuple(k), c * p.as_param())
            if not pR.is_zero():
                k = list(key)
                k[idx] = k[idx] + one
                k[3] = pR - one
                _reduce_into(out, tuple(k), c * (2 * pR.as_param()))
        elif var in ("x3", "z"):
            if not p3.is_zero():
                _reduce_into(out, (p1, p2, p3 - one, pR, pS, pT), c * p3.as_param())
        elif var == "t":
            if not pS.is_zero():
                _reduce_into(out, (p1, p2, p3, pR, pS - one, pT), -(c * pS.as_param()))
        else:  # r, with R^q = r^(2q)
            if not (p1.is_zero() and p2.is_zero()):
                raise UnsupportedField("d/dr is only defined on axisymmetric fields (no x1, x2 factors)")
            if not pR.is_zero():
                _reduce_into(out, (p1, p2, p3, pR - Fraction(1, 2), pS, pT), c * (2 * pR.as_param()))
    return SymField._from_map(out)


def laplacian(f: SymField) -> SymField:
    """Cartesian Laplacian, d2/dx1^2 + d2/dx2^2 + d2/dx3^2."""
    return sum((diff(diff(f, v), v) for v in ("x1", "x2", "x3")), SymField.zero())


def freeze_time(f: SymField, tstar: ParamRational | None = None) -> SymField:
    """Replace s by the constant T* (the t = 0 slice).

    Integer powers of T* are folded into the coefficient; other powers stay on
    the ``T`` generator.  ``tstar`` defaults to the symbol ``Tstar``; a rational
    value folds every constant exponent it can.
    """
    tstar = ParamRational.symbol("Tstar") if tstar is None else ParamRational.coerce(tstar)
    out: dict = {}
    for key, c in f.items():
        p1, p2, p3, pR, pS, pT = key
        e = pS + pT
        if e.is_integer():
            _reduce_into(out, (p1, p2, p3, pR, _ZERO_EXP, _ZERO_EXP), c * tstar ** int(e.value))
        else:
            _reduce_into(out, (p1, p2, p3, pR, _ZERO_EXP, e), c)
    return SymField._from_map(out)


# --- evaluation -----------------------------------------------------------

def compile_terms(f: SymField, params: Mapping[str, object]):
    """Bind parameters: returns ``(coeffs[M], exps[M, 6])`` float arrays."""
    coeffs = np.empty(len(f), dtype=np.float64)
    exps = np.empty((len(f), 6), dtype=np.float64)
    for i, (key, c) in enumerate(f.items()):
        try:
            coeffs[i] = float(c.eval(params))
        except KeyError as exc:
            raise DomainError(str(exc)) from None
        for j, e in enumerate(key):
            exps[i, j] = e.eval(params)
    return coeffs, exps


def check_domain(exps: np.ndarray, x1, x2, x3, s, tstar: float) -> None:
    """Raise DomainError if any term is undefined at the given points."""
    if np.any(np.asarray(s) <= 0):
        raise DomainError("t >= T*: fields are only defined strictly before the singular time")
    if exps.size == 0:
        return
    pR = exps[:, 3]
    if np.any((pR < 0) | (pR != np.round(pR))):
        R = np.asarray(x1) ** 2 + np.asarray(x2) ** 2
        if np.any(R <= 0):
            raise DomainError("point on the symmetry axis where a term has a singular or fractional R power")
    for j, x in enumerate((x1, x2, x3)):
        col = exps[:, j]
        if np.any(col != np.round(col)) and np.any(np.asarray(x) < 0):
            raise DomainError(f"fractional power of a negative x{j + 1}")
        if np.any(col < 0) and np.any(np.asarray(x) == 0):
            raise DomainError(f"negative power of x{j + 1} at x{j + 1} = 0")
    if np.any(exps[:, 5] != 0) and tstar <= 0:
        raise DomainError("T* must be positive")


def evaluate(f: SymField, point, params: Mapping[str, object], tstar=None):
    """Evaluate at ``point = (x1, x2, x3, t)``; scalars or broadcastable arrays.

    ``tstar`` overrides ``params['Tstar']`` (bundles produced by scaling carry
    their own singular time).
    """
    from .kernels import eval_terms

    x1, x2, x3, t = (np.asarray(p, dtype=np.float64) for p in point)
    shape = np.broadcast(x1, x2, x3, t).shape
    if tstar is None:
        try:
            tstar = params["Tstar"]
        except KeyError:
            raise DomainError("no value bound for 'Tstar'") from None
    tstar = float(ParamRational.coerce(tstar).eval(params)) if isinstance(tstar, ParamRational) else float(tstar)
    x1, x2, x3, t = (np.ascontiguousarray(np.broadcast_to(v, shape), dtype=np.float64).ravel()
                     for v in (x1, x2, x3, t))
    s = tstar - t
    coeffs, exps = compile_terms(f, params)
    check_domain(exps, x1, x2, x3, s, tstar)
    out = eval_terms(coeffs, exps, x1, x2, x3, s, tstar).reshape(shape)
    return float(out) if out.ndim == 0 else out


# --- canonical text ---------------------------------------------------------

def to_text(f: SymField) -> str:
    """Canonical serialization: ``(coeff) * x1^p1 * x2^p2 * x3^p3 * R^pR * s^(c0+c1*a)`` terms joined by `` + ``."""
    if f.is_zero():
        return "0"
    return " + ".join(t.text() for t in f.terms)


def _split_top(text: str, sep: str) -> list:
    parts, depth, start, i = [], 0, 0, 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append(text[start:])
    return parts


_EXP_TERM = re.compile(r"^([+-]?\d+(?:/\d+)?)(?:\*([A-Za-z_]\w*))?$")


def _parse_exp(text: str) -> AffineExp:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    out = AffineExp()
    for piece in re.split(r"\+(?=[-\d])", text):
        m = _EXP_TERM.match(piece.strip())
        if not m:
            raise ValueError(f"bad exponent {text!r}")
        q = Fraction(m.group(1))
        out = out + (AffineExp(q) if m.group(2) is None else AffineExp(Fraction(0), ((m.group(2), q),)))
    return out


def from_text(text: str) -> SymField:
    """Inverse of :func:`to_text`."""
    text = text.strip()
    if text == "0":
        return SymField.zero()
    terms = []
    for chunk in _split_top(text, " + "):
        factors = _split_top(chunk.strip(), " * ")
        coeff = parse_param(factors[0])
        exps = dict.fromkeys(_GEN_NAMES, _ZERO_EXP)
        for fac in factors[1:]:
            name, _, exp = fac.partition("^")
            if name not in exps:
                raise ValueError(f"unknown generator {name!r} in {chunk!r}")
            exps[name] = _parse_exp(exp)
        terms.append(Term(coeff, *(exps[n] for n in _GEN_NAMES)))
    return SymField(terms)


__all__ = [
    "AffineExp", "Term", "SymField", "diff", "laplacian", "freeze_time", "evaluate",
    "compile_terms", "to_text", "from_text", "X1", "X2", "X3", "RSQ", "RCYL", "S", "Z", "ZERO", "ONE",
]
