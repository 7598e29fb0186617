"""The explicit blowup families, their pressures, initial data and the NSE reductions.

Every constructor builds the fields once with symbolic ``a, abar, k`` and then
substitutes whatever :class:`FamilyParams` pins down, so the same bundle
serves exact verification (all symbolic) and numeric sweeps (all bound).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ParamError
from .fields import RCYL, RSQ, S, X1, X2, X3, AffineExp, SymField, freeze_time
from .polys import A, ABAR, K, ParamRational, TSTAR
from .residuals import (
    CARTESIAN,
    CYLINDRICAL,
    Exclusion,
    SolutionBundle,
    VecField3,
)

ONE_FAMILY, TWO_FAMILY = "one", "two"
FORMS = (CARTESIAN, CYLINDRICAL)

_S2A = S ** AffineExp.of(0, 2)          # s^(2a)
_S2A1 = S ** AffineExp.of(1, 2)         # s^(2a+1)
_S4A = S ** AffineExp.of(0, 4)          # s^(4a)
_S4A2 = S ** AffineExp.of(2, 4)         # s^(2(2a+1))
_INV_S = S ** -1
_INV_S2 = S ** -2
_HALF = Fraction(1, 2)


def _coerce_param(x, name: str):
    if x is None:
        return ParamRational.symbol(name)
    if isinstance(x, float):
        raise ParamError(f"{name} must be exact (int, Fraction or 'num/den' string), got {x!r}")
    try:
        return ParamRational.coerce(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParamError(f"cannot read {name}={x!r}: {exc}") from None


@dataclass(frozen=True, eq=False)
class FamilyParams:
    """Parameter choice for a family; ``None`` keeps a parameter symbolic.

    ``a`` is either symbolic or a rational number because it appears in
    exponents.  ``abar``, ``k`` and ``tstar`` may also be rational functions of
    the symbols (used when comparing rescaled bundles).
    """

    a: object = None
    abar: object = None
    k: object = None
    tstar: object = None

    def __post_init__(self):
        a = _coerce_param(self.a, "a")
        if not (a == A or a.is_constant()):
            raise ParamError("a must be the symbol a or a rational number")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "abar", _coerce_param(self.abar, "abar"))
        object.__setattr__(self, "k", _coerce_param(self.k, "k"))
        tstar = _coerce_param(self.tstar, "Tstar")
        if tstar.is_constant() and tstar.as_fraction() <= 0:
            raise ParamError(f"Tstar must be positive, got {tstar}")
        object.__setattr__(self, "tstar", tstar)

    def value(self, name: str):
        """The exact rational value of a parameter, or None while it is symbolic."""
        p = getattr(self, name)
        return p.as_fraction() if p.is_constant() else None

    def substitution(self, *names: str) -> dict:
        out = {}
        for name in names:
            p = getattr(self, name)
            if not p == ParamRational.symbol(name):
                out[name] = p
        return out

    def bindings(self) -> dict:
        """Concrete rational values keyed by symbol name (``tstar`` as ``Tstar``)."""
        out = {}
        for name, key in (("a", "a"), ("abar", "abar"), ("k", "k"), ("tstar", "Tstar")):
            val = self.value(name)
            if val is not None:
                out[key] = val
        return out


def _exclusions(family: str, nse: bool = False) -> tuple:
    if nse:
        return (Exclusion("a", Fraction(0)), Exclusion("k", Fraction(0)))
    bad_a = Fraction(-1, 2) if family == ONE_FAMILY else Fraction(-1, 4)
    return (Exclusion("a", bad_a), Exclusion("a", Fraction(0)),
            Exclusion("k", Fraction(0)), Exclusion("abar", Fraction(0)))


def _check(p: FamilyParams, excluded: tuple, label: str) -> None:
    for ex in excluded:
        val = p.value(ex.param)
        if val is not None and val == ex.value:
            raise ParamError(f"{label}: {ex.param} = {val} is excluded ({ex})")


def _finish(v: VecField3, H: VecField3, P: SymField, p: FamilyParams, excluded, tag) -> SolutionBundle:
    mapping = p.substitution("a", "abar", "k")
    if mapping:
        v, H, P = v.subs(mapping), H.subs(mapping), P.subs(mapping)
    return SolutionBundle(v, H, P, excluded, tag, p.tstar)


def _velocity(family: str, form: str) -> VecField3:
    if form == CARTESIAN:
        swirl1, swirl2 = (K * X2 / RSQ, -K * X1 / RSQ) if family == ONE_FAMILY else (K * X2 * _S2A, -K * X1 * _S2A)
        return VecField3(A * X1 * _INV_S + swirl1, A * X2 * _INV_S + swirl2, -2 * A * X3 * _INV_S)
    swirl = K / RCYL if family == ONE_FAMILY else K * RCYL * _S2A
    return VecField3(A * RCYL * _INV_S, swirl, -2 * A * X3 * _INV_S, CYLINDRICAL)


def _magnetic(family: str, form: str) -> VecField3:
    if family == ONE_FAMILY:
        c = 2 * ABAR * K / (2 * A + 1)
        if form == CARTESIAN:
            return VecField3(ABAR * X1 + c * X2 * S / RSQ, ABAR * X2 - c * X1 * S / RSQ, -2 * ABAR * X3)
        return VecField3(ABAR * RCYL, c * S / RCYL, -2 * ABAR * X3, CYLINDRICAL)
    c = 2 * ABAR * K / (4 * A + 1)
    if form == CARTESIAN:
        return VecField3(ABAR * X1 + c * X2 * X3 * _S2A1, ABAR * X2 - c * X1 * X3 * _S2A1, -2 * ABAR * X3)
    return VecField3(ABAR * RCYL, c * RCYL * X3 * _S2A1, -2 * ABAR * X3, CYLINDRICAL)


def _pressure(family: str, magnetic: bool = True) -> SymField:
    # written in R = r^2 and x3 = z, so one expression serves both frames
    base = (-_HALF * A * (A + 1)) * RSQ * _INV_S2 + A * (1 - 2 * A) * X3 * X3 * _INV_S2
    if family == ONE_FAMILY:
        return base - _HALF * K * K / RSQ
    base = base + _HALF * K * K * RSQ * _S4A
    if not magnetic:
        return base
    c = ABAR * ABAR * K * K * (1 / (4 * A + 1)) ** 2
    return base - (4 * c) * RSQ * X3 * X3 * _S4A2 - (2 * c) * X3 * X3 * RSQ * _S4A2


def _family(family: str, p: FamilyParams | None, form: str) -> SolutionBundle:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    p = p or FamilyParams()
    excluded = _exclusions(family)
    _check(p, excluded, f"family {family}")
    return _finish(_velocity(family, form), _magnetic(family, form), _pressure(family), p, excluded,
                   f"family-{family}")


def family_one(p: FamilyParams | None = None, form: str = CARTESIAN) -> SolutionBundle:
    """First family: swirl ``k/r``, magnetic swirl ``2 k abar s / ((2a+1) r)``."""
    return _family(ONE_FAMILY, p, form)


def family_two(p: FamilyParams | None = None, form: str = CARTESIAN) -> SolutionBundle:
    """Second family: swirl ``k r s^(2a)``, magnetic swirl ``2 abar k r z s^(2a+1) / (4a+1)``."""
    return _family(TWO_FAMILY, p, form)


def family(which: str, p: FamilyParams | None = None, form: str = CARTESIAN) -> SolutionBundle:
    which = _which(which)
    return _family(which, p, form)


def _which(which: str) -> str:
    w = str(which).lower()
    if w in ("1", "one"):
        return ONE_FAMILY
    if w in ("2", "two"):
        return TWO_FAMILY
    raise ParamError(f"unknown family {which!r}; expected 'one' or 'two'")


def nse_family(which: str, p: FamilyParams | None = None, form: str = CARTESIAN) -> SolutionBundle:
    """Navier-Stokes reduction: H = 0 and the abar-free part of the pressure."""
    which = _which(which)
    p = p or FamilyParams(abar=0)
    if not (p.abar.is_zero() or p.abar == ABAR):
        raise ParamError(f"the Navier-Stokes reduction needs abar = 0, got {p.abar}")
    excluded = _exclusions(which, nse=True)
    _check(p, excluded, f"nse {which}")
    return _finish(_velocity(which, form), VecField3.zero(form), _pressure(which, magnetic=False), p,
                   excluded, f"nse-{which}")


def initial_data(b: SolutionBundle) -> tuple:
    """``(v, H)`` at t = 0, i.e. with s replaced by the bundle's T*."""
    freeze = lambda f: freeze_time(f, b.tstar)  # noqa: E731
    return b.v.map(freeze), b.H.map(freeze)


MANIFEST = (
    {
        "id": "family-one",
        "constraints": ["a != -1/2", "a != 0", "k != 0", "abar != 0", "Tstar > 0"],
        "provenance": {
            "fields": "main theorem, first family (Cartesian); reduced-system proposition, first family (cylindrical)",
            "pressure": "pressure remark, first formula",
            "initial_data": "main theorem, first family initial data",
        },
    },
    {
        "id": "family-two",
        "constraints": ["a != -1/4", "a != 0", "k != 0", "abar != 0", "Tstar > 0"],
        "provenance": {
            "fields": "main theorem, second family (Cartesian); reduced-system proposition, second family (cylindrical)",
            "pressure": "pressure remark, second formula",
            "initial_data": "main theorem, second family initial data",
        },
    },
    {
        "id": "nse-one",
        "constraints": ["a != 0", "k != 0", "abar = 0", "Tstar > 0"],
        "provenance": {"fields": "Navier-Stokes proposition, first family", "pressure": "first pressure without abar"},
    },
    {
        "id": "nse-two",
        "constraints": ["a != 0", "k != 0", "abar = 0", "Tstar > 0"],
        "provenance": {"fields": "Navier-Stokes proposition, second family", "pressure": "second pressure without abar"},
    },
)


def manifest() -> list:
    return [dict(m) for m in MANIFEST]


__all__ = [
    "ONE_FAMILY", "TWO_FAMILY", "FamilyParams", "family_one", "family_two", "family", "nse_family",
    "initial_data", "manifest", "MANIFEST",
]
