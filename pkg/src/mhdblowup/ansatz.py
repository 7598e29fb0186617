"""Re-derive the magnetic field of each family from its velocity.

Two trial shapes are substituted into the reduced axisymmetric equations:

* radial:  ``H_r = abar r s^(-alpha)``, ``H_z = -2 abar z s^(-alpha)``
* swirl:   ``H_theta = kbar r^p z^q s^(-beta)``

Unknown exponents ride along as extra symbols inside :class:`AffineExp`, so
the residual is an ordinary field whose terms can be grouped by exponent
signature.  Matching signatures gives a linear system for the exponents; the
surviving coefficient equation is linear in ``kbar``.

``equation="printed"`` uses the swirl-induction forcing as it is displayed in
the derivation (``2 k abar / r`` and ``2 k abar r s^(2a)``).
``equation="derived"`` uses the forcing that actually follows from the
reduced system, ``(1/r) H_r v_theta - H_r d_r v_theta``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .catalog import ONE_FAMILY, FamilyParams, _velocity, _which
from .errors import NoSolution, ParamError
from .fields import RCYL, RSQ, X3, AffineExp, SymField, _SLOTS, diff
from .polys import ABAR, K, ParamRational, Poly
from .residuals import CYLINDRICAL, cyl_equation_pieces, _sum

UNKNOWN_EXPONENTS = ("p", "q", "beta")
KBAR = ParamRational.symbol("kbar")
ALPHA = "alpha"
_EQUATIONS = ("printed", "derived")


def _sym(name: str, c=1) -> AffineExp:
    return AffineExp(Fraction(0), ((name, Fraction(c)),))


def _groups(f: SymField) -> dict:
    return {key: c for key, c in f.items()}


def _strip_factor(c: ParamRational, *syms: str) -> ParamRational:
    """Divide out nonzero symbolic factors such as ``abar`` and ``kbar``."""
    num = c.num
    for s in syms:
        q = num.divexact(Poly.var(s))
        if q is not None:
            num = q
    return ParamRational(num, c.factors)


def _velocity_for(which: str, params: FamilyParams | None) -> tuple:
    params = params or FamilyParams()
    for name in ("a", "k", "abar"):
        val = params.value(name)
        if val is not None and val == 0:
            raise ParamError(f"{name} = 0 is excluded for the velocity family")
    v = _velocity(which, CYLINDRICAL)
    mapping = params.substitution("a", "abar", "k")
    if mapping:
        v = v.subs(mapping)
    return v, mapping


# --- linear exponent system ---------------------------------------------------

class _LinearSystem:
    """Incremental Gauss-Jordan elimination over Q with affine right-hand sides."""

    def __init__(self, unknowns):
        self.unknowns = tuple(unknowns)
        self.rows: dict = {}  # pivot -> (coeffs, rhs)

    def _reduce(self, coeffs: dict, rhs: AffineExp):
        coeffs = dict(coeffs)
        for piv, (rc, rr) in self.rows.items():
            f = coeffs.get(piv, 0)
            if f:
                for u, c in rc.items():
                    coeffs[u] = coeffs.get(u, 0) - f * c
                rhs = rhs - rr * f
        return {u: c for u, c in coeffs.items() if c != 0}, rhs

    def add(self, coeffs: dict, rhs: AffineExp) -> str:
        """Returns 'new', 'redundant' or 'conflict'."""
        coeffs, rhs = self._reduce(coeffs, rhs)
        if not coeffs:
            return "redundant" if rhs.is_zero() else "conflict"
        piv = next(u for u in self.unknowns if u in coeffs)
        lead = coeffs[piv]
        coeffs = {u: c / lead for u, c in coeffs.items()}
        rhs = rhs * (1 / lead)
        for other, (rc, rr) in list(self.rows.items()):
            f = rc.get(piv, 0)
            if f:
                new = {u: rc.get(u, 0) - f * coeffs.get(u, 0) for u in set(rc) | set(coeffs)}
                self.rows[other] = ({u: c for u, c in new.items() if c != 0}, rr - rhs * f)
        self.rows[piv] = (coeffs, rhs)
        return "new"

    def solution(self) -> dict:
        out = {}
        for u in self.unknowns:
            row = self.rows.get(u)
            if row is None or set(row[0]) != {u}:
                raise NoSolution(f"exponent {u} is not determined by the balance")
            out[u] = row[1]
        return out


def _as_equation(e: AffineExp, unknowns) -> tuple:
    """``e = 0`` split into (unknown coefficients, right-hand side)."""
    coeffs = {n: c for n, c in e.lin if n in unknowns}
    rest = AffineExp(e.c0, tuple((n, c) for n, c in e.lin if n not in unknowns))
    return coeffs, -rest


def _fmt_eq(coeffs: dict, rhs: AffineExp) -> str:
    lhs = " + ".join(f"{c}*{u}" if c != 1 else u for u, c in coeffs.items()) or "0"
    return f"{lhs} = {rhs.text()}"


# --- solved objects --------------------------------------------------------------

@dataclass
class ThetaAnsatz:
    """Solved ``H_theta = kbar r^p z^q s^(-beta)``."""

    family: str
    p: AffineExp
    q: AffineExp
    beta: AffineExp
    kbar: ParamRational
    verified: bool
    equation: str
    mismatches: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def s_exponent(self) -> AffineExp:
        return -self.beta

    def constraint_value(self):
        """``p - 2q + 1``; zero for a solved ansatz."""
        return self.p - self.q * 2 + 1

    def field(self) -> SymField:
        return SymField.monomial(self.kbar, x3=self.q, R=self.p * Fraction(1, 2), s=-self.beta)

    def trace_text(self) -> str:
        return json.dumps({"family": self.family, "equation": self.equation, "steps": self.trace},
                          indent=2, sort_keys=True) + "\n"


def _trace(trace: list, step: str, equation: str, result: str = "") -> None:
    trace.append({"step": step, "equation": equation, "result": result})


def _radial_trial(alpha: AffineExp) -> tuple:
    s_pow = SymField.monomial(s=-alpha)
    return ABAR * RCYL * s_pow, -2 * ABAR * X3 * s_pow


def solve_radial(which: str, params: FamilyParams | None = None) -> Fraction:
    """Exponent ``alpha`` of the radial/axial magnetic trial fields."""
    which = _which(which)
    v, mapping = _velocity_for(which, params)
    alpha = _sym(ALPHA)
    Hr, Hz = _radial_trial(alpha)
    if mapping:
        Hr, Hz = Hr.subs(mapping), Hz.subs(mapping)
    zero = SymField.zero()
    res = _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, Hr, zero, Hz, zero)[3])
    system = _LinearSystem((ALPHA,))
    for key, c in res.items():
        eq = AffineExp.from_param(_strip_factor(c, "abar"))
        coeffs, rhs = _as_equation(eq, (ALPHA,))
        if system.add(coeffs, rhs) == "conflict":
            raise NoSolution(f"radial balance is inconsistent: {c} = 0")
    try:
        sol = system.solution()[ALPHA]
    except NoSolution:
        raise NoSolution("radial balance does not fix alpha") from None
    value = sol.value
    Hr, Hz = (f.subs({ALPHA: value}) for f in _radial_trial(alpha))
    axial = _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, Hr.subs(mapping), zero, Hz.subs(mapping), zero)[5])
    if not axial.is_zero():
        raise NoSolution("axial balance fails at the radial solution")
    return value


def _printed_forcing(which: str, Hr: SymField) -> SymField:
    if which == ONE_FAMILY:
        return 2 * K * RSQ.reciprocal() * Hr
    return 2 * K * SymField.monomial(s=AffineExp.of(0, 2)) * Hr


def _forcing_pieces(v, Hr, Hz) -> SymField:
    inv_r = RCYL.reciprocal()
    return inv_r * Hr * v.c2 - Hr * diff(v.c2, "r") - Hz * diff(v.c2, "z")


def solve_theta(which: str, params: FamilyParams | None = None, equation: str = "printed",
                strict: bool = False) -> ThetaAnsatz:
    """Solve the swirl-induction balance for ``(p, q, beta, kbar)``.

    Exponent equations are accepted in a fixed order: the magnetic constraint
    from the swirl-momentum equation, then signature matching in s, r and z.
    An equation that contradicts the ones already accepted is recorded as a
    mismatch (or raises with ``strict=True``).  ``verified`` reports whether
    the solved field satisfies the reduced system itself.

    The balance is always solved with ``a`` symbolic; a concrete ``a`` is bound
    afterwards so that a degenerate value is reported through the vanishing
    denominator of ``kbar``.
    """
    params = params or FamilyParams()
    if params.value("a") is None:
        return _finish(_solve_theta(which, params, equation, strict))
    if params.value("a") == 0:
        raise ParamError("a = 0 is excluded for the velocity family")
    sym = _solve_theta(which, FamilyParams(abar=params.abar, k=params.k), equation, strict)
    bind = params.substitution("a", "abar", "k")
    for fac, _ in sym.kbar.factors:
        if ParamRational(fac).subs(bind).is_zero():
            raise NoSolution(f"kbar denominator {fac} vanishes at a = {params.value('a')}")
    a_only = {"a": bind["a"]}
    bound = [_const(AffineExp.coerce(e).subs(a_only)) for e in (sym.p, sym.q, sym.beta)]
    return _finish(ThetaAnsatz(sym.family, *bound, sym.kbar.subs(bind), sym.verified, sym.equation,
                               sym.mismatches, list(sym.trace)))


def _finish(t: ThetaAnsatz) -> ThetaAnsatz:
    _trace(t.trace, "result", f"p = {t.p}, q = {t.q}, beta = {t.beta}, s exponent = {t.s_exponent}",
           f"verified = {t.verified}")
    _trace(t.trace, "result", "kbar", str(t.kbar))
    return t


def _const(e: AffineExp):
    return e.value if e.is_constant() else e


def _solve_theta(which: str, params: FamilyParams, equation: str, strict: bool) -> ThetaAnsatz:
    which = _which(which)
    if equation not in _EQUATIONS:
        raise ValueError(f"equation must be one of {_EQUATIONS}")
    v, mapping = _velocity_for(which, params)
    trace: list = []
    Hr, Hz = ABAR * RCYL, -2 * ABAR * X3
    if mapping:
        Hr, Hz = Hr.subs(mapping), Hz.subs(mapping)
    p, q, beta = (_sym(n) for n in UNKNOWN_EXPONENTS)
    Hth = SymField.monomial(KBAR, x3=q, R=p * Fraction(1, 2), s=-beta)
    _trace(trace, "radial", "H_r = abar r s^(-alpha), H_z = -2 abar z s^(-alpha)",
           f"alpha = {solve_radial(which, params)}")
    _trace(trace, "ansatz", "H_theta = kbar r^p z^q s^(-beta)")

    zero = SymField.zero()
    system = _LinearSystem(UNKNOWN_EXPONENTS)
    mismatches: list = []

    def accept(label: str, e: AffineExp):
        coeffs, rhs = _as_equation(e, UNKNOWN_EXPONENTS)
        text = _fmt_eq(coeffs, rhs)
        status = system.add(coeffs, rhs)
        if status == "conflict":
            if strict:
                raise NoSolution(f"{label} contradicts the accepted equations: {text}")
            mismatches.append(f"{label}: {text}")
        _trace(trace, label, text, status)

    # magnetic constraint from the swirl momentum equation
    mag = _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, Hr, Hth, Hz, zero)[1])
    mag = mag - _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, zero, zero, zero, zero)[1])
    for key, c in mag.items():
        accept("magnetic constraint", AffineExp.from_param(_strip_factor(c, "abar", "kbar")))

    # swirl induction: homogeneous part plus forcing
    pieces = cyl_equation_pieces(v.c1, v.c2, v.c3, Hr, Hth, Hz, zero)[4]
    full = _sum(pieces)
    true_forcing = _forcing_pieces(v, Hr, Hz)
    homogeneous = full - true_forcing
    forcing = _printed_forcing(which, Hr) if equation == "printed" else true_forcing
    _trace(trace, "forcing", forcing.text())

    groups = _groups(homogeneous)
    if not groups:
        raise NoSolution("swirl induction balance is empty")
    main_key = max(groups, key=lambda k: len(groups[k].num.terms))
    ranked = sorted(len(g.num.terms) for g in groups.values())
    if len(ranked) > 1 and ranked[-1] == ranked[-2]:
        raise NoSolution("no dominant homogeneous group")
    if forcing.is_zero():
        raise NoSolution("swirl induction has no forcing: kbar stays free and the balance is underdetermined")
    if len(forcing) != 1:
        raise NoSolution("forcing must be a single term group")
    (f_key, f_coeff), = forcing.items()
    for slot in (4, 3, 2, 0, 1, 5):
        accept(f"match {_SLOTS[slot]}", main_key[slot] - f_key[slot])
    sol = system.solution()
    sub = {n: e.as_param() for n, e in sol.items()}
    for n in UNKNOWN_EXPONENTS:
        _trace(trace, "solve", n, sol[n].text())
    if which != ONE_FAMILY:
        _trace(trace, "note", "printed derivation labels this exponent alpha = -2a-1",
               f"it is the swirl time exponent beta = {sol['beta'].text()}")

    # remaining homogeneous groups (viscous) must vanish at the solution
    for key, c in groups.items():
        if key == main_key:
            continue
        val = c.subs(sub)
        if not val.is_zero():
            mismatches.append(f"unbalanced group {key}: {val}")
            _trace(trace, "viscous group", str(c), f"{val} (nonzero)")
        else:
            _trace(trace, "viscous group", str(c), "0")

    coeff = groups[main_key].subs(sub)
    c1 = _strip_factor(coeff, "kbar")
    if coeff.is_zero() or (c1.num.variables() & {"kbar"}):
        raise NoSolution("coefficient equation is not linear in kbar")
    if c1.is_zero():
        raise NoSolution("coefficient of kbar vanishes: the balance degenerates at these parameters")
    _trace(trace, "coefficient", f"({c1})*kbar + ({f_coeff}) = 0")
    kbar = -f_coeff / c1
    for fac, _ in kbar.factors:
        _trace(trace, "degenerate", f"{fac} = 0", "excluded")
    _trace(trace, "solve", "kbar", str(kbar))

    result = ThetaAnsatz(which, _const(sol["p"]), _const(sol["q"]), _const(sol["beta"]), kbar, False, equation, mismatches, trace)
    solved = result.field()
    _trace(trace, "constraint", "p - 2q + 1", str(result.constraint_value()))
    check_mag = _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, Hr, solved, Hz, zero)[1]) \
        - _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, zero, zero, zero, zero)[1])
    check_ind = _sum(cyl_equation_pieces(v.c1, v.c2, v.c3, Hr, solved, Hz, zero)[4])
    result.verified = check_mag.is_zero() and check_ind.is_zero()
    _trace(trace, "verify", "swirl induction residual with solved H_theta", check_ind.text())
    return result


__all__ = ["ThetaAnsatz", "solve_radial", "solve_theta", "UNKNOWN_EXPONENTS", "KBAR"]
