import json
from fractions import Fraction

import pytest
import sympy as sp

from mhdblowup.ansatz import ThetaAnsatz, solve_radial, solve_theta
from mhdblowup.catalog import FamilyParams, family_one, family_two
from mhdblowup.errors import NoSolution, ParamError
from mhdblowup.fields import AffineExp
from mhdblowup.polys import A, ABAR, K
from mhdblowup.residuals import CYLINDRICAL

import oracle

r, z, kbar = sp.symbols("r z kbar", positive=True)
a, abar, k = oracle.a, oracle.abar, oracle.k


def printed_balance(p, q, beta, forcing):
    """The printed swirl-induction balance with s = T* - t, left minus right."""
    S = sp.Symbol("S", positive=True)
    h = kbar * r**p * z**q / S ** (beta + 1)
    return sp.expand((beta * h + a * p * h - 2 * a * q * h - a * h) * S ** (beta + 1) + forcing(S) * S ** (beta + 1)), S


def test_family_one_matches_hand_derivation():
    sol = solve_theta("one")
    assert (sol.p, sol.q, sol.beta) == (-1, 0, -1)
    assert sol.kbar == 2 * K * ABAR / (2 * A + 1)
    expr, _ = printed_balance(-1, 0, -1, lambda S: 2 * k * abar / r)
    ref = sp.solve(expr, kbar)[0]
    assert sp.simplify(ref - oracle.param_to_sympy(sol.kbar)) == 0
    assert sol.verified and not sol.mismatches
    assert sol.constraint_value() == 0


def test_family_two_reproduces_printed_values():
    sol = solve_theta("two")
    assert (sol.p, sol.q) == (1, 1)
    assert sol.s_exponent == AffineExp.of(1, 2)
    assert sol.kbar == 2 * ABAR * K / (4 * A + 1)
    # the printed forcing has no z factor, so the z signatures cannot match with q = 1
    assert sol.mismatches == ["match p3: q = 0"]
    assert not sol.verified
    S = sp.Symbol("S", positive=True)
    beta = -(2 * a + 1)
    coeff = beta + a - 2 * a - a
    ref = sp.solve(kbar * coeff + 2 * k * abar, kbar)[0]
    assert sp.simplify(ref - oracle.param_to_sympy(sol.kbar)) == 0
    assert sp.simplify(S ** (2 * a) / S ** (-(beta + 1))) == 1


def test_solved_field_matches_catalog():
    one = solve_theta("one")
    assert one.field() == family_one(form=CYLINDRICAL).H.c2
    two = solve_theta("two")
    assert two.field() == family_two(form=CYLINDRICAL).H.c2


@pytest.mark.parametrize("which, a_bad", [("one", Fraction(-1, 2)), ("two", Fraction(-1, 4))])
def test_degenerate_a_raises(which, a_bad):
    with pytest.raises(NoSolution, match="vanishes"):
        solve_theta(which, FamilyParams(a=a_bad))


def test_bound_parameters():
    sol = solve_theta("one", FamilyParams(a=3))
    assert sol.kbar == Fraction(2, 7) * ABAR * K
    sol = solve_theta("two", FamilyParams(a=1, abar=1, k=2))
    assert (sol.p, sol.q, sol.beta) == (1, 1, -3)
    assert sol.kbar == Fraction(4, 5)
    with pytest.raises(ParamError):
        solve_theta("one", FamilyParams(a=0))


def test_radial_exponent_is_zero():
    assert solve_radial("one") == 0
    assert solve_radial("two") == 0


def test_derived_equation():
    sol = solve_theta("one", equation="derived")
    assert (sol.p, sol.q, sol.beta) == (-1, 0, -1) and sol.verified
    # the true swirl-induction equation of the second family has no forcing
    with pytest.raises(NoSolution, match="underdetermined"):
        solve_theta("two", equation="derived")
    with pytest.raises(ValueError):
        solve_theta("one", equation="other")


def test_strict_mode_raises_on_mismatch():
    with pytest.raises(NoSolution, match="q = 0"):
        solve_theta("two", strict=True)


def test_trace_is_json():
    sol = solve_theta("one")
    doc = json.loads(sol.trace_text())
    steps = [s["step"] for s in doc["steps"]]
    assert steps[:3] == ["radial", "ansatz", "magnetic constraint"]
    assert steps[-1] == "result"
    assert doc["steps"][-1]["result"] == str(sol.kbar)
    assert isinstance(sol, ThetaAnsatz)


def test_unknown_family():
    with pytest.raises(ParamError):
        solve_theta("three")
