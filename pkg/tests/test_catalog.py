from fractions import Fraction

import pytest

from mhdblowup.catalog import MANIFEST, FamilyParams, family, family_one, family_two, initial_data, manifest, nse_family
from mhdblowup.errors import ParamError
from mhdblowup.fields import RSQ, X1, X2, X3, AffineExp, SymField
from mhdblowup.polys import A, ABAR, K, TSTAR
from mhdblowup.residuals import CYLINDRICAL, divergence, momentum_residual

import oracle


@pytest.mark.parametrize("ours, theirs", [(family_one, oracle.family_one), (family_two, oracle.family_two)],
                         ids=["one", "two"])
def test_fields_match_hand_typed_formulas(ours, theirs):
    b = ours()
    v, H, P = theirs()
    for mine, ref in zip(list(b.v) + list(b.H) + [b.P], list(v) + list(H) + [P]):
        assert oracle.same(oracle.to_sympy(mine), ref)


def test_initial_data_family_two():
    v0, H0 = initial_data(family_two())
    c = 2 * ABAR * K / (4 * A + 1)
    T2a1 = SymField.monomial(1, T=AffineExp.of(1, 2))
    assert H0.c1 == ABAR * X1 + c * X2 * X3 * T2a1
    assert H0.c3 == -2 * ABAR * X3
    assert v0.c1 == A * X1 / TSTAR + K * X2 * SymField.monomial(1, T=AffineExp.of(0, 2))


def test_initial_data_family_one():
    v0, H0 = initial_data(family_one(FamilyParams(tstar=2)))
    assert v0.c3 == -A * X3
    assert H0.c2 == ABAR * X2 - 4 * ABAR * K / (2 * A + 1) * X1 / RSQ


def test_binding_commutes_with_construction():
    p = FamilyParams(a=Fraction(3, 2), abar=-2, k=Fraction(1, 3), tstar=5)
    bound = family_two(p)
    sym = family_two()
    mapping = {"a": Fraction(3, 2), "abar": -2, "k": Fraction(1, 3)}
    assert bound.v == sym.v.subs(mapping)
    assert bound.H == sym.H.subs(mapping)
    assert bound.tstar == 5


@pytest.mark.parametrize("build, bad", [
    (family_one, {"a": Fraction(-1, 2)}), (family_one, {"a": 0}), (family_one, {"k": 0}), (family_one, {"abar": 0}),
    (family_two, {"a": Fraction(-1, 4)}), (family_two, {"a": 0}), (family_two, {"k": 0}), (family_two, {"abar": 0}),
])
def test_excluded_parameters(build, bad):
    with pytest.raises(ParamError):
        build(FamilyParams(**bad))


def test_family_one_allows_minus_a_quarter():
    family_one(FamilyParams(a=Fraction(-1, 4)))
    family_two(FamilyParams(a=Fraction(-1, 2)))


@pytest.mark.parametrize("kw", [{"a": 0.5}, {"tstar": 0}, {"tstar": -1}, {"k": "1/0"}, {"a": "k"}])
def test_param_validation(kw):
    with pytest.raises(ParamError):
        FamilyParams(**kw)


def test_params_accept_strings_and_fractions():
    p = FamilyParams(a="-3/2", abar=Fraction(1, 2), k=2, tstar="7")
    assert p.bindings() == {"a": Fraction(-3, 2), "abar": Fraction(1, 2), "k": 2, "Tstar": 7}
    assert FamilyParams().bindings() == {}
    assert FamilyParams(k=2 * ABAR).value("k") is None


def test_family_dispatch():
    assert family("1") == family_one()
    assert family("two", form=CYLINDRICAL) == family_two(form=CYLINDRICAL)
    with pytest.raises(ParamError):
        family("3")
    with pytest.raises(ValueError):
        family_one(form="spherical")


@pytest.mark.parametrize("which", ["one", "two"])
def test_nse_reduction(which):
    b = nse_family(which)
    assert b.H.is_zero()
    assert "abar" not in {v for c in b.v for t in c.terms for v in t.coeff.variables()}
    assert momentum_residual(b).is_zero()
    assert divergence(b.v).is_zero()
    with pytest.raises(ParamError):
        nse_family(which, FamilyParams(abar=1))
    with pytest.raises(ParamError):
        nse_family(which, FamilyParams(abar=0, k=0))


def test_nse_pressure_is_abar_free_part():
    v, _, P = oracle.family_two()
    nse_P = P.subs(oracle.abar, 0)
    assert oracle.same(oracle.to_sympy(nse_family("two").P), nse_P)


def test_manifest():
    ids = [m["id"] for m in manifest()]
    assert ids == ["family-one", "family-two", "nse-one", "nse-two"]
    assert manifest() == list(MANIFEST)
    assert "a != -1/4" in MANIFEST[1]["constraints"]
    for m in MANIFEST:
        assert set(m["provenance"]) >= {"fields", "pressure"}

