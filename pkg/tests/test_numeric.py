import csv
import io
import json
import math

import numpy as np
import pytest

from mhdblowup.catalog import FamilyParams, family_one, family_two, nse_family
from mhdblowup.errors import DomainError, ParamError
from mhdblowup.fields import RSQ, S, X1, X2, X3, SymField, evaluate
from mhdblowup.numeric import (
    CSV_HEADER, SampleDomain, blowup_series, default_times, energy_on_ball, export_csv, fd_check, grid_convergence,
    random_admissible_points, sample_residual,
)
from mhdblowup.residuals import SolutionBundle, VecField3

P1 = {"a": 1, "abar": 1, "k": 1, "Tstar": 1}
SEED = 0
NU_VALUES = (0.0, 0.3, 1.0)


@pytest.mark.parametrize("nu", NU_VALUES)
def test_family_one_samples_vanish(nu):
    report = sample_residual(family_one(), SampleDomain(n=1000, seed=SEED), nu, P1)
    assert len(report.entries) == 8
    for e in report.entries:
        assert e.samples == 1000
        assert e.numeric_max_rel <= 1e-10, e.id


def test_family_two_samples_do_not_vanish():
    report = sample_residual(family_two(), SampleDomain(n=500, seed=SEED), 0.3, P1)
    rel = {e.id: e.numeric_max_rel for e in report.entries}
    assert rel["induction_1"] > 1e-2 and rel["induction_2"] > 1e-2
    assert rel["momentum_1"] > 1e-8
    assert rel["induction_3"] <= 1e-10 and rel["divergence_v"] <= 1e-10


def test_sampling_is_deterministic():
    d = SampleDomain(n=200, seed=7)
    r1 = sample_residual(family_two(), d, 0.3, P1).to_text()
    r2 = sample_residual(family_two(), d, 0.3, P1).to_text()
    assert r1 == r2
    doc = json.loads(r1)
    assert doc["seed"] == 7 and doc["params"]["nu"] == "0.3"


def test_excluded_params_rejected_before_evaluation():
    with pytest.raises(ParamError):
        sample_residual(family_one(), SampleDomain(n=10), 0.0, dict(P1, a=-0.5))


# --- sample domain ------------------------------------------------------------------------

def test_sample_domain_respects_axis_and_ball():
    d = SampleDomain.ball(1.0, r_min=0.2, n=500, seed=3)
    pts = d.points()
    assert pts.shape == (500, 3)
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) >= 0.2)
    assert np.all(np.linalg.norm(pts, axis=1) <= 1.0)
    x1, x2, x3, t = SampleDomain(n=100).sample(2.0)
    assert np.all((t >= 0) & (t < 2.0 * 0.99 + 1e-12))


def test_sample_domain_errors():
    with pytest.raises(DomainError):
        SampleDomain(box=((-0.01, 0.01),) * 3, r_min=1.0, n=10).points()
    with pytest.raises(DomainError):
        SampleDomain(t_range=(0.0, 1.0)).times(1.0)


# --- finite differences --------------------------------------------------------------------

def test_fd_order_two_on_velocity():
    report = fd_check(family_one().v.c1, (1.0, 1.0, 1.0, 0.5), P1)
    orders = report.orders()
    assert orders["x2"] == pytest.approx(2.0, abs=0.1)
    assert orders["t"] == pytest.approx(2.0, abs=0.1)
    assert orders["x3"] is None  # v1 does not depend on x3


def test_fd_exact_for_quadratics():
    f = X1 * X2 + 3 * X3 * X3
    report = fd_check(f, (0.3, -0.7, 0.2, 0.1), {"Tstar": 1})
    assert all(o is None for o in report.orders().values())
    assert all(e.err_h < 1e-9 for e in report.entries)


def test_fd_guards():
    with pytest.raises(DomainError):
        fd_check(X1 / S, (1.0, 1.0, 1.0, 0.9999), {"Tstar": 1})
    with pytest.raises(DomainError):
        fd_check(X1 / RSQ, (1e-4, 0.0, 1.0, 0.0), {"Tstar": 1})


def test_random_admissible_points():
    pts = random_admissible_points(SampleDomain(seed=5), 1.0, 20)
    assert len(pts) == 20
    assert all(math.hypot(p[0], p[1]) >= 0.1 and p[3] < 1.0 for p in pts)
    assert pts == random_admissible_points(SampleDomain(seed=5), 1.0, 20)


# --- blowup rates --------------------------------------------------------------------------

def test_blowup_exponents():
    d = SampleDomain.ball(1.0, n=400, seed=SEED)
    one = blowup_series(family_one(), d, params=P1)
    assert one.fitted_exponents["v"] == pytest.approx(-1.0, abs=0.02)
    assert one.fitted_exponents["H"] == pytest.approx(0.0, abs=0.02)
    two = blowup_series(family_two(), d, params=dict(P1, a=-1))
    assert two.fitted_exponents["H"] == pytest.approx(-1.0, abs=0.05)
    assert len(two.plot_data().splitlines()) == 11
    assert set(json.loads(two.to_text())["fitted_exponents"]) == {"v", "gradv", "H"}


def test_blowup_series_validation():
    d = SampleDomain.ball(1.0, n=50)
    with pytest.raises(ValueError):
        blowup_series(family_one(), d, times=[0.1, 0.2, 0.3], params=P1)
    with pytest.raises(DomainError):
        blowup_series(family_one(), d, times=[0.1, 0.3, 0.2, 0.4, 0.5], params=P1)
    times = default_times(2.0)
    assert len(times) == 10 and 2.0 - times[0] == pytest.approx(2e-3) and 2.0 - times[-1] == pytest.approx(2e-6)


# --- energy --------------------------------------------------------------------------------

def test_energy_monte_carlo_against_closed_form():
    # (1/2) * integral of x1^2 over the ball of radius r is 2 pi r^5 / 15
    b = SolutionBundle(VecField3(X1, SymField.zero(), SymField.zero()), VecField3.zero(), SymField.zero())
    est = energy_on_ball(b, 2.0, 0.0, {"Tstar": 1}, n=200_000, seed=1)
    assert est == pytest.approx(2 * math.pi * 2.0 ** 5 / 15, rel=0.02)


def test_energy_family_two_grows_with_radius():
    e = [energy_on_ball(family_two(), r, 0.0, P1, n=50_000) for r in (1, 2, 4, 8)]
    # |v|^2 ~ |x|^2 makes the ball integral grow like radius^5, beyond the volume factor 2^3
    assert all(hi / lo > 8 for lo, hi in zip(e, e[1:]))


def test_energy_family_one_is_not_integrable():
    with pytest.raises(DomainError, match="not integrable"):
        energy_on_ball(family_one(), 1.0, 0.0, P1)
    with pytest.raises(DomainError):
        energy_on_ball(nse_family("one"), 1.0, 0.0, {"a": 1, "k": 1, "Tstar": 1})


# --- grid convergence ----------------------------------------------------------------------

def test_grid_convergence_family_one():
    rep = grid_convergence(family_one(), (8, 16, 32), params=dict(P1, nu=0.3))
    assert rep.spacings == [1 / 8, 1 / 16, 1 / 32]
    # the swirl k/r is not a polynomial, so even the divergence carries truncation error
    assert not any(rep.exact.values())
    for eq in rep.orders:
        assert rep.order(eq) == pytest.approx(2.0, abs=0.25), eq


def test_grid_convergence_exact_entries():
    # H = 0 and v linear in x: induction and divergence stencils are exact
    rep = grid_convergence(nse_family("two"), (8, 16), params={"a": 1, "k": 1, "Tstar": 1, "nu": 0.3})
    assert {eq for eq, ex in rep.exact.items() if ex} == {
        "induction_1", "induction_2", "induction_3", "divergence_v", "divergence_H"}
    assert all(r <= 1e-12 for r in rep.relative["divergence_v"])
    assert json.loads(rep.to_text())["orders"]["divergence_v"] == []


def test_grid_convergence_validation():
    with pytest.raises(ValueError):
        grid_convergence(family_one(), (8, 12), params=P1)
    with pytest.raises(DomainError):
        # the centre cell of the 3^3 grid sits on the axis
        grid_convergence(family_one(), (3, 6), box=((-1, 1),) * 3, params=P1)


# --- export --------------------------------------------------------------------------------

def test_export_csv_round_trips_floats():
    d = SampleDomain(n=25, seed=2)
    text = export_csv(family_one(), d, 0.25, P1)
    assert text == export_csv(family_one(), d, 0.25, P1)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 26
    x1, x2, x3, t, v1 = (float(c) for c in rows[1][:5])
    assert v1 == evaluate(family_one().v.c1, (x1, x2, x3, t), P1)


def test_bound_bundle_evaluates_with_own_tstar():
    b = family_one(FamilyParams(a=1, abar=1, k=1, tstar=2))
    val = evaluate(b.v.c3, (1.0, 1.0, 1.0, 0.0), {}, tstar=b.tstar)
    assert val == pytest.approx(-1.0)
