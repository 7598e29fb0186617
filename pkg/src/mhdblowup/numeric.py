"""Floating-point cross-checks of the exact fields.

Everything here is deterministic for a fixed seed: sample points come from
``numpy.random.default_rng(seed)`` and reductions are plain numpy maxima and
sums over arrays in a fixed order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError
from .fields import SymField, compile_terms, diff, evaluate
from .residuals import (
    ResidualEntry,
    ResidualReport,
    SolutionBundle,
    induction_pieces,
    momentum_pieces,
)

EPS = np.finfo(np.float64).eps
VARS = ("x1", "x2", "x3", "t")
CSV_HEADER = ("x1", "x2", "x3", "t", "v1", "v2", "v3", "H1", "H2", "H3", "P")


def bind(b: SolutionBundle, params: Mapping[str, object]) -> tuple:
    """Check exclusions and return ``(float params, T*)``."""
    b.check_params(params)
    values = {k: float(v) for k, v in params.items()}
    try:
        tstar = float(b.tstar.eval(values))
    except KeyError:
        raise DomainError("no value bound for 'Tstar'") from None
    if tstar <= 0:
        raise DomainError(f"T* must be positive, got {tstar}")
    values["Tstar"] = tstar
    return values, tstar


def _axis_singular(fields: Sequence[SymField]) -> bool:
    for f in fields:
        for key, _ in f.items():
            pR = key[3]
            if not pR.is_constant() or pR.value < 0 or pR.value.denominator != 1:
                return True
    return False


@dataclass(frozen=True)
class SampleDomain:
    """Box (or ball, when ``radius`` is set) of sample points, away from the axis and T*."""

    box: tuple = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
    r_min: float = 0.1
    t_range: tuple | None = None
    n: int = 1000
    seed: int = 0
    radius: float | None = None
    time_guard: float = 0.01

    @classmethod
    def ball(cls, radius: float, **kw) -> "SampleDomain":
        r = float(radius)
        return cls(box=((-r, r),) * 3, radius=r, **kw)

    def times(self, tstar: float) -> tuple:
        t0, t1 = self.t_range if self.t_range is not None else (0.0, tstar * (1 - self.time_guard))
        if t1 >= tstar or t1 < t0:
            raise DomainError(f"time window [{t0}, {t1}] must end strictly before T* = {tstar}")
        return float(t0), float(t1)

    def points(self, n: int | None = None, rng=None) -> np.ndarray:
        """``(n, 3)`` points outside the cylinder ``r < r_min``, by rejection."""
        n = self.n if n is None else n
        rng = np.random.default_rng(self.seed) if rng is None else rng
        lo = np.array([b[0] for b in self.box], dtype=float)
        hi = np.array([b[1] for b in self.box], dtype=float)
        out = np.empty((0, 3))
        for _ in range(1000):
            if len(out) >= n:
                break
            cand = lo + (hi - lo) * rng.random((max(2 * (n - len(out)), 16), 3))
            keep = np.hypot(cand[:, 0], cand[:, 1]) >= self.r_min
            if self.radius is not None:
                keep &= np.linalg.norm(cand, axis=1) <= self.radius
            out = np.vstack([out, cand[keep]])
        if len(out) < n:
            raise DomainError("sample domain is (nearly) empty after axis exclusion")
        return out[:n]

    def sample(self, tstar: float) -> tuple:
        rng = np.random.default_rng(self.seed)
        pts = self.points(rng=rng)
        t0, t1 = self.times(tstar)
        t = t0 + (t1 - t0) * rng.random(len(pts))
        return pts[:, 0], pts[:, 1], pts[:, 2], t


# --- residual sampling ------------------------------------------------------------

def _relative(pieces: Sequence[SymField], pts, values, tstar) -> float:
    total = 0.0
    scale = 0.0
    for f in pieces:
        val = np.atleast_1d(evaluate(f, pts, values, tstar=tstar))
        total = total + val
        scale = max(scale, float(np.max(np.abs(val))) if val.size else 0.0)
    worst = float(np.max(np.abs(total))) if np.size(total) else 0.0
    return worst / (1.0 + scale)


def sample_residual(b: SolutionBundle, d: SampleDomain, nu: float, params: Mapping[str, object]) -> ResidualReport:
    """Max relative residual of each Cartesian equation at ``d.n`` random points."""
    values, tstar = bind(b, dict(params, nu=nu))
    pts = d.sample(tstar)
    entries = []
    groups = []
    for i, pieces in enumerate(momentum_pieces(b), 1):
        groups.append((f"momentum_{i}", pieces))
    for i, pieces in enumerate(induction_pieces(b), 1):
        groups.append((f"induction_{i}", pieces))
    for name, vec in (("divergence_v", b.v), ("divergence_H", b.H)):
        groups.append((name, [diff(c, x) for c, x in zip(vec, ("x1", "x2", "x3"))]))
    for name, pieces in groups:
        symbolic = sum(pieces, SymField.zero()).is_zero()
        entries.append(ResidualEntry(name, symbolic, _relative(pieces, pts, values, tstar), len(pts[0])))
    shown = {k: v for k, v in params.items()}
    shown["nu"] = nu
    return ResidualReport(entries, shown, d.seed)


# --- finite-difference check --------------------------------------------------------

@dataclass
class FDEntry:
    var: str
    exact: float
    err_h: float
    err_h2: float
    order: float | None


@dataclass
class FDReport:
    point: tuple
    h: float
    entries: list

    def orders(self) -> dict:
        return {e.var: e.order for e in self.entries}


def fd_check(f: SymField, point, params: Mapping[str, object], h: float = 1e-3, tstar=None,
             noise_factor: float = 1e3) -> FDReport:
    """Compare exact derivatives with central differences at steps ``h`` and ``h/2``.

    The observed order is ``log2(err_h / err_h2)``; it is ``None`` when the
    error at ``h`` is within ``noise_factor`` times the rounding level, i.e.
    the stencil is exact for that variable.
    """
    values = {k: float(v) for k, v in params.items()}
    ts = float(values["Tstar"] if tstar is None else tstar)
    point = tuple(float(x) for x in point)
    if point[3] + h >= ts:
        raise DomainError("time stencil reaches T*")
    if _axis_singular([f]) and math.hypot(point[0], point[1]) <= 2 * h:
        raise DomainError("spatial stencil reaches the symmetry axis")
    f0 = abs(evaluate(f, point, values, tstar=ts))
    entries = []
    for idx, var in enumerate(VARS):
        exact = evaluate(diff(f, var), point, values, tstar=ts)
        errs = []
        for step in (h, h / 2):
            plus, minus = list(point), list(point)
            plus[idx] += step
            minus[idx] -= step
            fp = evaluate(f, tuple(plus), values, tstar=ts)
            fm = evaluate(f, tuple(minus), values, tstar=ts)
            errs.append(abs((fp - fm) / (2 * step) - exact))
        noise = EPS * max(f0, 1.0) / h
        order = None
        if errs[0] > noise_factor * noise and errs[1] > 0:
            order = math.log2(errs[0] / errs[1])
        entries.append(FDEntry(var, float(exact), errs[0], errs[1], order))
    return FDReport(point, h, entries)


def random_admissible_points(d: SampleDomain, tstar: float, count: int) -> list:
    x1, x2, x3, t = SampleDomain(d.box, d.r_min, d.t_range, count, d.seed, d.radius, d.time_guard).sample(tstar)
    return list(zip(x1.tolist(), x2.tolist(), x3.tolist(), t.tolist()))


# --- blowup rates -------------------------------------------------------------------------

@dataclass
class BlowupSeries:
    times: list
    sup_v: list
    sup_gradv: list
    sup_H: list
    fitted_exponents: dict
    fit_residuals: dict
    tstar: float = 1.0

    def to_text(self) -> str:
        return json.dumps(_jsonable(self.__dict__), indent=2, sort_keys=True) + "\n"

    def plot_data(self) -> str:
        """Columns log(T* - t), log sup|v|, log sup|grad v|, log sup|H|."""
        lines = ["log_s log_sup_v log_sup_gradv log_sup_H"]
        for t, sv, sg, sh in zip(self.times, self.sup_v, self.sup_gradv, self.sup_H):
            cols = [math.log(self.tstar - t)] + [math.log(x) if x > 0 else float("-inf") for x in (sv, sg, sh)]
            lines.append(" ".join(repr(c) for c in cols))
        return "\n".join(lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _fit(log_s: np.ndarray, sups: Sequence[float]) -> tuple:
    y = np.asarray(sups, dtype=float)
    if np.all(y == 0) or np.all(y == y[0]):
        return 0.0, 0.0
    if np.any(y <= 0):
        raise DomainError("cannot fit a power law through zero values")
    ly = np.log(y)
    A = np.vstack([log_s, np.ones_like(log_s)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def default_times(tstar: float, count: int = 10, s_max: float = 1e-3, s_min: float = 1e-6) -> list:
    """Times whose distance to T* decreases geometrically from ``s_max*T*`` to ``s_min*T*``."""
    s = tstar * np.geomspace(s_max, s_min, count)
    return (tstar - s).tolist()


def blowup_series(b: SolutionBundle, d: SampleDomain, times=None, params: Mapping[str, object] | None = None,
                  ) -> BlowupSeries:
    """Sup norms over a fixed sample set and least-squares power laws in ``T* - t``."""
    values, tstar = bind(b, dict(params or {}))
    times = default_times(tstar) if times is None else [float(t) for t in times]
    if len(times) < 5:
        raise ValueError("a power-law fit needs at least 5 times")
    if any(t >= tstar for t in times) or any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise DomainError("times must increase strictly toward T*")
    pts = d.points()
    grads = [diff(c, x) for c in b.v for x in ("x1", "x2", "x3")]
    sup_v, sup_g, sup_h = [], [], []
    for t in times:
        at = (pts[:, 0], pts[:, 1], pts[:, 2], np.full(len(pts), t))
        ev = lambda f: np.atleast_1d(evaluate(f, at, values, tstar=tstar))  # noqa: E731
        sup_v.append(float(np.max(np.sqrt(sum(ev(c) ** 2 for c in b.v)))))
        sup_h.append(float(np.max(np.sqrt(sum(ev(c) ** 2 for c in b.H)))))
        sup_g.append(float(max(np.max(np.abs(ev(g))) for g in grads)))
    log_s = np.log(tstar - np.asarray(times))
    fits = {name: _fit(log_s, sups) for name, sups in (("v", sup_v), ("gradv", sup_g), ("H", sup_h))}
    return BlowupSeries(times, sup_v, sup_g, sup_h, {k: v[0] for k, v in fits.items()},
                        {k: v[1] for k, v in fits.items()}, tstar)


# --- energy -------------------------------------------------------------------------------

def _energy_density_fields(b: SolutionBundle) -> SymField:
    return sum((c * c for c in list(b.v) + list(b.H)), SymField.zero()) * Fraction(1, 2)


def energy_on_ball(b: SolutionBundle, radius: float, t: float, params: Mapping[str, object],
                   n: int = 200_000, seed: int = 0) -> float:
    """Monte Carlo estimate of the integral of ``(|v|^2 + |H|^2)/2`` over the ball ``|x| <= radius``.

    Raises DomainError when the density is not integrable near the axis
    (a term behaving like ``r^m`` with ``m <= -2``).
    """
    values, tstar = bind(b, dict(params))
    if t >= tstar:
        raise DomainError("t must be before T*")
    dens = _energy_density_fields(b)
    for key, _ in dens.items():
        p1, p2, _p3, pR = (e.value if e.is_constant() else None for e in key[:4])
        if None in (p1, p2, pR):
            raise DomainError("energy density has symbolic exponents; bind a")
        if p1 + p2 + 2 * pR <= -2:
            raise DomainError("energy density is not integrable near the axis (behaves like r^-2 or worse)")
    if dens.is_zero():
        return 0.0
    rng = np.random.default_rng(seed)
    r = float(radius)
    # uniform points in the ball: direction times radius * u^(1/3)
    g = rng.standard_normal((n, 3))
    g /= np.linalg.norm(g, axis=1)[:, None]
    pts = g * (r * rng.random(n) ** (1.0 / 3.0))[:, None]
    vals = np.atleast_1d(evaluate(dens, (pts[:, 0], pts[:, 1], pts[:, 2], np.full(n, float(t))), values,
                                  tstar=tstar))
    return float(4.0 / 3.0 * math.pi * r ** 3 * np.mean(vals))


# --- grid convergence ------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    spacings: list
    norms: dict
    relative: dict
    orders: dict
    exact: dict = field(default_factory=dict)

    def order(self, eq: str) -> float | None:
        o = self.orders[eq]
        return o[-1] if o else None

    def to_text(self) -> str:
        return json.dumps(_jsonable(self.__dict__), indent=2, sort_keys=True) + "\n"


def _cd(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Centered first difference on the interior (one ghost layer each side)."""
    sl_p = [slice(1, -1)] * 3
    sl_m = [slice(1, -1)] * 3
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    return (f[tuple(sl_p)] - f[tuple(sl_m)]) / (2 * h)


def _lap(f: np.ndarray, h: float) -> np.ndarray:
    c = f[1:-1, 1:-1, 1:-1]
    out = -6 * c
    for axis in range(3):
        sl_p = [slice(1, -1)] * 3
        sl_m = [slice(1, -1)] * 3
        sl_p[axis] = slice(2, None)
        sl_m[axis] = slice(None, -2)
        out = out + f[tuple(sl_p)] + f[tuple(sl_m)]
    return out / (h * h)


def _inner(f: np.ndarray) -> np.ndarray:
    return f[1:-1, 1:-1, 1:-1]


EQUATIONS = ("momentum_1", "momentum_2", "momentum_3", "induction_1", "induction_2", "induction_3",
             "divergence_v", "divergence_H")


def discrete_residuals(b: SolutionBundle, n: int, box, t: float, values: dict, tstar: float) -> dict:
    """Second-order centered discrete residuals on an ``n^3`` cell-centred grid.

    Returns ``{equation: (max |residual|, max |piece|)}``.
    """
    (x0, x1), (y0, y1), (z0, z1) = box
    h = (x1 - x0) / n
    if not (math.isclose((y1 - y0) / n, h) and math.isclose((z1 - z0) / n, h)):
        raise ValueError("grid_convergence needs a cubic box")
    ax = lambda lo: lo + (np.arange(-1, n + 1) + 0.5) * h  # noqa: E731
    X1, X2, X3 = np.meshgrid(ax(x0), ax(y0), ax(z0), indexing="ij")
    if np.min(np.hypot(X1, X2)) <= 0 and _axis_singular(list(b.v) + list(b.H) + [b.P]):
        raise DomainError("grid touches the symmetry axis")
    if t + h >= tstar:
        raise DomainError("time stencil reaches T*")

    def ev(f, tt):
        return np.asarray(evaluate(f, (X1, X2, X3, np.full(X1.shape, tt)), values, tstar=tstar))

    nu = values.get("nu", 0.0)
    v = [ev(c, t) for c in b.v]
    H = [ev(c, t) for c in b.H]
    P = ev(b.P, t)
    dv_dt = [(_inner(ev(c, t + h)) - _inner(ev(c, t - h))) / (2 * h) for c in b.v]
    dH_dt = [(_inner(ev(c, t + h)) - _inner(ev(c, t - h))) / (2 * h) for c in b.H]
    vi = [_inner(c) for c in v]
    Hi = [_inner(c) for c in H]
    mag = 0.5 * (H[0] ** 2 + H[1] ** 2 + H[2] ** 2)
    out = {}
    for i in range(3):
        pieces = [dv_dt[i],
                  sum(vi[j] * _cd(v[i], j, h) for j in range(3)),
                  _cd(P, i, h),
                  -nu * _lap(v[i], h),
                  -sum(Hi[j] * _cd(H[i], j, h) for j in range(3)),
                  _cd(mag, i, h)]
        out[f"momentum_{i + 1}"] = pieces
    vxh = [v[1] * H[2] - v[2] * H[1], v[2] * H[0] - v[0] * H[2], v[0] * H[1] - v[1] * H[0]]
    curl = [_cd(vxh[2], 1, h) - _cd(vxh[1], 2, h),
            _cd(vxh[0], 2, h) - _cd(vxh[2], 0, h),
            _cd(vxh[1], 0, h) - _cd(vxh[0], 1, h)]
    for i in range(3):
        out[f"induction_{i + 1}"] = [dH_dt[i], -nu * _lap(H[i], h), -curl[i]]
    out["divergence_v"] = [_cd(v[j], j, h) for j in range(3)]
    out["divergence_H"] = [_cd(H[j], j, h) for j in range(3)]
    result = {}
    for eq, pieces in out.items():
        total = sum(pieces)
        result[eq] = (float(np.max(np.abs(total))), max(float(np.max(np.abs(p))) for p in pieces))
    return result


def grid_convergence(b: SolutionBundle, grids: Sequence[int] = (16, 32, 64),
                     box=((0.5, 1.5), (0.5, 1.5), (0.5, 1.5)), t: float = 0.0,
                     params: Mapping[str, object] | None = None, exact_tol: float = 1e-12) -> ConvergenceReport:
    """Decay of the discrete residual of the exact fields under grid refinement.

    Grids must double (``h, h/2, h/4``); the time step equals ``h``.  Equations
    whose relative residual stays at or below ``exact_tol`` on every grid are
    reported as exact and get no order.
    """
    grids = [int(g) for g in grids]
    if len(grids) < 2 or any(g2 != 2 * g1 for g1, g2 in zip(grids, grids[1:])):
        raise ValueError("grids must double at each level, e.g. 16,32,64")
    values, tstar = bind(b, dict(params or {}))
    spacings = [(box[0][1] - box[0][0]) / g for g in grids]
    norms = {eq: [] for eq in EQUATIONS}
    rel = {eq: [] for eq in EQUATIONS}
    for g in grids:
        res = discrete_residuals(b, g, box, t, values, tstar)
        for eq in EQUATIONS:
            norm, scale = res[eq]
            norms[eq].append(norm)
            rel[eq].append(norm / (1.0 + scale))
    orders, exact = {}, {}
    for eq in EQUATIONS:
        exact[eq] = all(r <= exact_tol for r in rel[eq])
        if exact[eq]:
            orders[eq] = []
        else:
            orders[eq] = [math.log2(a / b_) if b_ > 0 else float("inf") for a, b_ in zip(norms[eq], norms[eq][1:])]
    return ConvergenceReport(spacings, norms, rel, orders, exact)


# --- export --------------------------------------------------------------------------------

def export_rows(b: SolutionBundle, points: np.ndarray, t: float, params: Mapping[str, object]) -> list:
    values, tstar = bind(b, dict(params))
    at = (points[:, 0], points[:, 1], points[:, 2], np.full(len(points), float(t)))
    cols = [np.atleast_1d(evaluate(f, at, values, tstar=tstar)) for f in list(b.v) + list(b.H) + [b.P]]
    rows = []
    for i in range(len(points)):
        rows.append([float(points[i, 0]), float(points[i, 1]), float(points[i, 2]), float(t)]
                    + [float(c[i]) for c in cols])
    return rows


def export_csv(b: SolutionBundle, d: SampleDomain, t: float, params: Mapping[str, object]) -> str:
    """CSV of field samples at ``d.n`` seeded points; floats use shortest round-trip repr."""
    rows = export_rows(b, d.points(), t, params)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([repr(x) for x in row])
    return buf.getvalue()


__all__ = [
    "SampleDomain", "sample_residual", "fd_check", "FDReport", "FDEntry", "random_admissible_points",
    "BlowupSeries", "blowup_series", "default_times", "energy_on_ball", "ConvergenceReport",
    "grid_convergence", "discrete_residuals", "export_rows", "export_csv", "CSV_HEADER", "bind",
]
