"""Residual operators for incompressible MHD in Cartesian and axisymmetric form.

Cartesian system, with the magnetic field in the induction term read as ``H``:

    dv/dt + (v.grad)v + grad P - nu lap v - (curl H) x H = 0
    dH/dt - nu lap H - curl(v x H) = 0
    div v = 0,  div H = 0

Cylindrical vectors hold ``(r, theta, z)`` components written in the field
algebra with ``r = R^(1/2)`` and ``z = x3``.  The angular unit vector is
``e_theta = (x2/r, -x1/r, 0)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import FrameError, ParamError, UnsupportedField
from .fields import RCYL, RSQ, X1, X2, AffineExp, SymField, Term, diff, laplacian
from .polys import NU, ParamRational, TSTAR

CARTESIAN = "cartesian"
CYLINDRICAL = "cylindrical"
_FRAMES = (CARTESIAN, CYLINDRICAL)


@dataclass(frozen=True, eq=False)
class VecField3:
    """Three exact components tagged with a frame."""

    c1: SymField
    c2: SymField
    c3: SymField
    frame: str = CARTESIAN

    def __post_init__(self):
        if self.frame not in _FRAMES:
            raise FrameError(f"unknown frame {self.frame!r}")
        for name in ("c1", "c2", "c3"):
            val = getattr(self, name)
            if not isinstance(val, SymField):
                object.__setattr__(self, name, SymField.const(val))

    @classmethod
    def zero(cls, frame: str = CARTESIAN) -> "VecField3":
        z = SymField.zero()
        return cls(z, z, z, frame)

    @property
    def components(self) -> tuple:
        return (self.c1, self.c2, self.c3)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i: int) -> SymField:
        return self.components[i]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def map(self, fn: Callable[[SymField], SymField]) -> "VecField3":
        return VecField3(*(fn(c) for c in self.components), frame=self.frame)

    def _same_frame(self, other: "VecField3") -> None:
        if other.frame != self.frame:
            raise FrameError(f"cannot combine {self.frame} and {other.frame} vectors")

    def __add__(self, other: "VecField3") -> "VecField3":
        self._same_frame(other)
        return VecField3(*(a + b for a, b in zip(self, other)), frame=self.frame)

    def __sub__(self, other: "VecField3") -> "VecField3":
        self._same_frame(other)
        return VecField3(*(a - b for a, b in zip(self, other)), frame=self.frame)

    def __neg__(self) -> "VecField3":
        return self.map(lambda c: -c)

    def __mul__(self, scalar) -> "VecField3":
        return self.map(lambda c: c * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VecField3):
            return NotImplemented
        return self.frame == other.frame and (self - other).is_zero()

    __hash__ = None

    def subs(self, mapping: Mapping[str, object]) -> "VecField3":
        return self.map(lambda c: c.subs(mapping))

    def text(self) -> list:
        return [c.text() for c in self.components]


@dataclass(frozen=True)
class Exclusion:
    """``param != value``; a parameter constraint consulted before evaluation."""

    param: str
    value: Fraction

    def __str__(self) -> str:
        return f"{self.param} != {self.value}"

    def violated_by(self, values: Mapping[str, object]) -> bool:
        return self.param in values and values[self.param] == self.value


@dataclass(frozen=True, eq=False)
class SolutionBundle:
    """Candidate solution ``(v, H, P)`` with its exclusion set and singular time."""

    v: VecField3
    H: VecField3
    P: SymField
    excluded: tuple = ()
    family: str = "custom"
    tstar: ParamRational = field(default_factory=lambda: TSTAR)

    def __post_init__(self):
        if self.v.frame != self.H.frame:
            raise FrameError("v and H must share a frame")
        object.__setattr__(self, "tstar", ParamRational.coerce(self.tstar))

    @property
    def frame(self) -> str:
        return self.v.frame

    @classmethod
    def zero(cls, frame: str = CARTESIAN) -> "SolutionBundle":
        return cls(VecField3.zero(frame), VecField3.zero(frame), SymField.zero(), family="zero")

    def check_params(self, values: Mapping[str, object]) -> None:
        """Raise ParamError if ``values`` hit the exclusion set."""
        bad = [str(e) for e in self.excluded if e.violated_by(values)]
        if bad:
            raise ParamError(f"{self.family}: parameters violate {', '.join(bad)}")

    def fields(self) -> dict:
        names = ("v1", "v2", "v3", "H1", "H2", "H3") if self.frame == CARTESIAN else (
            "v_r", "v_theta", "v_z", "H_r", "H_theta", "H_z")
        out = dict(zip(names, list(self.v) + list(self.H)))
        out["P"] = self.P
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SolutionBundle):
            return NotImplemented
        return (self.v == other.v and self.H == other.H and self.P == other.P
                and self.tstar == other.tstar)

    __hash__ = None


def _cartesian(*vecs: VecField3) -> None:
    for f in vecs:
        if f.frame != CARTESIAN:
            raise FrameError(f"operator needs a Cartesian field, got {f.frame}")


# --- Cartesian operators ----------------------------------------------------

_XS = ("x1", "x2", "x3")


def grad(f: SymField) -> VecField3:
    return VecField3(*(diff(f, x) for x in _XS))


def divergence(f: VecField3) -> SymField:
    _cartesian(f)
    return diff(f.c1, "x1") + diff(f.c2, "x2") + diff(f.c3, "x3")


def curl(f: VecField3) -> VecField3:
    _cartesian(f)
    return VecField3(
        diff(f.c3, "x2") - diff(f.c2, "x3"),
        diff(f.c1, "x3") - diff(f.c3, "x1"),
        diff(f.c2, "x1") - diff(f.c1, "x2"),
    )


def cross(f: VecField3, g: VecField3) -> VecField3:
    _cartesian(f, g)
    return VecField3(
        f.c2 * g.c3 - f.c3 * g.c2,
        f.c3 * g.c1 - f.c1 * g.c3,
        f.c1 * g.c2 - f.c2 * g.c1,
    )


def dot(f: VecField3, g: VecField3) -> SymField:
    f._same_frame(g)
    return f.c1 * g.c1 + f.c2 * g.c2 + f.c3 * g.c3


def advect(u: VecField3, w: VecField3) -> VecField3:
    """(u . grad) w."""
    _cartesian(u, w)
    return w.map(lambda c: u.c1 * diff(c, "x1") + u.c2 * diff(c, "x2") + u.c3 * diff(c, "x3"))


def vector_laplacian(f: VecField3) -> VecField3:
    _cartesian(f)
    return f.map(laplacian)


def lorentz_two_ways(H: VecField3) -> tuple:
    """``((curl H) x H, H.grad H - grad(|H|^2/2))``; equal for every H."""
    _cartesian(H)
    return cross(curl(H), H), advect(H, H) - grad(dot(H, H) * Fraction(1, 2))


def momentum_pieces(b: SolutionBundle) -> list:
    """Per component, the signed pieces whose sum is the momentum residual."""
    _cartesian(b.v, b.H)
    v, H = b.v, b.H
    dt = v.map(lambda c: diff(c, "t"))
    adv = advect(v, v)
    gp = grad(b.P)
    visc = vector_laplacian(v).map(lambda c: c * (-NU))
    hgh = advect(H, H)
    gmag = grad(dot(H, H) * Fraction(1, 2))
    return [[dt[i], adv[i], gp[i], visc[i], -hgh[i], gmag[i]] for i in range(3)]


def induction_pieces(b: SolutionBundle) -> list:
    _cartesian(b.v, b.H)
    dt = b.H.map(lambda c: diff(c, "t"))
    visc = vector_laplacian(b.H).map(lambda c: c * (-NU))
    stretch = -curl(cross(b.v, b.H))
    return [[dt[i], visc[i], stretch[i]] for i in range(3)]


def _sum(pieces: Sequence[SymField]) -> SymField:
    return sum(pieces, SymField.zero())


def momentum_residual(b: SolutionBundle) -> VecField3:
    """dv/dt + (v.grad)v + grad P - nu lap v - (curl H) x H."""
    return VecField3(*(_sum(p) for p in momentum_pieces(b)))


def induction_residual(b: SolutionBundle) -> VecField3:
    """dH/dt - nu lap H - curl(v x H)."""
    return VecField3(*(_sum(p) for p in induction_pieces(b)))


# --- axisymmetric cylindrical form -------------------------------------------

_INV_R = RCYL.reciprocal()
_INV_R2 = RSQ.reciprocal()


def _dr(f: SymField) -> SymField:
    return diff(f, "r")


def _dz(f: SymField) -> SymField:
    return diff(f, "z")


def cyl_laplacian(f: SymField) -> SymField:
    """d_rr + (1/r) d_r + d_zz on an axisymmetric scalar."""
    return _dr(_dr(f)) + _INV_R * _dr(f) + _dz(_dz(f))


def _transport(vr: SymField, vz: SymField, f: SymField) -> SymField:
    return diff(f, "t") + vr * _dr(f) + vz * _dz(f)


def cyl_equation_pieces(vr, vth, vz, Hr, Hth, Hz, Pbar) -> list:
    """Signed pieces (left side minus right side) of the six reduced equations."""
    nu = -NU
    lap_m = lambda f: (cyl_laplacian(f) - _INV_R2 * f) * nu  # noqa: E731
    lap = lambda f: cyl_laplacian(f) * nu  # noqa: E731
    return [
        [_transport(vr, vz, vr), -_INV_R * vth * vth, _dr(Pbar),
         lap_m(vr), -(Hr * _dr(Hr)), -(Hz * _dz(Hr)), _INV_R * Hth * Hth],
        [_transport(vr, vz, vth), _INV_R * vr * vth,
         lap_m(vth), -(Hr * _dr(Hth)), -(Hz * _dz(Hth)), -(_INV_R * Hth * Hr)],
        [_transport(vr, vz, vz), _dz(Pbar),
         lap(vz), -(Hr * _dr(Hz)), -(Hz * _dz(Hz))],
        [_transport(vr, vz, Hr),
         lap_m(Hr), -(Hr * _dr(vr)), -(Hz * _dz(vr))],
        [_transport(vr, vz, Hth), _INV_R * Hr * vth,
         lap_m(Hth), -(Hr * _dr(vth)), -(Hz * _dz(vth)), -(_INV_R * vr * Hth)],
        [_transport(vr, vz, Hz),
         lap(Hz), -(Hr * _dr(vz)), -(Hz * _dz(vz))],
    ]


CYL_EQUATIONS = ("radial_momentum", "swirl_momentum", "axial_momentum",
                 "radial_induction", "swirl_induction", "axial_induction")


def cyl_residuals(vr, vth, vz, Hr, Hth, Hz, Pbar) -> list:
    """Residuals of the six reduced axisymmetric equations, in order r, theta, z for v then H."""
    return [_sum(p) for p in cyl_equation_pieces(vr, vth, vz, Hr, Hth, Hz, Pbar)]


def cyl_incompressibility(fr: SymField, fz: SymField) -> SymField:
    """d_r(r f_r) + d_z(r f_z)."""
    return _dr(RCYL * fr) + _dz(RCYL * fz)


def pbar_from(P: SymField, H: VecField3) -> SymField:
    """Total pressure ``P + |H|^2 / 2`` (frame-independent: both bases are orthonormal)."""
    return P + dot(H, H) * Fraction(1, 2)


def bundle_cyl_residuals(b: SolutionBundle) -> list:
    if b.frame != CYLINDRICAL:
        raise FrameError("cylindrical residuals need a cylindrical bundle")
    return cyl_residuals(*b.v, *b.H, pbar_from(b.P, b.H))


def to_cartesian(f: VecField3) -> VecField3:
    """Rotate ``(f_r, f_theta, f_z)`` into Cartesian components."""
    if f.frame != CYLINDRICAL:
        raise FrameError("to_cartesian expects a cylindrical vector")
    cos, sin = X1 * _INV_R, X2 * _INV_R
    return VecField3(f.c1 * cos + f.c2 * sin, f.c1 * sin - f.c2 * cos, f.c3)


def bundle_to_cartesian(b: SolutionBundle) -> SolutionBundle:
    return SolutionBundle(to_cartesian(b.v), to_cartesian(b.H), b.P, b.excluded, b.family, b.tstar)


# --- scaling -------------------------------------------------------------------

def _exact_power(lam: Fraction, e: Fraction) -> Fraction:
    """lam**e for rational e, when the result is rational."""
    if e.denominator == 1:
        return lam ** e.numerator
    d = e.denominator
    roots = []
    for part in (lam.numerator, lam.denominator):
        root = round(part ** (1.0 / d))
        root = next((c for c in (root - 1, root, root + 1) if c >= 0 and c ** d == part), None)
        if root is None:
            raise UnsupportedField(f"{lam}^{e} is irrational")
        roots.append(root)
    return Fraction(roots[0], roots[1]) ** e.numerator


def _scale_field(f: SymField, lam: Fraction, pref: Fraction, alpha1: Fraction) -> SymField:
    terms = []
    for key, c in f.items():
        p1, p2, p3, pR, pS, pT = key
        if not pT.is_zero() or "Tstar" in c.variables():
            raise UnsupportedField("field depends on T* outside s = T* - t")
        spatial = p1 + p2 + p3 + pR * 2
        if not spatial.is_constant():
            raise UnsupportedField("spatial exponents depend on parameters")
        s_part = pS * alpha1
        if not s_part.is_constant():
            if lam == 1:
                s_part = AffineExp()
            else:
                raise UnsupportedField("s exponent depends on a symbolic parameter; bind a first")
        factor = pref * _exact_power(lam, spatial.value + s_part.value)
        terms.append(Term(c * factor, *key))
    return SymField(terms)


def scale_solution(b: SolutionBundle, lam, alpha) -> SolutionBundle:
    """``lam^alpha v(lam^(alpha+1) t, lam x)`` and friends, with the new singular time.

    Writing ``T* - lam^(alpha+1) t = lam^(alpha+1) (T*' - t)`` with
    ``T*' = lam^-(alpha+1) T*`` keeps every field a function of the new ``s``.
    """
    _cartesian(b.v, b.H)
    lam, alpha = Fraction(lam), Fraction(alpha)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    alpha1 = alpha + 1
    pv = _exact_power(lam, alpha)
    pp = _exact_power(lam, 2 * alpha)
    sc = lambda f, p: _scale_field(f, lam, p, alpha1)  # noqa: E731
    return SolutionBundle(
        b.v.map(lambda c: sc(c, pv)),
        b.H.map(lambda c: sc(c, pv)),
        sc(b.P, pp),
        b.excluded,
        b.family,
        b.tstar * (1 / _exact_power(lam, alpha1)),
    )


# --- reports ---------------------------------------------------------------------

@dataclass
class ResidualEntry:
    id: str
    symbolic_zero: bool
    numeric_max_rel: float | None = None
    samples: int = 0


@dataclass
class ResidualReport:
    entries: list
    params: dict = field(default_factory=dict)
    seed: int | None = None

    @property
    def all_zero(self) -> bool:
        return all(e.symbolic_zero for e in self.entries)

    def to_dict(self) -> dict:
        params = {k: str(v) for k, v in sorted(self.params.items())}
        return {
            "entries": [
                {"id": e.id, "symbolic_zero": e.symbolic_zero, "numeric_max_rel": e.numeric_max_rel,
                 "samples": e.samples, "params": params, "seed": self.seed}
                for e in self.entries
            ],
            "params": params,
            "seed": self.seed,
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def verify_symbolic(cart: SolutionBundle, cyl: SolutionBundle | None = None) -> ResidualReport:
    """Exact residual checks of a bundle; with ``cyl`` also the reduced system and frame agreement."""
    entries = []
    for i, c in enumerate(momentum_residual(cart), 1):
        entries.append(ResidualEntry(f"momentum_{i}", c.is_zero()))
    for i, c in enumerate(induction_residual(cart), 1):
        entries.append(ResidualEntry(f"induction_{i}", c.is_zero()))
    entries.append(ResidualEntry("divergence_v", divergence(cart.v).is_zero()))
    entries.append(ResidualEntry("divergence_H", divergence(cart.H).is_zero()))
    if cyl is not None:
        res = bundle_cyl_residuals(cyl)
        entries.append(ResidualEntry("cylindrical_system", all(r.is_zero() for r in res)))
        inc = [cyl_incompressibility(cyl.v.c1, cyl.v.c3), cyl_incompressibility(cyl.H.c1, cyl.H.c3)]
        entries.append(ResidualEntry("cylindrical_incompressibility", all(r.is_zero() for r in inc)))
        entries.append(ResidualEntry("frame_velocity", to_cartesian(cyl.v) == cart.v))
        entries.append(ResidualEntry("frame_magnetic", to_cartesian(cyl.H) == cart.H))
    return ResidualReport(entries)


__all__ = [
    "CARTESIAN", "CYLINDRICAL", "CYL_EQUATIONS", "VecField3", "Exclusion", "SolutionBundle",
    "grad", "divergence", "curl", "cross", "dot", "advect", "vector_laplacian", "lorentz_two_ways",
    "momentum_pieces", "induction_pieces", "momentum_residual", "induction_residual",
    "cyl_laplacian", "cyl_equation_pieces", "cyl_residuals", "cyl_incompressibility", "pbar_from",
    "bundle_cyl_residuals", "to_cartesian", "bundle_to_cartesian", "scale_solution",
    "ResidualEntry", "ResidualReport", "verify_symbolic",
]
