"""Command-line entry point: ``mhdblowup {verify,ansatz,diagnose,converge,export}``.

Exit codes: 0 success, 1 verification failure, 2 configuration or parameter error.
Files go to ``--out`` (a directory), else ``$MHDBLOWUP_OUT_DIR``, else the
current directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .catalog import FamilyParams, family, nse_family
from .errors import DomainError, MHDBlowupError, NoSolution, ParamError, UnsupportedField
from .residuals import CYLINDRICAL, verify_symbolic

OUT_ENV = "MHDBLOWUP_OUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
ORDER_TOL = 0.2


@dataclass
class RunConfig:
    command: str
    family: str
    nse: bool
    params: FamilyParams
    nu: Fraction
    seed: int
    n: int
    grids: tuple
    box: tuple
    r_min: float
    t: float
    out_dir: Path
    fmt: str
    equation: str

    @property
    def tag(self) -> str:
        return ("nse-" if self.nse else "") + self.family

    def bundle(self, form: str = "cartesian"):
        if self.nse:
            return nse_family(self.family, self.params, form)
        return family(self.family, self.params, form)

    def numeric_params(self) -> dict:
        out = {name: float(v) for name, v in self.params.bindings().items()}
        out["nu"] = float(self.nu)
        return out


def _exact(text: str | None, name: str, strict: bool):
    if text is None:
        return None
    if strict and any(c in text for c in ".eE"):
        raise ParamError(f"--{name} must be an exact rational 'num/den' for this command, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParamError(f"--{name}: cannot read {text!r} as a rational number") from None


def _build_config(ns: argparse.Namespace) -> RunConfig:
    exact_cmd = ns.command in ("verify", "ansatz")
    defaults = {} if exact_cmd else {"a": "1", "abar": "1", "k": "1", "tstar": "1"}
    vals = {}
    for name in ("a", "abar", "k", "tstar"):
        raw = getattr(ns, name)
        if ns.nse and name == "abar" and raw is None:
            raw = "0"
        if raw is None:
            raw = defaults.get(name)
        vals[name] = _exact(raw, name, exact_cmd)
    if ns.nse and vals["abar"] not in (None, 0):
        raise ParamError("--nse needs abar = 0")
    params = FamilyParams(**vals)
    grids = tuple(int(g) for g in ns.grids.split(",")) if ns.grids else (16, 32, 64)
    lo, hi = (float(x) for x in ns.box.split(",")) if ns.box else (0.5, 1.5)
    out_dir = Path(ns.out or os.environ.get(OUT_ENV) or ".")
    return RunConfig(ns.command, ns.family, ns.nse, params, _exact(ns.nu, "nu", False) or Fraction(0),
                     ns.seed, ns.n, grids, ((lo, hi),) * 3, ns.rmin, ns.t, out_dir, ns.format, ns.equation)


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / name
    path.write_text(text)
    return path


# --- commands -------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    cart = cfg.bundle()
    cyl = cfg.bundle(CYLINDRICAL)
    report = verify_symbolic(cart, cyl)
    report.params = {k: v for k, v in cfg.params.bindings().items()}
    path = _write(cfg, f"verify_{cfg.tag}.json", report.to_text())
    for e in report.entries:
        print(f"{e.id:32s} {'zero' if e.symbolic_zero else 'NONZERO'}")
    print(f"report: {path}")
    return EXIT_OK if report.all_zero else EXIT_FAIL


def cmd_ansatz(cfg: RunConfig) -> int:
    from .ansatz import solve_theta

    if cfg.nse:
        raise ParamError("the ansatz derivation needs the magnetic field; drop --nse")
    sol = solve_theta(cfg.family, cfg.params, cfg.equation)
    path = _write(cfg, f"ansatz_{cfg.tag}.json", sol.trace_text())
    print(f"p = {sol.p}, q = {sol.q}, beta = {sol.beta}, s exponent = {sol.s_exponent}")
    print(f"p - 2q + 1 = {sol.constraint_value()}")
    for m in sol.mismatches:
        print(f"mismatch: {m}")
    print(f"verified against the reduced system: {sol.verified}")
    print(f"kbar = {sol.kbar}")
    print(f"trace: {path}")
    return EXIT_OK if sol.verified else EXIT_FAIL


def cmd_diagnose(cfg: RunConfig) -> int:
    from .numeric import SampleDomain, blowup_series, energy_on_ball

    b = cfg.bundle()
    params = cfg.numeric_params()
    series = blowup_series(b, SampleDomain.ball(1.0, r_min=cfg.r_min, n=cfg.n, seed=cfg.seed), params=params)
    rows = ["radius,energy"]
    for radius in (1, 2, 4, 8):
        try:
            e = energy_on_ball(b, radius, cfg.t, params, seed=cfg.seed)
            rows.append(f"{radius},{e!r}")
        except DomainError:
            rows.append(f"{radius},inf")
    doc = json.loads(series.to_text())
    doc["energy"] = rows[1:]
    path = _write(cfg, f"diagnose_{cfg.tag}.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _write(cfg, f"diagnose_{cfg.tag}_loglog.dat", series.plot_data())
    _write(cfg, f"diagnose_{cfg.tag}_energy.csv", "\n".join(rows) + "\n")
    for name in ("v", "gradv", "H"):
        print(f"{name}_exponent = {series.fitted_exponents[name]:.4f}"
              f" (fit rms {series.fit_residuals[name]:.1e})")
    print(f"report: {path}")
    return EXIT_OK


def cmd_converge(cfg: RunConfig) -> int:
    from .numeric import grid_convergence

    report = grid_convergence(cfg.bundle(), cfg.grids, cfg.box, cfg.t, cfg.numeric_params())
    path = _write(cfg, f"converge_{cfg.tag}.json", report.to_text())
    ok = True
    for eq in report.orders:
        if report.exact[eq]:
            print(f"{eq:14s} exact")
            continue
        order = report.order(eq)
        good = abs(order - 2.0) <= ORDER_TOL
        ok &= good
        print(f"{eq:14s} order {order:.3f} {'ok' if good else 'OFF'}")
    print(f"report: {path}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(cfg: RunConfig) -> int:
    from .numeric import SampleDomain, export_csv

    d = SampleDomain(r_min=cfg.r_min, n=cfg.n, seed=cfg.seed)
    text = export_csv(cfg.bundle(), d, cfg.t, cfg.numeric_params())
    if cfg.fmt == "report-text":
        b = cfg.bundle()
        text = json.dumps({k: f.text() for k, f in b.fields().items()}, indent=2, sort_keys=True) + "\n"
        path = _write(cfg, f"export_{cfg.tag}.json", text)
    else:
        path = _write(cfg, f"export_{cfg.tag}.csv", text)
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "ansatz": cmd_ansatz, "diagnose": cmd_diagnose,
            "converge": cmd_converge, "export": cmd_export}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhdblowup", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", choices=("one", "two"), default="one")
        p.add_argument("--nse", action="store_true", help="Navier-Stokes reduction (H = 0)")
        for param in ("a", "abar", "k", "tstar"):
            p.add_argument(f"--{param}", default=None)
        p.add_argument("--nu", default="3/10")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n", type=int, default=1000)
        p.add_argument("--grids", default=None, help="comma-separated, doubling, e.g. 16,32,64")
        p.add_argument("--box", default=None, help="cube bounds lo,hi for converge")
        p.add_argument("--rmin", type=float, default=0.1)
        p.add_argument("--t", type=float, default=0.0)
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
        p.add_argument("--format", choices=("report-text", "csv"), default="csv" if name == "export" else "report-text")
        p.add_argument("--equation", choices=("printed", "derived"), default="printed")
    return parser


_VALUE_FLAGS = ("--a", "--abar", "--k", "--tstar", "--nu", "--t", "--box")


def _join_negative(argv: list) -> list:
    """Let ``--a -1/2`` through: argparse would read ``-1/2`` as an option."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_join_negative(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = _build_config(ns)
        return COMMANDS[ns.command](cfg)
    except (ParamError, NoSolution, DomainError, UnsupportedField, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MHDBlowupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
