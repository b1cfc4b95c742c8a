"""Batch studies: uniform-refinement convergence, interpolation rates,
spectral-norm tables, least-squares rate fits and CSV emission.

Configs are flat key=value text (no schema dependencies); every float in
a CSV is written with shortest round-trip precision so parsing a table
reproduces the values bit for bit.
"""

from __future__ import annotations

import io
import time
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dpg_core, spectral
from .fe_spaces import build_dofmap
from .mesh import build_mesh, build_skeleton
from .physics import ManufacturedCase, gaussian_case, wavepacket_case
from .ref_element import dual_basis, ElementMap, interpolation_error_norms

__all__ = ["StudyConfig", "ConvergenceRow", "ConvergenceTable", "FitError",
           "run_convergence", "fit_rate", "pre_plateau", "run_interp_study",
           "InterpTable", "run_oracle", "OracleTable", "parse_config",
           "make_case", "default_smooth_field"]

PLATEAU_ERROR_FLOOR_FACTOR = 100.0
PLATEAU_IMPROVEMENT_FACTOR = 2.0


class FitError(RuntimeError):
    """Not enough usable data points for a rate fit."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class StudyConfig:
    """One convergence study: a case, a discretization, refinement levels."""

    case: str = "gaussian"
    M: float = 1.5
    T0: float = 1.5
    beta: float = 2.5
    omega: float = 20.0
    p: int = 3
    dp: int = 1
    variant: str = "practical"
    levels: tuple = (2, 4, 8, 16, 32)
    solver: str = "auto"
    tol: float | None = None
    out: str | None = None
    L: float = 1.0
    T: float = 1.0
    cond: bool = False
    q_load: int | None = None
    q_err: int | None = None

    def __post_init__(self):
        if self.p < 3:
            raise ValueError(f"trial order must be >= 3, got {self.p}")
        lv = tuple(self.levels)
        if len(lv) == 0 or any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError(f"levels must be strictly increasing, got {lv}")
        object.__setattr__(self, "levels", lv)


def make_case(cfg: StudyConfig) -> ManufacturedCase:
    if cfg.case == "gaussian":
        return gaussian_case(M=cfg.M, T0=cfg.T0, beta=cfg.beta)
    if cfg.case == "wavepacket":
        return wavepacket_case(omega=cfg.omega, beta=cfg.beta)
    raise ValueError(f"unknown case {cfg.case!r}; options: gaussian, wavepacket")


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    h: float
    n_dofs: int
    l2_error: float
    eta: float
    cond: float | None
    wall_time: float


@dataclass
class ConvergenceTable:
    config: StudyConfig
    rows: list

    COLUMNS = ("level", "h", "n_dofs", "l2_error", "eta", "cond", "wall_time")

    def errors(self) -> np.ndarray:
        return np.array([r.l2_error for r in self.rows])

    def rate_h(self, tol: float | None = None) -> float:
        rows = pre_plateau(self.rows, tol=self._tol(tol))
        return fit_rate([r.h for r in rows], [r.l2_error for r in rows], kind="h")

    def rate_n(self, tol: float | None = None) -> float:
        rows = pre_plateau(self.rows, tol=self._tol(tol))
        return fit_rate([r.n_dofs for r in rows], [r.l2_error for r in rows], kind="n")

    def _tol(self, tol):
        if tol is not None:
            return tol
        return self.config.tol if self.config.tol is not None else dpg_core.DIRECT_SOLVE_TOL

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join([str(r.level), _fmt(r.h), str(r.n_dofs),
                                _fmt(r.l2_error), _fmt(r.eta), _fmt(r.cond),
                                _fmt(r.wall_time)]) + "\n")
        return buf.getvalue()

    @staticmethod
    def parse_csv(text: str) -> list:
        lines = [ln for ln in text.strip().splitlines() if ln]
        header = lines[0].split(",")
        if tuple(header) != ConvergenceTable.COLUMNS:
            raise ValueError(f"unexpected header {header}")
        rows = []
        for ln in lines[1:]:
            parts = ln.split(",")
            rows.append(ConvergenceRow(
                level=int(parts[0]), h=float(parts[1]), n_dofs=int(parts[2]),
                l2_error=float(parts[3]), eta=float(parts[4]),
                cond=float(parts[5]) if parts[5] else None,
                wall_time=float(parts[6])))
        return rows


def pre_plateau(rows: Sequence, tol: float = dpg_core.DIRECT_SOLVE_TOL) -> list:
    """Drop trailing levels where conditioning has flattened the curve.

    A level is kept while its error improves on the previous level by at
    least a factor of 2 (the method converges much faster than that when
    it is resolving) and stays above 100x the solver tolerance; the tail
    after the first stall is discarded.  The first two levels always
    anchor the fit, since the coarse range is never conditioning-limited
    and a fit needs two points.
    """
    rows = [r for r in rows if np.isfinite(r.l2_error)]  # drop marked levels
    if not rows:
        return []
    floor = PLATEAU_ERROR_FLOOR_FACTOR * tol
    kept = list(rows[:2])
    for prev, row in zip(rows[1:], rows[2:]):
        if row.l2_error < floor:
            break
        if prev.l2_error > 0 and row.l2_error > prev.l2_error / PLATEAU_IMPROVEMENT_FACTOR:
            break
        kept.append(row)
    return kept


def fit_rate(xs: Sequence, errors: Sequence, kind: str = "h") -> float:
    """Least-squares slope of log(error) against the refinement parameter.

    kind="h": fits error ~ C h^s against mesh size, returning s.
    kind="n": fits error ~ C n^(-s) against DOF counts, returning s.
    Nonpositive error values are excluded with a warning.
    """
    xs = np.asarray(xs, dtype=float)
    es = np.asarray(errors, dtype=float)
    keep = (es > 0) & np.isfinite(es)
    if not keep.all():
        warnings.warn(f"excluding {np.count_nonzero(~keep)} nonpositive or marked "
                      "error values from the rate fit", stacklevel=2)
    xs, es = xs[keep], es[keep]
    if xs.size < 2:
        raise FitError(f"rate fit needs >= 2 usable levels, got {xs.size}")
    if kind == "h":
        slope = np.polyfit(np.log(1.0 / xs), np.log(es), 1)[0]
        return float(-slope)
    if kind == "n":
        slope = np.polyfit(np.log(xs), np.log(es), 1)[0]
        return float(-slope)
    raise ValueError(f"unknown fit kind {kind!r}")


def run_level(cfg: StudyConfig, n: int, case: ManufacturedCase | None = None,
              forcing=None, boundary_data=None) -> tuple[ConvergenceRow, dpg_core.SolveReport]:
    """Assemble and solve one refinement level, returning its table row."""
    case = case if case is not None else make_case(cfg)
    t0 = time.perf_counter()
    mesh = build_mesh(cfg.L, cfg.T, n, n)
    skel = build_skeleton(mesh)
    dofmap = build_dofmap(mesh, skel, cfg.p, cfg.dp, cfg.variant)
    system = dpg_core.assemble(mesh, skel, dofmap, case=case, forcing=forcing,
                               boundary_data=boundary_data, q_load=cfg.q_load)
    report = dpg_core.solve(system, method=cfg.solver, tol=cfg.tol,
                            with_condition_estimate=cfg.cond)
    err = dpg_core.l2_error(report, case.u, q_err=cfg.q_err)
    row = ConvergenceRow(level=n, h=mesh.hx, n_dofs=dofmap.n_free,
                         l2_error=err, eta=report.eta,
                         cond=report.cond_estimate,
                         wall_time=time.perf_counter() - t0)
    return row, report


def run_convergence(cfg: StudyConfig) -> ConvergenceTable:
    """Uniform-refinement study over cfg.levels; writes CSV when cfg.out set.

    A level whose solve fails is marked with nan errors and the study
    continues; rate fits ignore marked rows (at least two successful
    levels are needed for a fit).
    """
    case = make_case(cfg)
    rows = []
    for n in cfg.levels:
        try:
            row, _ = run_level(cfg, n, case=case)
        except (dpg_core.AssemblyError, dpg_core.SolverError) as exc:
            warnings.warn(f"level {n} failed and was marked: {exc}", stacklevel=2)
            row = ConvergenceRow(level=n, h=cfg.L / n, n_dofs=0,
                                 l2_error=float("nan"), eta=float("nan"),
                                 cond=None, wall_time=float("nan"))
        rows.append(row)
    table = ConvergenceTable(config=cfg, rows=rows)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(table.to_csv())
    return table


# ---------------------------------------------------------------------------
# interpolation study
# ---------------------------------------------------------------------------

def default_smooth_field():
    """w = sin(pi x) exp(-t) with its derivatives, the rate-study workhorse."""
    def w(x, t):
        return np.sin(np.pi * np.asarray(x)) * np.exp(-np.asarray(t))

    def w_x(x, t):
        return np.pi * np.cos(np.pi * np.asarray(x)) * np.exp(-np.asarray(t))

    def w_t(x, t):
        return -np.sin(np.pi * np.asarray(x)) * np.exp(-np.asarray(t))

    def w_xx(x, t):
        return -np.pi**2 * np.sin(np.pi * np.asarray(x)) * np.exp(-np.asarray(t))

    return w, w_x, w_t, w_xx


@dataclass(frozen=True)
class InterpRow:
    level: int
    h: float
    err_l2: float
    err_dt: float
    err_dxx: float


@dataclass
class InterpTable:
    p: int
    rows: list

    COLUMNS = ("level", "h", "err_l2", "err_dt", "err_dxx")

    def slopes(self) -> tuple[float, float, float]:
        hs = [r.h for r in self.rows]
        return (fit_rate(hs, [r.err_l2 for r in self.rows]),
                fit_rate(hs, [r.err_dt for r in self.rows]),
                fit_rate(hs, [r.err_dxx for r in self.rows]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join([str(r.level), _fmt(r.h), _fmt(r.err_l2),
                                _fmt(r.err_dt), _fmt(r.err_dxx)]) + "\n")
        return buf.getvalue()


def run_interp_study(p: int, levels: Sequence, field_closures=None,
                     L: float = 1.0, T: float = 1.0,
                     quad_order: int | None = None,
                     out: str | None = None) -> InterpTable:
    """Interpolation errors of a smooth field on uniform refinements.

    Columns: L2, time-derivative and second-x-derivative norms of
    w - Pi w; the fitted slopes approach p+1, p and p-1.
    """
    w, w_x, w_t, w_xx = field_closures if field_closures else default_smooth_field()
    basis = dual_basis(p)
    q = quad_order if quad_order is not None else p + 5
    rows = []
    for n in levels:
        mesh = build_mesh(L, T, n, n)
        x0, t0 = mesh.corners()
        maps = [ElementMap(x0=x0[e], t0=t0[e], hx=mesh.hx, ht=mesh.ht)
                for e in range(mesh.n_elements)]
        e0, et, exx = interpolation_error_norms(maps, basis, w, w_x, w_t, w_xx, q)
        rows.append(InterpRow(level=n, h=mesh.hx, err_l2=e0, err_dt=et, err_dxx=exx))
    table = InterpTable(p=p, rows=rows)
    if out:
        with open(out, "w") as fh:
            fh.write(table.to_csv())
    return table


# ---------------------------------------------------------------------------
# spectral-oracle study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleRow:
    M: int
    u_norm_sq_closed: float
    grad_norm_sq_closed: float
    u_norm_sq_quad: float
    grad_norm_sq_quad: float


@dataclass
class OracleTable:
    T: float
    rows: list

    COLUMNS = ("M", "u_norm_sq_closed", "grad_norm_sq_closed",
               "u_norm_sq_quad", "grad_norm_sq_quad")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.COLUMNS) + "\n")
        for r in self.rows:
            buf.write(",".join([str(r.M), _fmt(r.u_norm_sq_closed),
                                _fmt(r.grad_norm_sq_closed),
                                _fmt(r.u_norm_sq_quad),
                                _fmt(r.grad_norm_sq_quad)]) + "\n")
        return buf.getvalue()


def run_oracle(modes: Sequence, T: float = 1.0, out: str | None = None) -> OracleTable:
    """Blowup norms of the resonant example, closed form next to quadrature.

    The quadrature column evolves each mode by the Duhamel integral
    rather than using the closed-form profile, so the two columns agree
    only if the time-integration machinery is sound.
    """
    rows = []
    for M in modes:
        if M < 1:
            raise ValueError(f"mode counts must be >= 1, got {M}")
        closed = spectral.blowup_norms(M, T)
        sol = spectral.counterexample_solution(M, T=T)
        quad_sol = spectral.SpectralSolution(L=sol.L, T=T, beta=sol.beta, M=M,
                                             f_modes=sol.f_modes, u_modes=None)
        quad = spectral.norms_by_quadrature(quad_sol)
        rows.append(OracleRow(M=M, u_norm_sq_closed=closed[0],
                              grad_norm_sq_closed=closed[1],
                              u_norm_sq_quad=quad[0], grad_norm_sq_quad=quad[1]))
    table = OracleTable(T=T, rows=rows)
    if out:
        with open(out, "w") as fh:
            fh.write(table.to_csv())
    return table


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_CONFIG_TYPES = {
    "case": str, "M": float, "T0": float, "beta": float, "omega": float,
    "p": int, "dp": int, "variant": str, "solver": str, "tol": float,
    "out": str, "L": float, "T": float, "cond": bool,
    "q_load": int, "q_err": int,
}


def parse_config(text: str, **overrides) -> StudyConfig:
    """Parse flat key=value lines into a study config.

    Blank lines and #-comments are ignored; `levels` is a comma-separated
    integer list.  Keyword overrides win over file values.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno} is not key=value: {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "levels":
            values[key] = tuple(int(v) for v in val.split(",") if v)
        elif key in _CONFIG_TYPES:
            typ = _CONFIG_TYPES[key]
            values[key] = (val.lower() in ("1", "true", "yes")) if typ is bool else typ(val)
        else:
            raise ValueError(f"unknown config key {key!r} on line {lineno}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return StudyConfig(**values)
