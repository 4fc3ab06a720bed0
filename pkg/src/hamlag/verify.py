"""Residual checks of every equation satisfied by the constructed immersion.

Each check returns one or more ``ResidualEntry`` records; ``run_suite``
collects them into a ``ResidualReport``. Derivatives are analytic except for
the frame equations R_x = A R, R_y = B R, which use centred differences.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import immersion as im
from .errors import HamlagError, RootFindFailure
from .params import (
    ResolvedConstants,
    RootBranch,
    SeedParameters,
    coefficient_residuals,
    cubic_root_residuals,
    minimal_constraint,
    resolve,
)
from .profile import RadialProfile, build_profile
from .quadrature import fixed_gauss_legendre

# tolerance tiers
EXACT = 1e-12
ANALYTIC = 1e-9
FINITE_DIFF = 1e-6

DEFAULT_TOLERANCES = {
    "cubic_roots": 1e-10,
    "coefficient_matching": ANALYTIC,
    "a_squared_identity": ANALYTIC,
    "ode_h": ANALYTIC,
    "v_ode_quadratic_a": ANALYTIC,
    "v_ode_linear_a": ANALYTIC,
    "h_periodicity": 1e-10,
    "amplitude_partition": EXACT,
    "phase_additivity": 2e-11,
    "phase_quadrature_cross_check": 1e-10,
    "lift_unit_norm": EXACT,
    "lift_orthogonality": ANALYTIC,
    "lift_conformality": ANALYTIC,
    "lift_rx_finite_difference": 1e-7,
    "tangent_determinant_modulus": 1e-10,
    "su3_unitarity": 1e-10,
    "su3_determinant": 1e-10,
    "connection_in_su3": EXACT,
    "structure_eq_x": FINITE_DIFF,
    "structure_eq_y": FINITE_DIFF,
    "f_definition": 1e-7,
    "g_definition": 1e-7,
    "lagrangian_angle_linear": 1e-8,
    "zero_curvature": 1e-8,
    "compatibility_mixed": EXACT,
    "compatibility_diagonal": ANALYTIC,
    "compatibility_gauss": 1e-8,
    "component_ode_first_order": 1e-7,
    "component_ode_second_order": 1e-6,
    "component_ode_eliminated": 1e-6,
    "minimal_slopes": ANALYTIC,
    "minimal_angle_constant": 1e-8,
}

# reported, not counted towards the verdict
INFORMATIONAL = {"v_ode_quadratic_a", "v_ode_linear_a"}

MINIMAL_REFERENCE = ((1.0, 2.0, -3.0), 5.0)


@dataclass(frozen=True)
class ResidualEntry:
    check_name: str
    max_abs_residual: float
    grid: str
    tolerance: float
    passed: bool
    informational: bool = False


@dataclass
class ResidualReport:
    entries: list[ResidualEntry] = field(default_factory=list)
    constants: dict | None = None

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries if not e.informational)

    def __getitem__(self, name: str) -> ResidualEntry:
        for e in self.entries:
            if e.check_name == name:
                return e
        raise KeyError(name)

    def failures(self) -> list[ResidualEntry]:
        return [e for e in self.entries if not e.passed and not e.informational]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "constants": self.constants,
            "entries": [asdict(e) for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class Grid:
    nx: int = 64
    ny: int = 64
    y_max: float = 1.0
    n_line: int = 1024

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2 or self.n_line < 2:
            raise ValueError("grid counts must be >= 2")

    def plane(self, T: float):
        x = np.linspace(0.0, T, self.nx)
        y = np.linspace(0.0, self.y_max, self.ny)
        return np.meshgrid(x, y, indexing="ij")

    def describe(self, T: float) -> str:
        return f"{self.nx}x{self.ny} over [0, {T:.6g}] x [0, {self.y_max:g}]"


class _Collector:
    def __init__(self, tolerances: dict[str, float]):
        self.tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
        self.entries: list[ResidualEntry] = []

    def add(self, name: str, residual, grid: str):
        residual = float(np.max(np.abs(residual), initial=0.0))
        tol = self.tol[name]
        self.entries.append(
            ResidualEntry(name, residual, grid, tol, bool(residual <= tol), name in INFORMATIONAL)
        )


def _wrap(angle):
    return np.angle(np.exp(1j * angle))


# -- algebraic and profile checks ------------------------------------------

def check_algebra(k: ResolvedConstants, out: _Collector):
    out.add("cubic_roots", cubic_root_residuals(k), "alpha_1..3")
    out.add("coefficient_matching", coefficient_residuals(k), "coefficients of h^3..h^0")
    a_sq = -4 * k.c - 4 * (k.a1 + k.a2 - k.a3)
    out.add("a_squared_identity", (k.a**2 - a_sq) / max(1.0, abs(a_sq)), "scalar")


def check_profile(p: RadialProfile, grid: Grid, out: _Collector):
    k = p.constants
    x = np.linspace(0.0, 2 * p.T, grid.n_line)
    desc = f"{grid.n_line} points on [0, 2T]"
    h, hp = p.h(x), p.h_prime(x)
    ode = hp**2 + 4 * (h - k.a1) * (h - k.a2) * (h + k.a3)
    out.add("ode_h", ode / max(1.0, k.a1**3), desc)

    vp2 = p.v_prime(x) ** 2
    rest = -(k.c1**2 + k.c2**2) / h**2 + (k.a * k.c2 - k.b * k.c1) / h - h - k.c
    out.add("v_ode_quadratic_a", vp2 - (rest - k.a**2 / 4), desc)
    out.add("v_ode_linear_a", vp2 - (rest - k.a / 4), desc)

    out.add("h_periodicity", p.h(x + p.T) - h, desc)
    out.add("amplitude_partition", p.amplitude_squared(x).sum(axis=0) - 1.0, desc)

    xs = np.linspace(-p.T, 2 * p.T, 97)
    out.add("phase_additivity", p.phases(xs + p.T) - p.phases(xs) - p.Lambda[:, None], "97 points on [-T, 2T]")
    lam_fixed = fixed_gauss_legendre(p.phase_rate, 0.0, p.T, order=20, panels=10)
    out.add("phase_quadrature_cross_check", lam_fixed - p.Lambda, "G_i(T), Gauss-Legendre 20x10 vs adaptive GK15")


# -- lift and frame checks --------------------------------------------------

def _fd(fun, x, y, step, axis):
    if axis == 0:
        return (fun(x + step, y) - fun(x - step, y)) / (2 * step)
    return (fun(x, y + step) - fun(x, y - step)) / (2 * step)


def _structure_residual(p: RadialProfile, x, y, M, R, axis, tol, step=1e-5):
    def R_at(xx, yy):
        return im.frame(xx, yy, p, check=False).R

    d = _fd(R_at, x, y, step, axis)
    res = np.abs(d - M @ R).max()
    if res > tol:
        # Richardson fallback
        d2 = _fd(R_at, x, y, step / 2, axis)
        res = min(res, np.abs((4 * d2 - d) / 3 - M @ R).max())
    return res


def check_frame_and_metric(p: RadialProfile, grid: Grid, out: _Collector):
    k = p.constants
    x, y = grid.plane(p.T)
    desc = grid.describe(p.T)
    lf = im.lift(x, y, p)
    ev = np.sqrt(p.h(x))

    out.add("lift_unit_norm", np.linalg.norm(lf.r, axis=-1) - 1.0, desc)
    out.add("lift_orthogonality", np.stack([
        im.hermitian(lf.r, lf.r_x), im.hermitian(lf.r, lf.r_y), im.hermitian(lf.r_x, lf.r_y)]), desc)
    out.add("lift_conformality", np.stack([
        np.linalg.norm(lf.r_x, axis=-1) - ev, np.linalg.norm(lf.r_y, axis=-1) - ev]), desc)
    e = 1e-5
    rx_fd = (im.position(x + e, y, p) - im.position(x - e, y, p)) / (2 * e)
    out.add("lift_rx_finite_difference", rx_fd - lf.r_x, desc + ", step 1e-5")

    det = im._tangent_determinant(x, lf, p)
    out.add("tangent_determinant_modulus", np.abs(det) - 1.0, desc)

    fs = im.frame(x, y, p, check=False)
    unit, det_r = im.su3_residuals(fs.R)
    out.add("su3_unitarity", unit, desc)
    out.add("su3_determinant", det_r, desc)
    conj_t = lambda M: np.conj(np.swapaxes(M, -1, -2))
    out.add("connection_in_su3", np.stack([
        np.abs(fs.A + conj_t(fs.A)).max(), np.abs(fs.B + conj_t(fs.B)).max(),
        np.abs(np.trace(fs.A, axis1=-2, axis2=-1)).max(), np.abs(np.trace(fs.B, axis1=-2, axis2=-1)).max()]), desc)

    tol = out.tol
    out.add("structure_eq_x", _structure_residual(p, x, y, fs.A, fs.R, 0, tol["structure_eq_x"]), desc + ", step 1e-5")
    out.add("structure_eq_y", _structure_residual(p, x, y, fs.B, fs.R, 1, tol["structure_eq_y"]), desc + ", step 1e-5")

    # if = <d/dx(e^-v r_y), e^-v r_y>,  ig = <d/dy(e^-v r_x), e^-v r_x>
    al = p.alpha
    vx = p.v_prime(x)[..., None]
    inv = (1.0 / ev)[..., None]
    d_ry = inv * (-vx * lf.r_y + 1j * al * lf.r_x)
    d_rx = inv * (1j * al * lf.r_x)
    i_f = im.hermitian(d_ry, inv * lf.r_y)
    i_g = im.hermitian(d_rx, inv * lf.r_x)
    h = p.h(x)
    out.add("f_definition", i_f - 1j * (k.c2 / h - k.a / 2), desc)
    out.add("g_definition", i_g - 1j * k.c1 / h, desc)

    beta = -np.angle(det)
    out.add("lagrangian_angle_linear", _wrap(beta - beta[0, 0] - k.a * x - k.b * y), desc)
    return fs


def check_zero_curvature(p: RadialProfile, grid: Grid, out: _Collector, fs: im.FrameState | None = None):
    """A_y - B_x + [A, B] with A_y and B_x taken analytically (beta_x = a, beta_y = b)."""
    k = p.constants
    x, y = grid.plane(p.T)
    if fs is None:
        fs = im.frame(x, y, p, check=False)
    h, hp = p.h(x), p.h_prime(x)
    ev = np.sqrt(h)
    vx, vxx = p.v_prime(x), p.v_second(x)
    up, down = ev * np.exp(1j * fs.beta), ev * np.exp(-1j * fs.beta)
    fx = -k.c2 * hp / h**2
    gx = -k.c1 * hp / h**2

    A_y = np.zeros_like(fs.A)
    A_y[..., 0, 1] = 1j * k.b * up
    A_y[..., 1, 0] = 1j * k.b * down
    B_x = np.zeros_like(fs.B)
    B_x[..., 0, 2] = (vx + 1j * k.a) * up
    B_x[..., 2, 0] = -(vx - 1j * k.a) * down
    B_x[..., 1, 1] = 1j * gx
    B_x[..., 1, 2] = 1j * fx + vxx
    B_x[..., 2, 1] = 1j * fx - vxx
    B_x[..., 2, 2] = -1j * gx
    res = A_y - B_x + fs.A @ fs.B - fs.B @ fs.A
    out.add("zero_curvature", np.abs(res).max(), grid.describe(p.T))


def check_compatibility(p: RadialProfile, grid: Grid, out: _Collector):
    """Compatibility conditions for U = f e^{2v}, V = g e^{2v} when nothing depends on y."""
    k = p.constants
    x = np.linspace(0.0, p.T, grid.n_line)
    desc = f"{grid.n_line} points on [0, T] (y-independent)"
    h, hp = p.h(x), p.h_prime(x)
    f, g = k.c2 / h - k.a / 2, k.c1 / h
    fx, gx = -k.c2 * hp / h**2, -k.c1 * hp / h**2
    U, V = f * h, g * h
    U_x, V_x = fx * h + f * hp, gx * h + g * hp
    U_y = V_y = v_y = beta_xy = 0.0
    vx, vxx = p.v_prime(x), p.v_second(x)
    beta_x, beta_y = k.a, k.b

    out.add("compatibility_mixed", U_y + V_x + h * beta_xy, desc)
    out.add("compatibility_diagonal", V_y + v_y * h * beta_y - U_x - vx * h * beta_x, desc)
    out.add("compatibility_gauss", vxx + h - 2 * (U**2 + V**2) / h**2 - (beta_x * U + beta_y * V) / h, desc)


def check_component_ode(p: RadialProfile, grid: Grid, out: _Collector):
    """Residuals of the first-order, second-order and eliminated equations for C_i = F_i e^{i G_i}."""
    k = p.constants
    x = np.linspace(0.0, p.T, grid.n_line)
    desc = f"{grid.n_line} points on [0, T], i = 1..3"
    h, vp = p.h(x)[None], p.v_prime(x)[None]
    al = p.alpha[:, None]
    F, Fp, Fpp = p.amplitudes(x), p.amplitudes_prime(x), p.amplitudes_second(x)
    Gp, Gpp = p.phase_rate(x), p.phase_rate_prime(x)
    e = np.exp(1j * p.phases(x))
    C = F * e
    Cp = (Fp + 1j * F * Gp) * e
    Cpp = (Fpp + 2j * Fp * Gp + 1j * F * Gpp - F * Gp**2) * e

    first = 2j * (k.c1 - h * al) * Cp + al * C * ((k.a + 2j * vp) * h - 2 * k.c2)
    second = 2 * (h**2 + k.c1 * al) * C + 1j * Cp * (2 * k.c2 + k.a * h + 2j * h * vp) + 2 * h * Cpp
    elim = 2 * (h * (h - k.b * al - al**2) - k.c1 * al) * C + Cp * ((1j * k.a + 2 * vp) * h - 2j * k.c2)
    out.add("component_ode_first_order", first, desc)
    out.add("component_ode_second_order", second, desc)
    out.add("component_ode_eliminated", elim, desc)


# -- minimal tori -----------------------------------------------------------

def find_minimal_seed(alpha, a1: float, samples: int = 400) -> SeedParameters:
    """Root-find a2 in (0, a1) with (a1 + a2)(c1**2 + c2**2) = a1**2 a2**2 and a resolvable branch."""
    if abs(sum(alpha)) > 1e-12:
        raise ValueError(f"minimal tori need a zero-sum angle triple, got {tuple(alpha)}")
    grid = np.linspace(0.0, a1, samples + 1)[1:-1]
    for branch in RootBranch:
        def phi(a2):
            return minimal_constraint(SeedParameters(alpha, a1, a2, branch))

        vals = []
        for a2 in grid:
            try:
                vals.append(phi(a2))
            except HamlagError:
                vals.append(math.nan)
        for lo, hi, flo, fhi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
                continue
            root = brentq(phi, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            seed = SeedParameters(alpha, a1, root, branch)
            try:
                resolve(seed)
            except HamlagError:
                continue
            return seed
    raise RootFindFailure(f"no resolvable a2 in (0, {a1}) satisfies the minimal-torus constraint")


def check_minimal_specialization(alpha, a1: float, grid: Grid, out: _Collector):
    seed = find_minimal_seed(alpha, a1)
    k = resolve(seed)
    p = build_profile(k)
    desc = f"alpha={tuple(seed.alpha)}, a1={a1:g}, a2={seed.a2:.15g}"
    out.add("minimal_slopes", np.array([k.a, k.b]), desc)
    x, y = grid.plane(p.T)
    beta = im.lagrangian_angle(x, y, p)
    out.add("minimal_angle_constant", _wrap(beta - beta[0, 0]), desc + "; " + grid.describe(p.T))
    return seed


def run_suite(
    profile: RadialProfile,
    grid: Grid | None = None,
    tolerances: dict[str, float] | None = None,
    minimal: tuple | None = None,
) -> ResidualReport:
    """Run every check against ``profile``; deterministic in its arguments.

    The minimal-torus check uses the seed's angles when they sum to zero and
    a fixed reference triple otherwise (``minimal`` overrides both).
    """
    grid = grid or Grid()
    out = _Collector(tolerances)
    k = profile.constants
    check_algebra(k, out)
    check_profile(profile, grid, out)
    fs = check_frame_and_metric(profile, grid, out)
    check_zero_curvature(profile, grid, out, fs)
    check_compatibility(profile, grid, out)
    check_component_ode(profile, grid, out)
    if minimal is None:
        alpha = k.seed.alpha
        minimal = MINIMAL_REFERENCE
        if abs(sum(alpha)) < 1e-12:
            try:
                find_minimal_seed(alpha, k.a1)
                minimal = (alpha, k.a1)
            except RootFindFailure:
                pass
    check_minimal_specialization(*minimal, grid, out)
    return ResidualReport(out.entries, k.to_dict())
