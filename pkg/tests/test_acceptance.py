"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records a one-line verdict in ``RESULTS``; conftest prints them in
the terminal summary, and running this file as a script prints them directly.
"""
import math
import time

import numpy as np
import pytest

from hamlag import immersion as im
from hamlag import oracle, torus
from hamlag.params import (SeedParameters, coefficient_residuals, cubic_root_residuals, feasibility,
                           resolve, vieta_constants)
from hamlag.profile import build_profile
from hamlag.verify import Grid, find_minimal_seed, run_suite

ALPHA = (0, -1, 3)
A1, A2 = 2.0, 1.0
BRANCHES = ("minus", "plus")

RESULTS: dict[int, str] = {}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def profiles():
    return {br: build_profile(resolve(SeedParameters(ALPHA, A1, A2, br))) for br in BRANCHES}


@pytest.fixture(scope="module")
def reports(profiles):
    out = {}
    for br, prof in profiles.items():
        t0 = time.perf_counter()
        rep = run_suite(build_profile(resolve(SeedParameters(ALPHA, A1, A2, br))))
        out[br] = (rep, time.perf_counter() - t0)
    return out


def test_criterion_1_example_end_to_end(reports):
    _, P, disc = feasibility(A1, A2, *vieta_constants(ALPHA))
    ok_feas = P == pytest.approx(-12.0, abs=1e-12) and disc == pytest.approx(128.0, abs=1e-10)
    ok_suite = all(rep.passed for rep, _ in reports.values())
    slowest = max(dt for _, dt in reports.values())
    record(1, ok_feas and ok_suite and slowest < 10.0,
           f"P={P:g} disc={disc:g}; suite passed on {list(reports)}: {ok_suite}; slowest run {slowest:.2f}s (< 10s)")


def test_criterion_2_algebraic_identities(profiles):
    cubic = max(cubic_root_residuals(p.constants).max() for p in profiles.values())
    coeff = max(coefficient_residuals(p.constants).max() for p in profiles.values())
    x = np.random.default_rng(2024).uniform(0, 10, 1000)
    part = max(np.abs(p.amplitude_squared(x).sum(axis=0) - 1).max() for p in profiles.values())
    record(2, cubic <= 1e-10 and coeff <= 1e-9 and part <= 1e-12,
           f"cubic roots {cubic:.2e} (<= 1e-10), coefficients {coeff:.2e} rel (<= 1e-9), sum F^2 - 1 {part:.2e} (<= 1e-12)")


def test_criterion_3_ode_oracle(profiles):
    reps = {br: oracle.compare(p, steps_per_period=2000, periods=5.0) for br, p in profiles.items()}
    err = max(r["max_error"] for r in reps.values())
    orders = [r["observed_order"] for r in reps.values()]
    ok = err <= 1e-8 and all(abs(o - 4) <= 0.3 for o in orders)
    record(3, ok, f"max |h_rk4 - h| over [0, 5T] at T/2000: {err:.2e} (<= 1e-8); "
                  f"observed order {', '.join(f'{o:.2f}' for o in orders)} (4 +- 0.3)")


FRAME_LIMITS = {
    "su3_unitarity": 1e-10,
    "su3_determinant": 1e-10,
    "structure_eq_x": 1e-6,
    "structure_eq_y": 1e-6,
    "zero_curvature": 1e-8,
    "compatibility_mixed": 1e-8,
    "compatibility_diagonal": 1e-8,
    "compatibility_gauss": 1e-8,
    "component_ode_first_order": 1e-7,
}


def test_criterion_4_frame_checks(reports):
    worst = {}
    for rep, _ in reports.values():
        for name in FRAME_LIMITS:
            worst[name] = max(worst.get(name, 0.0), rep[name].max_abs_residual)
    assert "64x64" in reports["minus"][0]["su3_unitarity"].grid
    bad = [n for n, lim in FRAME_LIMITS.items() if worst[n] > lim]
    record(4, not bad, "64x64 grid; " + ", ".join(f"{n} {worst[n]:.1e}" for n in FRAME_LIMITS)
           + (f"; over limit: {bad}" if bad else ""))


def test_criterion_5_lagrangian_angle(profiles):
    worst = 0.0
    for p in profiles.values():
        k = p.constants
        xx, yy = Grid().plane(p.T)
        beta = im.lagrangian_angle(xx, yy, p)
        assert k.b == -sum(ALPHA)
        d = np.angle(np.exp(1j * (beta - beta[0, 0] - k.a * xx - k.b * yy)))
        worst = max(worst, float(np.abs(d).max()))
    record(5, worst <= 1e-8, f"max |beta - beta(0,0) - (a x + b y)| mod 2pi on 64x64: {worst:.2e} (<= 1e-8)")


def test_criterion_6_minimal_specialization():
    lines, ok = [], True
    for alpha, a1 in (((1, 2, -3), 5.0), ((1, 3, -4), 10.0)):
        seed = find_minimal_seed(alpha, a1)
        p = build_profile(resolve(seed))
        k = p.constants
        x, y = Grid().plane(p.T)
        beta = im.lagrangian_angle(x, y, p)
        spread = float(np.abs(np.angle(np.exp(1j * (beta - beta[0, 0])))).max())
        ok &= abs(k.a) <= 1e-9 and abs(k.b) <= 1e-9 and spread <= 1e-8
        lines.append(f"{alpha} a2={seed.a2:.6f}: |a|={abs(k.a):.1e} |b|={abs(k.b):.1e} beta spread {spread:.1e}")
    record(6, ok, "; ".join(lines))


def test_criterion_7_torus_closure():
    certs = torus.search(torus.SearchSpec(alpha=ALPHA, q_max=50, tol=1e-6))
    good = [c for c in certs if c.closure_error <= 1e-5 and c.N >= 2]
    assert good, f"no certificate with N >= 2 among {len(certs)}"
    c = good[0]
    prof = build_profile(resolve(c.seed))
    closure = torus.translation_error(prof, c.N * c.T, c.N * c.tau)
    py = 2 * math.pi / math.gcd(ALPHA[0] - ALPHA[2], ALPHA[1] - ALPHA[2])
    y_err = torus.translation_error(prof, 0.0, py)
    control = torus.translation_error(prof, (c.N - 1) * c.T, (c.N - 1) * c.tau)
    ok = closure <= 1e-5 and y_err <= 1e-10 and abs(c.y_period - py) <= 1e-10 and control > 1e-2
    record(7, ok, f"{len(certs)} certificates; best N>=2: a1={c.seed.a1:g} a2={c.seed.a2:.6f} tau={c.tau:.6f} N={c.N}: "
                  f"closure {closure:.1e} (<= 1e-5), P_y={py:.6f} closure {y_err:.1e} (<= 1e-10), "
                  f"control M={c.N - 1} {control:.2f} (> 1e-2)")


def test_criterion_8_mutation_sensitivity(profiles):
    base = profiles["minus"].constants
    parts, ok = [], True
    for name in ("c2", "a", "a3", "m"):
        rep = run_suite(build_profile(base.perturbed(**{name: 1.01})))
        worst = max(rep.entries, key=lambda e: 0.0 if e.informational else e.max_abs_residual / e.tolerance)
        ratio = worst.max_abs_residual / worst.tolerance
        ok &= ratio >= 10
        parts.append(f"{name}: {worst.check_name} x{ratio:.1e}")
    record(8, ok, "1% perturbation, worst residual/tolerance: " + ", ".join(parts) + " (>= 10)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
