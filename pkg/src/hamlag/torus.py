"""Double periodicity of the immersion and the search for closing tori.

Translating by (T, tau) multiplies r^i by exp(i (Lambda_i + alpha_i tau)), so
the image closes after N such steps exactly when N lambda_1 and N lambda_2 are
multiples of 2 pi, where lambda_j = Lambda_j - Lambda_3 + (alpha_j - alpha_3) tau.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from . import immersion as im
from .errors import EmptySearch, HamlagError, ModeError, NoClosure
from .params import SeedParameters, resolve
from .profile import RadialProfile, build_profile

TWO_PI = 2.0 * math.pi


def integer_angles(alpha) -> tuple[int, int, int]:
    ints = tuple(int(round(float(v))) for v in alpha)
    if any(abs(float(v) - i) > 0 for v, i in zip(alpha, ints)):
        raise ModeError(f"torus mode needs integer angles, got {tuple(alpha)}")
    return ints


def y_period(alpha) -> float:
    """Smallest P > 0 with (alpha_i - alpha_j) P in 2 pi Z for all i, j."""
    a1, a2, a3 = integer_angles(alpha)
    return TWO_PI / math.gcd(a1 - a3, a2 - a3)


def slopes(alpha) -> tuple[int, int]:
    a1, a2, a3 = integer_angles(alpha)
    return a1 - a3, a2 - a3


def lambdas(profile: RadialProfile, tau: float) -> tuple[float, float]:
    s1, s2 = slopes(profile.alpha)
    lam = profile.Lambda
    return float(lam[0] - lam[2] + s1 * tau), float(lam[1] - lam[2] + s2 * tau)


def rational_approx(xi: float, q_max: int) -> tuple[int, int, float]:
    """Last continued-fraction convergent p/q of ``xi`` with q <= q_max."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    x = Fraction(xi)
    p_prev, q_prev, p, q = 1, 0, math.floor(x), 1
    rest = x - math.floor(x)
    while rest != 0:
        x = 1 / rest
        a = math.floor(x)
        rest = x - a
        p_next, q_next = a * p + p_prev, a * q + q_prev
        if q_next > q_max:
            break
        p_prev, q_prev, p, q = p, q, p_next, q_next
    return p, q, abs(xi - p / q)


def find_N(lambda1: float, lambda2: float, q_max: int, tol: float) -> int:
    """Closure multiplier lcm(q1, q2) from rational approximations of lambda_j / 2 pi."""
    _, q1, e1 = rational_approx(lambda1 / TWO_PI, q_max)
    _, q2, e2 = rational_approx(lambda2 / TWO_PI, q_max)
    if e1 > tol or e2 > tol:
        raise NoClosure(f"lambda/2pi not within {tol:g} of a rational with q <= {q_max} (errors {e1:.3g}, {e2:.3g})")
    return math.lcm(q1, q2)


def _sample_points(profile: RadialProfile, samples: int):
    x = np.linspace(0.0, profile.T, samples, endpoint=False) + 0.1234 * profile.T / samples
    y = np.linspace(0.0, 1.0, samples, endpoint=False) + 0.0567
    return np.meshgrid(x, y, indexing="ij")


def translation_error(profile: RadialProfile, dx: float, dy: float, samples: int = 8) -> float:
    """Max Fubini-Study distance between psi(x + dx, y + dy) and psi(x, y) on a sample lattice."""
    x, y = _sample_points(profile, samples)
    p = im.immersion_point(x, y, profile)
    q = im.immersion_point(x + dx, y + dy, profile)
    return float(im.fs_distance(p, q).max())


def check_closure(profile: RadialProfile, tau: float, N: int, samples: int = 8) -> float:
    """Max of the closure errors under translation by N (T, tau) and by (0, P_y)."""
    return max(
        translation_error(profile, N * profile.T, N * tau, samples),
        translation_error(profile, 0.0, y_period(profile.alpha), samples),
    )


@dataclass(frozen=True)
class ClosureCertificate:
    seed: SeedParameters
    tau: float
    lambda1: float
    lambda2: float
    approx1: tuple[int, int]
    approx2: tuple[int, int]
    N: int
    T: float
    y_period: float
    period_e1: tuple[float, float]
    period_e2: tuple[float, float]
    closure_error: float
    y_closure_error: float
    nominal_e1_error: float      # closure error for the unscaled y-period 1
    bound: float = field(default=0.0)   # phase error N * 2 pi * |lambda/2pi - p/q|

    def to_dict(self) -> dict:
        return {
            "seed": self.seed.to_dict(),
            "tau": self.tau,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "approx1": list(self.approx1),
            "approx2": list(self.approx2),
            "N": self.N,
            "T": self.T,
            "y_period": self.y_period,
            "period_e1": list(self.period_e1),
            "period_e1_nominal": [0.0, 1.0],
            "period_e2": list(self.period_e2),
            "closure_error": self.closure_error,
            "y_closure_error": self.y_closure_error,
            "nominal_e1_error": self.nominal_e1_error,
            "bound": self.bound,
        }


def certify(profile: RadialProfile, tau: float, q_max: int, tol: float, samples: int = 8) -> ClosureCertificate:
    l1, l2 = lambdas(profile, tau)
    N = find_N(l1, l2, q_max, tol)
    p1, q1, e1 = rational_approx(l1 / TWO_PI, q_max)
    p2, q2, e2 = rational_approx(l2 / TWO_PI, q_max)
    py = y_period(profile.alpha)
    return ClosureCertificate(
        seed=profile.constants.seed,
        tau=float(tau) + 0.0,
        lambda1=l1,
        lambda2=l2,
        approx1=(p1, q1),
        approx2=(p2, q2),
        N=N,
        T=profile.T,
        y_period=py,
        period_e1=(0.0, py),
        period_e2=(N * profile.T, N * tau),
        closure_error=translation_error(profile, N * profile.T, N * tau, samples),
        y_closure_error=translation_error(profile, 0.0, py, samples),
        nominal_e1_error=translation_error(profile, 0.0, 1.0, samples),
        bound=TWO_PI * N * max(e1, e2),
    )


# -- search -----------------------------------------------------------------

@dataclass(frozen=True)
class SearchSpec:
    alpha: tuple[int, int, int]
    a1_range: tuple[float, float] = (1.5, 2.5)
    a2_range: tuple[float, float] = (0.5, 1.4)
    tau_range: tuple[float, float] | None = None    # None means [0, T) per node
    grid_counts: tuple[int, int, int] = (5, 5, 8)
    q_max: int = 50
    tol: float = 1e-6
    branches: tuple[tuple[str, str], ...] = (("minus", "positive"),)
    refine: bool = True
    refine_denominator: int = 4
    samples: int = 8


def _profile_or_none(seed: SeedParameters) -> RadialProfile | None:
    try:
        return build_profile(resolve(seed))
    except HamlagError:
        return None


def _tau_values(spec: SearchSpec, T: float) -> np.ndarray:
    lo, hi = spec.tau_range if spec.tau_range is not None else (0.0, T)
    return np.linspace(lo, hi, spec.grid_counts[2], endpoint=False)


def _invariant(profile: RadialProfile) -> float:
    """(s2 lambda_1 - s1 lambda_2) / 2 pi, which does not depend on tau."""
    s1, s2 = slopes(profile.alpha)
    lam = profile.Lambda
    return (s2 * (lam[0] - lam[2]) - s1 * (lam[1] - lam[2])) / TWO_PI


def _fractions_between(lo: float, hi: float, q_limit: int):
    lo, hi = min(lo, hi), max(lo, hi)
    seen = set()
    for q in range(1, q_limit + 1):
        for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            fr = Fraction(p, q)
            if fr not in seen and lo < fr < hi:
                seen.add(fr)
                yield fr


def _refine_segment(spec: SearchSpec, a1: float, a2_lo: float, a2_hi: float, branch, sign) -> list[ClosureCertificate]:
    """Root-find a2 where the tau-free invariant is a small-denominator rational, then solve for tau."""
    s1, s2 = slopes(spec.alpha)

    def profile_at(a2):
        return _profile_or_none(SeedParameters(spec.alpha, a1, a2, branch, sign))

    p_lo, p_hi = profile_at(a2_lo), profile_at(a2_hi)
    if p_lo is None or p_hi is None:
        return []
    found = []
    for target in _fractions_between(_invariant(p_lo), _invariant(p_hi), spec.refine_denominator):
        def gap(a2):
            return _invariant(profile_at(a2)) - float(target)

        try:
            a2 = brentq(gap, a2_lo, a2_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        except (ValueError, AttributeError):
            continue
        prof = profile_at(a2)
        if prof is None:
            continue
        lam = prof.Lambda
        d2 = lam[1] - lam[2]
        lo, hi = spec.tau_range if spec.tau_range is not None else (0.0, prof.T)
        # lambda_2 / 2 pi = p2 / q2 exactly at tau = (2 pi p2 / q2 - d2) / s2
        ends = sorted(((s2 * lo + d2) / TWO_PI, (s2 * hi + d2) / TWO_PI))
        taus = []
        for q2 in range(1, spec.q_max + 1):
            for p2 in range(math.ceil(ends[0] * q2), math.floor(ends[1] * q2) + 1):
                tau = (TWO_PI * p2 / q2 - d2) / s2
                if lo <= tau < hi:
                    taus.append(tau)
            if taus:
                break
        for tau in sorted(taus)[:1]:
            try:
                found.append(certify(prof, tau, spec.q_max, spec.tol, spec.samples))
            except NoClosure:
                pass
    return found


def _scan_a1(spec: SearchSpec, a1: float) -> tuple[bool, list[ClosureCertificate]]:
    any_feasible = False
    certs: list[ClosureCertificate] = []
    a2_nodes = np.linspace(*spec.a2_range, spec.grid_counts[1])
    for branch, sign in spec.branches:
        nodes = [a2 for a2 in a2_nodes if a2 < a1]
        for a2 in nodes:
            prof = _profile_or_none(SeedParameters(spec.alpha, a1, a2, branch, sign))
            if prof is None:
                continue
            any_feasible = True
            for tau in _tau_values(spec, prof.T):
                try:
                    certs.append(certify(prof, tau, spec.q_max, spec.tol, spec.samples))
                except NoClosure:
                    pass
        if spec.refine:
            for lo, hi in zip(nodes[:-1], nodes[1:]):
                certs.extend(_refine_segment(spec, a1, lo, hi, branch, sign))
    return any_feasible, certs


def search(spec: SearchSpec, workers: int = 1) -> list[ClosureCertificate]:
    """Scan the (a1, a2, tau) grid and return closing certificates, best first.

    With ``spec.refine`` each a2 grid segment is additionally searched for
    points where the tau-free combination s2 lambda_1 - s1 lambda_2 is a
    small-denominator multiple of 2 pi; tau is then solved for exactly.
    """
    integer_angles(spec.alpha)
    a1_nodes = list(np.linspace(*spec.a1_range, spec.grid_counts[0]))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_a1, [spec] * len(a1_nodes), a1_nodes))
    else:
        results = [_scan_a1(spec, a1) for a1 in a1_nodes]
    if not any(ok for ok, _ in results):
        raise EmptySearch(f"no feasible grid node for alpha = {spec.alpha}")
    certs = [c for _, cs in results for c in cs]
    return sorted(certs, key=lambda c: (c.closure_error, c.N))
