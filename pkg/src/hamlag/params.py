"""Resolution of the algebraic constants from the seed (alpha, a1, a2).

The seed fixes the angle triple and the bounds a1 > a2 > 0 of the profile
h = exp(2v). Everything else follows algebraically:

    b, c, c1     elementary symmetric functions of alpha
    c2**2        root of a quadratic (two branches, plus a free sign)
    a3, a        from c1, c2 and the bounds
    m, T         elliptic parameter and period of h
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import complete_K
from .errors import (
    DegenerateAngles,
    DegenerateProfile,
    DomainError,
    InconsistentBranch,
    Infeasible,
    NonrealProfile,
    SingularPhase,
)

IDENTITY_RTOL = 1e-9


class RootBranch(str, enum.Enum):
    MINUS = "minus"   # smaller root of the quadratic in c2**2
    PLUS = "plus"


class Sign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class SeedParameters:
    alpha: tuple[float, float, float]
    a1: float
    a2: float
    c2_root_branch: RootBranch = RootBranch.MINUS
    c2_sign: Sign = Sign.POSITIVE

    def __post_init__(self):
        alpha = tuple(float(v) for v in self.alpha)
        if len(alpha) != 3:
            raise DomainError(f"alpha must have three entries, got {len(alpha)}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "a1", float(self.a1))
        object.__setattr__(self, "a2", float(self.a2))
        object.__setattr__(self, "c2_root_branch", RootBranch(self.c2_root_branch))
        object.__setattr__(self, "c2_sign", Sign(self.c2_sign))
        if not (self.a2 > 0 and self.a1 >= self.a2):
            raise DomainError(f"need a1 >= a2 > 0, got a1={self.a1}, a2={self.a2}")

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "a1": self.a1,
            "a2": self.a2,
            "c2_root_branch": self.c2_root_branch.value,
            "c2_sign": self.c2_sign.value,
        }


@dataclass(frozen=True)
class ResolvedConstants:
    seed: SeedParameters
    b: float
    c: float
    c1: float
    c2: float
    a: float
    a3: float
    m: float
    T: float

    @property
    def alpha(self) -> np.ndarray:
        return np.asarray(self.seed.alpha)

    @property
    def a1(self) -> float:
        return self.seed.a1

    @property
    def a2(self) -> float:
        return self.seed.a2

    def perturbed(self, **factors: float) -> "ResolvedConstants":
        """Copy with named constants multiplied by the given factors, without revalidation."""
        unknown = set(factors) - {"b", "c", "c1", "c2", "a", "a3", "m", "T"}
        if unknown:
            raise KeyError(f"cannot perturb {sorted(unknown)}")
        return dataclasses.replace(self, **{k: getattr(self, k) * v for k, v in factors.items()})

    def to_dict(self) -> dict:
        out = {"seed": self.seed.to_dict()}
        out.update({k: getattr(self, k) for k in ("b", "c", "c1", "c2", "a", "a3", "m", "T")})
        return out


def vieta_constants(alpha) -> tuple[float, float, float]:
    """(b, c, c1) such that alpha**3 + b alpha**2 + c alpha + c1 vanishes at each angle."""
    a1, a2, a3 = (float(v) for v in alpha)
    if a1 == a2 or a1 == a3 or a2 == a3:
        raise DegenerateAngles(f"angles must be pairwise distinct, got {tuple(alpha)}")
    b = -(a1 + a2 + a3)
    c = a1 * a2 + a1 * a3 + a2 * a3
    c1 = -a1 * a2 * a3
    return b, c, c1


def _p_and_k(a1, a2, b, c, c1) -> tuple[float, float]:
    p = (a1**3 * a2**2 + a1**2 * a2**3 + (a1 * a2**2 + a1**2 * a2) * b * c1
         + (a1**2 + a2**2) * c1**2 + 2 * a1**2 * a2**2 * c)
    k = (a1 + a2) * c1**2 - a1**2 * a2**2 + a1 * a2 * c1 * b
    return p, k


def feasibility(a1, a2, b, c, c1) -> tuple[bool, float, float]:
    """Return (feasible, P, discriminant); feasible iff P <= 0 and discriminant >= 0."""
    p, k = _p_and_k(a1, a2, b, c, c1)
    disc = p * p - (a1 - a2) ** 2 * k * k
    return (p <= 0 and disc >= 0), p, disc


def solve_c2(a1, a2, b, c, c1) -> tuple[float, ...]:
    """Nonnegative roots t = c2**2 of (a1-a2)**2 t**2 + 2 P t + K**2 = 0, ascending."""
    p, k = _p_and_k(a1, a2, b, c, c1)
    lead = (a1 - a2) ** 2
    if lead == 0.0:
        if p == 0.0:
            raise DegenerateProfile("a1 == a2 and P == 0: the quadratic in c2**2 is degenerate")
        t = -k * k / (2 * p)
        if t < 0:
            raise Infeasible(f"linear equation for c2**2 has negative root {t:g}")
        return (t,)
    disc = p * p - lead * k * k
    if disc < 0:
        raise Infeasible(f"no real c2: discriminant {disc:g} < 0")
    if p > 0:
        raise Infeasible(f"no nonnegative c2**2: P = {p:g} > 0")
    big = (-p + math.sqrt(disc)) / lead
    # product of roots is K**2 / lead; avoids cancellation in the small root
    small = k * k / (lead * big) if big > 0 else 0.0
    return (small, big)


def amplitude_coefficients(alpha) -> tuple[np.ndarray, np.ndarray]:
    """(mu, den) with F_i**2 = (h + mu_i) / den_i, indices taken cyclically."""
    alpha = np.asarray(alpha, dtype=float)
    nxt, nxt2 = np.roll(alpha, -1), np.roll(alpha, -2)
    mu = nxt * nxt2
    den = (alpha - nxt) * (alpha - nxt2)
    return mu, den


def period_T(a1: float, a3: float, m: float) -> float:
    """x-period of h: 2 K(m) / sqrt(a1 + a3)."""
    assert a1 + a3 > 0
    return 2.0 * complete_K(m) / math.sqrt(a1 + a3)


def coefficient_residuals(k: ResolvedConstants) -> np.ndarray:
    """Relative mismatch of the four monomial coefficients of the cubic in h."""
    a1, a2 = k.a1, k.a2
    from_constants = np.array([4.0, 4 * k.c + k.a**2, 4 * (k.b * k.c1 - k.a * k.c2), 4 * (k.c1**2 + k.c2**2)])
    from_roots = 4 * np.array([1.0, k.a3 - a1 - a2, a1 * a2 - a1 * k.a3 - a2 * k.a3, a1 * a2 * k.a3])
    return np.abs(from_constants - from_roots) / np.maximum(1.0, np.abs(from_roots))


def cubic_root_residuals(k: ResolvedConstants) -> np.ndarray:
    al = k.alpha
    val = al**3 + k.b * al**2 + k.c * al + k.c1
    scale = np.maximum(1.0, np.abs(al) ** 3 + abs(k.b) * al**2 + abs(k.c) * np.abs(al) + abs(k.c1))
    return np.abs(val) / scale


def resolve(seed: SeedParameters) -> ResolvedConstants:
    """Derive and validate every constant of the immersion from ``seed``."""
    a1, a2 = seed.a1, seed.a2
    b, c, c1 = vieta_constants(seed.alpha)
    if a1 == a2:
        raise DegenerateProfile("a1 == a2 gives a constant profile")
    ok, p, disc = feasibility(a1, a2, b, c, c1)
    if not ok:
        raise Infeasible(f"infeasible parameters: P = {p:g}, discriminant = {disc:g}")
    roots = solve_c2(a1, a2, b, c, c1)
    t = roots[0] if seed.c2_root_branch is RootBranch.MINUS else roots[-1]
    if t <= 0.0:
        raise DegenerateProfile("c2 = 0 on the selected branch")
    c2 = math.sqrt(t) if seed.c2_sign is Sign.POSITIVE else -math.sqrt(t)
    a3 = (c1**2 + c2**2) / (a1 * a2)
    a = (b * c1 + a1 * a3 + a2 * a3 - a1 * a2) / c2
    if not a3 > 0:
        raise DegenerateProfile(f"a3 = {a3:g} must be positive")
    m = (a1 - a2) / (a1 + a3)
    consts = ResolvedConstants(seed=seed, b=b, c=c, c1=c1, c2=c2, a=a, a3=a3, m=m, T=period_T(a1, a3, m))

    a_sq = -4 * c - 4 * (a1 + a2 - a3)
    if abs(a * a - a_sq) > IDENTITY_RTOL * max(1.0, abs(a_sq)):
        raise InconsistentBranch(f"a**2 = {a * a:.17g} but the cubic requires {a_sq:.17g}")
    if np.any(coefficient_residuals(consts) > IDENTITY_RTOL):
        raise InconsistentBranch("coefficients of the cubic in h do not match")

    mu, den = amplitude_coefficients(seed.alpha)
    for h in (a2, a1):
        if np.any((h + mu) / den < -1e-12):
            raise NonrealProfile(f"negative squared amplitude at h = {h:g}")
    # phase integrand denominator h + mu_i must keep one sign on [a2, a1]
    if np.any((a2 + mu) * (a1 + mu) <= 0):
        raise SingularPhase("phase integrand has a pole inside [a2, a1]")
    return consts


def minimal_constraint(seed: SeedParameters) -> float:
    """(a1 + a2)(c1**2 + c2**2) - a1**2 a2**2 for the seed's branch (zero for minimal tori)."""
    b, c, c1 = vieta_constants(seed.alpha)
    roots = solve_c2(seed.a1, seed.a2, b, c, c1)
    t = roots[0] if seed.c2_root_branch is RootBranch.MINUS else roots[-1]
    return (seed.a1 + seed.a2) * (c1**2 + t) - seed.a1**2 * seed.a2**2
