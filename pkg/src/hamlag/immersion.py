"""Horizontal lift, SU(3) frame, connection matrices and Lagrangian angle.

Conventions: the Hermitian product is <u, w> = sum_i u_i conj(w_i). The frame
R has rows (e^{i beta} r, e^{-v} r_x, e^{-v} r_y) and the connection matrices act
from the left, R_x = A R and R_y = B R. All functions broadcast over arrays of
x and y; vector quantities carry the component axis last.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FrameError
from .profile import RadialProfile

DET_TOL = 1e-8
SU3_TOL = 1e-10
CANONICAL_EPS = 1e-9


def hermitian(u, w):
    return np.sum(u * np.conj(w), axis=-1)


@dataclass(frozen=True)
class HorizontalLift:
    r: np.ndarray
    r_x: np.ndarray
    r_y: np.ndarray


@dataclass(frozen=True)
class FrameState:
    R: np.ndarray
    A: np.ndarray
    B: np.ndarray
    beta: np.ndarray
    f: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class ProjectivePoint:
    homogeneous: np.ndarray     # unit norm, first non-negligible entry real positive


def _grid(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return x, y


def position(x, y, profile: RadialProfile) -> np.ndarray:
    """r(x, y) only, shape (..., 3)."""
    x, y = _grid(x, y)
    F = profile.amplitudes(x)
    G = profile.phases(x)
    phase = G + profile.alpha.reshape((3,) + (1,) * x.ndim) * y[None]
    return np.moveaxis(F * np.exp(1j * phase), 0, -1)


def lift(x, y, profile: RadialProfile) -> HorizontalLift:
    """r^i = F_i(x) exp(i (G_i(x) + alpha_i y)) together with its analytic partials."""
    x, y = _grid(x, y)
    al = profile.alpha.reshape((3,) + (1,) * x.ndim)
    F = profile.amplitudes(x)
    Fp = profile.amplitudes_prime(x)
    G = profile.phases(x)
    Gp = profile.phase_rate(x)
    e = np.exp(1j * (G + al * y[None]))
    r = F * e
    r_x = (Fp + 1j * F * Gp) * e
    r_y = 1j * al * r
    return HorizontalLift(*(np.moveaxis(q, 0, -1) for q in (r, r_x, r_y)))


def _tangent_determinant(x, lf: HorizontalLift, profile: RadialProfile) -> np.ndarray:
    ev = np.exp(-profile.v(x))[..., None]
    rows = np.stack([ev * lf.r_x, ev * lf.r_y, lf.r], axis=-2)
    return np.linalg.det(rows)


def lagrangian_angle(x, y, profile: RadialProfile, lf: HorizontalLift | None = None) -> np.ndarray:
    """beta in (-pi, pi] with e^{-i beta} = det(e^{-v} r_x, e^{-v} r_y, r)."""
    x, y = _grid(x, y)
    if lf is None:
        lf = lift(x, y, profile)
    det = _tangent_determinant(x, lf, profile)
    worst = np.max(np.abs(np.abs(det) - 1.0), initial=0.0)
    if worst > DET_TOL:
        raise FrameError(f"tangent determinant has modulus off by {worst:.3g}")
    return -np.angle(det)


def connection_matrices(x, beta, profile: RadialProfile):
    """(A, B, f, g) at points with abscissa ``x`` and Lagrangian angle ``beta``.

    Uses beta_x = a, beta_y = b and v_y = 0; f = c2 e^{-2v} - a/2, g = c1 e^{-2v}.
    """
    k = profile.constants
    x = np.asarray(x, dtype=float)
    h = profile.h(x)
    ev = np.sqrt(h)
    vx = profile.v_prime(x)
    f = k.c2 / h - 0.5 * k.a
    g = k.c1 / h
    up = ev * np.exp(1j * beta)
    down = ev * np.exp(-1j * beta)
    zero = np.zeros(np.shape(up), dtype=complex)
    ia, ib = 1j * k.a, 1j * k.b
    A = np.stack([
        np.stack([zero + ia, up, zero], -1),
        np.stack([-down, -1j * f - ia, 1j * g + zero], -1),
        np.stack([zero, 1j * g + zero, 1j * f + zero], -1),
    ], -2)
    B = np.stack([
        np.stack([zero + ib, zero, up], -1),
        np.stack([zero, 1j * g + zero, 1j * f + vx], -1),
        np.stack([-down, 1j * f - vx, -1j * g - ib], -1),
    ], -2)
    return A, B, f, g


def frame_matrix(x, beta, lf: HorizontalLift, profile: RadialProfile) -> np.ndarray:
    ev = np.exp(-profile.v(x))[..., None]
    return np.stack([np.exp(1j * beta)[..., None] * lf.r, ev * lf.r_x, ev * lf.r_y], axis=-2)


def su3_residuals(R: np.ndarray) -> tuple[float, float]:
    """(max |R R* - I|, max |det R - 1|)."""
    unit = np.abs(R @ np.conj(np.swapaxes(R, -1, -2)) - np.eye(3)).max(initial=0.0)
    det = np.abs(np.linalg.det(R) - 1.0).max(initial=0.0)
    return float(unit), float(det)


def frame(x, y, profile: RadialProfile, check: bool = True) -> FrameState:
    x, y = _grid(x, y)
    lf = lift(x, y, profile)
    beta = -np.angle(_tangent_determinant(x, lf, profile))
    R = frame_matrix(x, beta, lf, profile)
    if check:
        lagrangian_angle(x, y, profile, lf)
        unit, det = su3_residuals(R)
        if max(unit, det) > SU3_TOL:
            raise FrameError(f"frame is not in SU(3): |RR*-I| = {unit:.3g}, |det R - 1| = {det:.3g}")
    A, B, f, g = connection_matrices(x, beta, profile)
    return FrameState(R, A, B, beta, f, g)


def project(r) -> ProjectivePoint:
    """Canonical representative of the complex line through ``r`` (batched over leading axes)."""
    r = np.asarray(r, dtype=complex)
    norm = np.linalg.norm(r, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise DomainError("cannot project the zero vector")
    u = r / norm
    big = np.abs(u) > CANONICAL_EPS
    first = np.argmax(big, axis=-1)
    lead = np.take_along_axis(u, first[..., None], axis=-1)
    return ProjectivePoint(u * (np.abs(lead) / lead))


def fs_distance(p: ProjectivePoint, q: ProjectivePoint) -> np.ndarray:
    """Fubini-Study distance arccos |<p, q>|, evaluated as an arctangent for accuracy near 0."""
    u, w = p.homogeneous, q.homogeneous
    overlap = hermitian(w, u)
    perp = np.linalg.norm(w - overlap[..., None] * u, axis=-1)
    return np.arctan2(perp, np.abs(overlap))


def immersion_point(x, y, profile: RadialProfile) -> ProjectivePoint:
    return project(position(x, y, profile))
