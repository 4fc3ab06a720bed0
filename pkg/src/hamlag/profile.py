"""The x-dependent data of the immersion.

h(x) = exp(2 v(x)) oscillates between a2 and a1 with period T. The amplitudes
F_i are algebraic in h; the phases G_i are integrals of a periodic rate, so
G_i(x + T) = G_i(x) + Lambda_i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import jacobi_sn_cn_dn
from .errors import NonrealProfile
from .params import ResolvedConstants, amplitude_coefficients
from .quadrature import adaptive_gk15

DEFAULT_QUAD_TOL = 1e-11


@dataclass(frozen=True)
class RadialProfile:
    constants: ResolvedConstants
    Lambda: np.ndarray                  # G_i(T), shape (3,)
    quadrature_tolerance: float = DEFAULT_QUAD_TOL
    mu: np.ndarray = field(repr=False, default=None)
    den: np.ndarray = field(repr=False, default=None)

    @property
    def T(self) -> float:
        return self.constants.T

    @property
    def alpha(self) -> np.ndarray:
        return self.constants.alpha

    # -- elliptic profile -------------------------------------------------
    def _jacobi(self, x):
        k = self.constants
        w = math.sqrt(k.a1 + k.a3)
        return w, jacobi_sn_cn_dn(np.asarray(x, dtype=float) * w, k.m)

    def h(self, x):
        k = self.constants
        _, (sn, _, _) = self._jacobi(x)
        return k.a1 - (k.a1 - k.a2) * sn * sn

    def h_prime(self, x):
        k = self.constants
        w, (sn, cn, dn) = self._jacobi(x)
        return -2.0 * (k.a1 - k.a2) * w * sn * cn * dn

    def h_second(self, x):
        k = self.constants
        w, (sn, cn, dn) = self._jacobi(x)
        d_sncndn = cn * cn * dn * dn - sn * sn * dn * dn - k.m * sn * sn * cn * cn
        return -2.0 * (k.a1 - k.a2) * w * w * d_sncndn

    def v(self, x):
        return 0.5 * np.log(self.h(x))

    def v_prime(self, x):
        return self.h_prime(x) / (2.0 * self.h(x))

    def v_second(self, x):
        h, hp = self.h(x), self.h_prime(x)
        return self.h_second(x) / (2.0 * h) - hp * hp / (2.0 * h * h)

    # -- amplitudes -------------------------------------------------------
    def amplitude_squared(self, x):
        """F_i(x)**2 as an array of shape (3, *x.shape)."""
        h = np.asarray(self.h(x))
        return (h[None] + _expand(self.mu, h)) / _expand(self.den, h)

    def amplitudes(self, x):
        sq = self.amplitude_squared(x)
        if np.any(sq < -1e-12):
            raise NonrealProfile(f"negative squared amplitude {sq.min():g}")
        return np.sqrt(np.clip(sq, 0.0, None))

    def amplitudes_prime(self, x):
        F = self.amplitudes(x)
        hp = np.asarray(self.h_prime(x))
        return hp[None] / (2.0 * _expand(self.den, hp) * F)

    def amplitudes_second(self, x):
        F = self.amplitudes(x)
        hp, hpp = np.asarray(self.h_prime(x)), np.asarray(self.h_second(x))
        den = _expand(self.den, hp)
        return hpp[None] / (2.0 * den * F) - hp[None] ** 2 / (4.0 * den**2 * F**3)

    # -- phases -----------------------------------------------------------
    def phase_rate(self, x):
        """G_i'(x) = (2 c2 - a h) / (2 (h + alpha_{i+1} alpha_{i+2})), shape (3, *x.shape).

        This is alpha_i (2 c2 - a h) / (2 (alpha_i h - c1)) with the common
        factor alpha_i cancelled, which also covers alpha_i = 0.
        """
        k = self.constants
        h = np.asarray(self.h(x))
        return (2.0 * k.c2 - k.a * h)[None] / (2.0 * (h[None] + _expand(self.mu, h)))

    def phase_rate_prime(self, x):
        k = self.constants
        h, hp = np.asarray(self.h(x)), np.asarray(self.h_prime(x))
        mu = _expand(self.mu, h)
        return -hp[None] * (k.a * mu + 2.0 * k.c2) / (2.0 * (h[None] + mu) ** 2)

    def phases(self, x):
        """G_i(x) = integral of the phase rate from x0 = 0 to x, shape (3, *x.shape).

        Integrated directly (no reduction modulo T), so periodic additivity of
        the result is a genuine check rather than a construction.
        """
        x = np.asarray(x, dtype=float)
        flat = np.concatenate([[0.0], x.ravel()])
        order = np.argsort(flat, kind="stable")
        stops = flat[order]
        starts = np.concatenate([[stops[0]], stops[:-1]])
        pieces = adaptive_gk15(self.phase_rate, starts, stops, atol=self.quadrature_tolerance)
        g = np.empty_like(pieces)
        g[:, order] = np.cumsum(pieces, axis=-1)
        g = g[:, 1:] - g[:, :1]
        return g.reshape((3,) + x.shape)


def _expand(coeffs: np.ndarray, like) -> np.ndarray:
    return np.asarray(coeffs).reshape((3,) + (1,) * np.ndim(like))


def build_profile(constants: ResolvedConstants, quadrature_tolerance: float = DEFAULT_QUAD_TOL) -> RadialProfile:
    """Attach the amplitude coefficients and the per-period phase advance to ``constants``.

    No validation is repeated here, so deliberately perturbed constants can be
    fed to the verification suite.
    """
    mu, den = amplitude_coefficients(constants.seed.alpha)
    stub = RadialProfile(constants, np.zeros(3), quadrature_tolerance, mu, den)
    lam = adaptive_gk15(stub.phase_rate, [0.0], [constants.T], atol=quadrature_tolerance)[:, 0]
    return RadialProfile(constants, lam, quadrature_tolerance, mu, den)
