"""Complete elliptic integral K(m) and Jacobi sn, cn, dn.

The second argument is always the parameter ``m = k**2``, never the modulus.
Both routines run on the arithmetic-geometric mean, so accuracy stays uniform
as m approaches 1.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

_MAX_AGM_STEPS = 64


class JacobiTriple(NamedTuple):
    sn: np.ndarray
    cn: np.ndarray
    dn: np.ndarray


def _check_parameter(m: float) -> float:
    m = float(m)
    if not (0.0 <= m < 1.0):
        raise DomainError(f"elliptic parameter must satisfy 0 <= m < 1, got {m!r}")
    return m


def _agm_ladder(m: float) -> tuple[list[float], list[float]]:
    """Return the AGM sequences a_n and c_n started from (1, sqrt(1 - m))."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_STEPS):
        if abs(c) <= 2.0 ** -53 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = pi / (2 AGM(1, sqrt(1-m)))."""
    m = _check_parameter(m)
    a_seq, _ = _agm_ladder(m)
    return math.pi / (2.0 * a_seq[-1])


def jacobi_sn_cn_dn(u, m: float) -> JacobiTriple:
    """Jacobi elliptic functions of ``u`` (scalar or array) for parameter ``m``.

    Uses the descending Landen ladder: phi_N = 2**N a_N u, then
    phi_{n-1} = (phi_n + asin(c_n sin(phi_n) / a_n)) / 2 and sn = sin(phi_0).
    """
    m = _check_parameter(m)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("argument u must be finite")
    if m == 0.0:
        return JacobiTriple(np.sin(u), np.cos(u), np.ones_like(u))

    a_seq, c_seq = _agm_ladder(m)
    n = len(a_seq) - 1
    phi = (2.0 ** n) * a_seq[n] * u
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c_seq[k] * np.sin(phi) / a_seq[k]))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return JacobiTriple(sn, cn, dn)
