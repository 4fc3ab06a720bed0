"""Hamiltonian-minimal Lagrangian planes and tori in CP^2.

Typical use::

    from hamlag import SeedParameters, resolve, build_profile, run_suite
    consts = resolve(SeedParameters(alpha=(0, -1, 3), a1=2.0, a2=1.0))
    report = run_suite(build_profile(consts))
"""
from .errors import HamlagError
from .params import ResolvedConstants, RootBranch, SeedParameters, Sign, resolve
from .profile import RadialProfile, build_profile
from .verify import Grid, ResidualReport, run_suite

__all__ = [
    "Grid",
    "HamlagError",
    "RadialProfile",
    "ResidualReport",
    "ResolvedConstants",
    "RootBranch",
    "SeedParameters",
    "Sign",
    "build_profile",
    "resolve",
    "run_suite",
]
