import math

import numpy as np
import pytest

from hamlag import oracle
from hamlag.errors import IntegrationError


def test_rk4_exact_on_exponential():
    y = oracle.rk4(lambda x, y: y, np.array([1.0]), 0.0, 0.01, 100)
    assert y[-1, 0] == pytest.approx(math.e, rel=1e-9)


def test_rk4_tracks_closed_form(branch_profile):
    assert oracle.max_error(branch_profile, 2000) <= 1e-8


def test_report_fields(example_profile):
    rep = oracle.compare(example_profile)
    assert rep["max_error"] <= 1e-8
    assert rep["shifted_start_max_error"] <= 1e-8
    assert 3.7 <= rep["observed_order"] <= 4.3


def test_energy_is_conserved_along_closed_form(example_profile):
    k = example_profile.constants
    x = np.linspace(0, 3 * k.T, 200)
    e = oracle.energy(k, example_profile.h(x), example_profile.h_prime(x))
    assert np.ptp(e) <= 1e-10


def test_coarse_step_trips_energy_guard(example_profile):
    with pytest.raises(IntegrationError):
        oracle.integrate_profile(example_profile.constants, 10)
