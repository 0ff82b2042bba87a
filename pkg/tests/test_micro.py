import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spirits import (
    DomainError,
    FirmParams,
    Preferences,
    closed_form_consumption,
    invert_confidence,
    solve_equilibrium,
    taylor_rate,
)

STD = Preferences()
FIRM = FirmParams()


def oracle_standard(f, z, gamma=1.0):
    """Back-substitution for varsigma = phi = 1, alpha = 1/3."""
    c = z * (9.0 * f / (4.0 * gamma)) ** (1.0 / 3.0)
    n = (2.0 * c / (3.0 * z)) ** 1.5
    u = z * n ** (-1.0 / 3.0)
    return c, n, u


def test_unit_consumption_at_f_four_ninths():
    eq = solve_equilibrium(STD, FIRM, 4.0 / 9.0, 1.0)
    assert eq.c == pytest.approx(1.0, rel=1e-12)


def test_standard_values_match_back_substitution():
    eq = solve_equilibrium(STD, FIRM, 1.0, 1.0)
    c, n, u = oracle_standard(1.0, 1.0)
    assert eq.c == pytest.approx(c, rel=1e-12)
    assert eq.n == pytest.approx(n, rel=1e-10)
    assert eq.u == pytest.approx(u, rel=1e-10)
    assert eq.c == pytest.approx(1.31037, abs=1e-5)
    # labour supply n = u f / (gamma c) at the solution
    assert eq.n == pytest.approx(eq.u * 1.0 / eq.c, rel=1e-10)


def test_consumption_linear_in_z():
    c1 = solve_equilibrium(STD, FIRM, 1.0, 1.0).c
    c2 = solve_equilibrium(STD, FIRM, 1.0, 2.0).c
    assert c2 == pytest.approx(2.0 * (9.0 / 4.0) ** (1.0 / 3.0), rel=1e-12)
    assert c2 == pytest.approx(2.0 * c1, rel=1e-12)


def test_closed_form_on_log_grid():
    fs = np.logspace(-3, 3, 10)
    zs = np.logspace(-2, 2, 10)
    worst = 0.0
    for f in fs:
        for z in zs:
            eq = solve_equilibrium(STD, FIRM, f, z)
            worst = max(worst, abs(eq.c / closed_form_consumption(f, z, 1.0) - 1.0))
    assert worst < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    gamma=st.floats(0.1, 10),
    varsigma=st.floats(0.1, 1.0),
    phi=st.floats(0.2, 5),
    alpha=st.floats(0.05, 0.9),
    f=st.floats(1e-2, 1e2),
    z=st.floats(1e-1, 1e1),
)
def test_general_solution_satisfies_state_equations(gamma, varsigma, phi, alpha, f, z):
    prefs = Preferences(gamma, varsigma, phi, 0.99)
    eq = solve_equilibrium(prefs, FirmParams(alpha, 1.0), f, z)
    assert eq.c == pytest.approx(z * eq.n ** (1 - alpha) / (1 - alpha), rel=1e-10)
    assert eq.u == pytest.approx(z * eq.n ** (-alpha), rel=1e-10)
    assert eq.lambda_p == pytest.approx(f / eq.c**varsigma, rel=1e-10)
    assert gamma * eq.n**phi == pytest.approx(eq.u * eq.lambda_p, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(f=st.floats(1e-2, 1e2), z=st.floats(1e-1, 1e1), k=st.floats(1.01, 3.0))
def test_consumption_increasing_in_f_and_z(f, z, k):
    base = solve_equilibrium(STD, FIRM, f, z).c
    assert solve_equilibrium(STD, FIRM, f * k, z).c > base
    assert solve_equilibrium(STD, FIRM, f, z * k).c > base


@pytest.mark.parametrize("zbar,g,expected", [
    (1.0, 1.0, 4.0 / 9.0),
    (1.0, (9.0 / 4.0) ** (1.0 / 3.0), 1.0),
    (2.0, 2.0 * (9.0 / 4.0) ** (1.0 / 3.0), 1.0),
])
def test_invert_confidence_examples(zbar, g, expected):
    assert invert_confidence(FirmParams(zbar=zbar), STD, g) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    varsigma=st.floats(0.2, 1.0),
    phi=st.floats(0.3, 4),
    alpha=st.floats(0.1, 0.8),
    zbar=st.floats(0.2, 5),
    f=st.floats(1e-2, 1e2),
)
def test_invert_confidence_round_trip(varsigma, phi, alpha, zbar, f):
    prefs = Preferences(1.3, varsigma, phi, 0.99)
    firm = FirmParams(alpha, zbar)
    c = solve_equilibrium(prefs, firm, f, zbar).c
    assert invert_confidence(firm, prefs, c) == pytest.approx(f, rel=1e-10)


def test_taylor_rate_examples():
    assert taylor_rate(0.0, STD, 1.5) == pytest.approx(-math.log(0.99), rel=1e-15)
    assert taylor_rate(0.02, STD, 1.5) == pytest.approx(0.03 - math.log(0.99), rel=1e-15)
    assert taylor_rate(0.02, STD, 1.5) == pytest.approx(0.04005, abs=1e-5)
    assert taylor_rate(-0.02, 1.0, 2.0) == pytest.approx(-0.04, abs=1e-15)
    np.testing.assert_allclose(taylor_rate(np.array([0.0, 0.02]), 0.99, 1.5),
                               [-math.log(0.99), 0.03 - math.log(0.99)], rtol=1e-15)


@pytest.mark.parametrize("kwargs", [dict(gamma=0), dict(varsigma=1.5), dict(phi=-1), dict(beta=1.0)])
def test_invalid_preferences(kwargs):
    with pytest.raises(DomainError):
        Preferences(**kwargs)


def test_invalid_inputs():
    with pytest.raises(DomainError):
        FirmParams(alpha=1.0)
    with pytest.raises(DomainError):
        solve_equilibrium(STD, FIRM, -1.0, 1.0)
    with pytest.raises(DomainError):
        taylor_rate(0.0, STD, 1.0)


def test_errors_list_every_violation():
    with pytest.raises(DomainError) as exc:
        Preferences(gamma=-1, phi=0)
    assert "gamma" in str(exc.value) and "phi" in str(exc.value)
