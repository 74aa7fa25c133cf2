"""Pressure laws: evaluation, derivatives, and the well-posedness checker."""

import math

import numpy as np
import pytest

from gaspower.errors import DomainError
from gaspower.pressure import (
    GammaLaw,
    GammaIntegralLaw,
    GeneralizedGammaLaw,
    IsothermalLaw,
    LinearCombinationLaw,
    LogLaw,
    SumGammaLaw,
    check_sufficient_conditions,
    classify_generalized_gamma,
    combine,
    default_grid,
    inverse_law,
    parse_law,
    sound_speed,
)

FOUR_BENCHMARK_LAWS = [
    GammaLaw(1.0 / 1.4, 1.4),
    inverse_law(),
    LogLaw(),
    SumGammaLaw(),
]


# -- sound speed and derivatives ----------------------------------------------


def test_sound_speed_gamma_law():
    law = GammaLaw(1.0, 1.4)
    assert sound_speed(law, 1.0) == pytest.approx(math.sqrt(1.4), rel=1e-12)


def test_sound_speed_isothermal_is_constant():
    law = IsothermalLaw(340.0)
    for rho in (0.1, 1.0, 50.0, 1234.5):
        assert sound_speed(law, rho) == pytest.approx(340.0, rel=1e-14)


def test_sound_speed_log_law_at_unit_density():
    assert sound_speed(LogLaw(), 1.0) == pytest.approx(1.0, rel=1e-14)


def test_sound_speed_rejects_nonpositive_density():
    with pytest.raises(DomainError):
        sound_speed(GammaLaw(1.0, 1.4), 0.0)
    with pytest.raises(DomainError):
        sound_speed(GammaLaw(1.0, 1.4), -2.0)


@pytest.mark.parametrize("law", FOUR_BENCHMARK_LAWS + [GammaIntegralLaw()],
                         ids=lambda l: l.label)
def test_first_derivative_consistent_with_finite_differences(law):
    """p' must match centered differences of p to 1e-6 relative."""
    for rho in (0.3, 0.9, 1.0, 2.7, 15.0):
        h = 1e-6 * rho
        fd = (float(law.p(rho + h)) - float(law.p(rho - h))) / (2.0 * h)
        assert float(law.dp(rho)) == pytest.approx(fd, rel=1e-6)


def test_higher_derivative_fallbacks_match_analytic():
    # GammaLaw has analytic d2p/d3p; the base-class differences must agree.
    law = GammaLaw(2.0, 1.7)

    class Bare(type(law).__mro__[1]):  # PressureLaw with only p, dp
        label = "bare"

        def p(self, rho):
            return law.p(rho)

        def dp(self, rho):
            return law.dp(rho)

    bare = Bare()
    for rho in (0.5, 1.0, 3.0):
        assert float(bare.d2p(rho)) == pytest.approx(float(law.d2p(rho)), rel=1e-6)
        assert float(bare.d3p(rho)) == pytest.approx(float(law.d3p(rho)), rel=1e-3)


def test_benchmark_laws_normalized_to_unit_slope_at_one():
    """All four comparison laws satisfy p'(1) = 1 exactly as scaled."""
    for law in FOUR_BENCHMARK_LAWS:
        assert float(law.dp(1.0)) == pytest.approx(1.0, abs=1e-14), law.label


def test_rho_from_pressure_round_trip():
    for law in FOUR_BENCHMARK_LAWS + [IsothermalLaw(340.0)]:
        for rho in (0.2, 1.0, 7.5):
            p = float(law.p(rho))
            assert law.rho_from_pressure(p) == pytest.approx(rho, rel=1e-10)


def test_rho_from_pressure_out_of_range():
    with pytest.raises(DomainError):
        IsothermalLaw(1.0).rho_from_pressure(-5.0)


# -- sufficient-condition checker ---------------------------------------------


def test_cubic_law_is_valid():
    assert check_sufficient_conditions(GammaLaw(1.0, 3.0)).valid


def test_inverse_law_valid_via_decay_bound_and_vacuum_limit():
    report = check_sufficient_conditions(inverse_law())
    assert report.valid
    assert report.pressure_decay_bound
    assert report.vacuum_limit_negative
    assert not report.pressure_unbounded


def test_steep_gamma_law_invalid_near_vacuum():
    """kappa rho^3.5 fails: curvature conditions hold but no vacuum
    condition does (its sound speed vanishes too fast)."""
    report = check_sufficient_conditions(GammaLaw(1.0, 3.5))
    assert not report.valid
    assert report.concavity_ok
    assert report.growth_ok
    assert not report.vacuum_ok


@pytest.mark.parametrize("law", FOUR_BENCHMARK_LAWS, ids=lambda l: l.label)
def test_benchmark_quartet_all_valid(law):
    assert check_sufficient_conditions(law).valid, law.label


def test_boundary_gamma_three_is_valid():
    assert check_sufficient_conditions(GammaLaw(2.0, 3.0)).valid


@pytest.mark.parametrize("delta", [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0])
def test_checker_agrees_with_closed_form_valid(delta):
    law = GeneralizedGammaLaw(1.0, delta)
    assert check_sufficient_conditions(law).valid
    assert classify_generalized_gamma(1.0, delta)


@pytest.mark.parametrize("delta", [2.2, -2.2, 3.0, -3.0])
def test_checker_agrees_with_closed_form_invalid(delta):
    law = GeneralizedGammaLaw(1.0, delta)
    assert not check_sufficient_conditions(law).valid
    assert not classify_generalized_gamma(1.0, delta)


def test_classification_examples():
    assert classify_generalized_gamma(1.0, 0.4)
    assert classify_generalized_gamma(1.0, 2.0)      # boundary included
    assert not classify_generalized_gamma(1.0, 2.01)
    assert not classify_generalized_gamma(-1.0, 0.5)  # needs alpha > 0


def test_checker_reports_failure_on_bad_grid():
    with pytest.raises(DomainError):
        check_sufficient_conditions(GammaLaw(1.0, 1.4), np.array([1.0, 0.5]))
    with pytest.raises(DomainError):
        check_sufficient_conditions(GammaLaw(1.0, 1.4), np.array([-1.0, 1.0]))


def test_exotic_integral_law_runs_through_checker():
    # Averaged-exponent law: shipped as an example, validity not asserted.
    report = check_sufficient_conditions(GammaIntegralLaw())
    assert report.grid_size == default_grid().size


# -- combinations -------------------------------------------------------------


def test_combine_scaling():
    law = combine([GammaLaw(1.0, 1.0)], [2.0])
    assert float(law.p(3.0)) == pytest.approx(6.0, rel=1e-14)


def test_combine_rejects_empty_and_bad_weights():
    with pytest.raises(DomainError):
        combine([], [])
    with pytest.raises(DomainError):
        combine([LogLaw()], [0.0])
    with pytest.raises(DomainError):
        combine([LogLaw()], [-1.0])


def test_sum_of_gamma_laws_matches_explicit_combination():
    parts = [GammaLaw(0.1 / (1.0 + i / 5.0), 1.0 + i / 5.0) for i in range(1, 11)]
    explicit = combine(parts, [1.0] * 10)
    packaged = SumGammaLaw()
    for rho in (0.4, 1.0, 2.5):
        assert float(explicit.p(rho)) == pytest.approx(float(packaged.p(rho)),
                                                       rel=1e-13)
    assert check_sufficient_conditions(explicit).valid


def test_cubic_plus_log_combination_valid():
    law = combine([GammaLaw(1.0, 3.0), LogLaw()], [1.0, 1.0])
    assert check_sufficient_conditions(law).valid


def test_cone_closure_under_random_positive_weights():
    """Any positive combination of valid laws stays valid (100 samples)."""
    rng = np.random.default_rng(7)
    pool = [GammaLaw(1.0, 1.4), GammaLaw(1.0, 3.0), LogLaw(), inverse_law(),
            GeneralizedGammaLaw(2.0, -1.5)]
    for law in pool:
        assert check_sufficient_conditions(law).valid, law.label
    failures = []
    for k in range(100):
        i, j = rng.integers(0, len(pool), 2)
        w = rng.uniform(0.05, 10.0, 2)
        mixed = combine([pool[i], pool[j]], w)
        if not check_sufficient_conditions(mixed).valid:
            failures.append((pool[i].label, pool[j].label, tuple(w)))
    assert not failures, f"cone closure violated for {failures[:3]}"


# -- law selector strings -----------------------------------------------------


@pytest.mark.parametrize("text, probe, expected", [
    ("gamma(1,1.4)", 2.0, 2.0**1.4),
    ("isothermal(340)", 2.0, 340.0**2 * 2.0),
    ("inverse", 2.0, -0.5),
    ("log", math.e, 1.0),
    ("generalized(1,-1)", math.e, 1.0),
])
def test_parse_law_evaluates(text, probe, expected):
    law = parse_law(text)
    assert float(law.p(probe)) == pytest.approx(expected, rel=1e-12)


def test_parse_linear_combination_with_weights():
    law = parse_law("linear_combination(2*gamma(1,1),0.5*log)")
    assert isinstance(law, LinearCombinationLaw)
    assert float(law.p(1.0)) == pytest.approx(2.0, rel=1e-14)


def test_parse_round_trip_through_spec():
    for text in ("gamma(1.0,1.4)", "sum_gamma", "inverse",
                 "linear_combination(1.0*gamma(1.0,3.0),1.0*log)"):
        law = parse_law(text)
        assert parse_law(law.spec()) == law


def test_parse_rejects_garbage():
    for bad in ("", "nosuchlaw", "gamma(1)", "gamma(1,2,3)", "gamma(1,2)x"):
        with pytest.raises(DomainError):
            parse_law(bad)
