"""Test main-term constants and envelope checks"""
import json
import math
from pathlib import Path

import pytest

from epstein_zeros.asymptotics import (
    Calibration,
    CoefficientTable,
    MainTermParams,
    btilde,
    d_coeff,
    density_G_leading,
    density_mass,
    difference_check,
    eval_I_mn,
    expt_main_term,
    I_mn_error,
    load_calibration,
    logint_bound_check,
    logint_envelope,
    main_term_report,
    moment_bound_check,
    moment_envelope,
    moment_estimate,
    prop_error_fit,
    q_coeff,
    q_origin,
    region_integral_u,
    region_moment,
    region_weight,
    region_weights,
    save_calibration,
    zero_density_main_term,
)
from epstein_zeros.exceptions import (
    FixtureError,
    InvalidInputError,
    VacantCoefficientError,
)
from epstein_zeros.randmodel import McEstimate

# pylint: disable=missing-function-docstring
# pylint: disable=invalid-name

HALF = 1.0 / math.sqrt(2.0)


@pytest.fixture(name="params")
def params() -> MainTermParams:
    return MainTermParams.from_theta_T((4, 2), (1.0, 1.0), 0.5, 1e4)


def test_params_normalize_b() -> None:
    params = MainTermParams.from_L((4, 4), (3.0, 4.0), 2.0)
    assert params.b == pytest.approx((0.6, 0.8))
    assert params.loglog_T == 2.0
    assert params.prefactor == pytest.approx(1.0 / (4.0 * math.pi))


def test_params_validation() -> None:
    with pytest.raises(InvalidInputError):
        MainTermParams.from_L((4, 3), (1.0, 1.0), 1.0)
    with pytest.raises(InvalidInputError):
        MainTermParams.from_L((4,), (1.0, 1.0), 1.0)
    with pytest.raises(InvalidInputError):
        MainTermParams.from_L((4,), (1.0,), 0.0)
    with pytest.raises(InvalidInputError):
        MainTermParams.from_L((4,), (0.0,), 1.0)
    with pytest.raises(InvalidInputError):
        MainTermParams.from_theta_T((4,), (1.0,), 1.5, 1e4)
    with pytest.raises(InvalidInputError):
        MainTermParams.from_theta_T((4,), (1.0,), 0.5, 2.0)
    with pytest.raises(InvalidInputError):
        MainTermParams(xi=(4,), b=(2.0,), L=1.0)


def test_with_theta(params: MainTermParams) -> None:
    other = params.with_theta(0.25)
    assert other.L == pytest.approx(params.L / 2.0)
    assert other.T == params.T
    assert other.loglog_T == pytest.approx(params.loglog_T)
    assert params.to_json()["xi"] == [4, 2]


def test_region_integral_equal_widths() -> None:
    # E max of two independent N(0, 2) variables is sqrt(2 / pi)
    assert region_integral_u((4, 4)) == pytest.approx(4.0 * math.sqrt(2.0 * math.pi), rel=1e-9)
    assert region_integral_u((2,)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("xi", [(4, 2), (2, 2, 4), (4, 4, 4)])
def test_region_weights_partition(xi: tuple) -> None:
    total = math.prod(math.sqrt(math.pi * width) for width in xi)
    assert sum(region_weights(xi)) == pytest.approx(total, rel=1e-9)


def test_region_weights_symmetric() -> None:
    weights = region_weights((2, 2, 2))
    assert weights[0] == pytest.approx(weights[1], rel=1e-9)
    assert weights[1] == pytest.approx(weights[2], rel=1e-9)
    # for J = 2 the difference of two centred normals is symmetric
    assert region_weight(0, (4, 2)) == pytest.approx(region_weight(1, (4, 2)), rel=1e-9)


def test_region_moment_validation() -> None:
    with pytest.raises(InvalidInputError):
        region_moment(2, (4, 2))
    with pytest.raises(InvalidInputError):
        region_moment(0, (4, 2), m=(1,))


def test_d_coeff() -> None:
    assert d_coeff((0,), (2,)) == pytest.approx(math.sqrt(2.0 * math.pi))
    assert d_coeff((2,), (2,)) == pytest.approx(math.sqrt(2.0 * math.pi))
    assert d_coeff((1, 0), (2, 4)) == 0.0
    with pytest.raises(InvalidInputError):
        d_coeff((0,), (2, 4))


@pytest.mark.parametrize("xi", [(2,), (4, 2), (2, 2, 4)])
def test_origin_coefficients(xi: tuple) -> None:
    zeros = (0,) * len(xi)
    expected = math.pi ** (-len(xi) / 2) * math.prod(width**-0.5 for width in xi)
    assert q_origin(xi) * d_coeff(zeros, xi) == pytest.approx(expected, rel=1e-12)


def test_btilde() -> None:
    assert btilde((0, 0), (0, 0)) == 1.0
    assert btilde((1, 0), (0, 0)) == 0.0
    assert btilde((3, 3), (0, 0)) == 0.0
    with pytest.raises(VacantCoefficientError) as ex:
        btilde((1, 0), (1, 0))
    assert ex.value.index == ((1, 0), (1, 0))


def test_q_coeff() -> None:
    assert q_coeff((0,), (0,), (1,), (0,), (2,)) == 0j
    with pytest.raises(VacantCoefficientError):
        q_coeff((1,), (0,), (0,), (0,), (2,))
    with pytest.raises(InvalidInputError):
        q_coeff((0,), (0,), (0,), (0,), (2, 2))


def test_coefficient_table() -> None:
    table = CoefficientTable.build((4, 2), max_weight=3)
    assert table.d[(0, 0)] == pytest.approx(d_coeff((0, 0), (4, 2)))
    assert table.q[((0, 0),) * 4] == pytest.approx(q_origin((4, 2)))
    assert table.vacant
    known = table.btilde_known()
    assert known[((0, 0), (0, 0))] == 1.0
    assert ((1, 0), (1, 0)) not in known


def test_density_mass(params: MainTermParams) -> None:
    assert density_mass(params) == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(InvalidInputError):
        density_mass(MainTermParams.from_L((2, 2, 2, 2), (1, 1, 1, 1), 1.0))


def test_density_peak(params: MainTermParams) -> None:
    peak = density_G_leading((0.0, 0.0), (0.0, 0.0), params)
    assert peak == pytest.approx(q_origin((4, 2)) * params.L**-2)
    assert density_G_leading((1.0, 0.0), (0.0, 0.0), params) < peak


def test_expt_main_term_single() -> None:
    assert expt_main_term(MainTermParams.from_L((4,), (1.0,), 3.0)) == pytest.approx(
        0.0, abs=1e-10
    )


def test_expt_main_term_grows_with_L() -> None:
    low = expt_main_term(MainTermParams.from_L((4, 2), (1.0, 1.0), 1.0))
    high = expt_main_term(MainTermParams.from_L((4, 2), (1.0, 1.0), 4.0))
    assert high > low


def test_zero_density_main_term(params: MainTermParams) -> None:
    expected = (
        1e4
        * math.log(1e4) ** 0.5
        / (4.0 * math.pi**2 * math.sqrt(8.0 * params.L))
        * region_integral_u((4, 2))
    )
    assert zero_density_main_term(params) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(InvalidInputError):
        zero_density_main_term(MainTermParams.from_L((4, 2), (1.0, 1.0), 1.0))


def test_main_term_report(params: MainTermParams) -> None:
    report = main_term_report(params)
    assert report["zero_density_main"] == pytest.approx(zero_density_main_term(params))
    assert len(report["weights"]) == 2
    json.dumps(report)
    no_height = main_term_report(MainTermParams.from_L((4,), (1.0,), 1.0))
    assert no_height["zero_density_main"] is None


def test_I_mn_error_single() -> None:
    # log|e^(w sqrt L)| is linear, so the main terms are exact
    params = MainTermParams.from_L((2,), (1.0,), 2.0)
    error = I_mn_error((1,), (0,), params, n_samples=20_000)
    assert abs(error.mean) <= 4.0 * error.stderr


def test_I_mn_validation(params: MainTermParams) -> None:
    with pytest.raises(InvalidInputError):
        eval_I_mn((1,), (0,), params, n_samples=10_000)
    with pytest.raises(InvalidInputError):
        eval_I_mn((3, 0), (2, 0), params, n_samples=10_000)
    with pytest.raises(InvalidInputError):
        eval_I_mn((0, 0), (0, 0), params, n_samples=100)


def test_I_mn_deterministic(params: MainTermParams) -> None:
    first = eval_I_mn((0, 0), (0, 0), params, n_samples=10_000, seed=3)
    second = eval_I_mn((0, 0), (0, 0), params, n_samples=10_000, seed=3, threads=2)
    assert first.mean == second.mean


def test_prop_error_fit() -> None:
    L_values = (1.0, 2.0, 4.0, 8.0)
    errors = [McEstimate(0.3 * value**-0.25, 0.0, 1, 0) for value in L_values]
    fit = prop_error_fit(L_values, errors)
    assert fit.constant == pytest.approx(0.3)
    assert fit.holds
    spike = errors[:3] + [McEstimate(3.0, 0.0, 1, 0)]
    assert not prop_error_fit(L_values, spike).holds
    with pytest.raises(InvalidInputError):
        prop_error_fit(L_values, errors[:2])


def test_difference_check_zero_step(params: MainTermParams) -> None:
    report = difference_check(0.5, 0.5, 0.5, (0, 0), (0, 0), params)
    assert report.within
    assert report.difference == 0.0
    with pytest.raises(InvalidInputError):
        difference_check(0.5, 0.4, 0.5, (0, 0), (0, 0), params)


def test_logint_bound_check() -> None:
    assert logint_bound_check(0j, 0.5) == pytest.approx(math.log(2.0) ** 2 / 2.0, rel=1e-10)
    assert logint_bound_check(-0.5, 0.1) > 0.0
    with pytest.raises(InvalidInputError):
        logint_bound_check(0j, 1.0)


def test_logint_envelope() -> None:
    report = logint_envelope(constant=1.5, eps_values=(0.2,), grid=5)
    assert report.holds
    assert report.worst <= 1.5
    assert report.worst_at["eps"] == 0.2


def test_moment_envelope() -> None:
    assert moment_envelope(1, 1.0, 1) == 2.0
    assert moment_envelope(2, 10.0, 2) == pytest.approx(10.0**4 * 4 + 100.0 * 16)


def test_moment_estimate_single() -> None:
    # log|e^(u+iv)| = u, so the k = 1 moment is pi M^2 / 2
    estimate = moment_estimate(1, 10.0, (1.0,), n_samples=20_000)
    assert abs(estimate.mean - math.pi * 50.0) <= 4.0 * estimate.stderr
    with pytest.raises(InvalidInputError):
        moment_estimate(4, 10.0, (1.0,))
    with pytest.raises(InvalidInputError):
        moment_estimate(1, 0.5, (1.0,))


def test_moment_bound_check() -> None:
    report = moment_bound_check(1, 10.0, (1.0,), n_samples=20_000)
    assert report.constant == pytest.approx(1.944)
    assert report.holds
    assert report.to_json()["estimate"]["n"] == 20_000


def test_load_calibration() -> None:
    calibration = load_calibration()
    assert calibration.moment_constant(1) == pytest.approx(1.944)
    assert calibration.log_integral == pytest.approx(1.5)
    with pytest.raises(FixtureError):
        calibration.moment_constant(5)


def test_calibration_roundtrip(tmp_path: Path) -> None:
    calibration = Calibration({1: 2.0, 2: 9.0}, 1.4)
    path = save_calibration(calibration, tmp_path / "calibration.json")
    loaded = load_calibration(path)
    assert loaded.moment == {1: 2.0, 2: 9.0}
    assert loaded.log_integral == 1.4


@pytest.mark.parametrize(
    "content",
    [
        "{",
        "{}",
        '{"moment_envelope": {"A": {"1": -1.0}}, "log_integral_envelope": {"C": 1.0}}',
    ],
)
def test_corrupted_calibration(tmp_path: Path, content: str) -> None:
    path = tmp_path / "calibration.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(FixtureError):
        load_calibration(path)


def test_missing_calibration(tmp_path: Path) -> None:
    with pytest.raises(FixtureError):
        load_calibration(tmp_path / "none.json")
