"""Test random Euler product model"""
import math

import numpy as np
import pytest
from scipy import special as sps

from epstein_zeros.epstein import CombinationSpec
from epstein_zeros.exceptions import InvalidInputError
from epstein_zeros.quadforms import ClassGroup, class_group
from epstein_zeros.randmodel import (
    A_kl,
    ModelInstance,
    a_coeff,
    build_instance,
    char_function_probe,
    covariance_matrix,
    gaussian_prediction,
    ks_critical,
    log_abs_F_samples,
    mc_estimate,
    mean_square,
    relabel_statistic,
    sample_F,
    sample_log_L,
    sample_logs,
    soc_slope,
    soc_sum,
)

# pylint: disable=missing-function-docstring
# pylint: disable=invalid-name


@pytest.fixture(name="model15")
def model15(group15: ClassGroup) -> ModelInstance:
    spec = CombinationSpec.from_class(group15, 0)
    return ModelInstance(spec, group15, P=1000, seed=11)


@pytest.fixture(name="model23")
def model23(group23: ClassGroup) -> ModelInstance:
    spec = CombinationSpec.from_class(group23, 0)
    return ModelInstance(spec, group23, P=10_000, seed=5)


def test_group_mismatch(group15: ClassGroup) -> None:
    spec = CombinationSpec.from_class(group15, 0)
    with pytest.raises(InvalidInputError):
        ModelInstance(spec, class_group(-4))


def test_prime_factors(model15: ModelInstance) -> None:
    # inert primes enter only through p^2 <= P
    assert np.all(model15.primes[model15.inert] ** 2 <= 1000)
    assert 7 in model15.primes
    assert 37 not in model15.primes
    assert 17 in model15.primes
    assert model15.alpha.shape == (2, len(model15.primes))


def test_sigma_must_exceed_half(model15: ModelInstance) -> None:
    with pytest.raises(InvalidInputError):
        sample_log_L(model15, 0.5, 0)
    with pytest.raises(InvalidInputError):
        soc_sum(model15, 0, 0, 0.4)


def test_samples_are_deterministic(model15: ModelInstance) -> None:
    first = sample_log_L(model15, 0.7, 3)
    again = sample_log_L(ModelInstance(model15.spec, model15.group, 1000, 11), 0.7, 3)
    other = sample_log_L(ModelInstance(model15.spec, model15.group, 1000, 12), 0.7, 3)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)
    assert first.shape == (2,)


def test_batch_matches_single_samples(model15: ModelInstance) -> None:
    batch = sample_logs(model15, 0.7, 5, start=10)
    for row in range(5):
        assert np.allclose(batch[row], sample_log_L(model15, 0.7, 10 + row), rtol=1e-13)


def test_sample_F_combines(model15: ModelInstance) -> None:
    logs = sample_log_L(model15, 0.8, 0)
    expected = sum(b * np.exp(value) for b, value in zip(model15.spec.b, logs))
    assert sample_F(model15, 0.8, 0) == pytest.approx(expected, rel=1e-12)


def test_large_sigma_is_near_one(model15: ModelInstance) -> None:
    logs = sample_logs(model15, 4.0, 50)
    assert np.all(np.abs(logs) < 0.2)


def test_mc_thread_invariance(model15: ModelInstance) -> None:
    single = mc_estimate(model15, 0.6, n_samples=3000, threads=1)
    threaded = mc_estimate(model15, 0.6, n_samples=3000, threads=4)
    assert single.mean == threaded.mean
    assert single.stderr == threaded.stderr
    assert single.to_json()["n"] == 3000


def test_mc_mean_single_character() -> None:
    # E log|L(sigma : X)| = 0, so only log|b| remains
    group = class_group(-4)
    spec = CombinationSpec.from_class(group, 0)
    model = ModelInstance(spec, group, P=1000, seed=2)
    estimate = mc_estimate(model, 0.6, n_samples=4000)
    assert abs(spec.b[0]) == pytest.approx(4.0)
    assert abs(estimate.mean - math.log(4.0)) <= 4.0 * estimate.stderr


def test_log_L_is_centred(model23: ModelInstance) -> None:
    # X(p) is uniform on the circle, so every log L_j(sigma : X) has mean zero
    logs = sample_logs(model23, 0.6, 4000)
    for part, bound in ((logs.imag, 3.0), (logs.real, 4.0)):
        stderr = np.std(part, axis=0, ddof=1) / math.sqrt(len(part))
        assert np.all(np.abs(np.mean(part, axis=0)) <= bound * stderr)


def test_log_abs_F_finite(model23: ModelInstance) -> None:
    values = log_abs_F_samples(model23, 0.55, 200)
    assert values.shape == (200,)
    assert np.all(np.isfinite(values))


def test_build_instance_is_cached(group15: ClassGroup) -> None:
    spec = CombinationSpec.from_class(group15, 0)
    assert build_instance(spec, group15, 500, 1) is build_instance(spec, group15, 500, 1)


def test_a_coeff(model15: ModelInstance) -> None:
    assert a_coeff(model15, 0, 17) == pytest.approx(2.0)
    assert a_coeff(model15, 1, 17) == pytest.approx(-2.0)
    assert a_coeff(model15, 1, 19) == pytest.approx(2.0)
    assert a_coeff(model15, 1, 7) == 0.0
    assert a_coeff(model15, 1, 3) == pytest.approx(-1.0)
    assert a_coeff(model15, 0, 5) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        a_coeff(model15, 0, 1009)


def test_mean_square(model23: ModelInstance) -> None:
    assert mean_square(model23, 0, 0) == pytest.approx(2.0)
    assert mean_square(model23, 1, 1) == pytest.approx(1.0)
    assert mean_square(model23, 0, 1) == pytest.approx(0.0, abs=1e-12)


def test_soc_sum_symmetric(model15: ModelInstance) -> None:
    assert soc_sum(model15, 0, 1, 0.6) == soc_sum(model15, 1, 0, 0.6)
    assert soc_sum(model15, 0, 0, 0.6) > 0.0


def test_soc_sum_tail(model15: ModelInstance) -> None:
    head = soc_sum(model15, 0, 0, 0.6)
    full = soc_sum(model15, 0, 0, 0.6, tail=True)
    expected = mean_square(model15, 0, 0) * sps.exp1(0.2 * math.log(1000))
    assert full - head == pytest.approx(expected, rel=1e-12)


def test_soc_slope(model23: ModelInstance) -> None:
    diagonal, _ = soc_slope(model23, 1, 1)
    cross, _ = soc_slope(model23, 0, 1)
    assert diagonal == pytest.approx(1.0, rel=0.2)
    assert abs(cross) < 0.2


def test_covariance_matrix(model15: ModelInstance) -> None:
    matrix = covariance_matrix(model15, 0.7)
    assert matrix.shape == (2, 2)
    assert np.allclose(matrix, matrix.T)
    assert np.all(np.diag(matrix) > 0)


def test_tail_scale(model15: ModelInstance) -> None:
    bigger = ModelInstance(model15.spec, model15.group, P=100_000, seed=11)
    assert model15.tail_scale(0.6) > bigger.tail_scale(0.6) > 0.0
    assert model15.tail_scale(0.6) == pytest.approx(
        math.sqrt(4.0 * sps.exp1(0.2 * math.log(1000)))
    )


def test_A_kl(model15: ModelInstance) -> None:
    assert A_kl(model15, 17, 0.6, (0, 0), (0, 0)) == pytest.approx(1.0)
    assert abs(A_kl(model15, 17, 0.6, (1, 0), (0, 0))) < 1e-12
    second = A_kl(model15, 17, 0.6, (1, 0), (1, 0))
    assert second.real > 0.0
    assert abs(second.imag) < 1e-12
    with pytest.raises(InvalidInputError):
        A_kl(model15, 17, 0.6, (1,), (0,))
    with pytest.raises(InvalidInputError):
        A_kl(model15, 18, 0.6, (1, 0), (0, 0))


def test_char_function_probe(model15: ModelInstance) -> None:
    with pytest.raises(InvalidInputError):
        char_function_probe(model15, 0.6, (0.1, 0.0), (0.0, 0.0), n_samples=999)
    origin = char_function_probe(model15, 0.6, (0.0, 0.0), (0.0, 0.0), n_samples=1000)
    assert origin.value == pytest.approx(1.0)
    assert gaussian_prediction(model15, 0.6, (0.0, 0.0), (0.0, 0.0)) == 1.0
    point = char_function_probe(model15, 0.6, (0.05, 0.0), (0.0, 0.05), n_samples=4000)
    assert abs(point.value) <= 1.0
    assert point.stderr > 0.0


def test_relabel_statistic(model23: ModelInstance) -> None:
    statistic, pvalue = relabel_statistic(model23, 0.6, 2000)
    assert 0.0 <= statistic <= 1.0
    assert pvalue > 1e-4
    assert ks_critical(2000, 2000) == pytest.approx(
        math.sqrt(-math.log(0.005) / 2.0) * math.sqrt(2 / 2000)
    )
