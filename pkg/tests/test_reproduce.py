"""Test acceptance pipeline"""
import json
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from epstein_zeros.asymptotics import Calibration
from epstein_zeros.exceptions import InvalidInputError, NumericalError
from epstein_zeros.manifest import file_digest
from epstein_zeros.reproduce import (
    Criterion,
    ReproduceConfig,
    groups,
    reproduce,
    run_criterion,
    select,
    write_bundle,
)

# pylint: disable=missing-function-docstring

QUICK_CHECKS = ["coefficient_identities", "density_normalization"]


@pytest.fixture(name="config")
def config() -> ReproduceConfig:
    return ReproduceConfig(seed=3, quick=True)


def test_groups() -> None:
    assert groups() == [
        "envelopes",
        "epstein",
        "exploratory",
        "mainterm",
        "randmodel",
        "zeros",
    ]


def test_select() -> None:
    assert len(select()) == len(select(groups()))
    names = [item.name for item in select(["mainterm"])]
    assert names == [
        "region_integrals",
        "coefficient_identities",
        "density_normalization",
        "I_mn_decomposition",
    ]
    assert [item.name for item in select(["pole_residue"])] == ["pole_residue"]
    exploratory = select(["exploratory"])
    assert exploratory
    assert not any(item.primary for item in exploratory)


def test_select_unknown() -> None:
    with pytest.raises(InvalidInputError):
        select(["nonsense"])


def test_config() -> None:
    assert ReproduceConfig().pick(10, 1) == 10
    assert ReproduceConfig(quick=True).pick(10, 1) == 1
    assert ReproduceConfig(calibration=Path("a.json")).to_json()["calibration"] == "a.json"


def test_run_criterion_catches_library_errors(config: ReproduceConfig) -> None:
    def broken(_: ReproduceConfig):
        raise NumericalError("did not converge")

    result = run_criterion(Criterion("broken", "test", broken), config)
    assert result.status == "fail"
    assert result.details == {"error": "did not converge", "error_type": "NumericalError"}


def test_exploratory_is_recorded(config: ReproduceConfig) -> None:
    result = run_criterion(
        Criterion("trend", "test", lambda _: (False, {}), primary=False), config
    )
    assert result.status == "recorded"
    assert "elapsed" not in result.to_json()


def test_quick_checks_pass(config: ReproduceConfig) -> None:
    report = reproduce(config, QUICK_CHECKS)
    assert report.passed
    assert report.statuses() == {name: "pass" for name in QUICK_CHECKS}
    assert set(report.timing()) == {f"{name}_s" for name in QUICK_CHECKS}
    summary = report.to_json()
    assert summary["status"] == "pass"
    assert summary["failing"] == []


def test_corrupted_calibration_fails_envelopes(tmp_path: Path) -> None:
    path = tmp_path / "calibration.json"
    path.write_text("{", encoding="utf-8")
    report = reproduce(ReproduceConfig(quick=True, calibration=path), ["envelopes"])
    assert not report.passed
    assert report.failing == ["envelopes"]
    assert report.results[0].details["error_type"] == "FixtureError"


def test_recalibrate(mocker: MockerFixture, tmp_path: Path) -> None:
    calibration = Calibration({1: 2.0, 2: 8.0}, 1.5)
    calibrate = mocker.patch("epstein_zeros.reproduce.calibrate", return_value=calibration)
    save = mocker.patch("epstein_zeros.reproduce.save_calibration")
    target = tmp_path / "calibration.json"
    reproduce(ReproduceConfig(quick=True, calibration=target), ["density_normalization"], True)
    calibrate.assert_called_once()
    assert calibrate.call_args.kwargs["n_samples"] == 100_000
    save.assert_called_once_with(calibration, target)


def test_write_bundle(config: ReproduceConfig, tmp_path: Path) -> None:
    report = reproduce(config, QUICK_CHECKS)
    digests = write_bundle(report, tmp_path)
    assert set(digests) == {
        "reproduce/coefficient_identities.json",
        "reproduce/density_normalization.json",
        "reproduce/summary.json",
    }
    for name, digest in digests.items():
        assert file_digest(tmp_path / name) == digest
    summary = json.loads((tmp_path / "reproduce" / "summary.json").read_text(encoding="utf-8"))
    assert summary["config"]["seed"] == 3


def test_bundle_is_reproducible(config: ReproduceConfig, tmp_path: Path) -> None:
    first = write_bundle(reproduce(config, QUICK_CHECKS), tmp_path / "first")
    second = write_bundle(reproduce(config, QUICK_CHECKS), tmp_path / "second")
    assert first == second


def test_functional_equation_heights(
    mocker: MockerFixture, config: ReproduceConfig
) -> None:
    residual = mocker.patch(
        "epstein_zeros.reproduce.functional_residual", return_value=0.0
    )
    result = run_criterion(select(["functional_equation"])[0], config)
    assert result.status == "pass"
    heights = [abs(call.args[2].imag) for call in residual.call_args_list]
    assert max(heights) <= 50.0
    assert max(heights) > 15.0


def test_soc_slopes_cover_real_and_complex_groups(
    mocker: MockerFixture, config: ReproduceConfig
) -> None:
    build = mocker.patch("epstein_zeros.reproduce.build_instance")
    mocker.patch("epstein_zeros.reproduce.soc_slope", return_value=(2.0, 0.0))
    result = run_criterion(select(["soc_slopes"])[0], config)
    assert [call.args[1].D for call in build.call_args_list] == [-15, -23]
    slopes = result.details["slopes"]
    # both characters of -15 are real: diagonal target xi / 2 = 2
    assert slopes["-15/0,0"] == {"slope": 2.0, "target": 2.0, "ok": True}
    assert not slopes["-15/0,1"]["ok"]
    assert {key.split("/")[0] for key in slopes} == {"-15", "-23"}
