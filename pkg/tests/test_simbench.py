import json

import pytest

from gldlm import GldParams
from gldlm.errors import DomainError, InvalidParamsError
from gldlm.simbench import (
    QUANTITIES,
    SimConfig,
    format_report,
    report_from_json,
    run_simulation,
)

NEAR_NORMAL = GldParams(0.0, 0.19, 0.14, 0.14)
UNIFORM = GldParams(0.0, 1.0, 1.0, 1.0)


class TestRunSimulation:
    def test_determinism_modulo_timing(self):
        config = SimConfig(NEAR_NORMAL, sample_size=50, replications=3, seed=11)
        a = run_simulation(config)
        b = run_simulation(config)
        for name in QUANTITIES:
            if name == "time_seconds":
                continue
            assert a.stats[name] == b.stats[name]
        assert a.replications == b.replications == 3
        assert a.failures == b.failures == 0

    def test_uniform_generator_recovers_smaller_root(self):
        # tau4 near zero has symmetric roots near 1 and 2; the smaller-start
        # rule keeps the estimates near the generating exponent 1
        report = run_simulation(SimConfig(UNIFORM, sample_size=400, replications=20, seed=5))
        assert report.stats["lambda3"].mean == pytest.approx(1.0, abs=0.2)
        assert report.stats["lambda4"].mean == pytest.approx(1.0, abs=0.2)

    def test_best_start_option_changes_selection(self):
        smaller = run_simulation(SimConfig(NEAR_NORMAL, 100, 5, seed=2, report_smaller_start=True))
        best = run_simulation(SimConfig(NEAR_NORMAL, 100, 5, seed=2, report_smaller_start=False))
        assert smaller.replications == best.replications
        # with these samples both selections exist; they may or may not agree,
        # but the smaller-start one must stay near the generating shape
        assert abs(smaller.stats["lambda3"].mean - 0.14) < 0.3

    def test_failures_counted_not_fatal(self):
        # tiny samples from the uniform generator often land below the
        # symmetric L-kurtosis floor, where no start exists
        report = run_simulation(SimConfig(UNIFORM, sample_size=10, replications=30, seed=0))
        assert report.failures > 0
        assert report.replications + report.failures == 30
        assert report.stats["lambda2"].std_error >= 0.0

    def test_config_validation(self):
        with pytest.raises(DomainError):
            run_simulation(SimConfig(UNIFORM, 5, 10, seed=1))
        with pytest.raises(DomainError):
            run_simulation(SimConfig(UNIFORM, 100, 1, seed=1))
        with pytest.raises(InvalidParamsError):
            run_simulation(SimConfig(GldParams(0, 1, -0.5, -0.5), 100, 5, seed=1))


@pytest.fixture(scope="module")
def report():
    return run_simulation(SimConfig(NEAR_NORMAL, 60, 4, seed=42))


class TestFormatReport:

    def test_csv_header_and_rows(self, report):
        text = format_report(report, "csv")
        lines = text.strip().splitlines()
        assert lines[0] == "quantity,mean,std_error"
        assert len(lines) == 1 + len(QUANTITIES)
        assert lines[1].startswith("lambda1,")

    def test_table_has_twelve_value_rows(self, report):
        text = format_report(report, "table")
        lines = text.strip().splitlines()
        value_rows = [ln for ln in lines if "Mean" in ln or "Std error" in ln]
        assert len(value_rows) == 12
        assert any(ln.startswith("Time (s)") for ln in lines)
        assert any(ln.startswith("E_KS") for ln in lines)

    def test_json_roundtrip(self, report):
        text = format_report(report, "json")
        doc = json.loads(text)
        assert doc["schema"] == "gldlm/sim-report/v1"
        parsed = report_from_json(text)
        assert parsed == report

    def test_unknown_layout(self, report):
        with pytest.raises(DomainError):
            format_report(report, "yaml")
