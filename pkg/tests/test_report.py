"""Report emission: CSV grid and chart rendering."""

import csv
import io

from qber import EngineConfig, Money, SimulationConfig, assess
from qber.report import render_report, report_csv


def test_csv_grid_shape_and_rounding(worked_profile, fixture_catalog):
    report = assess(worked_profile, fixture_catalog)
    buffer = io.StringIO()
    report_csv(report, buffer)
    rows = list(csv.DictReader(io.StringIO(buffer.getvalue())))
    assert len(rows) == 1
    row = rows[0]
    assert row["unit"] == "Digital"
    assert row["segment"] == "Sales Platform"
    assert row["threat_id"] == "T-BREACH"
    assert row["seg_revenue"] == "6000000.00"  # money shown at cent precision
    assert row["seg_impact"] == "3840000.00"
    assert row["seg_risk"] == "1228800.00"
    assert row["ale"] == "1152000.00"
    assert row["currency"] == "USD"
    assert float(row["exposure"]) == 0.29999999999999993  # full precision kept


def test_render_without_simulation(worked_profile, fixture_catalog, tmp_path):
    report = assess(worked_profile, fixture_catalog)
    written = render_report(report, tmp_path / "out")
    names = [p.name for p in written]
    assert names == ["report.csv", "segment_risk.png", "domain_priorities.png",
                     "recommendations.png"]
    for path in written:
        assert path.stat().st_size > 0


def test_render_with_simulation_summary(worked_profile, fixture_catalog, tmp_path):
    config = EngineConfig(simulation=SimulationConfig(iterations=400, seed=3))
    report = assess(worked_profile, fixture_catalog, config)
    written = render_report(report, tmp_path / "out")
    assert (tmp_path / "out" / "loss_distribution.png").exists()
    assert len(written) == 5


def test_render_with_loss_sample(worked_profile, fixture_catalog, tmp_path):
    report = assess(worked_profile, fixture_catalog)
    sample = tmp_path / "losses.csv"
    sample.write_text("loss\n" + "\n".join(str(v * 1000.0) for v in range(100)) + "\n")
    render_report(report, tmp_path / "out", losses_path=sample)
    assert (tmp_path / "out" / "loss_distribution.png").stat().st_size > 0
