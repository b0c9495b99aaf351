"""Report emission: the delimited risk grid and the chart bundle.

The CSV is the flat per-(segment, threat) table decision-makers pull into
spreadsheets; the figures give the same numbers a first-glance shape.
Charts render with the Agg backend so report generation works headless.
"""

from __future__ import annotations

import csv
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .assessment import AssessmentReport  # noqa: E402
from .model import Money  # noqa: E402

_CENTS = Decimal("0.01")


def _cents(money: Money) -> str:
    return str(money.amount.quantize(_CENTS, rounding=ROUND_HALF_EVEN))


CSV_COLUMNS = [
    "unit", "segment", "threat_id",
    "impact_value", "impact_operational", "impact_financial", "risk_fraction",
    "seg_revenue", "seg_impact", "seg_risk", "exposure", "ale", "currency",
]


def report_csv(report: AssessmentReport, stream) -> None:
    """Write the per-threat risk grid, one row per (segment, threat)."""
    writer = csv.writer(stream)
    writer.writerow(CSV_COLUMNS)
    for segment in report.segments:
        for row in segment.threat_rows:
            writer.writerow([
                segment.unit,
                segment.segment,
                row.threat_id,
                repr(row.impacts.value),
                repr(row.impacts.operational),
                repr(row.impacts.financial),
                repr(row.risk_fraction),
                _cents(segment.seg_revenue),
                _cents(row.seg_impact),
                _cents(row.seg_risk),
                repr(segment.exposure),
                _cents(segment.ale),
                segment.seg_revenue.currency,
            ])


def _segment_label(unit: str, segment: str) -> str:
    return f"{unit}/{segment}"


def _fig_segment_risk(report: AssessmentReport, path: Path) -> None:
    labels, risks, ales = [], [], []
    for segment in report.segments:
        labels.append(_segment_label(segment.unit, segment.segment))
        risks.append(sum(r.seg_risk.as_float() for r in segment.threat_rows))
        ales.append(segment.ale.as_float())
    positions = range(len(labels))
    fig, ax = plt.subplots(figsize=(10, max(3, 0.6 * len(labels) + 2)))
    ax.barh([p + 0.2 for p in positions], risks, height=0.4,
            label="segment risk (sum over threats)", color="#b3443c")
    ax.barh([p - 0.2 for p in positions], ales, height=0.4,
            label="annual loss expectancy", color="#2a6f97")
    ax.set_yticks(list(positions))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    currency = report.segments[0].seg_revenue.currency if report.segments else ""
    ax.set_xlabel(f"amount ({currency})")
    ax.set_title("Monetary risk by segment")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_domain_ranking(report: AssessmentReport, path: Path, top: int = 15) -> None:
    ranked = [p for p in report.domain_ranking if p.score > 0][:top]
    if not ranked:
        ranked = list(report.domain_ranking[:top])
    labels = [p.domain_id for p in ranked]
    scores = [p.score for p in ranked]
    fig, ax = plt.subplots(figsize=(10, max(3, 0.45 * len(labels) + 2)))
    ax.barh(range(len(labels)), scores, color="#52796f")
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("priority score")
    ax.set_title("Security domain prioritization")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _fig_recommendations(report: AssessmentReport, path: Path, top: int = 15) -> None:
    candidates = list(report.candidates[:top])
    chosen = {
        (c.unit, c.segment, c.control_id) for c in report.recommendation.chosen
    }
    labels = [
        f"{c.control_id} @ {_segment_label(c.unit, c.segment)}" for c in candidates
    ]
    values = [c.z_rosi for c in candidates]
    colors = [
        "#2a9d8f" if (c.unit, c.segment, c.control_id) in chosen else "#9a9a9a"
        for c in candidates
    ]
    fig, ax = plt.subplots(figsize=(10, max(3, 0.45 * len(labels) + 2)))
    ax.barh(range(len(labels)), values, color=colors)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("return on security investment (ratio)")
    ax.set_title("Control candidates by return (chosen in green)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _read_losses_csv(path) -> list[float]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        values = []
        if header and header != ["loss"]:
            # no header row; first line was data
            values.append(float(header[0]))
        for row in reader:
            if row:
                values.append(float(row[0]))
    return values


def _fig_losses(report: AssessmentReport, path: Path, losses_path=None) -> bool:
    """Histogram from a loss sample, or quantile bars from the stored summary."""
    if losses_path is not None:
        losses = _read_losses_csv(losses_path)
        fig, ax = plt.subplots(figsize=(10, 5))
        ax.hist(losses, bins=60, color="#457b9d")
        ax.set_xlabel("annual loss")
        ax.set_ylabel("iterations")
        ax.set_title("Simulated annual loss distribution")
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        return True
    summary = report.simulation_summary
    if not summary:
        return False
    levels = sorted(summary.get("value_at_risk", {}))
    if not levels:
        return False
    var_values = [summary["value_at_risk"][lv] for lv in levels]
    cvar_values = [summary["cvar"][lv] for lv in levels]
    positions = range(len(levels))
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.bar([p - 0.2 for p in positions], var_values, width=0.4,
           label="value at risk", color="#2a6f97")
    ax.bar([p + 0.2 for p in positions], cvar_values, width=0.4,
           label="tail mean (cvar)", color="#b3443c")
    ax.axhline(summary.get("mean", 0.0), color="black", linewidth=0.8,
               linestyle="--", label="mean loss")
    ax.set_xticks(list(positions))
    ax.set_xticklabels([f"{float(lv):.0%}" for lv in levels])
    ax.set_ylabel(f"loss ({summary.get('currency', '')})")
    ax.set_title("Simulated loss quantiles")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def render_report(report: AssessmentReport, out_dir, losses_path=None) -> list[Path]:
    """Write report.csv plus the chart bundle into out_dir; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "report.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as handle:
        report_csv(report, handle)
    written.append(csv_path)

    figure_jobs = [
        ("segment_risk.png", lambda p: _fig_segment_risk(report, p)),
        ("domain_priorities.png", lambda p: _fig_domain_ranking(report, p)),
        ("recommendations.png", lambda p: _fig_recommendations(report, p)),
    ]
    for name, job in figure_jobs:
        target = out / name
        job(target)
        written.append(target)

    loss_target = out / "loss_distribution.png"
    if _fig_losses(report, loss_target, losses_path):
        written.append(loss_target)
    return written
