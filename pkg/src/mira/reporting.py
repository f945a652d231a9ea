"""Report serialization: per-pair CSV, full-report JSON, and SVG trend plots.

All emitters are byte-deterministic for a given report (sorted keys, repr
floats, no timestamps), so identical runs produce identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from .embeddings import PairScore
from .errors import ConfigurationError
from .evaluator import (
    EvaluationReport,
    Flag,
    MetricStats,
    PairFailure,
    StatsSection,
)
from .stats import KWResult, PairwiseResult, SummaryStats

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"
TREND_SVG = "trend.svg"


def report_to_dict(report: EvaluationReport) -> dict:
    return asdict(report)


def _summary_from(d: dict) -> SummaryStats:
    return SummaryStats(mean=d["mean"], std=d["std"], n=d["n"])


def _stats_section_from(d: dict | None) -> StatsSection | None:
    if d is None:
        return None
    metrics = {}
    for name, ms in d["metrics"].items():
        metrics[name] = MetricStats(
            metric=ms["metric"],
            groups={lb: _summary_from(s) for lb, s in ms["groups"].items()},
            kw=KWResult(**ms["kw"]) if ms["kw"] is not None else None,
            pairwise=[PairwiseResult(**p) for p in ms["pairwise"]],
        )
    return StatsSection(
        degrees=list(d["degrees"]),
        metrics=metrics,
        fad_per_degree=d.get("fad_per_degree"),
        fad_experimental=d.get("fad_experimental", False),
    )


def report_from_dict(data: dict) -> EvaluationReport:
    return EvaluationReport(
        per_pair=[PairScore(**p) for p in data["per_pair"]],
        set_pairs={k: list(v) for k, v in data["set_pairs"].items()},
        global_stats={
            sp: {m: _summary_from(s) for m, s in metrics.items()}
            for sp, metrics in data["global_stats"].items()
        },
        global_fad=dict(data.get("global_fad", {})),
        flags=[Flag(**f) for f in data.get("flags", [])],
        failures=[PairFailure(**f) for f in data.get("failures", [])],
        stats=_stats_section_from(data.get("stats")),
        provenance=data.get("provenance", {}),
    )


def write_report_json(report: EvaluationReport, path: Path) -> None:
    path.write_text(json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n")


def load_report(path: str | Path) -> EvaluationReport:
    return report_from_dict(json.loads(Path(path).read_text()))


def write_report_csv(report: EvaluationReport, path: Path) -> None:
    flagged = {(f.ref_id, f.tgt_id, f.metric) for f in report.flags}
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "ref_id", "tgt_id", "value", "flagged"])
        for score in report.per_pair:
            writer.writerow(
                [
                    score.metric,
                    score.ref_id,
                    score.tgt_id,
                    repr(score.value),
                    "true" if (score.ref_id, score.tgt_id, score.metric) in flagged else "false",
                ]
            )


def _svg_panel(metric: str, points: list[tuple[float, float, float]], panel_idx: int, width: int, height: int) -> list[str]:
    """One series: x = replication degree (baseline at 0), y = mean, whiskers +-std."""
    pad = 45
    top = panel_idx * height
    xs = [p[0] for p in points]
    lo = min(p[1] - p[2] for p in points)
    hi = max(p[1] + p[2] for p in points)
    span = (hi - lo) or 1.0
    x_span = (max(xs) - min(xs)) or 1.0

    def sx(x):
        return pad + (x - min(xs)) / x_span * (width - 2 * pad)

    def sy(y):
        return top + height - pad - (y - lo) / span * (height - 2 * pad)

    parts = [f'<g class="series" id="series-{metric}">']
    parts.append(
        f'<text x="{pad}" y="{top + 18}" font-size="13" font-family="sans-serif">{metric}</text>'
    )
    poly = " ".join(f"{sx(x):.2f},{sy(m):.2f}" for x, m, _ in points)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    for x, mean, std in points:
        parts.append(
            f'<line x1="{sx(x):.2f}" y1="{sy(mean - std):.2f}" x2="{sx(x):.2f}" y2="{sy(mean + std):.2f}" '
            'stroke="#1f77b4" stroke-width="0.8"/>'
        )
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(mean):.2f}" r="3" fill="#1f77b4"/>')
        parts.append(
            f'<text x="{sx(x):.2f}" y="{top + height - pad + 16}" font-size="10" '
            f'font-family="sans-serif" text-anchor="middle">{x:g}%</text>'
        )
    parts.append("</g>")
    return parts


def write_trend_svg(report: EvaluationReport, path: Path) -> None:
    """Per-metric mean +- std against replication degree, baseline at 0."""
    if report.stats is None:
        raise ConfigurationError("report has no sensitivity statistics to plot")
    stats = report.stats
    width, panel_height = 640, 200
    metric_names = sorted(stats.metrics)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{panel_height * len(metric_names)}" viewBox="0 0 {width} {panel_height * len(metric_names)}">'
    ]
    for idx, metric in enumerate(metric_names):
        ms = stats.metrics[metric]
        points = [(0.0, ms.groups["baseline"].mean, ms.groups["baseline"].std)]
        for degree in stats.degrees:
            label = f"{degree * 100:g}%"
            points.append((degree * 100, ms.groups[label].mean, ms.groups[label].std))
        lines.extend(_svg_panel(metric, points, idx, width, panel_height))
    lines.append("</svg>")
    path.write_text("\n".join(lines) + "\n")


def write_report(report: EvaluationReport, out_dir: str | Path, formats: set[str] = frozenset({"csv", "json"})) -> list[Path]:
    """Emit the requested formats into out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise ConfigurationError(f"unknown report formats: {sorted(unknown)}")
    if "json" in formats:
        p = out_dir / REPORT_JSON
        write_report_json(report, p)
        written.append(p)
    if "csv" in formats:
        p = out_dir / REPORT_CSV
        write_report_csv(report, p)
        written.append(p)
    if "svg" in formats:
        if report.stats is not None:
            p = out_dir / TREND_SVG
            write_trend_svg(report, p)
            written.append(p)
    return written
