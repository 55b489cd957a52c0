"""Report file emission: CSV tables and SVG charts from a RunReport.

All files are written with fixed number formatting and newline-terminated
lines, so identical reports produce byte-identical files. SVGs are built
by hand for the same reason (no plotting library, no embedded metadata).
"""

from __future__ import annotations

from pathlib import Path

from .ablation import RunReport

SUMMARY_CSV = "summary.csv"
HISTOGRAM_CSV = "histogram.csv"
UTILIZATION_CSV = "utilization.csv"
HISTOGRAM_SVG = "histogram.svg"
UTILIZATION_SVG = "utilization.svg"


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def summary_table(report: RunReport) -> str:
    lines = ["policy,accuracy,mean_tokens"]
    for kind in report.policies:
        lines.append(
            f"{kind},{report.accuracy[kind]:.6f},{report.mean_tokens[kind]:.3f}"
        )
    return "\n".join(lines) + "\n"


def histogram_table(report: RunReport) -> str:
    total = sum(report.hist_counts)
    lines = ["bin_low,bin_high,count,percentage"]
    for i, count in enumerate(report.hist_counts):
        pct = 100.0 * count / total if total else 0.0
        lines.append(
            f"{report.hist_bin_edges[i]:.3f},{report.hist_bin_edges[i + 1]:.3f},"
            f"{count},{pct:.4f}"
        )
    return "\n".join(lines) + "\n"


def utilization_table(report: RunReport) -> str:
    lines = ["trial,actual_tokens,capacity,utilization"]
    for t, (actual, capacity) in enumerate(report.utilization):
        frac = actual / capacity if capacity else 0.0
        lines.append(f"{t},{actual},{capacity},{frac:.6f}")
    return "\n".join(lines) + "\n"


_SVG_HEAD = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
    'viewBox="0 0 {w} {h}">\n'
    '<rect width="{w}" height="{h}" fill="white"/>\n'
    '<text x="{tx}" y="20" font-family="monospace" font-size="14">{title}</text>\n'
)

_PLOT = {"left": 50.0, "top": 40.0, "width": 520.0, "height": 300.0}
_SVG_W = 620
_SVG_H = 400


def _axes() -> str:
    left, top = _PLOT["left"], _PLOT["top"]
    right = left + _PLOT["width"]
    bottom = top + _PLOT["height"]
    return (
        f'<line x1="{left:.1f}" y1="{bottom:.1f}" x2="{right:.1f}" y2="{bottom:.1f}" '
        'stroke="black" stroke-width="1"/>\n'
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left:.1f}" y2="{bottom:.1f}" '
        'stroke="black" stroke-width="1"/>\n'
    )


def histogram_svg(report: RunReport) -> str:
    """Bar chart of the per-segment allocation histogram."""
    counts = report.hist_counts
    peak = max(counts) if counts and max(counts) > 0 else 1
    left, top = _PLOT["left"], _PLOT["top"]
    bottom = top + _PLOT["height"]
    bar_w = _PLOT["width"] / max(len(counts), 1)

    parts = [
        _SVG_HEAD.format(w=_SVG_W, h=_SVG_H, tx=left, title="Tokens allocated per segment"),
        _axes(),
    ]
    for i, count in enumerate(counts):
        h = _PLOT["height"] * count / peak
        x = left + i * bar_w
        parts.append(
            f'<rect x="{x:.2f}" y="{bottom - h:.2f}" width="{bar_w - 2:.2f}" '
            f'height="{h:.2f}" fill="#4878cf"/>\n'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{bottom + 14:.2f}" font-family="monospace" '
            f'font-size="8">{report.hist_bin_edges[i]:.0f}</text>\n'
        )
    parts.append(
        f'<text x="{left:.1f}" y="{bottom + 30:.1f}" font-family="monospace" '
        f'font-size="11">bin lower edge (tokens); peak count = {peak}</text>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def utilization_svg(report: RunReport) -> str:
    """Scatter of per-trial allocated totals against the capacity line."""
    left, top = _PLOT["left"], _PLOT["top"]
    bottom = top + _PLOT["height"]
    n = len(report.utilization)
    cap = max((c for _, c in report.utilization), default=1) or 1

    parts = [
        _SVG_HEAD.format(w=_SVG_W, h=_SVG_H, tx=left, title="Budget utilization per trial"),
        _axes(),
        f'<line x1="{left:.1f}" y1="{top:.1f}" x2="{left + _PLOT["width"]:.1f}" '
        f'y2="{top:.1f}" stroke="#2ca02c" stroke-width="1" stroke-dasharray="6,4"/>\n'
        f'<text x="{left + _PLOT["width"] - 130:.1f}" y="{top - 6:.1f}" '
        f'font-family="monospace" font-size="10">capacity = {cap}</text>\n',
    ]
    for t, (actual, _) in enumerate(report.utilization):
        x = left + _PLOT["width"] * (t + 0.5) / max(n, 1)
        y = bottom - _PLOT["height"] * actual / cap
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#d62728"/>\n')
    parts.append(
        f'<text x="{left:.1f}" y="{bottom + 18:.1f}" font-family="monospace" '
        f'font-size="11">trial index; dots = allocated tokens, dashed = capacity</text>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def emit_report(report: RunReport, out_dir: Path | str) -> list[Path]:
    """Write the CSV tables and SVG charts into out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        _write(out / SUMMARY_CSV, summary_table(report)),
        _write(out / HISTOGRAM_CSV, histogram_table(report)),
        _write(out / UTILIZATION_CSV, utilization_table(report)),
        _write(out / HISTOGRAM_SVG, histogram_svg(report)),
        _write(out / UTILIZATION_SVG, utilization_svg(report)),
    ]
