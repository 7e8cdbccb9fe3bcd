"""Plain-text Gantt charts and static SVG timelines for schedules."""

from __future__ import annotations

from fractions import Fraction

from .evaluate import ConnectivityProfile, Schedule
from .model import Instance, rat_str


def _cell_covered(intervals, lo: Fraction, hi: Fraction) -> bool:
    mid = (lo + hi) / 2
    return any(a <= mid < b for a, b in intervals)


def text_gantt(instance: Instance, schedule: Schedule, profile: ConnectivityProfile, width: int = 60) -> str:
    """One row per edge plus a connectivity row; cells sampled at midpoints."""
    T = instance.horizon
    if T == 0:
        return "(empty horizon)"
    label_w = max([len(e.id) for e in instance.edges] + [len("connected")]) + 1
    cells = [(T * i / width, T * (i + 1) / width) for i in range(width)]
    lines = [f"{'':<{label_w}}0{'':{width - 2}}{rat_str(T)}"]
    for e in instance.edges:
        ivs = schedule.intervals(e.id).intervals
        row = "".join("#" if _cell_covered(ivs, lo, hi) else "." for lo, hi in cells)
        lines.append(f"{e.id:<{label_w}}{row}")
    conn_cells = []
    for lo, hi in cells:
        mid = (lo + hi) / 2
        flag = next((ok for a, b, ok in profile.atoms if a <= mid < b), True)
        conn_cells.append("=" if flag else "x")
    lines.append(f"{'connected':<{label_w}}{''.join(conn_cells)}")
    lines.append(
        f"connected {rat_str(profile.connected_time)}, disconnected {rat_str(profile.disconnected_time)}"
    )
    return "\n".join(lines)


def svg_timeline(instance: Instance, schedule: Schedule, profile: ConnectivityProfile, width: int = 720) -> str:
    """Static SVG: per-edge rows (window band + maintenance blocks) and a
    connectivity strip at the bottom."""
    T = instance.horizon
    row_h, gap, label_w = 18, 4, 90
    n = len(instance.edges)
    height = (n + 2) * (row_h + gap) + 30

    def x(t: Fraction) -> float:
        return label_w + float(t / T * (width - label_w - 10)) if T else label_w

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">'
    ]
    for idx, e in enumerate(instance.edges):
        y = 10 + idx * (row_h + gap)
        parts.append(f'<text x="4" y="{y + 12}">{e.id}</text>')
        parts.append(
            f'<rect x="{x(e.release):.1f}" y="{y}" width="{x(e.deadline) - x(e.release):.1f}" '
            f'height="{row_h}" fill="#dce9f5"/>'
        )
        for a, b in schedule.intervals(e.id).intervals:
            parts.append(
                f'<rect x="{x(a):.1f}" y="{y}" width="{max(x(b) - x(a), 0.5):.1f}" '
                f'height="{row_h}" fill="#4a78a8"/>'
            )
    y = 10 + n * (row_h + gap) + 8
    parts.append(f'<text x="4" y="{y + 12}">connected</text>')
    for a, b, ok in profile.atoms:
        color = "#64b564" if ok else "#c85a54"
        parts.append(
            f'<rect x="{x(a):.1f}" y="{y}" width="{max(x(b) - x(a), 0.5):.1f}" '
            f'height="{row_h}" fill="{color}"/>'
        )
    y += row_h + 16
    parts.append(
        f'<text x="4" y="{y}">connected {rat_str(profile.connected_time)} / '
        f'{rat_str(instance.horizon)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
