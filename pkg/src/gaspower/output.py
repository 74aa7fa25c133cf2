"""Result persistence: one CSV per recorded quantity, optional SVG plots.

CSV values are written with ``repr`` so doubles round-trip exactly and runs
are bitwise reproducible. The SVG writer is a self-contained polyline plot
(deterministic output, no plotting dependency).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError


@dataclass
class TimeSeriesOutput:
    """Samples of one scalar quantity over time."""

    quantity: str
    times: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def append(self, t: float, value: float) -> None:
        if self.times and t <= self.times[-1]:
            raise DomainError(
                f"{self.quantity}: sample times must strictly increase "
                f"({t!r} after {self.times[-1]!r})"
            )
        self.times.append(float(t))
        self.values.append(float(value))


@dataclass
class ProfileOutput:
    """Density profile of one pipe at a fixed time."""

    quantity: str
    x: np.ndarray
    rho: np.ndarray


def _safe_filename(quantity: str) -> str:
    return "".join(c if c.isalnum() or c in "@_.-" else "_" for c in quantity)


def write_timeseries(outputs, directory, svg: bool = False) -> list[Path]:
    """Write one CSV per output into ``directory``; return the paths.

    Time series get a ``t,value`` header, profiles ``x,rho``. Duplicate
    quantity ids are rejected.
    """
    outputs = list(outputs)
    if not outputs:
        raise DomainError("no outputs to write")
    names = [o.quantity for o in outputs]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DomainError(f"duplicate output quantities: {dupes}")
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DomainError(f"cannot create output directory {directory}: {exc}")

    written = []
    for out in outputs:
        target = directory / f"{_safe_filename(out.quantity)}.csv"
        if isinstance(out, ProfileOutput):
            header = "x,rho"
            columns = (np.asarray(out.x, dtype=float),
                       np.asarray(out.rho, dtype=float))
        else:
            header = "t,value"
            columns = (np.asarray(out.times, dtype=float),
                       np.asarray(out.values, dtype=float))
        lines = [header]
        lines += [f"{float(a)!r},{float(b)!r}" for a, b in zip(*columns)]
        try:
            target.write_text("\n".join(lines) + "\n")
        except OSError as exc:
            raise DomainError(f"cannot write {target}: {exc}")
        written.append(target)
        if svg:
            svg_path = target.with_suffix(".svg")
            svg_path.write_text(_render_svg(out.quantity, *columns, header))
            written.append(svg_path)
    return written


def _render_svg(title: str, xs, ys, header: str,
                width: int = 640, height: int = 400) -> str:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    pad = 50
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)
    points = " ".join(
        f"{pad + (x - x0) * sx:.2f},{height - pad - (y - y0) * sy:.2f}"
        for x, y in zip(xs, ys)
    )
    x_label, y_label = header.split(",")
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        f'stroke="black"/>\n'
        f'<text x="{width - pad}" y="{height - pad + 30}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{x_label} '
        f'[{x0:.6g} .. {x1:.6g}]</text>\n'
        f'<text x="{pad}" y="{pad - 8}" font-family="sans-serif" '
        f'font-size="11">{y_label} [{y0:.6g} .. {y1:.6g}]</text>\n'
        f'<polyline points="{points}" fill="none" stroke="#4063d8" '
        f'stroke-width="1.5"/>\n</svg>\n'
    )
