"""Bullseye layout for a word's yearly drift relative to a base year.

The radial channel is exact: radius = 1 - cosine(base vector, year vector).
Only the angle is a projection artifact, taken from the top-2 principal
components of the mean-centered trajectory. Deterministic sign convention:
the first component is oriented so the final year has a non-negative first
coordinate, the second so the final year has a non-negative second
coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .metrics import WordTrajectory, cosine

RING_RADII = (0.25, 0.5, 0.75, 1.0)
_SCALE = 100.0  # svg px per unit radius
_CENTER = 130.0
_SIZE = 260.0


@dataclass(frozen=True)
class BullseyePoint:
    year: int
    radius: float  # 1 - cosine to the base year, in [0, 2]
    angle: float  # radians in [0, 2*pi)


@dataclass(frozen=True)
class BullseyeFrame:
    word: str
    base_year: int
    points: tuple[BullseyePoint, ...]


def bullseye(traj: WordTrajectory, base_year: int) -> BullseyeFrame:
    """Radial drift layout for one word, centered on the base year."""
    if base_year not in traj.years:
        raise DataError(f"base year {base_year} not in trajectory years {traj.years}")
    base_vec = traj.vectors[traj.years.index(base_year)]

    stacked = np.vstack(traj.vectors)
    centered = stacked - stacked.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = np.zeros((2, stacked.shape[1]))
    comps[: min(2, vt.shape[0])] = vt[:2]
    proj = centered @ comps.T
    if proj[-1, 0] < 0:
        proj[:, 0] *= -1
    if proj[-1, 1] < 0:
        proj[:, 1] *= -1

    points = []
    for i, year in enumerate(traj.years):
        radius = 0.0 if year == base_year else 1.0 - cosine(base_vec, traj.vectors[i])
        angle = math.atan2(proj[i, 1], proj[i, 0]) % (2.0 * math.pi)
        points.append(BullseyePoint(year=year, radius=radius, angle=angle))
    return BullseyeFrame(word=traj.word, base_year=base_year, points=tuple(points))


def frame_csv(frame: BullseyeFrame) -> str:
    lines = ["year,radius,angle"]
    for p in frame.points:
        lines.append(f"{p.year},{p.radius:.12g},{p.angle:.12g}")
    return "\n".join(lines) + "\n"


def frame_svg(frame: BullseyeFrame) -> str:
    """Concentric reference rings plus one labeled point per year."""
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SIZE:.0f}" height="{_SIZE:.0f}" '
        f'viewBox="0 0 {_SIZE:.0f} {_SIZE:.0f}">',
        f'<title>{frame.word} drift from {frame.base_year}</title>',
    ]
    for r in RING_RADII:
        parts.append(
            f'<circle cx="{_CENTER:.1f}" cy="{_CENTER:.1f}" r="{r * _SCALE:.1f}" '
            'fill="none" stroke="#cccccc" stroke-width="1"/>'
        )
    parts.append(
        f'<circle cx="{_CENTER:.1f}" cy="{_CENTER:.1f}" r="2.0" fill="#888888"/>'
    )
    for p in frame.points:
        x = _CENTER + p.radius * _SCALE * math.cos(p.angle)
        y = _CENTER - p.radius * _SCALE * math.sin(p.angle)
        parts.append(f'<circle cx="{x:.6f}" cy="{y:.6f}" r="3.0" fill="#1f6fb2"/>')
        parts.append(
            f'<text x="{x + 5.0:.6f}" y="{y - 5.0:.6f}" font-size="9" '
            f'font-family="sans-serif">{p.year}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(frame: BullseyeFrame, path: str | Path) -> None:
    """Write <path>.svg and <path>.csv for the frame.

    `path` is the stem; both outputs are byte-identical across runs for
    identical input.
    """
    stem = Path(path)
    try:
        stem.with_suffix(".svg").write_text(frame_svg(frame), encoding="utf-8")
        stem.with_suffix(".csv").write_text(frame_csv(frame), encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot write bullseye output at {stem}: {e}") from e
