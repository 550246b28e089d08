"""Indexed numeric series shared by the scanning modules."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field


@dataclass
class ScanSeries:
    """Points ``(parameter value, value)`` with strictly increasing parameters."""

    parameter: str
    points: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        xs = [x for x, _ in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"{self.parameter} values must be strictly increasing")

    @property
    def xs(self):
        return [x for x, _ in self.points]

    @property
    def ys(self):
        return [y for _, y in self.points]

    def to_json(self) -> dict:
        pts = []
        for x, y in self.points:
            if isinstance(y, complex):
                pts.append([x, y.real, y.imag])
            else:
                pts.append([x, y])
        return {"parameter": self.parameter, "points": pts, "metadata": self.metadata}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cplx = any(isinstance(y, complex) for y in self.ys)
        w.writerow([self.parameter, "re", "im"] if cplx else [self.parameter, "value"])
        for x, y in self.points:
            if cplx:
                y = complex(y)
                w.writerow([x, repr(y.real), repr(y.imag)])
            else:
                w.writerow([x, repr(float(y))])
        return buf.getvalue()
