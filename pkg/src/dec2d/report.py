"""Study results, log-log slope fits and CSV/JSON emission."""
import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import ConfigError

__all__ = ["Slope", "StudyResult", "loglog_slope", "emit_report", "load_report"]


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class Slope:
    metric: str
    value: object          # float, or "exact" when every value is zero
    ci95: float = math.nan  # half-width of the 95% confidence interval
    npoints: int = 0


def loglog_slope(h, values, metric=""):
    """Least-squares slope of log(value) against log(h).

    Exact zeros are dropped; if every value is zero the slope is ``"exact"``.
    Returns None when fewer than three usable points remain.
    """
    h = np.asarray(h, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    if v.size and np.all(v == 0):
        return Slope(metric, "exact", math.nan, int(v.size))
    keep = (v > 0) & (h > 0) & np.isfinite(v)
    if keep.sum() < 3:
        return None
    x, y = np.log(h[keep]), np.log(v[keep])
    fit = stats.linregress(x, y)
    n = int(keep.sum())
    ci = float(stats.t.ppf(0.975, n - 2) * fit.stderr) if n > 2 else math.nan
    return Slope(metric, float(fit.slope), ci, n)


@dataclass
class StudyResult:
    """Rows of ``(h, metric, value)`` plus fitted slopes and provenance."""
    study: str
    rows: list = field(default_factory=list)
    slopes: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, h, metric, value):
        self.rows.append((float(h), str(metric), value))

    def metrics(self):
        seen = []
        for _, m, _ in self.rows:
            if m not in seen:
                seen.append(m)
        return seen

    def series(self, metric):
        """(h array, value array) for one metric, ordered by decreasing h."""
        pts = sorted(((h, v) for h, m, v in self.rows if m == metric),
                     key=lambda t: -t[0])
        return (np.array([p[0] for p in pts], dtype=float),
                np.array([float(p[1]) for p in pts], dtype=float))

    def value(self, metric, h=None):
        for hh, m, v in self.rows:
            if m == metric and (h is None or hh == h):
                return v
        raise KeyError(metric)

    def slope(self, metric):
        for s in self.slopes:
            if s.metric == metric:
                return s.value
        raise KeyError(metric)

    def fit_slopes(self, metrics=None):
        """Fit slopes for metrics with at least three levels."""
        self.slopes = []
        for m in metrics if metrics is not None else self.metrics():
            h, v = self.series(m)
            if len(h) < 3:
                continue
            s = loglog_slope(h, v, m)
            if s is not None:
                self.slopes.append(s)
        return self.slopes

    def sort_rows(self):
        order = {m: i for i, m in enumerate(self.metrics())}
        self.rows.sort(key=lambda r: (-r[0], order[r[1]]))
        return self

    def to_dict(self):
        return {
            "study": self.study,
            "provenance": self.provenance,
            "rows": [{"h": _fmt(h), "metric": m, "value": _fmt(v)} for h, m, v in self.rows],
            "slopes": [{"metric": s.metric, "value": _fmt(s.value),
                        "ci95": _fmt(s.ci95), "npoints": s.npoints} for s in self.slopes],
        }

    @classmethod
    def from_dict(cls, doc):
        def num(s):
            return s if s == "exact" else float(s)
        rows = [(float(r["h"]), r["metric"], num(r["value"])) for r in doc["rows"]]
        slopes = [Slope(s["metric"], num(s["value"]), float(s["ci95"]), int(s["npoints"]))
                  for s in doc["slopes"]]
        return cls(doc["study"], rows, slopes, doc.get("provenance", {}))

    def __eq__(self, other):
        if not isinstance(other, StudyResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _csv_text(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["h", "metric", "value"])
    for h, m, v in result.rows:
        w.writerow([_fmt(h), m, _fmt(v)])
    for s in result.slopes:
        w.writerow(["slope", s.metric, _fmt(s.value)])
    return buf.getvalue()


def emit_report(result, path, fmt="csv"):
    """Write a :class:`StudyResult` as CSV or JSON; ``path='-'`` returns the text."""
    fmt = str(fmt).lower()
    if fmt == "csv":
        text = _csv_text(result)
    elif fmt == "json":
        text = json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n"
    else:
        raise ConfigError(f"format: expected csv or json, got {fmt!r}")
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return Path(path)


def load_report(path):
    """Read a JSON report back into a :class:`StudyResult`."""
    return StudyResult.from_dict(json.loads(Path(path).read_text()))
