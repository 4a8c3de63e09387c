import math

import numpy as np
import pytest

from dec2d import StudyResult, emit_report
from dec2d.report import load_report, loglog_slope


def test_slope_of_power_law():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    s = loglog_slope(h, 3 * h ** 1.5, "m")
    assert s.value == pytest.approx(1.5, abs=1e-12)
    assert s.npoints == 4


def test_slope_exact_and_short():
    assert loglog_slope([1, 0.5, 0.25], [0, 0, 0]).value == "exact"
    assert loglog_slope([1, 0.5], [1, 2]) is None


def test_empty_result_header_only():
    assert emit_report(StudyResult("quality"), "-") == "h,metric,value\n"


def test_json_round_trip(tmp_path):
    r = StudyResult("norms", provenance={"seed": 1})
    for h in (0.4, 0.2, 0.1):
        r.rows.append((h, "k0.x", h ** 2))
    r.fit_slopes()
    emit_report(r, tmp_path / "r.json", "json")
    assert load_report(tmp_path / "r.json") == r


def test_csv_precision_round_trips():
    r = StudyResult("quality", rows=[(0.1, "m", math.pi)])
    text = emit_report(r, "-")
    assert float(text.splitlines()[1].split(",")[2]) == math.pi
