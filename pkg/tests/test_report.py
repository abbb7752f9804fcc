import csv
import math

from htnfpt.report import loglog_slope, scaling_report


def test_scaling_report_writes_files(tmp_path):
    rows, csv_path, png_path = scaling_report(tmp_path, sizes=(8, 16), repeats=1)
    assert png_path.read_bytes()[:4] == b"\x89PNG"
    with open(csv_path, newline="") as fh:
        got = list(csv.DictReader(fh))
    assert len(got) == len(rows) == 4
    assert {r.solver for r in rows} == {"verify_gpow", "exec_gpow"}
    for solver in ("verify_gpow", "exec_gpow"):
        assert math.isfinite(loglog_slope(rows, solver))
