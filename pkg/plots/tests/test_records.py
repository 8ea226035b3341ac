"""CSV ingestion and aggregation against hand-computed oracles."""

import math
import os

import numpy as np
import pytest

from plots.records import aggregate, loglog_fit, loglog_slope, read_records

HEADER = "experiment,model,method,k,d,n,rep,seed,w1_error,hellinger,wall_time_s"
FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def _write(tmp_path, rows, name="r.csv"):
    path = tmp_path / name
    path.write_text("\n".join([HEADER, *rows]) + "\n", encoding="utf-8")
    return str(path)


class TestReadRecords:
    def test_round_trip_fields(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,0.25,1.5"])
        (rec,) = read_records(path)
        assert rec.experiment == "e1"
        assert rec.method == "dmm"
        assert rec.n == 100
        assert rec.w1_error == 0.5
        assert rec.hellinger == 0.25
        assert rec.wall_time_s == 1.5

    def test_empty_hellinger_is_none(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,,1.5"])
        (rec,) = read_records(path)
        assert rec.hellinger is None

    def test_header_only_gives_no_records(self, tmp_path):
        assert read_records(_write(tmp_path, [])) == []

    def test_wrong_header_names_line_one(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r":1:"):
            read_records(str(path))

    def test_short_row_names_its_line(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,0.25,1.5",
                                 "e1,e1,dmm,2,5"])
        with pytest.raises(ValueError, match=r":3:"):
            read_records(str(path))

    def test_bad_float_names_its_line(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,oops,,1.5"])
        with pytest.raises(ValueError, match=r":2:"):
            read_records(str(path))

    def test_fixture_parses(self):
        recs = read_records(os.path.join(FIXTURES, "bench.csv"))
        assert len(recs) == 37
        assert any(math.isnan(r.w1_error) for r in recs)


class TestAggregate:
    def test_hand_computed_mean_std(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,0.5,1.0",
                                 "e1,e1,dmm,2,5,100,1,8,0.25,,3.0"])
        agg = aggregate(read_records(path))
        (pt,) = agg[("e1", "dmm")]
        assert pt.n == 100
        assert pt.count == 2
        assert abs(pt.mean_w1 - 0.375) < 1e-15
        # sample std of {0.5, 0.25}: sqrt(2 * 0.125^2 / 1)
        assert abs(pt.std_w1 - math.sqrt(0.03125)) < 1e-15
        assert pt.mean_wall_time_s == 2.0
        # lone hellinger value: mean is the value, spread reports zero
        assert pt.mean_hellinger == 0.5
        assert pt.std_hellinger == 0.0

    def test_single_row_std_zero(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,,1.0"])
        (pt,) = aggregate(read_records(path))[("e1", "dmm")]
        assert pt.count == 1 and pt.std_w1 == 0.0

    def test_no_hellinger_anywhere_is_none(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,,1.0"])
        (pt,) = aggregate(read_records(path))[("e1", "dmm")]
        assert pt.mean_hellinger is None and pt.std_hellinger is None

    def test_failed_rows_dropped(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,100,0,7,0.5,,1.0",
                                 "e1,e1,dmm,2,5,100,1,8,nan,,50.0",
                                 "e1,e1,em,2,5,100,0,7,nan,,1.0"])
        agg = aggregate(read_records(path))
        assert ("e1", "em") not in agg      # every row failed
        (pt,) = agg[("e1", "dmm")]
        assert pt.count == 1
        assert pt.mean_wall_time_s == 1.0   # failed row's time not averaged in

    def test_points_sorted_by_n(self, tmp_path):
        path = _write(tmp_path, ["e1,e1,dmm,2,5,400,0,7,0.25,,1.0",
                                 "e1,e1,dmm,2,5,100,0,7,0.5,,1.0",
                                 "e1,e1,dmm,2,5,200,0,7,0.4,,1.0"])
        pts = aggregate(read_records(path))[("e1", "dmm")]
        assert [p.n for p in pts] == [100, 200, 400]


class TestLoglogFit:
    def test_exact_power_law(self):
        ns = [10, 100, 1000, 10000]
        slope, intercept = loglog_fit(ns, [n ** -0.5 for n in ns])
        assert abs(slope + 0.5) < 1e-12
        assert abs(intercept) < 1e-12

    def test_slope_matches_fit(self):
        ns = [10, 100, 1000]
        means = [0.9, 0.4, 0.2]
        assert loglog_slope(ns, means) == loglog_fit(ns, means)[0]

    def test_single_point_nan(self):
        assert math.isnan(loglog_slope([100], [0.5]))

    def test_nonpositive_and_nonfinite_filtered(self):
        ns = [10, 100, 1000, 10000]
        means = [1.0, 0.0, float("nan"), 0.1]
        # only n=10 and n=10000 survive the filter
        slope = loglog_slope(ns, means)
        expect = (math.log(0.1) - math.log(1.0)) / (math.log(10000) - math.log(10))
        assert abs(slope - expect) < 1e-12
