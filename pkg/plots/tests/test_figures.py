"""Rendering behavior: bands, slope annotations, tables, determinism."""

import os

import pytest

from plots.figures import load_style, plot_errors, plot_rates, runtime_table

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
BENCH = os.path.join(FIXTURES, "bench.csv")
POWERLAW = os.path.join(FIXTURES, "powerlaw.csv")

HEADER = "experiment,model,method,k,d,n,rep,seed,w1_error,hellinger,wall_time_s"


class TestPlotErrors:
    def test_two_methods_two_bands(self, tmp_path):
        out = str(tmp_path / "err.svg")
        series = plot_errors(BENCH, "k2c", out)
        assert sorted(series) == ["dmm", "em"]
        svg = open(out, encoding="utf-8").read()
        # each method contributes one shaded band and one line
        assert svg.count('id="band-dmm"') == 1
        assert svg.count('id="band-em"') == 1
        assert 'id="series-dmm"' in svg and 'id="series-em"' in svg
        assert "W1 error" in svg

    def test_empty_hellinger_fields_no_failure(self, tmp_path):
        # the k3b rows carry no hellinger values at all
        out = str(tmp_path / "err.svg")
        series = plot_errors(BENCH, "k3b", out)
        assert os.path.getsize(out) > 0
        assert all(p.mean_hellinger is None
                   for pts in series.values() for p in pts)

    def test_missing_experiment_lists_available(self, tmp_path):
        with pytest.raises(ValueError, match=r"k2c.*k3b"):
            plot_errors(BENCH, "nope", str(tmp_path / "err.svg"))

    def test_empty_csv_reports_none_available(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(HEADER + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="none"):
            plot_errors(str(path), "k2c", str(tmp_path / "err.svg"))

    def test_deterministic_render(self, tmp_path):
        a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
        plot_errors(BENCH, "k2c", a)
        plot_errors(BENCH, "k2c", b)
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_png_output(self, tmp_path):
        a, b = str(tmp_path / "a.png"), str(tmp_path / "b.png")
        plot_errors(BENCH, "k2c", a)
        plot_errors(BENCH, "k2c", b)
        assert open(a, "rb").read() == open(b, "rb").read()
        assert open(a, "rb").read(8)[1:4] == b"PNG"

    def test_style_override_changes_output(self, tmp_path):
        style = tmp_path / "alt.style"
        base = load_style()
        base["color.dmm"] = "#000000"
        style.write_text("\n".join(f"{k} = {v}" for k, v in base.items()),
                         encoding="utf-8")
        a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
        plot_errors(BENCH, "k2c", a)
        plot_errors(BENCH, "k2c", b, style_path=str(style))
        assert open(a, "rb").read() != open(b, "rb").read()

    def test_input_not_mutated(self, tmp_path):
        before = open(BENCH, "rb").read()
        plot_errors(BENCH, "k2c", str(tmp_path / "err.svg"))
        assert open(BENCH, "rb").read() == before


class TestPlotRates:
    def test_powerlaw_slope_annotated(self, tmp_path):
        out = str(tmp_path / "rates.svg")
        with pytest.warns(UserWarning, match="lone"):
            slopes = plot_rates(POWERLAW, out)
        assert abs(slopes[("pl", "dmm")] + 0.25) < 1e-6
        assert "slope -0.250" in open(out, encoding="utf-8").read()

    def test_constant_series_slope_zero(self, tmp_path):
        out = str(tmp_path / "rates.svg")
        with pytest.warns(UserWarning):
            slopes = plot_rates(POWERLAW, out)
        assert abs(slopes[("flat", "em")]) < 1e-12
        assert "slope 0.000" in open(out, encoding="utf-8").read()

    def test_single_point_series_skipped(self, tmp_path):
        with pytest.warns(UserWarning, match="lone/dmm"):
            slopes = plot_rates(POWERLAW, str(tmp_path / "rates.svg"))
        assert ("lone", "dmm") not in slopes

    def test_mixed_series_all_rendered(self, tmp_path):
        out = str(tmp_path / "rates.svg")
        with pytest.warns(UserWarning):
            slopes = plot_rates(POWERLAW, out)
        assert set(slopes) == {("pl", "dmm"), ("flat", "em")}
        svg = open(out, encoding="utf-8").read()
        assert 'id="points-pl-dmm"' in svg and 'id="fit-pl-dmm"' in svg
        assert 'id="points-flat-em"' in svg

    def test_bench_fixture_four_series(self, tmp_path):
        slopes = plot_rates(BENCH, str(tmp_path / "rates.svg"))
        assert set(slopes) == {("k2c", "dmm"), ("k2c", "em"),
                               ("k3b", "dmm"), ("k3b", "em")}


class TestRuntimeTable:
    def test_hand_computed_means(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("\n".join([
            HEADER,
            "e1,e1,dmm,2,5,100,0,7,0.5,,1.0",
            "e1,e1,dmm,2,5,200,0,7,0.4,,3.0",
            "e1,e1,em,2,5,100,0,7,0.5,,0.25",
        ]) + "\n", encoding="utf-8")
        out = str(tmp_path / "t.csv")
        rows = runtime_table(str(path), out)
        assert rows == [("e1", "dmm", 2.0), ("e1", "em", 0.25)]
        lines = open(out, encoding="utf-8").read().splitlines()
        assert lines[0] == "experiment,method,mean_wall_time_s"
        assert lines[1] == "e1,dmm,2"
        assert lines[2] == "e1,em,0.25"

    def test_failed_rows_excluded_from_means(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("\n".join([
            HEADER,
            "e1,e1,dmm,2,5,100,0,7,0.5,,1.0",
            "e1,e1,dmm,2,5,100,1,8,nan,,99.0",
        ]) + "\n", encoding="utf-8")
        rows = runtime_table(str(path), str(tmp_path / "t.csv"))
        assert rows == [("e1", "dmm", 1.0)]

    def test_empty_input_empty_table(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text(HEADER + "\n", encoding="utf-8")
        out = str(tmp_path / "t.csv")
        assert runtime_table(str(path), out) == []
        assert open(out, encoding="utf-8").read() == \
            "experiment,method,mean_wall_time_s\n"

    def test_markdown_output(self, tmp_path):
        out = str(tmp_path / "t.md")
        rows = runtime_table(BENCH, out)
        lines = open(out, encoding="utf-8").read().splitlines()
        assert lines[0] == "| experiment | method | mean_wall_time_s |"
        assert lines[1] == "| --- | --- | --- |"
        assert len(lines) == 2 + len(rows)
        assert lines[2].startswith("| k2c | dmm |")

    def test_input_not_mutated(self, tmp_path):
        before = open(BENCH, "rb").read()
        runtime_table(BENCH, str(tmp_path / "t.csv"))
        assert open(BENCH, "rb").read() == before


class TestLoadStyle:
    def test_committed_style_has_required_keys(self):
        style = load_style()
        for key in ("figsize", "dpi", "band_alpha", "color.dmm",
                    "svg_hashsalt"):
            assert key in style

    def test_bad_line_names_its_number(self, tmp_path):
        path = tmp_path / "s.style"
        path.write_text("figsize = 6,4\nnot a pair\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r":2:"):
            load_style(str(path))
