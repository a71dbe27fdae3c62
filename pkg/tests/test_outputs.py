import numpy as np
import pandas as pd
import pytest
from lxml import etree
from PIL import Image

from src.simulation.capacity import EmpiricalCdf
from src.utils.plot_engine import SVG_NS, LineSeries, _axis, cdf_series, render_png, render_svg
from src.utils.report_writer import format_decimal, read_csv, write_csv, write_json, write_workbook


@pytest.fixture
def table():
    return pd.DataFrame({"alpha": [5.0, 10.0], "sigma": [1 / 3, np.nan], "label": ["a", "b"]})


class TestReportWriter:
    def test_csv_metadata_and_line_endings(self, tmp_path, table):
        path = write_csv(table, tmp_path / "t.csv", {"seed": 0, "trials": 10})
        raw = (tmp_path / "t.csv").read_bytes()
        assert path == str(tmp_path / "t.csv")
        assert raw.startswith(b"# seed: 0\n# trials: 10\nalpha,sigma,label\n")
        assert b"\r" not in raw
        assert b"\n5,0.333333,a\n10,,b\n" in raw

    @pytest.mark.parametrize("value, text", [
        (1 / 60000, "0.0000166667"),
        (60000.0, "60000"),
        (-0.000123456789, "-0.000123457"),
        (0.0, "0"),
        (np.nan, ""),
    ])
    def test_format_decimal(self, value, text):
        assert format_decimal(value) == text

    def test_csv_small_values_without_exponent(self, tmp_path):
        write_csv(pd.DataFrame({"x": [1 / 60000, 2.5e-9]}), tmp_path / "s.csv")
        raw = (tmp_path / "s.csv").read_text(encoding="utf-8")
        assert raw == "x\n0.0000166667\n0.0000000025\n"

    def test_csv_round_trip(self, tmp_path, table):
        write_csv(table, tmp_path / "t.csv", {"seed": 0})
        back = read_csv(tmp_path / "t.csv")
        assert list(back.columns) == ["alpha", "sigma", "label"]
        assert back["alpha"].tolist() == [5.0, 10.0]
        assert np.isnan(back.loc[1, "sigma"])

    def test_creates_directories(self, tmp_path, table):
        write_csv(table, tmp_path / "deep" / "er" / "t.csv")
        assert (tmp_path / "deep" / "er" / "t.csv").exists()

    def test_json(self, tmp_path):
        write_json({"n": 2, "a": [[0.5, 0.0]]}, tmp_path / "d.json")
        text = (tmp_path / "d.json").read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert '  "n": 2' in text

    def test_workbook(self, tmp_path, table):
        long_name = "samples_icc_as-printed_a20000_extra"
        write_workbook({"bound": table, long_name: table}, tmp_path / "r.xlsx")
        sheets = pd.read_excel(tmp_path / "r.xlsx", sheet_name=None, engine="openpyxl")
        assert list(sheets) == ["bound", long_name[:31]]
        assert sheets["bound"]["label"].tolist() == ["a", "b"]

    def test_empty_workbook(self, tmp_path):
        assert write_workbook({}, tmp_path / "r.xlsx") is None
        assert not (tmp_path / "r.xlsx").exists()


class TestPlotEngine:
    def test_cdf_staircase(self):
        series = cdf_series("iid", EmpiricalCdf(((1.0, 0.5), (2.0, 1.0))))
        assert series.xs == (1.0, 1.0, 2.0, 2.0)
        assert series.ys == (0.0, 0.5, 0.5, 1.0)

    def test_axis_covers_values(self):
        lo, hi, ticks = _axis([0.3, 27.0])
        assert lo <= 0.3 and hi >= 27.0
        assert ticks[0] == lo and ticks[-1] == pytest.approx(hi)
        assert np.allclose(np.diff(ticks), ticks[1] - ticks[0])

    def test_axis_single_value(self):
        lo, hi, _ = _axis([3.0, 3.0])
        assert lo < 3.0 < hi

    def test_svg(self, tmp_path):
        series = [LineSeries("iid", (0, 10, 20), (1, 3, 6)), LineSeries("correlated", (0, 10, 20), (0.5, 2, 4))]
        render_svg(series, tmp_path / "p.svg", title="Mean capacity", x_label="SNR (dB)", y_label="bps/Hz")
        root = etree.parse(str(tmp_path / "p.svg")).getroot()
        assert root.tag == f"{{{SVG_NS}}}svg"
        polylines = root.findall(f"{{{SVG_NS}}}polyline")
        assert len(polylines) == 2
        assert len(polylines[0].get("points").split()) == 3
        texts = [el.text for el in root.iter(f"{{{SVG_NS}}}text")]
        assert "Mean capacity" in texts and "iid" in texts and "correlated" in texts

    def test_png(self, tmp_path):
        render_png([LineSeries("iid", (0, 1), (0, 1))], tmp_path / "p.png", title="CDF",
                   x_label="x", y_label="y", y_range=(0.0, 1.0))
        with Image.open(tmp_path / "p.png") as img:
            assert img.size == (720, 480)

    def test_nothing_to_plot(self, tmp_path):
        with pytest.raises(ValueError):
            render_svg([], tmp_path / "p.svg", title="t", x_label="x", y_label="y")
