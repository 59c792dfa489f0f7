import json
from pathlib import Path

import numpy as np
import pytest

from ctrent import report
from ctrent.dependence import MiMatrix
from ctrent.entropy import AlphaEntropy, EntropyAssessment
from ctrent.svgplot import entropy_scatter_svg
from ctrent.trace import parse_wide_csv, write_wide_csv

DATA = Path(__file__).parent / "data"


def golden_doc():
    return report.loads(DATA.joinpath("golden_report.json").read_bytes())


class TestCanonicalJson:
    def test_golden_bytes(self):
        # Re-serializing the parsed golden file must reproduce it exactly.
        blob = DATA.joinpath("golden_report.json").read_bytes()
        assert report.dumps(report.loads(blob)).encode() == blob

    def test_fixed_float_formatting(self):
        assert report.dumps({"x": 0.1}) == '{\n  "x": 0.100000\n}\n'
        assert report.dumps({"x": 1.0}) == '{\n  "x": 1.000000\n}\n'
        assert report.dumps({"x": 2.0000004}) == '{\n  "x": 2.000000\n}\n'

    def test_int_stays_int(self):
        assert report.dumps({"n": 12500}) == '{\n  "n": 12500\n}\n'

    def test_bool_and_none(self):
        assert report.dumps({"a": True, "b": None}) == (
            '{\n  "a": true,\n  "b": null\n}\n'
        )

    def test_numpy_scalars_and_arrays(self):
        doc = {
            "f": np.float64(0.5),
            "i": np.int64(3),
            "arr": np.array([0.25, 0.75]),
            "flag": np.bool_(True),
        }
        text = report.dumps(doc)
        parsed = report.loads(text)
        assert parsed == {"f": 0.5, "i": 3, "arr": [0.25, 0.75], "flag": True}

    def test_key_order_preserved(self):
        a = report.dumps({"z": 1, "a": 2})
        b = report.dumps({"a": 2, "z": 1})
        assert a != b
        assert json.loads(a) == json.loads(b)

    def test_roundtrip_is_identity_on_canonical_reports(self):
        doc = golden_doc()
        assert report.loads(report.dumps(doc)) == doc

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            report.dumps({"x": float("nan")})

    def test_unknown_type_rejected(self):
        with pytest.raises(TypeError):
            report.dumps({"x": object()})

    def test_deterministic_bytes(self):
        doc = golden_doc()
        assert report.dumps(doc) == report.dumps(doc)

    def test_file_helpers(self, tmp_path):
        doc = golden_doc()
        out = tmp_path / "r.json"
        report.dump_report(doc, out)
        assert report.load_report(out) == doc


class TestSections:
    def make_assessment(self):
        return EntropyAssessment(
            counter_id="c1",
            per_alpha={1: AlphaEntropy(7.5, 7.0), 8: AlphaEntropy(7.9, 7.7)},
            robust_h1_bits=7.5,
            robust_hinf_bits=7.0,
            h1_per_bit=0.9375,
            hinf_per_bit=0.875,
            combined_per_bit=1.8125,
        )

    def test_assessment_record_units_in_names(self):
        rec = report.assessment_record(self.make_assessment())
        assert set(rec) == {
            "counter_id", "per_alpha", "robust_h1_bits", "robust_hinf_bits",
            "h1_per_bit", "hinf_per_bit", "combined_per_bit",
        }
        assert rec["per_alpha"][0]["alpha"] == 1

    def test_build_report_section_order(self):
        doc = report.build_report(
            run_meta={"run_id": "r", "counters": 1, "rounds": 9, "sample_interval_ms": 20},
            alphas=(1, 2),
            assessments=[self.make_assessment()],
        )
        assert list(doc) == ["schema_version", "run", "alphas", "assessments"]

    def test_mi_matrix_csv_shape(self):
        matrix = MiMatrix(["a", "b"], np.array([[1.0, 0.25], [0.25, 0.5]]))
        text = report.mi_matrix_csv(matrix).decode()
        lines = text.strip().split("\n")
        assert lines[0] == ",a,b"
        assert lines[1] == "a,1.000000,0.250000"
        assert lines[2] == "b,0.250000,0.500000"


class TestSvg:
    def test_golden_bytes(self):
        points = [("alpha", 0.99816, 0.9375), ("beta", 0.0, 0.0), ("mid", 0.74, 0.38)]
        svg = entropy_scatter_svg(points, title="golden scatter")
        assert svg == DATA.joinpath("golden_scatter.svg").read_text()

    def test_marker_count(self):
        svg = entropy_scatter_svg([("a", 0.5, 0.25), ("b", 1.0, 1.0), ("c", 0.0, 0.0)])
        assert svg.count("<circle") == 3

    def test_corner_and_origin_positions(self):
        svg = entropy_scatter_svg([("top", 1.0, 1.0), ("origin", 0.0, 0.0)])
        # Plot area is 64..496 in both axes with y flipped.
        assert '<circle cx="496.00" cy="64.00"' in svg
        assert '<circle cx="64.00" cy="496.00"' in svg

    def test_diagonal_present(self):
        svg = entropy_scatter_svg([])
        assert 'stroke-dasharray="6,4"' in svg

    def test_id_escaping(self):
        svg = entropy_scatter_svg([("a<&>b", 0.5, 0.5)])
        assert "<title>a&lt;&amp;&gt;b</title>" in svg


class TestCsvGolden:
    def test_csv_roundtrip_golden(self):
        blob = DATA.joinpath("golden_run.csv").read_bytes()
        assert write_wide_csv(parse_wide_csv(blob)) == blob
