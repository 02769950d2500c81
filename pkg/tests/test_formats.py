import io
import json
import re
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import voc_xml
from detkit.errors import (
    DetkitError,
    DuplicateClass,
    EmptyLabelMap,
    InvalidBox,
    NotARecordFile,
    ParseError,
    TruncatedRecord,
    UnknownClass,
)
from detkit.formats import (
    NAIRA_CLASSES,
    NAIRA_LABELS,
    Detection,
    GroundTruthObject,
    ImageAnnotation,
    LabelMap,
    RecordEntry,
    RecordFile,
    dump_records,
    parse_det_file,
    parse_gt_file,
    parse_labelmap,
    parse_report,
    parse_voc_annotation,
    read_det_dir,
    read_gt_dir,
    read_records,
    report_to_csv,
    write_det_file,
    write_gt_file,
    write_labelmap,
    write_records,
    write_report,
    write_voc_annotation,
)
from detkit.geometry import BoundingBox
from detkit.results import ClassEval, EvalReport, ThresholdResult
from strategies import annotations, boxes

NAIRA_LABELMAP_TEXT = "10 Naira\n20 Naira\n50 Naira\n100 Naira\n200 Naira\n500 Naira\n1000 Naira\n"


class TestLabelMap:
    def test_naira_block(self):
        lm = parse_labelmap(NAIRA_LABELMAP_TEXT)
        assert lm.classes == NAIRA_CLASSES
        assert lm.id_of("10 Naira") == 0
        assert lm.id_of("1000 Naira") == 6

    def test_blank_lines_skipped(self):
        assert parse_labelmap("A\n\nB\n").classes == ("A", "B")

    def test_crlf_and_padding(self):
        assert parse_labelmap("  A \r\nB\r\n").classes == ("A", "B")

    def test_duplicate(self):
        with pytest.raises(DuplicateClass):
            parse_labelmap("A\nA\n")

    def test_empty(self):
        with pytest.raises(EmptyLabelMap):
            parse_labelmap("\n  \n")

    def test_unknown_lookup(self):
        with pytest.raises(UnknownClass):
            parse_labelmap("A\n").id_of("B")

    @given(st.lists(st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp", "Zs")), min_size=1), min_size=1, unique=True))
    def test_round_trip(self, names):
        lm = LabelMap(tuple(names))
        assert parse_labelmap(write_labelmap(lm)) == lm


class TestVoc:
    def test_minimal(self, labels):
        ann = parse_voc_annotation(voc_xml([("10 Naira", (10, 10, 50, 50))]), labels)
        assert ann == ImageAnnotation(
            "img001", 100, 100, 3, (GroundTruthObject(0, BoundingBox(10, 10, 50, 50), False),)
        )

    def test_difficult(self, labels):
        ann = parse_voc_annotation(voc_xml([("10 Naira", (10, 10, 50, 50), 1)]), labels)
        assert ann.objects[0].difficult is True

    def test_unknown_class(self, labels):
        with pytest.raises(UnknownClass) as e:
            parse_voc_annotation(voc_xml([("Euro", (10, 10, 50, 50))]), labels)
        assert e.value.name == "Euro"

    def test_malformed_reports_line(self, labels):
        with pytest.raises(ParseError) as e:
            parse_voc_annotation(b"<annotation>\n<filename>x</filename>\n<size>\n</annotation>", labels)
        assert e.value.line == 4

    @pytest.mark.parametrize("box", [(10, 10, 100, 50), (50, 10, 10, 50), (-1, 0, 5, 5)])
    def test_invalid_box(self, labels, box):
        with pytest.raises(InvalidBox):
            parse_voc_annotation(voc_xml([("10 Naira", box)]), labels)

    def test_non_integer_coordinate(self, labels):
        with pytest.raises(ParseError):
            parse_voc_annotation(voc_xml([("10 Naira", ("a", 1, 2, 3))]), labels)

    def test_missing_size(self, labels):
        with pytest.raises(ParseError):
            parse_voc_annotation(b"<annotation><filename>a.jpg</filename></annotation>", labels)

    def test_empty_round_trip(self, labels):
        ann = ImageAnnotation("blank", 64, 48, 3, ())
        xml = write_voc_annotation(ann, labels)
        assert b"<object>" not in xml
        assert parse_voc_annotation(xml, labels) == ann

    def test_all_classes_round_trip(self, labels):
        objs = tuple(
            GroundTruthObject(i, BoundingBox(i * 10, i * 5, i * 10 + 9, i * 5 + 20), i % 2 == 0) for i in range(7)
        )
        ann = ImageAnnotation("all", 320, 320, 3, objs)
        assert parse_voc_annotation(write_voc_annotation(ann, labels), labels) == ann

    @given(annotations())
    def test_round_trip(self, ann):
        assert parse_voc_annotation(write_voc_annotation(ann, NAIRA_LABELS), NAIRA_LABELS) == ann


class TestTextFiles:
    def test_detection_line(self, labels):
        (d,) = parse_det_file("10 Naira 0.93 12 8 200 110\n", "img", labels)
        assert d == Detection("img", 0, 0.93, BoundingBox(12, 8, 200, 110))

    def test_difficult_gt(self, labels):
        (g,) = parse_gt_file("1000 Naira 5 5 60 60 difficult\n", "img", labels)
        assert g == GroundTruthObject(6, BoundingBox(5, 5, 60, 60), True)

    def test_confidence_out_of_range(self, labels):
        with pytest.raises(ParseError) as e:
            parse_det_file("10 Naira 0.5 0 0 1 1\n10 Naira 1.5 0 0 1 1\n", "img", labels)
        assert e.value.line == 2

    @pytest.mark.parametrize(
        "line",
        [
            "10 Naira 0 0 1",  # arity
            "10 Naira 0 0 1 x",  # non-numeric
            "0 0 1 1",  # no name
            "Euro 0 0 1 1",  # unknown
            "10 Naira 5 0 1 1",  # inverted
        ],
    )
    def test_gt_rejects(self, labels, line):
        with pytest.raises(ParseError) as e:
            parse_gt_file(line + "\n", "img", labels)
        assert e.value.line == 1

    @pytest.mark.parametrize("conf", ["nan", "inf", "-0.1", "abc"])
    def test_det_rejects_confidence(self, labels, conf):
        with pytest.raises(ParseError):
            parse_det_file(f"10 Naira {conf} 0 0 1 1", "img", labels)

    def test_unknown_class_is_line_numbered(self, labels):
        with pytest.raises(UnknownClass) as e:
            parse_det_file("\n\nEuro 0.5 0 0 1 1", "img", labels)
        assert e.value.line == 3

    def test_crlf(self, labels):
        assert len(parse_gt_file("10 Naira 1 1 2 2\r\n20 Naira 1 1 2 2\r\n", "i", labels)) == 2

    def test_order_preserved(self, labels):
        text = "10 Naira 0.1 0 0 1 1\n10 Naira 0.9 0 0 1 1\n10 Naira 0.5 0 0 1 1\n"
        assert [d.confidence for d in parse_det_file(text, "i", labels)] == [0.1, 0.9, 0.5]

    def test_single_token_class(self):
        lm = LabelMap(("cat", "difficult dog"))
        (g,) = parse_gt_file("difficult dog 1 2 3 4 difficult", "i", lm)
        assert (g.class_id, g.difficult) == (1, True)

    @given(
        st.lists(st.tuples(st.integers(0, 6), boxes(500), st.booleans()), max_size=20),
    )
    def test_gt_round_trip(self, items):
        objs = [GroundTruthObject(c, b, d) for c, b, d in items]
        assert parse_gt_file(write_gt_file(objs, NAIRA_LABELS), "x", NAIRA_LABELS) == objs

    @given(st.lists(st.tuples(st.integers(0, 6), st.floats(0, 1), boxes(500)), max_size=20))
    def test_det_round_trip(self, items):
        dets = [Detection("x", c, p, b) for c, p, b in items]
        assert parse_det_file(write_det_file(dets, NAIRA_LABELS), "x", NAIRA_LABELS) == dets

    def test_dirs(self, synthetic_root, labels):
        gts = read_gt_dir(synthetic_root / "ground_truth", labels)
        dets = read_det_dir(synthetic_root / "detection_results", labels)
        assert len(gts) == 40
        assert sum(map(len, gts.values())) == 160
        assert len(dets) == 226

    def test_dir_error_names_file(self, tmp_path, labels):
        (tmp_path / "bad.txt").write_text("10 Naira 1 1\n")
        with pytest.raises(ParseError, match="bad.txt"):
            read_gt_dir(tmp_path, labels)


def _entry(image_id="a", w=4, h=3, objs=(), image=b"\x89PNG fake", enc="png"):
    return RecordEntry(ImageAnnotation(image_id, w, h, 3, tuple(objs)), image, enc)


class TestRecords:
    def test_empty_is_header(self):
        assert write_records(RecordFile()) == b"DREC\x01"
        assert read_records(b"DREC\x01") == RecordFile()

    def test_one_entry_round_trip(self):
        r = RecordFile((_entry(objs=[GroundTruthObject(2, BoundingBox(0, 0, 3, 2), True)]),))
        assert read_records(write_records(r)) == r

    def test_layout(self):
        data = write_records(RecordFile((_entry(image=b"xyz"),)))
        (meta_len,) = struct.unpack_from("<I", data, 5)
        meta = json.loads(data[9 : 9 + meta_len])
        assert list(meta) == ["image_id", "width", "height", "depth", "encoding", "objects"]
        (img_len,) = struct.unpack_from("<I", data, 9 + meta_len)
        assert img_len == 3 and data[13 + meta_len :] == b"xyz"

    def test_bad_magic(self):
        with pytest.raises(NotARecordFile):
            read_records(b"XREC\x01")

    def test_bad_version(self):
        with pytest.raises(NotARecordFile):
            read_records(b"DREC\x02")

    def test_truncated(self):
        data = write_records(RecordFile((_entry("a"), _entry("b"))))
        first_len = len(write_records(RecordFile((_entry("a"),))))
        for cut in (first_len + 2, first_len + 10, len(data) - 1):
            with pytest.raises(TruncatedRecord) as e:
                read_records(data[:cut])
            assert e.value.offset == first_len

    def test_stream(self):
        r = RecordFile((_entry("a"), _entry("b", enc="jpeg")))
        buf = io.BytesIO()
        dump_records(r, buf)
        buf.seek(0)
        assert read_records(buf) == r

    @given(st.lists(st.tuples(annotations(), st.binary(max_size=64), st.sampled_from(["png", "jpeg"])), max_size=5))
    def test_round_trip(self, items):
        r = RecordFile(tuple(RecordEntry(a, img, enc) for a, img, enc in items))
        data = write_records(r)
        assert read_records(data) == r
        assert write_records(read_records(data)) == data


def _report(map_value=1.0, sweep=()):
    c = ClassEval(0, "10 Naira", map_value, 3, 0, 3, 1e-10)
    return EvalReport(0.5, (c,), map_value, tuple(ThresholdResult(t, (), m) for t, m in sweep))


class TestReport:
    def test_single_class_json(self):
        data = write_report(_report())
        assert b'"map": 1.000000' in data
        obj = json.loads(data)
        assert list(obj) == ["iou_threshold", "classes", "map", "sweep"]
        assert list(obj["classes"][0]) == ["name", "ap", "tp", "fp", "n_gt", "lamr"]

    def test_csv_sweep_row(self):
        csv_text = report_to_csv(_report(0.9711, [(0.55, 0.9711), (0.6, 0.9697)])).decode()
        assert "0.55,0.971100,97.11%" in csv_text.splitlines()
        assert "0.60,0.969700,96.97%" in csv_text.splitlines()

    def test_csv_rows(self):
        lines = report_to_csv(_report(0.9, [(0.55, 0.9), (0.6, 0.8)])).decode().splitlines()
        assert lines[0] == "class,ap,tp,fp,n_gt,lamr"
        assert lines[1].startswith("10 Naira,0.900000,3,0,3,")
        assert lines[3] == "threshold,map,map_pct"
        assert len(lines) == 6

    def test_reserialize_is_identical(self):
        data = write_report(_report(0.123456789, [(0.55, 0.3), (0.95, 0.1)]))
        assert write_report(parse_report(data)) == data

    def test_absent_lamr(self):
        r = EvalReport(0.5, (ClassEval(0, "A", 0.0, 0, 2, 0, None),), 0.0)
        data = write_report(r)
        assert b'"lamr": null' in data
        assert parse_report(data).classes[0].lamr is None

    def test_bad_report(self):
        with pytest.raises(ParseError):
            parse_report(b"{}")

    def test_sweep_must_increase(self):
        with pytest.raises(ValueError):
            _report(sweep=[(0.6, 1.0), (0.55, 1.0)])


_VALID_GT = ["10 Naira", "5", "6", "40", "50"]
_VALID_DET = ["10 Naira", "0.75", "5", "6", "40", "50"]
_BAD_VALUES = ["-1", "x", "1.5", "", "nan", "Euro", "99999999999999999999x"]


_GT_CASES = [(f, bad) for f in range(5) for bad in _BAD_VALUES]
# "2" is a legal box coordinate, so it only corrupts the confidence slot
_DET_CASES = [(f, bad) for f in range(6) for bad in _BAD_VALUES + ["2"] if not (f >= 2 and bad == "2")]


@pytest.mark.parametrize("field, bad", _GT_CASES)
def test_gt_single_field_corruption(labels, field, bad):
    tokens = list(_VALID_GT)
    tokens[field] = bad
    with pytest.raises(ParseError):
        parse_gt_file(" ".join(tokens), "i", labels)


@pytest.mark.parametrize("field, bad", _DET_CASES)
def test_det_single_field_corruption(labels, field, bad):
    tokens = list(_VALID_DET)
    tokens[field] = bad
    with pytest.raises(ParseError):
        parse_det_file(" ".join(tokens), "i", labels)


_VOC_FIELDS = {
    "width": [b"0", b"-3", b"x", b""],
    "height": [b"0", b"x"],
    "name": [b"Euro", b""],
    "difficult": [b"2", b"yes"],
    "xmin": [b"-1", b"60", b"a"],
    "ymin": [b"-1", b"60"],
    "xmax": [b"100", b"4", b"1.5"],
    "ymax": [b"100", b"4"],
}


@pytest.mark.parametrize(
    "tag, bad", [(tag, bad) for tag, values in _VOC_FIELDS.items() for bad in values]
)
def test_voc_single_field_corruption(labels, tag, bad):
    xml = voc_xml([("10 Naira", (5, 6, 40, 50), 0)])
    parse_voc_annotation(xml, labels)  # the unmutated fixture is valid
    mutated = re.sub(rb"<%s>[^<]*</%s>" % (tag.encode(), tag.encode()), b"<%s>%s</%s>" % (tag.encode(), bad, tag.encode()), xml, count=1)
    assert mutated != xml
    with pytest.raises(DetkitError):
        parse_voc_annotation(mutated, labels)
