import json

import pytest

from forgetmaps.cli import main
from forgetmaps.files import read_catalog, read_result_records


def test_enumerate_writes_catalog(tmp_path, capsys):
    out = tmp_path / "k6-int.jsonl"
    assert main(["enumerate", "--points", "6", "--max-den", "10", "--mode", "int", "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    assert "6 points" in summary
    with open(out) as handle:
        entries = read_catalog(handle)
    assert ((3, 3, 3, 3, 3, 1), 8) in {(e.numerators(), e.lcd) for e in entries}


def test_enumerate_rejects_bad_points(tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["enumerate", "--points", "3", "--max-den", "10", "--out", str(tmp_path / "x")])
    assert err.value.code == 2


def test_enumerate_unwritable_path(tmp_path):
    code = main(
        ["enumerate", "--points", "4", "--max-den", "4", "--out", str(tmp_path / "no" / "dir" / "x")]
    )
    assert code == 2


def test_classify_three_to_one(tmp_path, capsys):
    src = tmp_path / "k6.jsonl"
    tgt = tmp_path / "k4.jsonl"
    out = tmp_path / "maps.jsonl"
    assert main(["enumerate", "--points", "6", "--max-den", "42", "--out", str(src)]) == 0
    assert main(["enumerate", "--points", "4", "--max-den", "84", "--out", str(tgt)]) == 0
    code = main(
        [
            "classify",
            "--src", str(src),
            "--tgt", str(tgt),
            "--out", str(out),
            "--source-dim", "3",
            "--target-dim", "1",
            "--cocompact-only",
            "--stage", "full",
        ]
    )
    assert code == 0
    with open(out) as handle:
        rows = read_result_records(handle)
    assert len(rows) == 2
    targets = {tuple(r["target"]["num"]) for r in rows}
    assert targets == {(5, 5, 5, 1), (7, 3, 3, 3)}
    for row in rows:
        assert row["dual_partner"] is not None
        assert tuple(row["dual_partner"]["num"]) in targets - {tuple(row["target"]["num"])}


def test_classify_divisibility_stage_notes_smooth_failure(tmp_path):
    src = tmp_path / "k6.jsonl"
    tgt = tmp_path / "k5.jsonl"
    out = tmp_path / "maps.jsonl"
    main(["enumerate", "--points", "6", "--max-den", "42", "--out", str(src)])
    main(["enumerate", "--points", "5", "--max-den", "42", "--out", str(tgt)])
    code = main(
        [
            "classify",
            "--src", str(src),
            "--tgt", str(tgt),
            "--out", str(out),
            "--source-dim", "3",
            "--target-dim", "2",
            "--cocompact-only",
            "--stage", "divisibility",
        ]
    )
    assert code == 0
    with open(out) as handle:
        rows = read_result_records(handle)
    assert len(rows) == 1
    row = rows[0]
    assert tuple(row["source"]["num"]) == (6, 3, 3, 3, 3, 2)
    assert tuple(row["target"]["num"]) == (8, 3, 3, 3, 3)
    combos = [c for m in row["maps"] for c in m["combos"]]
    assert combos and all(c["divisibility"] and not c["smooth_locus"] for c in combos)
    witnesses = [w for c in combos for w in c["witnesses"]]
    assert any(w[0] == "smooth_locus" for w in witnesses)


def test_classify_missing_catalog(tmp_path):
    code = main(
        [
            "classify",
            "--src", str(tmp_path / "absent.jsonl"),
            "--tgt", str(tmp_path / "absent.jsonl"),
            "--out", str(tmp_path / "out.jsonl"),
        ]
    )
    assert code == 2


def test_full_scan_other_dimension_pair_is_empty(tmp_path):
    src = tmp_path / "k7.jsonl"
    tgt = tmp_path / "k5.jsonl"
    out = tmp_path / "maps.jsonl"
    main(["enumerate", "--points", "7", "--max-den", "42", "--out", str(src)])
    main(["enumerate", "--points", "5", "--max-den", "42", "--out", str(tgt)])
    code = main(
        [
            "classify",
            "--src", str(src),
            "--tgt", str(tgt),
            "--out", str(out),
            "--source-dim", "4",
            "--target-dim", "2",
            "--cocompact-only",
            "--stage", "full",
        ]
    )
    assert code == 0
    with open(out) as handle:
        assert read_result_records(handle) == []


def test_inclusions_table(tmp_path, capsys):
    out = tmp_path / "edges.jsonl"
    code = main(["inclusions", "--weights", "3,3,3,3,3,1", "--den", "8", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert printed.startswith("25 hyperbolic contractions")
    assert printed.count("[INT]") == 25
    with open(out) as handle:
        edges = [json.loads(line) for line in handle if line.strip()]
    assert len(edges) == 25
    assert all(edge["int"] for edge in edges)

    assert main(["inclusions", "--weights", "2,2,2,2,2", "--den", "5"]) == 0
    assert "10 hyperbolic contractions" in capsys.readouterr().out


def test_inclusions_invalid_weights(capsys):
    code = main(["inclusions", "--weights", "1,1,1,1", "--den", "3"])
    assert code == 2
    assert "sum" in capsys.readouterr().err
