import json

import numpy as np
import pytest

from histpack.cli import main
from histpack.histogram import SequenceLengthHistogram, histogram_to_csv
from histpack.metrics import REPORT_HEADER

HEADER = ",".join(REPORT_HEADER)


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return [line.split(",") for line in text.strip().splitlines()[1:]]


@pytest.fixture
def halves(tmp_path):
    path = tmp_path / "halves.csv"
    path.write_text(histogram_to_csv(SequenceLengthHistogram.from_mapping({256: 100}, 512)))
    return path


def test_histogram_from_text_and_u32(tmp_path, capsys):
    text = tmp_path / "l.txt"
    text.write_text("3\n5\n7\n")
    raw = tmp_path / "l.u32"
    raw.write_bytes(np.array([3, 5, 7], dtype="<u4").tobytes())
    code, out_text, err = run(capsys, "histogram", str(text), "--max-len", "8")
    assert code == 0
    assert "sequences=3" in err
    assert sum(int(c) for _, c in rows(out_text)) == 3
    code, out_raw, _ = run(capsys, "histogram", str(raw), "--max-len", "8", "--format", "u32")
    assert out_raw == out_text


def test_histogram_summary_goes_to_stdout_with_out(tmp_path, capsys):
    target = tmp_path / "h.json"
    code, out, _ = run(capsys, "--out", str(target), "--json", "--seed", "7",
                       "histogram", "--synthetic", "1000", "--max-len", "512")
    assert code == 0
    assert out.startswith("sequences=1000 ")
    assert json.loads(target.read_text())["counts"][511] == 235


def test_pack_perfect_halves(halves, capsys):
    code, out, _ = run(capsys, "pack", str(halves), "--algorithm", "nnlshp", "--depth", "3")
    assert code == 0
    assert rows(out)[0][:4] == ["3", "nnlshp", "50", "100.000"]


def test_pack_report_round_trip(tmp_path, capsys):
    outputs = []
    for depth in ("1", "4", "8", "max"):
        target = tmp_path / f"d{depth}.json"
        code, out, _ = run(capsys, "--out", str(target), "pack", "--bundled", "--depth", depth,
                           "--overhead", "0.04")
        assert code == 0
        outputs.append(rows(out)[0])
    eff = {r[0]: float(r[3]) for r in outputs}
    top = next(k for k in eff if k.endswith("/max"))
    assert eff["4"] < eff["8"] < eff[top]

    code, out, _ = run(capsys, "report", *sorted(str(p) for p in tmp_path.glob("d*.json")))
    assert code == 0
    assert out.splitlines()[0] == HEADER
    assert sorted(rows(out)) == sorted(outputs)


def test_report_edge_cases(tmp_path, halves, capsys):
    code, out, _ = run(capsys, "report")
    assert (code, out) == (0, HEADER + "\n")
    target = tmp_path / "s.json"
    run(capsys, "--out", str(target), "pack", str(halves))
    code, _, err = run(capsys, "report", str(target), str(target))
    assert code == 1
    assert err.startswith("error: duplicate-row:") and err.count("\n") == 1


def test_unknown_algorithm_lists_choices(halves, capsys):
    code, _, err = run(capsys, "pack", str(halves), "--algorithm", "greedy")
    assert code == 2
    assert all(name in err for name in ("spfhp", "lpfhp", "nnlshp", "ennlshp"))


@pytest.mark.parametrize("flags,names", [
    (["--algorithm", "spfhp", "--round-up"], ["--round-up", "--algorithm"]),
    (["--algorithm", "lpfhp", "--leftover", "spfhp"], ["--leftover", "--algorithm"]),
    (["--algorithm", "nnlshp", "--depth", "max"], ["--depth", "--algorithm"]),
    (["--algorithm", "nnlshp", "--short-weight", "0.1", "--weights", "PLACEHOLDER"],
     ["--short-weight", "--weights"]),
])
def test_conflicting_flags_name_both(halves, capsys, flags, names):
    flags = [str(halves) if f == "PLACEHOLDER" else f for f in flags]
    code, _, err = run(capsys, "pack", str(halves), *flags)
    assert code == 2
    assert all(name in err for name in names)


def test_bad_input_is_one_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("4\n600\n")
    code, out, err = run(capsys, "histogram", str(bad), "--max-len", "512")
    assert code == 1 and out == ""
    assert err.startswith("error: invalid-length:") and err.count("\n") == 1


def test_mask_and_lamb(capsys):
    code, out, _ = run(capsys, "mask", "1,1,1,2,2")
    assert out.split() == ["11100", "11100", "11100", "00011", "00011"]
    code, out, _ = run(capsys, "lamb", "0.81", "0.99", "2")
    assert out.splitlines()[1] == "0.6561,0.9801"


def test_scaling(capsys):
    code, out, err = run(capsys, "--seed", "1", "scaling", "--samples", "20000", "--devices", "1,32")
    assert code == 0
    assert "alpha=1.94" in err
    table = rows(out)
    assert [r[0] for r in table] == ["1", "32"]
    assert float(table[0][1]) > float(table[1][1])
    again = run(capsys, "--seed", "1", "scaling", "--samples", "20000", "--devices", "1,32")[1]
    assert again == out
