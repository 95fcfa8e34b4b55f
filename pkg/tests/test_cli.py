import json

import pytest

from evalsub.cli import EXIT_FORMAT, EXIT_OK, EXIT_UNDEFINED, main
from evalsub.core import read_corpus, write_corpus
from evalsub.synthetic import generate_corpus


@pytest.fixture
def ref_file(tmp_path):
    path = tmp_path / "ref.txt"
    write_corpus(generate_corpus(30, seed=3), path)
    return path


def test_evaluate_identity_prints_tsv(ref_file, capsys):
    assert main(["evaluate", "--ref", str(ref_file), "--hyp", str(ref_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("condition\tmetric\tvalue\n")
    assert "raw\tSigma\t100" in out


def test_evaluate_writes_prefix(ref_file, tmp_path):
    prefix = tmp_path / "rep"
    assert main(["evaluate", "--ref", str(ref_file), "--hyp", str(ref_file),
                 "--out", str(prefix), "--mode", "block"]) == EXIT_OK
    data = json.loads((tmp_path / "rep.json").read_text(encoding="utf-8"))
    assert data["config"]["mode"] == "block"
    assert (tmp_path / "rep.tsv").exists()


def test_malformed_input_exits_2(ref_file, tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("<eol> starts with a tag\n", encoding="utf-8")
    assert main(["evaluate", "--ref", str(ref_file), "--hyp", str(bad)]) == EXIT_FORMAT
    assert "line 1" in capsys.readouterr().err
    assert main(["evaluate", "--ref", str(ref_file), "--hyp", str(tmp_path / "nope")]) == EXIT_FORMAT


def test_lenient_accepts_leading_tag(tmp_path):
    f = tmp_path / "x.txt"
    f.write_text("<eol> a b c d e <eob>\n", encoding="utf-8")
    assert main(["project", "--ref", str(f), "--hyp", str(f), "--lenient"]) == EXIT_OK


def test_undefined_metric_exits_3(tmp_path):
    f = tmp_path / "one.txt"
    f.write_text("word <eob>\n", encoding="utf-8")
    assert main(["evaluate", "--ref", str(f), "--hyp", str(f)]) == EXIT_UNDEFINED


def test_length_mismatch_exits_2(ref_file, tmp_path):
    short = tmp_path / "short.txt"
    write_corpus(generate_corpus(5, seed=3), short)
    assert main(["project", "--ref", str(ref_file), "--hyp", str(short)]) == EXIT_FORMAT


def test_project_round_trip(ref_file, tmp_path):
    out = tmp_path / "proj.txt"
    assert main(["project", "--ref", str(ref_file), "--hyp", str(ref_file),
                 "--out", str(out)]) == EXIT_OK
    assert read_corpus(out).sentences == read_corpus(ref_file).sentences


def test_noise_writes_files(ref_file, tmp_path, capsys):
    outdir = tmp_path / "noised"
    assert main(["noise", "--ref", str(ref_file), "--spec", "shift.2.40", "--spec", "text.10",
                 "--seed", "5", "--out", str(outdir)]) == EXIT_OK
    assert sorted(p.name for p in outdir.iterdir()) == ["shift.2.40.seed5.txt", "text.10.seed5.txt"]
    assert "requested=" in capsys.readouterr().out


def test_bad_noise_label_exits_2(ref_file, tmp_path):
    assert main(["noise", "--ref", str(ref_file), "--spec", "shift.9.40",
                 "--out", str(tmp_path)]) == EXIT_FORMAT


def test_exp1_then_correlate(ref_file, tmp_path, capsys):
    prefix = tmp_path / "e1"
    assert main(["exp1", "--ref", str(ref_file), "--spec", "delete.20", "--spec", "add.60",
                 "--spec", "shift.1.40", "--out", str(prefix)]) == EXIT_OK
    assert main(["correlate", "--report", str(tmp_path / "e1.json")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("metric\tPk\t")


def test_exp2_small(ref_file, capsys):
    assert main(["exp2", "--ref", str(ref_file), "--text-levels", "0,50",
                 "--seg-levels", "0,50"]) == EXIT_OK
    assert "text.50+mixed.50\tSigma" in capsys.readouterr().out


def test_exp3_named_systems(ref_file, tmp_path, capsys):
    assert main(["exp3", "--ref", str(ref_file), "--hyp", f"same={ref_file}"]) == EXIT_OK
    assert "same\tF1\t1" in capsys.readouterr().out


def test_exp3_synthetic_systems(ref_file, capsys):
    assert main(["exp3", "--ref", str(ref_file)]) == EXIT_OK
    assert "sys4" in capsys.readouterr().out


def test_synth_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["synth", "--synthetic-size", "20", "--out", str(a)])
    main(["synth", "--synthetic-size", "20", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text(encoding="utf-8").splitlines()) == 20


def test_missing_ref_is_reported(tmp_path):
    with pytest.raises(SystemExit):
        main(["evaluate", "--hyp", str(tmp_path / "x")])
