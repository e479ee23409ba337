import io
import shutil

import pytest

from segbias import __version__
from segbias.cli import run
from segbias.report import load_export
from segbias.segmenters import load_model


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def work(tmp_path, data_dir):
    for name in ("synthetic_corpus.txt", "gender_fixture.tsv", "gender_fixture_hyp.txt", "term_pairs.tsv"):
        shutil.copy(data_dir / name, tmp_path / name)
    small = tmp_path / "small.txt"
    small.write_text("il cane e la gatta\nla gatta e il cane .\n", encoding="utf-8")
    return tmp_path


def test_train_and_apply(work):
    model = work / "m.sbm"
    code, _, err = call("train", "--method", "bpe", "--merges", "8000", "--input", str(work / "small.txt"),
                        "--model", str(model))
    assert code == 0, err
    assert load_model(model).method == "bpe"
    code, out, _ = call("apply", "--model", str(model), "--input", str(work / "small.txt"))
    assert code == 0
    assert len(out.splitlines()) == 2
    deseg = work / "seg.txt"
    deseg.write_text(out, encoding="utf-8")
    code, back, _ = call("deseg", "--input", str(deseg))
    assert back == (work / "small.txt").read_text(encoding="utf-8")


def test_apply_to_file(work):
    model = work / "m.sbm"
    assert call("train", "--method", "char", "--input", str(work / "small.txt"), "--model", str(model))[0] == 0
    code, out, _ = call("apply", "--model", str(model), "--input", str(work / "small.txt"),
                        "--output", str(work / "o.txt"))
    assert code == 0 and out == ""
    assert (work / "o.txt").read_text(encoding="utf-8").startswith("i@@ l c@@ a@@ n@@ e")


def test_mismatched_hypothesis_count(work):
    hyp = work / "short.txt"
    hyp.write_text("one line\n", encoding="utf-8")
    code, _, err = call("eval-gender", "--benchmark", str(work / "gender_fixture.tsv"), "--hyp", str(hyp),
                        "--out", str(work / "r.tsv"))
    assert code == 1
    assert "1 lines" in err and "8 entries" in err
    assert not (work / "r.tsv").exists()


def test_eval_gender_text_and_export(work):
    args = ("eval-gender", "--benchmark", str(work / "gender_fixture.tsv"), "--hyp", str(work / "gender_fixture_hyp.txt"))
    code, out, _ = call(*args)
    assert code == 0 and "70.00" in out
    code, _, _ = call(*args, "--out", str(work / "r.jsonl"), "--format", "jsonl", "--label", "sys")
    bundle = load_export(work / "r.jsonl")
    row = bundle.sections["accuracy"].rows[0]
    assert row[:3] == ("sys", "accuracy_pct", 70.0)
    assert bundle.metadata["version"] == __version__
    assert bundle.metadata["input.hyp"].startswith("sha256:")
    assert bundle.metadata["config.benchmark"] == "gender_fixture.tsv"


def test_usage_errors():
    assert call()[0] == 1
    assert call("frobnicate")[0] == 1
    code, _, err = call("train", "--method", "bpe", "--bogus")
    assert code == 1 and "usage" in err
    assert call("train", "--method", "bpe", "--input", "x")[0] == 1  # --model missing
    assert call("train", "--method", "bpe", "--merges", "0", "--input", "x", "--model", "y")[0] == 1
    assert call("eval-diversity", "--input", "x", "--window", "-3")[0] == 1


def test_io_errors(work):
    code, _, err = call("apply", "--model", str(work / "missing.sbm"), "--input", str(work / "small.txt"))
    assert code == 2 and "I/O error" in err
    code, _, _ = call("train", "--method", "char", "--input", str(work / "small.txt"),
                      "--model", str(work / "no_dir" / "m.sbm"))
    assert code == 2


def test_validation_errors(work):
    bad = work / "bad.txt"
    bad.write_text("a@@ b\n", encoding="utf-8")
    code, _, err = call("train", "--method", "char", "--input", str(bad), "--model", str(work / "m"))
    assert code == 1 and "line 1" in err
    bad_model = work / "bad.sbm"
    bad_model.write_text("SEGBIAS 2 bpe\n", encoding="utf-8")
    assert call("vocab", "--model", str(bad_model))[0] == 1
    code, _, err = call("deseg", "--input", str(work / "small.txt"))
    assert code == 0
    (work / "dangling.txt").write_text("ok\nx@@\n", encoding="utf-8")
    code, _, err = call("deseg", "--input", str(work / "dangling.txt"))
    assert code == 1 and ":2:" in err


def test_config_file(work, monkeypatch):
    cfg = work / "run.cfg"
    cfg.write_text("# training setup\nmethod = bpe\nmerges = 5\ninput = small.txt\n", encoding="utf-8")
    model = work / "m.sbm"
    monkeypatch.chdir(work)
    assert call("train", "--config", str(cfg), "--model", str(model))[0] == 0
    assert len(load_model(model).merges) == 5
    # the flag wins over the file
    assert call("train", "--config", str(cfg), "--merges", "2", "--model", str(model))[0] == 0
    assert len(load_model(model).merges) == 2
    cfg.write_text("merges = lots\n", encoding="utf-8")
    assert call("train", "--config", str(cfg))[0] == 1
    cfg.write_text("windowz = 3\n", encoding="utf-8")
    code, _, err = call("train", "--config", str(cfg))
    assert code == 1 and "windowz" in err
    cfg.write_text("no equals sign\n", encoding="utf-8")
    assert call("train", "--config", str(cfg))[0] == 1


def test_vocab_listing(work):
    model = work / "m.sbm"
    call("train", "--method", "char", "--input", str(work / "small.txt"), "--model", str(model))
    code, out, _ = call("vocab", "--model", str(model), "--list")
    assert code == 0
    assert "== vocab ==" in out
    # table header, column names, one row, then the entries
    listed = out.splitlines()[3:]
    assert sorted(listed) == sorted(set("ilcanegatt."))


def test_diversity_length_isolation_asymmetry(work):
    model = work / "m.sbm"
    call("train", "--method", "char", "--input", str(work / "synthetic_corpus.txt"), "--model", str(model))
    code, out, _ = call("eval-diversity", "--input", str(work / "gender_fixture_hyp.txt"), "--window", "5")
    assert code == 0 and "mattr_pct" in out
    code, out, _ = call("eval-length", "--benchmark", str(work / "gender_fixture.tsv"), "--model", str(model),
                        "--averaging", "micro")
    assert code == 0 and "micro" in out
    code, out, _ = call("eval-isolation", "--model", str(model), "--pairs", str(work / "term_pairs.tsv"))
    assert code == 0 and "100.00" in out
    code, _, err = call("eval-isolation", "--model", str(model))
    assert code == 1 and "--benchmark or --pairs" in err
    code, out, _ = call("analyze-asymmetry", "--corpus", str(work / "synthetic_corpus.txt"),
                        "--benchmark", str(work / "gender_fixture.tsv"))
    assert code == 0 and "pct_feminine_rarer" in out


def test_report_merges_exports(work):
    a, b = work / "a.tsv", work / "b.jsonl"
    call("eval-gender", "--benchmark", str(work / "gender_fixture.tsv"), "--hyp", str(work / "gender_fixture_hyp.txt"),
         "--out", str(a))
    call("eval-diversity", "--input", str(work / "small.txt"), "--out", str(b), "--format", "jsonl")
    code, out, _ = call("report", "--inputs", str(a), str(b))
    assert code == 0
    assert out.index("== accuracy ==") < out.index("== diversity ==")
    code, _, _ = call("report", "--inputs", str(a), str(b), "--out", str(work / "all.tsv"))
    merged = load_export(work / "all.tsv")
    assert set(merged.sections) == {"accuracy", "diversity"}


def test_threads_env_does_not_change_output(work, monkeypatch):
    model = work / "m.sbm"
    call("train", "--method", "bpe", "--merges", "50", "--input", str(work / "synthetic_corpus.txt"),
         "--model", str(model))
    seq = call("apply", "--model", str(model), "--input", str(work / "synthetic_corpus.txt"))[1]
    monkeypatch.setenv("SEGBIAS_THREADS", "4")
    par = call("apply", "--model", str(model), "--input", str(work / "synthetic_corpus.txt"))[1]
    assert seq == par


def test_version():
    assert call("--version")[0] == 0
