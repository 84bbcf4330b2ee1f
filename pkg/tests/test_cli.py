import io

import numpy as np
import pytest

from freqact import errors
from freqact.calibration import CalibrationParams
from freqact.classifier import classify_dataset
from freqact.cli import run
from freqact.evaluate import report, score
from freqact.gen import default_corpus, write_corpus
from freqact.ingest import parse_labels, parse_samples


def call(argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, io.StringIO(stdin_text), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(default_corpus(4, 0.05), root)
    return root


def test_classify_happy_path(corpus):
    code, out, _ = call(["classify", str(corpus / "set_00.csv")])
    assert code == 0
    rows = [r for r in out.splitlines() if not r.startswith("#")]
    assert rows[0] == "block_index,label,peak_hz"
    assert rows[1].startswith("0,rest")
    assert "block_s=1.28" in out


def test_classify_with_labels(corpus):
    code, out, _ = call(["classify", str(corpus / "set_01.csv"), "--labels", str(corpus / "set_01.lbl")])
    assert code == 0 and "# accuracy" in out


def test_missing_file():
    code, _, err = call(["classify", "missing.csv"])
    assert code == errors.EXIT_IO and "missing.csv" in err
    assert len(err.strip().splitlines()) == 1


def test_unknown_subcommand_and_flag():
    assert call(["frobnicate"])[0] == errors.EXIT_USAGE
    assert call(["classify", "x.csv", "--nope"])[0] == errors.EXIT_USAGE


def test_eval_matches_library(corpus):
    code, out, _ = call(["eval", "--corpus", str(corpus), "--format", "csv"])
    assert code == 0
    mats = []
    for i in range(4):
        ds = parse_samples((corpus / f"set_{i:02d}.csv").read_text())
        truth = parse_labels((corpus / f"set_{i:02d}.lbl").read_text())
        mats.append((f"set_{i:02d}", score(classify_dataset(ds).labels, truth)))
    lib = report(mats)
    assert out == lib.render_csv()


def test_eval_samples_and_pred_paths(corpus, tmp_path):
    s, t = str(corpus / "set_02.csv"), str(corpus / "set_02.lbl")
    code, by_samples, _ = call(["eval", "--samples", s, "--truth", t, "--format", "csv"])
    assert code == 0
    pred = tmp_path / "set_02.pred"
    pred.write_text(call(["classify", s])[1])
    code, by_pred, _ = call(["eval", "--pred", str(pred), "--truth", t, "--format", "csv"])
    assert code == 0 and by_pred == by_samples


def test_eval_text_table(corpus):
    code, out, _ = call(["eval", "--corpus", str(corpus)])
    assert code == 0 and "Accuracy %" in out and "1.28 s" in out


def test_eval_alignment_error(corpus, tmp_path):
    short = tmp_path / "short.lbl"
    short.write_text("rest\n")
    code, _, err = call(["eval", "--samples", str(corpus / "set_00.csv"), "--truth", str(short)])
    assert code == errors.AlignmentError.exit_code and "1 reference" in err


def test_output_is_byte_identical(corpus):
    argv = ["classify", str(corpus / "set_03.csv")]
    assert call(argv) == call(argv)


def test_stdin_and_stream(corpus):
    text = (corpus / "set_00.csv").read_text()
    _, batch, _ = call(["classify", "-"], text)
    _, stream, _ = call(["classify", "-", "--stream"], text)
    assert [r for r in batch.splitlines() if not r.startswith("#")] == stream.splitlines()


def test_stream_reports_bad_lines_and_continues(corpus):
    lines = (corpus / "set_00.csv").read_text().splitlines(keepends=True)
    code, out, err = call(["classify", "-", "--stream"], "".join(lines[:200] + ["bad line\n"] + lines[200:]))
    assert code == errors.ParseError.exit_code
    assert "line 201" in err
    _, clean, _ = call(["classify", "-", "--stream"], "".join(lines))
    assert out == clean


def test_print_config_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("block_size = 128\nn_fft = 512\nmode = z\n")
    code, out, _ = call(["classify", "x.csv", "--config", str(cfg), "--nfft", "1024", "--print-config"])
    assert code == 0
    assert "block_size = 128" in out and "n_fft = 1024" in out and "mode = z" in out


def test_inconsistent_config_rejected():
    code, _, err = call(["classify", "x.csv", "--nfft", "32", "--print-config"])
    assert code == errors.ParameterError.exit_code
    assert call(["classify", "x.csv", "--fs", "6", "--print-config"])[0] == errors.ParameterError.exit_code


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert call(["classify", "x.csv", "--config", str(cfg)])[0] == errors.ParseError.exit_code


def test_calibrate_then_reuse(corpus, tmp_path):
    out_file = tmp_path / "cal.txt"
    code, _, _ = call(["calibrate", str(corpus / "set_00.csv"), "-o", str(out_file)])
    assert code == 0
    params = CalibrationParams.from_text(out_file.read_text())
    assert params.gain_z == pytest.approx(273.0)
    a = call(["classify", str(corpus / "set_00.csv")])[1]
    b = call(["classify", str(corpus / "set_00.csv"), "--calibration", str(out_file)])[1]
    assert a == b


def test_spectrum(corpus):
    code, out, _ = call(["spectrum", str(corpus / "set_00.csv"), "--block", "20"])
    rows = out.splitlines()
    assert code == 0 and rows[0] == "block_index,freq_hz,normalized_magnitude"
    assert len(rows) == 1 + 129
    mags = np.array([float(r.split(",")[2]) for r in rows[1:]])
    assert mags.max() == pytest.approx(1.0, abs=1e-6)


def test_filter_response():
    code, out, _ = call(["filter-response", "--points", "101", "--fmax", "20"])
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 101
    assert rows[0][1] == "-inf"
    db = {float(f): float(d) for f, d, _ in rows}
    assert db[0.2] < -60 and -0.5 <= db[2.0] <= 0.05
    code, out, _ = call(["filter-response", "--coefficients"])
    assert "section 3" in out


def test_gen_command(tmp_path):
    script = tmp_path / "a.script"
    script.write_text("seed = 3\nnoise_sigma_g = 0.05\nsegment = rest 5\nsegment = walk 10 2.0 0.6\n")
    code, out, _ = call(["gen", "--script", str(script), "--default", "2", "--out", str(tmp_path / "c")])
    assert code == 0 and len(out.splitlines()) == 4
    assert (tmp_path / "c" / "manifest.json").exists()
    bad = tmp_path / "bad.script"
    bad.write_text("segment = walk 10 3.0 0.6\n")
    assert call(["gen", "--script", str(bad), "--out", str(tmp_path / "d")])[0] == errors.ScriptError.exit_code


def test_error_categories_have_distinct_codes():
    codes = [errors.EXIT_USAGE, errors.EXIT_IO, errors.ParseError.exit_code, errors.RangeError.exit_code,
             errors.EmptyInputError.exit_code, errors.InsufficientDataError.exit_code,
             errors.ParameterError.exit_code, errors.AlignmentError.exit_code, errors.ScriptError.exit_code]
    assert len(set(codes)) == len(codes) and 0 not in codes


@pytest.mark.parametrize("text, code", [
    ("", errors.EmptyInputError.exit_code),
    ("1,2\n", errors.ParseError.exit_code),
    ("1,2,5000\n", errors.RangeError.exit_code),
    ("2048,2048,2321\n" * 50, errors.InsufficientDataError.exit_code),
])
def test_library_errors_map_to_exit_codes(text, code):
    assert call(["classify", "-"], text)[0] == code
