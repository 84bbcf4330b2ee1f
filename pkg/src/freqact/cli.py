"""Command line front end: classify, eval, gen, spectrum, filter-response, calibrate."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import calibration, evaluate, gen, ingest, preprocess
from .calibration import CalibrationParams
from .classifier import Classification, StreamClassifier, StreamError, body_signal, classify_dataset, split_blocks
from .config import RunConfig, parse_config
from .errors import EXIT_IO, EXIT_OK, EXIT_USAGE, FreqactError, ParameterError
from .spectrum import normalized_spectrum

ROW_HEADER = "block_index,label,peak_hz"


class _IOFailure(Exception):
    pass


def _read(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str, stdout) -> None:
    if path == "-":
        stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="flat 'key = value' config file; flags override it")
    g.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")
    g.add_argument("--format", choices=("text", "csv"), default="text")
    g.add_argument("--fs", type=float, dest="sample_rate_hz")
    g.add_argument("--block-size", type=int, dest="block_size")
    g.add_argument("--nfft", type=int, dest="n_fft")
    g.add_argument("--window", type=int, dest="calibration_window", help="calibration window in samples")
    g.add_argument("--mode", choices=("ba", "x", "y", "z"))
    g.add_argument("--adc-full-scale", type=int, dest="adc_full_scale")
    g.add_argument("--vref", type=float, dest="adc_vref")
    g.add_argument("--gain", type=float, nargs=3, metavar=("GX", "GY", "GZ"), help="counts per g per axis")
    g.add_argument("--bands", type=float, nargs=5, metavar=("REST_MAX", "WALK_LO", "WALK_HI", "RUN_LO", "RUN_HI"))
    g.add_argument("--min-peak-to-mean", type=float, dest="min_peak_to_mean")
    g.add_argument("--calibration", help="calibration file from 'calibrate'; default: estimate from the input")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="freqact", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="label each block of a sample file")
    p.add_argument("samples", help="sample file, or - for standard input")
    p.add_argument("--labels", help="reference labels; appends an accuracy line")
    p.add_argument("--stream", action="store_true", help="read line by line and emit rows as blocks complete")

    p = sub.add_parser("eval", parents=[common], help="accuracy table against reference labels")
    p.add_argument("--pred", action="append", default=[], help="prediction rows from 'classify'")
    p.add_argument("--samples", action="append", default=[], help="sample file to classify first")
    p.add_argument("--truth", action="append", default=[], help="label file, one per --pred/--samples")
    p.add_argument("--corpus", help="directory with a manifest.json from 'gen'")

    p = sub.add_parser("gen", parents=[common], help="write a synthetic corpus")
    p.add_argument("--script", action="append", default=[], help="activity script file (repeatable)")
    p.add_argument("--default", type=int, metavar="N", help="generate N seeded REST-WALK-RUN scripts")
    p.add_argument("--noise", type=float, default=0.0, help="noise sigma in g for --default")
    p.add_argument("--seed", type=int, default=2008, help="base seed for --default")
    p.add_argument("--out", required=False, help="output directory")

    p = sub.add_parser("spectrum", parents=[common], help="normalized block spectra")
    p.add_argument("samples")
    p.add_argument("--block", type=int, help="only this block index")

    p = sub.add_parser("filter-response", parents=[common], help="gravity filter response")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--fmax", type=float, help="upper frequency (default Nyquist)")
    p.add_argument("--coefficients", action="store_true", help="dump section coefficients instead")

    p = sub.add_parser("calibrate", parents=[common], help="estimate calibration offsets")
    p.add_argument("samples")
    p.add_argument("-o", "--output", default="-")
    return parser


def _config(args, stdin) -> RunConfig:
    overrides = parse_config(_read(args.config, stdin)) if args.config else {}
    base = RunConfig(**overrides)
    changes = {
        k: getattr(args, k)
        for k in ("sample_rate_hz", "block_size", "n_fft", "calibration_window", "mode",
                  "adc_full_scale", "adc_vref", "min_peak_to_mean")
    }
    if args.gain:
        changes.update(gain_x=args.gain[0], gain_y=args.gain[1], gain_z=args.gain[2])
    if args.bands:
        changes.update(zip(("rest_max_hz", "walk_lo_hz", "walk_hi_hz", "run_lo_hz", "run_hi_hz"), args.bands))
    return base.replace(**changes)


def _params(args, cfg: RunConfig, dataset, stdin) -> CalibrationParams:
    if args.calibration:
        return CalibrationParams.from_text(_read(args.calibration, stdin))
    return calibration.estimate_params(dataset, cfg.gains(), cfg.calibration_window)


def _load(path: str, cfg: RunConfig, stdin) -> ingest.Dataset:
    return ingest.parse_samples(_read(path, stdin), cfg.ingest())


def _classify_file(path, args, cfg, stdin) -> Classification:
    ds = _load(path, cfg, stdin)
    return classify_dataset(ds, _params(args, cfg, ds, stdin), cfg.bands(), cfg.pipeline())


def cmd_classify(args, cfg, stdin, stdout, stderr) -> int:
    if args.stream:
        return _classify_stream(args, cfg, stdin, stdout, stderr)
    res = _classify_file(args.samples, args, cfg, stdin)
    stdout.write(f"# block_size={res.block_size} block_s={res.block_duration_s:g} "
                 f"discarded={res.n_discarded} clamped={res.n_clamped}\n")
    stdout.write(ROW_HEADER + "\n")
    for lab in res:
        stdout.write(lab.row() + "\n")
    if args.labels:
        truth = ingest.parse_labels(_read(args.labels, stdin))
        cm = evaluate.score(res.labels, truth)
        stdout.write(f"# accuracy {cm.correct}/{cm.total} = {evaluate.percent(cm.correct, cm.total)}%\n")
    return EXIT_OK


def _classify_stream(args, cfg, stdin, stdout, stderr) -> int:
    params = CalibrationParams.from_text(_read(args.calibration, stdin)) if args.calibration else None
    session = StreamClassifier(params, cfg.bands(), cfg.pipeline(), cfg.ingest(), gains=cfg.gains())
    if args.samples == "-":
        lines = stdin
    else:
        try:
            lines = open(args.samples)
        except OSError as exc:
            raise _IOFailure(f"cannot read {args.samples}: {exc.strerror}") from None
    stdout.write(ROW_HEADER + "\n")
    n_errors = 0
    with lines if lines is not stdin else _nullctx():
        for line in lines:
            for event in session.feed_line(line):
                if isinstance(event, StreamError):
                    n_errors += 1
                    stderr.write(f"freqact: {event.message}\n")
                else:
                    stdout.write(event.row() + "\n")
                    stdout.flush()
    return 4 if n_errors else EXIT_OK


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def cmd_eval(args, cfg, stdin, stdout, stderr) -> int:
    pairs: list[tuple[str, list, object]] = []
    if args.corpus:
        root = Path(args.corpus)
        try:
            manifest = json.loads((root / "manifest.json").read_text())
        except OSError as exc:
            raise _IOFailure(f"cannot read {root / 'manifest.json'}: {exc.strerror}") from None
        for e in manifest["datasets"]:
            res = _classify_file(str(root / e["samples"]), args, cfg, stdin)
            pairs.append((e["name"], res.labels, ingest.parse_labels(_read(str(root / e["labels"]), stdin))))
    sources = [("pred", p) for p in args.pred] + [("samples", s) for s in args.samples]
    if len(sources) != len(args.truth) and not (args.corpus and not sources):
        raise ParameterError(f"{len(sources)} prediction/sample inputs but {len(args.truth)} --truth files")
    for (kind, path), tpath in zip(sources, args.truth):
        if kind == "pred":
            pred = evaluate.parse_predictions(_read(path, stdin))
        else:
            pred = _classify_file(path, args, cfg, stdin).labels
        pairs.append((Path(path).stem, pred, ingest.parse_labels(_read(tpath, stdin))))
    if not pairs:
        raise ParameterError("eval needs --corpus, or --pred/--samples with --truth")
    matrices = [(name, evaluate.score(pred, truth)) for name, pred, truth in pairs]
    rep = evaluate.report(matrices, block_size=cfg.block_size, sample_rate_hz=cfg.sample_rate_hz)
    stdout.write(rep.render_csv() if args.format == "csv" else rep.render_text())
    return EXIT_OK


def cmd_gen(args, cfg, stdin, stdout, stderr) -> int:
    scripts = [gen.parse_script(_read(p, stdin)) for p in args.script]
    if args.default:
        scripts += gen.default_corpus(args.default, args.noise, args.seed)
    if not args.out:
        raise ParameterError("gen needs --out")
    bands = cfg.bands()
    params = gen.default_params(cfg.adc_full_scale)
    params = CalibrationParams(*params.offsets, *cfg.gains())
    try:
        manifest = gen.write_corpus(
            scripts, args.out, params=params, sample_rate_hz=cfg.sample_rate_hz,
            bands=bands, adc_full_scale=cfg.adc_full_scale, block_size=cfg.block_size, n_fft=cfg.n_fft,
        )
    except OSError as exc:
        raise _IOFailure(str(exc)) from None
    stdout.write("name,samples,labels,n_samples,n_blocks,seed\n")
    for e in manifest["datasets"]:
        stdout.write(f"{e['name']},{e['samples']},{e['labels']},{e['n_samples']},{e['n_blocks']},{e['seed']}\n")
    return EXIT_OK


def cmd_spectrum(args, cfg, stdin, stdout, stderr) -> int:
    ds = _load(args.samples, cfg, stdin)
    pcfg = cfg.pipeline()
    sig, _ = body_signal(ds.counts, _params(args, cfg, ds, stdin), pcfg)
    blocks, _ = split_blocks(sig, pcfg.block_size, pcfg.mode)
    stdout.write("block_index,freq_hz,normalized_magnitude\n")
    for b in blocks:
        if args.block is not None and b.block_index != args.block:
            continue
        spec = normalized_spectrum(b, pcfg.n_fft)
        for f, m in zip(spec.freqs_hz, spec.magnitudes):
            stdout.write(f"{b.block_index},{f:.6f},{m:.6f}\n")
    return EXIT_OK


def cmd_filter_response(args, cfg, stdin, stdout, stderr) -> int:
    cascade = preprocess.design_gravity_filter(cfg.sample_rate_hz)
    if args.coefficients:
        stdout.write(cascade.dump())
        return EXIT_OK
    if args.points < 2:
        raise ParameterError("--points must be >= 2")
    fmax = args.fmax if args.fmax is not None else cfg.sample_rate_hz / 2
    freqs = np.linspace(0.0, fmax, args.points)
    h = cascade.response(freqs)
    stdout.write("freq_hz,magnitude_db,phase_rad\n")
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(np.abs(h))
    for f, d, ph in zip(freqs, db, np.angle(h)):
        stdout.write(f"{f:.6f},{d:.6f},{ph:.6f}\n")
    return EXIT_OK


def cmd_calibrate(args, cfg, stdin, stdout, stderr) -> int:
    ds = _load(args.samples, cfg, stdin)
    params = calibration.estimate_params(ds, cfg.gains(), cfg.calibration_window)
    _write(args.output, params.to_text(), stdout)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "eval": cmd_eval,
    "gen": cmd_gen,
    "spectrum": cmd_spectrum,
    "filter-response": cmd_filter_response,
    "calibrate": cmd_calibrate,
}


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args, stdin)
        if args.print_config:
            stdout.write(cfg.dump())
            return EXIT_OK
        return COMMANDS[args.command](args, cfg, stdin, stdout, stderr)
    except _IOFailure as exc:
        stderr.write(f"freqact: {exc}\n")
        return EXIT_IO
    except FreqactError as exc:
        stderr.write(f"freqact: {exc}\n")
        return exc.exit_code


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`)
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
