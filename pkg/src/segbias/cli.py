"""Command-line entry point: train, apply, evaluate, report.

Exit status is 0 on success, 1 on validation errors (including bad usage)
and 2 on I/O errors.
"""

import argparse
import os
import sys

from . import __version__
from . import report as rp
from .corpus import (
    TOKENIZE_MODES,
    load_benchmark,
    load_corpus,
    load_term_pairs,
    nfc,
    read_text_lines,
    tokenize,
    word_counts,
)
from .errors import SegbiasError
from .metrics import (
    asymmetry,
    gender_accuracy,
    gender_isolation,
    length_increment,
    lexical_diversity,
)
from .segmenters import (
    METHODS,
    desegment,
    load_model,
    save_model,
    segment_corpus,
    train,
    vocab_report,
)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

DEFAULTS = {
    "tokenize": "pretok",
    "merges": 8000,
    "vocab_size": 8000,
    "cap": 32000,
    "epochs": 10,
    "eps": 1e-4,
    "max_piece_len": 8,
    "em_iterations": 4,
    "prune_fraction": 0.2,
    "window": 1000,
    "strip_punct": False,
    "averaging": "macro",
    "format": "tsv",
    "list": False,
}

REQUIRED = {
    "train": ("method", "input", "model"),
    "apply": ("model", "input"),
    "deseg": ("input",),
    "vocab": ("model",),
    "eval-gender": ("benchmark", "hyp"),
    "eval-diversity": ("input",),
    "eval-length": ("benchmark", "model"),
    "eval-isolation": ("model",),
    "analyze-asymmetry": ("corpus",),
    "report": ("inputs",),
}

PATH_KEYS = {"input", "output", "model", "benchmark", "hyp", "pairs", "corpus", "out", "inputs", "config"}


class UsageError(SegbiasError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive_int(raw):
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw}")
    return value


def _fraction(raw):
    value = float(raw)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {raw}")
    return value


def _nonneg_float(raw):
    value = float(raw)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {raw}")
    return value


def build_parser():
    parser = _Parser(prog="segbias", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"segbias {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file; flags override it")
        return p

    def export_opts(p):
        p.add_argument("--out", help="machine-readable report path (text goes to stdout otherwise)")
        p.add_argument("--format", choices=rp.FORMATS)
        p.add_argument("--label", help="system name used in report rows")

    p = command("train", "train a segmentation model")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--input", help="training corpus, one sentence per line")
    p.add_argument("--model", help="output model file")
    p.add_argument("--tokenize", choices=TOKENIZE_MODES)
    p.add_argument("--merges", type=_positive_int, help="BPE merge count (default 8000)")
    p.add_argument("--vocab-size", type=_positive_int, help="unigram target vocabulary (default 8000)")
    p.add_argument("--cap", type=_positive_int, help="LMVR lexicon cap (default 32000)")
    p.add_argument("--epochs", type=_positive_int, help="morfessor/lmvr max epochs (default 10)")
    p.add_argument("--eps", type=_nonneg_float, help="relative cost change for convergence (default 1e-4)")
    p.add_argument("--max-piece-len", type=_positive_int)
    p.add_argument("--em-iterations", type=_positive_int)
    p.add_argument("--prune-fraction", type=_fraction)

    p = command("apply", "segment text with a trained model")
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--output", help="default: standard output")
    p.add_argument("--tokenize", choices=TOKENIZE_MODES)

    p = command("deseg", "remove @@ continuation markers")
    p.add_argument("--input")
    p.add_argument("--output")

    p = command("vocab", "report a model's vocabulary size")
    p.add_argument("--model")
    p.add_argument("--list", action="store_true", default=None, help="also print every entry")
    export_opts(p)

    p = command("eval-gender", "gender accuracy of hypotheses on a paired benchmark")
    p.add_argument("--benchmark")
    p.add_argument("--hyp")
    export_opts(p)

    p = command("eval-diversity", "TTR and MATTR of a text file")
    p.add_argument("--input")
    p.add_argument("--window", type=_positive_int, help="MATTR window (default 1000)")
    p.add_argument("--strip-punct", action="store_true", default=None)
    export_opts(p)

    p = command("eval-length", "token-length increment of feminine over masculine references")
    p.add_argument("--benchmark")
    p.add_argument("--model")
    p.add_argument("--averaging", choices=("macro", "micro"))
    export_opts(p)

    p = command("eval-isolation", "gender-morpheme isolation rate")
    p.add_argument("--model")
    p.add_argument("--benchmark")
    p.add_argument("--pairs", help="FEM<TAB>MASC file")
    export_opts(p)

    p = command("analyze-asymmetry", "frequency and length asymmetry of gender pairs")
    p.add_argument("--corpus", help="corpus providing word frequencies")
    p.add_argument("--benchmark")
    p.add_argument("--pairs")
    p.add_argument("--tokenize", choices=TOKENIZE_MODES)
    export_opts(p)

    p = command("report", "merge machine exports and render them")
    p.add_argument("--inputs", nargs="+")
    p.add_argument("--out")
    p.add_argument("--format", choices=rp.FORMATS)
    return parser


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def read_config(path):
    values = {}
    for lineno, line in enumerate(read_text_lines(path), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SegbiasError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = (lineno, value)
    return values


def resolve(parser, argv):
    """Parse argv, fold in the config file and defaults; return a dict."""
    ns = parser.parse_args(argv)
    if not ns.command:
        raise UsageError(parser.format_usage() + "segbias: error: a command is required")
    sp = _subparser(parser, ns.command)
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    cfg = vars(ns).copy()
    if ns.config:
        for key, (lineno, raw) in read_config(ns.config).items():
            action = actions.get(key)
            if action is None:
                raise SegbiasError(f"{ns.config}:{lineno}: unknown key {key!r} for {ns.command}")
            if cfg.get(key) is not None:
                continue
            if action.nargs == 0:
                value = raw.lower() in ("1", "true", "yes", "on")
            elif action.nargs == "+":
                value = raw.split()
            else:
                try:
                    value = action.type(raw) if action.type else raw
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise SegbiasError(f"{ns.config}:{lineno}: bad value for {key}: {exc}") from None
                if action.choices and value not in action.choices:
                    raise SegbiasError(f"{ns.config}:{lineno}: {key} must be one of {', '.join(action.choices)}")
            cfg[key] = value
    for key in actions:
        if cfg.get(key) is None and key in DEFAULTS:
            cfg[key] = DEFAULTS[key]
    missing = [k for k in REQUIRED[ns.command] if not cfg.get(k)]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{sp.format_usage()}{sp.prog}: error: missing required option(s): {flags}")
    return cfg


def _config_meta(cfg):
    out = {}
    for key, value in sorted(cfg.items()):
        if key in ("config",) or value is None:
            continue
        if key in PATH_KEYS:
            value = " ".join(os.path.basename(v) for v in value) if isinstance(value, list) else os.path.basename(value)
        out[key] = value
    return out


def _emit(cfg, section, inputs, stdout):
    bundle = rp.ReportBundle({section.name: section}, rp.base_metadata(_config_meta(cfg), inputs))
    if cfg.get("out"):
        fmt = cfg.get("format") or "tsv"
        rp.export_machine(bundle, cfg["out"], fmt)
    else:
        stdout.write(rp.render_text(bundle))
    return bundle


def _write_lines(path, lines, stdout):
    text = "".join(line + "\n" for line in lines)
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _label(cfg, default):
    return cfg.get("label") or default


def _model_label(cfg, model):
    return _label(cfg, model.method)


def cmd_train(cfg, stdout, stderr):
    corpus = load_corpus(cfg["input"], cfg["tokenize"])
    model = train(
        cfg["method"],
        corpus,
        num_merges=cfg["merges"],
        target_vocab=cfg["vocab_size"],
        cap=cfg["cap"],
        max_epochs=cfg["epochs"],
        convergence_eps=cfg["eps"],
        max_piece_len=cfg["max_piece_len"],
        em_iterations=cfg["em_iterations"],
        prune_fraction=cfg["prune_fraction"],
    )
    save_model(model, cfg["model"])
    print(f"trained {model.method} model: {model.vocab_size} entries -> {cfg['model']}", file=stderr)


def cmd_apply(cfg, stdout, stderr):
    model = load_model(cfg["model"])
    sentences = []
    for lineno, line in enumerate(read_text_lines(cfg["input"]), 1):
        try:
            # NFC so input matches the normalized training alphabet
            sentences.append(tuple(tokenize(nfc(line), cfg["tokenize"])))
        except SegbiasError as exc:
            raise SegbiasError(f"{cfg['input']}:{lineno}: {exc}") from None
    try:
        segmented = segment_corpus(model, sentences)
    except SegbiasError as exc:
        raise SegbiasError(f"{cfg['input']}: {exc}") from None
    _write_lines(cfg.get("output"), segmented.render(), stdout)


def cmd_deseg(cfg, stdout, stderr):
    out = []
    for lineno, line in enumerate(read_text_lines(cfg["input"]), 1):
        try:
            out.append(desegment(line))
        except SegbiasError as exc:
            raise SegbiasError(f"{cfg['input']}:{lineno}: {exc}") from None
    _write_lines(cfg.get("output"), out, stdout)


def cmd_vocab(cfg, stdout, stderr):
    model = load_model(cfg["model"])
    rep = vocab_report(model)
    _emit(cfg, rp.vocab_section([(_model_label(cfg, model), rep)]), {"model": cfg["model"]}, stdout)
    if cfg["list"]:
        for entry, score in rep.entries:
            stdout.write(entry if score is None else f"{entry}\t{score!r}")
            stdout.write("\n")


def cmd_eval_gender(cfg, stdout, stderr):
    bench = load_benchmark(cfg["benchmark"])
    hyps = read_text_lines(cfg["hyp"])
    if len(hyps) != len(bench.entries):
        raise SegbiasError(
            f"{cfg['hyp']} has {len(hyps)} lines but {cfg['benchmark']} has {len(bench.entries)} entries"
        )
    rep = gender_accuracy(bench, hyps)
    label = _label(cfg, os.path.splitext(os.path.basename(cfg["hyp"]))[0])
    _emit(cfg, rp.accuracy_section([(label, rep)]), {"benchmark": cfg["benchmark"], "hyp": cfg["hyp"]}, stdout)


def cmd_eval_diversity(cfg, stdout, stderr):
    lines = read_text_lines(cfg["input"])
    rep = lexical_diversity(lines, cfg["window"], cfg["strip_punct"])
    label = _label(cfg, os.path.splitext(os.path.basename(cfg["input"]))[0])
    _emit(cfg, rp.diversity_section([(label, rep)]), {"input": cfg["input"]}, stdout)


def cmd_eval_length(cfg, stdout, stderr):
    bench = load_benchmark(cfg["benchmark"])
    model = load_model(cfg["model"])
    rep = length_increment(bench, model, cfg["averaging"])
    _emit(cfg, rp.increment_section([(_model_label(cfg, model), rep)]),
          {"benchmark": cfg["benchmark"], "model": cfg["model"]}, stdout)


def _term_pairs(cfg):
    if bool(cfg.get("benchmark")) == bool(cfg.get("pairs")):
        raise UsageError("exactly one of --benchmark or --pairs is required")
    if cfg.get("benchmark"):
        return load_benchmark(cfg["benchmark"]).gender_pairs(), {"benchmark": cfg["benchmark"]}
    return load_term_pairs(cfg["pairs"]), {"pairs": cfg["pairs"]}


def cmd_eval_isolation(cfg, stdout, stderr):
    pairs, inputs = _term_pairs(cfg)
    model = load_model(cfg["model"])
    rep = gender_isolation(pairs, model)
    inputs["model"] = cfg["model"]
    _emit(cfg, rp.isolation_section([(_model_label(cfg, model), rep)]), inputs, stdout)


def cmd_analyze_asymmetry(cfg, stdout, stderr):
    pairs, inputs = _term_pairs(cfg)
    freq = word_counts(load_corpus(cfg["corpus"], cfg["tokenize"]))
    rep = asymmetry(pairs, freq)
    inputs["corpus"] = cfg["corpus"]
    label = _label(cfg, os.path.splitext(os.path.basename(cfg["corpus"]))[0])
    _emit(cfg, rp.asymmetry_section([(label, rep)]), inputs, stdout)


def cmd_report(cfg, stdout, stderr):
    bundle = rp.ReportBundle()
    for path in cfg["inputs"]:
        bundle = bundle.merged(rp.load_export(path))
    if cfg.get("out"):
        rp.export_machine(bundle, cfg["out"], cfg.get("format") or "tsv")
    else:
        stdout.write(rp.render_text(bundle))


COMMANDS = {
    "train": cmd_train,
    "apply": cmd_apply,
    "deseg": cmd_deseg,
    "vocab": cmd_vocab,
    "eval-gender": cmd_eval_gender,
    "eval-diversity": cmd_eval_diversity,
    "eval-length": cmd_eval_length,
    "eval-isolation": cmd_eval_isolation,
    "analyze-asymmetry": cmd_analyze_asymmetry,
    "report": cmd_report,
}


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        cfg = resolve(parser, argv)
        COMMANDS[cfg["command"]](cfg, stdout, stderr)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return exc.code or EXIT_OK
    except OSError as exc:
        print(f"segbias: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except (SegbiasError, ValueError) as exc:
        print(f"segbias: error: {exc}", file=stderr)
        return EXIT_INVALID
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
