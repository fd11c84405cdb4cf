"""Command-line pipeline.

Subcommands: validate, stats, triples, export-pairs, eval, layers, kappa,
sample. Dataset arguments accept either a file path or a bundled language
code (gl, en, pt, es). ``eval`` and ``layers`` write the delimited report,
a full-precision JSON twin, and a rendered PNG figure side by side.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import agreement, reporting
from .ceif import ContextualProvider, Strategy, load_ceif
from .conllu import load_conllu
from .dataset import (DatasetBundle, dataset_stats, export_pairs, load_dataset,
                      parse_dataset, validate_dataset, write_pairs)
from .errors import HomosemError, ParseError, StrategyError
from .static_vectors import StaticProvider, load_vectors
from .triples import (count_by_experiment, filter_same_pos, generate_triples,
                      load_triples, triple_set_diff, write_triples, EXPERIMENTS)

LANGUAGES = ("gl", "en", "pt", "es")

STATIC_STRATEGIES = ("wv", "sent", "syn")
CONTEXTUAL_STRATEGIES = ("sent", "cat", "add", "lay")

STRATEGY_GRAMMAR = "wv | sent | syn:<k> | cat | add | layer:<n>"


def parse_strategy(text: str) -> tuple[str, int | None]:
    """One flat strategy namespace across both providers: kind + parameter."""
    if text in ("wv", "sent", "cat", "add"):
        return text, None
    kind, sep, arg = text.partition(":")
    if sep and kind in ("syn", "layer"):
        try:
            value = int(arg)
        except ValueError:
            raise StrategyError(f"strategy parameter must be an integer: {text!r}") from None
        return ("lay" if kind == "layer" else "syn"), value
    raise StrategyError(f"unknown strategy {text!r}; expected {STRATEGY_GRAMMAR}")


def _bundled(kind: str, name: str) -> Path:
    return Path(str(resources.files("homosem").joinpath("data", kind, name)))


def resolve_dataset_path(arg: str) -> Path:
    if arg in LANGUAGES:
        path = _bundled("datasets", f"{arg}.json")
        if not path.exists():
            raise HomosemError(f"no bundled dataset for language {arg!r}")
        return path
    path = Path(arg)
    if not path.exists():
        raise HomosemError(f"dataset {arg!r} is neither a file nor a bundled "
                           f"language code {LANGUAGES}")
    return path


def bundled_triples_path(language: str) -> Path | None:
    path = _bundled("triples", f"{language}.tsv")
    return path if path.exists() else None


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("HOMOSEM_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise HomosemError(f"HOMOSEM_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    path = resolve_dataset_path(args.dataset)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    bundle = parse_dataset(doc)
    findings = validate_dataset(bundle)
    for f in findings:
        print(f"{f.severity}\t{f.code}\t{f.message}")
    errors = sum(1 for f in findings if f.severity == "error")
    warnings = len(findings) - errors
    print(f"{path.name}: {errors} error(s), {warnings} warning(s)")
    return 1 if errors else 0


def cmd_stats(args) -> int:
    lines = ["language\thomonyms\tsenses\tcross_pos_senses\tsentences\t"
             "triples\tpairs\twic_pairs"]
    for arg in args.dataset:
        bundle = load_dataset(resolve_dataset_path(arg))
        stats = dataset_stats(bundle)
        n_triples = len(generate_triples(bundle))
        n_pairs = len(export_pairs(bundle))
        n_wic = len(export_pairs(bundle, wic_only=True))
        lines.append("\t".join(str(x) for x in (
            bundle.language, stats.n_homonyms, stats.n_senses,
            stats.n_cross_pos_sense_pairs, stats.n_sentences,
            n_triples, n_pairs, n_wic)))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote stats for {len(args.dataset)} dataset(s) to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_triples(args) -> int:
    bundle = load_dataset(resolve_dataset_path(args.dataset))
    ts = generate_triples(bundle)
    if args.against:
        loaded = load_triples(Path(args.against), bundle)
        only_gen, only_file = triple_set_diff(ts, loaded)
        print(f"generated={len(ts)} file={len(loaded)} "
              f"only_generated={len(only_gen)} only_file={len(only_file)}")
    if args.same_pos:
        ts = filter_same_pos(ts, bundle)
    if args.experiment:
        kept = tuple(t for t in ts.triples if t.experiment == args.experiment)
        ts = type(ts)(ts.language, kept, ts.provenance)
    out = Path(args.out) if args.out else Path(f"triples_{bundle.language}.tsv")
    write_triples(ts, out)
    print(f"wrote {len(ts)} triples to {out}")
    return 0


def cmd_export_pairs(args) -> int:
    bundle = load_dataset(resolve_dataset_path(args.dataset))
    pairs = export_pairs(bundle, wic_only=args.wic_only)
    out = Path(args.out) if args.out else Path(f"pairs_{bundle.language}.tsv")
    write_pairs(pairs, out)
    print(f"wrote {len(pairs)} pairs to {out}")
    return 0


def _load_eval_inputs(args) -> tuple[DatasetBundle, "object"]:
    bundle = load_dataset(resolve_dataset_path(args.dataset))
    if args.triples:
        ts = load_triples(Path(args.triples), bundle)
    else:
        bundled = (bundled_triples_path(bundle.language)
                   if args.dataset in LANGUAGES else None)
        ts = load_triples(bundled, bundle) if bundled else generate_triples(bundle)
    return bundle, ts


def _make_provider(args, bundle: DatasetBundle, kind: str, param: int | None):
    if args.provider == "static":
        table = load_vectors(Path(args.vectors))
        parses = load_conllu(Path(args.parses)) if args.parses else None
        return StaticProvider(table, bundle, kind, parses=parses,
                              syn_k=param if kind == "syn" else 3,
                              oov_policy=args.oov_policy)
    records = load_ceif(Path(args.ceif))
    return ContextualProvider(records, bundle, Strategy(kind, layer=param))


def _check_eval_flags(parser: argparse.ArgumentParser, args) -> tuple[str, int | None]:
    try:
        kind, param = parse_strategy(args.strategy)
    except StrategyError as exc:
        parser.error(str(exc))
    if args.provider == "static":
        if kind not in STATIC_STRATEGIES:
            parser.error(f"strategy {args.strategy!r} needs the contextual provider")
        if not args.vectors:
            parser.error("--provider static requires --vectors")
        if kind == "syn":
            if not args.parses:
                parser.error("strategy syn:<k> requires --parses")
            if param is None or not 1 <= param <= 4:
                parser.error("syn context size must be 1..4")
    else:
        if kind not in CONTEXTUAL_STRATEGIES:
            parser.error(f"strategy {args.strategy!r} needs the static provider")
        if not args.ceif:
            parser.error("--provider contextual requires --ceif")
        if kind == "lay" and (param is None or param < 0):
            parser.error("layer:<n> needs a non-negative layer number")
    return kind, param


def cmd_eval(parser, args) -> int:
    kind, param = _check_eval_flags(parser, args)
    bundle, ts = _load_eval_inputs(args)
    provider = _make_provider(args, bundle, kind, param)
    report = reporting.run_eval(ts, provider, same_pos_only=args.same_pos,
                                workers=_workers(args))
    out = Path(args.out)
    reporting.write_report_tsv(report, out)
    reporting.write_report_json(report, out.with_suffix(".json"))
    reporting.render_report_figure(report, out.with_suffix(".png"))
    cells = " ".join(
        f"{e}={_fmt(report.per_experiment[e].accuracy)}" for e in EXPERIMENTS)
    print(f"{report.language} {report.provider} same_pos={args.same_pos} "
          f"{cells} macro={_fmt(report.macro)} micro={_fmt(report.micro)} "
          f"full={_fmt(report.full.accuracy)} "
          f"({report.full.n} triples, {report.failures} failures) -> {out}")
    return 0


def cmd_layers(parser, args) -> int:
    if not args.ceif:
        parser.error("layers requires --ceif")
    bundle, ts = _load_eval_inputs(args)
    records = load_ceif(Path(args.ceif))
    curve = reporting.layer_sweep(ts, records, bundle,
                                  same_pos_only=args.same_pos,
                                  workers=_workers(args))
    out = Path(args.out)
    reporting.write_curve_tsv(curve, out)
    reporting.write_curve_json(curve, out.with_suffix(".json"))
    reporting.render_curve_figure(curve, out.with_suffix(".png"))
    best = max(curve.points, key=lambda p: -1 if p.macro is None else p.macro)
    print(f"{curve.language} {curve.provider} layers=1..{len(curve.points)} "
          f"best_macro={_fmt(best.macro)}@{best.layer} -> {out}")
    return 0


def cmd_kappa(args) -> int:
    if len(args.sheets) % 2 or not args.sheets:
        raise HomosemError("kappa expects sheet files in pairs: A1 B1 [A2 B2 ...]")
    sheet_pairs = []
    for i in range(0, len(args.sheets), 2):
        a = agreement.read_sheet(Path(args.sheets[i]))
        b = agreement.read_sheet(Path(args.sheets[i + 1]))
        sheet_pairs.append((a, b))
        print(f"kappa({a.annotator_id}, {b.annotator_id}) = "
              f"{agreement.cohen_kappa(a, b):.4f}")
    if len(sheet_pairs) > 1:
        print(f"pooled kappa = {agreement.pooled_kappa(sheet_pairs):.4f}")
    return 0


def cmd_sample(args) -> int:
    bundle = load_dataset(resolve_dataset_path(args.dataset))
    sheet = agreement.sample_pairs(bundle, args.n, args.seed,
                                   wic_only=args.wic_only)
    out = Path(args.out) if args.out else Path(f"sample_{bundle.language}.tsv")
    agreement.write_sheet(sheet, out)
    print(f"wrote {args.n} blank pairs to {out} (seed {args.seed})")
    return 0


def _fmt(value: float | None) -> str:
    return "NA" if value is None else f"{value:.3f}"


# ---------------------------------------------------------------------------
# wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homosem",
        description="Evaluation harness for homonymy and synonymy in word "
                    "embeddings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a dataset file and list findings")
    p.add_argument("--dataset", required=True)

    p = sub.add_parser("stats", help="summary table for one or more datasets")
    p.add_argument("--dataset", required=True, nargs="+")
    p.add_argument("--out")

    p = sub.add_parser("triples", help="generate (and optionally filter) triples")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.add_argument("--same-pos", action="store_true")
    p.add_argument("--experiment", choices=EXPERIMENTS + ("other",))
    p.add_argument("--against", help="triple file to diff the generator against")

    p = sub.add_parser("export-pairs", help="write the labeled sentence pairs")
    p.add_argument("--dataset", required=True)
    p.add_argument("--wic-only", action="store_true")
    p.add_argument("--out")

    for name in ("eval", "layers"):
        p = sub.add_parser(name, help="score triples and write report files"
                           if name == "eval" else "accuracy-by-layer sweep")
        p.add_argument("--dataset", required=True)
        p.add_argument("--triples")
        p.add_argument("--same-pos", action="store_true")
        p.add_argument("--workers", type=int)
        p.add_argument("--ceif")
        if name == "eval":
            p.add_argument("--provider", required=True,
                           choices=("static", "contextual"))
            p.add_argument("--strategy", required=True)
            p.add_argument("--vectors")
            p.add_argument("--parses")
            p.add_argument("--oov-policy", default="zero",
                           choices=("error", "zero", "lowercase_retry"))
            p.add_argument("--out", default="report.tsv")
        else:
            p.add_argument("--out", default="layer_curve.tsv")

    p = sub.add_parser("kappa", help="Cohen's kappa between annotation sheets")
    p.add_argument("sheets", nargs="+")

    p = sub.add_parser("sample", help="draw a blank annotation sheet")
    p.add_argument("--dataset", required=True)
    p.add_argument("-n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wic-only", action="store_true")
    p.add_argument("--out")

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": lambda: cmd_validate(args),
        "stats": lambda: cmd_stats(args),
        "triples": lambda: cmd_triples(args),
        "export-pairs": lambda: cmd_export_pairs(args),
        "eval": lambda: cmd_eval(parser, args),
        "layers": lambda: cmd_layers(parser, args),
        "kappa": lambda: cmd_kappa(args),
        "sample": lambda: cmd_sample(args),
    }
    try:
        return handlers[args.command]()
    except HomosemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
