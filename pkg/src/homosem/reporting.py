"""Evaluation runs, accuracy aggregation, layer sweeps, and report emission.

Reports are written as TSV (3-decimal accuracies, empty cells marked ``NA``)
or JSON (full precision), with a rendered figure saved alongside the
delimited output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .ceif import CeifRecord, ContextualProvider, Strategy  # noqa: E402
from .conllu import SentenceKey  # noqa: E402
from .dataset import DatasetBundle  # noqa: E402
from .errors import AlignmentError, ScoringError  # noqa: E402
from .scoring import SimilarityVerdict, score_triple  # noqa: E402
from .triples import EXPERIMENTS, EvalTriple, TripleSet  # noqa: E402


@dataclass(frozen=True)
class TripleOutcome:
    triple: EvalTriple
    verdict: SimilarityVerdict | None
    error: str | None = None

    @property
    def correct(self) -> bool:
        return self.verdict is not None and self.verdict.correct


@dataclass(frozen=True)
class ExperimentCell:
    n: int
    n_correct: int

    @property
    def accuracy(self) -> float | None:
        return None if self.n == 0 else self.n_correct / self.n


@dataclass(frozen=True)
class EvalReport:
    language: str
    provider: str
    same_pos_only: bool
    per_experiment: dict[str, ExperimentCell]
    full: ExperimentCell
    failures: int

    @property
    def macro(self) -> float | None:
        """Unweighted mean of the four experiment accuracies.

        Undefined (None) as soon as any experiment has no instances.
        """
        accs = [self.per_experiment[e].accuracy for e in EXPERIMENTS]
        if any(a is None for a in accs):
            return None
        return sum(accs) / len(accs)

    @property
    def micro(self) -> float | None:
        n = sum(self.per_experiment[e].n for e in EXPERIMENTS)
        if n == 0:
            return None
        correct = sum(self.per_experiment[e].n_correct for e in EXPERIMENTS)
        return correct / n


@dataclass(frozen=True)
class LayerPoint:
    layer: int
    accuracies: dict[str, float | None]  # per experiment
    macro: float | None


@dataclass(frozen=True)
class LayerCurve:
    language: str
    provider: str
    same_pos_only: bool
    points: tuple[LayerPoint, ...]


def aggregate(report: EvalReport) -> tuple[float | None, float | None, float | None]:
    """(macro, micro, full accuracy) of one report."""
    return report.macro, report.micro, report.full.accuracy


# ---------------------------------------------------------------------------
# running

def run_eval(ts: TripleSet, provider, same_pos_only: bool = False,
             workers: int = 1) -> EvalReport:
    """Score a triple set and fold the outcomes into a report.

    Every (sense, sentence) reference is resolved before any scoring; a
    dangling one aborts the run listing all missing keys. Per-triple
    failures (zero-norm vectors, alignment gaps) count as incorrect and are
    tallied in ``failures``.
    """
    outcomes = score_triples(ts, provider, same_pos_only, workers)
    return _fold(ts.language, getattr(provider, "describes", str(provider)),
                 same_pos_only, outcomes)


def score_triples(ts: TripleSet, provider, same_pos_only: bool = False,
                  workers: int = 1) -> list[TripleOutcome]:
    triples = [t for t in ts.triples if t.same_pos or not same_pos_only]
    refs = sorted({key for t in triples for key in _triple_keys(t)})
    missing = provider.missing_keys(refs)
    if missing:
        raise ScoringError("unresolved sentence references: " + ", ".join(missing))
    vectors = _resolve_all(provider, refs, workers)
    outcomes = []
    for t in triples:
        va, vb, vc = (vectors[key] for key in _triple_keys(t))
        problem = next((v for v in (va, vb, vc) if isinstance(v, str)), None)
        if problem is not None:
            outcomes.append(TripleOutcome(t, None, problem))
            continue
        try:
            outcomes.append(TripleOutcome(t, score_triple(va, vb, vc)))
        except ScoringError as exc:
            outcomes.append(TripleOutcome(t, None, str(exc)))
    return outcomes


def _triple_keys(t: EvalTriple) -> tuple[SentenceKey, SentenceKey, SentenceKey]:
    return ((t.lemma, *t.a), (t.lemma, *t.b), (t.lemma, *t.c))


def _resolve_all(provider, refs: list[SentenceKey], workers: int) -> dict:
    """Each reference resolved once; a failure is kept as its reason string."""

    def resolve(key: SentenceKey):
        try:
            return provider.vector(key)
        except (ScoringError, AlignmentError) as exc:
            return f"{key[0]}/{key[1]}/{key[2]}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            resolved = list(pool.map(resolve, refs))
    else:
        resolved = [resolve(key) for key in refs]
    return dict(zip(refs, resolved))


def _fold(language: str, provider: str, same_pos_only: bool,
          outcomes: list[TripleOutcome]) -> EvalReport:
    n = {e: 0 for e in EXPERIMENTS}
    correct = {e: 0 for e in EXPERIMENTS}
    full_n = full_correct = failures = 0
    for out in outcomes:
        full_n += 1
        full_correct += out.correct
        if out.error is not None:
            failures += 1
        tag = out.triple.experiment
        if tag in n:
            n[tag] += 1
            correct[tag] += out.correct
    return EvalReport(
        language=language, provider=provider, same_pos_only=same_pos_only,
        per_experiment={e: ExperimentCell(n[e], correct[e]) for e in EXPERIMENTS},
        full=ExperimentCell(full_n, full_correct),
        failures=failures,
    )


def layer_sweep(ts: TripleSet, records: dict[SentenceKey, CeifRecord],
                bundle: DatasetBundle, same_pos_only: bool = False,
                workers: int = 1) -> LayerCurve:
    """run_eval under lay(l) for every layer l = 1..L."""
    probe = ContextualProvider(records, bundle, Strategy("lay", layer=1))
    num_layers = probe.layer_count()
    points = []
    provider_name = ""
    for layer in range(1, num_layers + 1):
        provider = ContextualProvider(records, bundle, Strategy("lay", layer=layer))
        report = run_eval(ts, provider, same_pos_only, workers)
        provider_name = report.provider
        points.append(LayerPoint(
            layer=layer,
            accuracies={e: report.per_experiment[e].accuracy for e in EXPERIMENTS},
            macro=report.macro,
        ))
    return LayerCurve(language=ts.language, provider=provider_name,
                      same_pos_only=same_pos_only, points=tuple(points))


# ---------------------------------------------------------------------------
# emission

def _cell(value: float | None) -> str:
    return "NA" if value is None else f"{value:.3f}"


def write_report_tsv(report: EvalReport, path: str | Path) -> None:
    header = list(EXPERIMENTS) + ["macro", "micro", "full"]
    row = [_cell(report.per_experiment[e].accuracy) for e in EXPERIMENTS]
    row += [_cell(report.macro), _cell(report.micro), _cell(report.full.accuracy)]
    Path(path).write_text("\t".join(header) + "\n" + "\t".join(row) + "\n",
                          encoding="utf-8")


def report_to_doc(report: EvalReport) -> dict:
    return {
        "language": report.language,
        "provider": report.provider,
        "same_pos_only": report.same_pos_only,
        "per_experiment": {
            e: {"n": c.n, "correct": c.n_correct, "accuracy": c.accuracy}
            for e, c in report.per_experiment.items()
        },
        "macro": report.macro,
        "micro": report.micro,
        "full": {"n": report.full.n, "correct": report.full.n_correct,
                 "accuracy": report.full.accuracy},
        "failures": report.failures,
    }


def write_report_json(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report_to_doc(report), indent=1) + "\n",
                          encoding="utf-8")


def write_curve_tsv(curve: LayerCurve, path: str | Path) -> None:
    lines = ["\t".join(["layer"] + list(EXPERIMENTS) + ["macro"])]
    for p in curve.points:
        row = [str(p.layer)] + [_cell(p.accuracies[e]) for e in EXPERIMENTS]
        row.append(_cell(p.macro))
        lines.append("\t".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_curve_json(curve: LayerCurve, path: str | Path) -> None:
    doc = {
        "language": curve.language,
        "provider": curve.provider,
        "same_pos_only": curve.same_pos_only,
        "points": [{"layer": p.layer, "accuracies": p.accuracies, "macro": p.macro}
                   for p in curve.points],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def render_report_figure(report: EvalReport, path: str | Path) -> None:
    """Bar chart of the per-experiment and aggregate accuracies."""
    labels = list(EXPERIMENTS) + ["macro", "micro", "full"]
    values = [report.per_experiment[e].accuracy for e in EXPERIMENTS]
    values += [report.macro, report.micro, report.full.accuracy]
    heights = [0.0 if v is None else v for v in values]
    fig, ax = plt.subplots(figsize=(7, 4))
    bars = ax.bar(labels, heights, color=["#4878a8"] * 4 + ["#a85448"] * 3)
    for bar, value in zip(bars, values):
        ax.annotate("NA" if value is None else f"{value:.3f}",
                    (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(f"{report.language} — {report.provider}"
                 f"{' (same POS)' if report.same_pos_only else ''}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_curve_figure(curve: LayerCurve, path: str | Path) -> None:
    """Accuracy-by-layer lines, one per experiment plus the macro average."""
    fig, ax = plt.subplots(figsize=(7, 4))
    layers = [p.layer for p in curve.points]
    for e in EXPERIMENTS:
        ys = [np.nan if p.accuracies[e] is None else p.accuracies[e]
              for p in curve.points]
        ax.plot(layers, ys, marker="o", markersize=3, label=e)
    macro = [np.nan if p.macro is None else p.macro for p in curve.points]
    ax.plot(layers, macro, marker="s", markersize=3, linewidth=2,
            color="black", label="macro")
    ax.set_xlabel("layer")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0, 1.05)
    ax.set_xticks(layers)
    ax.legend(fontsize=8)
    ax.set_title(f"{curve.language} — {curve.provider}"
                 f"{' (same POS)' if curve.same_pos_only else ''}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
