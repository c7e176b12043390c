"""Command-line front end.

``driftspace build`` turns a corpus tree (one subdirectory per epoch) into
per-epoch space files in two passes: a global counting pass that fixes the
vocabulary filter, then per-epoch ingestion, optionally parallel across
files with worker-local partial spaces merged at the end.  The analysis
commands load space files, run one analysis, print the rendered report to
stdout and write it plus the resolved configuration under --out.

Every command is a pure function of its inputs: rerunning with identical
flags and files produces identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from . import corpus, diachronic, persistence, reports
from .errors import (
    ConfigError,
    DriftspaceError,
    MissingDataError,
    SpaceFormatError,
    TermNotFoundError,
)
from .space import (
    SemanticSpace,
    SpaceConfig,
    combine,
    inverse_log_weights,
    norm_frequency_series,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_NOT_FOUND = 4

WORKERS_ENV = "DRIFTSPACE_WORKERS"

DEFAULT_ORDER_SPAN = 2


@dataclass
class RunConfig:
    """Resolved knobs for one run; flags mirror these field names.

    A --config file (key=value lines, # comments) overrides flags; the
    fully resolved values are copied to config.txt in the run directory.
    """

    corpus_root: str | None = None
    epochs: str | None = None  # comma-separated epoch labels; None = all
    dim: int = 300
    window: int = 11
    order_span: int | None = None  # None = min(2, (window-1)/2)
    global_seed: int = 1
    perm_seed: int = 2
    weighting: str = "uniform"
    compaction: bool = True
    docs_per_line: bool = False
    float_width: int = 64
    top_k: int = 100
    min_count: int = 5
    workers: int | None = None  # None = $DRIFTSPACE_WORKERS or 1
    r_size: int = 200
    top_n: int = 5
    min_total_count: int = 1500
    thresholds: str = "0.70,0.35,0.15"
    format: str = "pretty"

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        values = {}
        for f in fields(cls):
            if hasattr(ns, f.name) and getattr(ns, f.name) is not None:
                values[f.name] = getattr(ns, f.name)
        return cls(**values)

    def resolved_order_span(self) -> int:
        if self.order_span is not None:
            return self.order_span
        return min(DEFAULT_ORDER_SPAN, (self.window - 1) // 2)

    def space_config(self) -> SpaceConfig:
        return SpaceConfig(
            dim=self.dim,
            window=self.window,
            order_span=self.resolved_order_span(),
            global_seed=self.global_seed,
            perm_seed=self.perm_seed,
            weighting=self.weighting,
            compaction=self.compaction,
        )


def _parse_config_value(raw: str):
    text = raw.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


_RUNCONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _apply_config_file(ns: argparse.Namespace) -> None:
    path = getattr(ns, "config", None)
    if not path:
        return
    path = Path(path)
    if not path.is_file():
        raise MissingDataError(f"config file not found: {path}")
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _RUNCONFIG_KEYS and not hasattr(ns, key):
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        setattr(ns, key, _parse_config_value(raw))


def _write_run_config(out_dir: Path, ns: argparse.Namespace) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [f"command={ns.command}"]
    for key in sorted(vars(ns)):
        if key in ("func", "command", "config"):
            continue
        value = getattr(ns, key)
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key}={value}")
    (out_dir / "config.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _csv(text) -> list | None:
    if text is None:
        return None
    items = [piece.strip() for piece in str(text).split(",")]
    return list(dict.fromkeys(item for item in items if item))


def _parse_thresholds(text: str):
    parts = [piece for piece in str(text).split(",") if piece.strip()]
    if len(parts) != 3:
        raise ConfigError(f"thresholds needs three comma-separated values, got {text!r}")
    try:
        return tuple(float(piece) for piece in parts)
    except ValueError:
        raise ConfigError(f"thresholds must be numbers, got {text!r}") from None


def _read_terms_file(path) -> list:
    path = Path(path)
    if not path.is_file():
        raise MissingDataError(f"terms file not found: {path}")
    terms = []
    for line in path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip().lower()
        if stripped and not stripped.startswith("#"):
            terms.append(stripped)
    if not terms:
        raise ConfigError(f"terms file is empty: {path}")
    return list(dict.fromkeys(terms))


def _resolve_workers(ns: argparse.Namespace) -> int:
    workers = getattr(ns, "workers", None)
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return workers


def _load_spaces(paths) -> list:
    return [persistence.load_space(path) for path in paths]


def _emit(ns: argparse.Namespace, report) -> int:
    fmt = ns.format
    sys.stdout.write(reports.render(report, fmt))
    out_dir = Path(ns.out)
    path = reports.write_report(report, out_dir, fmt)
    _write_run_config(out_dir, ns)
    print(f"report written to {path}", file=sys.stderr)
    return EXIT_OK


# --- build -------------------------------------------------------------------

def _build_partial(payload):
    config, label, file_names, docs_per_line, filt, weights = payload
    space = SemanticSpace(config, label, term_weights=weights)
    for doc in corpus.read_documents(label, file_names, docs_per_line):
        for sentence in corpus.filtered_stream(doc, filt, compact=config.compaction):
            space.ingest_sentence(sentence)
    return space


def _build_epoch(config, label, files, docs_per_line, filt, weights, workers):
    file_names = [str(f) for f in files]
    if workers <= 1 or len(file_names) <= 1:
        return _build_partial((config, label, file_names, docs_per_line, filt, weights))
    shards = [file_names[i::workers] for i in range(workers)]
    shards = [shard for shard in shards if shard]
    payloads = [
        (config, label, shard, docs_per_line, filt, weights) for shard in shards
    ]
    with ProcessPoolExecutor(max_workers=len(payloads)) as pool:
        partials = list(pool.map(_build_partial, payloads))
    # Merge in shard order so parallel builds stay deterministic too.
    merged = combine(partials)
    merged.epoch_label = label
    return merged


def cmd_build(ns: argparse.Namespace) -> int:
    run = RunConfig.from_namespace(ns)
    config = run.space_config()
    root = Path(ns.corpus_root)
    labels = _csv(ns.epochs) or corpus.epoch_labels(root)
    epoch_files = {label: corpus.list_epoch_files(root, label) for label in labels}
    workers = _resolve_workers(ns)

    def all_documents():
        for label in labels:
            yield from corpus.read_documents(
                label, epoch_files[label], ns.docs_per_line
            )

    stats = corpus.count_vocabulary(all_documents())
    filt = corpus.build_filter(stats, top_k=run.top_k, min_count=run.min_count)
    if not filt.retained:
        raise ConfigError(
            "the vocabulary filter retains no terms; lower min_count or top_k"
        )
    weights = None
    if config.weighting == "inverse_log_frequency":
        weights = inverse_log_weights(stats.counts)

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for label in labels:
        space = _build_epoch(
            config, label, epoch_files[label], ns.docs_per_line, filt, weights, workers
        )
        path = persistence.save_space(space, out_dir / f"{label}.space",
                                      float_width=run.float_width)
        print(
            f"{path}: {len(space.entries)} terms, "
            f"{space.ingested_tokens} retained tokens"
        )
    corpus.write_stats_tsv(stats, out_dir / "vocabulary.tsv")
    _write_run_config(out_dir, ns)
    print(
        f"vocabulary: {stats.distinct_terms} distinct terms, "
        f"{len(filt.retained)} retained after filtering"
    )
    return EXIT_OK


# --- other commands ----------------------------------------------------------

def cmd_combine(ns: argparse.Namespace) -> int:
    spaces = _load_spaces(ns.spaces)
    merged = combine(spaces)
    path = persistence.save_space(merged, ns.out)
    print(f"{path}: {len(merged.entries)} terms from {len(spaces)} spaces")
    return EXIT_OK


def cmd_trajectory(ns: argparse.Namespace) -> int:
    total = persistence.load_space(ns.total)
    epochs = _load_spaces(ns.spaces)
    extra = _read_terms_file(ns.extra_terms) if ns.extra_terms else ()
    report = diachronic.time_trajectory(
        total,
        epochs,
        ns.term,
        r_size=ns.r_size,
        top_n=ns.top_n,
        min_count=ns.min_count,
        extra_terms=extra,
    )
    return _emit(ns, report)


def cmd_drift(ns: argparse.Namespace) -> int:
    space0 = persistence.load_space(ns.space0)
    space1 = persistence.load_space(ns.space1)
    exclude = _read_terms_file(ns.exclude_file) if ns.exclude_file else ()
    report = diachronic.drift(
        space0,
        space1,
        min_total_count=ns.min_total_count,
        top_n=ns.top_n,
        thresholds=_parse_thresholds(ns.thresholds),
        exclude=exclude,
        terms=_csv(ns.terms),
    )
    return _emit(ns, report)


def cmd_bias(ns: argparse.Namespace) -> int:
    epochs = _load_spaces(ns.spaces)
    qualifiers = _read_terms_file(ns.qualifiers)
    man_terms = _read_terms_file(ns.man_terms)
    woman_terms = _read_terms_file(ns.woman_terms)
    period = None
    if ns.period:
        labels = sorted(space.epoch_label for space in epochs)
        if ":" in ns.period:
            start, _, end = ns.period.partition(":")
            period = [label for label in labels if start <= label <= end]
            if not period:
                raise ConfigError(
                    f"period {ns.period!r} selects no epochs from {labels}"
                )
        else:
            period = _csv(ns.period)
    report = diachronic.qualifier_gender(
        epochs, qualifiers, man_terms, woman_terms, period=period
    )
    return _emit(ns, report)


def cmd_equiv(ns: argparse.Namespace) -> int:
    epochs = _load_spaces(ns.spaces)
    report = diachronic.equivalents(
        epochs,
        ns.term,
        ns.anchor_epoch,
        top_k=ns.equiv_top_k,
        min_count=ns.min_count,
        exclude_self=ns.exclude_self,
    )
    return _emit(ns, report)


def cmd_predict(ns: argparse.Namespace) -> int:
    space = persistence.load_space(ns.space)
    ranked = diachronic.predict_position(
        space, ns.term, ns.offset, top_n=ns.top_n, min_count=ns.min_count
    )
    rows = [[rank, term, score] for rank, (term, score) in enumerate(ranked, 1)]
    report = reports.TableReport(
        f"predicted offset {ns.offset:+d} neighbors of {ns.term!r} "
        f"in {space.epoch_label}",
        ["rank", "term", "score"],
        rows,
    )
    return _emit(ns, report)


def cmd_neighbors(ns: argparse.Namespace) -> int:
    space = persistence.load_space(ns.space)
    query = space.term_vector(ns.term, normalized=True)
    exclude = () if ns.include_self else {ns.term}
    ranked = space.nearest_neighbors(
        query, ns.top_n, min_count=ns.min_count, exclude=exclude
    )
    rows = [[rank, term, sigma] for rank, (term, sigma) in enumerate(ranked, 1)]
    report = reports.TableReport(
        f"nearest neighbors of {ns.term!r} in {space.epoch_label}",
        ["rank", "term", "similarity"],
        rows,
    )
    return _emit(ns, report)


def cmd_normfreq(ns: argparse.Namespace) -> int:
    epochs = sorted(_load_spaces(ns.spaces), key=lambda space: space.epoch_label)
    series = norm_frequency_series(epochs, ns.term)
    rows = [[label, count, squared] for label, count, squared in series]
    report = reports.TableReport(
        f"count and squared context norm of {ns.term!r} per epoch",
        ["epoch", "count", "squared_norm"],
        rows,
    )
    return _emit(ns, report)


def cmd_inspect(ns: argparse.Namespace) -> int:
    space = persistence.load_space(ns.space)
    config = space.config
    print(f"epoch_label={space.epoch_label}")
    print(f"terms={len(space.entries)} ingested_tokens={space.ingested_tokens}")
    print(
        f"dim={config.dim} window={config.window} order_span={config.order_span} "
        f"global_seed={config.global_seed} perm_seed={config.perm_seed} "
        f"weighting={config.weighting} compaction={config.compaction}"
    )
    if ns.tsv:
        path = persistence.write_space_tsv(space, ns.tsv)
        print(f"wrote {path}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _add_report_flags(sub, default_top_n=None):
    sub.add_argument("--out", required=True, help="run directory for report + config")
    sub.add_argument("--format", choices=reports.FORMATS, default="pretty")
    sub.add_argument("--config", help="key=value file; overrides flags")
    if default_top_n is not None:
        sub.add_argument("--top-n", type=int, default=default_top_n)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftspace",
        description=(
            "Deterministic random-indexing semantic spaces per time slice, "
            "with analyses of how word usage moves between slices."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="build per-epoch space files from a corpus tree")
    build.add_argument("--corpus", dest="corpus_root", required=True)
    build.add_argument("--epochs", help="comma-separated epoch labels (default: all)")
    build.add_argument("--out", required=True)
    build.add_argument("--dim", type=int, default=300)
    build.add_argument("--window", type=int, default=11)
    build.add_argument("--order-span", type=int, default=None,
                       help="default: min(2, (window-1)/2)")
    build.add_argument("--global-seed", type=int, default=1)
    build.add_argument("--perm-seed", type=int, default=2)
    build.add_argument("--weighting", choices=("uniform", "inverse_log_frequency"),
                       default="uniform")
    build.add_argument("--no-compaction", dest="compaction", action="store_false",
                       help="keep holes where filtered tokens were")
    build.add_argument("--docs-per-line", action="store_true",
                       help="treat each line of each file as one document")
    build.add_argument("--top-k", type=int, default=100,
                       help="size of the frequency stop set")
    build.add_argument("--min-count", type=int, default=5)
    build.add_argument("--float-width", type=int, choices=(32, 64), default=64)
    build.add_argument("--workers", type=int, default=None,
                       help=f"parallel ingestion workers (default ${WORKERS_ENV} or 1)")
    build.add_argument("--config", help="key=value file; overrides flags")
    build.set_defaults(func=cmd_build)

    comb = sub.add_parser("combine", help="sum spaces built under one config")
    comb.add_argument("spaces", nargs="+")
    comb.add_argument("--out", required=True, help="output space file")
    comb.add_argument("--config", help="key=value file; overrides flags")
    comb.set_defaults(func=cmd_combine)

    traj = sub.add_parser("trajectory", help="per-epoch neighbor trajectory of a term")
    traj.add_argument("term")
    traj.add_argument("--total", required=True, help="combined space file")
    traj.add_argument("--spaces", nargs="+", required=True, help="per-epoch space files")
    traj.add_argument("--r-size", type=int, default=200)
    traj.add_argument("--min-count", type=int, default=1)
    traj.add_argument("--extra-terms", help="file of extra representative terms")
    _add_report_flags(traj, default_top_n=5)
    traj.set_defaults(func=cmd_trajectory)

    drift_cmd = sub.add_parser("drift", help="inter-period change ranking")
    drift_cmd.add_argument("--space0", required=True)
    drift_cmd.add_argument("--space1", required=True)
    drift_cmd.add_argument("--min-total-count", type=int, default=1500)
    drift_cmd.add_argument("--thresholds", default="0.70,0.35,0.15",
                           help="stable,moderate,fast boundaries")
    drift_cmd.add_argument("--exclude-file", help="file of terms to skip")
    drift_cmd.add_argument("--terms", help="comma-separated terms to restrict to")
    _add_report_flags(drift_cmd, default_top_n=15)
    drift_cmd.set_defaults(func=cmd_drift)

    bias = sub.add_parser("bias", help="gendered-qualifier attribution per year")
    bias.add_argument("--spaces", nargs="+", required=True)
    bias.add_argument("--qualifiers", required=True, help="file, one qualifier per line")
    bias.add_argument("--man-terms", required=True)
    bias.add_argument("--woman-terms", required=True)
    bias.add_argument("--period", help="label range start:end or comma list")
    _add_report_flags(bias)
    bias.set_defaults(func=cmd_bias)

    equiv = sub.add_parser("equiv", help="per-epoch equivalents of an anchor term")
    equiv.add_argument("term")
    equiv.add_argument("--anchor-epoch", required=True)
    equiv.add_argument("--spaces", nargs="+", required=True)
    equiv.add_argument("--top-k", dest="equiv_top_k", type=int, default=2)
    equiv.add_argument("--min-count", type=int, default=1)
    equiv.add_argument("--exclude-self", action="store_true")
    _add_report_flags(equiv)
    equiv.set_defaults(func=cmd_equiv)

    predict = sub.add_parser("predict", help="decode a term's positional neighbors")
    predict.add_argument("term")
    predict.add_argument("offset", type=int, help="position offset, e.g. 1 or -1")
    predict.add_argument("--space", required=True)
    predict.add_argument("--min-count", type=int, default=1)
    _add_report_flags(predict, default_top_n=5)
    predict.set_defaults(func=cmd_predict)

    neigh = sub.add_parser("neighbors", help="nearest neighbors of a term")
    neigh.add_argument("term")
    neigh.add_argument("--space", required=True)
    neigh.add_argument("--min-count", type=int, default=1)
    neigh.add_argument("--include-self", action="store_true")
    _add_report_flags(neigh, default_top_n=20)
    neigh.set_defaults(func=cmd_neighbors)

    normfreq = sub.add_parser("normfreq", help="per-epoch count and squared norm")
    normfreq.add_argument("term")
    normfreq.add_argument("--spaces", nargs="+", required=True)
    _add_report_flags(normfreq)
    normfreq.set_defaults(func=cmd_normfreq)

    inspect = sub.add_parser("inspect", help="print a space file's header; export TSV")
    inspect.add_argument("space")
    inspect.add_argument("--tsv", help="write term/count/squared-norm TSV here")
    inspect.add_argument("--config", help="key=value file; overrides flags")
    inspect.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config_file(ns)
        return ns.func(ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TermNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (MissingDataError, SpaceFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except DriftspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # anything else is a bug, not bad input
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
