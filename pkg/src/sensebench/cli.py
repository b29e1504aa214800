"""Command-line entry point.

Subcommands::

    sensebench task build      generate dev/test task files from an inventory
    sensebench eval wsd        run one prediction strategy over a task file
    sensebench eval phrase     correlate phrase similarities with judgments
    sensebench significance    paired permutation test between two prediction files
    sensebench freq bands      frequency-band histogram and balanced sampling

Exit status is 0 on success, 1 on usage errors and 2 on bad input data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from sensebench import phrase, tasks, wsd
from sensebench.context import load_stopwords
from sensebench.embeddings import DEFAULT_SEPARATOR, load_embeddings_file, load_sense_embeddings_file
from sensebench.errors import DataError
from sensebench.rng import DEFAULT_SEED
from sensebench.significance import DEFAULT_ROUNDS, permutation_test

logger = logging.getLogger("sensebench")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _radius(value: str):
    if value == "dep":
        return "dep"
    if value in ("1", "2", "4"):
        return int(value)
    raise argparse.ArgumentTypeError("radius must be 1, 2, 4 or dep")


def _n_senses(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if not tasks.MIN_SENSES <= n <= tasks.MAX_SENSES:
        raise argparse.ArgumentTypeError(f"n must be in [{tasks.MIN_SENSES}, {tasks.MAX_SENSES}]")
    return n


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return seed


def _existing(value: str) -> Path:
    path = Path(value)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {value}")
    return path


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _add_common(p: argparse.ArgumentParser, seed=True, output=True):
    if seed:
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    if output:
        p.add_argument("--output", "-o", type=Path, help="write line-delimited JSON records here")
        p.add_argument(
            "--format",
            choices=("table", "records"),
            default="table",
            help="what to print on stdout (default: table)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensebench", description=__doc__.split("\n\n")[0])
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    task = sub.add_parser("task", help="task generation").add_subparsers(
        dest="action", required=True, parser_class=_Parser
    )
    p = task.add_parser("build", help="generate dev/test task files from a sense inventory")
    p.add_argument("--inventory", type=_existing, required=True, help="inventory JSON document")
    p.add_argument("--n-senses", type=_n_senses, nargs="+", default=[2, 3, 4, 5], help="setups to build (2-5)")
    p.add_argument("--pos", nargs="+", choices=tasks.POS_TAGS, default=list(tasks.POS_TAGS))
    p.add_argument("--dev-fraction", type=float, default=0.2, help="fraction of lemmas in the dev split")
    p.add_argument("--inclusive", action="store_true", help="admit lexemes with exactly n senses (default: > n)")
    p.add_argument("--repeat", type=_positive, default=1, help="instances per eligible lexeme")
    p.add_argument("--out-dir", type=Path, required=True)
    _add_common(p, output=False)
    p.set_defaults(func=cmd_task_build)

    ev = sub.add_parser("eval", help="evaluation").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ev.add_parser("wsd", help="evaluate a strategy on a word-sense discrimination task file")
    p.add_argument("--tasks", type=_existing, required=True, help="task file (JSON lines)")
    p.add_argument("--strategy", choices=wsd.STRATEGIES, required=True)
    p.add_argument("--embeddings", type=_existing, help="word embedding text file")
    p.add_argument("--sense-embeddings", type=_existing, help="sense embedding text file")
    p.add_argument("--separator", default=DEFAULT_SEPARATOR, help="lemma/sense separator in sense embeddings")
    p.add_argument("--labels", type=_existing, help="sentence<TAB>sense_id file for multi-oracle")
    p.add_argument("--radius", type=_radius, default=2, help="1, 2, 4 or dep (default 2)")
    stop = p.add_mutually_exclusive_group()
    stop.add_argument("--stopwords", type=_existing, help="stop list, one token per line (default: bundled list)")
    stop.add_argument("--no-stopwords", action="store_true", help="keep stop words")
    p.add_argument("--oov-policy", choices=("random", "fail"), default="random")
    p.add_argument("--freq", type=_existing, help="token<TAB>count table for per-band accuracy")
    p.add_argument("--predictions", type=Path, help="write per-instance predictions here")
    p.add_argument("--jobs", type=_positive, default=None, help="worker processes (default: available cores)")
    _add_common(p)
    p.set_defaults(func=cmd_eval_wsd)

    p = ev.add_parser("phrase", help="phrase similarity against human judgments")
    p.add_argument("--pairs", type=_existing, required=True, help="judgment file")
    p.add_argument("--embeddings", type=_existing, help="word embedding text file")
    p.add_argument("--sense-embeddings", type=_existing, help="sense embedding text file")
    p.add_argument("--separator", default=DEFAULT_SEPARATOR)
    p.add_argument("--mode", choices=phrase.SCORE_MODES, nargs="+", default=None, help="single | max | min | mean")
    p.add_argument("--per-pair", action="store_true", help="correlate with per-pair mean judgments")
    p.add_argument("--name", default=None, help="model name in the table")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_eval_phrase)

    p = sub.add_parser("significance", help="paired permutation test between two prediction files")
    p.add_argument("predictions", type=_existing, nargs=2, help="two prediction files over the same task file")
    p.add_argument("--rounds", type=_positive, default=DEFAULT_ROUNDS, help=f"default {DEFAULT_ROUNDS}")
    _add_common(p)
    p.set_defaults(func=cmd_significance)

    fq = sub.add_parser("freq", help="frequency analysis").add_subparsers(
        dest="action", required=True, parser_class=_Parser
    )
    p = fq.add_parser("bands", help="lemma counts per frequency band; optional balanced sample")
    p.add_argument("--freq", type=_existing, required=True, help="token<TAB>count table")
    p.add_argument("--tasks", type=_existing, required=True, help="task file")
    p.add_argument("--merged", action="store_true", help="use the merged [1,10k) [10k,50k) [50k,inf) bands")
    p.add_argument("--balanced-out", type=Path, help="write an equal-per-band sample of the tasks here")
    _add_common(p)
    p.set_defaults(func=cmd_freq_bands)
    return parser


# -- helpers ------------------------------------------------------------------


def _write_records(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def _emit(args, records: list[dict], table: str) -> None:
    if args.output is not None:
        _write_records(args.output, records)
    if args.format == "records":
        for rec in records:
            print(json.dumps(rec, sort_keys=True, ensure_ascii=False))
    else:
        print(table)


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [" | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines)


def _load_model(args, need: str | None):
    if args.embeddings and args.sense_embeddings:
        raise UsageError("give either --embeddings or --sense-embeddings, not both")
    if need == "word" and not args.embeddings:
        if args.sense_embeddings:
            raise UsageError("this strategy needs word embeddings (--embeddings), got sense embeddings")
        raise UsageError("--embeddings is required")
    if need == "sense" and not args.sense_embeddings:
        if args.embeddings:
            raise UsageError("this strategy needs sense embeddings (--sense-embeddings), got word embeddings")
        raise UsageError("--sense-embeddings is required")
    if need == "any" and not (args.embeddings or args.sense_embeddings):
        raise UsageError("--embeddings or --sense-embeddings is required")
    if args.embeddings and need in ("word", "any"):
        return load_embeddings_file(args.embeddings)
    if args.sense_embeddings and need in ("sense", "any"):
        return load_sense_embeddings_file(args.sense_embeddings, args.separator)
    return None


def load_labels(path: Path) -> dict[str, str]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            sentence, sep, sense = line.rpartition("\t")
            if not sep or not sentence.strip() or not sense.strip():
                raise DataError(f"{path}:{lineno}: expected 'sentence<TAB>sense_id'")
            labels[" ".join(sentence.lower().split())] = sense.strip()
    return labels


def _read_predictions(path: Path) -> dict[str, dict]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key, correct = str(rec["instance_id"]), rec["correct"]
            except (json.JSONDecodeError, KeyError, TypeError):
                raise DataError(f"{path}:{lineno}: not a prediction record with instance_id and correct") from None
            if key in out:
                raise DataError(f"{path}:{lineno}: duplicate instance id {key!r}")
            out[key] = {"correct": bool(correct)}
    return out


# -- subcommands --------------------------------------------------------------


def cmd_task_build(args) -> int:
    inventory = tasks.load_inventory(args.inventory)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    rows = [["Setup", "POS", *(f"{n} senses" for n in args.n_senses)]]
    counts: dict[str, dict[int, tuple[int, int]]] = {p: {} for p in (*tasks.POS_TAGS, "total")}
    for n in args.n_senses:
        spec = tasks.TaskSpec(n, args.seed, args.dev_fraction, tuple(args.pos), args.inclusive, args.repeat)
        instances = tasks.build_instances(inventory, spec)
        dev, test = tasks.split_dev_test(instances, spec)
        tasks.write_instances(dev, args.out_dir / f"n{n}.dev.jsonl")
        tasks.write_instances(test, args.out_dir / f"n{n}.test.jsonl")
        dc, tc = tasks.pos_counts(dev), tasks.pos_counts(test)
        for pos in tasks.POS_TAGS:
            counts[pos][n] = (dc[pos], tc[pos])
        counts["total"][n] = (len(dev), len(test))
    for pos, per_n in counts.items():
        rows.append(["dev/test", pos, *(f"{per_n[n][0]}/{per_n[n][1]}" for n in args.n_senses)])
    table = _align(rows)
    header = (
        f"# seed={args.seed} inclusive={args.inclusive} repeat={args.repeat} "
        f"dropped_examples={inventory.report.drop_count}\n"
    )
    (args.out_dir / "stats.txt").write_text(header + table + "\n", encoding="utf-8")
    print(table)
    return EXIT_OK


def cmd_eval_wsd(args) -> int:
    need = {"single": "word", "multi": "sense", "multi-oracle": "sense"}.get(args.strategy)
    model = _load_model(args, need)
    labels = None
    if args.strategy == "multi-oracle":
        if args.labels is None:
            raise UsageError("--labels is required for strategy multi-oracle")
        labels = load_labels(args.labels)
    if args.no_stopwords:
        stopwords = frozenset()
    else:
        stopwords = load_stopwords(args.stopwords)
    instances = tasks.read_instances(args.tasks)
    if not instances:
        raise DataError(f"{args.tasks}: no instances")
    freq = tasks.load_frequencies(args.freq) if args.freq else None
    settings = wsd.RunSettings(args.strategy, args.radius, stopwords, args.seed, args.oov_policy)
    jobs = args.jobs or wsd.default_jobs()
    preds = wsd.run_strategy(instances, settings, model, labels, jobs=jobs)
    report = wsd.evaluate(preds, instances, freq)
    if args.predictions is not None:
        _write_records(args.predictions, (p.to_record(i.gold_index) for p, i in zip(preds, instances)))
    record = {
        "strategy": args.strategy,
        "radius": args.radius,
        "seed": args.seed,
        "tasks": args.tasks.name,
        **vars(report),
    }
    rows = [["Group", "Accuracy", "N"], ["all", f"{report.accuracy:.4f}", str(report.n_instances)]]
    pos_n = {p: sum(i.pos == p for i in instances) for p in report.per_pos}
    rows += [[f"pos:{p}", f"{a:.4f}", str(pos_n[p])] for p, a in report.per_pos.items()]
    if freq is not None:
        band_n: dict[str, int] = {}
        for inst in instances:
            label = tasks.assign_band(freq, inst.lemma)[0]
            band_n[label] = band_n.get(label, 0) + 1
        rows += [[f"band:{b}", f"{a:.4f}", str(band_n[b])] for b, a in report.per_band.items()]
    table = _align(rows) + (
        f"\nstrategy={args.strategy} radius={args.radius} seed={args.seed} "
        f"ties={report.ties} unscoreable={report.unscoreable} oov_context={report.oov_context}"
    )
    _emit(args, [record], table)
    return EXIT_OK


def cmd_eval_phrase(args) -> int:
    modes = args.mode or (["single"] if args.embeddings else ["max", "min", "mean"])
    model = _load_model(args, "any")
    if "single" in modes and not args.embeddings:
        raise UsageError("mode single needs --embeddings; use max/min/mean with sense embeddings")
    pairs = phrase.load_pairs_file(args.pairs)
    if not pairs:
        raise DataError(f"{args.pairs}: no judgments")
    name = args.name or (args.embeddings or args.sense_embeddings).stem
    reports = [(f"{name}:{m}" if m != "single" else name, phrase.evaluate_correlation(model, pairs, m, args.per_pair)) for m in modes]
    records = [{"model": label, "per_pair": args.per_pair, **vars(rep)} for label, rep in reports]
    for rec in records:
        if rec["average"] != rec["average"]:
            rec["average"] = None
    table = phrase.format_table(reports)
    skipped = reports[0][1].skipped_pairs
    table += f"\npairs={reports[0][1].n_pairs} skipped_oov={skipped} observations={'pair means' if args.per_pair else 'judgments'}"
    _emit(args, records, table)
    return EXIT_OK


def cmd_significance(args) -> int:
    a, b = (_read_predictions(p) for p in args.predictions)
    if set(a) != set(b):
        only = sorted(set(a) ^ set(b))
        raise DataError(f"prediction files cover different instances (e.g. {only[0]!r})")
    ids = sorted(a)
    ca = [int(a[i]["correct"]) for i in ids]
    cb = [int(b[i]["correct"]) for i in ids]
    res = permutation_test(ca, cb, args.rounds, args.seed)
    acc_a, acc_b = sum(ca) / len(ca), sum(cb) / len(cb)
    record = {"a": args.predictions[0].name, "b": args.predictions[1].name, "accuracy_a": acc_a, "accuracy_b": acc_b}
    record.update(res.to_record())
    table = _align(
        [
            ["System", "Accuracy"],
            [args.predictions[0].name, f"{acc_a:.4f}"],
            [args.predictions[1].name, f"{acc_b:.4f}"],
        ]
    )
    table += (
        f"\n|diff|={res.observed_diff:.4f} p={res.p_value:.4g} (two-sided, rounds={res.rounds}, "
        f"seed={res.seed}, n={res.n})"
    )
    _emit(args, [record], table)
    return EXIT_OK


def cmd_freq_bands(args) -> int:
    edges = tasks.MERGED_BAND_EDGES if args.merged else tasks.BAND_EDGES
    freq = tasks.load_frequencies(args.freq, edges)
    instances = tasks.read_instances(args.tasks)
    lemmas = sorted({i.lemma for i in instances})
    per_band = {label: 0 for label in freq.labels}
    missing = 0
    for lemma in lemmas:
        label, unknown = tasks.assign_band(freq, lemma)
        per_band[label] += 1
        missing += unknown
    records = [{"band": label, "lemmas": n} for label, n in per_band.items()]
    rows = [["Band", "Lemmas"], *([label, str(n)] for label, n in per_band.items())]
    table = _align(rows) + f"\nunknown_lemmas={missing}"
    if args.balanced_out is not None:
        sample = tasks.sample_equal_bands(instances, freq, args.seed, edges)
        tasks.write_instances(sample, args.balanced_out)
        table += f"\nbalanced sample: {len(sample)} instances ({len(sample) // len(per_band)} per band)"
        records.append({"balanced_sample": len(sample), "seed": args.seed})
    _emit(args, records, table)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sensebench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"sensebench: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
