"""Command-line surface: translate, align, score, evaluate, tune.

Settings come from an optional JSON config file; any flag given on the
command line wins over the config. Exit codes are stable: 0 success,
1 usage/config error, 2 data error, 3 provider error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .align import AlignmentConfig, align, write_alignment, read_report
from .corpus import Corpus, load_corpus, save_corpus
from .errors import ConfigError, DataError, ProviderError
from .lexicon import (
    EMPTY_LEXICON,
    EMPTY_STOPWORDS,
    load_stopwords,
    load_synonyms,
)
from .metrics import BP_PAPER, BP_STANDARD, evaluate_against_gold, evaluate_corpus
from .similarity import Comparator, ComparatorChain
from .translate import (
    FileProvider,
    HttpProvider,
    TranslationCache,
    translate_corpus,
)
from .tuning import TuningJob, tune_chain

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3

DEFAULT_CHAIN = "token_overlap:0.99,matching_blocks_ratio:0.85"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract says 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_chain_spec(spec: str) -> ComparatorChain:
    """Parse `kind:threshold[,kind:threshold...]` into a chain."""
    comparators = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"bad chain entry {part!r}, expected kind:threshold")
        kind, _, raw_threshold = part.partition(":")
        try:
            threshold = float(raw_threshold)
        except ValueError:
            raise ConfigError(f"bad threshold in chain entry {part!r}") from None
        comparators.append(Comparator(kind.strip(), threshold))
    if not comparators:
        raise ConfigError(f"chain spec {spec!r} has no comparators")
    return ComparatorChain(tuple(comparators))


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return config


class Settings:
    """Merged view of config file + flags (flags win), validated up front."""

    def __init__(self, args: argparse.Namespace):
        self.config = _load_config_file(getattr(args, "config", None))
        self.args = args

    def get(self, flag_name: str, config_key: str | None = None, default=None):
        value = getattr(self.args, flag_name, None)
        if value is not None:
            return value
        return self.config.get(config_key or flag_name, default)

    # -- validated pieces ------------------------------------------------

    def source_language(self) -> str:
        return self.get("source_language", default="src")

    def target_language(self) -> str:
        return self.get("target_language", default="tgt")

    def chain(self) -> ComparatorChain:
        spec = self.get("chain")
        if spec is None:
            spec = DEFAULT_CHAIN
        if isinstance(spec, str):
            return parse_chain_spec(spec)
        if isinstance(spec, list):
            comparators = []
            for entry in spec:
                try:
                    comparators.append(
                        Comparator(entry["kind"], float(entry["threshold"]))
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise ConfigError(f"bad chain entry in config: {entry!r}") from exc
            if not comparators:
                raise ConfigError("config chain is empty")
            return ComparatorChain(tuple(comparators))
        raise ConfigError("config chain must be a string spec or a list of objects")

    def window(self) -> int:
        value = int(self.get("window", default=20))
        if value < 0:
            raise ConfigError(f"window must be >= 0, got {value}")
        return value

    def lookahead(self) -> int:
        value = int(self.get("lookahead", "lookahead_depth", default=1))
        if value < 0:
            raise ConfigError(f"lookahead depth must be >= 0, got {value}")
        return value

    def cap(self) -> int:
        value = int(self.get("cap", default=64))
        if value < 1:
            raise ConfigError(f"synonym cap must be >= 1, got {value}")
        return value

    def bp_form(self) -> str:
        value = self.get("bp_form", default=BP_STANDARD)
        if value not in (BP_STANDARD, BP_PAPER):
            raise ConfigError(f"--bp-form must be standard or paper, got {value!r}")
        return value

    def stopwords(self):
        path = self.get("stopwords")
        if not path:
            return EMPTY_STOPWORDS
        self._require_file(path, "stop-word file")
        return load_stopwords(path)

    def lexicon(self):
        path = self.get("synonyms")
        if not path:
            return EMPTY_LEXICON
        self._require_file(path, "synonym file")
        return load_synonyms(path)

    def cache(self) -> TranslationCache | None:
        directory = self.get("cache", "cache_dir")
        return TranslationCache(directory) if directory else None

    def provider(self):
        kind = self.get("provider")
        settings = self.config.get("provider_settings", {})
        if isinstance(kind, dict):  # whole provider object in config
            settings, kind = kind, kind.get("type")
        if kind is None:
            raise ConfigError("no translation provider configured")
        if kind == "file":
            path = self.get("provider_path", default=settings.get("path"))
            if not path:
                raise ConfigError("file provider needs a path (--provider-path)")
            self._require_file(path, "translation file")
            return FileProvider(path)
        if kind == "http":
            endpoint = self.get("endpoint", default=settings.get("endpoint"))
            if not endpoint:
                raise ConfigError("http provider needs an endpoint URL")
            return HttpProvider(
                endpoint=endpoint,
                response_path=settings.get("response_path", ""),
                max_concurrency=int(settings.get("max_concurrency", 4)),
                timeout=float(settings.get("timeout", 10.0)),
                retries=int(settings.get("retries", 2)),
                backoff=float(settings.get("backoff", 0.25)),
            )
        raise ConfigError(f"unknown provider type {kind!r} (expected file or http)")

    def alignment_config(self) -> AlignmentConfig:
        return AlignmentConfig(
            chain=self.chain(),
            window=self.window(),
            lookahead_depth=self.lookahead(),
            cap=self.cap(),
            stopwords=self.stopwords(),
            lexicon=self.lexicon(),
        )

    @staticmethod
    def _require_file(path, description: str) -> None:
        if not Path(path).is_file():
            raise ConfigError(f"{description} not found: {path}")


def _require_input(path, description: str) -> None:
    if not Path(path).is_file():
        raise ConfigError(f"{description} not found: {path}")


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, ensure_ascii=False))


def _read_gold_lines(path) -> list[str]:
    _require_input(path, "gold file")
    text = Path(path).read_bytes().decode("utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


# -- commands -------------------------------------------------------------


def cmd_translate(args) -> int:
    settings = Settings(args)
    _require_input(args.source, "source file")
    provider = settings.provider()
    corpus = load_corpus(args.source, settings.source_language())
    stats: dict = {}
    translated = translate_corpus(
        corpus,
        provider,
        cache=settings.cache(),
        target_language=settings.target_language(),
        stats_out=stats,
    )
    save_corpus(translated, args.out)
    if args.stats:
        _print_json(stats)
    return EXIT_OK


def cmd_align(args) -> int:
    settings = Settings(args)
    config = settings.alignment_config()  # reject bad thresholds before any I/O
    _require_input(args.source, "source file")
    _require_input(args.target, "target file")
    source = load_corpus(args.source, settings.source_language())
    target = load_corpus(args.target, settings.target_language())

    trans_path = args.trans or settings.config.get("trans")
    if trans_path:
        _require_input(trans_path, "translation file")
        trans = load_corpus(trans_path, settings.target_language())
        if len(trans) != len(source):
            raise DataError(
                f"translation file has {len(trans)} lines, source has {len(source)}"
            )
    else:
        trans = translate_corpus(
            source,
            settings.provider(),
            cache=settings.cache(),
            target_language=settings.target_language(),
        )

    result = align(source, target, trans, config)
    write_alignment(result, args.out_source, args.out_target, args.report)
    _print_json(
        {
            "A": result.aligned_count,
            "T": result.translated_count,
            "D": result.disproportion_count,
            "L": result.total,
            "unmatched_targets": len(result.unmatched_target_indices),
        }
    )
    return EXIT_OK


def cmd_score(args) -> int:
    _require_input(args.report, "report file")
    result = read_report(args.report)
    gold = _read_gold_lines(args.gold)
    card = evaluate_against_gold(result, gold)
    _print_json(card.as_json_dict())
    return EXIT_OK


def cmd_evaluate(args) -> int:
    settings = Settings(args)
    _require_input(args.hyp, "hypothesis file")
    _require_input(args.ref, "reference file")
    hyp = load_corpus(args.hyp, "hyp")
    ref = load_corpus(args.ref, "ref")
    report = evaluate_corpus(
        hyp, ref, max_order=args.max_order, bp_form=settings.bp_form()
    )
    _print_json(report)
    return EXIT_OK


def cmd_tune(args) -> int:
    settings = Settings(args)
    chain = settings.chain()  # reject bad thresholds before any I/O
    for path, what in (
        (args.source, "dev source"),
        (args.target, "dev target"),
        (args.trans, "dev translation"),
    ):
        _require_input(path, f"{what} file")
    source = load_corpus(args.source, settings.source_language())
    target = load_corpus(args.target, settings.target_language())
    trans = load_corpus(args.trans, settings.target_language())
    gold = _read_gold_lines(args.gold)

    bounds = ()
    if args.bounds:
        parsed = []
        for part in args.bounds.split(","):
            lo, _, hi = part.partition(":")
            try:
                parsed.append((float(lo), float(hi)))
            except ValueError:
                raise ConfigError(f"bad bounds entry {part!r}, expected lo:hi") from None
        bounds = tuple(parsed)

    job = TuningJob(
        source=source,
        target=target,
        trans=trans,
        gold=gold,
        chain_template=chain,
        bounds=bounds,
        resolution=args.resolution,
        window=settings.window(),
        lookahead_depth=settings.lookahead(),
        cap=settings.cap(),
        stopwords=settings.stopwords(),
        lexicon=settings.lexicon(),
    )
    report = tune_chain(job)
    payload = report.as_json_dict()
    payload["config_fragment"] = report.config_fragment()
    if args.out:
        Path(args.out).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    _print_json(payload)
    return EXIT_OK


# -- argument wiring -------------------------------------------------------


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--source-language", dest="source_language")
    parser.add_argument("--target-language", dest="target_language")


def _add_chain_options(parser: _Parser) -> None:
    parser.add_argument("--chain", help="comparator chain, kind:threshold[,...]")
    parser.add_argument("--window", type=int, help="candidate window half-width (0 = full scan)")
    parser.add_argument("--lookahead", type=int, help="lookahead depth (0 = off)")
    parser.add_argument("--cap", type=int, help="synonym variant cap per sentence")
    parser.add_argument("--stopwords", help="stop-word file")
    parser.add_argument("--synonyms", help="synonym lexicon file")


def _add_provider_options(parser: _Parser) -> None:
    parser.add_argument("--provider", choices=["file", "http"], help="translation provider")
    parser.add_argument("--provider-path", dest="provider_path", help="file provider: translation file")
    parser.add_argument("--endpoint", help="http provider: URL template with {text},{src},{tgt}")
    parser.add_argument("--cache", help="translation cache directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="transalign", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("translate", help="write the intermediate translated corpus")
    _add_common(p)
    _add_provider_options(p)
    p.add_argument("--source", required=True, help="source corpus file")
    p.add_argument("--out", required=True, help="output translation file")
    p.add_argument("--stats", action="store_true", help="print provider/cache statistics")
    p.set_defaults(func=cmd_translate)

    p = commands.add_parser("align", help="reconstruct the aligned parallel corpus")
    _add_common(p)
    _add_provider_options(p)
    _add_chain_options(p)
    p.add_argument("--source", required=True, help="source corpus file")
    p.add_argument("--target", required=True, help="target corpus file to realign")
    p.add_argument("--trans", help="intermediate translation file (else auto-translate)")
    p.add_argument("--out-source", required=True, help="aligned source output")
    p.add_argument("--out-target", required=True, help="aligned target output")
    p.add_argument("--report", required=True, help="JSON-lines decision report output")
    p.set_defaults(func=cmd_align)

    p = commands.add_parser("score", help="score an alignment report against gold")
    _add_common(p)
    p.add_argument("--report", required=True, help="alignment report (JSON lines)")
    p.add_argument("--gold", required=True, help="gold target file, one line per source line")
    p.set_defaults(func=cmd_score)

    p = commands.add_parser("evaluate", help="BLEU/TER/CER between two parallel files")
    _add_common(p)
    p.add_argument("--hyp", required=True, help="hypothesis file")
    p.add_argument("--ref", required=True, help="reference file")
    p.add_argument("--max-order", type=int, default=4, help="largest n-gram order")
    p.add_argument("--bp-form", dest="bp_form", choices=[BP_STANDARD, BP_PAPER])
    p.set_defaults(func=cmd_evaluate)

    p = commands.add_parser("tune", help="binary-search comparator thresholds on a dev set")
    _add_common(p)
    _add_chain_options(p)
    p.add_argument("--source", required=True, help="dev source file")
    p.add_argument("--target", required=True, help="dev target file")
    p.add_argument("--trans", required=True, help="dev translation file")
    p.add_argument("--gold", required=True, help="gold target file for the dev set")
    p.add_argument("--bounds", help="per-comparator search bounds lo:hi[,lo:hi...]")
    p.add_argument("--resolution", type=float, default=1 / 256)
    p.add_argument("--out", help="write the tuning report JSON here")
    p.set_defaults(func=cmd_tune)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProviderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER


if __name__ == "__main__":
    sys.exit(main())
