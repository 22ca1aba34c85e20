"""Command-line entry point: validate, synth, experiment, analyze.

Exit codes: 0 on success, 2 when an input (corpus, lexicon, config,
synthetic spec) fails validation, 1 for any other failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import baseline, corpus, evaluation, synth
from .baseline import LexiconFormatError
from .corpus import ComponentType, CorpusFormatError
from .selection import format_manifest, parse_manifest
from .textproc import default_stopwords, load_stopwords

log = logging.getLogger("arghelp")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    corpus: str | None = None
    galc: str | None = None  # None: bundled stub lexicon
    inquirer: str | None = None
    stopwords: str | None = None
    configs: list[str] = field(default_factory=lambda: list(evaluation.STANDARD_CONFIGS))
    folds: int = 10
    seed: int = 0
    kernel: str = "rbf"
    c: float = 1.0
    gamma: float | None = None
    tol: float = 1e-3
    max_kernel_evals: int = 10**7
    merge_clauses: bool = True
    averaging: str = "weighted"
    out_dir: str = "out"

    def validate(self) -> None:
        if self.corpus is None:
            raise ConfigError("no corpus given (--corpus or 'corpus' in the config file)")
        for name in ("corpus", "galc", "inquirer", "stopwords"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name} file not found: {path}")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        if self.kernel not in ("linear", "rbf"):
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.gamma is not None and not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if self.averaging not in ("weighted", "macro"):
            raise ConfigError(f"unknown averaging mode {self.averaging!r}")
        if not self.configs:
            raise ConfigError("no feature configurations listed")
        for cfg in self.configs:
            try:
                evaluation.parse_config(cfg)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    def params(self) -> evaluation.SvmParams:
        return evaluation.SvmParams(self.kernel, self.c, self.gamma, self.tol, self.max_kernel_evals)

    def resources(self) -> evaluation.Resources:
        galc = baseline.read_lexicon(self.galc) if self.galc else baseline.stub_lexicon("galc")
        inq = baseline.read_lexicon(self.inquirer) if self.inquirer else baseline.stub_lexicon("inquirer")
        stop = load_stopwords(self.stopwords) if self.stopwords else default_stopwords()
        return evaluation.Resources(galc, inq, stop, self.merge_clauses)


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    """Read a JSON config file (optional) and apply command-line overrides."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def read_corpus(path: str) -> list[corpus.AnnotatedReview]:
    return corpus.parse_corpus(Path(path).read_text("utf-8"))


def _slug(config: str) -> str:
    return config.replace("+", "_")


# --- commands --------------------------------------------------------------


def cmd_validate(path: str, merge_clauses: bool = True) -> str:
    reviews = read_corpus(path)
    helpful = sum(r.label for r in reviews)
    head = f"{len(reviews)} reviews ({helpful} helpful, {len(reviews) - helpful} not helpful)\n\n"
    return head + corpus.format_statistics(corpus.corpus_statistics(reviews, merge_clauses))


def cmd_synth(spec: synth.SyntheticSpec) -> str:
    return corpus.dump_corpus(synth.generate(spec))


def cmd_experiment(cfg: PipelineConfig) -> str:
    """Run every configuration and write reports, manifests and the resolved config."""
    cfg.validate()
    reviews = read_corpus(cfg.corpus)
    plan = evaluation.stratified_folds([r.label for r in reviews], cfg.folds, cfg.seed)
    store = evaluation.FeatureStore(reviews, cfg.resources())
    results = []
    for config in cfg.configs:
        log.info("running %s", config)
        try:
            results.append(evaluation.run_experiment(store, config, plan, cfg.params(), cfg.averaging))
        except Exception as exc:
            raise RuntimeError(f"configuration {config}: {exc}") from exc
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = evaluation.format_table(results)
    (out / "report.txt").write_text(report, "utf-8")
    (out / "report.csv").write_text(evaluation.format_csv(results), "utf-8")
    (out / "config.json").write_text(json.dumps(dataclasses.asdict(cfg), indent=2, sort_keys=True) + "\n", "utf-8")
    for res in results:
        mdir = out / "manifests" / _slug(res.config)
        mdir.mkdir(parents=True, exist_ok=True)
        for fold in res.folds:
            if fold.skipped is None:
                (mdir / f"fold{fold.fold:02d}.tsv").write_text(format_manifest(fold.manifest), "utf-8")
    af = [r for r in results if any(f in r.families for f in evaluation.AF_FAMILIES)]
    if af:
        (out / "analysis.txt").write_text(evaluation.analysis_report(af[0].manifests), "utf-8")
    return report


def cmd_analyze(paths: Sequence[str]) -> str:
    """Pool manifest files (or directories of ``*.tsv`` manifests) into the breakdown report."""
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.tsv")))
        elif p.is_file():
            files.append(p)
        else:
            raise FileNotFoundError(f"manifest not found: {p}")
    if not files:
        raise FileNotFoundError("no manifest files found")
    return evaluation.analysis_report([parse_manifest(f.read_text("utf-8")) for f in files])


# --- argument parsing ------------------------------------------------------


def _probs(text: str) -> dict:
    """``"Claim=0.5,Premise=0.5"`` -> {ComponentType.Claim: 0.5, ...}"""
    out = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        out[ComponentType.parse(name.strip())] = float(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arghelp", description="Argument features for review helpfulness.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file and print per-type counts and kappas")
    p.add_argument("--corpus", required=True)
    p.add_argument("--merge-clauses", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("synth", help="generate a synthetic annotated corpus")
    p.add_argument("--corpus", help="output path (default: stdout)")
    p.add_argument("--config", help="JSON file with generator settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--reviews", type=int)
    p.add_argument("--signal", type=float)
    p.add_argument("--noise", type=float, dest="annotator_noise")
    p.add_argument("--annotators", type=int)
    p.add_argument("--planted", choices=synth.PLANTED_FAMILIES)
    p.add_argument("--strength", type=float)
    p.add_argument("--clauses", help="clause-count range as MIN-MAX")
    p.add_argument("--probs", help="label probabilities, e.g. Claim=0.5,Premise=0.5")

    p = sub.add_parser("experiment", help="run the cross-validated configuration table")
    p.add_argument("--corpus")
    p.add_argument("--config", help="JSON pipeline configuration; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--kernel", choices=("linear", "rbf"))
    p.add_argument("--c", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--merge-clauses", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--averaging", choices=("weighted", "macro"))
    p.add_argument("--out-dir")
    p.add_argument("--configs", help="comma-separated feature configurations, e.g. AF,STR+AF")

    p = sub.add_parser("analyze", help="feature-family breakdown of selection manifests")
    p.add_argument("manifests", nargs="*", help="manifest files or directories")
    p.add_argument("--out-dir", help="experiment output directory; uses its AF manifests")
    return parser


def _synth_spec(args) -> synth.SyntheticSpec:
    data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text("utf-8"))
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
    for key in ("seed", "reviews", "signal", "annotator_noise", "annotators", "planted", "strength"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    if args.clauses:
        lo, _, hi = args.clauses.partition("-")
        data["clause_range"] = (int(lo), int(hi or lo))
    elif "clause_range" in data:
        data["clause_range"] = tuple(data["clause_range"])
    if args.probs:
        data["label_probs"] = _probs(args.probs)
    elif "label_probs" in data:
        data["label_probs"] = {ComponentType.parse(k): float(v) for k, v in data["label_probs"].items()}
    known = {f.name for f in dataclasses.fields(synth.SyntheticSpec)}
    if set(data) - known:
        raise ConfigError(f"unknown synth keys: {', '.join(sorted(set(data) - known))}")
    spec = synth.SyntheticSpec(**data)
    spec.validate()
    return spec


def _run(args) -> str:
    if args.command == "validate":
        return cmd_validate(args.corpus, args.merge_clauses)
    if args.command == "synth":
        text = cmd_synth(_synth_spec(args))
        if args.corpus:
            Path(args.corpus).write_text(text, "utf-8")
            return ""
        return text
    if args.command == "experiment":
        overrides = {
            k: getattr(args, k)
            for k in ("corpus", "seed", "folds", "kernel", "c", "gamma", "averaging", "out_dir")
        }
        overrides["merge_clauses"] = args.merge_clauses
        if args.configs:
            overrides["configs"] = [c.strip() for c in args.configs.split(",") if c.strip()]
        return cmd_experiment(load_config(args.config, overrides))
    paths = list(args.manifests)
    if args.out_dir:
        paths.append(str(Path(args.out_dir) / "manifests" / "AF"))
    if not paths:
        raise FileNotFoundError("give manifest paths or --out-dir")
    return cmd_analyze(paths)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text = _run(args)
    except (CorpusFormatError, LexiconFormatError, ConfigError, synth.InfeasibleSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # runtime failures: I/O, non-convergence, ...
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
