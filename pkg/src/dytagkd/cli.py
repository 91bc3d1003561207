"""Command line interface.

Subcommands:
    ingest       generate a synthetic dataset or normalize an existing one
    embed-cache  materialize embedding cache files and prompt manifests,
                 or verify that an existing cache covers a dataset
    train        train one task and write report, metrics CSV and checkpoint
    ablate       run the distillation-weight sweep and feature toggles

Exit codes: 0 success, 1 configuration problem (bad flags, bad config
file), 2 dataset problem (missing or malformed files), 3 embedding cache
problem (missing files, format errors, absent keys).

The DYTAG_LOG environment variable (quiet|info|debug) controls verbosity.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from .embed import (
    EmbeddingCache,
    FileProvider,
    HASH_SEED_ENC,
    HASH_SEED_LLM,
    HashProvider,
    LINK_PROMPTS_EMB,
    NEIGHBOR_PROMPTS_EMB,
    NODE_TEXT_EMB,
    RELATION_TEXT_EMB,
    dataset_prompts,
    escape_prompt_line,
    file_providers,
    link_prompt,
    neighbor_prompt,
    parse_provider_spec,
)
from .errors import (
    ConfigError,
    DanglingReference,
    DimMismatch,
    DuplicateId,
    DytagError,
    EmptyGraph,
    FormatError,
    MissingKey,
    ParseError,
    SamplingExhausted,
)
from .graph import DyTag, SplitSpec, chronological_split
from .ingest import SyntheticSpec, gen_synthetic, load_dataset, write_dataset
from .nn import save_checkpoint
from .train import TrainConfig, ablation_run, epoch_negatives, run_experiment, write_report

log = logging.getLogger("dytagkd")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_CACHE = 3

GOLDEN_PROMPTS_FILE = "prompts.golden.txt"
NEGATIVE_PROMPTS_FILE = "prompts.negatives.txt"

_DATA_ERRORS = (
    ParseError,
    DanglingReference,
    DuplicateId,
    EmptyGraph,
    SamplingExhausted,
    FileNotFoundError,
    ValueError,
    OSError,
)
_CACHE_ERRORS = (FormatError, MissingKey, DimMismatch, FileNotFoundError, OSError)


class _CliExit(Exception):
    def __init__(self, code: int):
        self.code = code


def _die(code: int, message: str) -> None:
    log.error(message)
    raise _CliExit(code)


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _CliExit(EXIT_CONFIG)


def _setup_logging() -> None:
    levels = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    level = levels.get(os.environ.get("DYTAG_LOG", "info"), logging.INFO)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(TrainConfig)}


def load_config_file(path: str | None) -> dict:
    """Raw config dict from JSON; unknown keys are rejected."""
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(raw) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def build_config(config_path: str | None, overrides: dict) -> tuple[TrainConfig, dict]:
    """Merge file values and flag overrides into a TrainConfig. Returns the
    config plus the raw file dict (callers check explicit-key conflicts)."""
    raw = load_config_file(config_path)
    merged = dict(raw)
    if "split" in merged:
        ratios = merged["split"]
        if isinstance(ratios, dict):
            ratios = ratios.get("ratios")
        if not isinstance(ratios, (list, tuple)) or len(ratios) != 3:
            raise ConfigError("config key 'split' must be a list of three ratios")
        merged["split"] = SplitSpec(tuple(float(r) for r in ratios))
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    try:
        return TrainConfig(**merged), raw
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def _config_overrides(args: argparse.Namespace) -> dict:
    out = {
        "seed": args.seed,
        "epochs": args.epochs,
        "lambda_kd": args.lambda_kd,
        "lambda_flp": args.lambda_flp,
        "lambda_ec": args.lambda_ec,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "workers": args.workers,
    }
    if args.no_kd:
        out["kd_enabled"] = False
    if args.no_temporal_encoding:
        out["temporal_encoding_enabled"] = False
    return out


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of training configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lambda-kd", dest="lambda_kd", type=float)
    p.add_argument("--lambda-flp", dest="lambda_flp", type=float)
    p.add_argument("--lambda-ec", dest="lambda_ec", type=float)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument(
        "--no-temporal-encoding", action="store_true",
        help="zero out the temporal encoding feature fed to message passing",
    )
    p.add_argument(
        "--no-kd", action="store_true", help="disable the distillation loss entirely"
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="dytagkd", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_ing = sub.add_parser("ingest", help="create or normalize a dataset directory")
    p_ing.add_argument("--dataset", help="existing dataset directory to normalize")
    p_ing.add_argument("--synthetic", action="store_true", help="generate a fixture")
    p_ing.add_argument("--out", required=True, help="output dataset directory")
    p_ing.add_argument("--seed", type=int, default=0)
    p_ing.add_argument("--communities", type=int, default=4)
    p_ing.add_argument("--community-size", dest="community_size", type=int, default=8)
    p_ing.add_argument("--timesteps", type=int, default=20)
    p_ing.add_argument("--k", type=int, default=0, help="future horizon length")
    p_ing.add_argument("--intra", type=float, default=0.2)
    p_ing.add_argument("--inter", type=float, default=0.01)
    p_ing.add_argument("--labels", type=int, default=2)

    p_emb = sub.add_parser(
        "embed-cache", help="write embedding cache files and prompt manifests"
    )
    p_emb.add_argument("--dataset", required=True)
    p_emb.add_argument("--k", type=int, default=0)
    p_emb.add_argument("--out", help="cache directory to write")
    p_emb.add_argument("--provider", default="hash", help="hash or file:<dir>")
    p_emb.add_argument("--d-enc", dest="d_enc", type=int)
    p_emb.add_argument("--d-llm", dest="d_llm", type=int)
    _add_config_flags(p_emb)

    p_tr = sub.add_parser("train", help="train one task and write reports")
    p_tr.add_argument("--dataset", required=True)
    p_tr.add_argument("--k", type=int, default=0)
    p_tr.add_argument("--task", required=True, choices=("flp", "ec"))
    p_tr.add_argument("--out", required=True, help="output directory")
    p_tr.add_argument("--provider", default="hash", help="hash or file:<dir>")
    _add_config_flags(p_tr)

    p_ab = sub.add_parser("ablate", help="distillation sweep and feature toggles")
    p_ab.add_argument("--dataset", required=True)
    p_ab.add_argument("--k", type=int, default=0)
    p_ab.add_argument("--task", required=True, choices=("flp", "ec"))
    p_ab.add_argument("--out", required=True)
    p_ab.add_argument("--provider", default="hash", help="hash or file:<dir>")
    _add_config_flags(p_ab)

    return parser


def _load_graph(dataset: str, k: int) -> DyTag:
    try:
        g = load_dataset(dataset, k)
    except _DATA_ERRORS as exc:
        _die(EXIT_DATA, f"cannot load dataset {dataset}: {exc}")
    log.info(
        "loaded %s: %d nodes, %d edges, T=%d, k=%d, %d labels",
        dataset, g.node_count, g.num_edges, g.time_horizon.T, g.time_horizon.k,
        g.label_vocab.size,
    )
    return g


def _parse_provider(spec: str) -> tuple[str, str | None]:
    try:
        return parse_provider_spec(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _providers(spec: str, cfg: TrainConfig) -> tuple:
    """(enc, llm, label, cfg): file providers force their dimensions into
    the config; an explicit conflicting dimension is a config error."""
    kind, path = _parse_provider(spec)
    if kind == "hash":
        return (
            HashProvider(cfg.d_enc, HASH_SEED_ENC),
            HashProvider(cfg.d_llm, HASH_SEED_LLM),
            "hash",
            cfg,
        )
    try:
        enc, llm = file_providers(path)
    except _CACHE_ERRORS as exc:
        _die(EXIT_CACHE, f"cannot open embedding cache {path}: {exc}")
    cfg = dataclasses.replace(cfg, d_enc=enc.dim, d_llm=llm.dim)
    return enc, llm, spec, cfg


def required_texts(g: DyTag, cfg: TrainConfig) -> dict[str, list[str]]:
    """Every text each provider may be asked to embed for this graph and
    configuration, grouped by cache file."""
    node_texts = []
    seen: set[str] = set()
    for u in range(g.node_count):
        t = g.node_text(u)
        if t not in seen:
            seen.add(t)
            node_texts.append(t)
    rel_texts = []
    seen = set()
    for _, t in g.relation_text.entries:
        if t not in seen:
            seen.add(t)
            rel_texts.append(t)

    nbr_prompts = []
    seen = set()
    for e in g.edges:
        p = neighbor_prompt(g, e)
        if p not in seen:
            seen.add(p)
            nbr_prompts.append(p)

    link_prompts = []
    seen = set()

    def add_link(p: str) -> None:
        if p not in seen:
            seen.add(p)
            link_prompts.append(p)

    for e in g.edges:
        add_link(link_prompt(g, e, True))
        add_link(link_prompt(g, e, False))
    train_idx, _, _ = chronological_split(g, cfg.split)
    for epoch in range(cfg.epochs):
        for fake in epoch_negatives(g, train_idx, cfg, epoch):
            add_link(link_prompt(g, fake, False))

    return {
        NODE_TEXT_EMB: node_texts,
        RELATION_TEXT_EMB: rel_texts,
        NEIGHBOR_PROMPTS_EMB: nbr_prompts,
        LINK_PROMPTS_EMB: link_prompts,
    }


def write_prompt_manifests(g: DyTag, cfg: TrainConfig, out_dir: Path) -> None:
    """Two escaped-line manifests: the dataset-derived prompts (golden,
    order-stable for byte comparison) and the training-time negative
    existence prompts implied by the configuration."""
    golden = dataset_prompts(g)
    (out_dir / GOLDEN_PROMPTS_FILE).write_text(
        "".join(escape_prompt_line(p) + "\n" for p in golden), encoding="utf-8"
    )
    train_idx, _, _ = chronological_split(g, cfg.split)
    seen: set[str] = set()
    negatives: list[str] = []
    for epoch in range(cfg.epochs):
        for fake in epoch_negatives(g, train_idx, cfg, epoch):
            p = link_prompt(g, fake, False)
            if p not in seen:
                seen.add(p)
                negatives.append(p)
    (out_dir / NEGATIVE_PROMPTS_FILE).write_text(
        "".join(escape_prompt_line(p) + "\n" for p in negatives), encoding="utf-8"
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    if args.synthetic == bool(args.dataset):
        _die(EXIT_CONFIG, "ingest needs exactly one of --synthetic or --dataset")
    if args.synthetic:
        try:
            spec = SyntheticSpec(
                num_communities=args.communities,
                nodes_per_community=args.community_size,
                T=args.timesteps,
                k=args.k,
                intra_edge_prob=args.intra,
                inter_edge_prob=args.inter,
                num_labels=args.labels,
                seed=args.seed,
            )
        except ValueError as exc:
            _die(EXIT_CONFIG, f"bad synthetic parameters: {exc}")
        g = gen_synthetic(spec)
    else:
        g = _load_graph(args.dataset, args.k)
    try:
        write_dataset(g, args.out)
    except OSError as exc:
        _die(EXIT_DATA, f"cannot write dataset: {exc}")
    log.info(
        "wrote %s: %d nodes, %d edges, T=%d, %d labels",
        args.out, g.node_count, g.num_edges, g.time_horizon.T, g.label_vocab.size,
    )
    return EXIT_OK


def cmd_embed_cache(args: argparse.Namespace) -> int:
    overrides = _config_overrides(args)
    if args.d_enc is not None:
        overrides["d_enc"] = args.d_enc
    if args.d_llm is not None:
        overrides["d_llm"] = args.d_llm
    cfg, _ = build_config(args.config, overrides)
    g = _load_graph(args.dataset, args.k)
    needed = required_texts(g, cfg)

    kind, path = _parse_provider(args.provider)
    if kind == "hash":
        if not args.out:
            _die(EXIT_CONFIG, "embed-cache with the hash provider requires --out")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        enc = HashProvider(cfg.d_enc, HASH_SEED_ENC)
        llm = HashProvider(cfg.d_llm, HASH_SEED_LLM)
        for fname, texts in needed.items():
            provider = enc if fname in (NODE_TEXT_EMB, RELATION_TEXT_EMB) else llm
            cache = EmbeddingCache(provider.dim)
            cache.populate(provider, texts)
            cache.save(out / fname)
            log.info("wrote %s (%d entries)", out / fname, len(cache))
        write_prompt_manifests(g, cfg, out)
        return EXIT_OK

    # file provider: verify the cache resolves every text this graph and
    # configuration can ask for
    try:
        enc_p, llm_p = file_providers(path)
        for fname, texts in needed.items():
            provider = enc_p if fname in (NODE_TEXT_EMB, RELATION_TEXT_EMB) else llm_p
            for t in texts:
                provider.embed(t)
    except _CACHE_ERRORS as exc:
        _die(EXIT_CACHE, f"cache at {path} does not cover the dataset: {exc}")
    log.info("cache at %s covers dataset %s", path, args.dataset)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for fname, texts in needed.items():
            provider = enc_p if fname in (NODE_TEXT_EMB, RELATION_TEXT_EMB) else llm_p
            cache = EmbeddingCache(provider.dim)
            cache.populate(provider, texts)
            cache.save(out / fname)
        write_prompt_manifests(g, cfg, out)
        log.info("re-exported normalized cache to %s", out)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg, raw = build_config(args.config, _config_overrides(args))
    g = _load_graph(args.dataset, args.k)
    enc, llm, label, cfg2 = _providers(args.provider, cfg)
    for dim_key, dim_val in (("d_enc", cfg2.d_enc), ("d_llm", cfg2.d_llm)):
        if dim_key in raw and raw[dim_key] != dim_val:
            _die(
                EXIT_CONFIG,
                f"config sets {dim_key}={raw[dim_key]} but the cache provides {dim_val}",
            )
    name = Path(args.dataset).name or "dataset"
    try:
        report, params = run_experiment(g, cfg2, args.task, enc, llm, name, label)
    except ConfigError as exc:
        _die(EXIT_CONFIG, str(exc))
    except MissingKey as exc:
        _die(EXIT_CACHE, f"embedding cache is missing keys: {exc}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = write_report(report, out)
    ckpt = out / f"model_{name}_{args.task}_s{cfg2.seed}.ckpt"
    save_checkpoint(ckpt, params)
    log.info("wrote %s, %s, %s", json_path, csv_path, ckpt)
    test = report.metrics["test"]["transductive"]
    if test:
        headline = (
            f"roc_auc={test['roc_auc']:.4f} ap={test['average_precision']:.4f}"
            if args.task == "flp"
            else f"weighted_f1={test['weighted_f1']:.4f} accuracy={test['accuracy']:.4f}"
        )
        log.info("test (transductive): %s", headline)
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg, _ = build_config(args.config, _config_overrides(args))
    g = _load_graph(args.dataset, args.k)
    enc, llm, label, cfg2 = _providers(args.provider, cfg)
    name = Path(args.dataset).name or "dataset"
    try:
        result = ablation_run(g, cfg2, args.task, enc, llm, name, label)
    except ConfigError as exc:
        _die(EXIT_CONFIG, str(exc))
    except MissingKey as exc:
        _die(EXIT_CACHE, f"embedding cache is missing keys: {exc}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"ablation_{name}_{args.task}_s{cfg2.seed}.json"
    path.write_text(json.dumps(result, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    log.info("wrote %s", path)
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "embed-cache": cmd_embed_cache,
    "train": cmd_train,
    "ablate": cmd_ablate,
}


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliExit as stop:
        return stop.code
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except DytagError as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
