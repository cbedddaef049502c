"""Command-line interface: generate, attack, mask, build, evaluate, analyze.

Exit codes: 0 success, 2 usage errors, 3 I/O or file-format errors,
4 validation errors. All randomness flows from explicit --seed flags;
there is no wall-clock seeding. Set NETROBUST_LOG=INFO (or DEBUG) for
progress output.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .attacks import (
    AttackSpec,
    RemovalSequence,
    simulate_attack,
    simulate_attack_mean,
    write_curve_csv,
    write_removal_csv,
)
from .dataset import (
    Experiment1Params,
    Experiment2Params,
    build_experiment1,
    build_experiment2,
    load_manifest,
    read_image,
    write_image,
)
from .errors import FormatError, NetrobustError, ValidationError
from .generators import NetConfig, generate
from .graph import read_edge_list, write_edge_list
from .masking import MaskSpec, apply_mask, sample_mask_position
from .reports import (
    cell_label,
    config_label,
    diff_report,
    evaluate_predictions,
    paired_mae_increase,
    read_error_report,
    sweep_reports,
    write_error_report,
)
from .rng import Rng

logger = logging.getLogger("netrobust")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":", None):
            parts = line.split(sep, 1) if sep else line.split(None, 1)
            if len(parts) == 2 and parts[1].strip():
                values[parts[0].strip().lower().replace("-", "_")] = parts[1].strip()
                break
        else:
            raise ValidationError(f"cannot parse config line: {raw!r}")
    return values


# accepted spellings for config-file keys whose flag is named differently
_CONFIG_KEY_ALIASES = {"k_avg": "k", "in": "input"}


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from the --config file; explicit flags win."""
    if not getattr(args, "config", None):
        return
    file_values = _read_config_file(args.config)
    for key, raw in file_values.items():
        name = key if hasattr(args, key) else _CONFIG_KEY_ALIASES.get(key, key)
        if not hasattr(args, name):
            parser.error(f"unknown key {key!r} in config file {args.config}")
        if getattr(args, name) is None:
            setattr(args, name, raw)


def _require(args: argparse.Namespace, parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            parser.error(f"--{name.replace('_', '-')} is required (flag or config file)")


def _csv_list(text: str, conv):
    return tuple(conv(part.strip()) for part in str(text).split(",") if part.strip())


# -- subcommand implementations -----------------------------------------------


def _cmd_gen(args, parser) -> int:
    _require(args, parser, "topology", "n", "k", "seed", "out")
    cfg = NetConfig(topology=args.topology, n=int(args.n), k_avg=float(args.k), seed=int(args.seed))
    g = generate(cfg)
    write_edge_list(g, args.out)
    logger.info("wrote %s: n=%d m=%d", args.out, g.n, g.n_edges)
    return EXIT_OK


def _cmd_attack(args, parser) -> int:
    _require(args, parser, "input", "strategy", "kind", "out")
    strategy = str(args.strategy).lower()
    if strategy == "ra" and args.seed is None:
        parser.error("--seed is required for random attacks")
    seed = int(args.seed) if args.seed is not None else 0
    spec = AttackSpec(strategy=strategy, mode=str(args.mode), seed=seed)
    g = read_edge_list(args.input)
    repeats = int(args.repeats)
    if repeats > 1:
        if args.order_out:
            parser.error("--order-out is not available when averaging over --repeats")
        curve = simulate_attack_mean(g, spec, args.kind, repeats=repeats)
    else:
        seq, curve = simulate_attack(g, spec, args.kind, recompute_every=int(args.recompute_every))
        if args.order_out:
            write_removal_csv(seq, args.order_out)
    write_curve_csv(curve, args.out)
    logger.info("wrote %s: %d curve values", args.out, len(curve.values))
    return EXIT_OK


def _cmd_mask(args, parser) -> int:
    _require(args, parser, "input", "kind", "size", "out")
    img = read_image(args.input)
    size = int(args.size)
    if (args.row is None) != (args.col is None):
        parser.error("--row and --col must be given together")
    if args.row is not None:
        row, col = int(args.row), int(args.col)
    else:
        if args.seed is None:
            parser.error("either --row/--col or --seed is required to place the mask")
        row, col = sample_mask_position(img.height, size, Rng(int(args.seed)))
    spec = MaskSpec(kind=str(args.kind), size=size, row=row, col=col)
    write_image(apply_mask(img, spec), args.out)
    logger.info("wrote %s: %s mask of size %d at (%d, %d)", args.out, spec.kind, size, row, col)
    return EXIT_OK


def _common_dataset_args(args, parser):
    _require(args, parser, "out_dir", "n", "topologies", "k_list", "strategy", "kind", "seed")
    return dict(
        n=int(args.n),
        k_avg_list=_csv_list(args.k_list, float),
        topologies=_csv_list(args.topologies, str),
        attack=AttackSpec(strategy=str(args.strategy), mode=str(args.mode), seed=0),
        curve_kind=str(args.kind),
        master_seed=int(args.seed),
        attack_repeats=int(args.repeats),
    )


def _cmd_dataset_exp1(args, parser) -> int:
    _require(args, parser, "train", "test")
    common = _common_dataset_args(args, parser)
    params = Experiment1Params(
        train_per_config=int(args.train),
        test_per_config=int(args.test),
        mask_sizes=_csv_list(args.mask_sizes, int) if args.mask_sizes else (),
        **common,
    )
    manifest = build_experiment1(params, args.out_dir, workers=int(args.workers))
    print(f"built experiment-I dataset: {len(manifest.entries)} entries under {args.out_dir}")
    return EXIT_OK


def _cmd_dataset_exp2(args, parser) -> int:
    _require(args, parser, "originals", "masked_per_original", "mask_size")
    common = _common_dataset_args(args, parser)
    params = Experiment2Params(
        originals_per_config=int(args.originals),
        masked_per_original=int(args.masked_per_original),
        mask_size=int(args.mask_size),
        mask_kinds=_csv_list(args.mask_kinds, str),
        **common,
    )
    manifest = build_experiment2(params, args.out_dir, workers=int(args.workers))
    print(f"built experiment-II dataset: {len(manifest.entries)} entries under {args.out_dir}")
    return EXIT_OK


def _cmd_eval(args, parser) -> int:
    _require(args, parser, "manifest", "pred_dir", "out")
    manifest = load_manifest(args.manifest)
    role = None if args.role == "all" else args.role
    rows = evaluate_predictions(manifest, args.pred_dir, role=role)
    write_error_report(rows, args.out)
    if args.json:
        summary = {
            "entries": len(rows),
            "mean_mae": sum(r.mae for r in rows) / len(rows),
            "paired_increase": {cell_label(k): v for k, v in paired_mae_increase(rows).items()},
        }
        Path(args.json).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"evaluated {len(rows)} entries -> {args.out}")
    return EXIT_OK


def _cmd_sweep(args, parser) -> int:
    _require(args, parser, "report", "out")
    rows = read_error_report(args.report)
    results = sweep_reports(rows, alpha=float(args.alpha))
    out = Path(args.out)
    payload = {config_label(k): r.to_json() for k, r in results.items()}
    out.with_suffix(".json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with open(out.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config", "mask_size", "p_value", "significant", "threshold"])
        for key, report in results.items():
            for size, p in sorted(report.p_values.items()):
                writer.writerow(
                    [
                        config_label(key),
                        size,
                        f"{p:.17g}",
                        int(p < report.alpha),
                        report.threshold if report.threshold is not None else "none",
                    ]
                )
    for key, report in sorted(results.items()):
        shown = report.threshold if report.threshold is not None else "none"
        print(f"{config_label(key)}: threshold={shown}")
    return EXIT_OK


def _cmd_difftable(args, parser) -> int:
    _require(args, parser, "null", "confusion", "out")
    null_rows = read_error_report(args.null)
    confusion_rows = read_error_report(args.confusion)
    table = diff_report(null_rows, confusion_rows)
    out = Path(args.out)
    payload = {
        "diffs": {cell_label(k): v for k, v in table.diffs.items()},
        "n_positive": table.n_positive,
        "n_negative": table.n_negative,
        "positive_sum": table.positive_sum,
        "negative_sum": table.negative_sum,
    }
    out.with_suffix(".json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with open(out.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cell", "null_minus_confusion"])
        for key, diff in table.diffs.items():
            writer.writerow([cell_label(key), f"{diff:.17g}"])
    print(
        f"difference table: {table.n_positive} positive / {table.n_negative} negative "
        f"(sums {table.positive_sum:.3g} / {table.negative_sum:.3g})"
    )
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_config_flag(sub):
    sub.add_argument("--config", help="key-value text file supplying defaults for unset flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netrobust",
        description="Directed-network robustness datasets: generation, attacks, masks, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate one network and write it as RNET-EDGES")
    p.add_argument("--topology", choices=("er", "qs", "sw", "sf"))
    p.add_argument("--n", type=int, help="node count")
    p.add_argument("--k", type=float, help="target average degree (edges = round(k*n))")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output edge-list path")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("attack", help="attack a network and write its robustness curve")
    p.add_argument("--in", dest="input", help="input RNET-EDGES file")
    p.add_argument("--strategy", choices=("ra", "tb", "td"))
    p.add_argument("--mode", choices=("adaptive", "static"), default="adaptive")
    p.add_argument("--kind", choices=("connectivity", "controllability"))
    p.add_argument("--seed", type=int, help="required for random attacks")
    p.add_argument("--repeats", type=int, default=1, help="average this many random realizations")
    p.add_argument("--recompute-every", type=int, default=1, dest="recompute_every")
    p.add_argument("--out", help="output curve CSV path")
    p.add_argument("--order-out", dest="order_out", help="also write the removal order CSV")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("mask", help="apply a square mask to an RIMG image")
    p.add_argument("--in", dest="input", help="input RIMG file")
    p.add_argument("--kind", choices=("null", "confusion"))
    p.add_argument("--size", type=int)
    p.add_argument("--row", type=int, help="1-based mask corner row")
    p.add_argument("--col", type=int, help="1-based mask corner column")
    p.add_argument("--seed", type=int, help="sample the corner instead of giving --row/--col")
    p.add_argument("--out")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("dataset", help="build a full dataset with manifest")
    dataset_sub = p.add_subparsers(dest="experiment", required=True)
    for name, fn in (("exp1", _cmd_dataset_exp1), ("exp2", _cmd_dataset_exp2)):
        q = dataset_sub.add_parser(name)
        q.add_argument("--out-dir", dest="out_dir")
        q.add_argument("--n", type=int)
        q.add_argument("--topologies", help="comma list, e.g. er,qs,sw,sf")
        q.add_argument("--k-list", dest="k_list", help="comma list of average degrees")
        q.add_argument("--strategy", choices=("ra", "tb", "td"))
        q.add_argument("--mode", choices=("adaptive", "static"), default="adaptive")
        q.add_argument("--kind", choices=("connectivity", "controllability"))
        q.add_argument("--seed", type=int, help="master seed")
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--repeats", type=int, default=1)
        _add_config_flag(q)
        if name == "exp1":
            q.add_argument("--train", type=int, help="training instances per config")
            q.add_argument("--test", type=int, help="test instances per config")
            q.add_argument("--mask-sizes", dest="mask_sizes", help="comma list of null-mask sizes")
        else:
            q.add_argument("--originals", type=int, help="original instances per config")
            q.add_argument("--masked-per-original", dest="masked_per_original", type=int)
            q.add_argument("--mask-size", dest="mask_size", type=int)
            q.add_argument("--mask-kinds", dest="mask_kinds", default="null,confusion")
        q.set_defaults(func=fn)

    p = sub.add_parser("eval", help="score predicted curves against a manifest")
    p.add_argument("--manifest")
    p.add_argument("--pred-dir", dest="pred_dir", help="directory of <entry_id>.csv predictions")
    p.add_argument("--role", choices=("test", "train", "all"), default="test")
    p.add_argument("--out", help="per-instance error report CSV")
    p.add_argument("--json", help="optional summary JSON path")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="mask-size significance sweep over an error report")
    p.add_argument("--report", help="error report CSV from eval")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="output prefix; writes <out>.json and <out>.csv")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("difftable", help="null-vs-confusion MAE difference table")
    p.add_argument("--null", help="error report CSV for null-masked inputs")
    p.add_argument("--confusion", help="error report CSV for confusion-masked inputs")
    p.add_argument("--out", help="output prefix; writes <out>.json and <out>.csv")
    _add_config_flag(p)
    p.set_defaults(func=_cmd_difftable)

    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("NETROBUST_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def run(argv) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, parser)
        logger.info("resolved config: %s", {k: v for k, v in vars(args).items() if k != "func"})
        return args.func(args, parser)
    except SystemExit as exc:
        # argparse reports usage problems via sys.exit
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NetrobustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
