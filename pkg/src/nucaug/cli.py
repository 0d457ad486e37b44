"""Command-line surface: ingest, augment, train, evaluate, sweep, report.

Commands compose through files only (canonical CSVs, model files, results
CSVs); every random choice is an explicit flag or config key. Exit codes:
0 success, 1 usage/config error, 2 data error, 3 sweep completed but some
trials failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import os
import sys
from configparser import ConfigParser

from . import __version__, ame, augment, experiment, network, report
from .errors import (ConfigurationError, DataIntegrityError,
                     IncompleteDataError, MassTableParseError)
from .optimizers import OptimizerConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRIAL_FAILURES = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for token in text.replace(",", " ").split():
        if ".." in token:
            lo, hi = token.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(token))
    if not seeds:
        raise ConfigurationError("seeds list is empty")
    return seeds


def _parse_levels(text: str) -> list[tuple[str, int]]:
    levels = []
    for token in text.replace(",", " ").split():
        if token in ("none", "error"):
            levels.append((token, 0))
        elif token.startswith("gaussian"):
            levels.append(("gaussian", int(token[len("gaussian"):])))
        else:
            raise ConfigurationError(f"unknown augmentation level {token!r}")
    if not levels:
        raise ConfigurationError("levels list is empty")
    return levels


def _parse_architectures(text: str) -> list[tuple[tuple[int, ...], int, int]]:
    if text.strip() == "default":
        return list(experiment.ARCH_SETTINGS)
    archs = []
    for token in text.replace(",", " ").split():
        try:
            widths, epochs, batch = token.split(":")
            archs.append((tuple(int(w) for w in widths.split("-")),
                          int(epochs), int(batch)))
        except ValueError:
            raise ConfigurationError(
                f"bad architecture token {token!r}; expected WIDTHS:EPOCHS:BATCH"
                " like 32-16-8:3500:64") from None
    if not archs:
        raise ConfigurationError("architecture list is empty")
    return archs


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    with open(args.ame_file, "rb") as fh:
        records = ame.parse_mass_table(fh.read(), args.edition)
    filtered = ame.filter_experimental(records, args.z_min, args.n_min)
    print(f"parsed: {len(records)}")
    print(f"filtered: {len(filtered)}")
    if args.diff:
        old = ame.read_records_csv(args.diff)
        new = ame.diff_new_nuclei(old, filtered)
        print(f"new: {len(new)}")
        out_records = new
    else:
        out_records = filtered
    if args.out_csv:
        ame.write_records_csv(out_records, args.out_csv)
        print(f"wrote {args.out_csv}")
    return EXIT_OK


def cmd_augment(args) -> int:
    records = ame.read_records_csv(args.records_csv)
    aug = augment.apply(args.technique, args.k, records, args.noise_seed)
    augment.write_augmented_csv(aug, records, args.out)
    print(f"rows: {len(aug.rows)} (base {aug.base_size}, technique {aug.technique})")
    print(f"wrote {args.out}")
    return EXIT_OK


def _load_training_rows(path) -> augment.AugmentedTrainingSet:
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
    if header == ame.CSV_COLUMNS:
        return augment.identity_set(ame.read_records_csv(path))
    return augment.read_augmented_csv(path)


def cmd_train(args) -> int:
    train_set = _load_training_rows(args.train_csv)
    try:
        widths = tuple(int(w) for w in args.arch.split("-"))
    except ValueError:
        raise ConfigurationError(
            f"bad --arch {args.arch!r}; expected hyphenated widths like 32-16-8"
        ) from None
    spec = network.NetworkSpec(hidden_widths=widths, activation=args.activation)
    cfg = network.TrainConfig(epochs=args.epochs, batch_size=args.batch,
                              init_seed=args.seed, shuffle_seed=args.seed,
                              input_standardize=not args.no_standardize,
                              target_standardize=not args.no_target_standardize)
    opt = OptimizerConfig(algorithm=args.optimizer, learning_rate=args.lr,
                          beta1=args.beta1, beta2=args.beta2)
    model = network.train(spec, train_set, cfg, opt)
    network.save_model(model, args.out)
    print(f"final train MSE: {model.loss_history[-1]:.6f} MeV^2")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = network.load_model(args.model)
    records = ame.read_records_csv(args.records_csv)
    pred = model.predict([r.z for r in records], [r.a for r in records])
    rms = experiment.rms_error(pred, [r.be_total for r in records])
    print(f"rms: {rms:.6f} MeV over {len(records)} nuclei")
    if args.out:
        _write_csv(args.out, ["z", "a", "be_exp_mev", "be_pred_mev"],
                   [[r.z, r.a, repr(r.be_total), repr(float(p))]
                    for r, p in zip(records, pred)])
        print(f"wrote {args.out}")
    return EXIT_OK


def _load_sweep_config(path):
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    cp = ConfigParser()
    cp.read(path)

    def need(section, key):
        if not cp.has_option(section, key):
            raise ConfigurationError(f"config missing [{section}] {key}")
        return cp.get(section, key)

    data = {
        "ame2016": need("data", "ame2016"),
        "ame2020": cp.get("data", "ame2020", fallback=None),
        "z_min": cp.getint("data", "z_min", fallback=8),
        "n_min": cp.getint("data", "n_min", fallback=8),
    }
    split = {
        "ratio": cp.getfloat("split", "ratio", fallback=0.7),
        "seed": cp.getint("split", "seed", fallback=0),
    }
    sweep = {
        "architectures": _parse_architectures(need("sweep", "architectures")),
        "levels": _parse_levels(need("sweep", "levels")),
        "seeds": _parse_seeds(need("sweep", "seeds")),
        "noise_seed": cp.getint("sweep", "noise_seed", fallback=0),
        "activation": cp.get("sweep", "activation", fallback="relu"),
        "standardize": cp.getboolean("sweep", "standardize", fallback=True),
        "target_standardize": cp.getboolean("sweep", "target_standardize",
                                            fallback=True),
    }
    opt = OptimizerConfig(
        algorithm=cp.get("optimizer", "algorithm", fallback="adam"),
        learning_rate=cp.getfloat("optimizer", "learning_rate", fallback=0.001),
        beta1=cp.getfloat("optimizer", "beta1", fallback=0.9),
        beta2=cp.getfloat("optimizer", "beta2", fallback=0.99),
        epsilon=cp.getfloat("optimizer", "epsilon", fallback=1e-8),
        rmsprop_decay=cp.getfloat("optimizer", "rmsprop_decay", fallback=0.9),
    )
    return data, split, sweep, opt


def cmd_sweep(args) -> int:
    data, split_cfg, sweep_cfg, opt = _load_sweep_config(args.config)
    os.makedirs(args.out, exist_ok=True)

    checksums = {}
    with open(data["ame2016"], "rb") as fh:
        records16 = ame.parse_mass_table(fh.read(), "AME2016")
    checksums["ame2016"] = _sha256(data["ame2016"])
    exp16 = ame.filter_experimental(records16, data["z_min"], data["n_min"])
    split = ame.split_dataset(exp16, split_cfg["ratio"], split_cfg["seed"])

    extrapolation = None
    if data["ame2020"]:
        with open(data["ame2020"], "rb") as fh:
            records20 = ame.parse_mass_table(fh.read(), "AME2020")
        checksums["ame2020"] = _sha256(data["ame2020"])
        exp20 = ame.filter_experimental(records20, data["z_min"], data["n_min"])
        extrapolation = ame.diff_new_nuclei(exp16, exp20)

    total = (len(sweep_cfg["architectures"]) * len(sweep_cfg["levels"])
             * len(sweep_cfg["seeds"]))
    done = [0]

    def progress(res, cached):
        done[0] += 1
        tag = "cached" if cached else f"{res.wall_time:.1f}s"
        print(f"[{done[0]}/{total}] {res.spec.arch_label} {res.spec.level_label} "
              f"seed={res.spec.seed} {res.status} ({tag})", flush=True)

    table = experiment.sweep(
        sweep_cfg["architectures"], sweep_cfg["levels"], sweep_cfg["seeds"],
        opt, sweep_cfg["activation"], split, extrapolation,
        noise_seed=sweep_cfg["noise_seed"],
        input_standardize=sweep_cfg["standardize"],
        target_standardize=sweep_cfg["target_standardize"],
        cache_dir=os.path.join(args.out, "trials"), jobs=args.jobs,
        progress=progress)

    table.write_csv(os.path.join(args.out, "results.csv"))
    experiment.write_manifest(
        os.path.join(args.out, "manifest.json"), split=split,
        extrapolation=extrapolation, seeds=sweep_cfg["seeds"],
        levels=sweep_cfg["levels"], architectures=sweep_cfg["architectures"],
        optimizer=opt, activation=sweep_cfg["activation"],
        noise_seed=sweep_cfg["noise_seed"],
        input_standardize=sweep_cfg["standardize"],
        target_standardize=sweep_cfg["target_standardize"],
        ame_checksums=checksums)
    _export_figures(os.path.join(args.out, "results.csv"), args.out)

    n_failed = sum(1 for t in table.trials if not t.ok)
    print(f"completed {len(table.trials)} trials, {n_failed} failed")
    return EXIT_TRIAL_FAILURES if n_failed else EXIT_OK


def _export_figures(results_csv, out_dir) -> list[str]:
    """Write every figure CSV the results support; skip incomplete ones."""
    rows = experiment.read_results_csv(results_csv)
    exports = {
        "table1": lambda: report.table_error_augmentation(rows),
        "table2": lambda: report.table_gaussian(rows, "rms_test_mev"),
        "table3": lambda: report.table_gaussian(rows, "rms_extrap_mev"),
        "fig3": lambda: report.rms_vs_resampling(rows, column="rms_test_mev"),
        "fig4": lambda: report.per_seed_traces(rows, column="rms_test_mev"),
        "fig5": lambda: report.rms_vs_resampling(rows, column="rms_extrap_mev"),
        "fig6": lambda: report.optimizer_comparison(rows),
        "fig7": lambda: report.per_seed_traces(rows, column="rms_extrap_mev"),
        "fig8": lambda: report.activation_comparison(rows),
    }
    written = []
    for fig_id, build in exports.items():
        try:
            header, data_rows = build()
        except (IncompleteDataError, StopIteration):
            continue
        path = os.path.join(out_dir, f"{fig_id}.csv")
        _write_csv(path, header, data_rows)
        written.append(path)
    return written


def cmd_report(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.figure == "fig2":
        if not (args.records and args.nuclide):
            raise ConfigurationError("fig2 needs --records and --nuclide Z,A")
        try:
            z, a = (int(x) for x in args.nuclide.split(","))
        except ValueError:
            raise ConfigurationError(
                f"bad --nuclide {args.nuclide!r}; expected Z,A like 82,208"
            ) from None
        records = ame.read_records_csv(args.records)
        match = [r for r in records if r.z == z and r.a == a]
        if not match:
            raise DataIntegrityError(f"nuclide Z={z} A={a} not found in {args.records}")
        header, rows = report.gaussian_illustration(match[0], args.k, args.noise_seed)
    else:
        if not args.results_csv:
            raise ConfigurationError(f"figure {args.figure!r} needs a results CSV")
        raw = experiment.read_results_csv(args.results_csv)
        builders = {
            "table1": lambda: report.table_error_augmentation(raw),
            "table2": lambda: report.table_gaussian(raw, "rms_test_mev"),
            "table3": lambda: report.table_gaussian(raw, "rms_extrap_mev"),
            "fig3": lambda: report.rms_vs_resampling(raw, column="rms_test_mev"),
            "fig4": lambda: report.per_seed_traces(raw, column="rms_test_mev"),
            "fig5": lambda: report.rms_vs_resampling(raw, column="rms_extrap_mev"),
            "fig6": lambda: report.optimizer_comparison(raw),
            "fig7": lambda: report.per_seed_traces(raw, column="rms_extrap_mev"),
            "fig8": lambda: report.activation_comparison(raw),
        }
        if args.figure not in builders:
            raise ConfigurationError(
                f"unknown figure id {args.figure!r}; valid: {', '.join(report.FIGURE_IDS)}")
        header, rows = builders[args.figure]()
    path = os.path.join(args.out, f"{args.figure}.csv")
    _write_csv(path, header, rows)
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nucaug",
                     description="Nuclear binding-energy MLPs with data augmentation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse an AME mass file to the canonical CSV")
    p.add_argument("ame_file")
    p.add_argument("--edition", required=True, choices=sorted(ame.LAYOUTS))
    p.add_argument("--out-csv", help="write filtered records here")
    p.add_argument("--diff", metavar="OLD_CSV",
                   help="emit only nuclei absent from this earlier canonical CSV")
    p.add_argument("--z-min", type=int, default=8)
    p.add_argument("--n-min", type=int, default=8)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("augment", help="augment a canonical CSV of training records")
    p.add_argument("records_csv")
    p.add_argument("--technique", required=True, choices=["none", "error", "gaussian"])
    p.add_argument("--k", type=int, default=1, help="gaussian resample count")
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="train one network on a training CSV")
    p.add_argument("train_csv", help="canonical or augmented CSV")
    p.add_argument("--arch", required=True, help="hidden widths, e.g. 32-16-8")
    p.add_argument("--activation", default="relu", choices=network.ACTIVATIONS)
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--batch", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--optimizer", default="adam",
                   choices=["adam", "nadam", "adamax", "rmsprop"])
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.99)
    p.add_argument("--no-standardize", action="store_true",
                   help="feed raw (Z, A) instead of z-scored inputs")
    p.add_argument("--no-target-standardize", action="store_true",
                   help="train on raw MeV targets instead of z-scored ones")
    p.add_argument("--out", required=True, help="model file (.npz)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="rms of a model on a canonical CSV")
    p.add_argument("model")
    p.add_argument("records_csv")
    p.add_argument("--out", help="write per-nuclide predictions here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="run (or resume) a configured sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="figure/table CSVs from sweep results")
    p.add_argument("results_csv", nargs="?",
                   help="sweep results CSV (not needed for fig2)")
    p.add_argument("--figure", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--records", help="canonical CSV, for fig2")
    p.add_argument("--nuclide", help="Z,A for fig2, e.g. 82,208")
    p.add_argument("--k", type=int, default=5, help="resample count for fig2")
    p.add_argument("--noise-seed", type=int, default=0)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MassTableParseError, DataIntegrityError, IncompleteDataError,
            FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
