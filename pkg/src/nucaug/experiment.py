"""Sweep orchestration: architectures x augmentation levels x seeds.

Each trial owns its data and network, so trials are independent and may run
in any order (or in parallel); the persisted result table is canonically
sorted, which makes sweep outputs order-independent. Completed trials are
cached one file per trial, keyed by a hash of the trial settings plus a
dataset checksum, so interrupted sweeps resume where they stopped.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import augment
from .ame import DatasetSplit, NuclideRecord
from .errors import ConfigurationError, IncompleteDataError, TrainingDivergedError
from .network import NetworkSpec, TrainConfig, train
from .optimizers import OptimizerConfig

# (hidden widths, epochs, batch size) used throughout the baseline study
ARCH_SETTINGS: list[tuple[tuple[int, ...], int, int]] = [
    ((128,), 4500, 32),
    ((32, 32), 6000, 64),
    ((64, 16), 4500, 32),
    ((32, 32, 8), 5500, 32),
    ((32, 16, 8), 3500, 64),
    ((64, 16, 8), 4500, 32),
    ((32, 16, 8, 4), 7000, 32),
    ((32, 16, 16, 8), 3500, 64),
    ((32, 32, 8, 8), 3500, 32),
    ((64, 16, 8, 4), 5000, 64),
]


def rms_error(predictions, targets) -> float:
    """sqrt(mean((pred - target)^2)), in MeV."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape or predictions.size == 0:
        raise ConfigurationError("rms_error needs equal-length nonempty inputs")
    d = predictions - targets
    return float(np.sqrt(np.mean(d * d)))


def pct_change(baseline: float, augmented: float) -> float:
    """Percent improvement of `augmented` over `baseline` (negative = worse)."""
    if baseline <= 0:
        raise ConfigurationError(f"baseline must be > 0, got {baseline}")
    return 100.0 * (baseline - augmented) / baseline


@dataclass(frozen=True)
class TrialSpec:
    hidden_widths: tuple[int, ...]
    activation: str
    technique: str            # "none", "error" or "gaussian"
    k: int                    # gaussian resample count (0 otherwise)
    seed: int                 # drives both init and shuffle seeds
    optimizer: OptimizerConfig
    epochs: int
    batch_size: int
    noise_seed: int = 0
    input_standardize: bool = True
    target_standardize: bool = True

    @property
    def arch_label(self) -> str:
        return "-".join(str(w) for w in self.hidden_widths)

    @property
    def level_label(self) -> str:
        return f"gaussian{self.k}" if self.technique == "gaussian" else self.technique

    def cache_key(self, data_tag: str) -> str:
        parts = (f"arch={self.arch_label};act={self.activation};"
                 f"aug={self.technique};k={self.k};seed={self.seed};"
                 f"opt={self.optimizer.algorithm};lr={self.optimizer.learning_rate!r};"
                 f"b1={self.optimizer.beta1!r};b2={self.optimizer.beta2!r};"
                 f"eps={self.optimizer.epsilon!r};rho={self.optimizer.rmsprop_decay!r};"
                 f"epochs={self.epochs};batch={self.batch_size};"
                 f"noise={self.noise_seed};std={self.input_standardize};"
                 f"tstd={self.target_standardize};data={data_tag}")
        return hashlib.sha256(parts.encode()).hexdigest()[:32]


@dataclass(frozen=True)
class TrialResult:
    spec: TrialSpec
    rms_test: float
    rms_extrapolation: float | None
    final_train_loss: float
    status: str               # "ok" or "failed: <reason>"
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


RESULTS_COLUMNS = ["arch", "augmentation", "k", "optimizer", "activation", "seed",
                   "rms_test_mev", "rms_extrap_mev", "final_train_loss",
                   "epochs", "batch", "status"]


def result_row(res: TrialResult) -> list:
    s = res.spec
    return [s.arch_label, s.technique, s.k, s.optimizer.algorithm, s.activation,
            s.seed,
            repr(res.rms_test) if res.ok else "",
            "" if res.rms_extrapolation is None or not res.ok else repr(res.rms_extrapolation),
            repr(res.final_train_loss) if res.ok else "",
            s.epochs, s.batch_size, res.status]


def _leak_check(aug_set: augment.AugmentedTrainingSet,
                held_out: Iterable[NuclideRecord]) -> None:
    train_keys = {(row.z, row.a) for row in aug_set.rows}
    leaked = [r.key for r in held_out if r.key in train_keys]
    if leaked:
        raise ConfigurationError(f"held-out nuclei appear in training rows: {leaked[:5]}")


def run_trial(spec: TrialSpec, split: DatasetSplit,
              extrapolation: list[NuclideRecord] | None = None) -> TrialResult:
    """Augment the training half only, train, and score on the fixed test set
    (and optionally the extrapolation set) against measured energies."""
    start = time.perf_counter()
    aug_set = augment.apply(spec.technique, spec.k, split.train, spec.noise_seed)
    _leak_check(aug_set, split.test)
    if extrapolation:
        _leak_check(aug_set, extrapolation)

    net_spec = NetworkSpec(hidden_widths=spec.hidden_widths, activation=spec.activation)
    cfg = TrainConfig(epochs=spec.epochs, batch_size=spec.batch_size,
                      init_seed=spec.seed, shuffle_seed=spec.seed,
                      input_standardize=spec.input_standardize,
                      target_standardize=spec.target_standardize)
    try:
        model = train(net_spec, aug_set, cfg, spec.optimizer)
    except TrainingDivergedError as exc:
        return TrialResult(spec=spec, rms_test=math.nan, rms_extrapolation=None,
                           final_train_loss=math.nan, status=f"failed: {exc}",
                           wall_time=time.perf_counter() - start)

    def score(records):
        pred = model.predict([r.z for r in records], [r.a for r in records])
        return rms_error(pred, [r.be_total for r in records])

    rms_ext = score(extrapolation) if extrapolation else None
    return TrialResult(spec=spec, rms_test=score(split.test),
                       rms_extrapolation=rms_ext,
                       final_train_loss=model.loss_history[-1], status="ok",
                       wall_time=time.perf_counter() - start)


class ResultTable:
    """Collected trial results with canonical ordering and seed aggregation."""

    def __init__(self, trials: Iterable[TrialResult] = ()):
        self.trials = list(trials)

    def add(self, result: TrialResult) -> None:
        self.trials.append(result)

    @staticmethod
    def _sort_key(res: TrialResult):
        s = res.spec
        return (s.arch_label, s.technique, s.k, s.optimizer.algorithm,
                s.activation, s.seed)

    def sorted_trials(self) -> list[TrialResult]:
        return sorted(self.trials, key=self._sort_key)

    def group_stats(self, metric: str = "rms_test") -> dict:
        """(arch, level, optimizer, activation) -> dict with n, mean, std.

        Failed trials are excluded from the statistics but counted in
        n_failed. std is the population standard deviation over seeds.
        """
        groups: dict[tuple, list[float]] = {}
        failed: dict[tuple, int] = {}
        for res in self.sorted_trials():
            s = res.spec
            key = (s.arch_label, s.level_label, s.optimizer.algorithm, s.activation)
            groups.setdefault(key, [])
            failed.setdefault(key, 0)
            if not res.ok:
                failed[key] += 1
                continue
            value = getattr(res, "rms_extrapolation" if metric == "rms_extrapolation"
                            else "rms_test")
            if value is not None:
                groups[key].append(value)
        out = {}
        for key, values in groups.items():
            out[key] = {
                "n": len(values),
                "n_failed": failed[key],
                "mean": float(np.mean(values)) if values else math.nan,
                "std": float(np.std(values)) if values else math.nan,
            }
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(RESULTS_COLUMNS)
            for res in self.sorted_trials():
                w.writerow(result_row(res))


def read_results_csv(path) -> list[dict]:
    """Raw result rows (dicts) from a persisted sweep CSV."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def seed_stability(table: ResultTable, arch_label: str,
                   levels: list[str], metric: str = "rms_test") -> dict:
    """Per-seed rms traces and across-seed stddev for one architecture.

    levels use the labels "none", "error", "gaussian<k>".
    """
    cells: dict[str, dict[int, float]] = {lvl: {} for lvl in levels}
    for res in table.trials:
        if not res.ok or res.spec.arch_label != arch_label:
            continue
        lvl = res.spec.level_label
        if lvl in cells:
            value = (res.rms_extrapolation if metric == "rms_extrapolation"
                     else res.rms_test)
            if value is not None:
                cells[lvl][res.spec.seed] = value
    seeds = sorted({res.spec.seed for res in table.trials})
    missing = [(arch_label, lvl, s) for lvl in levels for s in seeds
               if s not in cells[lvl]]
    if missing:
        raise IncompleteDataError(missing)
    out = {}
    for lvl in levels:
        trace = [cells[lvl][s] for s in seeds]
        out[lvl] = {"seeds": seeds, "trace": trace, "std": float(np.std(trace))}
    return out


def dataset_tag(split: DatasetSplit,
                extrapolation: list[NuclideRecord] | None = None) -> str:
    """Checksum of the exact datasets a sweep runs on."""
    h = hashlib.sha256()
    for part in (split.train, split.test, extrapolation or []):
        for r in part:
            h.update(f"{r.z},{r.a},{r.be_total!r},{r.be_err!r};".encode())
        h.update(b"|")
    h.update(f"seed={split.split_seed};ratio={split.ratio!r}".encode())
    return h.hexdigest()[:16]


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _cached_result(spec: TrialSpec, cache_dir: str, data_tag: str) -> TrialResult | None:
    path = os.path.join(cache_dir, spec.cache_key(data_tag) + ".json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        payload = json.load(fh)
    return TrialResult(spec=spec,
                       rms_test=payload["rms_test"],
                       rms_extrapolation=payload["rms_extrapolation"],
                       final_train_loss=payload["final_train_loss"],
                       status=payload["status"],
                       wall_time=payload.get("wall_time", 0.0))


def _store_result(res: TrialResult, cache_dir: str, data_tag: str) -> None:
    payload = {
        "rms_test": res.rms_test,
        "rms_extrapolation": res.rms_extrapolation,
        "final_train_loss": res.final_train_loss,
        "status": res.status,
        "wall_time": res.wall_time,
    }
    path = os.path.join(cache_dir, res.spec.cache_key(data_tag) + ".json")
    _atomic_write(path, json.dumps(payload, sort_keys=True) + "\n")


def _run_one(args) -> TrialResult:
    spec, split, extrapolation = args
    return run_trial(spec, split, extrapolation)


def build_trial_specs(architectures, levels, seeds, optimizer: OptimizerConfig,
                      activation: str, noise_seed: int = 0,
                      input_standardize: bool = True,
                      target_standardize: bool = True) -> list[TrialSpec]:
    """Cartesian product of the sweep axes.

    architectures: (hidden_widths, epochs, batch) triples;
    levels: ("none"|"error"|"gaussian", k) pairs.
    """
    if not (architectures and levels and seeds):
        raise ConfigurationError("sweep axes must be nonempty")
    specs = []
    for widths, epochs, batch in architectures:
        for technique, k in levels:
            for seed in seeds:
                specs.append(TrialSpec(
                    hidden_widths=tuple(widths), activation=activation,
                    technique=technique, k=k, seed=seed, optimizer=optimizer,
                    epochs=epochs, batch_size=batch, noise_seed=noise_seed,
                    input_standardize=input_standardize,
                    target_standardize=target_standardize))
    return specs


def sweep(architectures, levels, seeds, optimizer: OptimizerConfig,
          activation: str, split: DatasetSplit,
          extrapolation: list[NuclideRecord] | None = None,
          noise_seed: int = 0, input_standardize: bool = True,
          target_standardize: bool = True,
          cache_dir: str | None = None, jobs: int = 1,
          progress=None) -> ResultTable:
    """Run (or resume) the full Cartesian sweep; results are order-independent."""
    specs = build_trial_specs(architectures, levels, seeds, optimizer,
                              activation, noise_seed, input_standardize,
                              target_standardize)
    data_tag = dataset_tag(split, extrapolation)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)

    table = ResultTable()
    pending = []
    for spec in specs:
        cached = _cached_result(spec, cache_dir, data_tag) if cache_dir else None
        if cached is not None:
            table.add(cached)
            if progress:
                progress(cached, cached=True)
        else:
            pending.append(spec)

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for res in pool.map(_run_one,
                                [(s, split, extrapolation) for s in pending]):
                if cache_dir:
                    _store_result(res, cache_dir, data_tag)
                table.add(res)
                if progress:
                    progress(res, cached=False)
    else:
        for spec in pending:
            res = run_trial(spec, split, extrapolation)
            if cache_dir:
                _store_result(res, cache_dir, data_tag)
            table.add(res)
            if progress:
                progress(res, cached=False)
    return table


def _level_size(train: list[NuclideRecord], technique: str, k: int) -> int:
    if technique == "gaussian":
        return len(train) * (1 + k)
    if technique == "error":
        z0 = sum(1 for r in train if r.be_err == 0)
        return 3 * len(train) - 2 * z0
    return len(train)


def write_manifest(path, *, split: DatasetSplit, extrapolation, seeds, levels,
                   architectures, optimizer: OptimizerConfig, activation: str,
                   noise_seed: int, input_standardize: bool,
                   target_standardize: bool = True,
                   ame_checksums: dict | None = None) -> None:
    """Everything needed to re-run any trial of the sweep bit-exactly."""
    from . import __version__
    manifest = {
        "software_version": __version__,
        "split_seed": split.split_seed,
        "split_ratio": split.ratio,
        "n_train": len(split.train),
        "n_test": len(split.test),
        "n_extrapolation": len(extrapolation) if extrapolation else 0,
        "dataset_tag": dataset_tag(split, extrapolation),
        "ame_checksums": ame_checksums or {},
        "trial_seeds": list(seeds),
        "noise_seed": noise_seed,
        "input_standardize": input_standardize,
        "target_standardize": target_standardize,
        "activation": activation,
        "optimizer": {
            "algorithm": optimizer.algorithm,
            "learning_rate": optimizer.learning_rate,
            "beta1": optimizer.beta1,
            "beta2": optimizer.beta2,
            "epsilon": optimizer.epsilon,
            "rmsprop_decay": optimizer.rmsprop_decay,
        },
        "levels": [list(level) for level in levels],
        "architectures": [{"hidden_widths": list(w), "epochs": e, "batch": b}
                          for w, e, b in architectures],
        "augmentation_sizes": {
            f"{tech}_{k}": _level_size(split.train, tech, k)
            for tech, k in levels},
    }
    _atomic_write(str(path), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
