"""Training-set augmentation.

Two techniques, both leaving (Z, A) untouched:

* error resampling: each nucleus with a nonzero uncertainty contributes its
  measured energy plus the two values shifted by +/- one sigma;
* cumulative Gaussian resampling: k full passes of draws from
  Normal(be_total, be_err) are appended after the originals, so the row list
  for k-1 passes is a prefix of the list for k passes under the same seed.

Randomness is counter-based (Philox) and keyed by
(noise_seed, resample_index, nucleus_index), so every draw is addressable and
generation order does not matter.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ame import NuclideRecord
from .errors import ConfigurationError

ORIGIN_ORIGINAL = "original"
ORIGIN_ERR_PLUS = "err_plus"
ORIGIN_ERR_MINUS = "err_minus"


def origin_gauss(resample_index: int) -> str:
    return f"gauss_{resample_index}"


@dataclass(frozen=True)
class TrainingRow:
    z: int
    a: int
    energy: float  # MeV
    origin: str    # "original", "err_plus", "err_minus" or "gauss_<i>"


@dataclass(frozen=True)
class AugmentedTrainingSet:
    rows: list[TrainingRow]
    base_size: int
    technique: str          # "none", "error" or "gaussian"
    k: int = 0              # resample count, gaussian only
    noise_seed: int | None = None


def identity_set(train: list[NuclideRecord]) -> AugmentedTrainingSet:
    """The un-augmented training set (technique "none")."""
    rows = [TrainingRow(r.z, r.a, r.be_total, ORIGIN_ORIGINAL) for r in train]
    return AugmentedTrainingSet(rows=rows, base_size=len(rows), technique="none")


def error_resample(train: list[NuclideRecord]) -> AugmentedTrainingSet:
    """Triplicate each nucleus with nonzero uncertainty by +/- one sigma.

    Row order is deterministic: all originals in input order, then the
    plus-sigma rows, then the minus-sigma rows. Nuclei with zero uncertainty
    contribute only their original row, so the total row count is
    3*n - 2*z0 with z0 the number of zero-uncertainty records.
    """
    if not train:
        raise ConfigurationError("error_resample requires a nonempty training set")
    rows = [TrainingRow(r.z, r.a, r.be_total, ORIGIN_ORIGINAL) for r in train]
    rows += [TrainingRow(r.z, r.a, r.be_total + r.be_err, ORIGIN_ERR_PLUS)
             for r in train if r.be_err > 0]
    rows += [TrainingRow(r.z, r.a, r.be_total - r.be_err, ORIGIN_ERR_MINUS)
             for r in train if r.be_err > 0]
    return AugmentedTrainingSet(rows=rows, base_size=len(train), technique="error")


def _stream(noise_seed: int, resample_index: int, nucleus_index: int) -> np.random.Generator:
    """Addressable Philox stream for one (pass, nucleus) cell."""
    key = np.array([noise_seed, (resample_index << 32) | nucleus_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gaussian_draw(mu: float, sigma: float, rng: np.random.Generator) -> float:
    """One draw from Normal(mu, sigma); sigma = 0 returns mu exactly.

    Always consumes exactly one standard-normal deviate so stream positions
    do not depend on sigma.
    """
    if sigma < 0:
        raise ConfigurationError(f"sigma must be >= 0, got {sigma}")
    x = rng.standard_normal()
    return mu + sigma * x


def gaussian_resample(train: list[NuclideRecord], k: int,
                      noise_seed: int) -> AugmentedTrainingSet:
    """Append k cumulative passes of Gaussian draws after the original rows.

    Pass r of nucleus i draws from the stream keyed by (noise_seed, r, i), so
    the result for k-1 passes is exactly the prefix of the result for k
    passes. Total rows: len(train) * (1 + k). Zero-uncertainty nuclei yield
    exact duplicates of their measured value in every pass.
    """
    if k < 1:
        raise ConfigurationError(f"resample count k must be >= 1, got {k}")
    if noise_seed < 0:
        raise ConfigurationError(f"noise_seed must be >= 0, got {noise_seed}")
    if not train:
        raise ConfigurationError("gaussian_resample requires a nonempty training set")
    rows = [TrainingRow(r.z, r.a, r.be_total, ORIGIN_ORIGINAL) for r in train]
    for r_idx in range(1, k + 1):
        tag = origin_gauss(r_idx)
        for i, rec in enumerate(train):
            energy = gaussian_draw(rec.be_total, rec.be_err, _stream(noise_seed, r_idx, i))
            rows.append(TrainingRow(rec.z, rec.a, energy, tag))
    return AugmentedTrainingSet(rows=rows, base_size=len(train),
                                technique="gaussian", k=k, noise_seed=noise_seed)


def apply(technique: str, k: int, train: list[NuclideRecord],
          noise_seed: int = 0) -> AugmentedTrainingSet:
    """Dispatch on technique name ("none", "error", "gaussian")."""
    if technique == "none":
        return identity_set(train)
    if technique == "error":
        return error_resample(train)
    if technique == "gaussian":
        return gaussian_resample(train, k, noise_seed)
    raise ConfigurationError(f"unknown augmentation technique {technique!r}")


AUGMENTED_CSV_COLUMNS = ["z", "n", "a", "be_total_mev", "be_err_mev", "estimated", "origin"]


def write_augmented_csv(aug: AugmentedTrainingSet, source: list[NuclideRecord], path) -> None:
    """Canonical nuclide CSV extended with an `origin` column, plus a sidecar
    manifest (<path>.manifest.json) recording technique, k, base_size and seed."""
    err = {r.key: r.be_err for r in source}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AUGMENTED_CSV_COLUMNS)
        for row in aug.rows:
            w.writerow([row.z, row.a - row.z, row.a, repr(row.energy),
                        repr(err[(row.z, row.a)]), 0, row.origin])
    manifest = {
        "technique": aug.technique,
        "k": aug.k,
        "base_size": aug.base_size,
        "noise_seed": aug.noise_seed,
    }
    with open(str(path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_augmented_csv(path) -> AugmentedTrainingSet:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [TrainingRow(z=int(r["z"]), a=int(r["a"]),
                            energy=float(r["be_total_mev"]), origin=r["origin"])
                for r in reader]
    try:
        with open(str(path) + ".manifest.json") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        manifest = {"technique": "none", "k": 0, "base_size": len(rows), "noise_seed": None}
    return AugmentedTrainingSet(rows=rows, base_size=manifest["base_size"],
                                technique=manifest["technique"], k=manifest["k"],
                                noise_seed=manifest["noise_seed"])
