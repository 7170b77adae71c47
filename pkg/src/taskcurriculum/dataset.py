"""Feature/label containers, CSV interchange, deterministic splits and a
synthetic generator with planted task-cluster structure.

File formats
------------
features CSV::

    id,f0,f1,...
    s0,0.12,-1.5,...

labels CSV (``#classes:K`` is optional and overrides the inferred ``max+1``)::

    id,gender#classes:2,hair
    s0,1,0
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import TaskClusterSet

__all__ = [
    "DataFormatError",
    "FeatureMatrix",
    "LabelMatrix",
    "DatasetSplit",
    "SynthSpec",
    "load_dataset",
    "load_labels",
    "save_dataset",
    "split_dataset",
    "synth_generate",
    "save_synthetic",
]

_CLASSES_RE = re.compile(r"^(?P<name>.*?)#classes:(?P<k>\d+)$")


class DataFormatError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass
class FeatureMatrix:
    values: np.ndarray
    sample_ids: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise DataFormatError(f"feature matrix must be N x D with N, D >= 1, got {self.values.shape}")
        if len(self.sample_ids) != self.values.shape[0]:
            raise DataFormatError("sample_ids length does not match feature rows")
        if not np.all(np.isfinite(self.values)):
            r, c = np.argwhere(~np.isfinite(self.values))[0]
            raise DataFormatError(f"non-finite feature at row {r}, column {c}")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass
class LabelMatrix:
    values: np.ndarray
    class_counts: list[int]
    task_names: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2 or self.values.shape[1] < 1:
            raise DataFormatError(f"label matrix must be N x T with T >= 1, got {self.values.shape}")
        if not np.issubdtype(self.values.dtype, np.integer):
            raise DataFormatError("labels must be integer class indices")
        self.values = self.values.astype(np.int64)
        self.class_counts = [int(k) for k in self.class_counts]
        T = self.values.shape[1]
        if len(self.class_counts) != T or len(self.task_names) != T:
            raise DataFormatError("class_counts/task_names length does not match label columns")
        for t, k in enumerate(self.class_counts):
            col = self.values[:, t]
            bad = np.flatnonzero((col < 0) | (col >= k))
            if bad.size:
                raise DataFormatError(
                    f"label {col[bad[0]]} out of range [0, {k}) at row {bad[0]}, column {self.task_names[t]!r}"
                )

    @property
    def n_tasks(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    def subset(self, rows) -> "LabelMatrix":
        return LabelMatrix(self.values[np.asarray(rows)], list(self.class_counts), list(self.task_names))


@dataclass(frozen=True)
class DatasetSplit:
    train_indices: np.ndarray
    val_indices: np.ndarray
    test_indices: np.ndarray
    seed: int

    def to_dict(self) -> dict:
        return {
            "train": self.train_indices.tolist(),
            "val": self.val_indices.tolist(),
            "test": self.test_indices.tolist(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSplit":
        return cls(
            np.asarray(d["train"], dtype=np.int64),
            np.asarray(d["val"], dtype=np.int64),
            np.asarray(d["test"], dtype=np.int64),
            int(d["seed"]),
        )


@dataclass
class SynthSpec:
    """Recipe for a synthetic multi-task dataset.

    Each cluster ``c`` owns a latent Bernoulli(0.5) factor ``z_c``; every task
    of the cluster observes ``z_c`` flipped with probability ``flip_prob[c]``.
    Features are ``sum_c z_c v_c + noise`` with unit directions ``v_c`` whose
    pairwise cosine equals ``cross_cluster_feature_overlap``.
    """

    n_samples: int
    n_clusters: int
    tasks_per_cluster: Sequence[int]
    flip_prob: Sequence[float] | float
    feature_dim: int
    feature_noise_sigma: float = 0.1
    cross_cluster_feature_overlap: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.tasks_per_cluster = [int(n) for n in self.tasks_per_cluster]
        if isinstance(self.flip_prob, (int, float)):
            self.flip_prob = [float(self.flip_prob)] * self.n_clusters
        self.flip_prob = [float(p) for p in self.flip_prob]
        if self.n_samples < 1 or self.n_clusters < 1:
            raise ValueError("n_samples and n_clusters must be positive")
        if len(self.tasks_per_cluster) != self.n_clusters or len(self.flip_prob) != self.n_clusters:
            raise ValueError("tasks_per_cluster and flip_prob need one entry per cluster")
        if any(n < 1 for n in self.tasks_per_cluster):
            raise ValueError("every cluster needs at least one task")
        if any(not 0.0 <= p < 0.5 for p in self.flip_prob):
            raise ValueError("flip_prob must lie in [0, 0.5)")
        if self.feature_dim < self.n_clusters:
            raise ValueError("feature_dim must be >= n_clusters")
        if self.feature_noise_sigma < 0:
            raise ValueError("feature_noise_sigma must be >= 0")
        if not 0.0 <= self.cross_cluster_feature_overlap <= 1.0:
            raise ValueError("cross_cluster_feature_overlap must lie in [0, 1]")

    @property
    def n_tasks(self) -> int:
        return sum(self.tasks_per_cluster)

    def to_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------- I/O


def _read_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DataFormatError(f"{path}: empty file, header row required")
    return rows[0], rows[1:]


def _parse_labels(labels_path, lheader, lrows, ids=None) -> LabelMatrix:
    names, declared = [], []
    for h in lheader[1:]:
        m = _CLASSES_RE.match(h)
        if m:
            names.append(m["name"])
            declared.append(int(m["k"]))
        else:
            names.append(h)
            declared.append(None)
    T = len(names)
    lvals = np.empty((len(lrows), T), dtype=np.int64)
    for i, row in enumerate(lrows):
        if len(row) != T + 1:
            raise DataFormatError(f"{labels_path}: row {i} has {len(row)} cells, expected {T + 1}")
        if ids is not None and row[0] != ids[i]:
            raise DataFormatError(f"{labels_path}: row {i} id {row[0]!r} does not match feature id {ids[i]!r}")
        for j, cell in enumerate(row[1:]):
            try:
                lvals[i, j] = int(cell)
            except ValueError:
                raise DataFormatError(f"{labels_path}: non-integer label {cell!r} at row {i}, column {names[j]!r}") from None
            if lvals[i, j] < 0:
                raise DataFormatError(f"{labels_path}: negative label at row {i}, column {names[j]!r}")

    counts = [int(lvals[:, j].max()) + 1 if k is None else k for j, k in enumerate(declared)]
    labels = LabelMatrix(lvals, counts, names)
    for j in range(T):
        if np.unique(lvals[:, j]).size < 2:
            raise DataFormatError(f"{labels_path}: task {names[j]!r} has a single class (zero variance)")
    return labels


def load_labels(labels_path) -> LabelMatrix:
    """Read a labels CSV on its own (enough for correlation and planning)."""
    labels_path = Path(labels_path)
    header, rows = _read_rows(labels_path)
    if not rows:
        raise DataFormatError(f"{labels_path}: no data rows")
    return _parse_labels(labels_path, header, rows)


def load_dataset(features_path, labels_path) -> tuple[FeatureMatrix, LabelMatrix]:
    """Read a features CSV and a labels CSV with aligned rows.

    Every label column must contain at least two distinct classes, otherwise
    its correlation with other tasks is undefined.
    """
    features_path, labels_path = Path(features_path), Path(labels_path)
    fheader, frows = _read_rows(features_path)
    lheader, lrows = _read_rows(labels_path)
    if len(frows) != len(lrows):
        raise DataFormatError(
            f"row-count mismatch: {features_path} has {len(frows)} rows, {labels_path} has {len(lrows)}"
        )
    if len(frows) < 1:
        raise DataFormatError(f"{features_path}: no data rows")

    D = len(fheader) - 1
    fvals = np.empty((len(frows), D))
    ids = []
    for i, row in enumerate(frows):
        if len(row) != D + 1:
            raise DataFormatError(f"{features_path}: row {i} has {len(row)} cells, expected {D + 1}")
        ids.append(row[0])
        for j, cell in enumerate(row[1:]):
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(f"{features_path}: non-numeric cell {cell!r} at row {i}, column {fheader[j + 1]!r}") from None
            if not math.isfinite(v):
                raise DataFormatError(f"{features_path}: non-finite cell {cell!r} at row {i}, column {fheader[j + 1]!r}")
            fvals[i, j] = v

    labels = _parse_labels(labels_path, lheader, lrows, ids)
    return FeatureMatrix(fvals, ids), labels


def save_dataset(features: FeatureMatrix, labels: LabelMatrix, features_path, labels_path) -> None:
    with open(features_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + [f"f{j}" for j in range(features.dim)])
        for sid, row in zip(features.sample_ids, features.values):
            w.writerow([sid] + [repr(float(v)) for v in row])
    header = ["id"]
    for name, k, col in zip(labels.task_names, labels.class_counts, labels.values.T):
        inferred = int(col.max()) + 1 if col.size else 0
        header.append(name if k == inferred else f"{name}#classes:{k}")
    with open(labels_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for sid, row in zip(features.sample_ids, labels.values):
            w.writerow([sid] + [str(int(v)) for v in row])


# ------------------------------------------------------------------ splits


def split_dataset(n: int, fractions=(0.8, 0.1, 0.1), seed: int = 0) -> DatasetSplit:
    """Shuffle ``range(n)`` and cut it into train/val/test.

    Validation and test sizes are ``floor(n * fraction)``; the remainder
    goes to train.
    """
    if n < 3:
        raise ValueError("need at least 3 samples to split")
    f_train, f_val, f_test = (float(f) for f in fractions)
    if abs(f_train + f_val + f_test - 1.0) > 1e-9:
        raise ValueError(f"split fractions must sum to 1, got {fractions}")
    if min(f_train, f_val, f_test) <= 0:
        raise ValueError("every split fraction must be > 0")
    # the small epsilon keeps n * 0.1 == 0.9999999... from flooring down
    n_val = math.floor(n * f_val + 1e-9)
    n_test = math.floor(n * f_test + 1e-9)
    perm = np.random.default_rng(seed).permutation(n)
    n_train = n - n_val - n_test
    return DatasetSplit(
        perm[:n_train].copy(),
        perm[n_train:n_train + n_val].copy(),
        perm[n_train + n_val:].copy(),
        int(seed),
    )


# --------------------------------------------------------------- synthetic


def _cluster_directions(rng, n_clusters, dim, overlap):
    gram = np.full((n_clusters, n_clusters), overlap) + (1.0 - overlap) * np.eye(n_clusters)
    # overlap == 1 makes the Gram matrix singular; jitter keeps Cholesky defined
    chol = np.linalg.cholesky(gram + 1e-12 * np.eye(n_clusters))
    q, _ = np.linalg.qr(rng.standard_normal((dim, n_clusters)))
    return chol @ q.T


def synth_generate(spec: SynthSpec) -> tuple[FeatureMatrix, LabelMatrix, TaskClusterSet]:
    rng = np.random.default_rng(spec.seed)
    N, C = spec.n_samples, spec.n_clusters
    directions = _cluster_directions(rng, C, spec.feature_dim, spec.cross_cluster_feature_overlap)
    z = rng.integers(0, 2, size=(N, C))

    columns, clusters, t = [], [], 0
    for c, (size, p) in enumerate(zip(spec.tasks_per_cluster, spec.flip_prob)):
        flips = rng.random((N, size)) < p
        columns.append(np.where(flips, 1 - z[:, [c]], z[:, [c]]))
        clusters.append(frozenset(range(t, t + size)))
        t += size
    labels = np.hstack(columns).astype(np.int64)

    x = z @ directions + spec.feature_noise_sigma * rng.standard_normal((N, spec.feature_dim))
    ids = [f"s{i}" for i in range(N)]
    names = [f"c{c}_t{k}" for c, size in enumerate(spec.tasks_per_cluster) for k in range(size)]
    return (
        FeatureMatrix(x, ids),
        LabelMatrix(labels, [2] * labels.shape[1], names),
        TaskClusterSet(clusters, tau=None),
    )


def save_synthetic(spec: SynthSpec, out_dir) -> dict:
    """Generate and write ``features.csv``, ``labels.csv`` and ``planted.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    features, labels, planted = synth_generate(spec)
    save_dataset(features, labels, out_dir / "features.csv", out_dir / "labels.csv")
    sidecar = {"planted_partition": [sorted(c) for c in planted.clusters], "spec": spec.to_dict()}
    (out_dir / "planted.json").write_text(json.dumps(sidecar, indent=2) + "\n")
    return sidecar
