"""Intra-cluster dependency scores and the cluster learning order."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .clustering import TaskClusterSet
from .correlation import pearson_pair

__all__ = ["Curriculum", "cluster_dependency", "cluster_score", "learning_sequence"]


@dataclass
class Curriculum:
    ordered_clusters: list[tuple[frozenset, float]]
    derived_from: TaskClusterSet | None = None

    @property
    def groups(self) -> list[frozenset]:
        return [c for c, _ in self.ordered_clusters]

    @property
    def scores(self) -> list[float]:
        return [s for _, s in self.ordered_clusters]

    def to_dict(self) -> dict:
        return {"order": [{"tasks": sorted(c), "score": s} for c, s in self.ordered_clusters]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Curriculum":
        ordered = [(frozenset(e["tasks"]), float(e["score"])) for e in d["order"]]
        return cls(ordered, TaskClusterSet([c for c, _ in ordered]))

    @classmethod
    def single_group(cls, n_tasks: int) -> "Curriculum":
        group = frozenset(range(n_tasks))
        return cls([(group, 0.0)], TaskClusterSet([group]))


def _column(labels, t, rows):
    col = labels.values[:, t]
    return col if rows is None else col[np.asarray(rows)]


def cluster_dependency(labels, cluster, task_i, rows=None) -> float:
    """Sum of the Pearson coefficients between ``task_i`` and the other
    members of ``cluster`` (signed, no absolute value)."""
    cluster = sorted(cluster)
    if task_i not in cluster:
        raise ValueError(f"task {task_i} is not in the cluster")
    yi = _column(labels, task_i, rows)
    names = labels.task_names
    return float(sum(
        pearson_pair(yi, _column(labels, j, rows), (names[task_i], names[j]))
        for j in cluster if j != task_i
    ))


def cluster_score(labels, cluster, rows=None) -> float:
    if not cluster:
        raise ValueError("empty cluster")
    deps = [cluster_dependency(labels, cluster, t, rows) for t in sorted(cluster)]
    return float(np.mean(deps))


def learning_sequence(labels, clusters: TaskClusterSet, rows=None) -> Curriculum:
    """Order clusters by descending score; ties go to the cluster holding the
    lowest task index."""
    scored = [(c, cluster_score(labels, c, rows)) for c in clusters.clusters]
    scored.sort(key=lambda cs: (-cs[1], min(cs[0])))
    return Curriculum(scored, clusters)
