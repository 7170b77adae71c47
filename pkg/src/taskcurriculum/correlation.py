"""Pearson correlation between task label columns."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = ["ZeroVarianceError", "CorrelationMatrix", "pearson_pair", "pearson_matrix"]


class ZeroVarianceError(ValueError):
    """A label column is constant, so its correlation is undefined."""

    def __init__(self, task):
        super().__init__(f"task {task!r} has zero variance on the selected rows")
        self.task = task


@dataclass
class CorrelationMatrix:
    values: np.ndarray
    task_names: list[str]

    @property
    def n_tasks(self) -> int:
        return len(self.task_names)

    def submatrix(self, tasks) -> "CorrelationMatrix":
        tasks = list(tasks)
        return CorrelationMatrix(self.values[np.ix_(tasks, tasks)].copy(), [self.task_names[t] for t in tasks])

    def to_dict(self) -> dict:
        return {"tasks": list(self.task_names), "values": self.values.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationMatrix":
        return cls(np.asarray(d["values"], dtype=float), list(d["tasks"]))


def pearson_pair(a, b, names=("a", "b")) -> float:
    """Pearson coefficient of two equally long label columns.

    The normalisation (population vs. sample) cancels, so the raw centred
    sums are used directly.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"columns must be 1-D and equally long, got {a.shape} and {b.shape}")
    if a.size < 2:
        raise ValueError("need at least two samples")
    da = a - a.mean()
    db = b - b.mean()
    saa = float(np.dot(da, da))
    sbb = float(np.dot(db, db))
    # exact zero after centring only happens for constant columns
    if saa == 0.0 or np.ptp(a) == 0:
        raise ZeroVarianceError(names[0])
    if sbb == 0.0 or np.ptp(b) == 0:
        raise ZeroVarianceError(names[1])
    r = float(np.dot(da, db)) / np.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def pearson_matrix(labels, rows=None) -> CorrelationMatrix:
    """Task-by-task correlation over ``rows`` (training rows in practice).

    Every entry goes through :func:`pearson_pair`, so a task subset gives the
    corresponding submatrix exactly.
    """
    values = labels.values if rows is None else labels.values[np.asarray(rows)]
    if values.shape[0] < 2:
        raise ValueError("need at least two rows to correlate")
    T = values.shape[1]
    for t in range(T):
        if np.ptp(values[:, t]) == 0:
            raise ZeroVarianceError(labels.task_names[t])
    P = np.eye(T)
    for i in range(T):
        for j in range(i + 1, T):
            P[i, j] = P[j, i] = pearson_pair(
                values[:, i], values[:, j], (labels.task_names[i], labels.task_names[j])
            )
    return CorrelationMatrix(P, list(labels.task_names))
