"""Ward agglomeration over tasks, dendrogram cuts and the ablation splitters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "Merge",
    "Dendrogram",
    "TaskClusterSet",
    "task_distances",
    "ward_from_distances",
    "ward_linkage",
    "cut_dendrogram",
    "auto_tau",
    "crosscorr_split",
    "random_split",
]


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    distance: float
    size: int


@dataclass
class Dendrogram:
    """Merge tree over ``n_leaves`` tasks.

    Leaves are ids ``0..T-1``; the ``k``-th merge creates node ``T + k``.
    """

    merges: list[Merge]
    n_leaves: int

    @property
    def distances(self) -> np.ndarray:
        return np.array([m.distance for m in self.merges])

    def to_dict(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [
                {"left": m.left, "right": m.right, "distance": m.distance, "size": m.size}
                for m in self.merges
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Dendrogram":
        merges = [Merge(int(m["left"]), int(m["right"]), float(m["distance"]), int(m["size"])) for m in d["merges"]]
        return cls(merges, int(d["n_leaves"]))

    def to_scipy(self) -> np.ndarray:
        """Linkage matrix in the layout of ``scipy.cluster.hierarchy``."""
        return np.array([[m.left, m.right, m.distance, m.size] for m in self.merges], dtype=float).reshape(-1, 4)

    def to_dot(self, task_names=None) -> str:
        names = task_names or [str(i) for i in range(self.n_leaves)]
        lines = ["digraph dendrogram {", "  node [shape=box];"]
        for i, name in enumerate(names):
            lines.append(f'  n{i} [label="{name}"];')
        for k, m in enumerate(self.merges):
            node = self.n_leaves + k
            lines.append(f'  n{node} [shape=ellipse, label="{m.distance:.4g}"];')
            lines.append(f"  n{node} -> n{m.left};")
            lines.append(f"  n{node} -> n{m.right};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class TaskClusterSet:
    """A partition of tasks. ``tau`` is ``None`` for splits not made by a cut."""

    clusters: list[frozenset]
    tau: float | None = None

    def __post_init__(self):
        self.clusters = [frozenset(int(t) for t in c) for c in self.clusters]
        if any(not c for c in self.clusters):
            raise ValueError("empty cluster")
        seen = set()
        for c in self.clusters:
            if seen & c:
                raise ValueError("clusters overlap")
            seen |= c
        if seen != set(range(len(seen))):
            raise ValueError("clusters must partition 0..T-1")

    @property
    def n_tasks(self) -> int:
        return sum(len(c) for c in self.clusters)

    def canonical(self) -> list[tuple[int, ...]]:
        return sorted(tuple(sorted(c)) for c in self.clusters)

    def refines(self, other: "TaskClusterSet") -> bool:
        return all(any(c <= o for o in other.clusters) for c in self.clusters)

    def to_dict(self) -> dict:
        return {"tau": self.tau, "clusters": [sorted(c) for c in self.clusters]}

    @classmethod
    def from_dict(cls, d: dict) -> "TaskClusterSet":
        return cls([frozenset(c) for c in d["clusters"]], d.get("tau"))


def task_distances(corr, embedding: str = "rows") -> np.ndarray:
    """Pairwise task distances used by the linkage.

    ``"rows"`` embeds task ``i`` as row ``i`` of the correlation matrix and
    takes Euclidean distances. ``"one_minus_r"`` uses ``sqrt(2 (1 - r))``
    directly (kept as an alternative, not validated).
    """
    P = np.asarray(corr.values, dtype=float)
    if not np.all(np.isfinite(P)):
        raise ValueError("correlation matrix has non-finite entries")
    if embedding == "rows":
        diff = P[:, None, :] - P[None, :, :]
        return np.sqrt((diff ** 2).sum(-1))
    if embedding == "one_minus_r":
        D = np.sqrt(np.clip(2.0 * (1.0 - P), 0.0, None))
        np.fill_diagonal(D, 0.0)
        return D
    raise ValueError(f"unknown embedding {embedding!r}")


def ward_from_distances(dist) -> Dendrogram:
    """Ward agglomeration from a square Euclidean distance matrix.

    Distances are updated with the Lance-Williams recurrence

        d(u, v)^2 = ((|v|+|s|) d(v,s)^2 + (|v|+|t|) d(v,t)^2 - |v| d(s,t)^2) / (|v|+|s|+|t|)

    for ``u = s | t``. Equal distances are resolved by the lexicographically
    smallest ``(left, right)`` id pair.
    """
    dist = np.asarray(dist, dtype=float)
    T = dist.shape[0]
    if dist.shape != (T, T) or T < 2:
        raise ValueError("need a square distance matrix over at least 2 tasks")
    if not np.all(np.isfinite(dist)):
        raise ValueError("distance matrix has non-finite entries")

    n_nodes = 2 * T - 1
    d2 = np.full((n_nodes, n_nodes), np.inf)
    d2[:T, :T] = dist ** 2
    size = np.zeros(n_nodes, dtype=np.int64)
    size[:T] = 1
    active = list(range(T))
    merges = []

    for k in range(T - 1):
        best = None
        # active is kept sorted, so the first strict minimum is the lexicographic one
        for a_pos, s in enumerate(active):
            for t in active[a_pos + 1:]:
                if best is None or d2[s, t] < best[0]:
                    best = (d2[s, t], s, t)
        dst2, s, t = best
        u = T + k
        for v in active:
            if v in (s, t):
                continue
            tot = size[v] + size[s] + size[t]
            val = ((size[v] + size[s]) * d2[v, s] + (size[v] + size[t]) * d2[v, t] - size[v] * dst2) / tot
            d2[u, v] = d2[v, u] = max(val, 0.0)
        size[u] = size[s] + size[t]
        active = [v for v in active if v not in (s, t)] + [u]
        merges.append(Merge(s, t, float(np.sqrt(dst2)), int(size[u])))
    return Dendrogram(merges, T)


def ward_linkage(corr, embedding: str = "rows") -> Dendrogram:
    return ward_from_distances(task_distances(corr, embedding))


def cut_dendrogram(dend: Dendrogram, tau: float) -> TaskClusterSet:
    """Apply every merge with distance <= ``tau`` and return the components."""
    T = dend.n_leaves
    leaves = [frozenset([i]) for i in range(T)]
    parent = list(range(T))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in dend.merges:
        leaves.append(leaves[m.left] | leaves[m.right])
        if m.distance <= tau:
            root, *rest = sorted(find(i) for i in leaves[-1])
            for r in rest:
                parent[r] = root
    groups: dict[int, set] = {}
    for i in range(T):
        groups.setdefault(find(i), set()).add(i)
    clusters = sorted((frozenset(g) for g in groups.values()), key=min)
    return TaskClusterSet(clusters, tau=float(tau))


def auto_tau(dend: Dendrogram) -> float:
    """Midpoint of the widest gap between consecutive merge distances.

    With a single merge there is no gap; the threshold then keeps the merge.
    """
    d = np.sort(dend.distances)
    if d.size < 2:
        return float(d[0]) + 1.0 if d.size else 1.0
    gaps = np.diff(d)
    k = int(np.argmax(gaps))
    return float(0.5 * (d[k] + d[k + 1]))


def _chop(order: Iterable[int], n_groups: int) -> list[frozenset]:
    order = list(order)
    base, extra = divmod(len(order), n_groups)
    groups, start = [], 0
    for g in range(n_groups):
        n = base + (1 if g < extra else 0)
        groups.append(frozenset(order[start:start + n]))
        start += n
    return groups


def crosscorr_split(corr, n_groups: int) -> TaskClusterSet:
    """Sort tasks by total correlation with all other tasks and chop the
    descending list into ``n_groups`` contiguous, near-equal groups."""
    P = np.asarray(corr.values, dtype=float)
    T = P.shape[0]
    if not 1 <= n_groups <= T:
        raise ValueError(f"n_groups must lie in [1, {T}]")
    totals = P.sum(axis=1) - np.diag(P)
    order = sorted(range(T), key=lambda i: (-totals[i], i))
    return TaskClusterSet(_chop(order, n_groups), tau=None)


def random_split(T: int, n_groups: int, seed: int) -> TaskClusterSet:
    if not 1 <= n_groups <= T:
        raise ValueError(f"n_groups must lie in [1, {T}]")
    order = np.random.default_rng(seed).permutation(T).tolist()
    return TaskClusterSet(_chop(order, n_groups), tau=None)
