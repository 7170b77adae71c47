"""Losses, learning-rate schedule, curriculum training and paradigm comparison."""

from __future__ import annotations

import copy
import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .clustering import TaskClusterSet, auto_tau, crosscorr_split, cut_dendrogram, random_split, ward_linkage
from .correlation import pearson_matrix
from .curriculum import Curriculum, learning_sequence
from .dataset import split_dataset
from .metrics import ScoredPredictions, accuracy, auc, paired_t_test, recall_at_fpr
from .model import (
    HEAD_PARAMS,
    ModelState,
    default_dropout_rate,
    forward,
    gradients,
    init_adapter,
    init_head,
    transfer_init,
)

__all__ = [
    "PROB_FLOOR",
    "PARADIGMS",
    "TrainingDivergedError",
    "TrainConfig",
    "LossWeights",
    "GroupTrace",
    "TrainReport",
    "ComparisonTable",
    "class_weights",
    "loss_weights",
    "balanced_cross_entropy",
    "group_loss",
    "transfer_loss",
    "lr_at_epoch",
    "momentum_step",
    "train_group",
    "plan_curriculum",
    "run_curriculum",
    "evaluate",
    "compare_paradigms",
]

PROB_FLOOR = 1e-12
PARADIGMS = (
    "individual",
    "multitask",
    "cilicia",
    "cilicia_no_transfer",
    "random_split_curriculum",
    "crosscorr_split_curriculum",
)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    lr0: float = 1e-3
    lr_drop_factor: float = 5.0
    lr_drop_period_epochs: int | None = None  # None: epochs // 10
    lr_max_drops: int = 5
    prior_group_lr: float = 1e-6
    weight_decay: float = 1e-4
    transfer_lambda: float = 0.25
    epochs: int = 300
    batch_size: int = 64
    momentum: float = 0.9
    seed: int = 0
    adapter_enabled: bool = False
    adapter_dim: int | None = None  # None: same as the feature dimension
    adapter_scope: str = "group"  # "group": one adapter per curriculum group; "model": one for all heads
    hidden_units: int = 512
    dropout_rate: float | None = None  # None: 0.75 below 1000 training rows, else 0.5
    prior_loss: str = "pooled"  # or "per_group"
    divergence_factor: float = 10.0

    def __post_init__(self):
        for name in ("lr0", "lr_drop_factor", "prior_group_lr", "momentum"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.transfer_lambda <= 1.0:
            raise ValueError("transfer_lambda must lie in [0, 1]")
        if self.epochs < 0 or self.batch_size < 2:
            raise ValueError("epochs must be >= 0 and batch_size >= 2")
        if self.prior_loss not in ("pooled", "per_group"):
            raise ValueError("prior_loss must be 'pooled' or 'per_group'")
        if self.adapter_scope not in ("group", "model"):
            raise ValueError("adapter_scope must be 'group' or 'model'")

    @classmethod
    def full_scale(cls, **overrides) -> "TrainConfig":
        base = dict(epochs=5000, lr_drop_period_epochs=100, hidden_units=512)
        base.update(overrides)
        return cls(**base)

    @property
    def drop_period(self) -> int:
        if self.lr_drop_period_epochs is not None:
            return int(self.lr_drop_period_epochs)
        return max(1, self.epochs // 10)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**d)


def lr_at_epoch(config: TrainConfig, epoch: int) -> float:
    if epoch < 0:
        raise ValueError("epoch must be >= 0")
    drops = min(epoch // config.drop_period, config.lr_max_drops)
    return config.lr0 / config.lr_drop_factor ** drops


# ------------------------------------------------------------------ losses


def class_weights(column, n_classes: int) -> np.ndarray:
    """Inverse-frequency weights ``(1/M_j) / sum_n (1/M_n)``.

    A class missing from ``column`` is counted once so its weight stays finite.
    """
    counts = np.bincount(np.asarray(column, dtype=np.int64), minlength=n_classes).astype(float)
    inv = 1.0 / np.maximum(counts, 1.0)
    return inv / inv.sum()


@dataclass
class LossWeights:
    class_weights: dict[int, np.ndarray]

    @staticmethod
    def mixing(group) -> float:
        return 1.0 / len(group)


def loss_weights(labels, rows=None) -> LossWeights:
    values = labels.values if rows is None else labels.values[np.asarray(rows)]
    return LossWeights({t: class_weights(values[:, t], k) for t, k in enumerate(labels.class_counts)})


def balanced_cross_entropy(probabilities, targets, class_weights, return_clamped: bool = False):
    """``-(1/N) sum_i w[y_i] log p[i, y_i]`` with probabilities floored at 1e-12."""
    P = np.asarray(probabilities, dtype=float)
    y = np.asarray(targets, dtype=np.int64)
    w = np.asarray(class_weights, dtype=float)
    p_true = P[np.arange(y.size), y]
    clamped = int(np.count_nonzero(p_true < PROB_FLOOR))
    loss = float(-np.mean(w[y] * np.log(np.maximum(p_true, PROB_FLOOR))))
    return (loss, clamped) if return_clamped else loss


def group_loss(state: ModelState, group, X, Y, weights: LossWeights) -> float:
    """Mean balanced cross-entropy over the tasks of ``group`` (lambda_t = 1/|group|).

    Runs forward passes without touching batch-norm running statistics.
    """
    tasks = sorted(group)
    losses = []
    for t in tasks:
        P, _ = forward(state, t, X, update_stats=False)
        losses.append(balanced_cross_entropy(P, Y[:, t], weights.class_weights[t]))
    return float(np.mean(losses))


def transfer_loss(current_group_loss: float, prior_groups_loss: float | None, lam: float) -> float:
    """``lam * L_prior + (1 - lam) * L_current``; with no prior groups the
    current loss is returned unchanged."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if prior_groups_loss is None:
        return float(current_group_loss)
    return lam * prior_groups_loss + (1.0 - lam) * current_group_loss


# ---------------------------------------------------------------- training


@dataclass
class GroupTrace:
    tasks: list[int]
    loss: list[float] = field(default_factory=list)
    current_loss: list[float] = field(default_factory=list)
    prior_loss: list[float | None] = field(default_factory=list)
    clamped: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _prior_coefficients(prior_groups, lam, mode):
    """Loss coefficient per prior task."""
    coef = {}
    if mode == "pooled":
        tasks = sorted(set().union(*prior_groups))
        for t in tasks:
            coef[t] = lam / len(tasks)
    else:
        for g in prior_groups:
            for t in g:
                coef[t] = coef.get(t, 0.0) + lam / (len(prior_groups) * len(g))
    return coef


def momentum_step(param, grad, velocity, lr: float, momentum: float = 0.9):
    """``v <- momentum * v - lr * grad; param <- param + v`` in place.

    ``velocity=None`` starts from rest. Returns the new velocity.
    """
    v = -lr * grad if velocity is None else momentum * velocity - lr * grad
    param += v
    return v


def train_group(
    state: ModelState,
    group,
    priors,
    X,
    Y,
    weights: LossWeights,
    config: TrainConfig,
    *,
    lam: float | None = None,
    position: int = 0,
) -> GroupTrace:
    """Momentum SGD on the transfer objective for one curriculum group.

    ``priors`` is the list of previously trained groups. Current heads (and
    the shared adapter) follow :func:`lr_at_epoch`; prior heads keep
    learning at ``config.prior_group_lr``.
    """
    lam = config.transfer_lambda if lam is None else lam
    current = sorted(group)
    prior_groups = [frozenset(g) for g in priors if g]
    prior_coef = _prior_coefficients(prior_groups, lam, config.prior_loss) if prior_groups else {}
    prior_tasks = sorted(prior_coef)
    trace = GroupTrace(current)
    if config.epochs == 0:
        return trace

    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    rng = np.random.default_rng([config.seed, 2, position])
    mixing = (1.0 - lam) / len(current) if prior_tasks else 1.0 / len(current)
    coef = {t: mixing for t in current}
    coef.update(prior_coef)
    # prior heads are forwarded even at lambda=0 so the reported L_prior stays available
    active = current + prior_tasks
    current_set = set(current)
    # an adapter read by a current head trains at the group rate, one read only by priors at the prior rate
    current_keys = {state.heads[t].adapter_key for t in current} if state.adapters else set()
    prior_keys = {state.heads[t].adapter_key for t in prior_tasks} - current_keys if state.adapters else set()
    velocity = {}
    wd = config.weight_decay
    state.train()

    def step(key, param, grad, lr):
        velocity[key] = momentum_step(param, grad, velocity.get(key), lr, config.momentum)

    initial = None
    for epoch in range(config.epochs):
        lr = lr_at_epoch(config, epoch)
        adapter_lr = {**{k: config.prior_group_lr for k in prior_keys}, **{k: lr for k in current_keys}}
        order = rng.permutation(n)
        batches = [order[i:i + config.batch_size] for i in range(0, n, config.batch_size)]
        if len(batches) > 1 and batches[-1].size < 2:
            batches.pop()
        ep_obj, ep_cur, ep_pri = [], [], []
        for idx in batches:
            xb = X[idx]
            grads, task_loss = {}, {}
            for t in active:
                P, cache = forward(state, t, xb)
                yb = Y[idx, t]
                w = weights.class_weights[t]
                loss, nclamp = balanced_cross_entropy(P, yb, w, return_clamped=True)
                trace.clamped += nclamp
                task_loss[t] = loss
                if coef[t] != 0.0:
                    g = gradients(state, t, xb, yb, w, cache=cache, weight_decay=0.0)
                    grads[t] = g
            cur = float(np.mean([task_loss[t] for t in current]))
            pri = None
            if prior_tasks:
                if config.prior_loss == "pooled":
                    pri = float(np.mean([task_loss[t] for t in prior_tasks]))
                else:
                    pri = float(np.mean([np.mean([task_loss[t] for t in g]) for g in prior_groups]))
            ep_obj.append(transfer_loss(cur, pri, lam))
            ep_cur.append(cur)
            ep_pri.append(pri)

            adapter_grads = {}
            for t in active:
                head = state.heads[t]
                head_lr = lr if t in current_set else config.prior_group_lr
                g = grads.get(t)
                for name in HEAD_PARAMS:
                    total = coef[t] * g[name] if g is not None else np.zeros_like(getattr(head, name))
                    if wd and name in ("W1", "W2"):
                        total = total + wd * getattr(head, name)
                    step((t, name), getattr(head, name), total, head_lr)
                if g is not None and "adapter" in g:
                    acc = adapter_grads.setdefault(head.adapter_key, {})
                    for k, v in g["adapter"].items():
                        acc[k] = acc[k] + coef[t] * v if k in acc else coef[t] * v
            for key, ad_lr in adapter_lr.items():
                ad = state.adapters[key]
                ag = adapter_grads.get(key, {})
                g_ws = ag.get("Ws", np.zeros_like(ad.Ws))
                if wd:
                    g_ws = g_ws + wd * ad.Ws
                step(("adapter", key, "Ws"), ad.Ws, g_ws, ad_lr)
                step(("adapter", key, "bs"), ad.bs, ag.get("bs", np.zeros_like(ad.bs)), ad_lr)

        mean_obj = float(np.mean(ep_obj))
        trace.loss.append(mean_obj)
        trace.current_loss.append(float(np.mean(ep_cur)))
        trace.prior_loss.append(float(np.mean(ep_pri)) if prior_tasks else None)
        if initial is None:
            initial = mean_obj
        if not np.isfinite(mean_obj) or mean_obj > config.divergence_factor * initial:
            raise TrainingDivergedError(
                f"group {current} diverged at epoch {epoch}: loss {mean_obj:.4g} vs initial {initial:.4g}"
            )
    return trace


def plan_curriculum(labels, rows=None, tau="auto", embedding: str = "rows"):
    """Correlate, cluster and order the tasks on the given (training) rows.

    Returns ``(correlation, dendrogram, clusters, curriculum)``.
    """
    corr = pearson_matrix(labels, rows)
    if labels.n_tasks == 1:
        clusters = TaskClusterSet([frozenset([0])], tau=None)
        return corr, None, clusters, learning_sequence(labels, clusters, rows)
    dend = ward_linkage(corr, embedding)
    threshold = auto_tau(dend) if tau in (None, "auto") else float(tau)
    clusters = cut_dendrogram(dend, threshold)
    return corr, dend, clusters, learning_sequence(labels, clusters, rows)


def evaluate(state: ModelState, features, labels, rows, tasks=None, fpr_target: float = 0.10) -> dict:
    """Eval-mode metrics per task plus unweighted means over tasks."""
    X = features.values[np.asarray(rows)]
    Y = labels.values[np.asarray(rows)]
    tasks = sorted(state.heads) if tasks is None else sorted(tasks)
    was = state.mode
    state.eval()
    per_task = {}
    for t in tasks:
        P, _ = forward(state, t, X)
        m = {"accuracy": accuracy(P.argmax(axis=1), Y[:, t]), "auc": None, "recall_at_fpr": None}
        if P.shape[1] == 2 and 0 < Y[:, t].sum() < Y.shape[0]:
            sp = ScoredPredictions(P[:, 1], Y[:, t])
            m["auc"] = auc(sp)
            m["recall_at_fpr"] = recall_at_fpr(sp, fpr_target)
        per_task[labels.task_names[t]] = m
    state.mode = was

    def mean_of(key):
        vals = [m[key] for m in per_task.values() if m[key] is not None]
        return float(np.mean(vals)) if vals else None

    per_task_mean = {
        "accuracy": mean_of("accuracy"),
        "auc": mean_of("auc"),
        "recall_at_fpr": mean_of("recall_at_fpr"),
        "aggregation": "unweighted mean over tasks",
        "fpr_target": fpr_target,
    }
    return {"tasks": per_task, "mean": per_task_mean}


@dataclass
class TrainReport:
    groups: list[list[int]]
    traces: list[GroupTrace]
    metrics: dict
    config: dict
    curriculum: dict
    numerics: dict
    wall_clock_seconds: float = 0.0

    @property
    def loss_by_group(self) -> list[list[float]]:
        return [tr.loss for tr in self.traces]

    @property
    def current_loss_by_group(self) -> list[list[float]]:
        return [tr.current_loss for tr in self.traces]

    @property
    def metrics_by_task(self) -> dict:
        return self.metrics["tasks"]

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "config": self.config,
            "curriculum": self.curriculum,
            "groups": self.groups,
            "loss_by_group": self.loss_by_group,
            "current_loss_by_group": self.current_loss_by_group,
            "prior_loss_by_group": [tr.prior_loss for tr in self.traces],
            "metrics_by_task": self.metrics["tasks"],
            "metrics_mean": self.metrics["mean"],
            "numerics": self.numerics,
        }
        if include_timing:
            d["wall_clock_seconds"] = self.wall_clock_seconds
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)


def _seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def new_state(config: TrainConfig, in_dim: int) -> ModelState:
    state = ModelState(rng_seed=config.seed)
    if config.adapter_enabled and config.adapter_scope == "model":
        state.adapter = init_adapter(in_dim, config.adapter_dim or in_dim, seed=_seed(config.seed, 3, 0))
    return state


def _group_adapter(state, config, in_dim, pos, group, done, corr, transfer):
    """Adapter for curriculum position ``pos`` under group scope: a copy of
    the adapter of the most correlated trained group, or a fresh one."""
    if transfer and done and corr is not None:
        P = np.abs(corr.values)
        scores = [P[np.ix_(sorted(g), sorted(group))].mean() for g in done]
        best = int(np.argmax(scores))
        src = state.adapters[state.heads[min(done[best])].adapter_key]
        return copy.deepcopy(src)
    return init_adapter(in_dim, config.adapter_dim or in_dim, seed=_seed(config.seed, 3, pos))


def run_curriculum(features, labels, split, curriculum: Curriculum, config: TrainConfig,
                   *, transfer: bool = True, state: ModelState | None = None):
    """Train the curriculum groups in order and evaluate on the test rows.

    With ``transfer`` every head of a non-first group is seeded by
    :func:`transfer_init` and prior groups enter the loss with weight
    ``config.transfer_lambda``; without it lambda is 0 and heads start fresh.
    Returns ``(report, state)``.
    """
    t0 = time.perf_counter()
    train = np.asarray(split.train_indices)
    X = features.values[train]
    Y = labels.values[train]
    weights = loss_weights(labels, train)
    state = new_state(config, features.dim) if state is None else state
    group_scope = config.adapter_enabled and config.adapter_scope == "group"
    if config.adapter_enabled:
        head_in = config.adapter_dim or features.dim
    else:
        head_in = features.dim
    dropout = config.dropout_rate if config.dropout_rate is not None else default_dropout_rate(train.size)
    corr = pearson_matrix(labels, train) if transfer and len(curriculum.groups) > 1 else None
    lam = config.transfer_lambda if transfer else 0.0

    traces, done = [], []
    for pos, group in enumerate(curriculum.groups):
        key = pos if group_scope else 0
        if group_scope:
            state.adapters[key] = _group_adapter(state, config, features.dim, pos, group, done, corr, transfer)
        for t in sorted(group):
            head = init_head(head_in, config.hidden_units, labels.class_counts[t], dropout,
                             seed=_seed(config.seed, 1, t), task_index=t)
            if transfer and done:
                head = transfer_init(head, [state.heads[s] for g in done for s in sorted(g)], corr)
            head.adapter_key = key
            state.heads[t] = head
        traces.append(train_group(state, group, done, X, Y, weights, config, lam=lam, position=pos))
        done.append(frozenset(group))

    tasks = sorted(set().union(*curriculum.groups))
    metrics = evaluate(state, features, labels, split.test_indices, tasks)
    report = TrainReport(
        groups=[sorted(g) for g in curriculum.groups],
        traces=traces,
        metrics=metrics,
        config=config.to_dict(),
        curriculum=curriculum.to_dict(),
        numerics={"prob_floor": PROB_FLOOR, "clamped_probabilities": sum(tr.clamped for tr in traces),
                  "dropout_rate": dropout, "transfer": transfer},
        wall_clock_seconds=time.perf_counter() - t0,
    )
    return report, state


# ------------------------------------------------------- paradigm harness


def _paradigm_curriculum(paradigm, labels, train_rows, tau, seed):
    _, _, clusters, cur = plan_curriculum(labels, train_rows, tau)
    if paradigm in ("cilicia", "cilicia_no_transfer"):
        return cur
    n_groups = len(clusters.clusters)
    if paradigm == "random_split_curriculum":
        split = random_split(labels.n_tasks, n_groups, seed)
    else:
        split = crosscorr_split(pearson_matrix(labels, train_rows), n_groups)
    return learning_sequence(labels, split, train_rows)


def run_paradigm(paradigm, features, labels, config: TrainConfig, seed: int, fractions=(0.8, 0.1, 0.1), tau="auto"):
    """One end-to-end run; returns per-task test accuracy keyed by task name."""
    if paradigm not in PARADIGMS:
        raise ValueError(f"unknown paradigm {paradigm!r}")
    cfg = replace(config, seed=seed)
    split = split_dataset(features.n_samples, fractions, seed)
    T = labels.n_tasks
    if paradigm == "individual":
        acc = {}
        for t in range(T):
            cur = Curriculum([(frozenset([t]), 0.0)])
            report, _ = run_curriculum(features, labels, split, cur, cfg, transfer=False)
            acc.update({k: v["accuracy"] for k, v in report.metrics_by_task.items()})
        return acc, None
    if paradigm == "multitask":
        cur = Curriculum.single_group(T)
        transfer = True
    else:
        cur = _paradigm_curriculum(paradigm, labels, split.train_indices, tau, seed)
        transfer = paradigm != "cilicia_no_transfer"
    report, _ = run_curriculum(features, labels, split, cur, cfg, transfer=transfer)
    return {k: v["accuracy"] for k, v in report.metrics_by_task.items()}, report.groups


@dataclass
class ComparisonTable:
    paradigms: list[str]
    seeds: list[int]
    task_names: list[str]
    accuracy: dict  # paradigm -> seed -> task -> accuracy
    groups: dict  # paradigm -> seed -> groups used
    significance: dict

    def mean_accuracy(self, paradigm) -> np.ndarray:
        """Per-seed accuracy averaged over tasks."""
        return np.array([np.mean([self.accuracy[paradigm][s][t] for t in self.task_names]) for s in self.seeds])

    def rows(self) -> list[dict]:
        out = []
        for p in self.paradigms:
            for t in self.task_names + ["ALL"]:
                if t == "ALL":
                    vals = self.mean_accuracy(p)
                else:
                    vals = np.array([self.accuracy[p][s][t] for s in self.seeds])
                out.append({
                    "paradigm": p, "task": t, "mean_accuracy": float(vals.mean()),
                    "std_accuracy": float(vals.std(ddof=1)) if vals.size > 1 else 0.0, "n_seeds": int(vals.size),
                })
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["paradigm", "task", "mean_accuracy", "std_accuracy", "n_seeds"], lineterminator="\n")
        w.writeheader()
        for r in self.rows():
            w.writerow({**r, "mean_accuracy": repr(r["mean_accuracy"]), "std_accuracy": repr(r["std_accuracy"])})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "paradigms": self.paradigms,
            "seeds": self.seeds,
            "tasks": self.task_names,
            "rows": self.rows(),
            "per_seed_mean_accuracy": {p: self.mean_accuracy(p).tolist() for p in self.paradigms},
            "groups": {p: {str(s): g for s, g in by_seed.items()} for p, by_seed in self.groups.items()},
            "significance": self.significance,
        }


def _significance(table: ComparisonTable, reference="cilicia") -> dict:
    if reference not in table.paradigms or len(table.seeds) < 2:
        return {}
    ref = table.mean_accuracy(reference)
    sig = {"test": "paired t over seeds on mean task accuracy", "reference": reference, "against": {}}
    for p in table.paradigms:
        if p == reference:
            continue
        other = table.mean_accuracy(p)
        entry = {"mean_difference": float(np.mean(ref - other))}
        try:
            t, p_two = paired_t_test(ref, other)
            entry.update(t=t, p_two_sided=p_two, p_one_sided_greater=p_two / 2 if t > 0 else 1 - p_two / 2)
        except ValueError as exc:
            entry.update(t=None, p_two_sided=None, p_one_sided_greater=None, note=str(exc))
        sig["against"][p] = entry
    return sig


def _run_job(args):
    paradigm, features, labels, config, seed, fractions, tau = args
    return paradigm, seed, run_paradigm(paradigm, features, labels, config, seed, fractions, tau)


def compare_paradigms(features, labels, config: TrainConfig, paradigms=PARADIGMS, seeds=range(10),
                      fractions=(0.8, 0.1, 0.1), tau="auto", jobs: int = 1) -> ComparisonTable:
    """Run every paradigm on every seed (same split per seed) and tabulate
    test accuracy with paired significance against the full pipeline."""
    paradigms = list(paradigms)
    if not paradigms:
        raise ValueError("need at least one paradigm")
    for p in paradigms:
        if p not in PARADIGMS:
            raise ValueError(f"unknown paradigm {p!r}")
    seeds = [int(s) for s in seeds]
    jobs_list = [(p, features, labels, config, s, fractions, tau) for p in paradigms for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_job, jobs_list))
    else:
        results = [_run_job(j) for j in jobs_list]
    acc = {p: {} for p in paradigms}
    groups = {p: {} for p in paradigms}
    for p, s, (a, g) in results:
        acc[p][s] = a
        groups[p][s] = g
    table = ComparisonTable(paradigms, seeds, list(labels.task_names), acc, groups, {})
    table.significance = _significance(table)
    return table
