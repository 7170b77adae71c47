"""Per-task classifier heads over frozen features.

Each head is ``affine -> batch-norm -> ReLU -> inverted dropout -> affine ->
softmax``. An optional shared affine adapter in front of all heads gives the
tasks a trainable common layer. Gradients are closed-form.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "BN_EPS",
    "BN_MOMENTUM",
    "HEAD_PARAMS",
    "CheckpointError",
    "TaskHead",
    "SharedAdapter",
    "ModelState",
    "init_head",
    "init_adapter",
    "default_dropout_rate",
    "forward",
    "gradients",
    "transfer_init",
    "save_checkpoint",
    "load_checkpoint",
]

BN_EPS = 1e-5
BN_MOMENTUM = 0.9
FORMAT_VERSION = 1

HEAD_PARAMS = ("W1", "b1", "bn_gamma", "bn_beta", "W2", "b2")
_HEAD_WEIGHTS = ("W1", "W2")


class CheckpointError(ValueError):
    pass


@dataclass
class TaskHead:
    W1: np.ndarray
    b1: np.ndarray
    bn_gamma: np.ndarray
    bn_beta: np.ndarray
    bn_running_mean: np.ndarray
    bn_running_var: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    dropout_rate: float = 0.5
    task_index: int = 0
    adapter_key: int = 0

    @property
    def in_dim(self) -> int:
        return self.W1.shape[0]

    @property
    def hidden(self) -> int:
        return self.W1.shape[1]

    @property
    def n_classes(self) -> int:
        return self.W2.shape[1]

    def copy(self) -> "TaskHead":
        return copy.deepcopy(self)


@dataclass
class SharedAdapter:
    Ws: np.ndarray
    bs: np.ndarray

    @property
    def out_dim(self) -> int:
        return self.Ws.shape[1]


@dataclass
class ModelState:
    """Heads keyed by task index plus optional shared adapters.

    A head reads the adapter stored under its ``adapter_key``; with a single
    model-wide adapter every head uses key 0. No adapters means heads read
    the raw features.
    """

    heads: dict[int, TaskHead] = field(default_factory=dict)
    adapters: dict[int, SharedAdapter] = field(default_factory=dict)
    mode: str = "train"
    rng_seed: int = 0
    _rngs: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def adapter(self) -> SharedAdapter | None:
        return self.adapters.get(0)

    @adapter.setter
    def adapter(self, value: SharedAdapter | None):
        if value is None:
            self.adapters.pop(0, None)
        else:
            self.adapters[0] = value

    def adapter_for(self, task: int) -> SharedAdapter | None:
        if not self.adapters:
            return None
        key = self.heads[task].adapter_key
        if key not in self.adapters:
            raise KeyError(f"head {task} refers to missing adapter {key}")
        return self.adapters[key]

    def dropout_rng(self, task: int) -> np.random.Generator:
        # one stream per head, so evaluating extra heads never shifts another head's masks
        if task not in self._rngs:
            self._rngs[task] = np.random.default_rng(np.random.SeedSequence(self.rng_seed, spawn_key=(task,)))
        return self._rngs[task]

    def train(self) -> "ModelState":
        self.mode = "train"
        return self

    def eval(self) -> "ModelState":
        self.mode = "eval"
        return self

    def copy(self) -> "ModelState":
        return copy.deepcopy(self)


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_head(D: int, H: int = 512, K: int = 2, dropout_rate: float = 0.5, seed: int = 0, task_index: int = 0) -> TaskHead:
    if min(D, H, K) < 1:
        raise ValueError("D, H and K must be >= 1")
    if not 0.0 <= dropout_rate < 1.0:
        raise ValueError("dropout_rate must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    return TaskHead(
        W1=_glorot(rng, D, H),
        b1=np.zeros(H),
        bn_gamma=np.ones(H),
        bn_beta=np.zeros(H),
        bn_running_mean=np.zeros(H),
        bn_running_var=np.ones(H),
        W2=_glorot(rng, H, K),
        b2=np.zeros(K),
        dropout_rate=float(dropout_rate),
        task_index=int(task_index),
    )


def init_adapter(D: int, S: int, seed: int = 0) -> SharedAdapter:
    rng = np.random.default_rng(seed)
    return SharedAdapter(_glorot(rng, D, S), np.zeros(S))


def default_dropout_rate(n_train: int) -> float:
    """0.75 for training sets under 1000 samples, else 0.5."""
    return 0.75 if n_train < 1000 else 0.5


def _softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(state: ModelState, task: int, X, *, update_stats: bool = True, dropout: bool | None = None):
    """Class probabilities of head ``task`` on the rows of ``X``.

    In train mode batch-norm uses batch statistics (updating the running
    estimates unless ``update_stats`` is false) and dropout is active unless
    ``dropout=False``. Eval mode uses the running statistics and no dropout.
    Returns ``(probabilities, cache)``; the cache feeds :func:`gradients`.
    """
    head = state.heads[task]
    X = np.asarray(X, dtype=float)
    train_mode = state.mode == "train"
    if X.ndim != 2:
        raise ValueError("X must be a 2-D batch")
    if train_mode and X.shape[0] < 2:
        raise ValueError("batch-norm needs a batch of at least 2 in train mode")

    adapter = state.adapter_for(task)
    if adapter is not None:
        if X.shape[1] != adapter.Ws.shape[0]:
            raise ValueError(f"feature dim {X.shape[1]} does not match adapter input {adapter.Ws.shape[0]}")
        A = X @ adapter.Ws + adapter.bs
    else:
        A = X
    if A.shape[1] != head.in_dim:
        raise ValueError(f"input dim {A.shape[1]} does not match head input {head.in_dim}")

    Z1 = A @ head.W1 + head.b1
    if train_mode:
        mu = Z1.mean(axis=0)
        var = Z1.var(axis=0)
        if update_stats:
            n = Z1.shape[0]
            head.bn_running_mean = BN_MOMENTUM * head.bn_running_mean + (1 - BN_MOMENTUM) * mu
            head.bn_running_var = BN_MOMENTUM * head.bn_running_var + (1 - BN_MOMENTUM) * var * n / (n - 1)
    else:
        mu, var = head.bn_running_mean, head.bn_running_var
    inv_std = 1.0 / np.sqrt(var + BN_EPS)
    xhat = (Z1 - mu) * inv_std
    Y = head.bn_gamma * xhat + head.bn_beta
    R = np.maximum(Y, 0.0)

    use_dropout = train_mode if dropout is None else (dropout and train_mode)
    if use_dropout and head.dropout_rate > 0:
        keep = 1.0 - head.dropout_rate
        mask = (state.dropout_rng(task).random(R.shape) < keep) / keep
        Dm = R * mask
    else:
        mask = None
        Dm = R
    P = _softmax(Dm @ head.W2 + head.b2)
    cache = {
        "X": X, "A": A, "xhat": xhat, "inv_std": inv_std, "Y": Y,
        "mask": mask, "Dm": Dm, "P": P, "batch_stats": train_mode,
    }
    return P, cache


def gradients(state: ModelState, task: int, X, targets, class_weights, *, cache=None, weight_decay: float = 1e-4) -> dict:
    """Gradients of the class-weighted cross-entropy of one head.

    The objective is ``-(1/N) sum_i w[y_i] log p[i, y_i]`` plus
    ``weight_decay / 2`` times the squared norm of every weight matrix
    (biases and batch-norm parameters are not decayed). Gradients for the
    head's adapter, if any, are returned under ``"adapter"``.
    """
    head = state.heads[task]
    if cache is None:
        _, cache = forward(state, task, X, update_stats=False)
    targets = np.asarray(targets, dtype=np.int64)
    w = np.asarray(class_weights, dtype=float)
    P = cache["P"]
    N = P.shape[0]
    if targets.shape != (N,):
        raise ValueError("targets must hold one class index per row")

    G = P.copy()
    G[np.arange(N), targets] -= 1.0
    G *= (w[targets] / N)[:, None]

    grads = {"W2": cache["Dm"].T @ G, "b2": G.sum(axis=0)}
    dR = G @ head.W2.T
    if cache["mask"] is not None:
        dR = dR * cache["mask"]
    dY = dR * (cache["Y"] > 0)
    xhat = cache["xhat"]
    grads["bn_gamma"] = (dY * xhat).sum(axis=0)
    grads["bn_beta"] = dY.sum(axis=0)
    dxhat = dY * head.bn_gamma
    if cache["batch_stats"]:
        dZ1 = cache["inv_std"] / N * (N * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
    else:
        dZ1 = dxhat * cache["inv_std"]
    grads["W1"] = cache["A"].T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)
    if weight_decay:
        for name in _HEAD_WEIGHTS:
            grads[name] = grads[name] + weight_decay * getattr(head, name)

    adapter = state.adapter_for(task)
    if adapter is not None:
        dA = dZ1 @ head.W1.T
        g_ws = cache["X"].T @ dA
        if weight_decay:
            g_ws = g_ws + weight_decay * adapter.Ws
        grads["adapter"] = {"Ws": g_ws, "bs": dA.sum(axis=0)}
    return grads


def transfer_init(target: TaskHead, sources, corr) -> TaskHead:
    """Seed ``target`` from the trained source head most correlated with it.

    The hidden layer and all batch-norm parameters are copied from the source
    with the largest ``|r|``; the output layer is copied only when the class
    counts agree and ``r >= 0.5``. Sources are left untouched.
    """
    P = np.asarray(corr.values if hasattr(corr, "values") else corr, dtype=float)
    compatible = [s for s in sources if s.W1.shape == target.W1.shape]
    if not compatible:
        raise ValueError(f"no source head with hidden layer shape {target.W1.shape}")
    best = max(compatible, key=lambda s: (abs(P[s.task_index, target.task_index]), -s.task_index))
    r = P[best.task_index, target.task_index]
    new = target.copy()
    for name in ("W1", "b1", "bn_gamma", "bn_beta", "bn_running_mean", "bn_running_var"):
        setattr(new, name, getattr(best, name).copy())
    if best.n_classes == target.n_classes and r >= 0.5:
        new.W2 = best.W2.copy()
        new.b2 = best.b2.copy()
    return new


# -------------------------------------------------------------- checkpoints

_HEAD_ARRAYS = ("W1", "b1", "bn_gamma", "bn_beta", "bn_running_mean", "bn_running_var", "W2", "b2")


def state_to_dict(state: ModelState) -> dict:
    heads = {}
    for t, h in sorted(state.heads.items()):
        d = {name: getattr(h, name).tolist() for name in _HEAD_ARRAYS}
        d["dropout_rate"] = h.dropout_rate
        d["task_index"] = h.task_index
        d["adapter_key"] = h.adapter_key
        heads[str(t)] = d
    adapters = {str(k): {"Ws": a.Ws.tolist(), "bs": a.bs.tolist()} for k, a in sorted(state.adapters.items())}
    return {
        "format_version": FORMAT_VERSION,
        "mode": state.mode,
        "rng_seed": state.rng_seed,
        "heads": heads,
        "adapters": adapters,
    }


def _field(d, key, where):
    try:
        return d[key]
    except (KeyError, TypeError):
        raise CheckpointError(f"checkpoint is missing field {where}{key!r}") from None


def state_from_dict(d: dict) -> ModelState:
    version = _field(d, "format_version", "")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"format_version {version!r} is not supported (expected {FORMAT_VERSION})")
    heads = {}
    for key, hd in _field(d, "heads", "").items():
        where = f"heads[{key}]."
        arrays = {name: np.asarray(_field(hd, name, where), dtype=float) for name in _HEAD_ARRAYS}
        heads[int(key)] = TaskHead(
            **arrays,
            dropout_rate=float(_field(hd, "dropout_rate", where)),
            task_index=int(_field(hd, "task_index", where)),
            adapter_key=int(_field(hd, "adapter_key", where)),
        )
    adapters = {}
    for key, ad in _field(d, "adapters", "").items():
        where = f"adapters[{key}]."
        adapters[int(key)] = SharedAdapter(np.asarray(_field(ad, "Ws", where), dtype=float),
                                           np.asarray(_field(ad, "bs", where), dtype=float))
    mode = _field(d, "mode", "")
    if mode not in ("train", "eval"):
        raise CheckpointError(f"field 'mode' has invalid value {mode!r}")
    return ModelState(heads, adapters, mode, int(_field(d, "rng_seed", "")))


def save_checkpoint(state: ModelState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)) + "\n")


def load_checkpoint(path) -> ModelState:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: truncated or malformed checkpoint ({exc.msg} at char {exc.pos})") from None
    return state_from_dict(d)
