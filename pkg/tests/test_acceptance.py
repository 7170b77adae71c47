"""Acceptance criteria, one test each, at their stated tolerances.

Each test prints a single ``[PASS]``/``[FAIL]`` line. Run directly with
``python tests/test_acceptance.py`` or through pytest (``-s`` shows the
lines inline; they also appear in the captured output of failures).
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.special import betainc

sys.path.insert(0, str(Path(__file__).parent))

from gradcheck import max_relative_errors, random_state  # noqa: E402
from test_metrics import pair_count_auc  # noqa: E402
from ward_oracle import naive_ward  # noqa: E402

from taskcurriculum.clustering import auto_tau, cut_dendrogram, ward_linkage  # noqa: E402
from taskcurriculum.correlation import pearson_matrix  # noqa: E402
from taskcurriculum.curriculum import Curriculum, learning_sequence  # noqa: E402
from taskcurriculum.dataset import LabelMatrix, SynthSpec, split_dataset, synth_generate  # noqa: E402
from taskcurriculum.metrics import ScoredPredictions, auc, paired_t_test, recall_at_fpr, two_proportion_z  # noqa: E402
from taskcurriculum.model import init_head, load_checkpoint, save_checkpoint  # noqa: E402
from taskcurriculum.training import (  # noqa: E402
    PARADIGMS,
    TrainConfig,
    class_weights,
    compare_paradigms,
    evaluate,
    loss_weights,
    lr_at_epoch,
    plan_curriculum,
    run_curriculum,
    train_group,
)

# three planted clusters of three tasks whose feature directions overlap, so
# a shared layer learned on one cluster is partly reusable by the others
TRANSFER_SPEC = SynthSpec(
    n_samples=1000, n_clusters=3, tasks_per_cluster=[3, 3, 3], flip_prob=[0.05, 0.15, 0.25],
    feature_dim=16, feature_noise_sigma=0.7, cross_cluster_feature_overlap=0.5, seed=0,
)
# the 2-wide adapter is narrower than the three directions a mixed group needs
TRANSFER_CONFIG = TrainConfig(
    epochs=300, batch_size=100, lr0=0.01, hidden_units=32, dropout_rate=0.5,
    adapter_enabled=True, adapter_dim=2, adapter_scope="group",
)
SEEDS = range(10)


def verdict(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def labels_from(values) -> LabelMatrix:
    values = np.asarray(values, dtype=np.int64)
    return LabelMatrix(values, [2] * values.shape[1], [f"t{j}" for j in range(values.shape[1])])


def test_criterion_1_ward_oracle(capsys):
    t0 = time.perf_counter()
    worst, mismatched = 0.0, 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        # correlated binary tasks: noisy copies of a few latent factors
        z = rng.integers(0, 2, size=(400, 3))
        src = z[:, rng.integers(0, 3, 8)]
        flips = rng.random((400, 8)) < rng.uniform(0.05, 0.45, 8)
        corr = pearson_matrix(labels_from(src ^ flips))
        ours = ward_linkage(corr)
        ref = naive_ward(corr.values)  # rows of the correlation matrix are the points
        if [(m.left, m.right) for m in ours.merges] != [(a, b) for a, b, _ in ref]:
            mismatched += 1
        worst = max(worst, float(np.abs(ours.distances - np.array([d for *_, d in ref])).max()))
    elapsed = time.perf_counter() - t0
    ok = mismatched == 0 and worst <= 1e-9 and elapsed < 5
    verdict(capsys, 1, ok, f"merge ids differ in {mismatched}/50 seeds, max distance gap {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_planted_recovery(capsys):
    t0 = time.perf_counter()
    hits = 0
    for seed in range(100):
        _, labels, planted = synth_generate(SynthSpec(2000, 3, [2, 5, 3], 0.1, 16, seed=seed))
        dend = ward_linkage(pearson_matrix(labels))
        hits += cut_dendrogram(dend, auto_tau(dend)).canonical() == planted.canonical()
    elapsed = time.perf_counter() - t0
    ok = hits >= 95 and elapsed < 30
    verdict(capsys, 2, ok, f"planted partition recovered in {hits}/100 seeds, {elapsed:.2f}s")
    assert ok


def test_criterion_3_curriculum_order(capsys):
    t0 = time.perf_counter()
    hits = 0
    for seed in range(100):
        _, labels, planted = synth_generate(SynthSpec(2000, 3, [3, 3, 3], [0.05, 0.25, 0.4], 8, seed=seed))
        hits += learning_sequence(labels, planted).groups == list(planted.clusters)
    elapsed = time.perf_counter() - t0
    ok = hits >= 95 and elapsed < 30
    verdict(capsys, 3, ok, f"clusters ordered by ascending flip probability in {hits}/100 seeds, {elapsed:.2f}s")
    assert ok


def test_criterion_4_gradients(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        state, rng = random_state(seed, D=16, H=32, K=2, mode="eval")
        X = rng.normal(size=(8, 16))
        y = rng.integers(0, 2, 8)
        w = class_weights(y, 2)
        worst = max(worst, max(max_relative_errors(state, X, y, w, h=1e-5).values()))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 10
    verdict(capsys, 4, ok, f"max relative error {worst:.2e} over 20 heads, {elapsed:.2f}s")
    assert ok


def test_criterion_5_loss_identities(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    sums = []
    for _ in range(1000):
        K = int(rng.integers(2, 10))
        counts = rng.integers(1, 1000, K)
        sums.append(class_weights(np.repeat(np.arange(K), counts), K).sum())
    sum_gap = float(np.abs(np.array(sums) - 1).max())
    w = class_weights([0] * 900 + [1] * 100, 2)
    w_gap = float(np.abs(w - [0.1, 0.9]).max())

    feats, labels, _ = synth_generate(SynthSpec(300, 2, [2, 2], 0.1, 6, seed=1))
    cfg = TrainConfig(epochs=10, batch_size=32, lr0=0.01, hidden_units=16, transfer_lambda=0.0)
    split = split_dataset(feats.n_samples, seed=0)
    _, base = run_curriculum(feats, labels, split, Curriculum([(frozenset([0, 1]), 0.0)]), cfg, transfer=False)
    X, Y = feats.values[split.train_indices], labels.values[split.train_indices]
    lw = loss_weights(labels, split.train_indices)
    traces = []
    for priors in ([frozenset([0, 1])], []):
        st = base.copy()
        for t in (2, 3):
            st.heads[t] = init_head(6, 16, 2, 0.5, seed=t, task_index=t)
        traces.append(train_group(st, [2, 3], priors, X, Y, lw, cfg, lam=0.0, position=1))
    lam_gap = float(np.abs(np.subtract(traces[0].loss, traces[1].loss)).max())

    sched = TrainConfig(lr_drop_period_epochs=100)
    lr_ok = (abs(lr_at_epoch(sched, 0) - 1e-3) <= 1e-15 and abs(lr_at_epoch(sched, 250) - 4e-5) <= 1e-15
             and all(abs(lr_at_epoch(sched, e) - 3.2e-7) <= 1e-18 for e in (500, 750, 999, 5000)))
    elapsed = time.perf_counter() - t0
    ok = sum_gap <= 1e-12 and w_gap <= 1e-12 and lam_gap <= 1e-9 and lr_ok and elapsed < 5
    verdict(capsys, 5, ok, f"weight-sum gap {sum_gap:.1e}, (900,100) gap {w_gap:.1e}, "
                           f"lambda=0 vs detached {lam_gap:.1e}, schedule {'ok' if lr_ok else 'wrong'}, {elapsed:.2f}s")
    assert ok


def test_criterion_6_metric_oracles(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    auc_gap = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        labels = rng.integers(0, 2, n)
        labels[:2] = (0, 1)
        scores = np.round(rng.random(n), 2)
        auc_gap = max(auc_gap, abs(auc(ScoredPredictions(scores, labels)) - pair_count_auc(scores, labels)))
    null = []
    for _ in range(1000):
        labels = rng.integers(0, 2, 200)
        labels[:2] = (0, 1)
        null.append(recall_at_fpr(ScoredPredictions(rng.random(200), labels), 0.10))
    null_mean = float(np.mean(null))

    a = np.array([0.74, 0.71, 0.69, 0.75, 0.72])
    b = np.array([0.70, 0.70, 0.66, 0.71, 0.73])
    d = a - b
    mean = d.sum() / d.size
    sd = np.sqrt(((d - mean) ** 2).sum() / (d.size - 1))
    t_hand = mean / (sd / np.sqrt(d.size))
    p_hand = betainc((d.size - 1) / 2, 0.5, (d.size - 1) / (d.size - 1 + t_hand ** 2))
    t, p = paired_t_test(a, b)
    pooled = (0.84 * 632 + 0.741 * 632) / 1264
    z_hand = (0.84 - 0.741) / np.sqrt(pooled * (1 - pooled) * (2 / 632))
    z, _ = two_proportion_z(0.84, 0.741, 632, 632)
    formula_gap = max(abs(t - t_hand), abs(p - p_hand), abs(z - z_hand))
    elapsed = time.perf_counter() - t0
    ok = auc_gap <= 1e-9 and abs(null_mean - 0.10) <= 0.02 and formula_gap <= 1e-9 and elapsed < 20
    verdict(capsys, 6, ok, f"auc vs pair count {auc_gap:.1e}, null recall mean {null_mean:.4f}, "
                           f"t/z vs hand {formula_gap:.1e}, {elapsed:.2f}s")
    assert ok


@pytest.fixture(scope="module")
def transfer_data():
    features, labels, planted = synth_generate(TRANSFER_SPEC)
    return features, labels, planted


@pytest.fixture(scope="module")
def comparison(transfer_data):
    features, labels, _ = transfer_data
    t0 = time.perf_counter()
    table = compare_paradigms(features, labels, TRANSFER_CONFIG, PARADIGMS, SEEDS)
    return table, time.perf_counter() - t0


def test_criterion_7_paradigm_comparison(comparison, capsys):
    table, elapsed = comparison
    rows = table.rows()
    complete = len(rows) == len(PARADIGMS) * (len(table.task_names) + 1) and list(table.paradigms) == list(PARADIGMS)
    cil = table.mean_accuracy("cilicia").mean()
    rnd = table.mean_accuracy("random_split_curriculum").mean()
    nt = table.mean_accuracy("cilicia_no_transfer").mean()
    p_rnd = table.significance["against"]["random_split_curriculum"]["p_one_sided_greater"]
    ok_a = cil >= rnd and p_rnd is not None and p_rnd < 0.1
    ok_b = cil >= nt - 0.005
    ok = complete and ok_a and ok_b and elapsed < 600
    means = ", ".join(f"{p} {table.mean_accuracy(p).mean():.4f}" for p in table.paradigms)
    verdict(capsys, 7, ok, f"(a) cilicia {cil:.4f} vs random split {rnd:.4f}, one-sided p {p_rnd:.4f}; "
                           f"(b) vs no transfer {nt:.4f}; full table {'yes' if complete else 'no'}; "
                           f"{elapsed:.0f}s [{means}]")
    assert ok


def test_criterion_8_determinism_and_round_trip(transfer_data, tmp_path, capsys):
    t0 = time.perf_counter()
    features, labels, _ = transfer_data
    cfg = TrainConfig(**{**TRANSFER_CONFIG.to_dict(), "epochs": 40, "seed": 3})
    split = split_dataset(features.n_samples, seed=3)
    cur = plan_curriculum(labels, split.train_indices)[3]
    a, state = run_curriculum(features, labels, split, cur, cfg)
    b, _ = run_curriculum(features, labels, split, cur, cfg)
    identical = a.to_json() == b.to_json()
    save_checkpoint(state, tmp_path / "ck.json")
    restored = load_checkpoint(tmp_path / "ck.json")
    tasks = sorted(state.heads)
    same_metrics = evaluate(restored, features, labels, split.test_indices, tasks) == a.metrics
    elapsed = time.perf_counter() - t0
    ok = identical and same_metrics and elapsed < 120
    verdict(capsys, 8, ok, f"reports bit-identical {identical}, restored metrics identical {same_metrics}, {elapsed:.1f}s")
    assert ok


def test_criterion_9_convergence_traces(transfer_data, capsys):
    features, labels, _ = transfer_data
    wins_objective = wins_current = 0
    for seed in SEEDS:
        cfg = TrainConfig(**{**TRANSFER_CONFIG.to_dict(), "seed": seed})
        split = split_dataset(features.n_samples, seed=seed)
        cur = plan_curriculum(labels, split.train_indices)[3]
        report, _ = run_curriculum(features, labels, split, cur, cfg)
        assert len(report.loss_by_group) == len(cur.groups)
        assert all(len(trace) == cfg.epochs for trace in report.loss_by_group)
        below_obj, below_cur = [], []
        for pos, group in enumerate(cur.groups[1:], start=1):
            alone, _ = run_curriculum(features, labels, split, Curriculum([(group, 0.0)]), cfg)
            scratch = alone.loss_by_group[0][0]
            below_obj.append(report.loss_by_group[pos][0] < scratch)
            below_cur.append(report.current_loss_by_group[pos][0] < scratch)
        wins_objective += all(below_obj)
        wins_current += all(below_cur)
    ok = wins_objective >= 8
    verdict(capsys, 9, ok, f"every later group starts below its from-scratch loss in {wins_objective}/10 seeds "
                           f"(current-group term alone: {wins_current}/10)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
