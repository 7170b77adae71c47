# %% [markdown]
# # Training a curriculum of task groups
#
# Clusters are ordered by how strongly their tasks correlate, then trained
# one after another. Earlier groups stay in the loss with weight lambda.

# %%
from taskcurriculum import SynthSpec, TrainConfig, plan_curriculum, run_curriculum, split_dataset, synth_generate
from taskcurriculum.curriculum import Curriculum

spec = SynthSpec(n_samples=1000, n_clusters=3, tasks_per_cluster=[3, 3, 3], flip_prob=[0.05, 0.15, 0.25],
                 feature_dim=16, feature_noise_sigma=0.7, cross_cluster_feature_overlap=0.5, seed=0)
features, labels, _ = synth_generate(spec)
split = split_dataset(features.n_samples, (0.8, 0.1, 0.1), seed=0)

# %%
corr, dend, clusters, curriculum = plan_curriculum(labels, split.train_indices)
for group, score in curriculum.ordered_clusters:
    print(sorted(group), f"score {score:.3f}")

# %%
config = TrainConfig(epochs=300, batch_size=100, lr0=0.01, hidden_units=32, dropout_rate=0.5,
                     adapter_enabled=True, adapter_dim=2)
report, state = run_curriculum(features, labels, split, curriculum, config)
for name, m in report.metrics_by_task.items():
    print(f"{name}: acc {m['accuracy']:.3f}  auc {m['auc']:.3f}  recall@10%fpr {m['recall_at_fpr']:.3f}")
print("mean accuracy", round(report.metrics["mean"]["accuracy"], 4))

# %% [markdown]
# Convergence traces: first-epoch loss of each later group, against the
# same group trained alone from a fresh state.

# %%
for pos, group in enumerate(curriculum.groups):
    trace = report.loss_by_group[pos]
    line = f"group {sorted(group)}: epoch 0 {trace[0]:.4f}  last {trace[-1]:.4f}"
    if pos:
        alone, _ = run_curriculum(features, labels, split, Curriculum([(group, 0.0)]), config)
        line += f"  alone at epoch 0 {alone.loss_by_group[0][0]:.4f}"
    print(line)

# %%
# every epoch is in the report for plotting, e.g. with matplotlib:
# for g, trace in zip(report.groups, report.loss_by_group): plt.plot(trace, label=str(g))
print(report.to_json()[:300], "...")
