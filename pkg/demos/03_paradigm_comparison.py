# %% [markdown]
# # Comparing training paradigms
#
# Same data and split per seed; only the grouping and transfer change.
# Three paradigms over ten seeds take about two minutes; `--full` runs all
# six (about four). Shorter training or fewer seeds is too noisy to show
# the grouping effect.

# %%
import sys

from taskcurriculum import SynthSpec, TrainConfig, compare_paradigms, synth_generate
from taskcurriculum.training import PARADIGMS

full = "--full" in sys.argv
spec = SynthSpec(n_samples=1000, n_clusters=3, tasks_per_cluster=[3, 3, 3], flip_prob=[0.05, 0.15, 0.25],
                 feature_dim=16, feature_noise_sigma=0.7, cross_cluster_feature_overlap=0.5, seed=0)
features, labels, _ = synth_generate(spec)
config = TrainConfig(epochs=300, batch_size=100, lr0=0.01, hidden_units=32, dropout_rate=0.5,
                     adapter_enabled=True, adapter_dim=2)
paradigms = PARADIGMS if full else ("cilicia", "cilicia_no_transfer", "random_split_curriculum")
seeds = range(10)

# %%
table = compare_paradigms(features, labels, config, paradigms, seeds)
for p in table.paradigms:
    acc = table.mean_accuracy(p)
    print(f"{p:28s} {acc.mean():.4f} +/- {acc.std(ddof=1):.4f}")

# %%
for other, s in table.significance["against"].items():
    print(f"cilicia - {other}: {100 * s['mean_difference']:+.2f} pp, one-sided p {s['p_one_sided_greater']:.3f}")

# %%
# the same table as CSV, one row per (paradigm, task)
print(table.to_csv())
