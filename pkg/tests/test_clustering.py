import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import linkage

from taskcurriculum.clustering import (
    Dendrogram,
    TaskClusterSet,
    auto_tau,
    crosscorr_split,
    cut_dendrogram,
    random_split,
    task_distances,
    ward_from_distances,
    ward_linkage,
)
from taskcurriculum.correlation import CorrelationMatrix, pearson_matrix
from taskcurriculum.dataset import SynthSpec, synth_generate

from ward_oracle import naive_ward


def test_two_tasks_single_merge():
    dend = ward_from_distances(np.array([[0.0, 1.3], [1.3, 0.0]]))
    assert len(dend.merges) == 1
    assert dend.merges[0].distance == pytest.approx(1.3, abs=1e-15)
    assert dend.merges[0].size == 2


def test_three_points_lance_williams_by_hand():
    D = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 9.0], [10.0, 9.0, 0.0]])
    dend = ward_from_distances(D)
    m0, m1 = dend.merges
    assert (m0.left, m0.right, m0.distance) == (0, 1, 1.0)
    assert (m1.left, m1.right) == (2, 3)
    assert m1.distance == pytest.approx(np.sqrt(361 / 3), abs=1e-12)
    assert m1.distance == pytest.approx(10.9697, abs=1e-4)


def test_cut_hand_dendrogram():
    D = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 9.0], [10.0, 9.0, 0.0]])
    dend = ward_from_distances(D)
    assert cut_dendrogram(dend, 5).canonical() == [(0, 1), (2,)]
    assert cut_dendrogram(dend, 100).canonical() == [(0, 1, 2)]
    assert cut_dendrogram(dend, 0.5).canonical() == [(0,), (1,), (2,)]


def test_tie_break_lexicographic():
    # equilateral triangle: all pairs tie, (0, 1) must merge first
    D = np.ones((3, 3)) - np.eye(3)
    dend = ward_from_distances(D)
    assert (dend.merges[0].left, dend.merges[0].right) == (0, 1)


def test_matches_scipy_ward(rng):
    for _ in range(20):
        pts = rng.standard_normal((9, 4))
        ours = ward_from_distances(np.linalg.norm(pts[:, None] - pts[None], axis=-1))
        ref = linkage(pts, method="ward")
        assert np.allclose(ours.distances, ref[:, 2], atol=1e-10)
        assert [(m.left, m.right) for m in ours.merges] == [tuple(sorted(map(int, r[:2]))) for r in ref]


def test_matches_naive_oracle(rng):
    for _ in range(10):
        pts = rng.standard_normal((7, 3))
        ours = ward_from_distances(np.linalg.norm(pts[:, None] - pts[None], axis=-1))
        ref = naive_ward(pts)
        assert [(m.left, m.right) for m in ours.merges] == [(a, b) for a, b, _ in ref]
        assert np.allclose(ours.distances, [d for *_, d in ref], atol=1e-10)


def test_dendrogram_structure(rng):
    labels_vals = rng.integers(0, 2, size=(300, 10))
    from conftest import make_labels

    dend = ward_linkage(pearson_matrix(make_labels(list(labels_vals.T))))
    T = 10
    assert len(dend.merges) == T - 1
    assert np.all(np.diff(dend.distances) >= -1e-12)
    sizes = {i: 1 for i in range(T)}
    seen = set()
    for k, m in enumerate(dend.merges):
        assert m.left not in seen and m.right not in seen
        seen |= {m.left, m.right}
        sizes[T + k] = sizes[m.left] + sizes[m.right]
        assert m.size == sizes[T + k]
    assert dend.merges[-1].size == T


def test_auto_tau_recovers_planted():
    _, labels, planted = synth_generate(SynthSpec(2000, 3, [2, 5, 3], 0.1, 16, seed=4))
    dend = ward_linkage(pearson_matrix(labels))
    assert cut_dendrogram(dend, auto_tau(dend)).canonical() == planted.canonical()


def test_one_minus_r_embedding_is_available():
    P = CorrelationMatrix(np.array([[1.0, 0.5], [0.5, 1.0]]), ["a", "b"])
    D = task_distances(P, "one_minus_r")
    assert D[0, 1] == pytest.approx(1.0)
    assert ward_linkage(P, "one_minus_r").merges[0].distance == pytest.approx(1.0)
    with pytest.raises(ValueError):
        task_distances(P, "cosine")


def test_non_finite_correlation_rejected():
    P = CorrelationMatrix(np.array([[1.0, np.nan], [np.nan, 1.0]]), ["a", "b"])
    with pytest.raises(ValueError, match="non-finite"):
        ward_linkage(P)


def test_json_and_dot():
    dend = ward_from_distances(np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 9.0], [10.0, 9.0, 0.0]]))
    again = Dendrogram.from_dict(dend.to_dict())
    assert again == dend
    dot = dend.to_dot(["a", "b", "c"])
    assert dot.startswith("digraph") and "n4 -> n3;" in dot


def _corr_with_totals(totals):
    # symmetric matrix whose off-diagonal row sums equal ``totals``
    T = len(totals)
    pairs = [(i, j) for i in range(T) for j in range(i + 1, T)]
    A = np.zeros((T, len(pairs)))
    for k, (i, j) in enumerate(pairs):
        A[i, k] = A[j, k] = 1.0
    x = np.linalg.lstsq(A, np.asarray(totals), rcond=None)[0]
    P = np.eye(T)
    for k, (i, j) in enumerate(pairs):
        P[i, j] = P[j, i] = x[k]
    return CorrelationMatrix(P, [f"t{i}" for i in range(T)])


def test_crosscorr_sort_and_chop():
    corr = _corr_with_totals([0.1, 0.9, 0.4, 0.5])
    split = crosscorr_split(corr, 2)
    assert [sorted(c) for c in split.clusters] == [[1, 3], [0, 2]]


def test_crosscorr_extremes():
    corr = _corr_with_totals([0.1, 0.9, 0.4, 0.5])
    assert crosscorr_split(corr, 1).canonical() == [(0, 1, 2, 3)]
    assert [sorted(c) for c in crosscorr_split(corr, 4).clusters] == [[1], [3], [2], [0]]


def test_crosscorr_remainder_to_earliest():
    corr = _corr_with_totals([0.5, 0.4, 0.3, 0.2, 0.1])
    assert [len(c) for c in crosscorr_split(corr, 2).clusters] == [3, 2]


def test_random_split():
    s = random_split(8, 2, seed=3)
    assert sorted(len(c) for c in s.clusters) == [4, 4]
    assert s.canonical() == random_split(8, 2, seed=3).canonical()
    assert random_split(5, 5, seed=1).canonical() == [(i,) for i in range(5)]
    with pytest.raises(ValueError):
        random_split(3, 4, seed=0)


def test_cluster_set_validation():
    with pytest.raises(ValueError):
        TaskClusterSet([frozenset([0, 1]), frozenset([1, 2])])
    with pytest.raises(ValueError):
        TaskClusterSet([frozenset([0]), frozenset([2])])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
def test_cut_partition_and_refinement(seed, tau1, tau2):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((8, 3))
    dend = ward_from_distances(np.linalg.norm(pts[:, None] - pts[None], axis=-1))
    lo, hi = sorted((tau1, tau2))
    a, b = cut_dendrogram(dend, lo), cut_dendrogram(dend, hi)
    for cut in (a, b):
        assert sorted(t for c in cut.clusters for t in c) == list(range(8))
    assert a.refines(b)
