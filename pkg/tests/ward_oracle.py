"""Brute-force Ward agglomeration used as an oracle in the tests.

At every step all active cluster pairs are scored from the raw points by
the WCSS increase ``|A||B| / (|A|+|B|) * ||c_A - c_B||^2``; the reported
distance is ``sqrt(2 * increase)`` so that two singletons merge at their
Euclidean distance.
"""

import numpy as np


def naive_ward(points):
    points = np.asarray(points, dtype=float)
    T = len(points)
    members = {i: [i] for i in range(T)}
    out = []
    next_id = T
    while len(members) > 1:
        best = None
        ids = sorted(members)
        for a_pos, a in enumerate(ids):
            for b in ids[a_pos + 1:]:
                A, B = points[members[a]], points[members[b]]
                na, nb = len(A), len(B)
                wcss_ab = ((np.vstack([A, B]) - np.vstack([A, B]).mean(0)) ** 2).sum()
                wcss_a = ((A - A.mean(0)) ** 2).sum()
                wcss_b = ((B - B.mean(0)) ** 2).sum()
                cost = np.sqrt(2.0 * max(wcss_ab - wcss_a - wcss_b, 0.0))
                if best is None or cost < best[0]:
                    best = (cost, a, b)
        cost, a, b = best
        members[next_id] = members.pop(a) + members.pop(b)
        out.append((a, b, cost))
        next_id += 1
    return out
