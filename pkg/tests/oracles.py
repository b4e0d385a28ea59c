"""Brute-force reference implementations, independent of the package code paths."""

import itertools
import math

import numpy as np


def euclid(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def warping_paths(n, m):
    """All monotone paths from (0, 0) to (n-1, m-1) with steps (1,0), (0,1), (1,1)."""

    def rec(i, j):
        if (i, j) == (n - 1, m - 1):
            yield [(i, j)]
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for tail in rec(a, b):
                    yield [(i, j)] + tail

    yield from rec(0, 0)


def dtw_brute(a, b):
    """Minimum summed cost over all warping paths, and the shortest such path's length."""
    best, best_len = math.inf, None
    for path in warping_paths(len(a), len(b)):
        c = sum(euclid(a[i], b[j]) for i, j in path)
        if c < best - 1e-12 or (abs(c - best) <= 1e-12 and len(path) < best_len):
            best, best_len = c, len(path)
    return best, best / best_len


def frechet_brute(a, b):
    """Min over couplings (same path family) of the max pointwise distance."""
    return min(max(euclid(a[i], b[j]) for i, j in path) for path in warping_paths(len(a), len(b)))


def interp_index(points, t):
    """Linear interpolation of a point list at fractional index t."""
    lo = int(math.floor(t))
    hi = min(lo + 1, len(points) - 1)
    w = t - lo
    return tuple((1 - w) * points[lo][d] + w * points[hi][d] for d in range(2))


def med_brute(a, b, n):
    ta = [interp_index(a, k * (len(a) - 1) / (n - 1)) for k in range(n)]
    tb = [interp_index(b, k * (len(b) - 1) / (n - 1)) for k in range(n)]
    return sum(euclid(p, q) for p, q in zip(ta, tb)) / n


def longest_consistent_brute(nodes, ancestors):
    """Largest subsequence with no later element an ancestor of an earlier one.

    ``ancestors[v]`` is the set of nodes that must precede ``v``.
    """
    n = len(nodes)
    for size in range(n, 0, -1):
        for combo in itertools.combinations(range(n), size):
            ok = all(
                nodes[combo[q]] not in ancestors[nodes[combo[p]]]
                for p in range(size)
                for q in range(p + 1, size)
            )
            if ok:
                return size
    return 0


def ancestors_brute(node_ids, edges):
    """Transitive closure by repeated relaxation."""
    anc = {v: set() for v in node_ids}
    for u, v in edges:
        anc[v].add(u)
    changed = True
    while changed:
        changed = False
        for v in node_ids:
            new = set(anc[v])
            for u in anc[v]:
                new |= anc[u]
            if new != anc[v]:
                anc[v] = new
                changed = True
    return anc


def pearson_textbook(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = sum((a - mx) ** 2 for a in x)
    vy = sum((b - my) ** 2 for b in y)
    return cov / math.sqrt(vx * vy)


def ssim_windowed(x, y, win=11, sigma=1.5, k1=0.01, k2=0.03, L=255.0):
    """Per-window loop over every valid 11x11 placement of a single-channel image."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.arange(win) - (win - 1) / 2
    g1 = np.exp(-r * r / (2 * sigma * sigma))
    w = np.outer(g1, g1)
    w /= w.sum()
    c1, c2 = (k1 * L) ** 2, (k2 * L) ** 2
    vals = []
    for i in range(x.shape[0] - win + 1):
        for j in range(x.shape[1] - win + 1):
            px, py = x[i : i + win, j : j + win], y[i : i + win, j : j + win]
            mx, my = (w * px).sum(), (w * py).sum()
            vx = (w * (px - mx) ** 2).sum()
            vy = (w * (py - my) ** 2).sum()
            cxy = (w * (px - mx) * (py - my)).sum()
            vals.append(((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return float(np.mean(vals))


def random_dag(rng, n, p=0.4):
    """Random DAG over n nodes: edges only go from lower to higher index of a random permutation."""
    perm = list(rng.permutation(n))
    edges = [
        (f"n{perm[i]}", f"n{perm[j]}")
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return [f"n{i}" for i in range(n)], edges
