"""Brute-force oracle for Neumann-Dirichlet dimensions on the Sierpinski gasket.

Builds level-n gasket graphs from planar coordinates (independent of the
word/union-find construction in the library), solves the Dirichlet problem
densely and counts eigenvectors whose zero extension also satisfies the
eigen-equation on the corner rows (SVD of the boundary residual).
"""
import itertools
import sys

import numpy as np

CORNERS = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.5, np.sqrt(3) / 2])]


def gasket(n):
    key = lambda p: (round(p[0] * 2**n * 2), round(p[1] * 2**n * 2 / np.sqrt(3)))
    index, cells = {}, []
    for word in itertools.product(range(3), repeat=n):
        ids = []
        for c in CORNERS:
            p = c.copy()
            for j in reversed(word):
                p = (p + CORNERS[j]) / 2
            k = key(p)
            index.setdefault(k, len(index))
            ids.append(index[k])
        cells.append(ids)
    m = len(index)
    A = np.zeros((m, m))
    b = np.zeros(m)
    for ids in cells:
        for u, v in itertools.combinations(ids, 2):
            A[u, u] += 1; A[v, v] += 1; A[u, v] -= 1; A[v, u] -= 1
        for u in ids:
            b[u] += 1.0 / 3.0
    boundary = [index[key(c)] for c in CORNERS]
    return A, b, boundary


def nd_dimension(n, tol=1e-8):
    A, b, bd = gasket(n)
    interior = [i for i in range(len(b)) if i not in bd]
    Ai = A[np.ix_(interior, interior)]
    s = 1 / np.sqrt(b[interior])
    theta, W = np.linalg.eigh(s[:, None] * Ai * s[None, :])
    V = s[:, None] * W
    K = 9.0
    clusters, start = [], 0
    for i in range(1, len(theta) + 1):
        if i == len(theta) or theta[i] - theta[i - 1] > 1e-9 * K:
            clusters.append((start, i)); start = i
    total, atoms = 0, []
    for lo, hi in clusters:
        t = theta[lo:hi].mean()
        full = np.zeros((len(b), hi - lo))
        full[interior, :] = V[:, lo:hi]
        R = (A @ full - t * b[:, None] * full)[bd, :]
        sv = np.linalg.svd(R, compute_uv=False)
        scale = max(sv.max() if sv.size else 0.0, t * b.max())
        nd = (hi - lo) - int(np.sum(sv >= tol * scale))
        if nd > 0:
            atoms.append((-t, nd))
        total += nd
    return len(b), total, atoms


if __name__ == "__main__":
    for n in range(1, int(sys.argv[1]) + 1 if len(sys.argv) > 1 else 5):
        v, e, atoms = nd_dimension(n)
        print(f"n={n} |V|={v} e_n={e} d_n={(v - e) / 3**n!r}")
        for lam, m in atoms:
            print(f"   {lam:.12f} x{m}")
