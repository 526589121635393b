"""Hot numeric kernels: BFS metrics, walk-kernel applications, tree DP.

Every kernel has a numba ``@njit`` implementation and a vectorized pure-numpy
twin; ``_backend.USING_NUMBA`` picks which one the module-level names bind to.
``implementations()`` exposes both for the backend benchmark.

Conventions: a d-regular graph is its flat adjacency array ``indices`` of
length n*d (row u = sorted neighbors of u). Directed edge e has tail e // d,
head ``head[e]`` and reversal ``rev[e]``.
"""

import math

import numpy as np

from ._backend import USING_NUMBA, njit

# --------------------------------------------------------------------------
# BFS distances
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _bfs_fill(indices, d, src, dist, queue):
    """BFS from src into preallocated dist/queue; returns #vertices reached."""
    n = dist.shape[0]
    for i in range(n):
        dist[i] = -1
    dist[src] = 0
    queue[0] = src
    qhead = 0
    qtail = 1
    while qhead < qtail:
        u = queue[qhead]
        qhead += 1
        du = dist[u]
        base = u * d
        for j in range(d):
            v = indices[base + j]
            if dist[v] < 0:
                dist[v] = du + 1
                queue[qtail] = v
                qtail += 1
    return qtail


@njit(cache=True, nogil=True)
def _bfs_numba(indices, d, src):
    n = indices.shape[0] // d
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    _bfs_fill(indices, d, src, dist, queue)
    return dist


def _bfs_numpy(indices, d, src):
    n = indices.shape[0] // d
    dist = np.full(n, -1, np.int32)
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    offsets = np.arange(d, dtype=np.int64)
    level = 0
    while frontier.size:
        nb = indices[(frontier[:, None] * d + offsets).ravel()]
        nb = np.unique(nb)
        nb = nb[dist[nb] < 0]
        level += 1
        dist[nb] = level
        frontier = nb.astype(np.int64)
    return dist


# --------------------------------------------------------------------------
# Per-source eccentricities (all-pairs BFS)
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _eccentricities_numba(indices, d):
    n = indices.shape[0] // d
    ecc = np.empty(n, np.int32)
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    for s in range(n):
        reached = _bfs_fill(indices, d, s, dist, queue)
        if reached < n:
            ecc[s] = -1
        else:
            m = 0
            for i in range(n):
                if dist[i] > m:
                    m = dist[i]
            ecc[s] = m
    return ecc


def _eccentricities_numpy(indices, d):
    n = indices.shape[0] // d
    ecc = np.empty(n, np.int32)
    for s in range(n):
        dist = _bfs_numpy(indices, d, s)
        ecc[s] = -1 if (dist < 0).any() else int(dist.max())
    return ecc


# --------------------------------------------------------------------------
# Girth via truncated per-source BFS
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _girth_numba(indices, d):
    n = indices.shape[0] // d
    best = 2 * n + 1
    dist = np.empty(n, np.int32)
    parent = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    stamp = np.zeros(n, np.int64)
    cur = 0
    for s in range(n):
        cur += 1
        stamp[s] = cur
        dist[s] = 0
        parent[s] = -1
        queue[0] = s
        qhead = 0
        qtail = 1
        while qhead < qtail:
            u = queue[qhead]
            qhead += 1
            du = dist[u]
            if 2 * du >= best:
                break
            base = u * d
            for j in range(d):
                v = indices[base + j]
                if stamp[v] != cur:
                    stamp[v] = cur
                    dist[v] = du + 1
                    parent[v] = u
                    queue[qtail] = v
                    qtail += 1
                elif v != parent[u]:
                    c = du + dist[v] + 1
                    if c < best:
                        best = c
    return best


def _girth_numpy(indices, d):
    n = indices.shape[0] // d
    best = 2 * n + 1
    offsets = np.arange(d, dtype=np.int64)
    for s in range(n):
        dist = np.full(n, -1, np.int32)
        dist[s] = 0
        frontier = np.array([s], dtype=np.int64)
        level = 0
        while frontier.size and 2 * level < best:
            nbm = indices[frontier[:, None] * d + offsets]
            dn = dist[nbm]
            if (dn == level).any():
                best = min(best, 2 * level + 1)
            if level > 0 and ((dn == level - 1).sum(axis=1) >= 2).any():
                best = min(best, 2 * level)
            new = np.unique(nbm.ravel())
            new = new[dist[new] < 0]
            dist[new] = level + 1
            frontier = new.astype(np.int64)
            level += 1
    return best


# --------------------------------------------------------------------------
# Walk kernels: one SRW step on vertices, one NBRW step on directed edges,
# and the nonbacktracking operator B applied to an edge function.
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _srw_step_numba(indices, d, vec):
    n = vec.shape[0]
    out = np.empty(n, np.float64)
    inv = 1.0 / d
    for v in range(n):
        s = 0.0
        base = v * d
        for j in range(d):
            s += vec[indices[base + j]]
        out[v] = s * inv
    return out


def _srw_step_numpy(indices, d, vec):
    return vec[indices].reshape(-1, d).sum(axis=1) / d


@njit(cache=True, nogil=True)
def _nbrw_step_numba(head, rev, d, vec):
    N = vec.shape[0]
    n = N // d
    vsum = np.zeros(n, np.float64)
    for e in range(N):
        vsum[head[e]] += vec[e]
    out = np.empty(N, np.float64)
    inv = 1.0 / (d - 1)
    for e in range(N):
        out[e] = (vsum[e // d] - vec[rev[e]]) * inv
    return out


def _nbrw_step_numpy(head, rev, d, vec):
    n = vec.shape[0] // d
    vsum = np.bincount(head, weights=vec, minlength=n)
    return (np.repeat(vsum, d) - vec[rev]) / (d - 1)


@njit(cache=True, nogil=True)
def _b_apply_numba(head, rev, d, vec):
    N = vec.shape[0]
    n = N // d
    outsum = np.empty(n, np.float64)
    for v in range(n):
        s = 0.0
        base = v * d
        for j in range(d):
            s += vec[base + j]
        outsum[v] = s
    out = np.empty(N, np.float64)
    for e in range(N):
        out[e] = outsum[head[e]] - vec[rev[e]]
    return out


def _b_apply_numpy(head, rev, d, vec):
    outsum = vec.reshape(-1, d).sum(axis=1)
    return outsum[head] - vec[rev]


# --------------------------------------------------------------------------
# Reflected biased walk on the nonnegative integers (distance from the root
# of the infinite d-regular tree): one DP step on the probability row.
# From 0 the walk moves to 1 with probability 1; from k >= 1 it moves up
# with probability (d-1)/d and down with probability 1/d.
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _tree_step_numba(old, d):
    K = old.shape[0]
    up = (d - 1.0) / d
    down = 1.0 / d
    new = np.zeros(K, np.float64)
    new[0] = down * old[1]
    if K > 2:
        new[1] = old[0] + down * old[2]
    else:
        new[1] = old[0]
    for k in range(2, K - 1):
        new[k] = up * old[k - 1] + down * old[k + 1]
    if K >= 3:
        new[K - 1] = up * old[K - 2]
    return new


def _tree_step_numpy(old, d):
    K = old.shape[0]
    up = (d - 1.0) / d
    down = 1.0 / d
    new = np.zeros(K, np.float64)
    new[0] = down * old[1]
    if K > 2:
        new[1] = old[0] + down * old[2]
        new[2:-1] = up * old[1:-2] + down * old[3:]
        new[-1] = up * old[-2]
    else:
        new[1] = old[0]
    return new


@njit(cache=True, nogil=True)
def _tree_log_step_numba(old, d):
    # log-space twin of _tree_step: the deep return tail sits hundreds of
    # e-folds below the mode, beyond float64's linear dynamic range.
    K = old.shape[0]
    lup = np.log((d - 1.0) / d)
    ldown = np.log(1.0 / d)
    new = np.full(K, -np.inf)
    new[0] = ldown + old[1]
    if K > 2:
        a = old[0]
        b = ldown + old[2]
        new[1] = _logaddexp(a, b)
        for k in range(2, K - 1):
            new[k] = _logaddexp(lup + old[k - 1], ldown + old[k + 1])
        new[K - 1] = lup + old[K - 2]
    else:
        new[1] = old[0]
    return new


@njit(cache=True, nogil=True)
def _logaddexp(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a < b:
        a, b = b, a
    return a + np.log1p(np.exp(b - a))


def _tree_log_step_numpy(old, d):
    K = old.shape[0]
    lup = math.log((d - 1.0) / d)
    ldown = math.log(1.0 / d)
    new = np.full(K, -np.inf)
    new[0] = ldown + old[1]
    if K > 2:
        new[1] = np.logaddexp(old[0], ldown + old[2])
        new[2:-1] = np.logaddexp(lup + old[1:-2], ldown + old[3:])
        new[-1] = lup + old[-2]
    else:
        new[1] = old[0]
    return new


# --------------------------------------------------------------------------
# Backend selection
# --------------------------------------------------------------------------

_NUMBA_IMPLS = {
    "bfs_distances": _bfs_numba,
    "eccentricities": _eccentricities_numba,
    "girth": _girth_numba,
    "srw_step": _srw_step_numba,
    "nbrw_step": _nbrw_step_numba,
    "b_apply": _b_apply_numba,
    "tree_step": _tree_step_numba,
    "tree_log_step": _tree_log_step_numba,
}

_NUMPY_IMPLS = {
    "bfs_distances": _bfs_numpy,
    "eccentricities": _eccentricities_numpy,
    "girth": _girth_numpy,
    "srw_step": _srw_step_numpy,
    "nbrw_step": _nbrw_step_numpy,
    "b_apply": _b_apply_numpy,
    "tree_step": _tree_step_numpy,
    "tree_log_step": _tree_log_step_numpy,
}

_ACTIVE = _NUMBA_IMPLS if USING_NUMBA else _NUMPY_IMPLS

bfs_distances = _ACTIVE["bfs_distances"]
eccentricities = _ACTIVE["eccentricities"]
girth = _ACTIVE["girth"]
srw_step = _ACTIVE["srw_step"]
nbrw_step = _ACTIVE["nbrw_step"]
b_apply = _ACTIVE["b_apply"]
tree_step = _ACTIVE["tree_step"]
tree_log_step = _ACTIVE["tree_log_step"]


def implementations():
    """Both kernel sets, keyed by backend name (for tests and benchmarks)."""
    out = {"numpy": dict(_NUMPY_IMPLS)}
    from ._backend import NUMBA_AVAILABLE

    if NUMBA_AVAILABLE:
        out["numba"] = dict(_NUMBA_IMPLS)
    return out
