"""Empirical expansion checks: spectral gap, sampled vertex expansion, and
the matching-union bipartite expander property.

The bipartite check draws D uniform perfect matchings between two N-sets
and tests, per draw, the one-sided neighborhood growth |Gamma(L')| >=
(1 + delta)|L'| for every L' up to 2N/3, with delta = 1 / (2 log2 N).
Exhaustive mode enumerates one side's subsets with a subset-DP over
bitmasks (N <= 20); the two-sided condition for mixed subsets follows
deterministically whenever the one-sided check passes on both sides, and
is otherwise probed by subset sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg

from .errors import ExhaustiveTooLarge
from .graph import SunflowerGraph
from .keyed import derive_key

DENSE_EIGEN_LIMIT = 5000
EXHAUSTIVE_SIDE_LIMIT = 20


@dataclass
class AdjacencyGapResult:
    lambda1: float
    lambda2: float
    gap: float
    normalized: float  # gap * (log2 |V|)^3


def adjacency_gap(g: SunflowerGraph) -> AdjacencyGapResult:
    """d - lambda_2 of the adjacency matrix; dense below 5000 vertices, Lanczos above."""
    a = g.adjacency_csr().astype(float)
    size = a.shape[0]
    if size <= DENSE_EIGEN_LIMIT:
        eigs = np.linalg.eigvalsh(a.toarray())
        lam1, lam2 = float(eigs[-1]), float(eigs[-2])
    else:
        top = scipy.sparse.linalg.eigsh(a, k=2, which="LA", return_eigenvectors=False, tol=1e-9)
        top = np.sort(top)
        lam1, lam2 = float(top[-1]), float(top[-2])
    gap = lam1 - lam2
    width = math.log2(size)
    return AdjacencyGapResult(lambda1=lam1, lambda2=lam2, gap=gap, normalized=gap * width**3)


def boundary_size(csr, members: np.ndarray) -> int:
    """|Gamma(T) \\ T| from the materialized adjacency."""
    size = csr.shape[0]
    mask = np.zeros(size, dtype=bool)
    mask[members] = True
    touched = np.zeros(size, dtype=bool)
    indptr, indices = csr.indptr, csr.indices
    for v in members.tolist():
        touched[indices[indptr[v] : indptr[v + 1]]] = True
    return int(np.count_nonzero(touched & ~mask))


def _grow_connected(csr, start: int, target: int, rng: np.random.Generator) -> np.ndarray:
    """BFS-grown connected subset of the requested size."""
    indptr, indices = csr.indptr, csr.indices
    chosen = [start]
    seen = {start}
    frontier = [start]
    while len(chosen) < target and frontier:
        nxt = []
        for v in frontier:
            for u in indices[indptr[v] : indptr[v + 1]].tolist():
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        rng.shuffle(nxt)
        for u in nxt:
            if len(chosen) < target:
                chosen.append(u)
        frontier = nxt
    return np.asarray(chosen, dtype=np.int64)


def vertex_expansion_sample(
    g: SunflowerGraph,
    n_samples: int,
    sizes: list[int] | None = None,
    seed: int = 0,
) -> dict[int, float]:
    """Minimum |Gamma(T) \\ T| / |T| over BFS-grown connected subsets, per size.

    Connected subsets stress the expansion claim; uniform subsets of a
    large graph expand trivially.
    """
    csr = g.adjacency_csr()
    size_v = csr.shape[0]
    if sizes is None:
        sizes = [s for s in (1, 8, 64, 512, size_v // 8) if 1 <= s <= size_v // 2]
    rng = np.random.default_rng(derive_key(seed, "vertex-expansion"))
    per_size = max(1, n_samples // max(1, len(sizes)))
    out: dict[int, float] = {}
    for target in sizes:
        worst = math.inf
        for _ in range(per_size):
            start = int(rng.integers(size_v))
            members = _grow_connected(csr, start, target, rng)
            worst = min(worst, boundary_size(csr, members) / len(members))
        out[int(target)] = worst
    return out


def tree_subset_ratio(g: SunflowerGraph, i: int) -> tuple[float, float]:
    """(sampled, closed-form) expansion ratio of one full constituent tree.

    The boundary is the two adjacent roots plus both fully covered partner
    leaf layers: 2 + 2 (d-2)(d-1)^(m-2) vertices over (d-1)^(m-1).
    """
    p = g.params
    csr = g.adjacency_csr()
    members = np.arange((i - 1) * p.tree_size, i * p.tree_size, dtype=np.int64)
    measured = boundary_size(csr, members) / len(members)
    closed = (2 + 2 * p.leaf_count) / p.tree_size
    return measured, closed


def _popcount(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    out = np.zeros_like(v)
    while True:
        if not v.any():
            break
        out += v & 1
        v >>= np.uint64(1)
    return out.astype(np.int64)


@dataclass
class BipartiteDraw:
    pass_one_sided: bool   # (1+delta)-growth for all L' (checked on both sides)
    pass_two_sided: bool
    two_sided_certified: bool


@dataclass
class BipartiteCheckResult:
    n_side: int
    d_matchings: int
    delta: float
    chi: float
    draws: list[BipartiteDraw]

    @property
    def pass_fraction_one_sided(self) -> float:
        return sum(d.pass_one_sided for d in self.draws) / len(self.draws)

    @property
    def pass_fraction_two_sided(self) -> float:
        return sum(d.pass_two_sided for d in self.draws) / len(self.draws)


_SUBSET_COUNT_CACHE: dict[int, np.ndarray] = {}


def _subset_counts(n: int) -> np.ndarray:
    if n not in _SUBSET_COUNT_CACHE:
        _SUBSET_COUNT_CACHE[n] = _popcount(np.arange(1 << n, dtype=np.uint64))
    return _SUBSET_COUNT_CACHE[n]


def _one_sided_exhaustive(masks: list[int], n: int, delta: float, chi: float) -> bool:
    """Subset-DP: does every L' with |L'| <= chi N grow by (1 + delta)?"""
    gamma = np.zeros(1 << n, dtype=np.uint32)
    for v in range(n):
        step = 1 << v
        view = gamma.reshape(-1, 2 * step)
        view[:, step:] = view[:, :step] | np.uint32(masks[v])
    counts = _subset_counts(n)
    growth = _popcount(gamma.astype(np.uint64))
    limit = math.floor(chi * n)
    sel = (counts >= 1) & (counts <= limit)
    return bool(np.all(growth[sel] >= (1.0 + delta) * counts[sel]))


def one_sided_growth_holds(matchings: np.ndarray, subset: np.ndarray, delta: float) -> bool:
    """(1 + delta)-growth for one explicit left subset (any size)."""
    neighbors = set()
    for perm in matchings:
        neighbors.update(perm[subset].tolist())
    return len(neighbors) >= (1.0 + delta) * len(subset)


def _two_sided_monte_carlo(
    matchings: np.ndarray,
    inverses: np.ndarray,
    n: int,
    delta: float,
    rng: np.random.Generator,
    samples: int,
) -> bool:
    for _ in range(samples):
        t_size = int(rng.integers(1, n + 1))
        members = rng.choice(2 * n, size=t_size, replace=False)
        left = members[members < n]
        right = members[members >= n] - n
        neighbors = set()
        for perm in matchings:
            neighbors.update((perm[left] + n).tolist())
        for inv in inverses:
            neighbors.update(inv[right].tolist())
        in_t = set(members.tolist())
        outside = sum(1 for u in neighbors if u not in in_t)
        if outside < (delta / 2.0) * t_size:
            return False
    return True


def bipartite_check(
    n_side: int,
    d_matchings: int,
    draws: int,
    mode: str = "exhaustive",
    seed: int = 0,
    mc_subsets: int = 500,
) -> BipartiteCheckResult:
    """Expansion of the union of D uniform perfect matchings on N + N vertices.

    Exhaustive mode certifies the one-sided condition on both sides for
    every draw; the two-sided condition is certified by implication when
    both one-sided checks pass, otherwise sampled. Monte-Carlo mode samples
    subsets for both conditions.
    """
    if mode not in ("exhaustive", "monte-carlo"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and n_side > EXHAUSTIVE_SIDE_LIMIT:
        raise ExhaustiveTooLarge(f"N={n_side} exceeds the exhaustive limit {EXHAUSTIVE_SIDE_LIMIT}")
    delta = 1.0 / (2.0 * math.log2(n_side))
    chi = 2.0 / 3.0
    rng = np.random.default_rng(derive_key(seed, "bipartite", n_side, d_matchings))
    results = []
    for _ in range(draws):
        matchings = np.stack([rng.permutation(n_side) for _ in range(d_matchings)])
        inverses = np.stack([np.argsort(perm) for perm in matchings])
        if mode == "exhaustive":
            masks_l = [0] * n_side
            masks_r = [0] * n_side
            for perm, inv in zip(matchings, inverses):
                for v in range(n_side):
                    masks_l[v] |= 1 << int(perm[v])
                    masks_r[v] |= 1 << int(inv[v])
            ok_l = _one_sided_exhaustive(masks_l, n_side, delta, chi)
            ok_r = _one_sided_exhaustive(masks_r, n_side, delta, chi)
            one_sided = ok_l and ok_r
            if one_sided:
                results.append(BipartiteDraw(True, True, True))
            else:
                two = _two_sided_monte_carlo(matchings, inverses, n_side, delta, rng, mc_subsets)
                results.append(BipartiteDraw(False, two, False))
        else:
            one = True
            for _ in range(mc_subsets):
                s = int(rng.integers(1, math.floor(chi * n_side) + 1))
                subset = rng.choice(n_side, size=s, replace=False)
                if not one_sided_growth_holds(matchings, subset, delta):
                    one = False
                    break
            two = _two_sided_monte_carlo(matchings, inverses, n_side, delta, rng, mc_subsets)
            results.append(BipartiteDraw(one, two, False))
    return BipartiteCheckResult(
        n_side=n_side, d_matchings=d_matchings, delta=delta, chi=chi, draws=results
    )
