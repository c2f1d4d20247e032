"""Oracle-only classical explorers and the empirical lower-bound experiments.

Explorers see nothing but the start label, the three oracle channels, the
degree, and the label-space size; they never touch graph internals. The
budget counts neighbor-oracle calls (the discovery channel); multiplicity
and exit-indicator calls are metered but free, since a single neighbor
call is what reveals a new label.

A trial ends at the budget, on discovering the exit, or on the first
cycle: an edge into an already-discovered vertex other than the edge the
explorer arrived by, counting multiplicity.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import GraphParams, SunflowerGraph, build_graph, validate_params
from .keyed import derive_key

STRATEGIES = ("random-embedding", "random-walk", "breadth-first")


@dataclass(frozen=True)
class ExplorerConfig:
    strategy: str
    budget: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass
class ExplorationOutcome:
    found_t: bool
    found_cycle: bool
    queries_used: int
    vertices_discovered: int
    guessed_hits: int = 0

    @property
    def success(self) -> bool:
        """The lower bound's win condition: a cycle or the exit vertex."""
        return self.found_t or self.found_cycle


class _OracleView:
    """The only graph surface explorers may touch; access is audited."""

    __slots__ = ("_g", "s_label", "degree", "label_space", "accessed")

    def __init__(self, g: SunflowerGraph):
        self._g = g
        self.s_label = g.s_label
        self.degree = g.params.d
        self.label_space = g.params.label_space
        self.accessed: list[str] = []

    def neighbor(self, v: int, k: int) -> int:
        self.accessed.append("neighbor")
        return self._g.oracle_neighbors(v, k)

    def multiplicity(self, v: int, v2: int) -> int:
        self.accessed.append("multiplicity")
        return self._g.oracle_multiplicity(v, v2)

    def indicator(self, v: int) -> int:
        self.accessed.append("indicator")
        return self._g.indicator_t(v)


def run_explorer(g: SunflowerGraph, cfg: ExplorerConfig, trial: int = 0) -> ExplorationOutcome:
    rng = np.random.default_rng(derive_key(cfg.seed, "explorer", cfg.strategy, trial))
    view = _OracleView(g)
    if cfg.strategy == "random-embedding":
        return _random_embedding(view, cfg.budget, rng)
    if cfg.strategy == "random-walk":
        return _random_walk(view, cfg.budget, rng)
    return _breadth_first(view, cfg.budget)


def _enumerate_neighbors(view: _OracleView, v: int, queries: int, budget: int) -> tuple[list[int], int]:
    """Distinct neighbors of v, one budgeted oracle call per slot."""
    out: list[int] = []
    for k in range(1, view.degree + 1):
        if queries >= budget:
            break
        u = view.neighbor(v, k)
        queries += 1
        if u >= view.label_space:
            break
        out.append(u)
    return out, queries


def _random_embedding(view: _OracleView, budget: int, rng: np.random.Generator) -> ExplorationOutcome:
    """Frontier exploration with per-vertex child order shuffled uniformly.

    The embedding expands discovered vertices first-in first-out; the
    children of each vertex enter the frontier in a fresh uniformly random
    order, so child-visit orders are exchangeable across trials.
    """
    frontier: deque[tuple[int, int | None]] = deque([(view.s_label, None)])
    discovered = {view.s_label}
    queries = 0
    found_t = found_cycle = False
    while frontier and queries < budget and not (found_t or found_cycle):
        v, parent = frontier.popleft()
        neighbors, queries = _enumerate_neighbors(view, v, queries, budget)
        children = []
        for u in neighbors:
            if parent is not None and u == parent:
                if view.multiplicity(v, parent) >= 2:
                    found_cycle = True
                continue
            if view.indicator(u):
                found_t = True
                discovered.add(u)
                break
            if u in discovered:
                found_cycle = True
                continue
            discovered.add(u)
            children.append(u)
        order = rng.permutation(len(children))
        frontier.extend((children[idx], v) for idx in order)
    return ExplorationOutcome(
        found_t=found_t,
        found_cycle=found_cycle,
        queries_used=queries,
        vertices_discovered=len(discovered),
    )


def _random_walk(view: _OracleView, budget: int, rng: np.random.Generator) -> ExplorationOutcome:
    v, parent = view.s_label, None
    discovered = {view.s_label}
    queries = 0
    found_t = found_cycle = False
    while queries < budget and not (found_t or found_cycle):
        neighbors, queries = _enumerate_neighbors(view, v, queries, budget)
        if not neighbors:
            break
        u = neighbors[int(rng.integers(len(neighbors)))]
        if view.indicator(u):
            found_t = True
            discovered.add(u)
            break
        if u in discovered and u != parent:
            found_cycle = True
            break
        discovered.add(u)
        parent, v = v, u
    return ExplorationOutcome(
        found_t=found_t,
        found_cycle=found_cycle,
        queries_used=queries,
        vertices_discovered=len(discovered),
    )


def _breadth_first(view: _OracleView, budget: int) -> ExplorationOutcome:
    frontier: deque[tuple[int, int | None]] = deque([(view.s_label, None)])
    discovered = {view.s_label}
    queries = 0
    found_t = found_cycle = False
    while frontier and queries < budget and not (found_t or found_cycle):
        v, parent = frontier.popleft()
        neighbors, queries = _enumerate_neighbors(view, v, queries, budget)
        for u in sorted(neighbors):
            if parent is not None and u == parent:
                if view.multiplicity(v, parent) >= 2:
                    found_cycle = True
                continue
            if view.indicator(u):
                found_t = True
                discovered.add(u)
                break
            if u in discovered:
                found_cycle = True
                continue
            discovered.add(u)
            frontier.append((u, v))
    return ExplorationOutcome(
        found_t=found_t,
        found_cycle=found_cycle,
        queries_used=queries,
        vertices_discovered=len(discovered),
    )


def probe_guessed_labels(g: SunflowerGraph, guesses: int, seed: int = 0) -> int:
    """How many uniformly guessed labels land inside the sunflower proper.

    Validates the padding argument: with n_aux on the order of N_G^2 the
    hit fraction is at most 2 N_G / (N_G + n_aux).
    """
    rng = np.random.default_rng(derive_key(seed, "guesses"))
    labels = rng.integers(0, g.params.label_space, size=guesses)
    return sum(1 for v in labels.tolist() if g.is_graph_vertex(int(v)))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def budget_for(d: int, n: int, budget_exponent: float) -> int:
    """q = floor((d-1)^(c n)), never below one query."""
    return max(1, int(math.floor((d - 1) ** (budget_exponent * n))))


@dataclass
class SweepRow:
    strategy: str
    d: int
    m: int
    n: int
    q: int
    trials: int
    successes: int
    rate: float
    wilson_low: float
    wilson_high: float


def lower_bound_params(d: int, n: int, seed: int = 0) -> GraphParams:
    """m = n + 1 and quadratic isolated-vertex padding, the lower-bound regime."""
    m = n + 1
    n_graph = n * (d - 1) ** (m - 1)
    return validate_params(d, m, n, n_aux=n_graph * n_graph, seed=seed)


def estimate_success(
    d: int,
    n_values: list[int],
    budget_exponent: float,
    trials: int,
    seed: int = 0,
    strategy: str = "random-embedding",
) -> list[SweepRow]:
    """Per-n success rates (cycle-or-exit) with Wilson 95% intervals."""
    rows = []
    for n in n_values:
        params = lower_bound_params(d, n, seed=seed)
        g = build_graph(params, backend="implicit")
        q = budget_for(d, n, budget_exponent)
        cfg = ExplorerConfig(strategy=strategy, budget=q, trials=trials, seed=seed)
        successes = sum(run_explorer(g, cfg, trial=t).success for t in range(trials))
        low, high = wilson_interval(successes, trials)
        rows.append(
            SweepRow(
                strategy=strategy,
                d=d,
                m=params.m,
                n=n,
                q=q,
                trials=trials,
                successes=successes,
                rate=successes / trials,
                wilson_low=low,
                wilson_high=high,
            )
        )
    return rows
