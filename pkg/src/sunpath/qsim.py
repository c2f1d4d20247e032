"""End-to-end simulation of the pathfinding algorithm with query accounting.

The quantum side is simulated exactly in the symmetric subspace: the
measurement distribution of the filtered start state is computed from mn
coefficients (ideal mode uses the exact 0-eigenvector, filtered mode the
normalized filter output), and samples are drawn classically. The
classical tail of the algorithm (neighbor expansion, exit identification,
breadth-first search, path verification) runs against the real metered
oracles.

Quantum queries are never charged to the oracle meters, because no circuit
exists here; they enter the ledger through the explicit cost model
(amplification rounds x filter degree x block-encoding queries per apply).
Both totals are reported side by side.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistribution
from .filtering import FilterSpec, apply_filter, plan_filter
from .graph import SunflowerGraph
from .hamiltonian import EffectiveHamiltonian, build_h, flat_index
from .keyed import derive_key
from .spectral import SpectrumReport, factor_spectrum


def block_encoding_queries(d: int) -> int:
    """Adjacency-list queries per block-encoding application: 2d + 3.

    One location-oracle simulation costs d + 1 forward queries plus d
    uncomputation queries; each application also makes two value-oracle
    calls.
    """
    return 2 * d + 3


@dataclass(frozen=True)
class MeasurementDistribution:
    """Per-supervertex measurement mass; uniform over members within one."""

    mode: str                 # "ideal" | "filtered"
    p: np.ndarray             # (m*n,) flat order (j-1)*n + (i-1)
    d: int
    m: int
    n: int

    def root_mass(self, i: int) -> float:
        return float(self.p[flat_index(self.n, i, 1)])

    def min_odd_root_mass(self) -> float:
        return min(self.root_mass(i) for i in range(1, self.n + 1, 2))


def ideal_distribution(report: SpectrumReport) -> MeasurementDistribution:
    """Measurement law of the exact 0-eigenstate reached from the start vertex."""
    coeff = report.modes.eta_odd
    p = coeff * coeff
    return MeasurementDistribution(mode="ideal", p=p / p.sum(), d=report.d, m=report.m, n=report.n)


def filtered_distribution(
    h: EffectiveHamiltonian, spec: FilterSpec, report: SpectrumReport
) -> MeasurementDistribution:
    """Measurement law of the normalized filter output at degree 2*ell."""
    vec = apply_filter(h, spec)
    p = vec * vec
    total = p.sum()
    if total <= 0:
        raise DegenerateDistribution("filter output vanished")
    return MeasurementDistribution(mode="filtered", p=p / total, d=h.d, m=h.m, n=h.n)


def total_variation(a: MeasurementDistribution, b: MeasurementDistribution) -> float:
    return 0.5 * float(np.abs(a.p - b.p).sum())


def sample_vertex(g: SunflowerGraph, dist: MeasurementDistribution, rng: np.random.Generator) -> int:
    """Draw a supervertex by mass, then a uniform member, and return its label."""
    flat = rng.choice(dist.p.size, p=dist.p)
    j, im1 = divmod(int(flat), dist.n)
    i, j = im1 + 1, j + 1
    r = int(rng.integers(g.params.supervertex_size(j)))
    return g.label_of(i, j, r)


def choose_ns(dist: MeasurementDistribution, failure_prob: float) -> int:
    """Union-bound sample count: all odd roots appear with probability >= 1 - failure_prob."""
    if not 0.0 < failure_prob < 1.0:
        raise ValueError("failure_prob must lie in (0, 1)")
    p_min = dist.min_odd_root_mass()
    if p_min <= 0.0:
        raise DegenerateDistribution("an odd root carries no measurement mass")
    return math.ceil(math.log(dist.n / (2.0 * failure_prob)) / -math.log1p(-p_min))


@dataclass
class QueryLedger:
    """Itemized query counts: formula-derived quantum model vs metered classical."""

    c_be: int
    filter_degree: int
    amplification_rounds: int
    n_samples: int
    state_prep_queries: int
    neighbor_queries_model: int
    ft_queries_model: int
    quantum_model_total: int
    classical_neighbor_queries: int = 0
    classical_multiplicity_queries: int = 0
    classical_ft_queries: int = 0

    @property
    def classical_total(self) -> int:
        return (
            self.classical_neighbor_queries
            + self.classical_multiplicity_queries
            + self.classical_ft_queries
        )

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "c_be",
            "filter_degree",
            "amplification_rounds",
            "n_samples",
            "state_prep_queries",
            "neighbor_queries_model",
            "ft_queries_model",
            "quantum_model_total",
            "classical_neighbor_queries",
            "classical_multiplicity_queries",
            "classical_ft_queries",
        )}
        out["classical_total"] = self.classical_total
        return out


def amplification_rounds(eps_prime: float, overlap_norm: float) -> int:
    return math.ceil(math.log(2.0 / eps_prime) / overlap_norm)


def query_cost(
    d: int,
    spec: FilterSpec,
    n_samples: int,
    overlap_norm: float,
    ft_queries: int | None = None,
) -> QueryLedger:
    """Quantum-model query ledger for n_samples state preparations.

    Per sample the model charges R_AA * 2*ell * c_BE adjacency queries for
    amplified filtering, plus d adjacency queries for neighbor expansion;
    the exit-oracle component defaults to its d * n_samples allocation when
    no measured count is supplied.
    """
    c_be = block_encoding_queries(d)
    r_aa = amplification_rounds(spec.eps_prime, overlap_norm)
    state_prep = n_samples * r_aa * spec.degree * c_be
    neighbor = d * n_samples
    ft = d * n_samples if ft_queries is None else ft_queries
    return QueryLedger(
        c_be=c_be,
        filter_degree=spec.degree,
        amplification_rounds=r_aa,
        n_samples=n_samples,
        state_prep_queries=state_prep,
        neighbor_queries_model=neighbor,
        ft_queries_model=ft,
        quantum_model_total=state_prep + neighbor + ft,
    )


@dataclass
class PathResult:
    success: bool
    path: list[int]
    hops: int
    ledger: QueryLedger
    seed: int
    mode: str
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "path": list(self.path),
            "hops": self.hops,
            "ledger": self.ledger.to_dict(),
            "seed": self.seed,
            "mode": self.mode,
            "n_samples": self.n_samples,
        }


@dataclass
class AlgorithmContext:
    """Distribution and cost data shared by every trial on one instance."""

    h: EffectiveHamiltonian
    report: SpectrumReport
    spec: FilterSpec
    dist: MeasurementDistribution
    overlap_norm: float


def prepare_algorithm(
    g: SunflowerGraph,
    mode: str = "ideal",
    spec: FilterSpec | None = None,
) -> AlgorithmContext:
    p = g.params
    h = build_h(p.d, p.m, p.n)
    report = factor_spectrum(h)
    if spec is None:
        spec = plan_filter(report)
    if mode == "ideal":
        dist = ideal_distribution(report)
    elif mode == "filtered":
        dist = filtered_distribution(h, spec, report)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return AlgorithmContext(
        h=h, report=report, spec=spec, dist=dist, overlap_norm=report.overlap_norm_s()
    )


def _bfs_path(adjacency: dict[int, set[int]], start: int, goal: int) -> list[int] | None:
    """Shortest path by breadth-first search, neighbors in ascending label order."""
    if start not in adjacency:
        return None
    parents: dict[int, int | None] = {start: None}
    queue = [start]
    while queue:
        nxt: list[int] = []
        for v in queue:
            if v == goal:
                path = [v]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])
                return path[::-1]
            for u in sorted(adjacency[v]):
                if u not in parents:
                    parents[u] = v
                    nxt.append(u)
        queue = nxt
    return None


def run_algorithm1(
    g: SunflowerGraph,
    mode: str = "ideal",
    failure_prob: float = 1.0 / 3.0,
    trial_seed: int = 0,
    context: AlgorithmContext | None = None,
    n_samples: int | None = None,
) -> PathResult:
    """One full run: sample, expand, identify the exit, search, verify.

    Returns success=False (never a fabricated path) when the exit is absent
    from the sampled subgraph or unreachable from the start vertex.
    """
    ctx = context if context is not None else prepare_algorithm(g, mode=mode)
    rng = np.random.default_rng(derive_key(g.params.seed, "trial", trial_seed))
    ns = choose_ns(ctx.dist, failure_prob) if n_samples is None else n_samples
    before = g.meters.snapshot()

    samples = [sample_vertex(g, ctx.dist, rng) for _ in range(ns)]
    sampled_unique = sorted(set(samples))
    adjacency: dict[int, set[int]] = defaultdict(set)
    for v in sampled_unique:
        for u in _expand(g, v):
            adjacency[v].add(u)
            adjacency[u].add(v)

    exit_label = None
    ft_count = 0
    for v in sorted(adjacency):
        ft_count += 1
        if g.indicator_t(v):
            exit_label = v
            break

    path: list[int] | None = None
    if exit_label is not None:
        path = _bfs_path(adjacency, g.s_label, exit_label)
    verified = False
    if path is not None and len(path) >= 2:
        verified = all(g.oracle_multiplicity(a, b) >= 1 for a, b in zip(path, path[1:]))
    success = bool(path is not None and verified)

    after = g.meters.snapshot()
    used = after - before
    ledger = query_cost(g.params.d, ctx.spec, ns, ctx.overlap_norm, ft_queries=ft_count)
    ledger.classical_neighbor_queries = used.neighbor
    ledger.classical_multiplicity_queries = used.multiplicity
    ledger.classical_ft_queries = used.indicator
    return PathResult(
        success=success,
        path=path if success else [],
        hops=len(path) - 1 if success else -1,
        ledger=ledger,
        seed=trial_seed,
        mode=ctx.dist.mode,
        n_samples=ns,
    )


def _expand(g: SunflowerGraph, v: int) -> list[int]:
    """All d neighbor slots of one sampled vertex (d metered oracle calls)."""
    out = []
    for k in range(1, g.params.d + 1):
        u = g.oracle_neighbors(v, k)
        if u < g.params.label_space:
            out.append(u)
    return out


def run_trials(
    g: SunflowerGraph,
    trials: int,
    mode: str = "ideal",
    failure_prob: float = 1.0 / 3.0,
    context: AlgorithmContext | None = None,
    n_samples: int | None = None,
) -> list[PathResult]:
    ctx = context if context is not None else prepare_algorithm(g, mode=mode)
    return [
        run_algorithm1(
            g,
            mode=mode,
            failure_prob=failure_prob,
            trial_seed=t,
            context=ctx,
            n_samples=n_samples,
        )
        for t in range(trials)
    ]
