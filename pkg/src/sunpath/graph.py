"""Regular sunflower multigraph behind query-metered adjacency-list oracles.

An instance is determined by ``GraphParams`` alone: the tuple ``(d, m, n,
n_aux, seed)``. The graph consists of ``n`` rooted trees of height ``m``
(root with ``d - 2`` children, every other internal vertex with ``d - 1``
children), the roots joined in an ``n``-cycle, and the leaf layers of
adjacent trees joined by ``(d - 1) / 2`` seeded perfect matchings. On top
sit ``n_aux`` isolated vertices that pad the label space.

Vertices are exposed only through scrambled bit-string labels of length
``ceil(log2(N))``. All structure (tree arithmetic, matchings, labels)
derives deterministically from the seed, so both backends answer every
oracle query identically; the explicit backend additionally materializes
the adjacency for bulk linear algebra and census introspection.
"""

from __future__ import annotations

import json
import threading
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    ArtifactNotFound,
    ExplicitTooLarge,
    ImplicitBackendUnsupported,
    InvalidParams,
)
from .keyed import KeyedPermutation, derive_key

EXPLICIT_VERTEX_CAP = 10**7
GRAPH_FORMAT = "sunpath-graph/1"


class ExpansionGuaranteeWarning(UserWarning):
    """Degrees 3 and 5 are accepted, but the mild-expander guarantee needs d >= 7."""


@dataclass(frozen=True)
class GraphParams:
    """Validated instance parameters; the single source of truth for a graph."""

    d: int
    m: int
    n: int
    n_aux: int = 0
    seed: int = 0

    @property
    def tree_size(self) -> int:
        return (self.d - 1) ** (self.m - 1)

    @property
    def graph_vertices(self) -> int:
        """Number of non-isolated vertices, n * (d-1)^(m-1)."""
        return self.n * self.tree_size

    @property
    def total_vertices(self) -> int:
        return self.graph_vertices + self.n_aux

    @property
    def label_bits(self) -> int:
        return max((self.total_vertices - 1).bit_length(), 1)

    @property
    def label_space(self) -> int:
        return 1 << self.label_bits

    @property
    def leaf_count(self) -> int:
        """Leaves per tree, (d-2)(d-1)^(m-2)."""
        return (self.d - 2) * (self.d - 1) ** (self.m - 2)

    @property
    def matchings_per_pair(self) -> int:
        return (self.d - 1) // 2

    @property
    def expansion_guaranteed(self) -> bool:
        return self.d >= 7

    def supervertex_size(self, j: int) -> int:
        """|S_{i,j}|: 1 for the root layer, (d-2)(d-1)^(j-2) above it."""
        if j == 1:
            return 1
        return (self.d - 2) * (self.d - 1) ** (j - 2)

    def layer_offset(self, j: int) -> int:
        """Tree-local index of the first vertex of layer j."""
        if j == 1:
            return 0
        return (self.d - 1) ** (j - 2)

    def to_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "n": self.n, "n_aux": self.n_aux, "seed": self.seed}


def validate_params(d: int, m: int, n: int, n_aux: int = 0, seed: int = 0) -> GraphParams:
    """Check every instance constraint; list all violations on rejection."""
    violations = []
    for name, value in (("d", d), ("m", m), ("n", n), ("n_aux", n_aux), ("seed", seed)):
        if not isinstance(value, (int, np.integer)):
            violations.append(f"NonInteger:{name}")
    if violations:
        raise InvalidParams(violations)
    if d % 2 == 0:
        violations.append("EvenDegree")
    if d < 3:
        violations.append("DegreeTooSmall")
    if m % 2 == 0:
        violations.append("EvenHeight")
    if m < 3:
        violations.append("HeightTooSmall")
    if n < 4 or n % 4 != 0:
        violations.append("TreeCountNotMultipleOf4")
    if n_aux < 0:
        violations.append("NegativeAuxCount")
    if not 0 <= seed < 2**64:
        violations.append("SeedOutOfRange")
    if violations:
        raise InvalidParams(violations)
    if d < 7:
        warnings.warn(
            f"d={d}: expansion guarantee is proven only for degree >= 7",
            ExpansionGuaranteeWarning,
            stacklevel=2,
        )
    return GraphParams(int(d), int(m), int(n), int(n_aux), int(seed))


@dataclass(frozen=True)
class MeterSnapshot:
    neighbor: int
    multiplicity: int
    indicator: int

    def __sub__(self, other: "MeterSnapshot") -> "MeterSnapshot":
        return MeterSnapshot(
            self.neighbor - other.neighbor,
            self.multiplicity - other.multiplicity,
            self.indicator - other.indicator,
        )


class QueryMeters:
    """Thread-safe counters for the three oracle channels."""

    def __init__(self):
        self._lock = threading.Lock()
        self.neighbor = 0
        self.multiplicity = 0
        self.indicator = 0

    def count_neighbor(self):
        with self._lock:
            self.neighbor += 1

    def count_multiplicity(self):
        with self._lock:
            self.multiplicity += 1

    def count_indicator(self):
        with self._lock:
            self.indicator += 1

    def snapshot(self) -> MeterSnapshot:
        with self._lock:
            return MeterSnapshot(self.neighbor, self.multiplicity, self.indicator)


@dataclass
class CensusResult:
    """Supervertex sizes plus edge counts, recounted and closed-form."""

    sizes: np.ndarray    # (m*n,) flat order (j-1)*n + (i-1)
    counted: np.ndarray  # (m*n, m*n) edges recounted from raw adjacency
    closed: np.ndarray   # (m*n, m*n) closed-form table

    def max_discrepancy(self) -> int:
        return int(np.abs(self.counted - self.closed).max())


def cyclic_adjacent(i: int, k: int, n: int) -> bool:
    return (k - i) % n in (1, n - 1)


def closed_form_edge_count(params: GraphParams, i: int, j: int, k: int, l: int) -> int:
    """e_{ij,kl}: edges (counting multiplicity) between S_{i,j} and S_{k,l}."""
    if j == l == 1 and cyclic_adjacent(i, k, params.n):
        return 1
    if i == k and abs(j - l) == 1:
        return max(params.supervertex_size(j), params.supervertex_size(l))
    if j == l == params.m and cyclic_adjacent(i, k, params.n):
        return params.matchings_per_pair * params.leaf_count
    return 0


class SunflowerGraph:
    """Oracle view of one sunflower instance.

    ``backend='implicit'`` answers every query in O(poly(m)) arithmetic;
    ``backend='explicit'`` additionally materializes the structural
    adjacency (capped at 10^7 vertices) for census and spectral work.
    """

    def __init__(self, params: GraphParams, backend: str = "explicit", label_key: int | None = None):
        if backend not in ("explicit", "implicit"):
            raise ValueError(f"unknown backend {backend!r}")
        self.params = params
        self.backend = backend
        self.meters = QueryMeters()
        self._label_key = derive_key(params.seed, "labels") if label_key is None else label_key
        self._label_perm = KeyedPermutation(self._label_key, params.label_space)
        self._matchings = {
            (i, w): KeyedPermutation(derive_key(params.seed, "matching", i, w), params.leaf_count)
            for i in range(1, params.n + 1)
            for w in range(params.matchings_per_pair)
        }
        self._csr: sp.csr_matrix | None = None
        if backend == "explicit":
            if params.graph_vertices > EXPLICIT_VERTEX_CAP:
                raise ExplicitTooLarge(
                    f"{params.graph_vertices} vertices exceed the {EXPLICIT_VERTEX_CAP} cap"
                )
            self._csr = self._materialize()
        self.s_label = self.label_of(1, 1, 0)
        self.t_label = self.label_of(params.n // 2 + 1, 1, 0)

    # ------------------------------------------------------------------
    # structural coordinates
    # ------------------------------------------------------------------

    def structural_index(self, i: int, j: int, r: int) -> int:
        p = self.params
        if not (1 <= i <= p.n and 1 <= j <= p.m and 0 <= r < p.supervertex_size(j)):
            raise ValueError(f"bad supervertex coordinates ({i}, {j}, {r})")
        return (i - 1) * p.tree_size + p.layer_offset(j) + r

    def decompose_index(self, idx: int) -> tuple[int, int, int]:
        p = self.params
        i, local = divmod(idx, p.tree_size)
        if local == 0:
            return i + 1, 1, 0
        j = 2
        while j < p.m and local >= p.layer_offset(j + 1):
            j += 1
        return i + 1, j, local - p.layer_offset(j)

    def _structural_neighbors(self, idx: int) -> list[tuple[int, int]]:
        """Sorted (neighbor index, multiplicity) pairs of a graph vertex."""
        p = self.params
        d, m, n = p.d, p.m, p.n
        i, j, r = self.decompose_index(idx)
        raw: list[int] = []
        if j == 1:
            raw.append(self.structural_index(i % n + 1, 1, 0))
            raw.append(self.structural_index((i - 2) % n + 1, 1, 0))
            raw.extend(self.structural_index(i, 2, c) for c in range(d - 2))
        else:
            if j == 2:
                raw.append(self.structural_index(i, 1, 0))
            else:
                raw.append(self.structural_index(i, j - 1, r // (d - 1)))
            if j < m:
                base = r * (d - 1)
                raw.extend(self.structural_index(i, j + 1, base + c) for c in range(d - 1))
            else:
                i_next = i % n + 1
                i_prev = (i - 2) % n + 1
                for w in range(p.matchings_per_pair):
                    raw.append(self.structural_index(i_next, m, self._matchings[(i, w)].forward(r)))
                    raw.append(self.structural_index(i_prev, m, self._matchings[(i_prev, w)].inverse(r)))
        counts: dict[int, int] = {}
        for u in raw:
            counts[u] = counts.get(u, 0) + 1
        return sorted(counts.items())

    def _materialize(self) -> sp.csr_matrix:
        p = self.params
        rows, cols, vals = [], [], []
        for idx in range(p.graph_vertices):
            for u, mult in self._structural_neighbors(idx):
                rows.append(idx)
                cols.append(u)
                vals.append(mult)
        mat = sp.coo_matrix(
            (np.asarray(vals, dtype=np.int64), (np.asarray(rows), np.asarray(cols))),
            shape=(p.graph_vertices, p.graph_vertices),
        )
        return mat.tocsr()

    # ------------------------------------------------------------------
    # labels
    # ------------------------------------------------------------------

    def label_of_index(self, idx: int) -> int:
        return self._label_perm.forward(idx)

    def index_of_label(self, label: int) -> int:
        return self._label_perm.inverse(label)

    def label_of(self, i: int, j: int, r: int) -> int:
        return self.label_of_index(self.structural_index(i, j, r))

    def is_graph_vertex(self, label: int) -> bool:
        """Trusted introspection: does the label belong to the sunflower proper?"""
        if not 0 <= label < self.params.label_space:
            return False
        return self.index_of_label(label) < self.params.graph_vertices

    def root_labels(self) -> list[int]:
        return [self.label_of(i, 1, 0) for i in range(1, self.params.n + 1)]

    # ------------------------------------------------------------------
    # oracles
    # ------------------------------------------------------------------

    def oracle_neighbors(self, v: int, k: int) -> int:
        """O_{G,1}(v, k): k-th distinct neighbor in label order, else sentinel k + 2^bits."""
        self.meters.count_neighbor()
        p = self.params
        if not 1 <= k <= p.d:
            raise ValueError(f"neighbor index k={k} outside 1..{p.d}")
        sentinel = k + p.label_space
        if not 0 <= v < p.label_space:
            return sentinel
        idx = self.index_of_label(v)
        if idx >= p.graph_vertices:
            return sentinel
        labels = sorted(self.label_of_index(u) for u, _ in self._structural_neighbors(idx))
        if k <= len(labels):
            return labels[k - 1]
        return sentinel

    def oracle_multiplicity(self, v: int, v2: int) -> int:
        """O_{G,2}(v, v'): multiplicity of the edge, 0 when absent."""
        self.meters.count_multiplicity()
        p = self.params
        if not (0 <= v < p.label_space and 0 <= v2 < p.label_space):
            return 0
        idx = self.index_of_label(v)
        if idx >= p.graph_vertices:
            return 0
        idx2 = self.index_of_label(v2)
        for u, mult in self._structural_neighbors(idx):
            if u == idx2:
                return mult
        return 0

    def indicator_t(self, v: int) -> int:
        """f_t(v): 1 exactly on the exit label."""
        self.meters.count_indicator()
        return 1 if v == self.t_label else 0

    def all_neighbors(self, v: int) -> list[int]:
        """Distinct neighbors of v via d metered oracle calls."""
        out = []
        for k in range(1, self.params.d + 1):
            u = self.oracle_neighbors(v, k)
            if u >= self.params.label_space:
                break
            out.append(u)
        return out

    # ------------------------------------------------------------------
    # introspection (explicit backend)
    # ------------------------------------------------------------------

    def adjacency_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            raise ImplicitBackendUnsupported("materialized adjacency requires backend='explicit'")
        return self._csr

    def supervertex_of_index(self, idx: int) -> int:
        """Flat supervertex index (j-1)*n + (i-1) of a structural vertex."""
        i, j, _ = self.decompose_index(idx)
        return (j - 1) * self.params.n + (i - 1)

    def census(self) -> CensusResult:
        """Recount e_{ij,kl} from raw adjacency and pair with the closed form."""
        p = self.params
        csr = self.adjacency_csr()
        dim = p.m * p.n
        sizes = np.array(
            [p.supervertex_size(j) for j in range(1, p.m + 1) for _ in range(p.n)],
            dtype=np.int64,
        )
        owner = np.empty(p.graph_vertices, dtype=np.int64)
        for i in range(1, p.n + 1):
            base = (i - 1) * p.tree_size
            for j in range(1, p.m + 1):
                lo = base + p.layer_offset(j)
                owner[lo : lo + p.supervertex_size(j)] = (j - 1) * p.n + (i - 1)
        coo = csr.tocoo()
        counted = np.zeros((dim, dim), dtype=np.int64)
        np.add.at(counted, (owner[coo.row], owner[coo.col]), coo.data)
        closed = np.zeros((dim, dim), dtype=np.int64)
        for i in range(1, p.n + 1):
            for j in range(1, p.m + 1):
                for k in range(1, p.n + 1):
                    for l in range(1, p.m + 1):
                        e = closed_form_edge_count(p, i, j, k, l)
                        if e:
                            closed[(j - 1) * p.n + (i - 1), (l - 1) * p.n + (k - 1)] = e
        return CensusResult(sizes=sizes, counted=counted, closed=closed)

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def save(self, path) -> None:
        doc = {
            "format": GRAPH_FORMAT,
            "params": self.params.to_dict(),
            "backend": self.backend,
            "label_key": f"{self._label_key:016x}",
        }
        if self._csr is not None:
            coo = self._csr.tocoo()
            keep = coo.row < coo.col
            edges = sorted(
                zip(coo.row[keep].tolist(), coo.col[keep].tolist(), coo.data[keep].tolist())
            )
            doc["adjacency"] = [[int(u), int(v), int(w)] for u, v, w in edges]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SunflowerGraph":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise ArtifactNotFound(str(path)) from exc
        if doc.get("format") != GRAPH_FORMAT:
            raise ValueError(f"unsupported graph artifact format {doc.get('format')!r}")
        p = doc["params"]
        params = validate_params(p["d"], p["m"], p["n"], p["n_aux"], p["seed"])
        graph = cls(params, backend=doc["backend"], label_key=int(doc["label_key"], 16))
        if "adjacency" in doc and graph._csr is not None:
            stored = sum(w for _, _, w in doc["adjacency"])
            live = int(graph._csr.sum()) // 2
            if stored != live:
                raise ValueError("stored adjacency disagrees with rebuilt graph")
        return graph


def build_graph(params: GraphParams, backend: str = "explicit", label_key: int | None = None) -> SunflowerGraph:
    """Construct a sunflower instance behind its oracles."""
    return SunflowerGraph(params, backend=backend, label_key=label_key)
