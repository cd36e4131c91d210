"""Classical TSP instance model, cycle encoding and brute-force oracles.

A cycle word assigns each city i a choice C_i in [0, 2^m); the successor
of city i is P_i[C_i] where P_i is the sorted adjacency list.  City i
occupies the m-qubit slice [m*i, m*i + m) of the cycle register, least
significant bit first, so the register value of a word is
sum_i C_i << (m*i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from gqtsp.errors import NoHamiltonianCycleError

INF = math.inf


# ---------------------------------------------------------------------------
# graph and encoding parameters


@dataclass(frozen=True)
class TspGraph:
    """Weighted undirected graph; absent edges and self-loops cost infinity."""

    costs: np.ndarray                 # (N, N) symmetric, inf on the diagonal
    coords: np.ndarray | None = None  # optional (N, 2) city positions

    def __post_init__(self):
        a = np.asarray(self.costs, dtype=float)
        object.__setattr__(self, "costs", a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("cost matrix must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("cost matrix must be symmetric")
        if not np.all(np.isinf(np.diag(a))):
            raise ValueError("self-loops must have infinite cost")
        finite = np.isfinite(a)
        if np.any(a[finite] < 0):
            raise ValueError("edge costs must be nonnegative")
        degrees = finite.sum(axis=1)
        if np.any(degrees < 2):
            raise ValueError(f"every city needs degree >= 2, got {degrees.tolist()}")

    @property
    def n_cities(self) -> int:
        return self.costs.shape[0]

    @property
    def degrees(self) -> list[int]:
        return np.isfinite(self.costs).sum(axis=1).tolist()

    @property
    def degree(self) -> int:
        """d = max_i d_i."""
        return max(self.degrees)


@dataclass(frozen=True)
class AdjacencyLists:
    """Per-city sorted neighbor lists; entries always have finite cost."""

    lists: tuple[tuple[int, ...], ...]

    @property
    def n_cities(self) -> int:
        return len(self.lists)

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.lists)

    @property
    def choice_bits(self) -> int:
        """m = ceil(log2 d), qubits per path choice."""
        return max(1, math.ceil(math.log2(self.degree)))

    @property
    def index_bits(self) -> int:
        """n = ceil(log2 N), qubits per city index."""
        return max(1, math.ceil(math.log2(self.n_cities)))


def build_adjacency_lists(graph: TspGraph) -> AdjacencyLists:
    lists = []
    for i in range(graph.n_cities):
        row = graph.costs[i]
        lists.append(tuple(j for j in range(graph.n_cities)
                           if j != i and math.isfinite(row[j])))
    return AdjacencyLists(tuple(lists))


# ---------------------------------------------------------------------------
# cycle words


def word_to_value(word, m: int) -> int:
    value = 0
    for i, c in enumerate(word):
        value |= int(c) << (m * i)
    return value


def value_to_word(value: int, n_cities: int, m: int) -> tuple[int, ...]:
    mask = (1 << m) - 1
    return tuple((value >> (m * i)) & mask for i in range(n_cities))


def decode_successor(lists: AdjacencyLists, word, city: int) -> int | None:
    """Next city P_i[C_i], or None when the choice is out of range."""
    choice = word[city]
    row = lists.lists[city]
    if choice >= len(row):
        return None
    return row[choice]


def word_to_tour(lists: AdjacencyLists, word) -> list[int] | None:
    """City sequence starting at 0, or None if the word is not a single cycle."""
    n = lists.n_cities
    tour = [0]
    here = 0
    for _ in range(n):
        here = decode_successor(lists, word, here)
        if here is None:
            return None
        tour.append(here)
    if tour[-1] != 0 or sorted(tour[:-1]) != list(range(n)):
        return None
    return tour[:-1]


def tour_to_word(lists: AdjacencyLists, tour) -> tuple[int, ...]:
    """Inverse of word_to_tour for a valid city sequence starting at 0."""
    n = lists.n_cities
    word = [0] * n
    for pos, city in enumerate(tour):
        nxt = tour[(pos + 1) % n]
        word[city] = lists.lists[city].index(nxt)
    return tuple(word)


def cost(graph: TspGraph, lists: AdjacencyLists, word) -> float | None:
    """Sum of chosen edge costs; None when any choice is out of range."""
    total = 0.0
    for i in range(lists.n_cities):
        nxt = decode_successor(lists, word, i)
        if nxt is None:
            return None
        total += graph.costs[i, nxt]
    return total


# ---------------------------------------------------------------------------
# Hamiltonian cycle tests


def _orbit_of_zero(lists: AdjacencyLists, word) -> list[int | None]:
    """[pi^1(0), ..., pi^N(0)], with None once a choice is out of range."""
    n = lists.n_cities
    out = []
    here: int | None = 0
    for _ in range(n):
        here = None if here is None else decode_successor(lists, word, here)
        out.append(here)
    return out


def is_hamiltonian_theorem1(lists: AdjacencyLists, word) -> bool:
    """pi^j(0) != 0 for 1 <= j <= N-1, and pi^N(0) == 0."""
    orbit = _orbit_of_zero(lists, word)
    if any(v is None for v in orbit):
        return False
    return all(v != 0 for v in orbit[:-1]) and orbit[-1] == 0


def is_hamiltonian_theorem2(lists: AdjacencyLists, word) -> bool:
    """Same as theorem 1 but quantified only over proper divisors of N."""
    n = lists.n_cities
    orbit = _orbit_of_zero(lists, word)
    if any(v is None for v in orbit):
        return False
    for j in proper_divisors(n):
        if orbit[j - 1] == 0:
            return False
    return orbit[-1] == 0


def is_single_cycle(lists: AdjacencyLists, word) -> bool:
    """Independent oracle: the full successor map is one N-cycle.

    Checks every city's choice (not just the orbit of 0): all successors
    defined, the map is a bijection, and its cycle decomposition has
    exactly one cycle.
    """
    n = lists.n_cities
    succ = [decode_successor(lists, word, i) for i in range(n)]
    if any(s is None for s in succ):
        return False
    if sorted(succ) != list(range(n)):
        return False
    seen = 1
    here = succ[0]
    while here != 0:
        here = succ[here]
        seen += 1
    return seen == n


def proper_divisors(n: int) -> list[int]:
    return [j for j in range(1, n) if n % j == 0]


def sigma0(n: int) -> int:
    """Number of divisors of n, including n itself."""
    return sum(1 for j in range(1, n + 1) if n % j == 0)


# ---------------------------------------------------------------------------
# brute force


@dataclass(frozen=True)
class RankedCycle:
    word: tuple[int, ...]
    tour: tuple[int, ...]
    cost: float


def brute_force_best(graph: TspGraph):
    """Enumerate all directed Hamiltonian cycles (city 0 fixed as start).

    Returns (best_word, best_cost, ranked) with `ranked` sorted by
    nondecreasing cost; each undirected cycle appears as two directed
    entries.  An instance with no Hamiltonian cycle yields (None, None, []).
    """
    lists = build_adjacency_lists(graph)
    n = graph.n_cities
    ranked = []
    for perm in permutations(range(1, n)):
        tour = (0,) + perm
        total = 0.0
        ok = True
        for pos in range(n):
            c = graph.costs[tour[pos], tour[(pos + 1) % n]]
            if not math.isfinite(c):
                ok = False
                break
            total += c
        if ok:
            ranked.append(RankedCycle(tour_to_word(lists, tour), tour, total))
    ranked.sort(key=lambda r: (r.cost, r.tour))
    if not ranked:
        return None, None, []
    return ranked[0].word, ranked[0].cost, ranked


def ranked_undirected(ranked: list[RankedCycle]):
    """Group directed entries into undirected cycles, cheapest first.

    Returns a list of (cost, [word_forward, word_backward]) pairs.
    """
    groups: dict[tuple[int, ...], list[RankedCycle]] = {}
    order = []
    for entry in ranked:
        rev = (0,) + tuple(reversed(entry.tour[1:]))
        key = min(entry.tour, rev)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(entry)
    return [(groups[k][0].cost, [e.word for e in groups[k]]) for k in order]


def sample_valid_cycles(graph: TspGraph, count: int, rng: np.random.Generator,
                        max_attempts: int = 2000):
    """Uniform random restarts: random city orders kept when all edges exist."""
    lists = build_adjacency_lists(graph)
    n = graph.n_cities
    found = []
    for _ in range(max_attempts):
        perm = rng.permutation(n - 1) + 1
        tour = (0,) + tuple(int(v) for v in perm)
        if all(math.isfinite(graph.costs[tour[p], tour[(p + 1) % n]])
               for p in range(n)):
            found.append(tour_to_word(lists, tour))
            if len(found) == count:
                return found
    if not found:
        raise NoHamiltonianCycleError(
            f"no valid cycle found in {max_attempts} random restarts")
    return found


# ---------------------------------------------------------------------------
# phase normalization


@dataclass(frozen=True)
class NormalizedPhases:
    """Per-city phase tables for the cost oracle, in maximization units.

    Finite costs a are shifted to (M - a) with M the largest finite cost,
    then scaled by 1/denominator so every in-range word's total phase
    stays below 2*pi.  theta[j][k] = 0 for k >= #P_j (padding).  When the
    instance is bucket-exact every in-range word lands exactly on a t-bit
    fraction, so the phase-estimation readout is deterministic.
    """

    tables: tuple[np.ndarray, ...]   # per city, length 2^m, radians
    shift: float                     # M, the largest finite cost
    denominator: float               # scale applied to shifted costs
    precision: int                   # t, readout bits
    exact: bool
    lists: AdjacencyLists = field(repr=False)

    @property
    def choice_bits(self) -> int:
        return self.lists.choice_bits

    def word_phase(self, word) -> float:
        return float(sum(self.tables[j][word[j]] for j in range(len(word))))

    def quantize(self, word) -> int:
        """t-bit bucket nearest to 2^t * phase / 2pi (exact for exact instances)."""
        t = self.precision
        return int(round(self.word_phase(word) / (2.0 * math.pi) * (1 << t))) % (1 << t)

    def dequantize(self, bucket: int) -> float:
        """Approximate original cycle cost for a readout bucket."""
        n = self.lists.n_cities
        shifted_sum = bucket * self.denominator / (1 << self.precision)
        return n * self.shift - shifted_sum

    def bucket_of_cost(self, original_cost: float) -> int:
        n = self.lists.n_cities
        shifted = n * self.shift - original_cost
        return int(round(shifted / self.denominator * (1 << self.precision))) % (1 << self.precision)


def normalize_phases(graph: TspGraph, t: int, lists: AdjacencyLists | None = None) -> NormalizedPhases:
    """Build maximization-shifted, 2pi-safe phase tables with t readout bits.

    Integer-cost instances whose worst-case shifted sum fits in t bits get
    an exact power-of-two denominator, making every bucket exact.
    """
    if lists is None:
        lists = build_adjacency_lists(graph)
    n = graph.n_cities
    m = lists.choice_bits
    finite = graph.costs[np.isfinite(graph.costs)]
    if finite.size == 0:
        raise ValueError("graph has no finite edges")
    shift = float(finite.max())
    per_city_max = []
    shifted_rows = []
    for j in range(n):
        row = [shift - graph.costs[j, nxt] for nxt in lists.lists[j]]
        shifted_rows.append(row)
        per_city_max.append(max(row) if row else 0.0)
    worst = float(sum(per_city_max))

    integral = all(float(v).is_integer() for row in shifted_rows for v in row)
    if integral and worst <= (1 << t) - 1:
        denominator = float(1 << t)
        exact = True
    elif worst == 0.0:
        denominator = 1.0
        exact = True
    else:
        denominator = worst * (1 << t) / ((1 << t) - 1)
        exact = False

    tables = []
    for j in range(n):
        table = np.zeros(1 << m)
        for k, v in enumerate(shifted_rows[j]):
            table[k] = 2.0 * math.pi * v / denominator
        tables.append(table)
    return NormalizedPhases(tuple(tables), shift, denominator, t, exact, lists)


# ---------------------------------------------------------------------------
# instance generation


def random_euclidean_graph(n_cities: int, degree: int, seed: int,
                           squared: bool = False) -> TspGraph:
    """N points uniform in [0,1]^2, pruned to maximum degree `degree`.

    Pruning removes globally longest edges first, skipping any removal
    that would push a degree below 2 or disconnect the graph.  `squared`
    switches the metric to squared Euclidean distance.
    """
    if not 2 <= degree <= n_cities - 1:
        raise ValueError(f"need 2 <= d <= N-1, got d={degree}, N={n_cities}")
    rng = np.random.default_rng(seed)
    pts = rng.random((n_cities, 2))
    delta = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((delta ** 2).sum(axis=2))
    if squared:
        dist = dist ** 2
    costs = dist.copy()
    np.fill_diagonal(costs, INF)

    if degree < n_cities - 1:
        edges = sorted(((costs[i, j], i, j)
                        for i in range(n_cities) for j in range(i + 1, n_cities)),
                       reverse=True)
        for _, i, j in edges:
            deg = np.isfinite(costs).sum(axis=1)
            if deg.max() <= degree:
                break
            if deg[i] <= 2 or deg[j] <= 2:
                continue
            saved = costs[i, j]
            costs[i, j] = costs[j, i] = INF
            if not _connected(costs):
                costs[i, j] = costs[j, i] = saved
        deg = np.isfinite(costs).sum(axis=1)
        if deg.max() > degree:
            raise NoHamiltonianCycleError(
                f"pruning to degree {degree} failed for seed {seed}; regenerate")
    return TspGraph(costs, coords=pts)


def _connected(costs: np.ndarray) -> bool:
    n = costs.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            if j not in seen and math.isfinite(costs[i, j]):
                seen.add(j)
                frontier.append(j)
    return len(seen) == n


def random_integer_graph(n_cities: int, seed: int, low: int = 1,
                         high: int = 16) -> TspGraph:
    """Complete graph with integer costs; exact t-bit buckets for t >= 6.

    Used by the bucket-exact oracle tests: the maximization-shifted costs
    are integers, so every cycle phase is an exact t-bit fraction.
    """
    rng = np.random.default_rng(seed)
    costs = np.full((n_cities, n_cities), INF)
    for i in range(n_cities):
        for j in range(i + 1, n_cities):
            costs[i, j] = costs[j, i] = float(rng.integers(low, high + 1))
    return TspGraph(costs)


# ---------------------------------------------------------------------------
# graph file format


def save_graph(graph: TspGraph, path) -> None:
    """Plain-text round-trippable format: header, coords, (i, j, cost) triples."""
    lines = [f"gqtsp-graph v1", f"N {graph.n_cities}", f"d {graph.degree}"]
    if graph.coords is not None:
        for i, (x, y) in enumerate(graph.coords):
            lines.append(f"coord {i} {float(x)!r} {float(y)!r}")
    for i in range(graph.n_cities):
        for j in range(i + 1, graph.n_cities):
            c = graph.costs[i, j]
            if math.isfinite(c):
                lines.append(f"edge {i} {j} {float(c)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> TspGraph:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "gqtsp-graph v1":
        raise ValueError(f"{path}: not a gqtsp graph file")
    n = None
    coords = {}
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "N":
            n = int(parts[1])
        elif parts[0] == "d":
            pass  # informational; recomputed from the edges
        elif parts[0] == "coord":
            coords[int(parts[1])] = (float(parts[2]), float(parts[3]))
        elif parts[0] == "edge":
            edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
        else:
            raise ValueError(f"{path}: unknown line {ln!r}")
    if n is None:
        raise ValueError(f"{path}: missing N header")
    costs = np.full((n, n), INF)
    for i, j, c in edges:
        costs[i, j] = costs[j, i] = c
    pts = None
    if coords:
        pts = np.array([coords[i] for i in range(n)])
    return TspGraph(costs, coords=pts)
