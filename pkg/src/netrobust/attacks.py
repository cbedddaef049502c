"""Node-removal attack strategies and robustness-curve computation.

A robustness curve records one value per removal step i = 0..N-1, sampled
*before* each removal, so values[0] always describes the intact network:

* connectivity: weak-LCC size divided by the N-i surviving nodes
* controllability: minimum driver-node count divided by N-i

Driver nodes are counted through a maximum matching of the bipartite graph
that pairs an out-copy of every active node with an in-copy of every active
node (one bipartite edge per directed edge).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import DiGraph, degrees, weak_lcc_size
from .rng import Rng

STRATEGIES = ("ra", "tb", "td")
MODES = ("adaptive", "static")
CURVE_KINDS = ("connectivity", "controllability")

_UNREACHED = -1


@dataclass(frozen=True)
class AttackSpec:
    """Attack strategy descriptor.

    ``ra`` removes uniformly random survivors and ignores ``mode``;
    ``td``/``tb`` remove the highest-total-degree / highest-betweenness
    survivor, recomputing scores each step in adaptive mode and ranking
    once on the intact network in static mode. Ties always go to the
    smallest node id.
    """

    strategy: str
    mode: str = "adaptive"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "strategy", self.strategy.lower())
        object.__setattr__(self, "mode", self.mode.lower())
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; expected one of {MODES}")


@dataclass
class RemovalSequence:
    """Order in which all N nodes of one graph were removed."""

    order: list[int]

    def validate(self, n: int) -> None:
        if sorted(self.order) != list(range(n)):
            raise ValidationError(f"order is not a permutation of 0..{n - 1}")


@dataclass
class RobustnessCurve:
    """Length-N sequence of per-step fractions for one attacked graph."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValidationError(f"unknown curve kind {self.kind!r}; expected one of {CURVE_KINDS}")
        self.values = np.asarray(self.values, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values)

    def validate(self) -> None:
        """Check the per-step bounds 1/(N-i) <= values[i] <= 1 and the tail."""
        n = len(self.values)
        if n == 0:
            raise ValidationError("empty curve")
        for i, v in enumerate(self.values):
            lo = 1.0 / (n - i)
            if not lo - 1e-12 <= v <= 1.0 + 1e-12:
                raise ValidationError(f"values[{i}]={v} outside [{lo}, 1]")
        if self.values[-1] != 1.0:
            raise ValidationError(f"values[N-1]={self.values[-1]} != 1")


# -- maximum matching ---------------------------------------------------------


def _bipartite_adjacency(g: DiGraph) -> tuple[list[int], list[list[int]], dict[int, int]]:
    active = g.active_nodes()
    pos = {v: i for i, v in enumerate(active)}
    adj = [[pos[w] for w in g.out_neighbors(v)] for v in active]
    return active, adj, pos


def _matching_hopcroft_karp(adj: list[list[int]], n_right: int) -> int:
    n_left = len(adj)
    inf = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left
    size = 0
    while True:
        queue: deque[int] = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        free_dist = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= free_dist:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    if free_dist == inf:
                        free_dist = dist[u] + 1
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if free_dist == inf:
            return size
        ptr = [0] * n_left
        for u0 in range(n_left):
            if match_l[u0] != -1:
                continue
            # iterative current-arc DFS; stack entries are (left, right-used-to-enter)
            stack: list[tuple[int, int]] = [(u0, -1)]
            while stack:
                u = stack[-1][0]
                advanced = False
                while ptr[u] < len(adj[u]):
                    v = adj[u][ptr[u]]
                    ptr[u] += 1
                    w = match_r[v]
                    if w == -1:
                        if dist[u] + 1 == free_dist:
                            match_l[u] = v
                            match_r[v] = u
                            for k in range(len(stack) - 1, 0, -1):
                                u_prev = stack[k - 1][0]
                                v_used = stack[k][1]
                                match_l[u_prev] = v_used
                                match_r[v_used] = u_prev
                            size += 1
                            stack.clear()
                            advanced = True
                            break
                    elif dist[w] == dist[u] + 1:
                        stack.append((w, v))
                        advanced = True
                        break
                if not advanced:
                    dist[u] = inf
                    stack.pop()


def _matching_augmenting(adj: list[list[int]], n_right: int) -> int:
    """Plain one-path-at-a-time augmenting matching; cross-check variant."""
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right

    def try_augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_r[v] == -1 or try_augment(match_r[v], seen):
                match_l[u] = v
                match_r[v] = u
                return True
        return False

    size = 0
    for u in range(n_left):
        if try_augment(u, [False] * n_right):
            size += 1
    return size


def max_matching_size(g: DiGraph, method: str = "hopcroft-karp") -> int:
    """Maximum matching of the out-copy/in-copy bipartite graph."""
    active, adj, _ = _bipartite_adjacency(g)
    if method == "hopcroft-karp":
        return _matching_hopcroft_karp(adj, len(active))
    if method == "augmenting":
        return _matching_augmenting(adj, len(active))
    raise ValidationError(f"unknown matching method {method!r}")


def min_driver_nodes(g: DiGraph) -> int:
    """Minimum number of driver nodes: max(1, N_active - |maximum matching|)."""
    if g.n_active == 0:
        raise ValidationError("graph has no active nodes")
    return max(1, g.n_active - max_matching_size(g))


# -- betweenness centrality ---------------------------------------------------


def betweenness(g: DiGraph) -> np.ndarray:
    """Unnormalized shortest-path betweenness on the directed graph.

    Entry v accumulates sigma_st(v)/sigma_st over ordered pairs (s, t) with
    s != t != v; endpoints are not counted. Removed nodes score 0.
    """
    if g.n_active == 0:
        raise ValidationError("graph has no active nodes")
    n = g.n
    scores = np.zeros(n, dtype=np.float64)
    active = g.active_nodes()
    # sorted neighbor lists keep float accumulation order reproducible
    adj: dict[int, list[int]] = {v: sorted(g.out_neighbors(v)) for v in active}
    for s in active:
        dist = [_UNREACHED] * n
        sigma = [0] * n
        preds: dict[int, list[int]] = {s: []}
        order: list[int] = []
        dist[s] = 0
        sigma[s] = 1
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v]
            for w in adj[v]:
                if dist[w] == _UNREACHED:
                    dist[w] = dv + 1
                    preds[w] = []
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                scores[w] += delta[w]
    return scores


# -- attack simulation ----------------------------------------------------


def _curve_value(g: DiGraph, kind: str) -> float:
    if kind == "connectivity":
        return weak_lcc_size(g) / g.n_active
    return min_driver_nodes(g) / g.n_active


def _walk(work: DiGraph, kind: str, pick) -> tuple[RemovalSequence, RobustnessCurve]:
    n = work.n
    values = np.empty(n, dtype=np.float64)
    victims: list[int] = []
    for i in range(n):
        values[i] = _curve_value(work, kind)
        v = pick(work, i)
        work.remove_node(v)
        victims.append(v)
    return RemovalSequence(victims), RobustnessCurve(values, kind)


def _score_fn(strategy: str):
    if strategy == "td":
        return lambda g: degrees(g).total_deg
    return betweenness


def _argmax_active(g: DiGraph, scores) -> int:
    best = -1
    best_score = -np.inf
    for v in g.active_nodes():
        s = scores[v]
        if s > best_score:
            best, best_score = v, s
    return best


def simulate_attack(
    g: DiGraph,
    spec: AttackSpec,
    kind: str,
    rng: Rng | None = None,
    recompute_every: int = 1,
) -> tuple[RemovalSequence, RobustnessCurve]:
    """Attack an intact graph to exhaustion, recording the curve on the way.

    ``rng`` feeds random victim selection; when omitted, a fresh stream is
    seeded from ``spec.seed``. ``recompute_every`` lets adaptive td/tb
    refresh scores every r-th removal instead of every removal.
    """
    if kind not in CURVE_KINDS:
        raise ValidationError(f"unknown curve kind {kind!r}; expected one of {CURVE_KINDS}")
    if not g.is_intact():
        raise ValidationError("attack requires an intact graph (no prior removals)")
    if recompute_every < 1:
        raise ValidationError("recompute_every must be >= 1")
    work = g.copy()
    if spec.strategy == "ra":
        rng = rng if rng is not None else Rng(spec.seed)
        order = rng.permutation(g.n)
        return _walk(work, kind, lambda _, i: order[i])
    score = _score_fn(spec.strategy)
    if spec.mode == "static":
        ranks = score(g)
        order = sorted(range(g.n), key=lambda v: (-ranks[v], v))
        return _walk(work, kind, lambda _, i: order[i])
    cache: dict = {"scores": None}

    def pick(current: DiGraph, i: int) -> int:
        if cache["scores"] is None or i % recompute_every == 0:
            cache["scores"] = score(current)
        return _argmax_active(current, cache["scores"])

    return _walk(work, kind, pick)


def replay_curve(g: DiGraph, order: RemovalSequence, kind: str) -> RobustnessCurve:
    """Re-evaluate the curve for a stored removal order on an intact graph."""
    if kind not in CURVE_KINDS:
        raise ValidationError(f"unknown curve kind {kind!r}; expected one of {CURVE_KINDS}")
    if not g.is_intact():
        raise ValidationError("replay requires an intact graph (no prior removals)")
    order.validate(g.n)
    seq = order.order
    _, curve = _walk(g.copy(), kind, lambda _, i: seq[i])
    return curve


def simulate_attack_mean(
    g: DiGraph,
    spec: AttackSpec,
    kind: str,
    rng: Rng | None = None,
    repeats: int = 1,
) -> RobustnessCurve:
    """Average the curve over ``repeats`` seeded realizations.

    Only random attacks have realization noise; deterministic strategies
    run once regardless of ``repeats``.
    """
    if repeats < 1:
        raise ValidationError("repeats must be >= 1")
    if spec.strategy != "ra" or repeats == 1:
        return simulate_attack(g, spec, kind, rng)[1]
    base = rng if rng is not None else Rng(spec.seed)
    total = np.zeros(g.n, dtype=np.float64)
    for r in range(repeats):
        total += simulate_attack(g, spec, kind, base.spawn(r))[1].values
    return RobustnessCurve(total / repeats, kind)


# -- CSV serialization --------------------------------------------------------


def write_curve_csv(curve: RobustnessCurve, path) -> None:
    """Curve CSV: header ``index,value``, 17 significant digits per value."""
    lines = ["index,value\n"]
    lines.extend(f"{i},{v:.17g}\n" for i, v in enumerate(curve.values))
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


def read_curve_values(path) -> np.ndarray:
    """Read back a curve CSV written by :func:`write_curve_csv`."""
    values = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "index,value":
            raise ValidationError(f"bad curve CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            idx_s, val_s = line.split(",")
            if int(idx_s) != len(values):
                raise ValidationError(f"curve CSV index gap at row {len(values)}")
            values.append(float(val_s))
    return np.asarray(values, dtype=np.float64)


def write_removal_csv(seq: RemovalSequence, path) -> None:
    """Removal-order CSV: header ``step,node``."""
    lines = ["step,node\n"]
    lines.extend(f"{i},{v}\n" for i, v in enumerate(seq.order))
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)
