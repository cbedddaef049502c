"""Seeded generators for the four directed topologies.

All generators hit the target edge count M = round(k_avg * n) exactly and
never emit self-loops or duplicate edges. The average-degree convention is
M / N (average in-degree = average out-degree = k_avg); this is exposed as
``DEGREE_CONVENTION`` for documentation purposes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, ValidationError
from .graph import DiGraph
from .rng import Rng

TOPOLOGIES = ("er", "qs", "sw", "sf")

DEGREE_CONVENTION = "k_avg = M / N"

# Static-model weight exponent; the implied degree exponent is 1 + 1/alpha.
DEFAULT_SF_ALPHA = 0.5

# Consecutive-rejection budget before weighted sampling gives up.
REJECTION_GUARD_FACTOR = 50

# Above this fill fraction, enumerate eligible pairs instead of rejecting.
_DENSE_FALLBACK = 0.6


@dataclass(frozen=True)
class NetConfig:
    """One network configuration: topology, size, average degree, seed."""

    topology: str
    n: int
    k_avg: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "topology", self.topology.lower())
        if self.topology not in TOPOLOGIES:
            raise ValidationError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.n < 4:
            raise ValidationError(f"node count must be >= 4, got {self.n}")
        if self.k_avg <= 0:
            raise ValidationError(f"average degree must be positive, got {self.k_avg}")
        m = self.m
        if not self.n - 1 <= m <= self.n * (self.n - 1):
            raise ValidationError(
                f"edge count M={m} out of bounds [{self.n - 1}, {self.n * (self.n - 1)}]"
            )

    @property
    def m(self) -> int:
        """Target edge count M = round(k_avg * n)."""
        return int(round(self.k_avg * self.n))


def _fill_distinct_pairs(g: DiGraph, need: int, rng: Rng) -> None:
    """Add ``need`` uniform random ordered pairs not already in ``g``."""
    n = g.n
    total_eligible = n * (n - 1) - g.n_edges
    if need > total_eligible:
        raise ValidationError(f"cannot place {need} more edges; only {total_eligible} slots left")
    if need > _DENSE_FALLBACK * total_eligible:
        pool = [(u, v) for u in range(n) for v in range(n) if u != v and not g.has_edge(u, v)]
        for idx in rng.np.permutation(len(pool))[:need]:
            g.add_edge(*pool[int(idx)])
        return
    placed = 0
    while placed < need:
        batch = max(32, int(1.5 * (need - placed)))
        src = rng.np.integers(0, n, size=batch)
        dst = rng.np.integers(0, n, size=batch)
        for u, v in zip(src, dst):
            u, v = int(u), int(v)
            if u != v and not g.has_edge(u, v):
                g.add_edge(u, v)
                placed += 1
                if placed == need:
                    break


def gen_er(cfg: NetConfig, rng: Rng | None = None) -> DiGraph:
    """Erdos-Renyi style: exactly M distinct uniform ordered pairs."""
    if cfg.topology != "er":
        raise ValidationError(f"config topology is {cfg.topology!r}, expected 'er'")
    rng = rng or Rng(cfg.seed)
    g = DiGraph(cfg.n)
    _fill_distinct_pairs(g, cfg.m, rng)
    return g


def gen_qsnapback(cfg: NetConfig, rng: Rng | None = None) -> DiGraph:
    """Snapback topology: forward chain backbone plus backward edges.

    The backbone i -> i+1 covers i = 0..n-2. The remaining M - (n-1) edges
    point from a higher id j to a strictly lower id i, sampled uniformly
    without duplicates over all such (j, i) pairs.
    """
    if cfg.topology != "qs":
        raise ValidationError(f"config topology is {cfg.topology!r}, expected 'qs'")
    rng = rng or Rng(cfg.seed)
    n, m = cfg.n, cfg.m
    if m < n - 1:
        raise ValidationError(f"M={m} cannot cover the length-{n - 1} backbone")
    n_back = m - (n - 1)
    eligible = n * (n - 1) // 2
    if n_back > eligible:
        raise ValidationError(f"{n_back} snapback edges requested but only {eligible} pairs exist")
    g = DiGraph(n)
    for i in range(n - 1):
        g.add_edge(i, i + 1)
    if n_back > _DENSE_FALLBACK * eligible:
        pool = [(j, i) for j in range(1, n) for i in range(j)]
        for idx in rng.np.permutation(len(pool))[:n_back]:
            g.add_edge(*pool[int(idx)])
        return g
    placed = 0
    while placed < n_back:
        batch = max(32, int(3 * (n_back - placed)))
        a = rng.np.integers(0, n, size=batch)
        b = rng.np.integers(0, n, size=batch)
        for j, i in zip(a, b):
            j, i = int(j), int(i)
            # keeping only j > i makes the draw uniform over eligible pairs
            if j > i and not g.has_edge(j, i):
                g.add_edge(j, i)
                placed += 1
                if placed == n_back:
                    break
    return g


def gen_smallworld(cfg: NetConfig, rng: Rng | None = None) -> DiGraph:
    """Small-world topology: directed ring lattice plus added shortcuts.

    The lattice has out-edges i -> (i+d) mod n for d = 1..K with
    K = max(1, floor(k_avg / 2)). Shortcuts are added (never rewired) until
    the total hits M.
    """
    if cfg.topology != "sw":
        raise ValidationError(f"config topology is {cfg.topology!r}, expected 'sw'")
    rng = rng or Rng(cfg.seed)
    n, m = cfg.n, cfg.m
    k_lattice = max(1, int(cfg.k_avg // 2))
    if m < n * k_lattice:
        raise ValidationError(f"M={m} is below the lattice size n*K={n * k_lattice}")
    g = DiGraph(n)
    for i in range(n):
        for d in range(1, k_lattice + 1):
            g.add_edge(i, (i + d) % n)
    _fill_distinct_pairs(g, m - g.n_edges, rng)
    return g


def gen_scalefree(cfg: NetConfig, rng: Rng | None = None, alpha: float = DEFAULT_SF_ALPHA) -> DiGraph:
    """Static-model scale-free topology.

    Node i carries weight (i+1)**(-alpha); source and destination are drawn
    independently with probability proportional to the weights, rejecting
    self-loops and duplicates, until M edges are placed. Aborts after
    50*M consecutive rejections.
    """
    if cfg.topology != "sf":
        raise ValidationError(f"config topology is {cfg.topology!r}, expected 'sf'")
    if alpha < 0:
        raise ValidationError(f"weight exponent must be >= 0, got {alpha}")
    rng = rng or Rng(cfg.seed)
    n, m = cfg.n, cfg.m
    weights = np.arange(1, n + 1, dtype=np.float64) ** (-alpha)
    cum = np.cumsum(weights)
    cum /= cum[-1]
    g = DiGraph(n)
    guard = REJECTION_GUARD_FACTOR * m
    consecutive_rejects = 0
    placed = 0
    while placed < m:
        batch = max(64, int(1.5 * (m - placed)))
        src = np.searchsorted(cum, rng.np.random(size=batch), side="right")
        dst = np.searchsorted(cum, rng.np.random(size=batch), side="right")
        for u, v in zip(src, dst):
            u, v = int(u), int(v)
            if u != v and not g.has_edge(u, v):
                g.add_edge(u, v)
                placed += 1
                consecutive_rejects = 0
                if placed == m:
                    break
            else:
                consecutive_rejects += 1
                if consecutive_rejects > guard:
                    raise GenerationError(
                        f"scale-free sampling stalled after {consecutive_rejects} consecutive rejections"
                    )
    return g


_GENERATORS = {
    "er": gen_er,
    "qs": gen_qsnapback,
    "sw": gen_smallworld,
    "sf": gen_scalefree,
}


def generate(cfg: NetConfig, rng: Rng | None = None) -> DiGraph:
    """Dispatch to the generator named by ``cfg.topology``."""
    return _GENERATORS[cfg.topology](cfg, rng)


def parse_net_config(text: str, **overrides) -> NetConfig:
    """Parse a key-value text block into a NetConfig.

    Lines look like ``topology er`` or ``k_avg = 4``; '#' starts a comment.
    Keyword overrides win over file values.
    """
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":", None):
            parts = line.split(sep, 1) if sep else line.split(None, 1)
            if len(parts) == 2:
                values[parts[0].strip().lower()] = parts[1].strip()
                break
        else:
            raise ValidationError(f"cannot parse config line: {raw!r}")
    merged: dict = {**values, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        return NetConfig(
            topology=str(merged["topology"]),
            n=int(merged["n"]),
            k_avg=float(merged["k_avg"]),
            seed=int(merged["seed"]),
        )
    except KeyError as exc:
        raise ValidationError(f"config is missing key {exc.args[0]!r}") from exc
