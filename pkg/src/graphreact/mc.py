"""Monte Carlo survival estimates on the embedded grid chain.

The graph Brownian motion observed on a spatial grid is a simple chain:
interior grid points step to either neighbor with probability 1/2, and
a vertex moves to the first grid point of edge e with probability
proportional to p_v(e)/step_e.  One visit to a vertex accrues an
exponentially distributed amount of local time there with mean

    m_v = 1 / sum over edges of p_v(e)/step_e,

independent of the exit direction, so killing at rate kappa per unit
local time contributes an exact factor 1/(1 + kappa*m_v) per visit.
Each trajectory therefore carries the product of those factors over its
visits to active vertices, and the sample mean of the product is an
unbiased estimate of the survival probability at any grid node; no
Bernoulli killing and no step-size extrapolation are involved.

Randomness: per-trajectory SplitMix64 streams.  Trajectory i at step t
draws mix64(key_i + (t+1)*GAMMA) with key_i derived from the master
seed and i, so results are bit-identical for a given (seed, N, step)
no matter how trajectories are blocked or scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .graph import EdgeWeights, MetricGraph, PointOnGraph, require_valid
from .kac import KappaSpec

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_BLOCK = 1 << 17


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def _stream_keys(seed: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.uint64)
    base = np.uint64(seed & _MASK64)
    return _mix64(base ^ _mix64((idx + np.uint64(1)) * _GAMMA))


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters: target grid step, trajectory count, seed."""

    step: float
    trajectories: int
    seed: int
    step_cap: int = 5_000_000
    threads: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise PreconditionError(f"step must be positive, got {self.step!r}")
        if self.trajectories < 1:
            raise PreconditionError("need at least one trajectory")
        if self.step_cap < 1 or self.threads < 1:
            raise PreconditionError("step_cap and threads must be >= 1")


@dataclass(frozen=True)
class SimEstimate:
    """Mean and standard error of the survival product, plus step stats."""

    mean: float
    standard_error: float
    trajectories: int
    capped: int
    steps_mean: float
    steps_max: int

    @property
    def biased(self) -> bool:
        """True when some trajectories hit the step cap before absorbing."""
        return self.capped > 0


@dataclass(frozen=True, eq=False)
class GridChain:
    """Embedded chain of the graph diffusion on a spatial grid.

    Vertex nodes come first (in graph vertex order), then the interior
    nodes of each edge, source to target.  ``excursion_mean[i]`` is the
    mean local time per visit, used only at active vertex nodes.
    """

    graph: MetricGraph
    step: float
    substeps: tuple[int, ...]
    deltas: tuple[float, ...]
    nbr: np.ndarray
    cum: np.ndarray
    absorbing: np.ndarray
    excursion_mean: np.ndarray
    vertex_node: dict[str, int]
    edge_base: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.nbr.shape[0]

    def node_index(self, x: PointOnGraph | str, tol: float = 1e-9) -> int:
        """Grid node at a point; errors if the point is off-grid."""
        if isinstance(x, str):
            x = PointOnGraph.at_vertex(x)
        if x.is_vertex:
            try:
                return self.vertex_node[x.vertex]
            except KeyError:
                raise PreconditionError(f"unknown vertex {x.vertex!r}") from None
        if not (0 <= x.edge < len(self.graph.edges)):
            raise PreconditionError(f"edge index {x.edge} out of range")
        e = self.graph.edges[x.edge]
        d = self.deltas[x.edge]
        j = round(x.offset / d)
        if abs(x.offset - j * d) > tol * max(1.0, e.length):
            raise PreconditionError(
                f"offset {x.offset!r} is not a grid node (step {d})"
            )
        if j <= 0:
            return self.vertex_node[e.endpoints[0]]
        if j >= self.substeps[x.edge]:
            return self.vertex_node[e.endpoints[1]]
        return self.edge_base[x.edge] + (j - 1)


def build_grid(g: MetricGraph, w: EdgeWeights, step: float) -> GridChain:
    """Subdivide every edge into equal steps close to the target step.

    Edge e gets n_e = max(1, round(l_e/step)) substeps of size l_e/n_e.
    Exit vertices absorb; all other nodes get their one-step transition
    distribution.
    """
    require_valid(g)
    min_len = min(e.length for e in g.edges)
    if not (0 < step <= min_len):
        raise PreconditionError(
            f"step {step!r} must be in (0, min edge length {min_len}]"
        )

    substeps = tuple(max(1, int(math.floor(e.length / step + 0.5))) for e in g.edges)
    deltas = tuple(e.length / n for e, n in zip(g.edges, substeps))

    vertex_node = {vid: i for i, vid in enumerate(g.vertex_ids)}
    pos = len(vertex_node)
    edge_base = []
    for n in substeps:
        edge_base.append(pos)
        pos += n - 1
    size = pos

    neighbors: list[list[tuple[int, float]]] = [[] for _ in range(size)]
    exits = set(g.exit_vertices)

    def first_node_along(k: int, from_source: bool) -> int:
        u, v = g.edges[k].endpoints
        if substeps[k] == 1:
            return vertex_node[v if from_source else u]
        return edge_base[k] + (0 if from_source else substeps[k] - 2)

    for k in range(len(g.edges)):
        u, v = g.edges[k].endpoints
        chain = (
            [vertex_node[u]]
            + [edge_base[k] + i for i in range(substeps[k] - 1)]
            + [vertex_node[v]]
        )
        for i in range(1, len(chain) - 1):
            neighbors[chain[i]].append((chain[i - 1], 0.5))
            neighbors[chain[i]].append((chain[i + 1], 0.5))

    excursion_mean = np.zeros(size)
    for vid, i in vertex_node.items():
        if vid in exits:
            continue
        rates = []
        for he in g.out_edges[vid]:
            rate = w.at(vid, he.edge) / deltas[he.edge]
            from_source = he.source == g.edges[he.edge].endpoints[0]
            rates.append((first_node_along(he.edge, from_source), rate))
        total = sum(r for _, r in rates)
        excursion_mean[i] = 1.0 / total
        for node, r in rates:
            neighbors[i].append((node, r / total))
    for k, d in enumerate(deltas):
        # interior excursion mean equals the local step; only vertices
        # can be active so this is informational
        for i in range(substeps[k] - 1):
            excursion_mean[edge_base[k] + i] = d

    maxdeg = max(max((len(nb) for nb in neighbors), default=1), 1)
    nbr = np.zeros((size, maxdeg), dtype=np.int64)
    cum = np.ones((size, maxdeg))
    absorbing = np.zeros(size, dtype=bool)
    for i, nb in enumerate(neighbors):
        if not nb:
            absorbing[i] = True
            nbr[i, :] = i
            continue
        acc = 0.0
        for col, (node, prob) in enumerate(nb):
            acc += prob
            nbr[i, col] = node
            cum[i, col] = acc
        cum[i, len(nb) - 1] = 1.0  # exact top so u < 1 cannot fall off the row
        nbr[i, len(nb):] = nb[-1][0]

    return GridChain(
        graph=g,
        step=step,
        substeps=substeps,
        deltas=deltas,
        nbr=nbr,
        cum=cum,
        absorbing=absorbing,
        excursion_mean=excursion_mean,
        vertex_node=vertex_node,
        edge_base=tuple(edge_base),
    )


def _visit_factors(grid: GridChain, ks: KappaSpec) -> np.ndarray:
    g = grid.graph
    factor = np.ones(grid.size)
    active = g.active_vertices
    if not active:
        return factor
    values = ks.values(active)
    for vid, kappa in zip(active, values):
        i = grid.vertex_node[vid]
        factor[i] = 0.0 if math.isinf(kappa) else 1.0 / (1.0 + kappa * grid.excursion_mean[i])
    return factor


def _simulate_block(
    grid: GridChain,
    factor: np.ndarray,
    start: int,
    seed: int,
    lo: int,
    hi: int,
    cap: int,
    weights_out: np.ndarray,
    steps_out: np.ndarray,
) -> int:
    n = hi - lo
    keys = _stream_keys(seed, lo, hi)
    if grid.absorbing[start] or factor[start] == 0.0:
        weights_out[lo:hi] = factor[start]
        steps_out[lo:hi] = 0
        return 0

    state = np.full(n, start, dtype=np.int64)
    weight = np.full(n, factor[start])
    local = np.arange(n)
    capped = 0
    t = 0
    gamma = int(_GAMMA)
    scale = 2.0**-64
    plain_factors = bool(np.all(factor == 1.0))
    zero_factors = bool(np.any(factor == 0.0))
    while local.size:
        if t >= cap:
            weights_out[lo + local] = weight
            steps_out[lo + local] = t
            capped = local.size
            break
        counter = np.uint64(((t + 1) * gamma) & _MASK64)
        u = _mix64(keys + counter).astype(np.float64)
        u *= scale
        col = (u[:, None] >= grid.cum[state]).sum(axis=1)
        nxt = grid.nbr[state, col]
        if not plain_factors:
            weight *= factor[nxt]
        state = nxt
        t += 1
        done = grid.absorbing[nxt]
        if zero_factors:
            done = done | (weight == 0.0)
        if done.any():
            fin = local[done]
            weights_out[lo + fin] = weight[done]
            steps_out[lo + fin] = t
            keep = ~done
            local = local[keep]
            state = state[keep]
            weight = weight[keep]
            keys = keys[keep]
    return capped


def estimate_survival(
    grid: GridChain, ks: KappaSpec, x: PointOnGraph | str, cfg: SimConfig
) -> SimEstimate:
    """Run cfg.trajectories embedded-chain walks from x and average the
    per-visit survival products.

    Deterministic for a given (seed, trajectories, grid): trajectory i
    always consumes its own SplitMix64 stream, and the reduction is a
    single pairwise sum over the per-trajectory results in index order,
    so the thread count cannot change any bit of the estimate.
    Trajectories hitting the step cap contribute their running product
    and are counted in ``capped``.
    """
    start = grid.node_index(x)
    factor = _visit_factors(grid, ks)
    n = cfg.trajectories
    weights = np.empty(n)
    steps = np.zeros(n, dtype=np.int64)

    blocks = [(lo, min(lo + _BLOCK, n)) for lo in range(0, n, _BLOCK)]
    if cfg.threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            capped = sum(
                pool.map(
                    lambda span: _simulate_block(
                        grid, factor, start, cfg.seed, span[0], span[1],
                        cfg.step_cap, weights, steps,
                    ),
                    blocks,
                )
            )
    else:
        capped = sum(
            _simulate_block(
                grid, factor, start, cfg.seed, lo, hi, cfg.step_cap, weights, steps
            )
            for lo, hi in blocks
        )

    mean = float(np.mean(weights))
    if n > 1:
        se = float(np.std(weights, ddof=1) / math.sqrt(n))
    else:
        se = 0.0
    return SimEstimate(
        mean=mean,
        standard_error=se,
        trajectories=n,
        capped=capped,
        steps_mean=float(np.mean(steps)),
        steps_max=int(np.max(steps)),
    )


def simulate(
    g: MetricGraph,
    w: EdgeWeights,
    ks: KappaSpec,
    x: PointOnGraph | str,
    cfg: SimConfig,
) -> SimEstimate:
    """Convenience wrapper: build the grid at cfg.step and estimate."""
    return estimate_survival(build_grid(g, w, cfg.step), ks, x, cfg)


def estimate_csv(kappa: float, est: SimEstimate, cfg: SimConfig) -> str:
    """One CSV row per estimate: kappa, mean, se, n, delta, seed."""
    lines = ["kappa,mean,se,n,delta,seed"]
    lines.append(
        f"{kappa:.12g},{est.mean:.12g},{est.standard_error:.12g},"
        f"{est.trajectories},{cfg.step:.12g},{cfg.seed}"
    )
    return "\n".join(lines) + "\n"
