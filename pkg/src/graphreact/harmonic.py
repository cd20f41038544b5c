"""Hitting splits and the active-site Green matrix.

Both quantities come from harmonic problems on the graph: a function
with zero flux at a vertex and fixed boundary values is affine along
every edge, so it is determined by its vertex values alone.  The flux
functional at a vertex v is

    rho_v(F) = sum over half-edges e out of v of p_v(e) * (F(t(e)) - F(v)) / l_e,

and the two solves below differ only in where Dirichlet data is imposed
and where a unit of flux is injected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import PreconditionError
from .graph import EdgeWeights, MetricGraph, PointOnGraph, require_valid, resolve_vertex
from . import algebra


@dataclass(frozen=True, eq=False)
class HittingSplit:
    """Probability of reaching an active vertex before any exit.

    ``alpha_inf`` is that probability from the start point; ``p[j]`` is
    the probability the first active vertex hit is ``active[j]``,
    conditional on hitting one at all.  When ``alpha_inf`` is zero the
    split is all zeros by convention.
    """

    alpha_inf: float
    p: np.ndarray
    active: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class GreenMatrix:
    """Expected local times between active vertices, in length units.

    ``entries[i, j]`` is the expected occupation at ``active[j]`` before
    exit, starting from ``active[i]``.
    """

    active: tuple[str, ...]
    entries: np.ndarray


def vertex_flux(
    g: MetricGraph, w: EdgeWeights, potential: Mapping[str, float], vertex_id: str
) -> float:
    """The flux functional rho_v applied to an edge-affine potential."""
    if vertex_id not in g.out_edges:
        raise PreconditionError(f"unknown vertex {vertex_id!r}")
    total = 0.0
    fv = potential[vertex_id]
    for he in g.out_edges[vertex_id]:
        e = g.edges[he.edge]
        total += w.at(vertex_id, he.edge) * (potential[he.target] - fv) / e.length
    return total


def _flux_row(
    g: MetricGraph, w: EdgeWeights, idx: dict[str, int], a: np.ndarray, vid: str
) -> None:
    i = idx[vid]
    for he in g.out_edges[vid]:
        coeff = w.at(vid, he.edge) / g.edges[he.edge].length
        a[i, idx[he.target]] += coeff
        a[i, i] -= coeff


def hitting_split(
    g: MetricGraph, w: EdgeWeights, x: PointOnGraph | str
) -> HittingSplit:
    """First-hit distribution over active vertices, from start point x.

    Solves, for each active vertex c, the edge-affine problem with value
    1 at c, value 0 at the other active vertices and at all exits, and
    zero flux elsewhere.  The solution evaluated at x is the probability
    of first hitting the active set at c before exiting; their sum is
    ``alpha_inf``.
    """
    require_valid(g)
    start = resolve_vertex(g, x)
    active = g.active_vertices
    if not active:
        return HittingSplit(0.0, np.zeros(0), ())

    exits = set(g.exit_vertices)
    boundary = exits | set(active)
    idx = {vid: i for i, vid in enumerate(g.vertex_ids)}
    n = len(idx)
    a = np.zeros((n, n))
    b = np.zeros((n, len(active)))
    for vid in g.vertex_ids:
        if vid in boundary:
            a[idx[vid], idx[vid]] = 1.0
        else:
            _flux_row(g, w, idx, a, vid)
    for j, c in enumerate(active):
        b[idx[c], j] = 1.0

    u = algebra.solve_many(a, b)
    u_at_x = u[idx[start], :]
    alpha_inf = float(u_at_x.sum())
    if alpha_inf <= 0.0:
        return HittingSplit(0.0, np.zeros(len(active)), active)
    return HittingSplit(alpha_inf, u_at_x / alpha_inf, active)


def green_matrix(g: MetricGraph, w: EdgeWeights) -> GreenMatrix:
    """Local-time matrix over the active vertices.

    For each active vertex c, solve the edge-affine problem vanishing on
    all exits with zero flux everywhere except rho_c = -1; by optional
    stopping the solution's value at another active vertex is exactly
    the expected local time there.
    """
    require_valid(g)
    active = g.active_vertices
    if not active:
        raise PreconditionError("graph has no active vertices")

    exits = set(g.exit_vertices)
    idx = {vid: i for i, vid in enumerate(g.vertex_ids)}
    n = len(idx)
    a = np.zeros((n, n))
    b = np.zeros((n, len(active)))
    for vid in g.vertex_ids:
        if vid in exits:
            a[idx[vid], idx[vid]] = 1.0
        else:
            _flux_row(g, w, idx, a, vid)
    for j, c in enumerate(active):
        b[idx[c], j] = -1.0

    f = algebra.solve_many(a, b)
    rows = [idx[c] for c in active]
    return GreenMatrix(active, f[rows, :])


def mean_local_time(g: MetricGraph, w: EdgeWeights, c: str) -> float:
    """Expected local time at the unique active vertex, started there."""
    active = g.active_vertices
    if len(active) != 1:
        raise PreconditionError(
            f"mean_local_time needs exactly one active vertex, got {len(active)}"
        )
    if active[0] != c:
        raise PreconditionError(f"vertex {c!r} is not the active vertex {active[0]!r}")
    return float(green_matrix(g, w).entries[0, 0])
