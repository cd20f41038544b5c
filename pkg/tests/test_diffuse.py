import math

import numpy as np
import pytest

from graphreact import (
    ActiveZoneSpec,
    KappaSpec,
    PointOnGraph,
    PreconditionError,
    collapse_csv,
    collapse_study,
    conversion,
    derive_weights,
    solve_diffuse,
)
from helpers import degree1_graph, path_graph, star_graph


def interval_closed_form(h: float, rate=1.0, delta=1.0, diffusion=1.0, length=1.0):
    """Survival at the closed end of an interval with one end zone."""
    mu = math.sqrt(rate / (h * diffusion))
    y1 = h * delta
    return 1.0 / (math.cosh(mu * y1) + mu * math.sinh(mu * y1) * (length - y1))


def test_zero_rate_gives_unit_field():
    g, _ = star_graph(3)
    w = derive_weights(g)
    sol = solve_diffuse(g, w, ActiveZoneSpec(rate=0.0, delta=1.0, diffusion=1.0, h=0.1))
    for vid in g.vertex_ids:
        assert sol.evaluate(vid) == pytest.approx(1.0, abs=1e-12)
    assert sol.evaluate(PointOnGraph.on_edge(0, 0.37)) == pytest.approx(1.0, abs=1e-12)


def test_interval_matches_closed_form():
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    for h in (0.1, 0.01, 0.001):
        zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=h)
        sol = solve_diffuse(g, w, zone)
        assert sol.evaluate(start) == pytest.approx(interval_closed_form(h), abs=1e-9)


def test_interval_limit_is_point_site_value():
    # h -> 0 of the closed form is 1/(1 + kappa L) with kappa = k delta / D
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=1e-5)
    sol = solve_diffuse(g, w, zone)
    point_alpha = conversion(g, w, start, KappaSpec.constant(zone.kappa)).alpha
    assert sol.evaluate(start) == pytest.approx(1.0 - point_alpha, abs=1e-4)


def test_collapse_error_halves_with_h():
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.02)
    rows = collapse_study(g, w, zone, [0.02, 0.01], start)
    ratio = rows[0].abs_err / rows[1].abs_err
    assert 1.6 <= ratio <= 2.4


def test_collapse_single_row():
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.05)
    rows = collapse_study(g, w, zone, [0.05], start)
    assert len(rows) == 1
    assert rows[0].psi_limit == pytest.approx(0.5, abs=1e-12)


def test_collapse_requires_decreasing_h():
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.1)
    with pytest.raises(PreconditionError):
        collapse_study(g, w, zone, [0.01, 0.1], start)
    with pytest.raises(PreconditionError):
        collapse_study(g, w, zone, [], start)


def test_star_limit_matches_point_model():
    g, start = star_graph(3, exit_len=1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=1e-3)
    sol = solve_diffuse(g, w, zone)
    # point model: alpha = n l kappa / (1 + n l kappa) = 3/4 at kappa = 1
    assert sol.evaluate(start) == pytest.approx(0.25, abs=5e-3)


def test_zone_overlap_rejected():
    g, _ = path_graph(1.0, 1.0)
    w = derive_weights(g)
    with pytest.raises(PreconditionError):
        solve_diffuse(g, w, ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.5))


def test_zone_spec_validation():
    with pytest.raises(PreconditionError):
        ActiveZoneSpec(rate=-1.0, delta=1.0, diffusion=1.0, h=0.1)
    with pytest.raises(PreconditionError):
        ActiveZoneSpec(rate=1.0, delta=0.0, diffusion=1.0, h=0.1)
    with pytest.raises(PreconditionError):
        ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.0)


def _matching_residuals(sol):
    """Recompute every continuity / flux condition from the solved pieces."""
    g, zone = sol.graph, sol.zone
    w = derive_weights(g)
    mu = zone.mu
    worst = 0.0
    for k, segs in sol.segments.items():
        u, v = g.edges[k].endpoints
        worst = max(worst, abs(segs[0].value - sol.vertex_values[u]))
        for s in range(len(segs) - 1):
            worst = max(worst, abs(segs[s].end_value(mu) - segs[s + 1].value))
            worst = max(worst, abs(segs[s].end_slope(mu) - segs[s + 1].slope))
        worst = max(worst, abs(segs[-1].end_value(mu) - sol.vertex_values[v]))
    exits = set(g.exit_vertices)
    for vid in g.vertex_ids:
        if vid in exits:
            worst = max(worst, abs(sol.vertex_values[vid] - 1.0))
            continue
        flux = 0.0
        for he in g.out_edges[vid]:
            segs = sol.segments[he.edge]
            if g.edges[he.edge].endpoints[0] == vid:
                flux += w.at(vid, he.edge) * segs[0].slope
            else:
                flux -= w.at(vid, he.edge) * segs[-1].end_slope(mu)
        worst = max(worst, abs(flux))
    return worst


def test_matching_conditions_residual():
    for builder, args in ((star_graph, (4,)), (path_graph, ())):
        g, _ = builder(*args)
        w = derive_weights(g)
        sol = solve_diffuse(g, w, ActiveZoneSpec(rate=2.0, delta=0.5, diffusion=1.5, h=0.05))
        assert _matching_residuals(sol) <= 1e-9


def test_field_within_unit_interval():
    g, _ = star_graph(4)
    w = derive_weights(g)
    sol = solve_diffuse(g, w, ActiveZoneSpec(rate=3.0, delta=0.4, diffusion=1.0, h=0.1))
    offsets = np.linspace(0.0, 1.0, 17)
    for k, e in enumerate(g.edges):
        for t in offsets[1:-1]:
            val = sol.evaluate(PointOnGraph.on_edge(k, float(t) * e.length))
            assert 0.0 < val <= 1.0 + 1e-12
    for vid in g.exit_vertices:
        assert sol.evaluate(vid) == pytest.approx(1.0, abs=1e-12)


def test_collapse_csv_shape():
    g, start = degree1_graph(1.0)
    w = derive_weights(g)
    zone = ActiveZoneSpec(rate=1.0, delta=1.0, diffusion=1.0, h=0.1)
    text = collapse_csv(collapse_study(g, w, zone, [0.1, 0.05], start))
    lines = text.strip().split("\n")
    assert lines[0] == "h,psi_h,psi_limit,abs_err"
    assert len(lines) == 3
