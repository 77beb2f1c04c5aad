"""Product boxes, gluing, the extension loop, and its certificates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from holonomy_lab.conformal import (ConformalStructure, curve_rho_length,
                                    make_segment, map_curve, sub_curve)
from holonomy_lab.errors import (BoundaryMismatch, ConfigInvalid,
                                 HorizonExceeded, TooLarge)
from holonomy_lab.holonomy import (HolonomyConfig, SURectangle, _scale_index,
                                   calibrate_delta, extend_holonomy,
                                   glue_rectangles, local_rectangle,
                                   pseudo_isometry_audit, pseudo_isometry_bound,
                                   transitivity_witness, verify_rectangle)
from holonomy_lab.shift import STABLE, UNSTABLE, parse_point
from holonomy_lab.torus import TorusLeafPoint, validate_real_anosov

from conftest import CAT, origin


def unit_curves(cs, u_size, s_size):
    spl = cs.splitting
    o = origin(spl)
    gu = make_segment(spl, UNSTABLE, o, u_size * spl.basis[:, spl.num_stable])
    gs = make_segment(spl, STABLE, o, s_size * spl.basis[:, 0])
    return gu, gs


# ---------------------------------------------------------------------------
# local rectangles
# ---------------------------------------------------------------------------

def test_local_rectangle_rows_stay_in_band(cat_cs):
    gu, gs = unit_curves(cat_cs, 0.05, 0.05)
    rect = local_rectangle(cat_cs, gu, gs, (16, 16), 0.05, 0.1)
    assert rect.lifts.shape == (17, 17, 2)
    assert rect.provenance == ("local",)
    lengths = rect.row_lengths()
    assert np.all(lengths >= 0.045) and np.all(lengths <= 0.055)


def test_local_rectangle_degenerate_sides(cat_cs):
    spl = cat_cs.splitting
    o = origin(spl)
    zero_u = make_segment(spl, UNSTABLE, o, np.zeros(2))
    _, gs = unit_curves(cat_cs, 0.05, 0.05)
    rect = local_rectangle(cat_cs, zero_u, gs, (8, 8), 0.05, 0.1)
    assert np.all(rect.row_lengths() == 0.0)
    # every row collapses onto the stable curve
    assert float(np.max(np.abs(rect.lifts - rect.lifts[:1]))) <= 1e-12

    gu, _ = unit_curves(cat_cs, 0.05, 0.05)
    zero_s = make_segment(spl, STABLE, o, np.zeros(2))
    rect = local_rectangle(cat_cs, gu, zero_s, (8, 8), 0.05, 0.1)
    assert float(np.max(np.abs(rect.lifts - rect.lifts[:, :1]))) <= 1e-12


def test_local_rectangle_preconditions(cat_cs):
    spl = cat_cs.splitting
    gu, gs = unit_curves(cat_cs, 0.05, 0.05)
    far = make_segment(spl, STABLE, TorusLeafPoint.from_lift(spl, np.array([0.3, 0.3])),
                       0.05 * spl.basis[:, 0])
    with pytest.raises(TooLarge):
        local_rectangle(cat_cs, gu, far, (8, 8), 0.05, 0.1)
    long_u, _ = unit_curves(cat_cs, 0.2, 0.05)
    with pytest.raises(TooLarge):
        local_rectangle(cat_cs, long_u, gs, (8, 8), 0.05, 0.1)
    _, wide_s = unit_curves(cat_cs, 0.05, 0.2)
    with pytest.raises(TooLarge):
        local_rectangle(cat_cs, gu, wide_s, (8, 8), 0.05, 0.1)
    with pytest.raises(ValueError):
        local_rectangle(cat_cs, gu, gs, (0, 8), 0.05, 0.1)
    with pytest.raises(TooLarge):
        local_rectangle(ConformalStructure.for_shift(
            __import__("holonomy_lab.shift", fromlist=["ShiftSpace"]).ShiftSpace.full(2, 2)),
            gu, gs, (8, 8), 0.05, 0.1)


# ---------------------------------------------------------------------------
# gluing
# ---------------------------------------------------------------------------

def two_stage_pieces(cs):
    gu, _ = unit_curves(cs, 0.05, 0.05)
    spl = cs.splitting
    gs = make_segment(spl, STABLE, origin(spl), 0.08 * spl.basis[:, 0])
    r1 = local_rectangle(cs, gu, sub_curve(gs, 0.0, 0.5), (16, 16), 0.05, 0.1)
    r2 = local_rectangle(cs, r1.unstable_row(len(r1.stable_params) - 1),
                         sub_curve(gs, 0.5, 1.0), (16, 16), 0.05, 0.1)
    return r1, r2


def test_glue_stacks_and_verifies(cat_cs):
    r1, r2 = two_stage_pieces(cat_cs)
    g = glue_rectangles(r1, r2)
    assert g.provenance == ("local", "local")
    assert len(g.stable_params) == len(r1.stable_params) + len(r2.stable_params) - 1
    assert abs(g.stable_params[len(r1.stable_params) - 1] - 0.5) <= 1e-12
    assert verify_rectangle(g, 0.1).passed


def test_glue_rejects_seam_mismatch(cat_cs):
    r1, r2 = two_stage_pieces(cat_cs)
    lifts = r2.lifts.copy()
    lifts[:, 0, :] += 1e-3
    bad = SURectangle(cat_cs, r2.unstable_params, r2.stable_params, lifts,
                      r2.provenance)
    with pytest.raises(BoundaryMismatch):
        glue_rectangles(r1, bad)
    coarse = local_rectangle(cat_cs, *unit_curves(cat_cs, 0.05, 0.05), (8, 8),
                             0.05, 0.1)
    with pytest.raises(BoundaryMismatch):
        glue_rectangles(r1, coarse)


def test_glue_passes_through_degenerate_strips(cat_cs):
    r1, _ = two_stage_pieces(cat_cs)
    last = r1.lifts[:, -1:, :]
    strip = SURectangle(cat_cs, r1.unstable_params, np.array([0.0, 1.0]),
                        np.concatenate([last, last], axis=1), ("strip",))
    g = glue_rectangles(r1, strip)
    assert np.array_equal(g.lifts, r1.lifts)
    assert g.provenance == ("local", "strip")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def test_verify_flags_a_perturbed_interior_node(cat_cs):
    rect = local_rectangle(cat_cs, *unit_curves(cat_cs, 0.05, 0.05), (8, 8),
                           0.05, 0.1)
    assert verify_rectangle(rect, 0.1).passed
    lifts = rect.lifts.copy()
    lifts[2, 3, 0] += 1e-4
    bad = SURectangle(cat_cs, rect.unstable_params, rect.stable_params, lifts)
    report = verify_rectangle(bad, 0.1)
    assert not report.passed
    assert report.worst_node == (2, 3)
    assert 0.5e-4 <= report.max_residual <= 2e-4


def test_verify_accepts_a_point_rectangle(cat_cs):
    lifts = np.zeros((2, 2, 2))
    rect = SURectangle(cat_cs, np.array([0.0, 1.0]), np.array([0.0, 1.0]), lifts)
    report = verify_rectangle(rect, 0.1)
    assert report.passed and report.base_length == 0.0
    assert report.row_ratio_min == report.row_ratio_max == 1.0


# ---------------------------------------------------------------------------
# the extension loop
# ---------------------------------------------------------------------------

def test_extension_covers_the_whole_stable_curve(cat_cs):
    gu, gs = unit_curves(cat_cs, 0.05, 0.35)
    rect, rep = extend_holonomy(cat_cs, gu, gs, 0.1, HolonomyConfig(delta=0.05))
    assert rep.passed and rep.stages == 17
    assert rep.backward_steps == 0
    assert len(rep.alphas) == 17 and rep.alphas[-1] == 1.0
    assert all(b > a for a, b in zip(rep.alphas, rep.alphas[1:]))
    assert rep.max_residual <= 1e-9
    assert abs(rep.row_ratio_min - 1.0) <= 1e-9
    assert abs(rep.row_ratio_max - 1.0) <= 1e-9
    assert abs(rep.base_length - 0.05) <= 1e-9
    assert verify_rectangle(rect, 0.1).passed
    d = rep.to_dict()
    assert d["pass"] and d["stages"] == 17 and len(d["alphas"]) == 17


def test_extension_single_stage_when_delta_suffices(cat_cs):
    gu, gs = unit_curves(cat_cs, 0.05, 0.04)
    _, rep = extend_holonomy(cat_cs, gu, gs, 0.1, HolonomyConfig(delta=0.05))
    assert rep.passed and rep.stages == 1 and rep.alphas == (1.0,)


def test_extension_shrinks_long_unstable_curves(cat_cs):
    gu, gs = unit_curves(cat_cs, 0.10, 0.08)
    rect, rep = extend_holonomy(cat_cs, gu, gs, 0.1, HolonomyConfig(delta=0.05))
    assert rep.passed and rep.backward_steps == 1
    assert abs(rep.base_length - 0.10) <= 1e-9
    assert verify_rectangle(rect, 0.1).passed


def test_extension_config_guards(cat_cs, full2_cs):
    gu, gs = unit_curves(cat_cs, 0.05, 0.1)
    with pytest.raises(ConfigInvalid):
        extend_holonomy(cat_cs, gu, gs, 1.7, HolonomyConfig(delta=0.05))
    for bad_delta in (0.2, 0.0):
        with pytest.raises(ConfigInvalid):
            extend_holonomy(cat_cs, gu, gs, 0.1, HolonomyConfig(delta=bad_delta))
    with pytest.raises(TooLarge):
        extend_holonomy(full2_cs, gu, gs, 0.1, HolonomyConfig(delta=0.05))


def test_extension_commutes_with_the_inverse_map(cat_cs):
    delta = 0.02
    lam = float(cat_cs.lam)
    gu, gs = unit_curves(cat_cs, delta, 0.06)
    rect, rep = extend_holonomy(cat_cs, gu, gs, 0.1, HolonomyConfig(delta=delta))
    rect2, rep2 = extend_holonomy(cat_cs, map_curve(gu, -1), map_curve(gs, -1),
                                  0.1, HolonomyConfig(delta=lam * delta))
    assert rep.stages == rep2.stages and rep.passed and rep2.passed
    assert np.allclose(rep.alphas, rep2.alphas, atol=1e-9)
    fwd = rect2.lifts @ np.asarray(CAT, dtype=float).T
    gap = fwd - rect.lifts
    assert float(np.max(np.abs(gap - np.round(gap)))) <= 1e-9


def test_extension_on_the_three_d_system(three_d_cs):
    spl = three_d_cs.splitting
    o = origin(spl)
    exps = spl.exponents()
    i = spl.num_stable + int(np.argmin(np.abs(exps[spl.num_stable:] - 1.0)))
    t = 0.02 ** (1.0 / exps[i])
    gu = make_segment(spl, UNSTABLE, o, t * spl.basis[:, i])
    gs = make_segment(spl, STABLE, o, 0.1 * spl.basis[:, 0])
    assert abs(curve_rho_length(three_d_cs.gauge, gu) - 0.02) <= 1e-12
    rect, rep = extend_holonomy(three_d_cs, gu, gs, 0.1, HolonomyConfig(delta=0.02))
    assert rep.passed and rep.stages >= 2 and rep.alphas[-1] == 1.0
    assert rep.row_ratio_max <= 1.1 and rep.row_ratio_min >= 0.9
    assert verify_rectangle(rect, 0.1).passed


# ---------------------------------------------------------------------------
# scale calibration and the distortion bound
# ---------------------------------------------------------------------------

def test_pseudo_isometry_bound_values():
    assert pseudo_isometry_bound(2.0, 6) == pytest.approx(1.0 / 15.0, rel=1e-15)
    assert pseudo_isometry_bound(2.0, 2) == math.inf
    assert pseudo_isometry_bound(2.618033988749895, 1) == pytest.approx(-2.0)


def test_scale_index_brackets_the_value():
    assert _scale_index(Fraction(2), Fraction(1, 2), Fraction(1, 2)) == 0
    assert _scale_index(Fraction(2), Fraction(1, 2), Fraction(1, 8)) == 2
    lam, xi = 2.618033988749895, 0.1
    for m in range(6):
        v = xi * lam ** (-m) * 0.999
        assert _scale_index(lam, xi, v) == m


def test_calibrate_delta_matches_the_bound(cat_cs):
    delta = calibrate_delta(cat_cs, 0.1, sample_pairs=500)
    assert delta == pytest.approx(0.0008130618755783349, rel=1e-12)
    m = 1 + math.ceil(math.log(2.0 / 0.1 + 2.0) / math.log(float(cat_cs.lam)))
    assert pseudo_isometry_bound(float(cat_cs.lam), m) <= 0.1
    with pytest.raises(ConfigInvalid):
        calibrate_delta(cat_cs, 0.0)


def test_pseudo_isometry_audit_all_models(cat_cs, three_d_cs, full2_cs):
    for cs in (cat_cs, three_d_cs):
        center = origin(cs.splitting)
        r = pseudo_isometry_audit(cs, center, 200, 0)
        assert r.passed and r.worst_value <= 1e-9
        assert r.threshold is None or r.threshold > 0
    zeros = parse_point(full2_cs.space, "0|@0|0")
    r = pseudo_isometry_audit(full2_cs, zeros, 200, 0)
    assert r.passed and r.worst_value == 0.0
    r = pseudo_isometry_audit(cat_cs, origin(cat_cs.splitting), 0, 0)
    assert r.samples == 0 and r.passed and r.worst_witness == {"undefined": True}


# ---------------------------------------------------------------------------
# transitivity witnesses
# ---------------------------------------------------------------------------

def test_transitivity_witness_frozen_example(cat_cs):
    spl = cat_cs.splitting
    x = origin(spl)
    y = TorusLeafPoint.from_lift(spl, np.array([0.5, 0.5]))
    z, table = transitivity_witness(cat_cs, x, y, n_max=30)
    pos = z.torus_position()
    assert abs(pos[0] - 0.9145898033750315) <= 1e-9
    assert abs(pos[1] - 0.13819660112501056) <= 1e-9
    assert table["offset"] == [0, 0]
    assert table["certified"] and len(table["rows"]) == 31
    rows = table["rows"]
    lam2 = float(cat_cs.lam) ** (-2)
    assert rows[2]["forward"] / rows[0]["forward"] == pytest.approx(
        0.14589803375031546, rel=1e-9)
    assert lam2 == pytest.approx(0.14589803375031546, rel=1e-12)


def test_transitivity_witness_degenerate_and_guards(cat_cs, full2_cs):
    x = origin(cat_cs.splitting)
    z, table = transitivity_witness(cat_cs, x, x, n_max=5)
    assert table["gauge"] == 0.0 and table["certified"]
    assert all(r["forward"] == 0.0 and r["backward"] == 0.0 for r in table["rows"])
    with pytest.raises(HorizonExceeded):
        transitivity_witness(cat_cs, x, x, n_max=100, horizon=64)
    with pytest.raises(TooLarge):
        transitivity_witness(full2_cs, x, x, n_max=5)
