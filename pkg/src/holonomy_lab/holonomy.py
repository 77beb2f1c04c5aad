"""s/u-rectangles, the staged holonomy-extension algorithm, and witnesses.

A rectangle is a grid map g(t, s): row s is an unstable curve, column t a
stable curve, and every interior node is the bracket of its two boundary
projections, g(t,s) = [g(t,0), g(0,s)].  In the linear model brackets are
exact, so corner-consistency residuals measure only floating-point noise;
anything above CORNER_TOL is a real defect.

The extension algorithm grows a rectangle along a stable curve in stages:
stage 1 spans the first stable piece of d^s-size delta; every later stage is
built at scale lambda^-1 * delta by conjugation (pull the current unstable
boundary and the next stable piece back by f^-1, build there at scale delta,
push forward), then glued on.  After each glue the unstable-length bound is
re-certified by renormalization: split the base unstable curve into pieces
of length lambda^-k * delta, push by f^k so each lands at scale delta,
compare row pieces against base pieces inside that product box, pull back.
A measured row length above (1+eps) * base length raises BlowUp - the
failure mode the construction is supposed to exclude, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conformal import (
    AuditReport,
    ConformalStructure,
    LeafCurve,
    curve_rho_length,
    discrete_leaf_distance,
    length_between,
    map_curve,
    param_at_length,
    polyline_curve,
    sample_rng,
    stable_threshold_param,
    sub_curve,
    _leaf_block,
    _random_leaf_coords,
)
from .errors import (
    BlowUp,
    BoundaryMismatch,
    ConfigInvalid,
    DegenerateCurve,
    HorizonExceeded,
    PseudoIsometryViolated,
    RemainderShort,
    TooLarge,
)
from .shift import STABLE, UNSTABLE, bracket_shift, resample_window
from .torus import (
    DEFAULT_ITERATE_HORIZON,
    HyperbolicSplitting,
    TorusLeafPoint,
    bracket_torus,
)

CORNER_TOL = 1e-9
GLUE_TOL = 1e-10
MEMBERSHIP_TOL = 1e-10
_PRE_SLACK = 1 + 1e-9


def _bracket_radius(splitting: HyperbolicSplitting, delta: float) -> float:
    """Node separations inside one rectangle stay under 2*delta per leaf
    factor; the gauge of a sum is inflated by at most 2^(e-1) on an
    exponent-e line, hence this radius for the interior bracket calls."""
    e_max = float(np.max(splitting.exponents()))
    return 1.05 * delta * 2.0 ** e_max


# ---------------------------------------------------------------------------
# rectangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SURectangle:
    """Grid rectangle: lifts[i, j] is the node at (unstable t_i, stable s_j)."""

    structure: ConformalStructure
    unstable_params: np.ndarray
    stable_params: np.ndarray
    lifts: np.ndarray                       # (P, Q, n)
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        t = np.asarray(self.unstable_params, dtype=float)
        s = np.asarray(self.stable_params, dtype=float)
        lifts = np.asarray(self.lifts, dtype=float)
        if lifts.shape[:2] != (len(t), len(s)):
            raise ValueError("lift array shape does not match the grids")
        for g in (t, s):
            if g[0] != 0.0 or g[-1] != 1.0 or (len(g) > 1 and np.any(np.diff(g) <= 0)):
                raise ValueError("parameter grids must increase from 0 to 1")
        for arr in (t, s, lifts):
            arr.flags.writeable = False
        object.__setattr__(self, "unstable_params", t)
        object.__setattr__(self, "stable_params", s)
        object.__setattr__(self, "lifts", lifts)

    @property
    def splitting(self) -> HyperbolicSplitting:
        return self.structure.splitting

    def node(self, i: int, j: int) -> TorusLeafPoint:
        return TorusLeafPoint.from_lift(self.splitting, self.lifts[i, j])

    def unstable_row(self, j: int) -> LeafCurve:
        """The unstable curve s = s_j (degenerate rows stay point sets)."""
        return polyline_curve(self.splitting, UNSTABLE, self.node(0, j),
                              self.unstable_params, self.lifts[:, j])

    def stable_column(self, i: int) -> LeafCurve:
        return polyline_curve(self.splitting, STABLE, self.node(i, 0),
                              self.stable_params, self.lifts[i, :])

    def row_lengths(self) -> np.ndarray:
        gauge = self.structure.gauge
        if len(self.unstable_params) < 2:
            return np.zeros(len(self.stable_params))
        return np.array([length_between(gauge, self.unstable_row(j), 0.0, 1.0)
                         for j in range(len(self.stable_params))])


def _merge_grid(count: int, extra) -> np.ndarray:
    pts = np.union1d(np.arange(count + 1) / count, np.asarray(extra, dtype=float))
    return pts[(pts >= 0.0) & (pts <= 1.0)]


def _curve_max_stable_distance(cs: ConformalStructure, curve: LeafCurve,
                               params) -> float:
    """max_t d^s(curve(0), curve(t)); the chord gauge is convex per piece,
    so checking breakpoints and grid nodes is exhaustive."""
    from .conformal import curve_pair_distance
    return max(curve_pair_distance(cs, curve, 0.0, float(t)) for t in params)


def local_rectangle(cs: ConformalStructure, gamma_u: LeafCurve, gamma_s: LeafCurve,
                    grid: tuple[int, int], delta: float, eps: float) -> SURectangle:
    """One product box: boundary curves sampled, interior filled by bracket.

    Preconditions (TooLarge): shared anchor, l^u(gamma_u) <= delta, and
    d^s(gamma_s(0), gamma_s(t)) <= delta along the whole stable curve.
    Post-verification (PseudoIsometryViolated): every row length within
    (1 +- eps) of the base length, every column's stable displacement within
    (1 + eps) of the base stable displacement.
    """
    if cs.kind != "torus":
        raise TooLarge("rectangles need a torus system")
    spl = cs.splitting
    gauge = cs.gauge
    p, q = grid
    if p < 1 or q < 1:
        raise ValueError("grid needs at least one interval per side")
    t_grid = _merge_grid(p, gamma_u.breakpoints)
    s_grid = _merge_grid(q, gamma_s.breakpoints)

    anchor_gap = gauge.rho(gamma_u.point(0.0).lift - gamma_s.point(0.0).lift)
    if anchor_gap > MEMBERSHIP_TOL:
        raise TooLarge(f"curves do not share their anchor (gap {anchor_gap:.3e})")
    try:
        ell_u = curve_rho_length(gauge, gamma_u)
    except DegenerateCurve:
        ell_u = 0.0
    if ell_u > delta * _PRE_SLACK:
        raise TooLarge(f"unstable length {ell_u:.6g} exceeds delta = {delta:.6g}")
    d_s_max = _curve_max_stable_distance(cs, gamma_s, s_grid)
    if d_s_max > delta * _PRE_SLACK:
        raise TooLarge(f"stable size {d_s_max:.6g} exceeds delta = {delta:.6g}")

    radius = _bracket_radius(spl, delta)
    u_lifts = gamma_u.lifts_at(t_grid)
    s_lifts = gamma_s.lifts_at(s_grid)
    lifts = np.empty((len(t_grid), len(s_grid), spl.dimension))
    for i, ul in enumerate(u_lifts):
        x = TorusLeafPoint.from_lift(spl, ul)
        for j, sl in enumerate(s_lifts):
            y = TorusLeafPoint.from_lift(spl, sl)
            lifts[i, j] = bracket_torus(x, y, radius).lift
    rect = SURectangle(cs, t_grid, s_grid, lifts, provenance=("local",))

    lengths = rect.row_lengths()
    base = lengths[0]
    if base > 0:
        lo, hi = float(np.min(lengths)), float(np.max(lengths))
        if lo < (1 - eps) * base or hi > (1 + eps) * base:
            raise PseudoIsometryViolated(
                f"row lengths [{lo:.6g}, {hi:.6g}] leave the (1 +- {eps})-band "
                f"around {base:.6g}")
    elif float(np.max(lengths)) > 1e-12:
        raise PseudoIsometryViolated("degenerate base row but nondegenerate rows")
    base_disp = [0.0] + [discrete_leaf_distance(cs, rect.node(0, 0), rect.node(0, j), STABLE)
                         for j in range(1, len(s_grid))]
    for i in range(len(t_grid)):
        for j in range(1, len(s_grid)):
            d = discrete_leaf_distance(cs, rect.node(i, 0), rect.node(i, j), STABLE)
            if d > (1 + eps) * base_disp[j] + 1e-12:
                raise PseudoIsometryViolated(
                    f"stable displacement {d:.6g} at node ({i},{j}) exceeds "
                    f"(1+eps) * {base_disp[j]:.6g}")
    return rect


def glue_rectangles(g1: SURectangle, g2: SURectangle) -> SURectangle:
    """Stack g2 past g1's last stable row; stable grids weighted by interval
    counts, unstable grids must agree.  BoundaryMismatch over GLUE_TOL."""
    if len(g1.unstable_params) != len(g2.unstable_params) or \
            np.max(np.abs(g1.unstable_params - g2.unstable_params)) > 1e-12:
        raise BoundaryMismatch("unstable parameter grids differ")
    seam = float(np.max(np.abs(g1.lifts[:, -1, :] - g2.lifts[:, 0, :])))
    if seam > GLUE_TOL:
        raise BoundaryMismatch(f"seam rows differ by {seam:.3e} > {GLUE_TOL:g}")
    # a side with no stable extent contributes nothing but its provenance
    if float(np.max(np.abs(g2.lifts - g2.lifts[:, :1, :]))) <= GLUE_TOL:
        return SURectangle(g1.structure, g1.unstable_params, g1.stable_params,
                           g1.lifts, g1.provenance + g2.provenance)
    if float(np.max(np.abs(g1.lifts - g1.lifts[:, :1, :]))) <= GLUE_TOL:
        return SURectangle(g1.structure, g1.unstable_params, g2.stable_params,
                           g2.lifts, g1.provenance + g2.provenance)
    w1, w2 = len(g1.stable_params) - 1, len(g2.stable_params) - 1
    c = w1 / (w1 + w2)
    s_grid = np.concatenate([g1.stable_params * c,
                             c + g2.stable_params[1:] * (1 - c)])
    s_grid[-1] = 1.0
    lifts = np.concatenate([g1.lifts, g2.lifts[:, 1:, :]], axis=1)
    return SURectangle(g1.structure, g1.unstable_params, s_grid, lifts,
                       g1.provenance + g2.provenance)


def verify_rectangle(rect: SURectangle, eps: float) -> "HolonomyReport":
    """Recompute corner residuals, row lengths, and column stable bounds."""
    cs = rect.structure
    spl = rect.splitting
    gauge = cs.gauge
    # covers any rectangle at the scales the engine builds (xi < 1/2)
    radius = 10.0
    worst = 0.0
    worst_node = None
    for i in range(len(rect.unstable_params)):
        x = rect.node(i, 0)
        for j in range(len(rect.stable_params)):
            want = bracket_torus(x, rect.node(0, j), radius).lift
            res = float(np.max(np.abs(want - rect.lifts[i, j])))
            if res > worst:
                worst, worst_node = res, (i, j)
    try:
        lengths = rect.row_lengths()
    except ValueError:
        # a corrupted node can push a whole row off its leaf span; that is
        # a verification failure, not a usage error
        return HolonomyReport(
            stages=max(len(rect.provenance), 1),
            alphas=(), depths=(), piece_counts=(),
            base_length=0.0, row_ratio_min=math.nan, row_ratio_max=math.nan,
            max_residual=worst, backward_steps=0, passed=False,
            worst_node=worst_node)
    base = lengths[0]
    if base > 0:
        ratio_lo = float(np.min(lengths)) / base
        ratio_hi = float(np.max(lengths)) / base
    else:
        ratio_lo = ratio_hi = 1.0
    ok = worst <= CORNER_TOL and (1 - eps) <= ratio_lo and ratio_hi <= (1 + eps)
    return HolonomyReport(
        stages=max(len(rect.provenance), 1),
        alphas=(), depths=(), piece_counts=(),
        base_length=float(base), row_ratio_min=ratio_lo, row_ratio_max=ratio_hi,
        max_residual=worst, backward_steps=0, passed=bool(ok),
        worst_node=None if ok else worst_node)


# ---------------------------------------------------------------------------
# the extension algorithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HolonomyConfig:
    delta: float | None = None          # None: calibrate from eps
    grid: tuple[int, int] = (16, 16)
    horizon: int = DEFAULT_ITERATE_HORIZON
    max_stages: int = 4096
    calibration_samples: int = 10000
    seed: int = 0


@dataclass(frozen=True)
class HolonomyReport:
    stages: int
    alphas: tuple[float, ...]
    depths: tuple[int, ...]
    piece_counts: tuple[int, ...]
    base_length: float
    row_ratio_min: float
    row_ratio_max: float
    max_residual: float
    backward_steps: int
    passed: bool
    worst_node: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {
            "stages": self.stages,
            "alphas": list(self.alphas),
            "depths": list(self.depths),
            "piece_counts": list(self.piece_counts),
            "base_length": self.base_length,
            "row_ratio_min": self.row_ratio_min,
            "row_ratio_max": self.row_ratio_max,
            "max_residual": self.max_residual,
            "backward_steps": self.backward_steps,
            "pass": self.passed,
            "worst_node": list(self.worst_node) if self.worst_node else None,
        }


def pseudo_isometry_bound(lam: float, m: int) -> float:
    """Certified distortion bound 2 / (lam^(m-1) - 2); usable iff positive
    and finite.  At the pole lam^(m-1) = 2 the bound is vacuous (+inf)."""
    den = float(lam) ** (m - 1) - 2.0
    return math.inf if den == 0.0 else 2.0 / den


def calibrate_delta(cs: ConformalStructure, eps: float, sample_pairs: int = 10000,
                    seed: int = 0) -> float:
    """Largest delta = xi * lam^-m whose certified distortion bound is <= eps,
    capped at xi / 4 and confirmed by a pseudo-isometry audit at that scale."""
    if eps <= 0:
        raise ConfigInvalid("eps must be positive")
    lam = float(cs.lam)
    m = 1
    while True:
        b = pseudo_isometry_bound(lam, m)
        if 0 < b <= eps:
            break
        m += 1
        if m > 200:
            raise ConfigInvalid("no admissible scale for this eps")
    delta = min(float(cs.xi) / 4.0, float(cs.xi) * lam ** (-m))
    center = TorusLeafPoint.from_lift(cs.splitting, np.zeros(cs.splitting.dimension)) \
        if cs.kind == "torus" else None
    report = pseudo_isometry_audit(cs, center, sample_pairs, seed, scale=delta)
    if not report.passed:
        raise ConfigInvalid("pseudo-isometry audit failed at the calibrated scale")
    return delta


def _map_rectangle(rect: SURectangle, k: int) -> SURectangle:
    spl = rect.splitting
    coords = rect.lifts @ spl.basis_inv.T
    lifts = (coords * spl.signed_values() ** k) @ spl.basis.T
    return SURectangle(rect.structure, rect.unstable_params, rect.stable_params,
                       lifts, rect.provenance)


def _renormalization_certificate(cs: ConformalStructure, rect: SURectangle,
                                 delta: float, eps: float,
                                 horizon: int) -> tuple[int, int, float]:
    """Re-certify every row of `rect` against its base row at scale delta.

    k = ceil(log_lam((1+eps)(1+lam^-1))) so that pushing a piece of length
    lam^-k * delta forward by f^k lands it at scale <= (1+eps)(1+lam^-1) *
    lam^-k * delta < delta.  Split the base row into j such pieces, push base
    and row pieces forward, compare inside the product box, pull back.
    Returns (k, j, worst ratio); BlowUp on a ratio past (1+eps)(1 + 1e-9).
    """
    gauge = cs.gauge
    lam = float(cs.lam)
    k = max(1, math.ceil(math.log((1 + eps) * (1 + 1 / lam), lam)))
    if k > horizon:
        raise HorizonExceeded(f"renormalization depth {k} exceeds horizon {horizon}")
    base = rect.unstable_row(0)
    ell = length_between(gauge, base, 0.0, 1.0)
    if ell == 0.0:
        return k, 0, 1.0
    piece = lam ** (-k) * delta
    j = max(1, math.ceil(ell / piece - 1e-12))
    cuts = [0.0]
    for m in range(1, j):
        cuts.append(param_at_length(gauge, base, m * piece))
    cuts.append(1.0)
    pushed_rows = [map_curve(rect.unstable_row(r), k, horizon)
                   for r in range(len(rect.stable_params))]
    worst = 1.0
    limit = (1 + eps) * (1 + 1e-9)
    for a, b in zip(cuts, cuts[1:]):
        base_len = length_between(gauge, pushed_rows[0], a, b)
        if base_len > delta * (1 + 1e-9):
            raise BlowUp(f"pushed base piece {base_len:.6g} misses the delta box")
        if base_len == 0.0:
            continue
        for r in range(1, len(pushed_rows)):
            ratio = length_between(gauge, pushed_rows[r], a, b) / base_len
            worst = max(worst, ratio)
            if ratio > limit:
                raise BlowUp(
                    f"row piece ratio {ratio:.9g} exceeds (1+eps) in the product box")
    return k, j, worst


def extend_holonomy(cs: ConformalStructure, gamma_u: LeafCurve, gamma_s: LeafCurve,
                    eps: float, config: HolonomyConfig = HolonomyConfig()
                    ) -> tuple[SURectangle, HolonomyReport]:
    """Extend the unstable curve's holonomy along the whole stable curve.

    Stage 1 covers the stable piece of d^s-size delta from the start; each
    later stage covers the next lam^-1 * delta piece, built by f^-1
    conjugation at scale delta and pushed back; stages are glued and the
    unstable bound is re-certified by renormalization after every glue.
    """
    if cs.kind != "torus":
        raise TooLarge("the extension algorithm needs a torus system")
    lam = float(cs.lam)
    if (1 + eps) / lam >= 1:
        raise ConfigInvalid(f"(1+eps)/lambda = {(1 + eps) / lam:.6g} must be < 1")
    delta = config.delta if config.delta is not None else \
        calibrate_delta(cs, eps, config.calibration_samples, config.seed)
    if not 0 < delta <= float(cs.xi):
        raise ConfigInvalid("delta must sit in (0, xi]")
    gauge = cs.gauge

    # reduce to l^u(gamma_u) <= delta by backward iteration, tracking r to
    # push the final rectangle forward again
    r = 0
    work_u, work_s = gamma_u, gamma_s
    try:
        ell = curve_rho_length(gauge, work_u)
    except DegenerateCurve:
        ell = 0.0
    while ell > delta * _PRE_SLACK:
        r += 1
        if r > config.horizon:
            raise HorizonExceeded("unstable curve cannot be shrunk below delta")
        work_u = map_curve(work_u, -1, config.horizon)
        work_s = map_curve(work_s, -1, config.horizon)
        ell /= lam

    alphas: list[float] = []
    depths: list[int] = []
    pieces: list[int] = []
    alpha = 0.0
    rect: SURectangle | None = None
    current_u = work_u
    stage = 0
    while alpha < 1.0:
        stage += 1
        if stage > config.max_stages:
            raise HorizonExceeded(f"stage budget {config.max_stages} exhausted")
        threshold = delta if stage == 1 else delta / lam
        try:
            nxt = stable_threshold_param(cs, work_s, alpha, threshold)
        except RemainderShort:
            nxt = 1.0
        piece_s = sub_curve(work_s, alpha, nxt) if nxt > alpha else None
        if piece_s is None:
            break
        if stage == 1:
            stage_rect = local_rectangle(cs, current_u, piece_s,
                                         config.grid, delta, eps)
        else:
            back_u = map_curve(current_u, -1, config.horizon)
            back_s = map_curve(piece_s, -1, config.horizon)
            stage_rect = _map_rectangle(
                local_rectangle(cs, back_u, back_s, config.grid, delta, eps), 1)
        stage_rect = SURectangle(cs, stage_rect.unstable_params,
                                 stage_rect.stable_params, stage_rect.lifts,
                                 (f"stage-{stage}",))
        rect = stage_rect if rect is None else glue_rectangles(rect, stage_rect)
        k_i, j_i, _ = _renormalization_certificate(cs, rect, delta, eps,
                                                   config.horizon)
        alphas.append(float(nxt))
        depths.append(k_i)
        pieces.append(j_i)
        current_u = rect.unstable_row(len(rect.stable_params) - 1)
        alpha = nxt

    if rect is None:  # degenerate stable curve: single local box
        rect = local_rectangle(cs, current_u, work_s, config.grid, delta, eps)
        alphas, depths, pieces = [1.0], [], []

    if r:
        rect = _map_rectangle(rect, r)
        rect = SURectangle(cs, rect.unstable_params, rect.stable_params,
                           rect.lifts, rect.provenance)

    lengths = rect.row_lengths()
    base = float(lengths[0]) if lengths[0] > 0 else 0.0
    if base > 0:
        ratios = lengths / base
        ratio_lo, ratio_hi = float(np.min(ratios)), float(np.max(ratios))
        if ratio_hi > (1 + eps) * (1 + 1e-9):
            raise BlowUp(f"final row ratio {ratio_hi:.9g} exceeds 1 + eps")
    else:
        ratio_lo = ratio_hi = 1.0
    check = verify_rectangle(rect, eps)
    report = HolonomyReport(
        stages=stage if alphas else 1,
        alphas=tuple(alphas), depths=tuple(depths), piece_counts=tuple(pieces),
        base_length=base, row_ratio_min=ratio_lo, row_ratio_max=ratio_hi,
        max_residual=check.max_residual, backward_steps=r,
        passed=bool(check.passed and ratio_hi <= (1 + eps) * (1 + 1e-9)))
    return rect, report


# ---------------------------------------------------------------------------
# pseudo-isometry audit
# ---------------------------------------------------------------------------

def _scale_index(lam, xi, value) -> int:
    """m with xi * lam^-(m+1) < value <= xi * lam^-m (exact for Fractions)."""
    if isinstance(value, Fraction) and isinstance(xi, Fraction):
        m = 0
        while value <= xi / lam ** (m + 1):
            m += 1
        return m
    m = math.floor(math.log(float(xi) / float(value)) / math.log(float(lam)))
    while float(value) > float(xi) * float(lam) ** (-m):
        m -= 1
    while float(value) <= float(xi) * float(lam) ** (-(m + 1)):
        m += 1
    return m


def pseudo_isometry_audit(cs: ConformalStructure, box_center, sample_pairs: int,
                          seed: int, scale: float | None = None) -> AuditReport:
    """Holonomy distortion between plaques vs the 2/(lam^(m-1)-2) bound.

    Each sample: a pair p, q on the unstable plaque through the center, a
    stable transversal move z, holonomy images by bracket; the distortion
    |1 - d(pi p, pi q)/d(p, q)| must obey the bound at the pair's scale
    index m whenever lam^(m-1) > 2.  Linear brackets and splices move
    leaf distances not at all, so the measured distortion is ~0 and the
    certificate is strict.
    """
    kind = "pseudo-isometry"
    if sample_pairs <= 0:
        return AuditReport(kind, 0, None, {"undefined": True}, None, True)
    worst = -1.0
    worst_witness = None
    min_bound = math.inf
    ok = True
    if cs.kind == "torus":
        spl = cs.splitting
        gauge = cs.gauge
        xi = float(cs.xi)
        top = min(scale if scale is not None else xi, xi) * 0.9
        # a gauge ball of radius g reaches eigen coordinates g^(1/e); cap the
        # radius so every constructed lift displacement stays clear of the
        # sup-norm 1/2 wrap boundary inside bracket_torus
        top = min(top, (0.4 / spl.dimension) ** float(np.max(spl.exponents())))
        u_block = _leaf_block(spl, UNSTABLE)
        s_block = _leaf_block(spl, STABLE)
        u_exps = spl.exponents()[u_block]
        s_exps = spl.exponents()[s_block]
        radius = max(1.0, _bracket_radius(spl, top))
        for i in range(sample_pairs):
            rng = sample_rng(seed, i)
            cu_p = _random_leaf_coords(rng, u_exps, top * rng.uniform(0.1, 1.0))
            cu_q = _random_leaf_coords(rng, u_exps, top * rng.uniform(0.1, 1.0))
            cz = _random_leaf_coords(rng, s_exps, top * rng.uniform(0.1, 1.0))
            pad = np.zeros(spl.dimension)
            pad[u_block] = cu_p
            p = box_center.displaced(spl.from_eigen(pad))
            pad[u_block] = cu_q
            q = box_center.displaced(spl.from_eigen(pad))
            pad = np.zeros(spl.dimension)
            pad[s_block] = cz
            z = box_center.displaced(spl.from_eigen(pad))
            d_pq = discrete_leaf_distance(cs, p, q, UNSTABLE)
            if d_pq == 0:
                continue
            pi_p = bracket_torus(p, z, radius)
            pi_q = bracket_torus(q, z, radius)
            d_img = discrete_leaf_distance(cs, pi_p, pi_q, UNSTABLE)
            d_move = max(discrete_leaf_distance(cs, p, pi_p, STABLE),
                         discrete_leaf_distance(cs, q, pi_q, STABLE))
            distortion = abs(1.0 - d_img / d_pq)
            m = _scale_index(cs.lam, cs.xi, max(d_pq, d_move, 1e-300))
            bound = pseudo_isometry_bound(cs.lam, m)
            info = {"m": m, "bound": bound, "distortion": float(distortion)}
            if bound > 0:
                min_bound = min(min_bound, bound)
                if distortion > bound:
                    ok = False
            if distortion > worst:
                worst, worst_witness = float(distortion), info
        threshold = None if min_bound is math.inf else min_bound
        return AuditReport(kind, sample_pairs, worst if worst >= 0 else None,
                           worst_witness, threshold, ok)

    # shift: p, q share the center's past, z changes the past; splice holonomy
    for i in range(sample_pairs):
        rng = sample_rng(seed, i)
        lo = int(rng.integers(1, 7))
        p = resample_window(cs.space, box_center, lo, lo + int(rng.integers(0, 3)), rng)
        lo = int(rng.integers(1, 7))
        q = resample_window(cs.space, box_center, lo, lo + int(rng.integers(0, 3)), rng)
        hi = -int(rng.integers(1, 7))
        z = resample_window(cs.space, box_center, hi - int(rng.integers(0, 3)), hi, rng)
        d_pq = discrete_leaf_distance(cs, p, q, UNSTABLE)
        if d_pq == 0:
            continue
        pi_p = bracket_shift(p, z)
        pi_q = bracket_shift(q, z)
        d_img = discrete_leaf_distance(cs, pi_p, pi_q, UNSTABLE)
        d_move = max(discrete_leaf_distance(cs, p, pi_p, STABLE),
                     discrete_leaf_distance(cs, q, pi_q, STABLE),
                     Fraction(0))
        distortion = abs(1 - Fraction(d_img) / d_pq)
        m = _scale_index(cs.lam, cs.xi, max(d_pq, d_move))
        bound = pseudo_isometry_bound(cs.lam, m)
        info = {"m": m, "bound": bound, "distortion": float(distortion)}
        if bound > 0:
            min_bound = min(min_bound, bound)
            if distortion > bound:
                ok = False
        if float(distortion) > worst:
            worst, worst_witness = float(distortion), info
    threshold = None if min_bound is math.inf else min_bound
    return AuditReport(kind, sample_pairs, worst if worst >= 0 else None,
                       worst_witness, threshold, ok)


# ---------------------------------------------------------------------------
# transitivity witnesses
# ---------------------------------------------------------------------------

def transitivity_witness(cs: ConformalStructure, x: TorusLeafPoint, y: TorusLeafPoint,
                         n_max: int, horizon: int = DEFAULT_ITERATE_HORIZON,
                         offset_range: int = 2):
    """Point z on W^s(x) and on W^u(y) (mod Z^n), with its decay table.

    Candidates z_m = x + stable part of (y - x + m) over the integer offset
    box; the winner minimizes the gauge of the connecting vector, ties going
    to the smaller sup-norm offset and then lexicographic order.  The table
    certifies gauge(f^n z - f^n x) and gauge(f^-n z - f^-n y) against the
    exact lambda^-n decay, tracking displacements in eigen-coordinates.
    """
    if cs.kind != "torus":
        raise TooLarge("transitivity witnesses need a torus system")
    if n_max > horizon:
        raise HorizonExceeded(f"n_max = {n_max} exceeds horizon {horizon}")
    spl = cs.splitting
    gauge = cs.gauge
    n = spl.dimension
    base = y.torus_position() - x.torus_position()
    offsets = sorted(
        (tuple(int(v) for v in m) for m in
         np.stack(np.meshgrid(*[np.arange(-offset_range, offset_range + 1)] * n,
                              indexing="ij"), axis=-1).reshape(-1, n)),
        key=lambda m: (max(abs(v) for v in m), m))
    best_m, best_val = None, math.inf
    for m in offsets:
        val = gauge.rho(base + np.array(m, dtype=float))
        if val < best_val * (1 - 1e-12):
            best_m, best_val = m, val
    w = base + np.array(best_m, dtype=float)
    coords = spl.to_eigen(w)
    k = spl.num_stable
    s_coords = np.zeros(n)
    s_coords[:k] = coords[:k]
    u_coords = np.zeros(n)
    u_coords[k:] = coords[k:]
    z = TorusLeafPoint.from_lift(spl, x.torus_position() + spl.from_eigen(s_coords))

    lam = float(cs.lam)
    exps = spl.exponents()
    abs_vals = np.abs(spl.signed_values())
    rows = []
    fwd0 = gauge.rho_of_coords(s_coords)
    bwd0 = gauge.rho_of_coords(u_coords)
    for step in range(n_max + 1):
        fwd = float(np.max(np.abs(s_coords * abs_vals ** step) ** exps)) \
            if fwd0 > 0 else 0.0
        bwd = float(np.max(np.abs(u_coords * abs_vals ** (-step)) ** exps)) \
            if bwd0 > 0 else 0.0
        exp_f = fwd0 * lam ** (-step)
        exp_b = bwd0 * lam ** (-step)
        err_f = abs(fwd / exp_f - 1.0) if exp_f > 0 else 0.0
        err_b = abs(bwd / exp_b - 1.0) if exp_b > 0 else 0.0
        rows.append({"n": step, "forward": fwd, "backward": bwd,
                     "forward_rel_err": err_f, "backward_rel_err": err_b,
                     "certified": bool(err_f <= 1e-9 and err_b <= 1e-9)})
    table = {"offset": list(best_m), "gauge": best_val, "rows": rows,
             "certified": all(r["certified"] for r in rows)}
    return z, table
