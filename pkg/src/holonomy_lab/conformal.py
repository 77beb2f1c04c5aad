"""Adapted gauge, leaf curves, leaf distances, lengths, and audits.

The gauge rho(v) = max_i |c_i|^(e_i) (eigen-coordinates c, per-line exponents
e_i >= 1) transforms exactly conformally: one forward step scales every
stable contribution by 1/lambda, one backward step does the same for
unstable ones.  It is *not* a norm once some exponent exceeds 1 - no
homogeneity, no triangle inequality - which is why metric_audit below is a
probe with an expected-failure mode rather than a certification.

Leaf distances are renormalized first-entry values: iterate until the pair
sits inside the gauge ball of radius xi, measure, multiply back by lambda^n.
The value is independent of which admissible n is used; implementations here
verify that at n and n+1 and report the drift.

Curves are piecewise-linear leaf curves on [0, 1], constant speed per piece.
Their rho-length is sum_pieces dt * rho(displacement / dt), i.e. the
integral of rho(gamma'); for exponent-1 systems this is the classical
leafwise length and is parametrization-proof, for larger exponents the
parametrization class is pinned to keep every number reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    DegenerateCurve,
    HorizonExceeded,
    NotSameLeaf,
    RemainderShort,
)
from .shift import (
    STABLE,
    UNSTABLE,
    ShiftPoint,
    ShiftSpace,
    base_distance as shift_base_distance,
    n_first_iterate,
    shift_iterate,
)
from .torus import (
    DEFAULT_ITERATE_HORIZON,
    HyperbolicSplitting,
    TorusLeafPoint,
    nearest_lift_displacement,
)

LEAF_MEMBERSHIP_TOL = 1e-12
SAME_LEAF_TOL = 1e-9
_BISECTION_WIDTH = 1e-12


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-sample stream: independent of evaluation order."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), index]))


# ---------------------------------------------------------------------------
# gauge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RhoGauge:
    """The adapted gauge of one splitting, with its comparison constants."""

    splitting: HyperbolicSplitting

    def rho(self, v) -> float:
        return self.splitting.rho(v)

    def rho_of_coords(self, coords) -> float:
        return self.splitting.rho_of_coords(coords)

    @property
    def conditioning(self) -> float:
        """L with |c_i| <= L * Euclidean norm, from the dual basis rows."""
        return float(np.max(np.linalg.norm(self.splitting.basis_inv, axis=1)))

    @property
    def holder_exponent(self) -> float:
        """beta = min_i 1/e_i; the norm is bounded by (k+l) * rho^beta."""
        return float(1.0 / np.max(self.splitting.exponents()))


# ---------------------------------------------------------------------------
# leaf curves (torus systems only; shift leaves are totally disconnected)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeafCurve:
    """Piecewise-linear curve inside one stable or unstable leaf.

    Parametrized on [0, 1]; piece i covers [breakpoints[i], breakpoints[i+1]]
    with constant velocity displacements[i] / width.  Every displacement must
    lie in the leaf's line span to within LEAF_MEMBERSHIP_TOL.
    """

    splitting: HyperbolicSplitting
    leaf: str
    anchor: TorusLeafPoint
    breakpoints: np.ndarray
    displacements: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        disp = np.atleast_2d(np.asarray(self.displacements, dtype=float))
        if self.leaf not in (STABLE, UNSTABLE):
            raise ValueError(f"leaf must be {STABLE!r} or {UNSTABLE!r}")
        if bp.ndim != 1 or len(bp) != len(disp) + 1:
            raise ValueError("need one more breakpoint than displacement")
        if bp[0] != 0.0 or bp[-1] != 1.0 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must increase strictly from 0 to 1")
        coords = disp @ self.splitting.basis_inv.T
        k = self.splitting.num_stable
        off = coords[:, k:] if self.leaf == STABLE else coords[:, :k]
        if off.size and float(np.max(np.abs(off))) > LEAF_MEMBERSHIP_TOL:
            raise ValueError(f"piece displacement leaves the {self.leaf} line span")
        bp.flags.writeable = False
        disp.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "displacements", disp)
        prefix = np.vstack([np.zeros(disp.shape[1]), np.cumsum(disp, axis=0)])
        prefix.flags.writeable = False
        object.__setattr__(self, "_prefix", prefix)

    @property
    def piece_count(self) -> int:
        return len(self.displacements)

    def displacement(self, a: float, b: float) -> np.ndarray:
        """Ambient vector from point(a) to point(b)."""
        return self._offset(b) - self._offset(a)

    def _offset(self, t: float) -> np.ndarray:
        t = min(max(float(t), 0.0), 1.0)
        i = int(np.searchsorted(self.breakpoints, t, side="right") - 1)
        i = min(i, self.piece_count - 1)
        width = self.breakpoints[i + 1] - self.breakpoints[i]
        frac = (t - self.breakpoints[i]) / width
        return self._prefix[i] + frac * self.displacements[i]

    def point(self, t: float) -> TorusLeafPoint:
        return TorusLeafPoint.from_lift(self.splitting, self.anchor.lift + self._offset(t))

    def lifts_at(self, ts) -> np.ndarray:
        ts = np.clip(np.asarray(ts, dtype=float), 0.0, 1.0)
        idx = np.clip(np.searchsorted(self.breakpoints, ts, side="right") - 1,
                      0, self.piece_count - 1)
        width = self.breakpoints[idx + 1] - self.breakpoints[idx]
        frac = (ts - self.breakpoints[idx]) / width
        return self.anchor.lift + self._prefix[idx] + frac[:, None] * self.displacements[idx]


def make_segment(splitting: HyperbolicSplitting, leaf: str, anchor: TorusLeafPoint,
                 displacement) -> LeafCurve:
    """Single straight piece from anchor to anchor + displacement."""
    return LeafCurve(splitting, leaf, anchor, np.array([0.0, 1.0]),
                     np.asarray(displacement, dtype=float)[None, :])


def polyline_curve(splitting: HyperbolicSplitting, leaf: str, anchor: TorusLeafPoint,
                   params, lifts) -> LeafCurve:
    """Curve through given lifts at given parameters (anchor = first lift)."""
    lifts = np.asarray(lifts, dtype=float)
    return LeafCurve(splitting, leaf, anchor, np.asarray(params, dtype=float),
                     np.diff(lifts, axis=0))


def _piece_speeds(gauge: RhoGauge, curve: LeafCurve) -> np.ndarray:
    widths = np.diff(curve.breakpoints)
    return np.array([gauge.rho(d / w) for d, w in zip(curve.displacements, widths)])


def curve_rho_length(gauge: RhoGauge, curve: LeafCurve) -> float:
    """Integral of rho(gamma') over [0, 1]: sum of width * rho(disp/width)."""
    if not np.any(np.abs(curve.displacements) > 0):
        raise DegenerateCurve("curve has no nonzero piece")
    return length_between(gauge, curve, 0.0, 1.0)


def length_between(gauge: RhoGauge, curve: LeafCurve, a: float, b: float) -> float:
    """Integral of rho(gamma') over [a, b] of the *original* parametrization.

    Additive in the splitting point by construction: the integrand is fixed
    per piece, so length(a,c) + length(c,b) = length(a,b) to rounding.
    """
    if b < a:
        raise ValueError("need a <= b")
    speeds = _piece_speeds(gauge, curve)
    lo = np.maximum(curve.breakpoints[:-1], a)
    hi = np.minimum(curve.breakpoints[1:], b)
    overlap = np.maximum(hi - lo, 0.0)
    return float(math.fsum(overlap * speeds))


def param_at_length(gauge: RhoGauge, curve: LeafCurve, target: float) -> float:
    """Parameter t with length_between(0, t) = target; exact per-piece solve."""
    if target < 0:
        raise ValueError("target length must be nonnegative")
    speeds = _piece_speeds(gauge, curve)
    widths = np.diff(curve.breakpoints)
    acc = 0.0
    for i in range(curve.piece_count):
        piece = speeds[i] * widths[i]
        if acc + piece >= target - 1e-15:
            if speeds[i] == 0:
                return float(curve.breakpoints[i])
            return float(curve.breakpoints[i] + (target - acc) / speeds[i])
        acc += piece
    if target <= acc * (1 + 1e-12) + 1e-15:
        return 1.0
    raise RemainderShort(f"curve length {acc:.6g} below requested {target:.6g}")


def sub_curve(curve: LeafCurve, a: float, b: float) -> LeafCurve:
    """Restriction to [a, b], re-parametrized affinely onto [0, 1].

    Note the re-parametrization rescales piece speeds; for exponent-1
    systems rho-lengths are unaffected, otherwise use length_between for
    additive bookkeeping on the parent curve.
    """
    if not 0.0 <= a < b <= 1.0:
        raise ValueError("need 0 <= a < b <= 1")
    inner = [t for t in curve.breakpoints if a < t < b]
    params = np.array([a, *inner, b])
    lifts = curve.lifts_at(params)
    new_params = (params - a) / (b - a)
    new_params[0], new_params[-1] = 0.0, 1.0
    return polyline_curve(curve.splitting, curve.leaf, curve.point(a), new_params, lifts)


def map_curve(curve: LeafCurve, k: int, horizon: int = DEFAULT_ITERATE_HORIZON) -> LeafCurve:
    """Compose with the k-th power of the automorphism (same parametrization)."""
    if abs(k) > horizon:
        raise HorizonExceeded(f"|k| = {abs(k)} exceeds horizon {horizon}")
    from .torus import iterate  # local import to keep module load cheap
    values = curve.splitting.signed_values() ** k
    coords = curve.displacements @ curve.splitting.basis_inv.T
    # off-leaf coordinates are construction noise; scaling against the leaf
    # (backward on an unstable curve, say) would amplify them past tolerance
    block = _leaf_block(curve.splitting, curve.leaf)
    clean = np.zeros_like(coords)
    clean[:, block] = coords[:, block]
    disp = (clean * values) @ curve.splitting.basis.T
    return LeafCurve(curve.splitting, curve.leaf, iterate(curve.anchor, k, horizon),
                     curve.breakpoints.copy(), disp)


# ---------------------------------------------------------------------------
# conformal structure: one handle for either model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConformalStructure:
    """Base distance + expanding factor + local scale for one system."""

    kind: str                                # "torus" or "shift"
    splitting: Optional[HyperbolicSplitting]
    space: Optional[ShiftSpace]
    gauge: Optional[RhoGauge]
    xi: float | Fraction
    lam: float | Fraction

    @classmethod
    def for_torus(cls, splitting: HyperbolicSplitting, xi: float = 0.1) -> "ConformalStructure":
        if not 0 < xi < 0.5:
            raise ValueError("xi must sit in (0, 1/2)")
        return cls("torus", splitting, None, RhoGauge(splitting), float(xi),
                   splitting.expanding_factor)

    @classmethod
    def for_shift(cls, space: ShiftSpace, xi: Fraction | None = None) -> "ConformalStructure":
        xi = Fraction(1, 1) / space.lam if xi is None else Fraction(xi)
        return cls("shift", None, space, None, xi, space.lam)

    def base_distance(self, x, y):
        """Gauge of the nearest-lift displacement (torus; meaningful inside
        gauge balls of radius xi) or the exact ultrametric (shift)."""
        if self.kind == "torus":
            return self.gauge.rho(nearest_lift_displacement(x, y))
        return shift_base_distance(x, y)


def _leaf_block(splitting: HyperbolicSplitting, leaf: str) -> slice:
    k = splitting.num_stable
    return slice(0, k) if leaf == STABLE else slice(k, splitting.dimension)


def _torus_leaf_coords(cs: ConformalStructure, y: TorusLeafPoint, z: TorusLeafPoint,
                       leaf: str) -> np.ndarray:
    v = z.eigen_coords - y.eigen_coords
    k = cs.splitting.num_stable
    off = v[k:] if leaf == STABLE else v[:k]
    if off.size and float(np.max(np.abs(off))) > SAME_LEAF_TOL:
        raise NotSameLeaf(f"lift displacement leaves the {leaf} span "
                          f"(off-component {float(np.max(np.abs(off))):.3e})")
    return v[_leaf_block(cs.splitting, leaf)]


def _torus_leaf_value(cs: ConformalStructure, coords: np.ndarray, leaf: str,
                      horizon: int) -> tuple[float, int, float]:
    """Renormalized first-entry value, its n, and the n vs n+1 drift."""
    spl = cs.splitting
    block = _leaf_block(spl, leaf)
    rates = np.abs(np.array(spl.stable_values if leaf == STABLE else spl.unstable_values))
    contraction = rates if leaf == STABLE else 1.0 / rates
    exps = spl.exponents()[block]
    lam = spl.expanding_factor

    def value_at(n: int) -> float:
        scaled = np.abs(coords) * contraction ** n
        if not scaled.size or float(np.max(scaled)) == 0.0:
            return 0.0
        return lam ** n * float(np.max(scaled ** exps))

    def gauge_at(n: int) -> float:
        scaled = np.abs(coords) * contraction ** n
        return float(np.max(scaled ** exps)) if scaled.size else 0.0

    n = 0
    while gauge_at(n) > cs.xi:
        n += 1
        if n > horizon:
            raise HorizonExceeded(f"no entry into the xi-ball within {horizon} steps")
    v = value_at(n)
    v_next = value_at(n + 1)
    drift = 0.0 if v == 0.0 else abs(v_next / v - 1.0)
    return v, n, drift


def leaf_distance_detail(cs: ConformalStructure, y, z, direction: str = STABLE,
                         horizon: int = DEFAULT_ITERATE_HORIZON):
    """(value, n, drift) behind discrete_leaf_distance."""
    if cs.kind == "torus":
        coords = _torus_leaf_coords(cs, y, z, direction)
        return _torus_leaf_value(cs, coords, direction, horizon)
    n = n_first_iterate(y, z, direction)
    if n > horizon:
        raise HorizonExceeded(f"first common-leaf iterate {n} exceeds horizon {horizon}")
    step = -1 if direction == STABLE else 1
    d_n = cs.lam ** n * shift_base_distance(shift_iterate(y, -step * n),
                                            shift_iterate(z, -step * n))
    d_next = cs.lam ** (n + 1) * shift_base_distance(shift_iterate(y, -step * (n + 1)),
                                                     shift_iterate(z, -step * (n + 1)))
    drift = Fraction(0) if d_n == 0 else abs(d_next / d_n - 1)
    return d_n, n, drift


def discrete_leaf_distance(cs: ConformalStructure, y, z, direction: str = STABLE,
                           horizon: int = DEFAULT_ITERATE_HORIZON):
    """Leafwise distance: lambda^n * base distance after n common iterates.

    Exact Fraction on shifts, float on torus systems.  The value does not
    depend on the admissible n (checked internally at n and n+1).
    """
    value, _, _ = leaf_distance_detail(cs, y, z, direction, horizon)
    return value


def curve_pair_distance(cs: ConformalStructure, curve: LeafCurve, a: float, b: float) -> float:
    """Leaf distance between curve(a) and curve(b) via the curve's own chord."""
    coords = curve.splitting.to_eigen(curve.displacement(a, b))
    block = _leaf_block(curve.splitting, curve.leaf)
    value, _, _ = _torus_leaf_value(cs, coords[block], curve.leaf, DEFAULT_ITERATE_HORIZON)
    return value


def partition_length_estimate(cs: ConformalStructure, curve: LeafCurve,
                              refinement_level: int) -> float:
    """Sum of leaf distances over the dyadic partition with 2^level pieces.

    Refinement-invariant on exponent-1 lines; on a line with exponent e > 1
    each level multiplies the sum by 2^(1-e) - the gauge is a snowflake
    there, and the would-be length collapses.  Capped at level 20.
    """
    if cs.kind != "torus":
        raise ValueError("partition estimates need a torus system")
    if not 0 <= refinement_level <= 20:
        raise ValueError("refinement_level must lie in [0, 20]")
    n_pieces = 2 ** refinement_level
    ts = np.arange(n_pieces + 1) / n_pieces
    lifts = curve.lifts_at(ts)
    diffs = np.diff(lifts, axis=0)
    coords = diffs @ curve.splitting.basis_inv.T
    block = _leaf_block(curve.splitting, curve.leaf)
    spl = curve.splitting
    rates = np.abs(np.array(spl.stable_values if curve.leaf == STABLE else spl.unstable_values))
    contraction = rates if curve.leaf == STABLE else 1.0 / rates
    exps = spl.exponents()[block]
    lam = spl.expanding_factor
    c = np.abs(coords[:, block])
    gauges = np.max(np.where(c > 0, c, 0.0) ** exps, axis=1)
    # renormalization depth per pair, then the lambda^n * gauge_n value
    with np.errstate(divide="ignore"):
        n = np.ceil(np.log(gauges / float(cs.xi)) / math.log(lam))
    n = np.clip(n, 0, None)
    n[~np.isfinite(n)] = 0
    scaled = c * contraction[None, :] ** n[:, None]
    values = lam ** n * np.max(scaled ** exps, axis=1)
    return float(math.fsum(values))


def stable_threshold_param(cs: ConformalStructure, curve: LeafCurve, start: float,
                           delta: float) -> float:
    """First parameter alpha > start with leaf-distance(curve(start), curve(alpha)) = delta.

    Walks pieces left to right; the chord gauge is convex on each piece, so
    the first crossing is bracketed by consecutive breakpoints and bisection
    converges to it.  Raises RemainderShort when the curve never gets there.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0.0 <= start < 1.0:
        raise ValueError("start must lie in [0, 1)")

    def dist(t: float) -> float:
        return curve_pair_distance(cs, curve, start, t)

    checkpoints = [t for t in curve.breakpoints if t > start] or [1.0]
    lo, f_lo = start, 0.0
    for t in checkpoints:
        f_t = dist(t)
        if f_t >= delta:
            hi = t
            while hi - lo > _BISECTION_WIDTH:
                mid = 0.5 * (lo + hi)
                if dist(mid) < delta:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        lo, f_lo = t, f_t
    raise RemainderShort(
        f"distance only reaches {f_lo:.6g} < delta = {delta:.6g} by the curve end")


# ---------------------------------------------------------------------------
# audit reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    kind: str
    samples: int
    worst_value: float | None
    worst_witness: dict | None
    threshold: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "samples": self.samples,
            "worst_value": self.worst_value,
            "worst_witness": self.worst_witness,
            "threshold": self.threshold,
            "pass": self.passed,
        }


def _empty_report(kind: str, threshold: float | None) -> AuditReport:
    return AuditReport(kind, 0, None, {"undefined": True}, threshold, True)


def _random_leaf_coords(rng: np.random.Generator, exps: np.ndarray, target: float) -> np.ndarray:
    """Coordinates with gauge <= target and comparable magnitude."""
    u = rng.uniform(-1.0, 1.0, size=len(exps))
    u[np.abs(u) < 1e-3] = 1e-3
    return np.sign(u) * (np.abs(u) * target) ** (1.0 / exps)


def conformality_audit(cs: ConformalStructure, sample_count: int, seed: int,
                       depth: int = 20) -> AuditReport:
    """Worst relative violation of d(f^k ., f^k .) = lambda^-k d over leaf pairs.

    Torus pairs track displacements in eigen-coordinates (re-measured with
    fresh powers at every k); shift pairs are exact rationals, so any nonzero
    violation is a hard failure.
    """
    kind = "conformality"
    if sample_count <= 0:
        return _empty_report(kind, 1e-10)
    worst = -1.0
    witness = None
    if cs.kind == "torus":
        spl = cs.splitting
        for i in range(sample_count):
            rng = sample_rng(seed, i)
            leaf = STABLE if i % 2 == 0 else UNSTABLE
            block = _leaf_block(spl, leaf)
            exps = spl.exponents()[block]
            rates = np.abs(np.array(spl.stable_values if leaf == STABLE
                                    else spl.unstable_values))
            contraction = rates if leaf == STABLE else 1.0 / rates
            target = float(cs.xi) * rng.uniform(0.05, 0.95)
            c = _random_leaf_coords(rng, exps, target)
            d0 = float(np.max(np.abs(c) ** exps))
            lam = spl.expanding_factor
            for k in range(1, depth + 1):
                dk = float(np.max((np.abs(c) * contraction ** k) ** exps))
                violation = abs(lam ** k * dk / d0 - 1.0)
                if violation > worst:
                    worst = violation
                    witness = {"leaf": leaf, "k": k, "coords": [float(x) for x in c]}
        return AuditReport(kind, sample_count, worst, witness, 1e-10, worst <= 1e-10)

    from .shift import random_point, resample_window
    for i in range(sample_count):
        rng = sample_rng(seed, i)
        leaf = STABLE if i % 2 == 0 else UNSTABLE
        y = random_point(cs.space, rng)
        lo = -int(rng.integers(1, 7)) if leaf == STABLE else int(rng.integers(1, 7))
        span = int(rng.integers(1, 4))
        window = (min(lo, lo - span + 1), max(lo, lo + span - 1))
        if leaf == STABLE:
            window = (window[0], min(window[1], -1))
        else:
            window = (max(window[0], 1), window[1])
        z = resample_window(cs.space, y, window[0], window[1], rng)
        d0 = shift_base_distance(y, z)
        step = 1 if leaf == STABLE else -1
        bad = 0.0
        for k in range(1, depth + 1):
            dk = shift_base_distance(shift_iterate(y, step * k), shift_iterate(z, step * k))
            if cs.lam ** k * dk != d0:
                bad = 1.0
                break
        if bad > worst:
            worst = bad
            witness = {"leaf": leaf, "y": y.to_string(), "z": z.to_string()}
    return AuditReport(kind, sample_count, worst, witness, 0.0, worst <= 0.0)


def metric_audit(cs: ConformalStructure, sample_count: int, seed: int) -> AuditReport:
    """Triangle-defect probe: max d(x,z) / (d(x,y) + d(y,z)) over leaf triples.

    Includes deterministic midpoint triples along every eigen-line, which
    realize the worst defect 2^(e-1) on a line with exponent e.  Threshold 1:
    shifts and exponent-1 systems pass, genuine snowflake exponents fail by
    design and the report documents them.
    """
    kind = "triangle-defect"
    if sample_count <= 0:
        return _empty_report(kind, 1.0)
    worst = -1.0
    witness = None

    def consider(value: float, info: dict):
        nonlocal worst, witness
        if value > worst:
            worst = value
            witness = info

    if cs.kind == "torus":
        spl = cs.splitting
        gauge = cs.gauge
        exps_all = spl.exponents()
        n = spl.dimension
        for d in range(n):
            e = np.zeros(n)
            e[d] = 0.1
            a = spl.from_eigen(e)
            defect = gauge.rho(2 * a) / (2 * gauge.rho(a))
            leaf = STABLE if d < spl.num_stable else UNSTABLE
            consider(float(defect), {"type": "collinear-midpoint", "leaf": leaf,
                                     "direction": d, "exponent": float(exps_all[d])})
        for i in range(sample_count):
            rng = sample_rng(seed, i)
            leaf = STABLE if i % 2 == 0 else UNSTABLE
            block = _leaf_block(spl, leaf)
            exps = spl.exponents()[block]
            ca = _random_leaf_coords(rng, exps, float(cs.xi) * 0.4)
            cb = _random_leaf_coords(rng, exps, float(cs.xi) * 0.4)
            if rng.uniform() < 0.3:
                cb = ca.copy()  # collinear triple with a random midpoint split
            pad = np.zeros(spl.dimension)
            pad[block] = ca
            a = spl.from_eigen(pad)
            pad[block] = cb
            b = spl.from_eigen(pad)
            da, db = gauge.rho(a), gauge.rho(b)
            dz = gauge.rho(a + b)
            if da + db == 0:
                continue
            consider(float(dz / (da + db)),
                     {"type": "random", "leaf": leaf,
                      "a": [float(x) for x in ca], "b": [float(x) for x in cb]})
        return AuditReport(kind, sample_count, worst, witness, 1.0, worst <= 1.0 + 1e-12)

    from .shift import random_point, resample_window
    for i in range(sample_count):
        rng = sample_rng(seed, i)
        x = random_point(cs.space, rng)
        lo1, lo2 = -int(rng.integers(1, 6)), int(rng.integers(0, 6))
        y = resample_window(cs.space, x, lo1, lo1, rng)
        z = resample_window(cs.space, y, lo2, lo2, rng)
        dxy = shift_base_distance(x, y)
        dyz = shift_base_distance(y, z)
        dxz = shift_base_distance(x, z)
        if dxy + dyz == 0:
            continue
        consider(float(Fraction(dxz) / (dxy + dyz)),
                 {"type": "random", "x": x.to_string(), "y": y.to_string(),
                  "z": z.to_string()})
    return AuditReport(kind, sample_count, worst, witness, 1.0, worst <= 1.0)


def holder_equivalence_audit(gauge: RhoGauge, sample_count: int, seed: int,
                             radius: float | None = None) -> AuditReport:
    """Checks rho(v) <= L|v| and |v| <= n * rho(v)^beta on small samples.

    L is the dual-basis conditioning constant, beta the reciprocal of the
    largest exponent; both bounds need |v| below min(1, 1/L), which caps the
    sampling radius.
    """
    kind = "holder-equivalence"
    if sample_count <= 0:
        return _empty_report(kind, 1.0)
    spl = gauge.splitting
    L = gauge.conditioning
    beta = gauge.holder_exponent
    n = spl.dimension
    r = min(0.9, 0.9 / L) if radius is None else radius
    worst = -1.0
    witness = None
    for i in range(sample_count):
        rng = sample_rng(seed, i)
        v = rng.uniform(-1.0, 1.0, size=n)
        norm = np.linalg.norm(v)
        if norm == 0:
            continue
        v *= r * rng.uniform(0.05, 1.0) / norm
        nv = float(np.linalg.norm(v))
        rv = gauge.rho(v)
        up = rv / (L * nv)
        low = nv / (n * rv ** beta) if rv > 0 else math.inf
        value = max(up, low)
        if value > worst:
            worst = value
            witness = {"v": [float(x) for x in v], "rho": rv, "norm": nv,
                       "upper_ratio": float(up), "lower_ratio": float(low),
                       "conditioning": float(L), "holder_exponent": float(beta)}
    return AuditReport(kind, sample_count, worst, witness, 1.0, worst <= 1.0 + 1e-12)
