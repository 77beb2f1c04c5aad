"""Real hyperbolic toral automorphisms with a certified eigen-splitting.

An integer matrix A with |det A| = 1 acts on the torus R^n / Z^n.  When the
spectrum is real, simple, and off the unit circle, R^n splits into invariant
lines: contracting ones with rates |a_1| <= ... <= |a_k| < 1 and expanding
ones with rates 1 < |b_1| <= ... <= |b_l|.  The expanding factor

    lambda = max{ |a_i|^-1 } union { |b_j| }

and the per-line exponents log(lambda)/log(|a_i|^-1), log(lambda)/log(|b_j|)
drive everything downstream: all exponents are >= 1 and at least one equals
1 exactly.

Eigenvalues are found by exact root isolation on the integer characteristic
polynomial (Sturm chains over Fraction arithmetic, then bisection), so the
validation errors (NotUnimodular / ComplexSpectrum / NotHyperbolic /
RepeatedEigenvalue) are certificates, not floating-point guesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ComplexSpectrum,
    HorizonExceeded,
    NotHyperbolic,
    NotUnimodular,
    RepeatedEigenvalue,
    TooFarApart,
)

DEFAULT_ITERATE_HORIZON = 64
DEFAULT_BRACKET_RADIUS = 0.05

_EIGEN_RESIDUAL_TOL = 1e-12
_ROOT_WIDTH = Fraction(1, 10**22)


# ---------------------------------------------------------------------------
# exact integer/rational polynomial helpers (coefficients low -> high)
# ---------------------------------------------------------------------------

def _int_matrix(matrix) -> np.ndarray:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] < 2:
        raise ValueError("need dimension >= 2")
    if not np.issubdtype(m.dtype, np.integer):
        rounded = np.rint(m)
        if not np.array_equal(rounded, m):
            raise ValueError("matrix entries must be integers")
        m = rounded
    return m.astype(np.int64)


def exact_determinant(matrix) -> int:
    """Bareiss fraction-free elimination; exact for integer matrices."""
    m = [[int(v) for v in row] for row in _int_matrix(matrix)]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def exact_inverse(matrix) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix, returned as int64."""
    m = _int_matrix(matrix)
    det = exact_determinant(m)
    if det not in (1, -1):
        raise NotUnimodular(f"determinant is {det}, expected +-1")
    n = m.shape[0]
    aug = [[Fraction(int(m[i][j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    inv = np.array([[int(aug[i][n + j]) for j in range(n)] for i in range(n)], dtype=np.int64)
    assert np.array_equal(inv @ m, np.eye(n, dtype=np.int64))
    return inv


def characteristic_polynomial(matrix) -> tuple[int, ...]:
    """Monic characteristic polynomial of an integer matrix, exact.

    Faddeev-LeVerrier recursion in Fraction arithmetic; the result always has
    integer coefficients, which we assert.  Returned low -> high degree.
    """
    m = _int_matrix(matrix)
    n = m.shape[0]
    a = [[Fraction(int(v)) for v in row] for row in m]

    def matmul(x, y):
        return [[sum(x[i][t] * y[t][j] for t in range(n)) for j in range(n)] for i in range(n)]

    def trace(x):
        return sum(x[i][i] for i in range(n))

    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        mk = matmul(a, mk)
        ck = -trace(mk) / k
        coeffs[n - k] = ck
        for i in range(n):
            mk[i][i] += ck
    out = []
    for c in coeffs:
        assert c.denominator == 1
        out.append(int(c))
    return tuple(out)


def _poly_deg(p):
    d = len(p) - 1
    while d > 0 and p[d] == 0:
        d -= 1
    return d


def _poly_trim(p):
    return tuple(p[: _poly_deg(p) + 1])


def _poly_eval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_deriv(p):
    return tuple(Fraction(i) * c for i, c in enumerate(p) if i > 0) or (Fraction(0),)


def _poly_divmod(num, den):
    num = list(num)
    dd = _poly_deg(den)
    lead = den[dd]
    q = [Fraction(0)] * max(1, len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        f = num[i] / lead
        q[i - dd] = f
        for j in range(dd + 1):
            num[i - dd + j] -= f * den[j]
    rem = _poly_trim(num[:dd] or [Fraction(0)])
    return _poly_trim(q), rem


def _poly_gcd(p, q):
    p, q = _poly_trim(p), _poly_trim(q)
    while _poly_deg(q) > 0 or q[0] != 0:
        _, r = _poly_divmod(p, q)
        p, q = q, r
        if _poly_deg(q) == 0 and q[0] == 0:
            break
    lead = p[_poly_deg(p)]
    return tuple(c / lead for c in p)


def _sturm_chain(p):
    chain = [_poly_trim(p), _poly_trim(_poly_deriv(p))]
    while _poly_deg(chain[-1]) > 0:
        _, r = _poly_divmod(chain[-2], chain[-1])
        if _poly_deg(r) == 0 and r[0] == 0:
            break
        chain.append(tuple(-c for c in r))
    return chain


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign_changes_inf(chain, positive: bool) -> int:
    signs = []
    for p in chain:
        d = _poly_deg(p)
        lead = p[d]
        if lead == 0:
            continue
        s = 1 if lead > 0 else -1
        if not positive and d % 2 == 1:
            s = -s
        signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p, lo: Fraction | None = None, hi: Fraction | None = None) -> int:
    """Distinct real roots of p in (lo, hi]; whole line when bounds omitted."""
    chain = _sturm_chain(p)
    vlo = _sign_changes_inf(chain, False) if lo is None else _sign_changes(chain, lo)
    vhi = _sign_changes_inf(chain, True) if hi is None else _sign_changes(chain, hi)
    return vlo - vhi


def isolate_real_roots(p) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals each holding exactly one root of squarefree p."""
    deg = _poly_deg(p)
    bound = Fraction(1) + max(abs(c) for c in p[:deg]) / abs(p[deg])
    chain = _sturm_chain(p)

    def count(a, b):
        return _sign_changes(chain, a) - _sign_changes(chain, b)

    out = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        c = count(a, b)
        if c == 0:
            continue
        if c == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        # mid is never a root here: roots of a monic unimodular-charpoly factor
        # are irrational once +-1 is excluded, but guard anyway
        if _poly_eval(p, mid) == 0:
            eps = (b - a) / 1024
            out.append((mid - eps, mid + eps))
            stack.append((a, mid - eps))
            stack.append((mid + eps, b))
            continue
        stack.append((a, mid))
        stack.append((mid, b))
    return sorted(out)


def _refine_root(p, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect a sign-changing bracket until it is tiny and avoids +-1."""
    flo = _poly_eval(p, lo)
    if flo == 0:
        return lo, lo
    def straddles_unit(a, b):
        return (a < 1 < b) or (a < -1 < b)
    while (hi - lo) > _ROOT_WIDTH or straddles_unit(lo, hi):
        mid = (lo + hi) / 2
        fm = _poly_eval(p, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicSplitting:
    """Certified invariant-line data for one automorphism.

    `basis` has the stable directions first, then the unstable ones, each a
    Euclidean-unit column whose first nonzero entry is positive.  `to_eigen`
    and `from_eigen` convert between ambient vectors and coordinates in that
    basis; `rho` is the adapted gauge max_i |c_i|^(exponent_i).
    """

    matrix: np.ndarray
    char_coeffs: tuple[int, ...]
    stable_values: tuple[float, ...]     # signed, sorted by modulus ascending
    unstable_values: tuple[float, ...]
    stable_dirs: np.ndarray              # n x k, unit columns
    unstable_dirs: np.ndarray            # n x l
    expanding_factor: float
    stable_exponents: tuple[float, ...]
    unstable_exponents: tuple[float, ...]
    basis: np.ndarray
    basis_inv: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_stable(self) -> int:
        return len(self.stable_values)

    @property
    def num_unstable(self) -> int:
        return len(self.unstable_values)

    @property
    def stable_rates(self) -> tuple[float, ...]:
        return tuple(abs(v) for v in self.stable_values)

    @property
    def unstable_rates(self) -> tuple[float, ...]:
        return tuple(abs(v) for v in self.unstable_values)

    def signed_values(self) -> np.ndarray:
        return np.array(self.stable_values + self.unstable_values)

    def exponents(self) -> np.ndarray:
        return np.array(self.stable_exponents + self.unstable_exponents)

    def to_eigen(self, v) -> np.ndarray:
        return self.basis_inv @ np.asarray(v, dtype=float)

    def from_eigen(self, coords) -> np.ndarray:
        return self.basis @ np.asarray(coords, dtype=float)

    def rho_of_coords(self, coords) -> float:
        c = np.abs(np.asarray(coords, dtype=float))
        return float(np.max(c ** self.exponents()))

    def rho(self, v) -> float:
        return self.rho_of_coords(self.to_eigen(v))

    def stable_part(self, v) -> np.ndarray:
        c = self.to_eigen(v)
        c[self.num_stable:] = 0.0
        return self.from_eigen(c)

    def unstable_part(self, v) -> np.ndarray:
        c = self.to_eigen(v)
        c[: self.num_stable] = 0.0
        return self.from_eigen(c)


def _unit_null_vector(a: np.ndarray, value: float) -> np.ndarray:
    n = a.shape[0]
    _, _, vt = np.linalg.svd(a - value * np.eye(n))
    v = vt[-1]
    v = v / np.linalg.norm(v)
    for x in v:
        if abs(x) > 1e-9:
            if x < 0:
                v = -v
            break
    return v


def validate_real_anosov(matrix) -> HyperbolicSplitting:
    """Validate an integer matrix and return its certified splitting.

    Raises NotUnimodular, ComplexSpectrum, NotHyperbolic, or
    RepeatedEigenvalue in that order of precedence.
    """
    m = _int_matrix(matrix)
    n = m.shape[0]

    det = exact_determinant(m)
    if det not in (1, -1):
        raise NotUnimodular(f"determinant is {det}, expected +-1")

    coeffs = characteristic_polynomial(m)
    p = tuple(Fraction(c) for c in coeffs)
    gcd = _poly_gcd(p, _poly_deriv(p))
    square_free = _poly_deg(gcd) == 0
    q = p if square_free else _poly_divmod(p, gcd)[0]

    if count_real_roots(q) < _poly_deg(q):
        raise ComplexSpectrum("characteristic polynomial has non-real roots")
    if _poly_eval(p, Fraction(1)) == 0 or _poly_eval(p, Fraction(-1)) == 0:
        raise NotHyperbolic("eigenvalue of modulus one (root at +-1)")
    if not square_free:
        raise RepeatedEigenvalue("characteristic polynomial is not squarefree")

    roots = []
    for lo, hi in isolate_real_roots(p):
        lo, hi = _refine_root(p, lo, hi)
        roots.append(float((lo + hi) / 2))
    assert len(roots) == n

    stable = sorted((r for r in roots if abs(r) < 1), key=abs)
    unstable = sorted((r for r in roots if abs(r) > 1), key=abs)
    assert stable and unstable, "unimodular real simple spectrum must straddle the circle"

    dirs = []
    for r in stable + unstable:
        v = _unit_null_vector(m.astype(float), r)
        residual = np.linalg.norm(m.astype(float) @ v - r * v)
        assert residual <= _EIGEN_RESIDUAL_TOL * max(1.0, float(np.abs(m).sum())), (
            f"eigenvector residual {residual:.3e} too large for value {r}")
        dirs.append(v)
    basis = np.column_stack(dirs)
    basis_inv = np.linalg.inv(basis)
    assert np.allclose(basis_inv @ basis, np.eye(n), atol=1e-12)

    lam = max(max(1.0 / abs(r) for r in stable), max(abs(r) for r in unstable))
    log_lam = math.log(lam)
    stable_exp = tuple(log_lam / math.log(1.0 / abs(r)) for r in stable)
    unstable_exp = tuple(log_lam / math.log(abs(r)) for r in unstable)
    exps = stable_exp + unstable_exp
    assert min(exps) >= 1.0 - 1e-12
    assert any(e == 1.0 for e in exps), "expanding factor must be attained"

    k = len(stable)
    out = HyperbolicSplitting(
        matrix=m,
        char_coeffs=coeffs,
        stable_values=tuple(stable),
        unstable_values=tuple(unstable),
        stable_dirs=basis[:, :k].copy(),
        unstable_dirs=basis[:, k:].copy(),
        expanding_factor=lam,
        stable_exponents=stable_exp,
        unstable_exponents=unstable_exp,
        basis=basis,
        basis_inv=basis_inv,
    )
    for arr in (out.matrix, out.stable_dirs, out.unstable_dirs, out.basis, out.basis_inv):
        arr.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# points and the local product structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusLeafPoint:
    """A torus point together with a chosen lift in the universal cover.

    Leaf relations (membership, displacements, brackets) are evaluated on the
    carried lifts; the linear model makes every leaf an affine subspace there.
    `eigen_coords` caches basis_inv @ lift and stays consistent with it.
    """

    splitting: HyperbolicSplitting
    lift: np.ndarray
    eigen_coords: np.ndarray

    @classmethod
    def from_lift(cls, splitting: HyperbolicSplitting, lift) -> "TorusLeafPoint":
        lift = np.array(lift, dtype=float)
        lift.flags.writeable = False
        coords = splitting.to_eigen(lift)
        coords.flags.writeable = False
        return cls(splitting, lift, coords)

    @classmethod
    def from_eigen(cls, splitting: HyperbolicSplitting, coords) -> "TorusLeafPoint":
        coords = np.array(coords, dtype=float)
        coords.flags.writeable = False
        lift = splitting.from_eigen(coords)
        lift.flags.writeable = False
        return cls(splitting, lift, coords)

    def torus_position(self) -> np.ndarray:
        return np.mod(self.lift, 1.0)

    def displaced(self, vector) -> "TorusLeafPoint":
        return TorusLeafPoint.from_lift(self.splitting, self.lift + np.asarray(vector, dtype=float))


def iterate(point: TorusLeafPoint, k: int, horizon: int = DEFAULT_ITERATE_HORIZON) -> TorusLeafPoint:
    """Apply the automorphism k times (k < 0 uses the inverse).

    Acts diagonally on eigen-coordinates: signed values to the k-th power.
    The horizon bounds |k| so coordinate magnitudes stay within double range.
    """
    if abs(k) > horizon:
        raise HorizonExceeded(f"|k| = {abs(k)} exceeds horizon {horizon}")
    values = point.splitting.signed_values()
    coords = point.eigen_coords * values ** k
    return TorusLeafPoint.from_eigen(point.splitting, coords)


def nearest_lift_displacement(x: TorusLeafPoint, y: TorusLeafPoint) -> np.ndarray:
    """The representative of y - x with sup-norm <= 1/2.

    Ties at 1/2 go to the lexicographically smallest integer offset, which
    always lands on +1/2 in each tied component.
    """
    d = y.lift - x.lift
    offset = np.ceil(d - 0.5)
    return d - offset


def bracket_torus(x: TorusLeafPoint, y: TorusLeafPoint,
                  delta0: float = DEFAULT_BRACKET_RADIUS) -> TorusLeafPoint:
    """Local product bracket: the point on x's stable leaf and y's unstable leaf.

    z = x + (stable projection of the nearest-lift displacement).  Requires
    the displacement gauge to be below delta0.
    """
    if x.splitting is not y.splitting and not np.array_equal(x.splitting.matrix, y.splitting.matrix):
        raise ValueError("points live on different systems")
    w = nearest_lift_displacement(x, y)
    gauge = x.splitting.rho(w)
    if not gauge < delta0:
        raise TooFarApart(f"displacement gauge {gauge:.6g} not below delta0 = {delta0:.6g}")
    c = x.splitting.to_eigen(w)
    c[x.splitting.num_stable:] = 0.0
    coords = x.eigen_coords + c
    return TorusLeafPoint.from_eigen(x.splitting, coords)
