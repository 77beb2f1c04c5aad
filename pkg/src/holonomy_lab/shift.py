"""Subshifts of finite type with exact rational distance arithmetic.

Points are bi-infinite admissible symbol sequences that are eventually
periodic in both directions, stored as (left tail, core word, right tail)
with the core occupying an explicit coordinate window.  All distances are
Fractions: d(x, y) = lam^-N with N the smallest |k| where the sequences
disagree, so identities like d(shift^k x, shift^k y) = lam^-k d(x, y) can be
checked with zero tolerance.

The serialization format is "leftTail|core@offset|rightTail", e.g.
"0|01@-1|1" for ...000 0 1 111... with the core "01" at coordinates -1, 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import HolonomyLabError, NotSameLeaf, TooFarApart

_SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"

STABLE = "stable"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class ShiftSpace:
    """Alphabet plus 0/1 adjacency; lam is the exact metric base."""

    alphabet_size: int
    adjacency: tuple[tuple[int, ...], ...]
    lam: Fraction = Fraction(2)

    def __post_init__(self):
        n = self.alphabet_size
        if not 2 <= n <= len(_SYMBOLS):
            raise ValueError(f"alphabet size must be in [2, {len(_SYMBOLS)}]")
        if len(self.adjacency) != n or any(len(r) != n for r in self.adjacency):
            raise ValueError("adjacency must be alphabet_size x alphabet_size")
        if any(v not in (0, 1) for r in self.adjacency for v in r):
            raise ValueError("adjacency entries must be 0 or 1")
        if any(sum(r) == 0 for r in self.adjacency):
            raise ValueError("adjacency has an all-zero row")
        if any(sum(r[j] for r in self.adjacency) == 0 for j in range(n)):
            raise ValueError("adjacency has an all-zero column")
        if not self.lam > 1:
            raise ValueError("lam must exceed 1")

    @classmethod
    def full(cls, alphabet_size: int, lam: Fraction | int = 2) -> "ShiftSpace":
        row = tuple([1] * alphabet_size)
        return cls(alphabet_size, tuple([row] * alphabet_size), Fraction(lam))

    @classmethod
    def golden_mean(cls, lam: Fraction | int = 2) -> "ShiftSpace":
        """Two symbols, the word "11" forbidden."""
        return cls(2, ((1, 1), (1, 0)), Fraction(lam))

    def admits(self, a: str, b: str) -> bool:
        return bool(self.adjacency[_SYMBOLS.index(a)][_SYMBOLS.index(b)])

    def symbol(self, i: int) -> str:
        return _SYMBOLS[i]


def _primitive(word: str) -> str:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[:p] * (n // p):
            return word[:p]
    return word


def _rot_left(word: str) -> str:
    return word[1:] + word[0]


def _rot_right(word: str) -> str:
    return word[-1] + word[:-1]


@dataclass(frozen=True)
class ShiftPoint:
    """One eventually periodic bi-infinite sequence.

    Coordinates below `start` follow `left` repeated leftward (phase tied to
    `start`), the core occupies [start, start + len(core) - 1], and
    coordinates after it follow `right` repeated rightward.  Construction
    normalizes: primitive tails, maximally shrunk core, and for an empty core
    the boundary slides toward zero where both tails agree.
    """

    space: ShiftSpace
    left: str
    core: str
    start: int
    right: str

    @classmethod
    def make(cls, space: ShiftSpace, left: str, core: str, start: int, right: str) -> "ShiftPoint":
        if not left or not right:
            raise ValueError("periodic tails must be nonempty")
        for w in (left, core, right):
            for ch in w:
                if _SYMBOLS.index(ch) >= space.alphabet_size:
                    raise ValueError(f"symbol {ch!r} outside alphabet")
        left, core, start, right = _normalize(left, core, start, right)
        pt = cls(space, left, core, start, right)
        _check_admissible(pt)
        return pt

    @classmethod
    def constant(cls, space: ShiftSpace, symbol: str) -> "ShiftPoint":
        return cls.make(space, symbol, "", 0, symbol)

    # -- raw access ---------------------------------------------------------

    @property
    def core_end(self) -> int:
        """First coordinate after the core."""
        return self.start + len(self.core)

    def symbol_at(self, k: int) -> str:
        if k < self.start:
            return self.left[(k - self.start) % len(self.left)]
        if k < self.core_end:
            return self.core[k - self.start]
        return self.right[(k - self.core_end) % len(self.right)]

    def window(self, a: int, b: int) -> str:
        """Symbols at coordinates a..b inclusive, as one string."""
        if b < a:
            return ""
        parts = []
        k = a
        if k < self.start:
            span = min(b + 1, self.start) - k
            phase = (k - self.start) % len(self.left)
            reps = self.left * (2 + (phase + span) // len(self.left))
            parts.append(reps[phase: phase + span])
            k += span
        if k <= b and k < self.core_end:
            hi = min(b + 1, self.core_end)
            parts.append(self.core[k - self.start: hi - self.start])
            k = hi
        if k <= b:
            span = b + 1 - k
            phase = (k - self.core_end) % len(self.right)
            reps = self.right * (2 + (phase + span) // len(self.right))
            parts.append(reps[phase: phase + span])
        return "".join(parts)

    def to_string(self) -> str:
        return f"{self.left}|{self.core}@{self.start}|{self.right}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShiftPoint):
            return NotImplemented
        return points_equal(self, other)

    def __hash__(self):
        return hash((self.left, self.core, self.start, self.right))


def parse_point(space: ShiftSpace, text: str) -> ShiftPoint:
    try:
        left, mid, right = text.split("|")
        core, offset = mid.split("@")
        return ShiftPoint.make(space, left, core, int(offset), right)
    except ValueError as exc:
        raise ValueError(f"cannot parse shift point {text!r}: {exc}") from exc


def _normalize(left, core, start, right):
    left = _primitive(left)
    right = _primitive(right)
    while core and core[-1] == right[-1]:
        core = core[:-1]
        right = _rot_right(right)
    while core and core[0] == left[0]:
        core = core[1:]
        left = _rot_left(left)
        start += 1
    if not core:
        # slide the tail boundary toward zero where the descriptions agree;
        # both tails are phased off the boundary, so both rotate per step
        while start > 0 and left[-1] == right[-1]:
            left = _rot_right(left)
            right = _rot_right(right)
            start -= 1
        while start < 0 and right[0] == left[0]:
            left = _rot_left(left)
            right = _rot_left(right)
            start += 1
    return left, core, start, right


def _check_admissible(pt: ShiftPoint) -> None:
    space = pt.space
    # cyclic tail transitions plus everything near the core, seams included
    for word in (pt.left, pt.right):
        for a, b in zip(word, word[1:] + word[0]):
            if not space.admits(a, b):
                raise ValueError(f"inadmissible tail transition {a!r}->{b!r}")
    lo = pt.start - len(pt.left) - 1
    hi = pt.core_end + len(pt.right)
    win = pt.window(lo, hi)
    for a, b in zip(win, win[1:]):
        if not space.admits(a, b):
            raise ValueError(f"inadmissible transition {a!r}->{b!r} near core")


def points_equal(x: ShiftPoint, y: ShiftPoint) -> bool:
    if x.space.alphabet_size != y.space.alphabet_size:
        return False
    lo, hi = _scan_bounds(x, y)
    return x.window(lo, hi) == y.window(lo, hi)


def _scan_bounds(x: ShiftPoint, y: ShiftPoint) -> tuple[int, int]:
    """Window outside which any disagreement would already show inside."""
    right0 = max(x.core_end, y.core_end, 0)
    left0 = min(x.start, y.start, 0)
    lcm_r = math.lcm(len(x.right), len(y.right))
    lcm_l = math.lcm(len(x.left), len(y.left))
    return left0 - lcm_l, right0 + lcm_r - 1


def first_difference_forward(x: ShiftPoint, y: ShiftPoint, a: int) -> int | None:
    """Least k >= a with x_k != y_k, or None when they agree on [a, inf)."""
    lo, hi = _scan_bounds(x, y)
    hi = max(hi, a + math.lcm(len(x.right), len(y.right)) - 1)
    wx, wy = x.window(a, hi), y.window(a, hi)
    if wx == wy:
        return None
    for i, (s, t) in enumerate(zip(wx, wy)):
        if s != t:
            return a + i
    raise AssertionError("unreachable")


def first_difference_backward(x: ShiftPoint, y: ShiftPoint, b: int) -> int | None:
    """Greatest k <= b with x_k != y_k, or None when they agree on (-inf, b]."""
    lo, hi = _scan_bounds(x, y)
    lo = min(lo, b - math.lcm(len(x.left), len(y.left)) + 1)
    wx, wy = x.window(lo, b), y.window(lo, b)
    if wx == wy:
        return None
    for i in range(len(wx) - 1, -1, -1):
        if wx[i] != wy[i]:
            return lo + i
    raise AssertionError("unreachable")


def base_distance(x: ShiftPoint, y: ShiftPoint) -> Fraction:
    """Exact lam^-N with N = min{|k| : x_k != y_k}; zero for equal points."""
    r = first_difference_forward(x, y, 0)
    l = first_difference_backward(x, y, -1)
    if r is None and l is None:
        return Fraction(0)
    n = min(r if r is not None else math.inf, -l if l is not None else math.inf)
    return x.space.lam ** (-int(n))


def shift_iterate(x: ShiftPoint, k: int) -> ShiftPoint:
    """k-th power of the left shift: (shift^k x)_i = x_{i+k}."""
    return ShiftPoint(x.space, x.left, x.core, x.start - k, x.right)


def bracket_shift(x: ShiftPoint, y: ShiftPoint) -> ShiftPoint:
    """Splice: x's future (k >= 0) with y's past (k < 0).

    Requires base_distance(x, y) <= lam^-1, i.e. x_0 = y_0, which also makes
    the spliced sequence admissible across the seam.
    """
    if base_distance(x, y) > x.space.lam ** -1:
        raise TooFarApart("points differ at coordinate 0; no local product")
    lo = min(y.start, -1)
    hi = max(x.core_end - 1, 0)
    win = y.window(lo, -1) + x.window(0, hi)
    left = y.left
    if lo < y.start:  # re-phase y's left tail to the new core start
        shift = (lo - y.start) % len(left)
        left = left[shift:] + left[:shift]
    right = x.right
    if hi + 1 > x.core_end:
        shift = (hi + 1 - x.core_end) % len(right)
        right = right[shift:] + right[:shift]
    return ShiftPoint.make(x.space, left, win, lo, right)


def _stable_last_difference(y: ShiftPoint, z: ShiftPoint) -> int | None:
    lo, hi = _scan_bounds(y, z)
    if y.window(hi + 1 - math.lcm(len(y.right), len(z.right)), hi) != \
       z.window(hi + 1 - math.lcm(len(y.right), len(z.right)), hi):
        raise NotSameLeaf("right tails disagree; not on one stable leaf")
    return first_difference_backward(y, z, hi)


def _unstable_first_difference(y: ShiftPoint, z: ShiftPoint) -> int | None:
    lo, hi = _scan_bounds(y, z)
    if y.window(lo, lo + math.lcm(len(y.left), len(z.left)) - 1) != \
       z.window(lo, lo + math.lcm(len(y.left), len(z.left)) - 1):
        raise NotSameLeaf("left tails disagree; not on one unstable leaf")
    return first_difference_forward(y, z, lo)


def n_first_iterate(y: ShiftPoint, z: ShiftPoint, direction: str = STABLE) -> int:
    """Least n >= 0 after which the pair sits inside one local leaf.

    Stable: shift^n z agrees with shift^n y on all k >= 0, i.e. n is one past
    the last disagreement.  Unstable uses backward shifts and the symmetric
    condition on k <= 0.
    """
    if direction == STABLE:
        last = _stable_last_difference(y, z)
        return 0 if last is None else max(0, last + 1)
    if direction == UNSTABLE:
        first = _unstable_first_difference(y, z)
        return 0 if first is None else max(0, 1 - first)
    raise HolonomyLabError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# admissible sampling (audit plumbing; rng is a numpy Generator)
# ---------------------------------------------------------------------------

def _successors(space: ShiftSpace, s: int) -> list[int]:
    return [t for t in range(space.alphabet_size) if space.adjacency[s][t]]


def _predecessors(space: ShiftSpace, s: int) -> list[int]:
    return [t for t in range(space.alphabet_size) if space.adjacency[t][s]]


def random_point(space: ShiftSpace, rng, span: int = 3) -> ShiftPoint:
    """Random admissible eventually-periodic point, core around the origin.

    Walks an admissible path through the window, then keeps walking outward
    on each side until a symbol repeats; the chunk between the repeats is an
    admissible cycle and becomes the tail (pigeonhole: at most |A|+1 steps).
    """
    n = space.alphabet_size
    core = [int(rng.integers(0, n))]
    for _ in range(2 * span):
        succ = _successors(space, core[-1])
        core.append(succ[int(rng.integers(0, len(succ)))])

    ext_r: list[int] = []
    seen: dict[int, int] = {}
    cur = core[-1]
    while True:
        succ = _successors(space, cur)
        cur = succ[int(rng.integers(0, len(succ)))]
        if cur in seen:
            idx = seen[cur]
            core += ext_r[:idx]
            cyc_r = ext_r[idx:]
            break
        seen[cur] = len(ext_r)
        ext_r.append(cur)

    ext_l: list[int] = []
    seen = {}
    cur = core[0]
    while True:
        pred = _predecessors(space, cur)
        cur = pred[int(rng.integers(0, len(pred)))]
        if cur in seen:
            idx = seen[cur]
            pad_l = ext_l[:idx]
            cyc_l = ext_l[idx:]
            break
        seen[cur] = len(ext_l)
        ext_l.append(cur)

    word = "".join(_SYMBOLS[s] for s in reversed(pad_l)) + \
        "".join(_SYMBOLS[s] for s in core)
    left = "".join(_SYMBOLS[s] for s in reversed(cyc_l))
    right = "".join(_SYMBOLS[s] for s in cyc_r)
    return ShiftPoint.make(space, left, word, -(span + len(pad_l)), right)


def resample_window(space: ShiftSpace, pt: ShiftPoint, lo: int, hi: int, rng) -> ShiftPoint:
    """Uniform admissible re-fill of coordinates lo..hi, everything else kept.

    Counts bridges between the flanking symbols by dynamic programming and
    samples one symbol at a time with those weights.  The original word is
    always one of the bridges, so at least one exists.
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    n = space.alphabet_size
    length = hi - lo + 1
    prev = _SYMBOLS.index(pt.symbol_at(lo - 1))
    nxt = _SYMBOLS.index(pt.symbol_at(hi + 1))
    counts = [[0] * n for _ in range(length)]
    for s in range(n):
        counts[length - 1][s] = 1 if space.adjacency[s][nxt] else 0
    for j in range(length - 2, -1, -1):
        for s in range(n):
            counts[j][s] = sum(counts[j + 1][t] for t in _successors(space, s))
    word: list[int] = []
    cur = prev
    for j in range(length):
        choices = [t for t in _successors(space, cur) if counts[j][t] > 0]
        weights = [counts[j][t] for t in choices]
        total = sum(weights)
        assert total > 0, "original word witnesses at least one bridge"
        pick = int(rng.integers(0, total))
        acc = 0
        for t, w in zip(choices, weights):
            acc += w
            if pick < acc:
                cur = t
                break
        word.append(cur)

    a = min(lo, pt.start)
    b = max(hi, pt.core_end - 1)
    chars = list(pt.window(a, b))
    chars[lo - a:hi - a + 1] = [_SYMBOLS[s] for s in word]
    left = pt.left
    if a < pt.start:
        shift = (a - pt.start) % len(left)
        left = left[shift:] + left[:shift]
    right = pt.right
    if b + 1 > pt.core_end:
        shift = (b + 1 - pt.core_end) % len(right)
        right = right[shift:] + right[:shift]
    return ShiftPoint.make(space, left, "".join(chars), a, right)
