"""Suspension tilings of substitution sequences and the supertile conjugacy.

A tiling is a bi-infinite sequence, a length per letter, and the position of
the origin: it lies in the tile of sequence index ``start``, a distance
``offset`` past that tile's left end.  Tiles are half-open ``[a, b)``, so a
point on a boundary belongs to the tile on its right.

Tile positions are always computed as ``lengths @ counts`` with exact integer
letter counts, never by summing floats tile by tile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, InputError, PreconditionError
from .spectral import decompose_length_change, length_difference_norms, perron_data, supertile_counts
from .symbolic import BiInfiniteSequence, Substitution

def _as_lengths(lengths, n: int) -> np.ndarray:
    arr = np.asarray(lengths, dtype=float)
    if arr.shape != (n,):
        raise InputError(f"expected {n} tile lengths, got {arr.shape}")
    if not np.all(np.isfinite(arr)) or (arr <= 0).any():
        raise InputError(f"tile lengths must be positive, got {arr.tolist()}")
    return arr


@dataclass(frozen=True, eq=False)
class Tiling:
    sequence: BiInfiniteSequence
    lengths: np.ndarray
    start: int = 0
    offset: float = 0.0

    def __repr__(self):
        return f"Tiling({self.sequence!r}, lengths={self.lengths.tolist()}, start={self.start}, offset={self.offset!r})"

    def __eq__(self, other):
        return (isinstance(other, Tiling) and self.sequence is other.sequence
                and np.array_equal(self.lengths, other.lengths)
                and self.start == other.start and self.offset == other.offset)

    def __hash__(self):
        return hash((id(self.sequence), self.lengths.tobytes(), self.start, self.offset))

    @property
    def alphabet(self):
        return self.sequence.sub.alphabet

    def letter(self, q: int) -> int:
        """Letter of the tile with sequence index ``q``."""
        return self.sequence[q]

    def position(self, q: int) -> float:
        """Left endpoint of the tile with sequence index ``q``."""
        return float(self.lengths @ self.sequence.counts(self.start, q)) - self.offset

    def translate(self, s: float) -> "Tiling":
        """The tiling moved by ``s`` (every tile shifts right by ``s``)."""
        return suspend(self.sequence, self.lengths, self.offset - s, self.start)

    def __sub__(self, s: float) -> "Tiling":
        return self.translate(-s)

    def __add__(self, s: float) -> "Tiling":
        return self.translate(s)

    def with_lengths(self, lengths) -> "Tiling":
        """Same sequence and same origin tile, origin at the same fraction of it."""
        new = _as_lengths(lengths, len(self.lengths))
        frac = self.offset / self.lengths[self.letter(self.start)]
        return Tiling(self.sequence, new, self.start, frac * new[self.letter(self.start)])


def suspend(sequence: BiInfiniteSequence, lengths, t: float = 0.0, start: int = 0) -> Tiling:
    """The point ``(u, t)`` of the suspension, in canonical form ``0 <= t < l(u_start)``."""
    lengths = _as_lengths(lengths, len(sequence.sub.alphabet))
    t = float(t)
    if not math.isfinite(t):
        raise InputError("offset must be finite")
    q0 = int(start)
    lmin = float(lengths.min())
    # largest q with (left end of tile q) <= t, by bisection on exact counts
    if t >= 0:
        lo, hi = q0, q0 + int(t / lmin) + 1
    else:
        lo, hi = q0 + int(math.floor(t / lmin)) - 1, q0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if float(lengths @ sequence.counts(q0, mid)) <= t:
            lo = mid
        else:
            hi = mid - 1
    q = lo
    t -= float(lengths @ sequence.counts(q0, q))
    # exact recomputation can land a hair outside the tile; settle by one step
    while t < 0:
        q -= 1
        t += float(lengths[sequence[q]])
    while t >= lengths[sequence[q]]:
        t -= float(lengths[sequence[q]])
        q += 1
    return Tiling(sequence, lengths, q, t + 0.0)  # no -0.0


def canonical_tiling(sub: Substitution, lengths=None, t: float = 0.0) -> Tiling:
    """The suspension of the substitution's bi-infinite fixed point."""
    seq = BiInfiniteSequence(sub)
    if lengths is None:
        lengths = np.ones(len(sub.alphabet))
    return suspend(seq, lengths, t)


@dataclass(frozen=True)
class TileInfo:
    index: int
    letter: int
    interval: tuple


def tile_at(tiling: Tiling, x: float) -> TileInfo:
    """The tile ``[a, b)`` containing ``x``; ``index`` is relative to the origin tile."""
    x = float(x)
    moved = suspend(tiling.sequence, tiling.lengths, tiling.offset + x, tiling.start)
    a = x - moved.offset
    b = a + float(tiling.lengths[moved.letter(moved.start)])
    return TileInfo(moved.start - tiling.start, moved.letter(moved.start), (a, b))


def _agreement_ok(t1: Tiling, t2: Tiling, shift: int, eps: float, max_tiles: int) -> bool:
    """Do the tiles of ``t1`` meeting [-1/eps, 1/eps] match ``t2`` (index + shift) within eps?"""
    radius = 1.0 / eps
    lo = tile_at(t1, -radius).index + t1.start
    hi = tile_at(t1, radius).index + t1.start + 1
    if hi - lo > max_tiles:
        return False
    base1 = t1.position(t1.start)
    base2 = t2.position(t1.start + shift)
    if t1.sequence is t2.sequence and shift == 0:
        if np.array_equal(t1.lengths, t2.lengths):
            return abs(base1 - base2) <= eps
        letters = t1.sequence.window(lo, hi)
        same = True
    else:
        letters = t1.sequence.window(lo, hi)
        other = t2.sequence.window(lo + shift, hi + shift)
        same = np.array_equal(letters, other)
        if not same:
            return False
    # endpoint drift relative to the origin tile, via prefix sums of length differences
    diff = (t1.lengths - t2.lengths)[letters]
    k0 = t1.start - lo
    drift = np.concatenate(([0.0], np.cumsum(diff)))
    drift = drift - drift[k0] + (base1 - base2)
    return bool(np.abs(drift).max() <= eps)


def _close(t1: Tiling, t2: Tiling, eps: float, max_tiles: int) -> bool:
    if eps >= 1.0:
        return True
    if eps <= 0.0:
        return False
    info = tile_at(t1, 0.0)
    x0 = info.interval[0]
    shifts = []
    for j in range(-2, 3):
        q2 = t2.start + j
        if abs(t2.position(q2) - x0) <= eps + 1e-15:
            shifts.append(q2 - t1.start)
    # tiles of both tilings meeting the window must be matched
    return any(_agreement_ok(t1, t2, s, eps, max_tiles) and _agreement_ok(t2, t1, -s, eps, max_tiles)
               for s in shifts)


def tiling_distance(t1: Tiling, t2: Tiling, grid: Sequence[float] | None = None,
                    max_tiles: int = 2_000_000) -> float:
    """Least ``eps`` such that the tilings agree on ``[-1/eps, 1/eps]`` up to ``eps``.

    Agreement means the tiles meeting the window correspond one to one with
    equal labels and every pair of corresponding endpoints within ``eps``.
    The answer is capped at 1.  With ``grid`` the search is restricted to the
    given values; otherwise it is bisected to relative precision 1e-4.
    Windows longer than ``max_tiles`` tiles count as not verified.
    """
    if t1.alphabet != t2.alphabet:
        raise InputError("tilings use different alphabets")
    gap = math.inf
    if t1.sequence is t2.sequence and np.array_equal(t1.lengths, t2.lengths):
        gap = abs(t1.position(t1.start) - t2.position(t1.start))
    # index-aligned shift is the only match once it is below half a tile
    if gap < min(t1.lengths.min() / 2, 1.0):
        if grid is None:
            return min(gap, 1.0)
        ok = [g for g in sorted(grid) if g >= gap]
        return min(ok[0], 1.0) if ok else 1.0
    if grid is not None:
        values = sorted(g for g in grid if 0 < g < 1.0)
        lo, hi = 0, len(values)
        while lo < hi:
            mid = (lo + hi) // 2
            if _close(t1, t2, values[mid], max_tiles):
                hi = mid
            else:
                lo = mid + 1
        return values[lo] if lo < len(values) else 1.0
    lo, hi = 1.0 / max_tiles, 1.0
    if _close(t1, t2, lo, max_tiles):
        return lo
    while hi / lo > 1.0 + 1e-4:
        mid = math.sqrt(lo * hi)
        if _close(t1, t2, mid, max_tiles):
            hi = mid
        else:
            lo = mid
    return hi


@lru_cache(maxsize=4096)
def _supertile_counts(sub: Substitution, letter: int, level: int) -> tuple:
    return tuple(int(c) for c in supertile_counts(sub, letter, level))


@dataclass(frozen=True)
class SupertileAddress:
    """The level-``level`` supertile containing the origin.

    ``span`` is its interval and ``fraction`` the origin's relative position
    in it.  ``anchor_index`` is whichever endpoint index (start or one past
    the end) lies nearer the origin and ``anchor_offset`` is the origin's
    signed distance from it; positions are derived from the anchor so a huge
    supertile never needs its far end materialized.
    """

    level: int
    start_index: int
    seed_letter: int
    fraction: float
    span: tuple
    letter_length: int
    counts: tuple = field(repr=False)
    anchor_index: int = 0
    anchor_offset: float = 0.0


def _desubstituted(seq: BiInfiniteSequence, level: int) -> BiInfiniteSequence:
    cache = seq.__dict__.setdefault("_desub_cache", {})
    r = level % seq.seed.power
    if r not in cache:
        cache[r] = seq.desubstituted(r)
    return cache[r]


def supertile_address(tiling: Tiling, level: int) -> SupertileAddress:
    """The level-``level`` supertile whose span contains the origin.

    The level-n supertiles of a sigma^k fixed point ``u`` are the blocks
    ``sigma^n(v_i)`` of ``u = sigma^n(v)``, with block ``v_0`` starting at
    index 0.
    """
    if level < 0:
        raise InputError("level must be nonnegative")
    seq = tiling.sequence
    sub = seq.sub
    if level == 0:
        q = tiling.start
        letter = tiling.letter(q)
        a = -tiling.offset
        b = a + float(tiling.lengths[letter])
        counts = tuple(1 if i == letter else 0 for i in range(len(sub.alphabet)))
        return SupertileAddress(0, q, letter, (0.0 - a) / (b - a), (a, b), 1, counts, q, tiling.offset)
    v = _desubstituted(seq, level)
    sizes = [sum(_supertile_counts(sub, x, level)) for x in range(len(sub.alphabet))]

    def begin(i):
        # first sequence index of supertile i
        return sum(int(c) * n for c, n in zip(v.counts(0, i), sizes))

    target = tiling.start
    lo, hi = min(target, 0), max(target, 0)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if begin(mid) <= target:
            lo = mid
        else:
            hi = mid - 1
    i = lo
    s = begin(i)
    c = _supertile_counts(sub, v[i], level)
    size = sum(c)
    big = float(tiling.lengths @ np.asarray(c, dtype=float))
    if target - s <= s + size - target:
        anchor = s
        a = tiling.position(s)
        b = a + big
        dist = -a
    else:
        anchor = s + size
        b = tiling.position(anchor)
        a = b - big
        dist = -b
    return SupertileAddress(level, s, v[i], (0.0 - a) / big, (a, b), size, c, anchor, dist)


def psi_n(tiling: Tiling, new_lengths, level: int) -> Tiling:
    """Same sequence with lengths ``new_lengths``; the origin keeps its fraction
    across the level-``level`` supertile containing it."""
    new = _as_lengths(new_lengths, len(tiling.lengths))
    addr = supertile_address(tiling, level)
    counts = np.asarray(addr.counts, dtype=float)
    ratio = float(new @ counts) / float(tiling.lengths @ counts)
    # distance from the nearer endpoint scales with the supertile
    return suspend(tiling.sequence, new, addr.anchor_offset * ratio, addr.anchor_index)


def translation_gap(t1: Tiling, t2: Tiling) -> float:
    """Translation taking ``t1`` to ``t2`` (same sequence and lengths)."""
    if t1.sequence is not t2.sequence or not np.array_equal(t1.lengths, t2.lengths):
        raise InputError("translation gap needs tilings of one sequence with equal lengths")
    q = min(t1.start, t2.start)
    return t2.position(q) - t1.position(q)


@dataclass
class ConjugacyTrace:
    scale: float
    target_lengths: np.ndarray
    decay_rate: float
    levels: list
    converged: bool
    converged_level: int | None = None
    limit: Tiling | None = None

    @property
    def gaps(self) -> np.ndarray:
        return np.array([g for _, _, _, g in self.levels])

    def fitted_rate(self, lo: int = 5, hi: int = 15) -> float:
        """Geometric rate from a least-squares fit of log(gap) on level."""
        pts = [(n, g) for n, _, _, g in self.levels if lo <= n <= hi and g > 0]
        if len(pts) < 2:
            return math.nan
        ns, gs = zip(*pts)
        return float(math.exp(np.polyfit(ns, np.log(gs), 1)[0]))

    def rows(self):
        for n, start, offset, gap in self.levels:
            yield n, start, offset, gap


def displacement_bounds(sub: Substitution, delta, rate: float, levels: int) -> np.ndarray:
    """A priori bounds ``g_n >= |psi_(n+1)(T) - psi_n(T)|`` valid for every tiling ``T``.

    With ``E_n = max_a |(delta @ M**n)_a|`` (the largest level-n supertile
    length change) and ``K`` the longest image, moving from level n to n+1
    changes the origin's supertile by at most ``E_(n+1)`` plus ``K`` level-n
    supertiles, so ``g_n = K * E_n + E_(n+1)``.
    """
    e = length_difference_norms(delta, sub.incidence, levels + 1, rate)
    k = max(len(r) for r in sub.rules)
    return k * e[:-1] + e[1:]


def _tail_sums(g: np.ndarray, rate: float) -> np.ndarray:
    """``sum_(m >= n) g_m``, closing the series geometrically past the last level."""
    rest = g[-1] * rate / (1.0 - rate) if 0 < rate < 1 else 0.0
    return np.cumsum(g[::-1])[::-1] + rest


def conjugacy(tiling: Tiling, new_lengths, tolerance: float = 1e-9, max_level: int = 60,
              min_level: int = 0) -> ConjugacyTrace:
    """Iterate ``psi_n`` until the limit is pinned down to within ``tolerance``.

    ``new_lengths`` is first divided by the scale ``c`` of its decomposition
    (mean matching), so the limit is a conjugacy between translation actions.
    Level ``n`` counts as converged when its observed gap is below
    ``tolerance`` and the a priori bound on all later gaps sums to at most
    ``tolerance``.  Observed gaps alone are not enough: at supertile
    boundaries they vanish for several levels before the origin moves.
    """
    sub = tiling.sequence.sub
    spec = perron_data(sub)
    dec = decompose_length_change(tiling.lengths, new_lengths, spec)
    if not dec.contracting:
        raise PreconditionError(
            f"length change is {dec.status.value}: delta is supported on eigenvalue modulus {dec.decay_rate:.12g}"
        )
    target = _as_lengths(new_lengths, len(tiling.lengths)) / dec.scale
    delta = target - tiling.lengths
    horizon = max_level + 64
    tails = _tail_sums(displacement_bounds(sub, delta, dec.decay_rate, horizon), dec.decay_rate)
    levels = []
    current = psi_n(tiling, target, 0)
    for n in range(max_level + 1):
        nxt = psi_n(tiling, target, n + 1)
        gap = abs(translation_gap(current, nxt))
        levels.append((n, current.start, current.offset, gap))
        if n >= min_level and gap < tolerance and tails[n + 1] <= tolerance:
            return ConjugacyTrace(dec.scale, target, dec.decay_rate, levels, True, n, nxt)
        current = nxt
    err = ConvergenceError(
        f"psi_n did not settle below {tolerance:g} by level {max_level} (last gap {levels[-1][3]:.3e}, "
        f"remaining bound {tails[max_level + 1]:.3e})",
        history=[g for *_, g in levels],
    )
    err.trace = ConjugacyTrace(dec.scale, target, dec.decay_rate, levels, False)
    raise err


def conjugate(tiling: Tiling, new_lengths, tolerance: float = 1e-9, max_level: int = 60) -> Tiling:
    """The limit tiling ``psi(tiling)``."""
    return conjugacy(tiling, new_lengths, tolerance, max_level).limit


def equivariance_residuals(tiling: Tiling, new_lengths, shifts, tolerance: float = 1e-9,
                           max_level: int = 60) -> np.ndarray:
    """``d(psi(T - s), psi(T) - s)`` for each shift ``s``."""
    base = conjugate(tiling, new_lengths, tolerance, max_level)
    out = []
    for s in shifts:
        moved = conjugate(tiling - s, new_lengths, tolerance, max_level)
        out.append(tiling_distance(moved, base - s))
    return np.array(out)


@dataclass(frozen=True)
class EnsembleGaps:
    levels: np.ndarray
    mean_gaps: np.ndarray
    points: int
    scale: float
    decay_rate: float

    def ratios(self) -> np.ndarray:
        return self.mean_gaps[1:] / self.mean_gaps[:-1]

    def fitted_rate(self, lo: int = 5, hi: int = 15) -> float:
        sel = (self.levels >= lo) & (self.levels <= hi) & (self.mean_gaps > 0)
        if sel.sum() < 2:
            return math.nan
        return float(math.exp(np.polyfit(self.levels[sel], np.log(self.mean_gaps[sel]), 1)[0]))


def ensemble_gaps(sub: Substitution, lengths, new_lengths, points: int = 1000, max_level: int = 16,
                  span: tuple = (1e5, 1e6), sequence: BiInfiniteSequence | None = None) -> EnsembleGaps:
    """Mean of ``|psi_(n+1)(T) - psi_n(T)|`` over tilings ``T`` spread along the fixed point.

    Along a single orbit the gaps are not geometric: a type whose level-n+1
    supertile is a single level-n supertile gives an exact zero, and points
    near the seed fall into a faster tail regime.  Averaged over points whose
    origins are far from the seed (positions of a Kronecker sequence in
    ``span``), the mean gap decays at the rate of the length change.
    """
    seq = sequence if sequence is not None else BiInfiniteSequence(sub)
    l0 = _as_lengths(lengths, len(sub.alphabet))
    dec = decompose_length_change(l0, new_lengths, perron_data(sub))
    if not dec.contracting:
        raise PreconditionError(f"length change is {dec.status.value} (modulus {dec.decay_rate:.12g})")
    target = _as_lengths(new_lengths, len(l0)) / dec.scale
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = span
    total = np.zeros(max_level + 1)
    for j in range(points):
        x = lo + ((j + 1) * golden % 1.0) * (hi - lo)
        t = suspend(seq, l0, x)
        prev = psi_n(t, target, 0)
        for n in range(max_level + 1):
            nxt = psi_n(t, target, n + 1)
            total[n] += abs(translation_gap(prev, nxt))
            prev = nxt
    return EnsembleGaps(np.arange(max_level + 1), total / points, points, dec.scale, dec.decay_rate)
