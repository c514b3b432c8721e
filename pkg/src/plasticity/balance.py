"""Balance profiles, discrepancy series, collaring and the Thue-Morse adversary.

Occurrences of a word ``w`` inside a window of length ``n`` are counted by
start position, and only starts ``p`` with ``p + |w| <= n`` count: there are
no partial occurrences hanging over the window's edge.  For letters this is
the plain letter count.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import symbolic
from .errors import ConsistencyError, InputError, LimitError
from .symbolic import Alphabet, Substitution, Word, count_occurrences, factor_array


class Growth(str, enum.Enum):
    BOUNDED_OBSERVED = "BOUNDED_OBSERVED"
    GROWTH_OBSERVED = "GROWTH_OBSERVED"


@dataclass(frozen=True)
class BalanceProfile:
    target: Word
    n: np.ndarray
    minima: np.ndarray
    maxima: np.ndarray
    one_sided: bool = False
    alphabet: Alphabet | None = field(default=None, compare=False)

    @property
    def balance(self) -> np.ndarray:
        return self.maxima - self.minima

    @property
    def observed_constant(self) -> int:
        return int(self.balance.max()) if len(self.n) else 0

    def rows(self):
        for n, lo, hi in zip(self.n, self.minima, self.maxima):
            yield int(n), int(lo), int(hi), int(hi - lo)

    def row(self, n: int):
        i = int(n) - int(self.n[0])
        if not 0 <= i < len(self.n):
            raise InputError(f"n={n} outside profile range")
        return int(self.minima[i]), int(self.maxima[i]), int(self.balance[i])

    def label(self) -> str:
        if self.alphabet is None:
            return " ".join(map(str, self.target))
        return self.alphabet.render(self.target)


def _occurrence_matrix(rows: np.ndarray, target: Sequence[int]) -> np.ndarray:
    k = len(target)
    width = rows.shape[1] - k + 1
    occ = np.ones((rows.shape[0], width), dtype=bool)
    for j, letter in enumerate(target):
        occ &= rows[:, j:j + width] == letter
    return occ


def _profile_from_factors(sub: Substitution, target: Word, n_max: int) -> BalanceProfile:
    k = len(target)
    if not symbolic.is_factor(sub, target):
        raise InputError(f"target {sub.alphabet.render(target)!r} is not in the language")
    # every factor is right-extendable, so length-n factors are exactly the
    # length-n prefixes of the length-n_max factors
    rows = factor_array(sub, n_max)
    cum = np.cumsum(_occurrence_matrix(rows, target), axis=1, dtype=np.int64)
    n = np.arange(k, n_max + 1)
    return BalanceProfile(target, n, cum.min(axis=0), cum.max(axis=0), False, sub.alphabet)


def _window_counts(word: np.ndarray, target: Sequence[int]):
    k = len(target)
    occ = _occurrence_matrix(word[None, :], target)[0]
    return np.concatenate(([0], np.cumsum(occ, dtype=np.int64))), k


def _profile_from_word(word, target: Word, n_max: int, alphabet) -> BalanceProfile:
    word = np.asarray(word, dtype=np.int64)
    if n_max > len(word):
        raise InputError(f"n_max={n_max} exceeds the word length {len(word)}")
    cum, k = _window_counts(word, target)
    if cum[-1] == 0:
        raise InputError("target does not occur in the given word")
    length = len(word)
    n = np.arange(k, n_max + 1)
    lo = np.empty(len(n), dtype=np.int64)
    hi = np.empty(len(n), dtype=np.int64)
    for idx, m in enumerate(n):
        counts = cum[m - k + 1: length - k + 2] - cum[: length - m + 1]
        lo[idx] = counts.min()
        hi[idx] = counts.max()
    return BalanceProfile(target, n, lo, hi, True, alphabet)


def balance_profile(source, target, n_max: int, alphabet: Alphabet | None = None) -> BalanceProfile:
    """Min/max/spread of occurrences of ``target`` over length-n windows.

    ``source`` is a primitive substitution (exact, over the whole language)
    or an explicit long word (windows of that word only; the profile is
    flagged ``one_sided`` since it bounds the language from one side).
    """
    if isinstance(source, Substitution):
        alphabet = source.alphabet
    if isinstance(target, str):
        if alphabet is None:
            raise InputError("a string target needs an alphabet")
        target = alphabet.word(target)
    target = tuple(int(x) for x in target)
    if not target:
        raise InputError("target must be non-empty")
    if n_max < len(target):
        raise InputError(f"n_max={n_max} shorter than target")
    if isinstance(source, Substitution):
        source.require_primitive()
        return _profile_from_factors(source, target, n_max)
    return _profile_from_word(source, target, n_max, alphabet)


def letter_profiles(source, n_max: int, alphabet: Alphabet | None = None) -> list:
    if isinstance(source, Substitution):
        alphabet = source.alphabet
    return [balance_profile(source, (i,), n_max, alphabet) for i in range(len(alphabet))]


def word_balance_growth(sub: Substitution, target, n_list) -> list:
    """``(n, B_w(n))`` sampled at the given window lengths."""
    ns = sorted({int(n) for n in n_list})
    prof = balance_profile(sub, target, ns[-1])
    return [(n, prof.row(n)[2]) for n in ns]


def classify_growth(n: Sequence[int], balance: Sequence[int], ratio: float = 16.0):
    """Decide BOUNDED_OBSERVED vs GROWTH_OBSERVED from a balance profile.

    Growth is reported when the running maximum of the balance at the
    largest tested length exceeds its value at ``n_max / ratio``: the
    balance was still climbing over the last ``ratio``-fold stretch of
    window lengths.  Logarithmic growth (Thue-Morse words climb by one
    roughly every 16-fold increase of n) is caught with the default ratio.
    Also returns the least-squares slope of the running maximum against
    ``log2 n`` as a fitted growth rate.
    """
    n = np.asarray(n, dtype=float)
    b = np.asarray(balance, dtype=float)
    if len(n) == 0:
        return Growth.BOUNDED_OBSERVED, 0.0
    running = np.maximum.accumulate(b)
    cut = np.searchsorted(n, n[-1] / ratio, side="right") - 1
    earlier = running[cut] if cut >= 0 else 0.0
    verdict = Growth.GROWTH_OBSERVED if running[-1] > earlier else Growth.BOUNDED_OBSERVED
    slope = float(np.polyfit(np.log2(n), running, 1)[0]) if len(n) >= 2 else 0.0
    return verdict, slope


@dataclass(frozen=True)
class DiscrepancySeries:
    target: Word
    frequency: float
    values: np.ndarray

    @property
    def sup_abs(self) -> float:
        return float(np.abs(self.values).max())


def discrepancy_series(prefix, target, frequency: float) -> DiscrepancySeries:
    """Partial integrals ``D(N)`` of the indicator-minus-frequency cochain.

    ``D(N) = #occurrences of target starting in [0, N - |target|] - (N - |target| + 1)^+ * f``,
    pinned to ``D(0) = 0``.
    """
    if not 0.0 <= frequency <= 1.0:
        raise InputError(f"frequency must lie in [0, 1], got {frequency}")
    arr = np.asarray(prefix, dtype=np.int64)
    target = tuple(int(x) for x in target)
    k = len(target)
    if k == 0:
        raise InputError("target must be non-empty")
    big_n = len(arr)
    counts = np.zeros(big_n + 1, dtype=np.int64)
    if big_n >= k:
        cum, _ = _window_counts(arr, target)
        counts[k:] = cum[1:]
    positions = np.maximum(np.arange(big_n + 1) - k + 1, 0)
    return DiscrepancySeries(target, float(frequency), counts - positions * float(frequency))


@dataclass(frozen=True)
class CollaredRecoding:
    substitution: Substitution
    radius: int
    letters: tuple

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    @property
    def index(self) -> dict:
        return {w: i for i, w in enumerate(self.letters)}

    @property
    def alphabet(self) -> Alphabet:
        base = self.substitution.alphabet
        sep = "" if base.single_char else "."
        return Alphabet(tuple(base.render(w, sep) for w in self.letters))

    def letter_of(self, window) -> int:
        try:
            return self.index[tuple(int(x) for x in window)]
        except KeyError:
            raise InputError(f"{window!r} is not a legal collar") from None

    def recode(self, w: Sequence[int]) -> Word:
        width = self.width
        if len(w) < width:
            raise InputError(f"word of length {len(w)} is shorter than the collar width {width}")
        idx = self.index
        w = tuple(int(x) for x in w)
        try:
            return tuple(idx[w[i:i + width]] for i in range(len(w) - width + 1))
        except KeyError as exc:
            raise InputError(f"window {exc.args[0]!r} is not in the language") from None

    def collared_factors(self, n: int) -> list:
        """Length-``n`` collared words: recodings of length ``n + 2r`` factors."""
        return sorted(self.recode(u) for u in symbolic.factors(self.substitution, n + 2 * self.radius))

    def collared_substitution(self) -> Substitution:
        """The substitution induced on collared letters.

        Each collared letter ``x_-r .. x_r`` maps to the collars, read inside
        ``sigma(x_-r .. x_r)``, of the positions making up ``sigma(x_0)``.
        """
        sub, r = self.substitution, self.radius
        idx = self.index
        rules = []
        for w in self.letters:
            img = sub(w)
            start = sum(len(sub.rules[x]) for x in w[:r])
            stop = start + len(sub.rules[w[r]])
            rules.append(tuple(idx[img[j - r:j + r + 1]] for j in range(start, stop)))
        return Substitution(self.alphabet, tuple(rules), name=f"{sub.name or 'substitution'}-collared-{r}")


def collar(sub: Substitution, radius: int) -> CollaredRecoding:
    if radius < 0:
        raise InputError("collar radius must be nonnegative")
    return CollaredRecoding(sub, radius, tuple(symbolic.factors(sub, 2 * radius + 1).sorted()))


def recode(rec: CollaredRecoding, w: Sequence[int]) -> Word:
    return rec.recode(w)


def _tm_power(letter: str, k: int) -> str:
    return symbolic.thue_morse().apply_str(chr(0 if letter == "a" else 1), k)


def tm_adversarial_word(m: int, verify: bool = True) -> Word:
    """``phi^2m(a) phi^(2m-2)(b) phi^(2m-4)(a) ...`` down to a single letter."""
    if m < 1:
        raise InputError("m must be a positive integer")
    blocks = [_tm_power("ab"[j % 2], 2 * (m - j)) for j in range(m + 1)]
    s = "".join(blocks)
    if len(s) != (4 ** (m + 1) - 1) // 3:
        raise ConsistencyError(f"adversarial word has length {len(s)}")
    if verify and not _is_tm_factor(s):
        raise ConsistencyError(f"adversarial word for m={m} is not a Thue-Morse factor")
    return symbolic.decode(s)


def _is_tm_factor(s: str, budget: int = 1 << 24) -> bool:
    tm = symbolic.thue_morse()
    size = max(64, 8 * len(s))
    while size <= budget:
        if s in symbolic._fixed_point_str(tm, 0, size):
            return True
        size *= 4
    raise LimitError(f"could not locate word of length {len(s)} in a prefix of {budget} letters")


@dataclass(frozen=True)
class AdversaryReport:
    m: int
    length: int
    pair_count: int
    expected: float
    excess: float

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "length": self.length,
            "ab_plus_ba": self.pair_count,
            "expected_two_thirds": self.expected,
            "excess": self.excess,
            "predicted_excess": self.m / 3.0,
        }


def tm_adversary_report(m: int) -> AdversaryReport:
    w = tm_adversarial_word(m)
    pairs = count_occurrences((0, 1), w) + count_occurrences((1, 0), w)
    expected = 2.0 * (len(w) - 1) / 3.0
    return AdversaryReport(m, len(w), pairs, expected, pairs - expected)
