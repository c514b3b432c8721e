"""Alphabets, words, substitutions and exact factor enumeration.

Words are tuples of alphabet indices.  Internally, hot loops encode a word
as a ``str`` whose code points are the letter indices, so that substitution
(``str.translate``), slicing and hashing run in C.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, LimitError, PreconditionError

Word = tuple


def encode(word: Sequence[int]) -> str:
    return "".join(map(chr, word))


def decode(s: str) -> Word:
    return tuple(map(ord, s))


def to_array(s: str) -> np.ndarray:
    """Letter indices of an encoded word as an int64 array."""
    if not s:
        return np.zeros(0, dtype=np.int64)
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise InputError("alphabet needs at least one letter")
        if len(set(letters)) != len(letters):
            raise InputError(f"duplicate letters in alphabet {letters!r}")
        for tok in letters:
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise InputError(f"invalid letter token {tok!r}")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @cached_property
    def _lookup(self):
        return {tok: i for i, tok in enumerate(self.letters)}

    @property
    def single_char(self) -> bool:
        return all(len(tok) == 1 for tok in self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._lookup[letter]
        except KeyError:
            raise InputError(f"letter {letter!r} not in alphabet {self.letters}") from None

    def word(self, text) -> Word:
        """Parse ``text`` into a word.

        A string is split on whitespace when it contains any, otherwise
        (single-character alphabets only) character by character.  Any
        other iterable is taken as a sequence of letter tokens.
        """
        if isinstance(text, str):
            if any(c.isspace() for c in text) or not self.single_char:
                tokens = text.split()
            else:
                tokens = list(text)
        else:
            tokens = list(text)
        return tuple(self.index(tok) for tok in tokens)

    def render(self, word: Sequence[int], sep: str | None = None) -> str:
        if sep is None:
            sep = "" if self.single_char else " "
        n = len(self.letters)
        out = []
        for i in word:
            if not 0 <= i < n:
                raise InputError(f"letter index {i} outside alphabet of size {n}")
            out.append(self.letters[i])
        return sep.join(out)


@dataclass(frozen=True)
class Substitution:
    """A non-erasing substitution given by one image word per letter."""

    alphabet: Alphabet
    rules: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        rules = tuple(tuple(r) for r in self.rules)
        object.__setattr__(self, "rules", rules)
        n = len(self.alphabet)
        if len(rules) != n:
            raise InputError(f"expected {n} rules, got {len(rules)}")
        for j, img in enumerate(rules):
            if not img:
                raise InputError(f"erasing rule for letter {self.alphabet.letters[j]!r}")
            for i in img:
                if not 0 <= i < n:
                    raise InputError(f"rule image uses letter index {i} outside alphabet")

    @classmethod
    def from_rules(cls, rules: Mapping, letters: Iterable[str] | None = None, name: str = ""):
        """Build from ``{"a": "ab", "b": "a"}`` or ``{"a": ["a", "b"], ...}``."""
        alphabet = Alphabet(tuple(letters) if letters is not None else tuple(rules))
        missing = [a for a in alphabet if a not in rules]
        if missing:
            raise InputError(f"missing rule for {missing}")
        extra = [a for a in rules if a not in alphabet._lookup]
        if extra:
            raise InputError(f"rule for undeclared letter {extra}")
        return cls(alphabet, tuple(alphabet.word(rules[a]) for a in alphabet), name=name)

    def __len__(self):
        return len(self.alphabet)

    @cached_property
    def _table(self):
        return {i: encode(img) for i, img in enumerate(self.rules)}

    def apply_str(self, s: str, times: int = 1) -> str:
        for _ in range(times):
            s = s.translate(self._table)
        return s

    def __call__(self, word: Sequence[int]) -> Word:
        return apply(self, word)

    def image(self, letter: int, power: int = 1) -> Word:
        return decode(self.apply_str(chr(letter), power))

    def first_letter_map(self) -> list[int]:
        return [img[0] for img in self.rules]

    def last_letter_map(self) -> list[int]:
        return [img[-1] for img in self.rules]

    @cached_property
    def incidence(self) -> np.ndarray:
        """Entry (i, j) counts letter i in the image of letter j."""
        n = len(self.alphabet)
        m = np.zeros((n, n), dtype=np.int64)
        for j, img in enumerate(self.rules):
            for i in img:
                m[i, j] += 1
        return m

    @cached_property
    def primitivity_exponent(self) -> int | None:
        """Least k with M^k > 0, or None if none up to the Wielandt bound."""
        n = len(self.alphabet)
        base = self.incidence > 0
        p = base.copy()
        for k in range(1, (n - 1) ** 2 + 2):
            if p.all():
                return k
            p = (p.astype(np.int64) @ base.astype(np.int64)) > 0
        return None

    @property
    def is_primitive(self) -> bool:
        return self.primitivity_exponent is not None

    def require_primitive(self):
        if not self.is_primitive:
            n = len(self.alphabet)
            raise PreconditionError(
                f"substitution is not primitive: M^k has a zero entry for every k <= {(n - 1) ** 2 + 1}"
            )

    def render_rules(self) -> dict:
        return {a: self.alphabet.render(img) for a, img in zip(self.alphabet, self.rules)}


def fibonacci() -> Substitution:
    return Substitution.from_rules({"a": "ab", "b": "a"}, name="fibonacci")


def thue_morse() -> Substitution:
    return Substitution.from_rules({"a": "ab", "b": "ba"}, name="thue-morse")


def _check_word(sub: Substitution, w: Sequence[int]):
    n = len(sub.alphabet)
    for i in w:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < n:
            raise InputError(f"letter index {i!r} outside alphabet of size {n}")


def apply(sub: Substitution, w: Sequence[int]) -> Word:
    _check_word(sub, w)
    return decode(sub.apply_str(encode(w)))


def _fixed_point_str(sub: Substitution, seed: int, n: int) -> str:
    if sub.rules[seed][0] != seed:
        raise PreconditionError(
            f"seed {sub.alphabet.letters[seed]!r} is not prolongable: its image does not start with it"
        )
    s = chr(seed)
    while len(s) < n:
        t = sub.apply_str(s)
        if len(t) == len(s):
            raise PreconditionError("fixed point does not grow; image of the seed has length 1")
        s = t[:n]
    return s[:n]


def fixed_point_prefix(sub: Substitution, seed, n: int) -> Word:
    """First ``n`` letters of the one-sided fixed point starting with ``seed``."""
    if n <= 0:
        raise InputError("n must be positive")
    if isinstance(seed, str):
        seed = sub.alphabet.index(seed)
    return decode(_fixed_point_str(sub, seed, n))


def fixed_point_array(sub: Substitution, seed, n: int) -> np.ndarray:
    if isinstance(seed, str):
        seed = sub.alphabet.index(seed)
    return to_array(_fixed_point_str(sub, seed, n))


def _windows(s: str, n: int) -> set:
    return {s[i:i + n] for i in range(len(s) - n + 1)}


@lru_cache(maxsize=64)
def _factor_strings(sub: Substitution, n: int) -> frozenset:
    # seeds: length-n factors of sigma^m(letter), m least with all images >= n
    imgs = [chr(i) for i in range(len(sub.alphabet))]
    while min(map(len, imgs)) < n:
        nxt = [sub.apply_str(s) for s in imgs]
        if all(len(a) == len(b) for a, b in zip(nxt, imgs)):
            raise PreconditionError("images stop growing; cannot reach the requested length")
        imgs = nxt
    found = set()
    for s in imgs:
        found |= _windows(s, n)
    frontier = list(found)
    while frontier:
        fresh = set()
        for u in frontier:
            fresh |= _windows(sub.apply_str(u), n)
        fresh -= found
        found |= fresh
        frontier = list(fresh)
    return frozenset(found)


@dataclass(frozen=True)
class FactorSet:
    n: int
    words: frozenset

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return tuple(w) in self.words

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list:
        return sorted(self.words)

    def as_array(self) -> np.ndarray:
        """Factors as rows of a (count, n) integer array, lexicographic order."""
        rows = self.sorted()
        if not rows:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array(rows, dtype=np.int64).reshape(len(rows), self.n)


def factors(sub: Substitution, n: int) -> FactorSet:
    """All length-``n`` words of the language of a primitive substitution."""
    if n <= 0:
        raise InputError("factor length must be positive")
    sub.require_primitive()
    return FactorSet(n, frozenset(decode(s) for s in _factor_strings(sub, n)))


def factor_array(sub: Substitution, n: int) -> np.ndarray:
    """Same set as :func:`factors`, returned directly as a sorted 2-D array."""
    if n <= 0:
        raise InputError("factor length must be positive")
    sub.require_primitive()
    strs = sorted(_factor_strings(sub, n))
    if not strs:
        return np.zeros((0, n), dtype=np.int64)
    return to_array("".join(strs)).reshape(len(strs), n)


def is_factor(sub: Substitution, w: Sequence[int]) -> bool:
    if not w:
        return True
    _check_word(sub, w)
    return encode(w) in _factor_strings(sub, len(w))


def count_occurrences(w: Sequence[int], u: Sequence[int]) -> int:
    """Number of (possibly overlapping) occurrences of ``w`` in ``u``."""
    k = len(w)
    if k > len(u):
        return 0
    if k == 0:
        return len(u) + 1
    sw, su = encode(w), encode(u)
    if k == 1:
        return su.count(sw)
    count, pos = 0, su.find(sw)
    while pos != -1:
        count += 1
        pos = su.find(sw, pos + 1)
    return count


@dataclass(frozen=True)
class BiInfiniteSeed:
    left: int
    right: int
    power: int


def biinfinite_seed(sub: Substitution, budget: int = 10_000) -> BiInfiniteSeed:
    """Smallest ``k`` and lexicographically first legal pair ``p.s`` fixed by sigma^k."""
    sub.require_primitive()
    n = len(sub.alphabet)
    first, last = sub.first_letter_map(), sub.last_letter_map()
    two = _factor_strings(sub, 2)
    fk, lk = list(range(n)), list(range(n))
    for k in range(1, budget + 1):
        fk = [first[x] for x in fk]
        lk = [last[x] for x in lk]
        lefts = [p for p in range(n) if lk[p] == p]
        rights = [s for s in range(n) if fk[s] == s]
        for p in lefts:
            for s in rights:
                if chr(p) + chr(s) in two:
                    return BiInfiniteSeed(p, s, k)
    raise LimitError(f"no bi-infinite seed found with power <= {budget}")


class BiInfiniteSequence:
    """Bi-infinite fixed point of sigma^k grown lazily around the seed ``p.s``.

    Index 0 holds ``s`` and index -1 holds ``p``.  The window cache only
    ever grows and is guarded by a lock, so concurrent readers see the same
    letters.
    """

    def __init__(self, sub: Substitution, seed: BiInfiniteSeed | None = None, max_size: int = 50_000_000):
        self.sub = sub
        self.seed = seed if seed is not None else biinfinite_seed(sub)
        self.max_size = max_size
        self._right = chr(self.seed.right)
        self._left = chr(self.seed.left)
        self._right_arr = to_array(self._right)
        self._left_arr = to_array(self._left)
        self._right_cum = None
        self._left_cum = None
        self._lock = threading.Lock()

    def __repr__(self):
        a = self.sub.alphabet
        return (f"BiInfiniteSequence({self.sub.name or 'substitution'}, "
                f"{a.letters[self.seed.left]}.{a.letters[self.seed.right]}, k={self.seed.power})")

    def _grow(self, need_left: int, need_right: int):
        if need_left <= len(self._left) and need_right <= len(self._right):
            return
        if max(need_left, need_right) > self.max_size:
            raise LimitError(f"window of {max(need_left, need_right)} letters exceeds budget {self.max_size}")
        with self._lock:
            k = self.seed.power
            right, left = self._right, self._left
            while len(right) < need_right:
                nxt = self.sub.apply_str(right, k)
                if len(nxt) == len(right):
                    raise PreconditionError("bi-infinite sequence does not grow to the right")
                right = nxt[: max(need_right, 2 * len(right))]
            while len(left) < need_left:
                nxt = self.sub.apply_str(left, k)
                if len(nxt) == len(left):
                    raise PreconditionError("bi-infinite sequence does not grow to the left")
                left = nxt[-max(need_left, 2 * len(left)):]
            if right is not self._right:
                self._right, self._right_arr = right, to_array(right)
                self._right_cum = None
            if left is not self._left:
                self._left, self._left_arr = left, to_array(left)
                self._left_cum = None

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Letters at indices ``lo <= i < hi`` as an array."""
        if hi <= lo:
            return np.zeros(0, dtype=np.int64)
        self._grow(max(0, -lo), max(0, hi))
        parts = []
        if lo < 0:
            left = self._left_arr
            parts.append(left[len(left) + lo: len(left) + min(hi, 0)])
        if hi > 0:
            parts.append(self._right_arr[max(lo, 0): hi])
        return parts[0] if len(parts) == 1 else np.concatenate(parts)

    def _cumulative(self, arr: np.ndarray) -> np.ndarray:
        n = len(self.sub.alphabet)
        cum = np.zeros((len(arr) + 1, n), dtype=np.int64)
        cum[1:] = np.cumsum(arr[:, None] == np.arange(n)[None, :], axis=0)
        return cum

    def _counts_from(self, i: int) -> np.ndarray:
        """Letter counts on [0, i) for i >= 0, or minus those on [i, 0)."""
        if i >= 0:
            self._grow(0, i)
            with self._lock:
                if self._right_cum is None:
                    self._right_cum = self._cumulative(self._right_arr)
                return self._right_cum[i]
        self._grow(-i, 0)
        with self._lock:
            if self._left_cum is None:
                # reversed so that row j counts letters at indices -j .. -1
                self._left_cum = self._cumulative(self._left_arr[::-1])
            return -self._left_cum[-i]

    def counts(self, lo: int, hi: int) -> np.ndarray:
        """Exact letter counts of the window ``[lo, hi)`` (negated if ``hi < lo``)."""
        return self._counts_from(hi) - self._counts_from(lo)

    def __getitem__(self, i: int) -> int:
        return int(self.window(i, i + 1)[0])

    def word(self, lo: int, hi: int) -> Word:
        return tuple(int(x) for x in self.window(lo, hi))

    def desubstituted(self, r: int) -> "BiInfiniteSequence":
        """The sequence ``v`` with ``sigma^r(v)`` placed so that index 0 maps to 0.

        Since the sequence is fixed by sigma^k, sigma^(k - r mod k) of it is such
        a ``v``; it is again a sigma^k fixed point with the derived seed.
        """
        k = self.seed.power
        j = (-r) % k
        p = self.sub.apply_str(chr(self.seed.left), j)[-1]
        s = self.sub.apply_str(chr(self.seed.right), j)[0]
        return BiInfiniteSequence(self.sub, BiInfiniteSeed(ord(p), ord(s), k), self.max_size)


def sturmian_prefix(alpha: float, rho: float, n: int) -> Word:
    """Mechanical word over {a=0, b=1}: letter ``a`` where the floor sequence steps.

    Rationality of ``alpha`` cannot be detected in floating point and is not
    checked; a rational slope yields a periodic (still balanced) word.
    """
    return tuple(int(x) for x in sturmian_array(alpha, rho, n))


def sturmian_array(alpha: float, rho: float, n: int) -> np.ndarray:
    if not 0.0 < alpha < 1.0 or not math.isfinite(alpha):
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 <= rho < 1.0:
        raise InputError(f"rho must lie in [0, 1), got {rho}")
    if n < 0:
        raise InputError("length must be nonnegative")
    # floats are exact binary rationals: take the floors in integer
    # arithmetic so rounding near integers cannot produce a step of 2
    a_num, a_den = float(alpha).as_integer_ratio()
    r_num, r_den = float(rho).as_integer_ratio()
    den = max(a_den, r_den)  # both are powers of two
    a_num, r_num = a_num * (den // a_den), r_num * (den // r_den)
    k = np.arange(n + 1, dtype=object)
    floors = (k * a_num + r_num) // den
    return (1 - np.diff(floors)).astype(np.int64)


STURMIAN_ALPHABET = Alphabet(("a", "b"))
