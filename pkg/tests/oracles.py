"""Brute-force reference implementations used as test oracles.

Deliberately naive: plain Python loops over explicit words, no caching,
no numpy, nothing shared with the library beyond ``Substitution.rules``.
"""

from __future__ import annotations


def expand(sub, word, times=1):
    for _ in range(times):
        word = [x for a in word for x in sub.rules[a]]
    return list(word)


def fixed_prefix(sub, seed, n):
    word = [seed]
    while len(word) < n:
        word = expand(sub, word)
    return word[:n]


def prefix_factors(sub, n, prefix_len=60_000):
    """Length-n windows of long fixed-point prefixes from every prolongable letter."""
    out = set()
    for a in range(len(sub.alphabet)):
        if sub.rules[a][0] != a:
            continue
        u = fixed_prefix(sub, a, prefix_len)
        for i in range(len(u) - n + 1):
            out.add(tuple(u[i:i + n]))
    return out


def occurrences(w, u):
    k = len(w)
    return sum(1 for i in range(len(u) - k + 1) if tuple(u[i:i + k]) == tuple(w))


def balance_over(words, target):
    counts = [occurrences(target, u) for u in words]
    return min(counts), max(counts)


def window_balance(u, target, n):
    counts = [occurrences(target, u[i:i + n]) for i in range(len(u) - n + 1)]
    return min(counts), max(counts)


def word_length(sub, letter, level, lengths):
    return sum(lengths[x] for x in expand(sub, [letter], level))
