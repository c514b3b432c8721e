import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasticity import symbolic
from plasticity.errors import InputError, PreconditionError
from plasticity.symbolic import Alphabet, BiInfiniteSequence, Substitution

import oracles


def test_fibonacci_prefix(fib):
    assert fib.alphabet.render(symbolic.fixed_point_prefix(fib, "a", 13)) == "abaababaabaab"


def test_thue_morse_prefix(tm):
    assert tm.alphabet.render(symbolic.fixed_point_prefix(tm, "a", 16)) == "abbabaabbaababba"


def test_incidence_convention(fib, tm):
    assert fib.incidence.tolist() == [[1, 1], [1, 0]]
    assert tm.incidence.tolist() == [[1, 1], [1, 1]]


@pytest.mark.parametrize("name", ["fib", "tm"])
@pytest.mark.parametrize("n", range(1, 13))
def test_factors_match_prefix_scan(name, n, request):
    sub = request.getfixturevalue(name)
    assert set(symbolic.factors(sub, n).words) == oracles.prefix_factors(sub, n)


def test_complexity_sequences(fib, tm):
    # Sturmian complexity n + 1; Thue-Morse first values are classical
    assert [len(symbolic.factors(fib, n)) for n in range(1, 9)] == [2, 3, 4, 5, 6, 7, 8, 9]
    assert [len(symbolic.factors(tm, n)) for n in range(1, 9)] == [2, 4, 6, 10, 12, 16, 20, 22]


def test_factor_array_is_sorted_factor_set(tm):
    arr = symbolic.factor_array(tm, 7)
    assert [tuple(r) for r in arr.tolist()] == symbolic.factors(tm, 7).sorted()


def test_is_factor(tm):
    assert symbolic.is_factor(tm, tm.alphabet.word("abba"))
    assert not symbolic.is_factor(tm, tm.alphabet.word("aaa"))


def test_primitivity(fib, tm):
    assert fib.is_primitive and tm.is_primitive
    assert fib.primitivity_exponent == 2 and tm.primitivity_exponent == 1
    ident = Substitution.from_rules({"a": "a", "b": "b"})
    upper = Substitution.from_rules({"a": "ab", "b": "b"})
    for sub in (ident, upper):
        assert not sub.is_primitive
        with pytest.raises(PreconditionError):
            symbolic.factors(sub, 3)


def test_rule_validation():
    with pytest.raises(InputError):
        Substitution.from_rules({"a": "ac", "b": "a"})
    with pytest.raises(InputError):
        Substitution.from_rules({"a": "", "b": "a"})


def test_multichar_alphabet():
    alph = Alphabet(("x1", "y22"))
    assert alph.word("x1 y22 x1") == (0, 1, 0)
    assert alph.render((1, 0)) == "y22 x1"
    with pytest.raises(InputError):
        alph.word("x1 z")


words = st.lists(st.integers(0, 1), max_size=30).map(tuple)


@given(words, words)
def test_substitution_is_a_morphism(u, v):
    sub = symbolic.thue_morse()
    assert symbolic.apply(sub, u + v) == symbolic.apply(sub, u) + symbolic.apply(sub, v)
    assert list(symbolic.apply(sub, u)) == oracles.expand(sub, u)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=4).map(tuple),
       st.lists(st.integers(0, 2), max_size=60).map(tuple))
def test_count_occurrences_matches_naive(w, u):
    assert symbolic.count_occurrences(w, u) == oracles.occurrences(w, u)


@pytest.mark.parametrize("name", ["fib", "tm"])
def test_biinfinite_windows_are_factors(name, request):
    sub = request.getfixturevalue(name)
    seq = BiInfiniteSequence(sub)
    u = seq.word(-500, 500)
    legal = symbolic.factors(sub, 8)
    assert all(tuple(u[i:i + 8]) in legal for i in range(len(u) - 7))


@pytest.mark.parametrize("name", ["fib", "tm"])
def test_biinfinite_is_fixed_by_power(name, request):
    sub = request.getfixturevalue(name)
    seq = BiInfiniteSequence(sub)
    k = seq.seed.power
    assert seq[0] == seq.seed.right and seq[-1] == seq.seed.left
    core = seq.word(-20, 20)
    image = oracles.expand(sub, core, k)
    left = len(oracles.expand(sub, core[:20], k))
    assert tuple(image) == seq.word(-left, len(image) - left)


def test_counts_match_window(tm):
    seq = BiInfiniteSequence(tm)
    for lo, hi in [(-37, 0), (-5, 90), (3, 3), (10, 200)]:
        expect = np.bincount(seq.window(lo, hi), minlength=2) if hi > lo else np.zeros(2)
        assert seq.counts(lo, hi).tolist() == expect.tolist()
        assert seq.counts(hi, lo).tolist() == (-expect).tolist()


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_desubstitution(tm, r):
    seq = BiInfiniteSequence(tm)
    v = seq.desubstituted(r)
    block = v.word(0, 10)
    assert tuple(oracles.expand(tm, block, r)) == seq.word(0, 10 * 2 ** r)


def test_sturmian_golden_mean():
    alpha = (np.sqrt(5) - 1) / 2
    u = symbolic.sturmian_prefix(alpha, 0.0, 2000)
    assert sum(1 for x in u if x == 0) == int(np.floor(2000 * alpha))
    for n in (1, 5, 34, 100):
        lo, hi = oracles.window_balance(u, (0,), n)
        assert hi - lo == 1


def test_sturmian_rejects_bad_slope():
    with pytest.raises(InputError):
        symbolic.sturmian_prefix(1.5, 0.0, 10)
    with pytest.raises(InputError):
        symbolic.sturmian_prefix(0.3, 1.0, 10)


@settings(max_examples=30)
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.999))
def test_sturmian_letter_balance_at_most_one(alpha, rho):
    u = symbolic.sturmian_prefix(alpha, rho, 300)
    for n in (1, 7, 40):
        lo, hi = oracles.window_balance(u, (0,), n)
        assert hi - lo <= 1


def test_apply_examples(fib):
    w = fib.alphabet.word
    assert symbolic.apply(fib, w("a")) == w("ab")
    assert symbolic.apply(fib, ()) == ()
    assert symbolic.apply(fib, w("ab")) == w("aba")
    with pytest.raises(InputError):
        symbolic.apply(fib, (0, 2))


def test_fixed_point_examples(fib, tm):
    assert fib.alphabet.render(symbolic.fixed_point_prefix(fib, "a", 5)) == "abaab"
    assert tm.alphabet.render(symbolic.fixed_point_prefix(tm, "a", 8)) == "abbabaab"
    assert symbolic.fixed_point_prefix(fib, "a", 1) == (0,)
    with pytest.raises(PreconditionError):
        symbolic.fixed_point_prefix(fib, "b", 4)


@pytest.mark.parametrize("n", [1, 10, 137])
def test_fixed_point_prefix_is_stable(fib, n):
    u = symbolic.fixed_point_prefix(fib, "a", n)
    assert symbolic.apply(fib, u)[:n] == u


def test_two_letter_factors(fib, tm):
    render = lambda sub: {sub.alphabet.render(w) for w in symbolic.factors(sub, 2)}
    assert render(fib) == {"aa", "ab", "ba"}
    assert render(tm) == {"aa", "ab", "ba", "bb"}


def test_fibonacci_complexity_to_fifty(fib):
    assert all(len(symbolic.factors(fib, n)) == n + 1 for n in range(1, 51))


@pytest.mark.parametrize("name", ["fib", "tm"])
def test_factor_sets_are_extension_closed(name, request):
    sub = request.getfixturevalue(name)
    for n in range(1, 15):
        shorter = symbolic.factors(sub, n)
        for w in symbolic.factors(sub, n + 1):
            assert w[1:] in shorter and w[:-1] in shorter


def test_count_occurrence_examples():
    assert symbolic.count_occurrences((0, 1), (0, 1, 0, 1)) == 2
    assert symbolic.count_occurrences((0, 0), (0, 0, 0)) == 2
    assert symbolic.count_occurrences((0,), (0, 1, 0)) == 2


@given(st.lists(st.integers(0, 1), min_size=1, max_size=4).map(tuple), words, words)
def test_count_occurrences_concatenation_bounds(w, u, v):
    split = symbolic.count_occurrences(w, u) + symbolic.count_occurrences(w, v)
    joined = symbolic.count_occurrences(w, u + v)
    assert split <= joined <= split + len(w) - 1


def test_biinfinite_seed_examples(fib, tm):
    from plasticity.symbolic import BiInfiniteSeed
    assert symbolic.biinfinite_seed(fib) == BiInfiniteSeed(0, 0, 2)
    assert symbolic.biinfinite_seed(tm) == BiInfiniteSeed(0, 0, 2)
    doubling = Substitution.from_rules({"a": "aa"})
    assert symbolic.biinfinite_seed(doubling) == BiInfiniteSeed(0, 0, 1)


@pytest.mark.parametrize("name", ["fib", "tm"])
def test_biinfinite_seed_invariants(name, request):
    sub = request.getfixturevalue(name)
    seed = symbolic.biinfinite_seed(sub)
    assert symbolic.is_factor(sub, (seed.left, seed.right))
    assert sub.image(seed.left, seed.power)[-1] == seed.left
    assert sub.image(seed.right, seed.power)[0] == seed.right


def test_sturmian_examples():
    alpha = 1 / ((1 + 5 ** 0.5) / 2)
    u = symbolic.sturmian_prefix(alpha, 0.0, 10)
    assert symbolic.STURMIAN_ALPHABET.render(u) == "babaababaa"
    assert u.count(0) == 6
    assert symbolic.sturmian_prefix(0.3, 0.2, 0) == ()


def test_sturmian_rational_slope_is_periodic():
    u = symbolic.sturmian_prefix(0.75, 0.0, 40)
    assert u[:4] * 10 == u
