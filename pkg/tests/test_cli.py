import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plasticity.cli import parse_definition, run, serialize_definition
from plasticity.errors import ParseError

from conftest import TM_TEXT


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_fibonacci():
    d = parse_definition("alphabet: a b\nrule: a -> a b\nrule: b -> a")
    assert d.substitution.render_rules() == {"a": "ab", "b": "a"}
    assert d.lengths is None


def test_parse_thue_morse_with_comments_and_lengths():
    d = parse_definition(TM_TEXT + "lengths: 1 2.5   # per letter\n")
    assert d.substitution.render_rules() == {"a": "ab", "b": "ba"}
    assert d.lengths == (1.0, 2.5)


def test_multichar_tokens():
    d = parse_definition("alphabet: x0 x1\nrule: x0 -> x0 x1\nrule: x1 -> x0\n")
    assert d.alphabet.letters == ("x0", "x1")
    assert d.substitution.rules == ((0, 1), (0,))


@pytest.mark.parametrize("text, line, fragment", [
    ("", None, "missing alphabet"),
    ("# only a comment\n", None, "missing alphabet"),
    ("alphabet: a b\nrule: a -> a c\nrule: b -> a\n", 2, "undeclared letter 'c'"),
    ("alphabet: a b\nrule: c -> a\n", 2, "undeclared letter 'c'"),
    ("alphabet: a b\nrule: a -> a b\nrule: a -> b\n", 3, "duplicate rule"),
    ("alphabet: a b\nrule: a -> a b\n", 1, "missing rule for b"),
    ("alphabet: a b\nrule: a -> a b\nrule: b -> a\nlengths: 1 0\n", 4, "positive"),
    ("alphabet: a b\nrule: a -> a b\nrule: b -> a\nlengths: 1 -2\n", 4, "positive"),
    ("alphabet: a b\nrule: a -> a b\nrule: b -> a\nlengths: 1\n", 4, "expected 2 lengths"),
    ("alphabet: a b\nrule: a a b\n", 2, "malformed rule"),
    ("alphabet: a b\nfoo: 1\n", 2, "unknown directive"),
    ("rule: a -> a\n", 1, "rule before alphabet"),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_definition(text)
    assert info.value.line == line
    assert fragment in str(info.value)
    if line is not None:
        assert str(info.value).startswith(f"line {line}:")


letters = st.lists(st.text("abcdefxyz0123", min_size=1, max_size=3), min_size=1, max_size=4, unique=True)


@given(letters.flatmap(lambda ls: st.tuples(
    st.just(ls),
    st.lists(st.lists(st.sampled_from(ls), min_size=1, max_size=5), min_size=len(ls), max_size=len(ls)),
    st.none() | st.lists(st.floats(0.01, 100), min_size=len(ls), max_size=len(ls)),
)))
def test_round_trip(case):
    ls, images, lengths = case
    text = "alphabet: " + " ".join(ls) + "\n"
    text += "".join(f"rule: {a} -> {' '.join(img)}\n" for a, img in zip(ls, images))
    if lengths is not None:
        text += "lengths: " + " ".join(repr(x) for x in lengths) + "\n"
    first = parse_definition(text)
    again = parse_definition(serialize_definition(first))
    assert again.substitution == first.substitution
    assert again.lengths == first.lengths


def test_spectral_command(fib_file):
    code, out, err = call("spectral", fib_file)
    assert code == 0 and err == ""
    res = json.loads(out)["result"]
    assert abs(res["perron_value"] - 1.6180339887) < 1e-10
    assert res["pisot_certificate"] is True
    assert set(res) >= {"matrix", "perron_value", "frequency", "secondary_moduli", "pisot_certificate"}


def test_balance_command(tm_file):
    code, out, _ = call("balance", tm_file, "--max-n", "100")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "target,n,min,max,balance"
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 200
    assert max(int(r[4]) for r in rows) <= 2


def test_balance_words_and_collar(tm_file):
    code, out, _ = call("balance", tm_file, "--max-n", "30", "--word", "ba", "--word", "ab")
    assert code == 0
    targets = [ln.split(",")[0] for ln in out.splitlines()[1:]]
    assert targets == sorted(targets) and set(targets) == {"ab", "ba"}
    code, out, _ = call("balance", tm_file, "--max-n", "10", "--collar", "1")
    assert code == 0
    assert {ln.split(",")[0] for ln in out.splitlines()[1:]} == {"aab", "aba", "abb", "baa", "bab", "bba"}


def test_factors_command(fib_file):
    code, out, _ = call("factors", fib_file, "--n", "4")
    assert out.splitlines() == ["aaba", "abaa", "abab", "baab", "baba"]


def test_plasticity_command(tm_file):
    code, out, _ = call("plasticity", tm_file, "--to", "2,1", "--max-n", "400")
    res = json.loads(out)["result"]
    assert code == 0
    assert res["plastic"] == "PLASTIC_CERTIFIED"
    assert res["totally"] == "NOT_TOTALLY_PLASTIC_EVIDENCE"
    assert set(res["decomposition"]) == {"c", "delta", "contracting", "decay_rate", "supporting_moduli"}


def test_conjugacy_command(fib_file, tmp_path):
    out_path = tmp_path / "trace.csv"
    code, out, err = call("conjugacy", fib_file, "--from", "1,1", "--to", "2,1", "--tolerance", "1e-6",
                          "--samples", "5", "--out", str(out_path))
    assert code == 0 and out == "" and err == ""
    lines = out_path.read_text().splitlines()
    assert lines[0] == "level,offset,gap"
    code, out, _ = call("conjugacy", fib_file, "--to", "2,1", "--tolerance", "1e-6", "--samples", "5",
                        "--format", "json")
    res = json.loads(out)["result"]
    assert res["equivariance_ok"] is True
    assert res["equivariance_max_residual"] < 1e-6


def test_sturmian_command():
    code, out, _ = call("sturmian", "--alpha", "0.618033988749895", "--length", "5000", "--max-n", "50")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "target,n,min,max,balance,one_sided"
    assert all(ln.endswith(",1,true") for ln in lines[1:])


def test_tm_adversary_command():
    code, out, _ = call("tm-adversary", "--m", "1")
    res = json.loads(out)["result"]
    assert res["length"] == 5 and res["ab_plus_ba"] == 3
    assert abs(res["excess"] - 1 / 3) < 1e-11


def test_determinism(tm_file):
    runs = [call("plasticity", tm_file, "--to", "3,1", "--max-n", "60")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    runs = [call("balance", tm_file, "--max-n", "40", "--word", "ab")[1] for _ in range(2)]
    assert runs[0] == runs[1] and runs[0].isascii()


def test_floats_have_twelve_significant_digits(fib_file):
    _, out, _ = call("spectral", fib_file, "--format", "csv")
    assert "perron_value,1.61803398875\n" in out


@pytest.mark.parametrize("argv, code", [
    (["bogus"], 1),
    ([], 1),
    (["balance"], 1),
    (["tm-adversary", "--m", "0"], 1),
    (["sturmian", "--alpha", "2", "--length", "10", "--max-n", "5"], 1),
])
def test_usage_errors(argv, code):
    rc, out, err = call(*argv)
    assert rc == code and out == "" and err


def test_exit_codes(tmp_path, fib_file):
    bad = tmp_path / "bad.sub"
    bad.write_text("alphabet: a b\nrule: a -> a c\nrule: b -> a\n")
    rc, out, err = call("spectral", str(bad))
    assert rc == 1 and out == "" and "line 2" in err
    ident = tmp_path / "id.sub"
    ident.write_text("alphabet: a b\nrule: a -> a\nrule: b -> b\n")
    rc, out, err = call("spectral", str(ident))
    assert rc == 2 and out == "" and "primitive" in err
    expanding = tmp_path / "exp.sub"
    expanding.write_text("alphabet: a b\nrule: a -> a b b b\nrule: b -> a\n")
    rc, out, err = call("conjugacy", str(expanding), "--to", "1,2")
    assert rc == 2 and out == ""
    rc, out, err = call("conjugacy", fib_file, "--to", "2,1", "--tolerance", "1e-15", "--max-level", "3")
    assert rc == 3 and out == "" and err
    rc, out, err = call("spectral", str(tmp_path / "missing.sub"))
    assert rc == 1 and out == ""


def test_module_entry_point(fib_file):
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "plasticity", "spectral", fib_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["command"] == "spectral"
