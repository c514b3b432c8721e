"""Reader and writer for substitution-definition files.

Format (line oriented, ``#`` starts a comment)::

    alphabet: a b
    rule: a -> a b
    rule: b -> a
    lengths: 1 1        # optional, alphabet order

Letters are whitespace-separated tokens, so multi-character letters work.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

from ..errors import ParseError
from ..symbolic import Alphabet, Substitution


@dataclass(frozen=True)
class SubstitutionFile:
    substitution: Substitution
    lengths: tuple | None = None
    path: str | None = None
    digest: str = ""

    @property
    def alphabet(self) -> Alphabet:
        return self.substitution.alphabet


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_definition(text: str, path: str | None = None) -> SubstitutionFile:
    letters = None
    rules: dict = {}
    lengths = None
    alphabet_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", lineno)
        if key == "alphabet":
            if letters is not None:
                raise ParseError("alphabet declared twice", lineno)
            letters = rest.split()
            if not letters:
                raise ParseError("empty alphabet", lineno)
            if len(set(letters)) != len(letters):
                raise ParseError("duplicate letter in alphabet", lineno)
            alphabet_line = lineno
        elif key == "rule":
            if letters is None:
                raise ParseError("rule before alphabet", lineno)
            lhs, arrow, rhs = rest.partition("->")
            lhs_tokens = lhs.split()
            if not arrow or len(lhs_tokens) != 1:
                raise ParseError(f"malformed rule {rest.strip()!r}; expected 'x -> y z ...'", lineno)
            src = lhs_tokens[0]
            image = rhs.split()
            if src not in letters:
                raise ParseError(f"rule for undeclared letter {src!r}", lineno)
            if src in rules:
                raise ParseError(f"duplicate rule for {src!r}", lineno)
            if not image:
                raise ParseError(f"empty image for {src!r} (erasing rules are not allowed)", lineno)
            for tok in image:
                if tok not in letters:
                    raise ParseError(f"undeclared letter {tok!r} in image of {src!r}", lineno)
            rules[src] = image
        elif key == "lengths":
            if letters is None:
                raise ParseError("lengths before alphabet", lineno)
            if lengths is not None:
                raise ParseError("lengths declared twice", lineno)
            try:
                vals = [float(tok) for tok in rest.split()]
            except ValueError:
                raise ParseError(f"non-numeric length in {rest.strip()!r}", lineno) from None
            if len(vals) != len(letters):
                raise ParseError(f"expected {len(letters)} lengths, got {len(vals)}", lineno)
            if any(not math.isfinite(v) or v <= 0 for v in vals):
                raise ParseError("lengths must be positive", lineno)
            lengths = tuple(vals)
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if letters is None:
        raise ParseError("missing alphabet")
    missing = [a for a in letters if a not in rules]
    if missing:
        raise ParseError(f"missing rule for {', '.join(missing)}", alphabet_line)
    alphabet = Alphabet(tuple(letters))
    sub = Substitution(alphabet, tuple(alphabet.word(rules[a]) for a in letters),
                       name=Path(path).stem if path else "")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return SubstitutionFile(sub, lengths, path, digest)


def serialize_definition(defn: SubstitutionFile) -> str:
    alphabet = defn.alphabet
    out = ["alphabet: " + " ".join(alphabet.letters)]
    for a, img in zip(alphabet.letters, defn.substitution.rules):
        out.append(f"rule: {a} -> " + alphabet.render(img, " "))
    if defn.lengths is not None:
        out.append("lengths: " + " ".join(repr(float(x)) for x in defn.lengths))
    return "\n".join(out) + "\n"


def read_definition(path) -> SubstitutionFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_definition(text, str(p))
