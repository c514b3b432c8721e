"""Combine balance evidence and spectral data into a plasticity verdict."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import balance as bal
from . import symbolic
from .errors import ConsistencyError
from .spectral import SpectralData, perron_data
from .symbolic import Substitution

PLASTIC_CERTIFIED = "PLASTIC_CERTIFIED"
PLASTIC_EVIDENCE = "PLASTIC_EVIDENCE"
NOT_PLASTIC_EVIDENCE = "NOT_PLASTIC_EVIDENCE"
TOTALLY_PLASTIC_EVIDENCE = "TOTALLY_PLASTIC_EVIDENCE"
NOT_TOTALLY_PLASTIC_EVIDENCE = "NOT_TOTALLY_PLASTIC_EVIDENCE"


@dataclass(frozen=True)
class BalanceEvidence:
    target: str
    n_max: int
    observed_constant: int
    status: bal.Growth
    slope: float

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "n_max": self.n_max,
            "observed_constant": self.observed_constant,
            "status": self.status.value,
            "fitted_growth_per_doubling": self.slope,
        }


def evidence(profile: bal.BalanceProfile) -> BalanceEvidence:
    status, slope = bal.classify_growth(profile.n, profile.balance)
    return BalanceEvidence(profile.label(), int(profile.n[-1]), profile.observed_constant, status, slope)


def collect_evidence(sub: Substitution, max_n: int = 400, word_len: int = 2):
    """Letter evidence and word evidence for every factor of length 2..word_len."""
    letters = [evidence(p) for p in bal.letter_profiles(sub, max_n)]
    words = []
    for k in range(2, word_len + 1):
        for w in symbolic.factors(sub, k).sorted():
            words.append(evidence(bal.balance_profile(sub, w, max_n)))
    return letters, words


@dataclass(frozen=True)
class PlasticityVerdict:
    plastic: str
    totally: str
    letter_status: bal.Growth
    pisot_certificate: bool
    certificate_label: str
    secondary_moduli: tuple
    letters: tuple = field(default=())
    words: tuple = field(default=())

    @property
    def growth_words(self) -> list:
        return [w.target for w in self.words if w.status is bal.Growth.GROWTH_OBSERVED]

    def as_dict(self) -> dict:
        return {
            "plastic": self.plastic,
            "totally": self.totally,
            "letter_balance": self.letter_status.value,
            "pisot_certificate": self.pisot_certificate,
            "certificate": self.certificate_label,
            "secondary_moduli": list(self.secondary_moduli),
            "letters": [e.as_dict() for e in self.letters],
            "words": [e.as_dict() for e in self.words],
            "growth_words": self.growth_words,
        }


def plasticity_verdict(sub: Substitution, letters, words, spec: SpectralData | None = None) -> PlasticityVerdict:
    """Classify from evidence.

    The certificate decides plasticity outright; without it, observed letter
    balance decides.  A certificate alongside observed letter growth means a
    bug somewhere upstream, and raises.
    """
    spec = spec if spec is not None else perron_data(sub)
    letters, words = tuple(letters), tuple(words)
    grows = any(e.status is bal.Growth.GROWTH_OBSERVED for e in letters)
    letter_status = bal.Growth.GROWTH_OBSERVED if grows else bal.Growth.BOUNDED_OBSERVED
    if spec.pisot_certificate and grows:
        raise ConsistencyError("spectral certificate holds but letter-balance growth was observed")
    if spec.pisot_certificate:
        plastic = PLASTIC_CERTIFIED
    elif grows:
        plastic = NOT_PLASTIC_EVIDENCE
    else:
        plastic = PLASTIC_EVIDENCE
    word_growth = any(e.status is bal.Growth.GROWTH_OBSERVED for e in words)
    totally = NOT_TOTALLY_PLASTIC_EVIDENCE if (word_growth or grows) else TOTALLY_PLASTIC_EVIDENCE
    return PlasticityVerdict(plastic, totally, letter_status, spec.pisot_certificate,
                             spec.certificate_label, spec.secondary_moduli, letters, words)


def assess(sub: Substitution, max_n: int = 400, word_len: int = 2) -> PlasticityVerdict:
    letters, words = collect_evidence(sub, max_n, word_len)
    return plasticity_verdict(sub, letters, words)
