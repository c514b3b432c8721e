"""Finitely balanced sequences and plasticity of one-dimensional tilings.

Submodules: ``symbolic`` (substitutions, factors, bi-infinite fixed points),
``balance`` (balance profiles, discrepancy, collaring), ``spectral``
(Perron data, length-change decomposition), ``tiling`` (suspensions and the
supertile conjugacy), ``verdict`` (evidence to classification) and ``cli``.
"""

__version__ = "0.1.0"

from .balance import (BalanceProfile, CollaredRecoding, DiscrepancySeries, Growth, balance_profile,
                      classify_growth, collar, discrepancy_series, letter_profiles, recode,
                      tm_adversarial_word, tm_adversary_report, word_balance_growth)
from .errors import (ConsistencyError, ConvergenceError, InputError, LimitError, ParseError,
                     PlasticityError, PreconditionError)
from .spectral import (Contraction, LengthChangeDecomposition, SpectralData, decompose_length_change,
                       perron_data, substitution_matrix, supertile_length)
from .symbolic import (Alphabet, BiInfiniteSequence, Substitution, factors, fibonacci,
                       fixed_point_prefix, sturmian_prefix, thue_morse)
from .tiling import (Tiling, canonical_tiling, conjugacy, ensemble_gaps, equivariance_residuals, psi_n,
                     suspend, tiling_distance)
from .verdict import PlasticityVerdict, assess, plasticity_verdict

__all__ = [
    "__version__",
    "Alphabet",
    "assess",
    "balance_profile",
    "BalanceProfile",
    "BiInfiniteSequence",
    "canonical_tiling",
    "classify_growth",
    "collar",
    "CollaredRecoding",
    "conjugacy",
    "ConsistencyError",
    "Contraction",
    "ConvergenceError",
    "decompose_length_change",
    "discrepancy_series",
    "DiscrepancySeries",
    "ensemble_gaps",
    "equivariance_residuals",
    "factors",
    "fibonacci",
    "fixed_point_prefix",
    "Growth",
    "InputError",
    "LengthChangeDecomposition",
    "letter_profiles",
    "LimitError",
    "ParseError",
    "perron_data",
    "plasticity_verdict",
    "PlasticityError",
    "PlasticityVerdict",
    "PreconditionError",
    "psi_n",
    "recode",
    "SpectralData",
    "sturmian_prefix",
    "Substitution",
    "substitution_matrix",
    "supertile_length",
    "suspend",
    "thue_morse",
    "Tiling",
    "tiling_distance",
    "tm_adversarial_word",
    "tm_adversary_report",
    "word_balance_growth",
]
