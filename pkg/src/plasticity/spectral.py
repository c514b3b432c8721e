"""Substitution matrices, Perron-Frobenius data and length-change decomposition.

Matrix convention: column ``j`` is the abelianized image of letter ``j``, so
entry ``(i, j)`` counts letter ``i`` in ``sigma(a_j)``.  With ``a -> ab``,
``b -> a`` this gives ``[[1, 1], [1, 0]]``.  Under this convention the right
Perron eigenvector holds letter frequencies and length vectors transform as
row vectors: the level-``n`` supertile lengths are ``l @ M**n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, InputError, PreconditionError
from .symbolic import Substitution

DEFAULT_TOL = 1e-12
DEFAULT_BUDGET = 100_000
UNIT_BAND = 1e-9
SUPPORT_CUTOFF = 1e-9
SCHUR_BAND = 1e-6


def substitution_matrix(sub: Substitution) -> np.ndarray:
    return sub.incidence.copy()


def is_primitive(m: np.ndarray) -> bool:
    m = np.asarray(m)
    n = m.shape[0]
    base = (m > 0).astype(np.int64)
    p = base.copy()
    for _ in range((n - 1) ** 2 + 1):
        if (p > 0).all():
            return True
        p = ((p @ base) > 0).astype(np.int64)
    return False


@dataclass(frozen=True)
class SpectralData:
    matrix: np.ndarray
    perron_value: float
    frequency: np.ndarray
    left_perron: np.ndarray
    secondary_moduli: tuple
    pisot_certificate: bool
    iterations: int = 0

    @property
    def certificate_label(self) -> str:
        return "spectral: all non-Perron eigenvalues inside the unit circle"

    def as_dict(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "perron_value": self.perron_value,
            "frequency": self.frequency.tolist(),
            "left_perron": self.left_perron.tolist(),
            "secondary_moduli": list(self.secondary_moduli),
            "pisot_certificate": self.pisot_certificate,
        }


def _power_iterate(m: np.ndarray, tol: float, budget: int):
    """Dominant eigenpair of a primitive nonnegative matrix.

    Iterates on ``(M + I) / 2``: same eigenvectors, and the Perron root is
    then the unique eigenvalue of maximal modulus even when ``M`` has
    imaginary or negative secondary eigenvalues of large modulus.
    """
    n = m.shape[0]
    shifted = (m + np.eye(n)) / 2.0
    x = np.full(n, 1.0 / n)
    lam = 0.0
    for it in range(1, budget + 1):
        y = shifted @ x
        s = y.sum()
        y /= s
        lam_new = 2.0 * s - 1.0
        step = np.abs(y - x).max()
        x = y
        if step <= tol * np.abs(x).max() and abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new, x, it
        lam = lam_new
    resid = np.abs(m @ x - lam * x).max()
    raise ConvergenceError(f"power iteration did not converge in {budget} steps (residual {resid:.3e})")


def _eigenvalues(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if n == 1:
        return np.array([complex(m[0, 0])])
    if n == 2:
        tr = float(m[0, 0] + m[1, 1])
        det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        disc = complex(tr * tr / 4.0 - det)
        r = np.sqrt(disc)
        return np.array([tr / 2.0 + r, tr / 2.0 - r])
    if n <= 4:
        return np.roots(np.poly(m.astype(float)))
    return np.linalg.eigvals(m.astype(float))


def perron_data(m, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET) -> SpectralData:
    if isinstance(m, Substitution):
        m = substitution_matrix(m)
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("substitution matrix must be square")
    if (m < 0).any():
        raise InputError("substitution matrix must be nonnegative")
    if not is_primitive(m):
        n = m.shape[0]
        raise PreconditionError(f"matrix is not primitive (tested powers up to {(n - 1) ** 2 + 1})")
    mf = m.astype(float)
    lam, f, it_r = _power_iterate(mf, tol, budget)
    lam_l, v, it_l = _power_iterate(mf.T, tol, budget)
    v = v / np.linalg.norm(v)
    eig = _eigenvalues(m)
    # drop the root closest to the Perron value; the rest are secondary
    k = int(np.argmin(np.abs(eig - lam)))
    secondary = tuple(sorted((float(abs(z)) for i, z in enumerate(eig) if i != k), reverse=True))
    pisot = all(s < 1.0 - UNIT_BAND for s in secondary)
    return SpectralData(m.copy(), float(lam), f, v, secondary, pisot, max(it_r, it_l))


class Contraction(str, enum.Enum):
    CONTRACTING = "CONTRACTING"
    NOT_CONTRACTING = "NOT_CONTRACTING"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class LengthChangeDecomposition:
    scale: float
    delta: np.ndarray
    status: Contraction
    decay_rate: float
    supporting_moduli: tuple

    @property
    def contracting(self) -> bool:
        return self.status is Contraction.CONTRACTING

    def as_dict(self) -> dict:
        return {
            "c": self.scale,
            "delta": self.delta.tolist(),
            "contracting": self.status.value,
            "decay_rate": self.decay_rate,
            "supporting_moduli": list(self.supporting_moduli),
        }


def _classify(rate: float) -> Contraction:
    if rate < 1.0 - UNIT_BAND:
        return Contraction.CONTRACTING
    if rate <= 1.0 + UNIT_BAND:
        return Contraction.INDETERMINATE
    return Contraction.NOT_CONTRACTING


def _support_by_eigenbasis(m: np.ndarray, delta: np.ndarray):
    w, vecs = np.linalg.eig(m.T)
    if np.linalg.cond(vecs) > 1e8:
        return None
    coef = np.linalg.solve(vecs, delta.astype(complex))
    scale = np.abs(vecs).max(axis=0)
    mags = np.abs(coef) * scale
    cut = SUPPORT_CUTOFF * np.linalg.norm(delta)
    return sorted({round(float(abs(w[i])), 15) for i in range(len(w)) if mags[i] > cut}, reverse=True)


def _support_by_schur(m: np.ndarray, delta: np.ndarray):
    """Eigenvalue moduli supporting ``delta`` via ordered Schur forms.

    Works for defective matrices: finds the smallest modulus threshold whose
    invariant subspace (of ``M^T``) contains ``delta``.  A Jordan block of
    size k perturbs its eigenvalues by about eps**(1/k) in floating point, so
    moduli are clustered with a relative band of ``SCHUR_BAND``.
    """
    a = m.T.astype(float)
    moduli = sorted({float(abs(z)) for z in np.linalg.eigvals(a)})
    norm = np.linalg.norm(delta)
    for t in moduli:
        thr = t * (1 + SCHUR_BAND) + 1e-12
        _, z, sdim = scipy.linalg.schur(a, output="complex", sort=lambda x, thr=thr: abs(x) <= thr)
        basis = z[:, :sdim]
        resid = delta - basis @ (basis.conj().T @ delta)
        if np.linalg.norm(resid) <= SUPPORT_CUTOFF * max(norm, 1e-300) * 10:
            return [m_ for m_ in moduli if m_ <= t][::-1]
    return None


def decompose_length_change(lengths, new_lengths, spec: SpectralData) -> LengthChangeDecomposition:
    """Split ``new_lengths = c * lengths + delta`` with ``<f, delta> = 0``."""
    l0 = np.asarray(lengths, dtype=float)
    l1 = np.asarray(new_lengths, dtype=float)
    n = spec.matrix.shape[0]
    if l0.shape != (n,) or l1.shape != (n,):
        raise InputError(f"length vectors must have {n} entries")
    if (l0 <= 0).any() or (l1 <= 0).any():
        raise InputError("lengths must be strictly positive")
    f = spec.frequency
    c = float(f @ l1) / float(f @ l0)
    delta = l1 - c * l0
    if np.linalg.norm(delta) <= 1e-14 * np.linalg.norm(l1):
        delta = np.zeros(n)
    status, rate, support = delta_support(delta, spec.matrix)
    return LengthChangeDecomposition(c, delta, status, rate, support)


def delta_support(delta, m):
    """Classify how ``delta @ M**n`` behaves: (status, decay rate, moduli).

    ``delta`` is expanded in the left eigenbasis of ``M``; coefficients below
    ``1e-9 * |delta|`` are treated as zero.  Defective matrices fall back to
    an invariant-subspace test.
    """
    delta = np.asarray(delta, dtype=float)
    if not delta.any():
        return Contraction.CONTRACTING, 0.0, ()
    m = np.asarray(m)
    support = _support_by_eigenbasis(m, delta)
    if support is None:
        support = _support_by_schur(m, delta)
    if support is None:
        return Contraction.INDETERMINATE, math.nan, ()
    rate = support[0] if support else 0.0
    return _classify(rate), rate, tuple(support)


def length_difference_norms(delta, m, levels: int, rate: float | None = None) -> np.ndarray:
    """``max_a |(delta @ M**n)_a|`` for ``n = 0..levels``.

    Iterated inside the invariant subspace of ``M^T`` carrying ``delta``
    (eigenvalues of modulus at most ``rate``), so rounding noise in the
    expanding directions cannot grow.  ``delta`` must lie in that subspace.
    """
    delta = np.asarray(delta, dtype=float)
    out = np.zeros(levels + 1)
    if not delta.any():
        return out
    a = np.asarray(m, dtype=float).T
    if rate is None:
        _, rate, _ = delta_support(delta, m)
    thr = rate * (1 + SCHUR_BAND) + 1e-12
    t, z, sdim = scipy.linalg.schur(a, output="complex", sort=lambda x: abs(x) <= thr)
    q, block = z[:, :sdim], t[:sdim, :sdim]
    y = q.conj().T @ delta
    for n in range(levels + 1):
        out[n] = float(np.abs((q @ y).real).max())
        y = block @ y
    return out


def supertile_counts(sub_or_matrix, letter: int, level: int) -> np.ndarray:
    """Letter counts of ``sigma^level(letter)`` via exact integer matrix powers."""
    m = sub_or_matrix.incidence if isinstance(sub_or_matrix, Substitution) else np.asarray(sub_or_matrix)
    if level < 0:
        raise InputError("level must be nonnegative")
    n = m.shape[0]
    col = [1 if i == letter else 0 for i in range(n)]
    mo = m.astype(object)
    base = mo
    e = level
    vec = np.array(col, dtype=object)
    while e:
        if e & 1:
            vec = base @ vec
        base = base @ base
        e >>= 1
    return vec


def supertile_length(sub, letter, level: int, lengths) -> float:
    """Geometric length of the level-``level`` supertile of ``letter``."""
    if isinstance(letter, str):
        letter = sub.alphabet.index(letter)
    counts = supertile_counts(sub, letter, level)
    return float(sum(int(c) * float(l) for c, l in zip(counts, lengths)))
