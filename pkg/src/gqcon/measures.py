"""Closed-form entanglement quantities for pure states and two-qubit mixtures.

The central object is the q-parametrized concurrence family
(1 - sum_i lambda_i^q)^(1/q) over the squared Schmidt coefficients, with
q > 1.  On two qubits the mixed-state value has the closed form
h_q(C) in terms of the Wootters concurrence C, valid for 1 < q <= 2; the
same expression is only a lower bound on 2 x d systems.  All functions
are pure and accept plain floats/arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BadDimension, BadDomain, BadQ, BadRank, RegimeError
from .linalg import hermitian_eig, psd_sqrt
from .states import DensityMatrix

_RADICAND_TOL = 1e-12
_DOMAIN_TOL = 1e-10

_SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y).real  # real symmetric


@dataclass(frozen=True)
class QParam:
    """Validated measure parameter q > 1."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not np.isfinite(q) or q <= 1.0:
            raise BadQ(f"q must be a finite real > 1, got {q!r}")
        object.__setattr__(self, "q", q)

    @property
    def analytic_regime(self) -> bool:
        """True iff q <= 2, where the two-qubit mixed-state formula holds."""
        return self.q <= 2.0


class MeasureKind(Enum):
    GQ_CONCURRENCE = "gq"
    CONCURRENCE = "concurrence"
    GQ_COA = "gq_coa"
    COA = "coa"
    LOWER_BOUND = "lower_bound"


@dataclass(frozen=True)
class MeasureValue:
    value: float
    kind: MeasureKind


def _as_q(q) -> float:
    if isinstance(q, QParam):
        return q.q
    return QParam(q).q


def _require_analytic(q: float) -> float:
    if q > 2.0:
        raise RegimeError(f"formula proven only for 1 < q <= 2, got q = {q}")
    return q


def _check_schmidt(lambdas) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if lam.size == 0 or np.any(lam < -_DOMAIN_TOL) or abs(lam.sum() - 1.0) > 1e-9:
        raise BadDomain(f"invalid Schmidt vector {lam}")
    return np.maximum(lam, 0.0)


def gq_pure(lambdas, q) -> float:
    """(1 - sum lambda_i^q)^(1/q) over squared Schmidt coefficients."""
    q = _as_q(q)
    lam = _check_schmidt(lambdas)
    rad = 1.0 - float(np.sum(lam**q))
    if rad < 0.0:
        if rad < -_RADICAND_TOL:
            raise BadDomain(f"radicand {rad:.3e} below -{_RADICAND_TOL:.1e}")
        rad = 0.0
    return rad ** (1.0 / q)


def concurrence_pure(lambdas) -> float:
    """2 sqrt(lambda_1 lambda_2) for a cut with at most two Schmidt terms."""
    lam = _check_schmidt(lambdas)
    if np.sum(lam > 1e-10) > 2:
        raise BadRank("more than two nonzero Schmidt coefficients")
    lam = -np.sort(-lam)
    l2 = lam[1] if lam.size > 1 else 0.0
    return float(min(2.0 * np.sqrt(max(lam[0] * l2, 0.0)), 1.0))


def _require_two_qubits(rho: DensityMatrix) -> np.ndarray:
    if rho.n_qubits != 2:
        raise BadDimension(f"expected a 2-qubit state, got {rho.n_qubits} qubits")
    return rho.matrix


def wootters_spectrum(rho: DensityMatrix) -> np.ndarray:
    """Descending square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho).

    rho~ is the spin-flipped state (sy (x) sy) rho* (sy (x) sy).  Working
    with the Hermitized product keeps everything inside the Hermitian
    eigensolver.  Eigenvalues below 1e-12 of the largest are zeroed before
    the square root: roundoff puts ~1e-16 of spurious weight on true zero
    modes, which the sqrt would otherwise blow up to ~1e-8.
    """
    mat = _require_two_qubits(rho)
    rho_tilde = _YY @ mat.conj() @ _YY
    root = psd_sqrt(mat)
    prod = root @ rho_tilde @ root
    prod = 0.5 * (prod + prod.conj().T)
    evals = np.maximum(hermitian_eig(prod).eigenvalues, 0.0)
    evals[evals < 1e-12 * evals[0]] = 0.0
    return np.sqrt(evals)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """max(0, mu1 - mu2 - mu3 - mu4) over the spin-flip spectrum."""
    mu = wootters_spectrum(rho)
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def coa_two_qubit(rho: DensityMatrix) -> float:
    """Concurrence of assistance: mu1 + mu2 + mu3 + mu4."""
    return float(np.sum(wootters_spectrum(rho)))


def h_q(x, q) -> float | np.ndarray:
    """Pure-state value of the measure at concurrence x on a 2 x d cut.

    h_q(x) = [1 - ((1+u)/2)^q - ((1-u)/2)^q]^(1/q) with u = sqrt(1-x^2).
    Monotone increasing on [0, 1]; convex exactly for 1 < q <= 2.  Scalar
    in, scalar out; arrays broadcast elementwise.
    """
    q = _as_q(q)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -_DOMAIN_TOL) or np.any(arr > 1.0 + _DOMAIN_TOL):
        raise BadDomain(f"argument outside [0, 1]: {arr[(arr < -_DOMAIN_TOL) | (arr > 1 + _DOMAIN_TOL)]}")
    xc = np.clip(arr, 0.0, 1.0)
    # sqrt((1-x)(1+x)) halves the cancellation error near x = 1
    u = np.clip(np.sqrt((1.0 - xc) * (1.0 + xc)), 0.0, 1.0)
    rad = np.maximum(1.0 - ((1.0 + u) / 2.0) ** q - ((1.0 - u) / 2.0) ** q, 0.0)
    out = rad ** (1.0 / q)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def gq_max_two_qubit(q) -> float:
    """Largest value attainable on a qubit pair: h_q(1) = (1 - 2^(1-q))^(1/q)."""
    q = _as_q(q)
    return (1.0 - 2.0 ** (1.0 - q)) ** (1.0 / q)


def gq_two_qubit_mixed(rho: DensityMatrix, q) -> float:
    """Exact mixed two-qubit value h_q(Wootters concurrence), for 1 < q <= 2."""
    q = _require_analytic(_as_q(q))
    _require_two_qubits(rho)
    return float(h_q(wootters_concurrence(rho), q))


def gq_lower_bound_2xd(concurrence: float, q) -> float:
    """h_q applied to a known concurrence of a 2 x d state (lower bound).

    Tight for pure states and for every two-qubit state; for q = 2 it is
    an equality on any bipartite state.
    """
    q = _require_analytic(_as_q(q))
    return float(h_q(concurrence, q))


def gqcoa_lower_bound(rho: DensityMatrix, q) -> float:
    """h_q(concurrence of assistance): lower bound on the max-roof dual."""
    q = _require_analytic(_as_q(q))
    return float(h_q(coa_two_qubit(rho), q))


def gq_functional(rho: DensityMatrix | np.ndarray, q) -> float:
    """(1 - Tr rho^q)^(1/q) of a density matrix; concave in rho for q > 1."""
    q = _as_q(q)
    if isinstance(rho, DensityMatrix):
        evals = rho.eigenvalues
    else:
        evals = hermitian_eig(rho).eigenvalues
    lam = np.maximum(evals, 0.0)
    rad = max(1.0 - float(np.sum(lam**q)), 0.0)
    return rad ** (1.0 / q)
