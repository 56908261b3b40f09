"""Dense complex linear algebra kernels for registers of dimension <= 64.

Every spectral quantity in the package (Schmidt spectra, matrix square
roots, spin-flip eigenvalues) is routed through the single cyclic Jacobi
eigensolver below, so there is one kernel to validate.  All functions are
pure and safe to call from concurrent workers.
"""

from __future__ import annotations

import math
import string
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    BadCut,
    BadSubsystem,
    NegativeEigenvalue,
    NonFinite,
    NonHermitianInput,
)

MAX_DIM = 64
HERMITICITY_TOL = 1e-10
EIG_CLAMP_TOL = 1e-10

_OFFDIAG_TOL = 1e-13
_MAX_SWEEPS = 100


class HermitianEig(NamedTuple):
    """Eigenvalues in descending order and the matching unitary of columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square_complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise NonHermitianInput(f"dimension {a.shape[0]} exceeds supported maximum {MAX_DIM}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise NonFinite("matrix has NaN or Inf entries")
    return a


def check_hermitian(a, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate and return ``a`` as a finite square Hermitian complex array."""
    a = _as_square_complex(a)
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise NonHermitianInput(f"max |A - A^dag| = {dev:.3e} exceeds {tol:.1e}")
    return a


def hermitian_eig(a) -> HermitianEig:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below 1e-13
    (scaled by the matrix norm) or 100 sweeps elapse.  Eigenvalues are
    returned in descending order; ties keep their pre-sort index order so
    results are deterministic.
    """
    a = check_hermitian(a)
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(A)))
    tiny = 1e-18 * scale
    for _ in range(_MAX_SWEEPS):
        off = A - np.diag(np.diag(A))
        if float(np.linalg.norm(off)) < _OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                w = A[p, q]
                aw = abs(w)
                if aw <= tiny:
                    continue
                ph = w / aw
                theta = 0.5 * math.atan2(2.0 * aw, (A[p, p] - A[q, q]).real)
                c = math.cos(theta)
                s = math.sin(theta)
                # A <- R^dag A R with R the plane rotation in columns (p, q)
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p + s * np.conj(ph) * col_q
                A[:, q] = -s * ph * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p + s * ph * row_q
                A[q, :] = -s * np.conj(ph) * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p + s * np.conj(ph) * vec_q
                V[:, q] = -s * ph * vec_p + c * vec_q
    eigenvalues = np.diag(A).real.copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return HermitianEig(eigenvalues[order], V[:, order])


def psd_sqrt(a) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-10, 0) are clamped to zero; anything more negative
    raises NegativeEigenvalue.
    """
    evals, evecs = hermitian_eig(a)
    if evals[-1] < -EIG_CLAMP_TOL:
        raise NegativeEigenvalue(f"min eigenvalue {evals[-1]:.3e} below -{EIG_CLAMP_TOL:.1e}")
    clamped = np.maximum(evals, 0.0)
    root = (evecs * np.sqrt(clamped)) @ evecs.conj().T
    return 0.5 * (root + root.conj().T)


def _check_labels(n_qubits: int, labels: Sequence[int], err, what: str) -> list[int]:
    labels = list(labels)
    if len(labels) != len(set(labels)):
        raise err(f"duplicate qubit labels in {what}: {labels}")
    if not labels:
        raise err(f"{what} must name at least one qubit")
    if any((k < 0 or k >= n_qubits) for k in labels):
        raise err(f"{what} labels {labels} out of range for {n_qubits} qubits")
    return sorted(labels)


def partial_trace(mat: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    """Trace out all qubits not in ``keep`` from a 2^n x 2^n matrix.

    Qubit label 0 is the most significant bit of the basis index.  The
    result register keeps the surviving qubits in ascending label order.
    """
    keep = _check_labels(n_qubits, keep, BadSubsystem, "keep")
    if len(keep) == n_qubits:
        raise BadSubsystem("keep must be a proper subset of the register")
    mat = np.asarray(mat, dtype=complex)
    dim = 2**n_qubits
    if mat.shape != (dim, dim):
        raise BadSubsystem(f"matrix shape {mat.shape} does not match {n_qubits} qubits")
    tensor = mat.reshape((2,) * (2 * n_qubits))
    letters = string.ascii_lowercase
    row = list(letters[:n_qubits])
    col = list(letters[n_qubits : 2 * n_qubits])
    for k in range(n_qubits):
        if k not in keep:
            col[k] = row[k]
    out = [row[k] for k in keep] + [col[k] for k in keep]
    sub = "".join(row) + "".join(col) + "->" + "".join(out)
    d_keep = 2 ** len(keep)
    return np.einsum(sub, tensor).reshape(d_keep, d_keep)


def split_cut(n_qubits: int, cut: Sequence[int]) -> tuple[list[int], list[int]]:
    """Validate a bipartition given by the side-A labels; return (side_a, side_b)."""
    side_a = _check_labels(n_qubits, cut, BadCut, "cut")
    if len(side_a) == n_qubits:
        raise BadCut("cut must leave a nonempty complementary side")
    side_b = [k for k in range(n_qubits) if k not in side_a]
    return side_a, side_b


def amplitude_matrix(amplitudes: np.ndarray, n_qubits: int, cut: Sequence[int]) -> np.ndarray:
    """Reshape a state vector into the (side A) x (side B) coefficient matrix."""
    side_a, side_b = split_cut(n_qubits, cut)
    psi = np.asarray(amplitudes, dtype=complex).reshape((2,) * n_qubits)
    return psi.transpose(side_a + side_b).reshape(2 ** len(side_a), 2 ** len(side_b))


def pure_marginal(amplitudes: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full projector."""
    keep = _check_labels(n_qubits, keep, BadSubsystem, "keep")
    if len(keep) == n_qubits:
        raise BadSubsystem("keep must be a proper subset of the register")
    m = amplitude_matrix(amplitudes, n_qubits, keep)
    return m @ m.conj().T


def schmidt_values(amplitudes: np.ndarray, n_qubits: int, cut: Sequence[int]) -> np.ndarray:
    """Squared Schmidt coefficients of a pure state across a cut, descending.

    The spectrum is computed on the smaller side of the cut and has length
    2^min(|A|, |B|); trailing entries may be zero.  Values in [-1e-10, 0)
    are clamped to zero.
    """
    side_a, side_b = split_cut(n_qubits, cut)
    small = side_a if len(side_a) <= len(side_b) else side_b
    gram = pure_marginal(amplitudes, n_qubits, small)
    evals = hermitian_eig(gram).eigenvalues
    if evals[-1] < -EIG_CLAMP_TOL:
        raise NegativeEigenvalue(f"Schmidt spectrum has eigenvalue {evals[-1]:.3e}")
    return np.maximum(evals, 0.0)
