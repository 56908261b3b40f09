"""Pure states and density matrices on labeled qubit registers.

Qubit label 0 is the most significant bit of the computational-basis
index, so for three qubits |100> sits at index 4.  Randomness always flows
through an explicit seed feeding numpy's PCG64 generator, which keeps
every sampled state reproducible across platforms.  Instances are treated
as immutable after construction and are safe to share between workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadParameter,
    BadRank,
    NonFinite,
    ParseError,
    SizeOutOfRange,
)
from .linalg import (
    HERMITICITY_TOL,
    check_hermitian,
    hermitian_eig,
    partial_trace,
    pure_marginal,
    schmidt_values,
)

NORM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
MAX_QUBITS = 6


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for the given seed (int or numpy SeedSequence)."""
    return np.random.Generator(np.random.PCG64(seed))


def _check_n_qubits(n: int, lo: int = 1) -> int:
    n = int(n)
    if n < lo or n > MAX_QUBITS:
        raise SizeOutOfRange(f"register size {n} outside [{lo}, {MAX_QUBITS}]")
    return n


@dataclass
class PureState:
    """Normalized amplitude vector over a register of ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.n_qubits = _check_n_qubits(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise BadParameter(
                f"expected {2**self.n_qubits} amplitudes, got {amps.size}"
            )
        if not (np.all(np.isfinite(amps.real)) and np.all(np.isfinite(amps.imag))):
            raise NonFinite("amplitudes contain NaN or Inf")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise BadParameter(f"state norm^2 = {norm_sq!r} deviates from 1")
        self.amplitudes = amps

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def marginal(self, keep: Sequence[int]) -> "DensityMatrix":
        """Reduced density matrix on the kept qubits (ascending label order)."""
        mat = pure_marginal(self.amplitudes, self.n_qubits, keep)
        return DensityMatrix(len(list(keep)), mat)

    def schmidt(self, cut: Sequence[int]) -> np.ndarray:
        """Squared Schmidt coefficients across side-A labels ``cut``, descending."""
        return schmidt_values(self.amplitudes, self.n_qubits, cut)


@dataclass
class DensityMatrix:
    """Hermitian, PSD, trace-one matrix over a qubit register."""

    n_qubits: int
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.n_qubits = _check_n_qubits(self.n_qubits)
        dim = 2**self.n_qubits
        mat = check_hermitian(self.matrix, HERMITICITY_TOL)
        if mat.shape != (dim, dim):
            raise BadParameter(f"matrix shape {mat.shape} does not match {self.n_qubits} qubits")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise BadParameter(f"trace = {tr!r} deviates from 1")
        evals = hermitian_eig(mat).eigenvalues
        if evals[-1] < -PSD_TOL:
            raise BadParameter(f"min eigenvalue {evals[-1]:.3e} below -{PSD_TOL:.1e}")
        self.matrix = mat
        self.eigenvalues = evals

    def partial_trace(self, keep: Sequence[int]) -> "DensityMatrix":
        """Trace out every qubit not in ``keep``."""
        mat = partial_trace(self.matrix, self.n_qubits, keep)
        return DensityMatrix(len(list(keep)), mat)

    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.sum(self.eigenvalues > tol))


# ---------------------------------------------------------------------------
# canonical families


def w_state(n: int) -> PureState:
    """(|10...0> + |01...0> + ... + |00...1>) / sqrt(n)."""
    n = _check_n_qubits(n, lo=2)
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n):
        amps[1 << (n - 1 - k)] = 1.0 / np.sqrt(n)
    return PureState(n, amps)


def ghz_state(n: int) -> PureState:
    """(|0...0> + |1...1>) / sqrt(2)."""
    n = _check_n_qubits(n, lo=2)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2)
    return PureState(n, amps)


def product_state(locals_: Sequence) -> PureState:
    """Kronecker product of single-qubit states (PureState or length-2 vectors)."""
    vecs = []
    for loc in locals_:
        v = loc.amplitudes if isinstance(loc, PureState) else np.asarray(loc, dtype=complex)
        if v.shape != (2,):
            raise BadParameter("product_state factors must be single-qubit states")
        vecs.append(v)
    n = _check_n_qubits(len(vecs), lo=2)
    amps = vecs[0]
    for v in vecs[1:]:
        amps = np.kron(amps, v)
    return PureState(n, amps)


def bell_state() -> PureState:
    """(|00> + |11>) / sqrt(2)."""
    return ghz_state(2)


def haar_random_pure(n: int, seed) -> PureState:
    """Normalized vector of iid complex standard Gaussians (Haar distributed)."""
    n = _check_n_qubits(n)
    rng = make_rng(seed)
    g = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(n, g / np.linalg.norm(g))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via Gram-Schmidt of Gaussian columns.

    Each orthonormalized column is rephased so its first nonzero entry is
    real positive, which fixes the gauge and makes draws reproducible.
    """
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q = np.zeros_like(g)
    for j in range(dim):
        v = g[:, j]
        for i in range(j):
            v = v - q[:, i] * (q[:, i].conj() @ v)
        v = v / np.linalg.norm(v)
        nz = np.argmax(np.abs(v) > 1e-12)
        phase = v[nz] / abs(v[nz])
        q[:, j] = v / phase
    return q


def random_local_unitary(n: int, seed) -> np.ndarray:
    """Kronecker product of independent Haar 2x2 blocks, one per qubit."""
    n = _check_n_qubits(n)
    rng = make_rng(seed)
    u = haar_unitary(2, rng)
    for _ in range(n - 1):
        u = np.kron(u, haar_unitary(2, rng))
    return u


def random_mixed(n: int, rank: int, seed) -> DensityMatrix:
    """Random density matrix of rank <= ``rank``.

    Equivalent to partially tracing a Haar-random pure state whose ancilla
    is restricted to a rank-dimensional support: sample a Gaussian
    2^n x rank matrix G, normalize, and form G G^dag.
    """
    n = _check_n_qubits(n)
    rank = int(rank)
    if rank < 1 or rank > 2**n:
        raise BadRank(f"rank {rank} outside [1, {2**n}]")
    rng = make_rng(seed)
    g = rng.standard_normal((2**n, rank)) + 1j * rng.standard_normal((2**n, rank))
    g = g / np.linalg.norm(g)
    return DensityMatrix(n, g @ g.conj().T)


def werner(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1 - p) I/4 on two qubits."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"p = {p} outside [0, 1]")
    phi = bell_state().amplitudes
    mat = p * np.outer(phi, phi.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(2, mat)


# ---------------------------------------------------------------------------
# JSON state files


def state_to_json(state) -> dict:
    """JSON-ready dict for a PureState or DensityMatrix."""
    if isinstance(state, PureState):
        return {
            "n_qubits": state.n_qubits,
            "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
        }
    if isinstance(state, DensityMatrix):
        return {
            "n_qubits": state.n_qubits,
            "matrix": [
                [[float(e.real), float(e.imag)] for e in row] for row in state.matrix
            ],
        }
    raise ParseError(f"cannot serialize object of type {type(state).__name__}")


def state_from_json(data: dict):
    """Inverse of state_to_json; raises ParseError on malformed input."""
    try:
        n = int(data["n_qubits"])
        if "amplitudes" in data:
            amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
            return PureState(n, amps)
        if "matrix" in data:
            mat = np.array(
                [[complex(re, im) for re, im in row] for row in data["matrix"]]
            )
            return DensityMatrix(n, mat)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state record: {exc}") from exc
    raise ParseError("state record has neither 'amplitudes' nor 'matrix'")


def load_state_file(path):
    """Read a JSON state file into a PureState or DensityMatrix."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path} does not hold a JSON object")
    return state_from_json(data)


def save_state_file(path, state) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_json(state), fh)
        fh.write("\n")
