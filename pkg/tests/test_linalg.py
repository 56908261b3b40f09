"""Kernel tests: Jacobi eigensolver, partial trace, Schmidt spectra."""

import numpy as np
import pytest

from gqcon import linalg
from gqcon.errors import BadCut, BadSubsystem, NegativeEigenvalue, NonFinite, NonHermitianInput


def random_hermitian(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def brute_partial_trace(mat, n_qubits, keep):
    """Index-summation oracle, independent of the einsum implementation."""
    keep = sorted(keep)
    traced = [k for k in range(n_qubits) if k not in keep]
    d_keep = 2 ** len(keep)
    out = np.zeros((d_keep, d_keep), dtype=complex)

    def full_index(keep_bits, traced_bits):
        idx = 0
        for pos, k in enumerate(keep):
            idx |= keep_bits[pos] << (n_qubits - 1 - k)
        for pos, t in enumerate(traced):
            idx |= traced_bits[pos] << (n_qubits - 1 - t)
        return idx

    for a in range(d_keep):
        abits = [(a >> (len(keep) - 1 - p)) & 1 for p in range(len(keep))]
        for b in range(d_keep):
            bbits = [(b >> (len(keep) - 1 - p)) & 1 for p in range(len(keep))]
            for t in range(2 ** len(traced)):
                tbits = [(t >> (len(traced) - 1 - p)) & 1 for p in range(len(traced))]
                out[a, b] += mat[full_index(abits, tbits), full_index(bbits, tbits)]
    return out


def test_eig_diagonal():
    ev, _ = linalg.hermitian_eig(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(ev, [3.0, 2.0, 1.0], atol=1e-12)


def test_eig_pauli_x():
    ev, vec = linalg.hermitian_eig(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(ev, [1.0, -1.0], atol=1e-12)
    assert np.max(np.abs(vec.conj().T @ vec - np.eye(2))) < 1e-10


def test_eig_2x2_closed_form():
    # quadratic-formula oracle: roots of the characteristic polynomial
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = random_hermitian(2, rng)
        tr = a[0, 0].real + a[1, 1].real
        det = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).real
        root = np.sqrt(max(tr * tr - 4 * det, 0.0))
        expected = np.array([(tr + root) / 2, (tr - root) / 2])
        ev, _ = linalg.hermitian_eig(a)
        assert np.allclose(ev, expected, atol=1e-10)


def test_eig_reconstruction_and_unitarity():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4, 8, 16):
        a = random_hermitian(n, rng)
        ev, vec = linalg.hermitian_eig(a)
        assert np.all(np.diff(ev) <= 1e-12)
        assert np.max(np.abs((vec * ev) @ vec.conj().T - a)) < 1e-10
        assert np.max(np.abs(vec.conj().T @ vec - np.eye(n))) < 1e-10


def test_eig_tie_break_stable():
    ev, vec = linalg.hermitian_eig(np.eye(4, dtype=complex))
    assert np.allclose(ev, np.ones(4))
    assert np.allclose(vec, np.eye(4))


def test_eig_rejects_non_hermitian_and_non_finite():
    with pytest.raises(NonHermitianInput):
        linalg.hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NonFinite):
        linalg.hermitian_eig(np.array([[np.nan, 0], [0, 1]], dtype=complex))


def test_psd_sqrt_examples():
    assert np.allclose(linalg.psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)
    assert np.allclose(linalg.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-10)
    v = np.array([1.0, 1j]) / np.sqrt(2)
    proj = np.outer(v, v.conj())
    assert np.allclose(linalg.psd_sqrt(proj), proj, atol=1e-10)


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(3)
    for n in (2, 4, 8):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = g @ g.conj().T
        root = linalg.psd_sqrt(a)
        assert np.max(np.abs(root @ root - a)) < 1e-8 * max(1, np.linalg.norm(a))


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NegativeEigenvalue):
        linalg.psd_sqrt(np.diag([1.0, -1e-6]))


def test_partial_trace_bell():
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    rho = np.outer(phi, phi.conj())
    assert np.allclose(linalg.partial_trace(rho, 2, [0]), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_product():
    # |0> (x) |1>, keep qubit 0 -> |0><0|
    phi = np.zeros(4, dtype=complex)
    phi[1] = 1.0
    rho = np.outer(phi, phi.conj())
    assert np.allclose(linalg.partial_trace(rho, 2, [0]), np.diag([1.0, 0.0]), atol=1e-12)


def test_partial_trace_w3_marginal():
    # expand the W state and trace qubit 2 by direct summation
    w = np.zeros(8, dtype=complex)
    w[[4, 2, 1]] = 1 / np.sqrt(3)
    rho = np.outer(w, w.conj())
    got = linalg.partial_trace(rho, 3, [0, 1])
    psi_plus = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    expected = (2 / 3) * np.outer(psi_plus, psi_plus.conj())
    expected[0, 0] += 1 / 3
    assert np.allclose(got, expected, atol=1e-12)
    assert np.allclose(got, brute_partial_trace(rho, 3, [0, 1]), atol=1e-12)


def test_partial_trace_matches_brute_force():
    rng = np.random.default_rng(5)
    for n, keep in [(3, [1]), (4, [0, 2]), (4, [3]), (5, [1, 4])]:
        g = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        g /= np.linalg.norm(g)
        rho = np.outer(g, g.conj())
        got = linalg.partial_trace(rho, n, keep)
        assert np.allclose(got, brute_partial_trace(rho, n, keep), atol=1e-12)
        assert abs(np.trace(got).real - 1.0) < 1e-12
        assert np.max(np.abs(got - got.conj().T)) < 1e-12


def test_partial_trace_rejects_bad_subsystem():
    rho = np.eye(4) / 4
    with pytest.raises(BadSubsystem):
        linalg.partial_trace(rho, 2, [])
    with pytest.raises(BadSubsystem):
        linalg.partial_trace(rho, 2, [0, 1])
    with pytest.raises(BadSubsystem):
        linalg.partial_trace(rho, 2, [0, 0])
    with pytest.raises(BadSubsystem):
        linalg.partial_trace(rho, 2, [2])


def test_schmidt_examples():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    assert np.allclose(linalg.schmidt_values(bell, 2, [0]), [0.5, 0.5], atol=1e-12)
    prod = np.zeros(4, dtype=complex)
    prod[1] = 1.0
    assert np.allclose(linalg.schmidt_values(prod, 2, [0]), [1.0, 0.0], atol=1e-12)
    w = np.zeros(8, dtype=complex)
    w[[4, 2, 1]] = 1 / np.sqrt(3)
    assert np.allclose(linalg.schmidt_values(w, 3, [0]), [2 / 3, 1 / 3], atol=1e-12)


def test_schmidt_two_sides_agree():
    rng = np.random.default_rng(9)
    for n, cut in [(3, [0]), (4, [0, 1]), (4, [2]), (5, [0, 3])]:
        g = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        g /= np.linalg.norm(g)
        side_a = linalg.schmidt_values(g, n, cut)
        other = [k for k in range(n) if k not in cut]
        side_b = linalg.schmidt_values(g, n, other)
        k = min(side_a.size, side_b.size)
        assert np.allclose(side_a[:k], side_b[:k], atol=1e-10)
        assert np.all(side_a[k:] < 1e-10)
        assert np.all(side_b[k:] < 1e-10)
        assert abs(side_a.sum() - 1.0) < 1e-10


def test_schmidt_rejects_bad_cut():
    g = np.ones(4, dtype=complex) / 2
    with pytest.raises(BadCut):
        linalg.schmidt_values(g, 2, [0, 1])
    with pytest.raises(BadCut):
        linalg.schmidt_values(g, 2, [])
