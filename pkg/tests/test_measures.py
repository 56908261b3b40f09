"""Closed-form measures: values, axioms, and the conversion curve h_q."""

import numpy as np
import pytest

from gqcon import measures, states
from gqcon.errors import BadDimension, BadDomain, BadQ, BadRank, RegimeError
from gqcon.measures import (
    QParam,
    coa_two_qubit,
    concurrence_pure,
    gq_functional,
    gq_lower_bound_2xd,
    gq_max_two_qubit,
    gq_pure,
    gq_two_qubit_mixed,
    gqcoa_lower_bound,
    h_q,
    wootters_concurrence,
)


def random_schmidt(rng, d):
    lam = rng.random(d)
    lam /= lam.sum()
    return np.sort(lam)[::-1]


def test_qparam():
    assert QParam(1.5).analytic_regime
    assert QParam(2.0).analytic_regime
    assert not QParam(3.0).analytic_regime
    with pytest.raises(BadQ):
        QParam(1.0)
    with pytest.raises(BadQ):
        QParam(0.5)


def test_gq_pure_examples():
    assert gq_pure([1.0, 0.0], 1.7) == 0.0
    for q in (1.1, 1.5, 2.0, 3.0):
        expected = (1 - 2 ** (1 - q)) ** (1 / q)
        assert abs(gq_pure([0.5, 0.5], q) - expected) < 1e-14
    assert abs(gq_pure([0.5, 0.5], 2.0) - 1 / np.sqrt(2)) < 1e-14
    with pytest.raises(BadQ):
        gq_pure([0.5, 0.5], 1.0)


def test_gq_pure_faithfulness():
    rng = np.random.default_rng(0)
    # rank-1 fixtures vanish exactly
    for d in (2, 3, 4):
        lam = np.zeros(d)
        lam[0] = 1.0
        assert gq_pure(lam, 1.5) == 0.0
    # entangled spectra are strictly positive
    for _ in range(1000):
        lam = random_schmidt(rng, int(rng.integers(2, 5)))
        if lam[1] > 1e-6:
            assert gq_pure(lam, float(rng.uniform(1.05, 3.0))) > 0.0


def test_qconcurrence_power_identity():
    # value^q recovers 1 - sum(lam^q)
    rng = np.random.default_rng(1)
    for _ in range(20):
        lam = random_schmidt(rng, 3)
        q = float(rng.uniform(1.1, 2.5))
        assert abs(gq_pure(lam, q) ** q - (1 - np.sum(lam**q))) < 1e-12


def test_concurrence_pure():
    assert abs(concurrence_pure([0.5, 0.5]) - 1.0) < 1e-14
    assert concurrence_pure([1.0, 0.0]) == 0.0
    assert abs(concurrence_pure([2 / 3, 1 / 3]) - 2 * np.sqrt(2) / 3) < 1e-14
    with pytest.raises(BadRank):
        concurrence_pure([0.5, 0.3, 0.2])


def test_w_state_cut_concurrence():
    for n in range(3, 7):
        lam = states.w_state(n).schmidt([0])
        assert abs(concurrence_pure(lam) - 2 * np.sqrt(n - 1) / n) < 1e-12


def test_wootters_examples():
    bell = states.bell_state().density()
    assert abs(wootters_concurrence(bell) - 1.0) < 1e-12
    maximally_mixed = states.DensityMatrix(2, np.eye(4) / 4)
    assert wootters_concurrence(maximally_mixed) == 0.0
    with pytest.raises(BadDimension):
        wootters_concurrence(states.w_state(3).density())


def test_h_q_closed_forms():
    xs = np.linspace(0, 1, 101)
    assert np.max(np.abs(h_q(xs, 2.0) - xs / np.sqrt(2))) < 1e-14
    assert np.max(np.abs(h_q(xs, 3.0) - (0.75) ** (1 / 3) * xs ** (2 / 3))) < 1e-13
    assert h_q(0.0, 1.5) == 0.0
    for q in (1.2, 1.8, 2.0):
        assert abs(h_q(1.0, q) - gq_max_two_qubit(q)) < 1e-15
    with pytest.raises(BadDomain):
        h_q(1.1, 1.5)
    with pytest.raises(BadDomain):
        h_q(-0.1, 1.5)
    # inputs within 1e-10 of the domain edge are clamped
    assert h_q(1.0 + 5e-11, 1.5) == h_q(1.0, 1.5)


def test_h_q_matches_pure_two_qubit_values():
    # h_q(2 sqrt(l1 l2)) equals the Schmidt-spectrum formula exactly
    rng = np.random.default_rng(2)
    for _ in range(100):
        lam = random_schmidt(rng, 2)
        q = float(rng.uniform(1.05, 3.0))
        conc = concurrence_pure(lam)
        assert abs(h_q(conc, q) - gq_pure(lam, q)) < 1e-12


def test_h_q_monotone_and_convex():
    xs = np.arange(0.0, 1.0 + 5e-4, 1e-3)
    for q in np.arange(1.1, 2.01, 0.1):
        vals = h_q(xs, float(q))
        assert np.min(np.diff(vals)) >= -1e-9
        second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
        assert np.min(second) >= -1e-7


def test_h3_not_convex():
    xs = np.arange(0.0, 1.0 + 5e-4, 1e-3)
    vals = (0.75) ** (1 / 3) * xs ** (2 / 3)
    second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    assert np.min(second) < -1e-7
    direct = h_q(xs, 3.0)
    second_direct = direct[2:] - 2 * direct[1:-1] + direct[:-2]
    assert np.min(second_direct) < -1e-7


def test_gq_two_qubit_mixed():
    bell = states.bell_state().density()
    assert abs(gq_two_qubit_mixed(bell, 2.0) - 1 / np.sqrt(2)) < 1e-12
    separable = states.werner(1 / 3)
    assert gq_two_qubit_mixed(separable, 1.5) == 0.0
    with pytest.raises(RegimeError):
        gq_two_qubit_mixed(bell, 2.5)


def test_gq_mixed_capped_by_max():
    for seed in range(30):
        rho = states.random_mixed(2, int(1 + seed % 4), seed)
        for q in (1.1, 1.6, 2.0):
            assert gq_two_qubit_mixed(rho, q) <= gq_max_two_qubit(q) + 1e-10


def test_lower_bounds():
    lam = np.array([2 / 3, 1 / 3])
    assert abs(gq_lower_bound_2xd(concurrence_pure(lam), 1.5) - gq_pure(lam, 1.5)) < 1e-12
    assert gq_lower_bound_2xd(0.0, 1.5) == 0.0
    with pytest.raises(RegimeError):
        gq_lower_bound_2xd(0.5, 2.5)
    # q = 2: equality with the exact mixed value on any two-qubit state
    for seed in range(10):
        rho = states.random_mixed(2, 4, seed)
        conc = wootters_concurrence(rho)
        assert abs(gq_lower_bound_2xd(conc, 2.0) - gq_two_qubit_mixed(rho, 2.0)) < 1e-12


def test_coa_examples():
    bell = states.bell_state().density()
    assert abs(coa_two_qubit(bell) - 1.0) < 1e-10
    ghz_marg = states.ghz_state(3).marginal([0, 1])
    assert abs(coa_two_qubit(ghz_marg) - 1.0) < 1e-10
    maximally_mixed = states.DensityMatrix(2, np.eye(4) / 4)
    assert abs(coa_two_qubit(maximally_mixed) - 1.0) < 1e-10


def test_gqcoa_lower_bound():
    bell = states.bell_state().density()
    assert abs(gqcoa_lower_bound(bell, 2.0) - 1 / np.sqrt(2)) < 1e-12
    prod = states.product_state([[1, 0], [0, 1]]).density()
    assert gqcoa_lower_bound(prod, 1.5) < 1e-10
    ghz_marg = states.ghz_state(3).marginal([0, 1])
    expected = (1 - 2 ** (-0.5)) ** (1 / 1.5)
    assert abs(gqcoa_lower_bound(ghz_marg, 1.5) - expected) < 1e-10


def test_lu_invariance():
    for seed in range(25):
        rho = states.random_mixed(2, 4, seed)
        u = states.random_local_unitary(2, seed + 500)
        rotated = states.DensityMatrix(2, u @ rho.matrix @ u.conj().T)
        for q in (1.1, 1.5, 2.0):
            assert abs(gq_two_qubit_mixed(rho, q) - gq_two_qubit_mixed(rotated, q)) <= 1e-8


def test_schur_concavity_under_t_transforms():
    # mixing two Schmidt weights never decreases the measure
    rng = np.random.default_rng(4)
    for _ in range(1000):
        d = int(rng.integers(2, 5))
        lam = random_schmidt(rng, d)
        i, j = sorted(rng.choice(d, size=2, replace=False))
        t = float(rng.uniform(0.0, 1.0))
        mixed = lam.copy()
        mixed[i] = t * lam[i] + (1 - t) * lam[j]
        mixed[j] = (1 - t) * lam[i] + t * lam[j]
        q = float(rng.uniform(1.05, 3.0))
        assert gq_pure(np.sort(mixed)[::-1], q) >= gq_pure(lam, q) - 1e-12


def test_subadditivity_on_product_states():
    rng = np.random.default_rng(6)
    for _ in range(200):
        lam_a = random_schmidt(rng, 2)
        lam_b = random_schmidt(rng, int(rng.integers(2, 4)))
        q = float(rng.uniform(1.05, 3.0))
        lam_prod = np.sort(np.outer(lam_a, lam_b).ravel())[::-1]
        assert gq_pure(lam_prod, q) <= gq_pure(lam_a, q) + gq_pure(lam_b, q) + 1e-12


def test_functional_concavity():
    # G_q(lam rho + mu sigma) >= lam G_q(rho) + mu G_q(sigma)
    rng = np.random.default_rng(8)
    for trial in range(200):
        n = int(rng.integers(1, 3))
        rho = states.random_mixed(n, int(rng.integers(1, 2**n + 1)), 2 * trial)
        sigma = states.random_mixed(n, int(rng.integers(1, 2**n + 1)), 2 * trial + 1)
        lam = float(rng.uniform(0, 1))
        mix = states.DensityMatrix(n, lam * rho.matrix + (1 - lam) * sigma.matrix)
        q = float(rng.uniform(1.05, 3.0))
        lhs = gq_functional(mix, q)
        rhs = lam * gq_functional(rho, q) + (1 - lam) * gq_functional(sigma, q)
        assert lhs >= rhs - 1e-12


def test_q2_consistency():
    # measure = concurrence / sqrt(2) at q = 2, on pure spectra and mixed states
    rng = np.random.default_rng(10)
    for _ in range(50):
        lam = random_schmidt(rng, 2)
        assert abs(gq_pure(lam, 2.0) - concurrence_pure(lam) / np.sqrt(2)) < 1e-12
    for seed in range(20):
        rho = states.random_mixed(2, int(1 + seed % 4), seed)
        assert abs(gq_two_qubit_mixed(rho, 2.0) - wootters_concurrence(rho) / np.sqrt(2)) < 1e-10
