"""Convex-roof optimization over pure-state ensemble decompositions.

A rank-r mixed state's decompositions into m pure states are swept out by
m x r isometries applied to the scaled eigenbasis (the purification-mixture
parametrization), so optimizing over decompositions means optimizing over
the isometry manifold.  The optimizer is derivative-free: random isometry
restarts followed by coordinate sweeps of two-parameter plane rotations
(mixing angle + relative phase) between ensemble members.  Each rotation
is optimized by a coarse grid, two zooming 5x5 refinements, and a final
quadratic-fit step on the finest grid.

Restarts evolve independently from per-restart seeds spawned off the
master seed, so results are deterministic restart by restart and the best
value is monotone in the restart count.  roof_minimize over-estimates the
roof minimum (any feasible ensemble does) and roof_maximize
under-estimates the roof maximum, which is the safe direction for both
oracle uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadParameter, BadRank, NotIsometry
from .linalg import hermitian_eig, split_cut
from .measures import _as_q, gq_pure
from .states import DensityMatrix, PureState, make_rng

RANK_TOL = 1e-9
_ZERO_WEIGHT = 1e-14

# line-search grids: a coarse pass over the full (theta, phi) cell, then
# zooming 5x5 refinements centred on the running best.  The shrink factor
# must stay above 0.25 so each window still covers the half-spacing
# uncertainty of the previous grid.
_THETA0 = np.linspace(-np.pi / 2, np.pi / 2, 9)
_PHI0 = np.linspace(0.0, np.pi, 8, endpoint=False)
_ZOOM_FACTOR = 0.6
_ZOOM_SHRINK = 0.35
_N_ZOOMS = 3
# near-convergence sweeps switch to a local ladder: a narrow mixing-angle
# window (the coarse scans have already stalled) zoomed much deeper.  The
# objective has conical points wherever a member's cross-cut coefficient
# matrix becomes singular, and only fine angular resolution makes progress
# there; the conical tail also converges slowly, so polishing is capped.
_LOCAL_HW = 0.15
_N_ZOOMS_LOCAL = 9
_DEEP_PATIENCE = 300


@dataclass
class RoofConfig:
    """Knobs for the ensemble optimizer.

    ensemble_size None means min(rank^2, 8), never below the state rank.
    """

    ensemble_size: int | None = None
    restarts: int = 32
    max_iters: int = 500
    step_tolerance: float = 1e-9

    def __post_init__(self):
        if self.restarts < 1:
            raise BadParameter("restarts must be >= 1")
        if self.max_iters < 1:
            raise BadParameter("max_iters must be >= 1")


@dataclass
class EnsembleDecomposition:
    """Weighted pure states reproducing a target density matrix."""

    probabilities: np.ndarray
    members: list[PureState]
    reconstruction_error: float = 0.0


@dataclass
class RoofResult:
    value: float
    ensemble: EnsembleDecomposition
    restarts_used: int
    converged: bool


def _rank_and_basis(rho: DensityMatrix) -> tuple[int, np.ndarray]:
    """Numerical rank at RANK_TOL and the scaled eigenbasis columns."""
    evals, evecs = hermitian_eig(rho.matrix)
    r = max(1, int(np.sum(evals > RANK_TOL)))
    lam = np.maximum(evals[:r], 0.0)
    return r, evecs[:, :r] * np.sqrt(lam)


def decomposition_from_isometry(rho: DensityMatrix, v: np.ndarray) -> EnsembleDecomposition:
    """Ensemble whose members are isometry-mixed scaled eigenvectors of rho.

    Member i is the normalization of sum_k V[i, k] sqrt(e_k) |v_k> with
    weight equal to its squared norm; any isometry reproduces rho exactly.
    Members with weight below 1e-14 are dropped.
    """
    v = np.asarray(v, dtype=complex)
    r, basis = _rank_and_basis(rho)
    if v.ndim != 2 or v.shape[1] != r or v.shape[0] < r:
        raise NotIsometry(f"expected an m x {r} matrix with m >= {r}, got {v.shape}")
    dev = np.max(np.abs(v.conj().T @ v - np.eye(r)))
    if dev > 1e-8:
        raise NotIsometry(f"max |V^dag V - I| = {dev:.3e} exceeds 1e-8")
    cols = basis @ v.T  # column i = unnormalized member i
    weights = np.sum(np.abs(cols) ** 2, axis=0)
    recon = cols @ cols.conj().T
    err = float(np.max(np.abs(recon - rho.matrix)))
    probs = []
    members = []
    for i in range(v.shape[0]):
        if weights[i] > _ZERO_WEIGHT:
            probs.append(float(weights[i]))
            members.append(PureState(rho.n_qubits, cols[:, i] / np.sqrt(weights[i])))
    return EnsembleDecomposition(np.array(probs), members, err)


def ensemble_average(ensemble: EnsembleDecomposition, fn) -> float:
    return float(sum(p * fn(member) for p, member in zip(ensemble.probabilities, ensemble.members)))


# ---------------------------------------------------------------------------
# objectives
#
# An objective turns unnormalized member vectors into weighted values
# t_i * f(member_i / sqrt(t_i)); the ensemble average is their sum.  The
# optimizer row axis may carry different parameters per row, so objectives
# are sliced alongside the batch when converged rows are compacted away.
# ``pair_prepare``/``pair_eval`` factor the rotation line search so that
# per-pair setup work is done once per sweep visit, not once per grid.


def _weighted_value_from_trace_det(t, det, q_rows):
    """t * (1 - lam1^q - lam2^q)^(1/q) from a 2x2 Gram trace and determinant."""
    root = np.sqrt(np.maximum(t * t - 4.0 * det, 0.0))
    tt = np.where(t > _ZERO_WEIGHT, t, 1.0)
    lam_hi = np.clip((t + root) / (2.0 * tt), 0.0, 1.0)
    lam_lo = np.clip((t - root) / (2.0 * tt), 0.0, 1.0)
    rad = np.maximum(1.0 - lam_hi**q_rows - lam_lo**q_rows, 0.0)
    return np.where(t > _ZERO_WEIGHT, t * rad ** (1.0 / q_rows), 0.0)


class SchmidtObjective:
    """Ensemble-averaged measure across a register cut.

    Members arrive as unnormalized vectors with leading batch axes; the
    first axis is the optimizer row axis.  When the smaller side of the
    cut is a single qubit, the pair line search runs on closed-form 2x2
    Gram combinations instead of materializing candidate vectors.
    """

    def __init__(self, n_qubits: int, cut: Sequence[int], q: float):
        self.n_qubits = n_qubits
        side_a, side_b = split_cut(n_qubits, cut)
        if len(side_a) <= len(side_b):
            self.perm = tuple(side_a + side_b)
        else:
            self.perm = tuple(side_b + side_a)
        self.d_small = 2 ** min(len(side_a), len(side_b))
        self.d_large = 2 ** max(len(side_a), len(side_b))
        self.q = float(q)

    def sliced(self, rows) -> "SchmidtObjective":
        return self

    def _to_matrix(self, members: np.ndarray) -> np.ndarray:
        """Reshape (..., 2^n) members to (..., d_small, d_large)."""
        lead = members.shape[:-1]
        psi = members.reshape(lead + (2,) * self.n_qubits)
        axes = tuple(range(len(lead))) + tuple(len(lead) + p for p in self.perm)
        return psi.transpose(axes).reshape(lead + (self.d_small, self.d_large))

    def member_values(self, members: np.ndarray) -> np.ndarray:
        """Weighted values for members shaped (..., 2^n)."""
        m = self._to_matrix(members)
        gram = m @ m.conj().swapaxes(-1, -2)
        if self.d_small == 2:
            t = (gram[..., 0, 0] + gram[..., 1, 1]).real
            det = (gram[..., 0, 0] * gram[..., 1, 1] - gram[..., 0, 1] * gram[..., 1, 0]).real
            return _weighted_value_from_trace_det(t, det, self.q)
        w = np.linalg.eigvalsh(gram)
        t = np.maximum(w.sum(-1), 0.0)
        tt = np.where(t > _ZERO_WEIGHT, t, 1.0)
        lam = np.clip(w / tt[..., None], 0.0, 1.0)
        rad = np.maximum(1.0 - (lam**self.q).sum(-1), 0.0)
        return np.where(t > _ZERO_WEIGHT, t * rad ** (1.0 / self.q), 0.0)

    def pair_prepare(self, pi: np.ndarray, pj: np.ndarray):
        if self.d_small != 2:
            return pi, pj
        mi = self._to_matrix(pi)  # (rows, P, 2, dB)
        mj = self._to_matrix(pj)
        mjh = mj.conj().swapaxes(-1, -2)
        g_ii = mi @ mi.conj().swapaxes(-1, -2)
        g_jj = mj @ mjh
        z = mi @ mjh
        return (
            g_ii[..., 0, 0].real[..., None],
            g_ii[..., 1, 1].real[..., None],
            g_ii[..., 0, 1][..., None],
            g_jj[..., 0, 0].real[..., None],
            g_jj[..., 1, 1].real[..., None],
            g_jj[..., 0, 1][..., None],
            z[..., 0, 0][..., None],
            z[..., 0, 1][..., None],
            z[..., 1, 0][..., None],
            z[..., 1, 1][..., None],
        )

    def pair_eval(self, ctx, theta, phi):
        """Values of both rotated members over an angle grid (rows, P, L)."""
        if self.d_small != 2:
            pi, pj = ctx
            return _materialized_pair_values(self.member_values, pi, pj, theta, phi)
        a00, a11, a01, b00, b11, b01, z00, z01, z10, z11 = ctx
        c = np.cos(theta)
        s = np.sin(theta)
        c2 = c * c
        s2 = s * s
        cs = c * s
        ec = np.exp(-1j * phi)
        cross00 = 2.0 * cs * (ec * z00).real
        cross11 = 2.0 * cs * (ec * z11).real
        cross01 = cs * (ec * z01 + np.conj(ec * z10))

        g00 = c2 * a00 + s2 * b00 + cross00
        g11 = c2 * a11 + s2 * b11 + cross11
        g01 = c2 * a01 + s2 * b01 + cross01
        t_i = g00 + g11
        det_i = g00 * g11 - (g01 * g01.conj()).real
        vi = _weighted_value_from_trace_det(t_i, det_i, self.q)

        g00 = s2 * a00 + c2 * b00 - cross00
        g11 = s2 * a11 + c2 * b11 - cross11
        g01 = s2 * a01 + c2 * b01 - cross01
        t_j = g00 + g11
        det_j = g00 * g11 - (g01 * g01.conj()).real
        vj = _weighted_value_from_trace_det(t_j, det_j, self.q)
        return vi, vj


def _materialized_pair_values(member_values, pi, pj, theta, phi):
    """Generic pair line search: build candidate vectors and evaluate."""
    c = np.cos(theta)
    s = np.sin(theta)
    e = np.exp(1j * phi)
    cand_i = c[..., None] * pi[:, :, None, :] + (s * e)[..., None] * pj[:, :, None, :]
    cand_j = (-s * np.conj(e))[..., None] * pi[:, :, None, :] + c[..., None] * pj[:, :, None, :]
    return member_values(cand_i), member_values(cand_j)


# ---------------------------------------------------------------------------
# sweep optimizer


def _round_robin_rounds(m: int) -> list[list[tuple[int, int]]]:
    """All unordered pairs of range(m), grouped into rounds of disjoint pairs."""
    if m < 2:
        return []
    players: list[int | None] = list(range(m)) if m % 2 == 0 else [*range(m), None]
    mm = len(players)
    rounds = []
    for _ in range(mm - 1):
        pairs = []
        for k in range(mm // 2):
            a, b = players[k], players[mm - 1 - k]
            if a is not None and b is not None:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(pairs)
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def _grid_best(tot, th, ph, vi, vj, maximize):
    pick = np.argmax(tot, axis=-1) if maximize else np.argmin(tot, axis=-1)
    take = np.take_along_axis
    sel = pick[..., None]
    return (
        pick,
        take(th, sel, -1)[..., 0],
        take(ph, sel, -1)[..., 0],
        take(vi, sel, -1)[..., 0],
        take(vj, sel, -1)[..., 0],
    )


def _quad_vertex(tot, pick, step_th, step_ph):
    """Quadratic-fit offsets (in grid steps) around the best cell of a 5x5 grid.

    Returns (d_th, d_ph) clamped to +-1.5 steps; zero wherever the local
    Hessian fit is not usably positive (or negative) definite.
    """
    row = np.clip(pick // 5, 1, 3)
    col = np.clip(pick % 5, 1, 3)
    take = np.take_along_axis

    def at(dr, dc):
        idx = (row + dr) * 5 + (col + dc)
        return take(tot, idx[..., None], -1)[..., 0]

    f0 = at(0, 0)
    f_tp = at(1, 0)
    f_tm = at(-1, 0)
    f_pp = at(0, 1)
    f_pm = at(0, -1)
    g_t = 0.5 * (f_tp - f_tm)
    g_p = 0.5 * (f_pp - f_pm)
    h_tt = f_tp - 2.0 * f0 + f_tm
    h_pp = f_pp - 2.0 * f0 + f_pm
    h_tp = 0.25 * (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1))
    det = h_tt * h_pp - h_tp * h_tp
    safe = np.abs(det) > 1e-300
    det_s = np.where(safe, det, 1.0)
    d_th = np.where(safe, -(h_pp * g_t - h_tp * g_p) / det_s, 0.0)
    d_ph = np.where(safe, -(h_tt * g_p - h_tp * g_t) / det_s, 0.0)
    d_th = np.clip(d_th, -1.5, 1.5)
    d_ph = np.clip(d_ph, -1.5, 1.5)
    return d_th * step_th, d_ph * step_ph


def _pair_round_update(psi, v, contrib, pairs, objective, maximize, local=False):
    """Line-search the plane rotation of each disjoint pair and apply winners."""
    i_idx = [p[0] for p in pairs]
    j_idx = [p[1] for p in pairs]
    pi = psi[:, i_idx]
    pj = psi[:, j_idx]
    n_rows, n_pairs = pi.shape[0], pi.shape[1]
    ctx = objective.pair_prepare(pi, pj)

    if local:
        theta0 = np.linspace(-_LOCAL_HW, _LOCAL_HW, 5)
        n_zooms = _N_ZOOMS_LOCAL
    else:
        theta0 = _THETA0
        n_zooms = _N_ZOOMS
    th = np.broadcast_to(
        np.repeat(theta0, _PHI0.size), (n_rows, n_pairs, theta0.size * _PHI0.size)
    )
    ph = np.broadcast_to(
        np.tile(_PHI0, theta0.size), (n_rows, n_pairs, theta0.size * _PHI0.size)
    )
    vi, vj = objective.pair_eval(ctx, th, ph)
    _, best_th, best_ph, best_vi, best_vj = _grid_best(vi + vj, th, ph, vi, vj, maximize)

    hw_th = (theta0[1] - theta0[0]) * _ZOOM_FACTOR
    hw_ph = (_PHI0[1] - _PHI0[0]) * _ZOOM_FACTOR
    offs = np.linspace(-1.0, 1.0, 5)
    d_th = np.repeat(offs, offs.size)
    d_ph = np.tile(offs, offs.size)
    for zoom in range(n_zooms):
        th = best_th[..., None] + hw_th * d_th
        ph = best_ph[..., None] + hw_ph * d_ph
        vi, vj = objective.pair_eval(ctx, th, ph)
        tot = vi + vj
        pick, best_th, best_ph, best_vi, best_vj = _grid_best(tot, th, ph, vi, vj, maximize)
        if zoom == n_zooms - 1:
            # quadratic vertex of the finest grid as one extra candidate
            off_th, off_ph = _quad_vertex(tot, pick, hw_th * 0.5, hw_ph * 0.5)
            th = (best_th + off_th)[..., None]
            ph = (best_ph + off_ph)[..., None]
            vi, vj = objective.pair_eval(ctx, th, ph)
            better = (vi + vj > (best_vi + best_vj)[..., None]) if maximize else (
                vi + vj < (best_vi + best_vj)[..., None]
            )
            w = better[..., 0]
            best_th = np.where(w, th[..., 0], best_th)
            best_ph = np.where(w, ph[..., 0], best_ph)
            best_vi = np.where(w, vi[..., 0], best_vi)
            best_vj = np.where(w, vj[..., 0], best_vj)
        hw_th *= _ZOOM_SHRINK
        hw_ph *= _ZOOM_SHRINK

    current = contrib[:, i_idx] + contrib[:, j_idx]
    better = (best_vi + best_vj > current) if maximize else (best_vi + best_vj < current)
    c = np.where(better, np.cos(best_th), 1.0)
    s = np.where(better, np.sin(best_th), 0.0)
    e = np.where(better, np.exp(1j * best_ph), 1.0)
    se = (s * e)[..., None]
    cc = c[..., None]
    psi[:, i_idx] = cc * pi + se * pj
    psi[:, j_idx] = -np.conj(se) * pi + cc * pj
    vi_rows = v[:, i_idx]
    vj_rows = v[:, j_idx]
    v[:, i_idx] = cc * vi_rows + se * vj_rows
    v[:, j_idx] = -np.conj(se) * vi_rows + cc * vj_rows
    contrib[:, i_idx] = np.where(better, best_vi, contrib[:, i_idx])
    contrib[:, j_idx] = np.where(better, best_vj, contrib[:, j_idx])


def optimize_ensemble(
    rho: DensityMatrix,
    objective,
    cfg: RoofConfig,
    seed,
    maximize: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sweep-optimize the ensemble average of ``objective`` over decompositions.

    Restart 0 starts from the identity isometry (the eigendecomposition
    ensemble) so the result can never be worse than that baseline; the
    remaining restarts start from Gaussian isometries orthonormalized by
    QR, seeded independently per restart.  Returns per-restart isometries,
    objective values, and convergence flags; a restart converges when a
    full sweep improves it by less than step_tolerance, after which it is
    compacted out of the working batch.
    """
    r, basis = _rank_and_basis(rho)
    m = cfg.ensemble_size if cfg.ensemble_size is not None else min(r * r, 8)
    if m < r:
        raise BadRank(f"ensemble size {m} below state rank {r}")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(cfg.restarts)
    v = np.zeros((cfg.restarts, m, r), dtype=complex)
    v[0, :r, :r] = np.eye(r)
    for k in range(1, cfg.restarts):
        rng = make_rng(children[k])
        g = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
        v[k] = np.linalg.qr(g)[0][:, :r]
    psi = np.einsum("Rmk,dk->Rmd", v, basis)
    contrib = objective.member_values(psi)
    obj = contrib.sum(axis=1)
    rounds = _round_robin_rounds(m)
    act = np.arange(cfg.restarts) if rounds else np.arange(0)
    converged = np.zeros(cfg.restarts, dtype=bool) if rounds else np.ones(cfg.restarts, dtype=bool)
    # a restart that stalls at the coarse ladder switches to the deep one
    # for the rest of its run; restarts stay independent throughout
    deep_mode = np.zeros(cfg.restarts, dtype=bool)
    deep_count = np.zeros(cfg.restarts, dtype=int)
    frozen = np.zeros(cfg.restarts, dtype=bool)
    for _ in range(cfg.max_iters):
        if act.size == 0:
            break
        for deep in (False, True):
            grp = act[deep_mode[act] == deep]
            if grp.size == 0:
                continue
            psi_g = psi[grp]
            v_g = v[grp]
            contrib_g = contrib[grp]
            prev = obj[grp]
            ops = objective.sliced(grp)
            for pairs in rounds:
                _pair_round_update(psi_g, v_g, contrib_g, pairs, ops, maximize, local=deep)
            contrib_g = ops.member_values(psi_g)  # refresh against rotation drift
            obj_g = contrib_g.sum(axis=1)
            psi[grp] = psi_g
            v[grp] = v_g
            contrib[grp] = contrib_g
            obj[grp] = obj_g
            improvement = (obj_g - prev) if maximize else (prev - obj_g)
            stalled = improvement < cfg.step_tolerance
            if deep:
                deep_count[grp] += 1
                converged[grp[stalled]] = True
                # patience-exhausted rows freeze without the converged flag
                frozen[grp[stalled | (deep_count[grp] >= _DEEP_PATIENCE)]] = True
            else:
                deep_mode[grp[stalled]] = True
        act = act[~frozen[act]]
    return v, obj, converged


def _roof(rho: DensityMatrix, q, cut, cfg: RoofConfig | None, seed, maximize: bool) -> RoofResult:
    q = _as_q(q)
    split_cut(rho.n_qubits, cut)
    cfg = cfg or RoofConfig()
    objective = SchmidtObjective(rho.n_qubits, cut, q)
    v, obj, converged = optimize_ensemble(rho, objective, cfg, seed, maximize)
    best = int(np.argmax(obj)) if maximize else int(np.argmin(obj))
    ensemble = decomposition_from_isometry(rho, v[best])
    value = ensemble_average(ensemble, lambda member: gq_pure(member.schmidt(cut), q))
    return RoofResult(value=value, ensemble=ensemble, restarts_used=cfg.restarts, converged=bool(converged[best]))


def roof_minimize(rho: DensityMatrix, q, cut: Sequence[int], cfg: RoofConfig | None = None, seed=0) -> RoofResult:
    """Best upper bound on the roof minimum found over all restarts."""
    return _roof(rho, q, cut, cfg, seed, maximize=False)


def roof_maximize(rho: DensityMatrix, q, cut: Sequence[int], cfg: RoofConfig | None = None, seed=0) -> RoofResult:
    """Best lower bound on the roof maximum (assistance value) found."""
    return _roof(rho, q, cut, cfg, seed, maximize=True)
