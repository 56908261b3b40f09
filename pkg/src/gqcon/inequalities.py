"""Monogamy/polygamy residuals, multipartite indicators, and sign audits.

For an n-qubit pure state and a focus qubit, the squared measure across
the focus-vs-rest cut dominates the sum of squared pairwise values
(monogamy, 1 < q <= 2), while assistance values satisfy the reversed,
first-power inequality (polygamy).  The residual of the squared relation
defines an indicator that vanishes exactly on biseparable states and
stays positive on genuinely multipartite-entangled ones for 1 < q < 2,
including W states where the plain tangle is blind.

The scalar diagnostic functions audited here control the convexity and
super/subadditivity properties behind those inequalities; sign audits
evaluate them on closed grids with explicit steps and tolerances rather
than claiming proofs.  Everything in this module is pure and
deterministic given its seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadAlpha, BadDomain, BadFocus, BadQ, RegimeError, SizeOutOfRange
from .measures import _as_q, gq_pure, h_q, wootters_concurrence
from .roof import (
    RoofConfig,
    RoofResult,
    _materialized_pair_values,
    _weighted_value_from_trace_det,
    decomposition_from_isometry,
    ensemble_average,
    optimize_ensemble,
    roof_maximize,
)
from .states import DensityMatrix, PureState

_Q_GRID_DEFAULT = (1.1, 1.3, 1.5, 1.7, 1.9, 2.0)


@dataclass
class ResidualReport:
    """One evaluated monogamy or polygamy instance."""

    focus: int
    lhs: float
    rhs_terms: np.ndarray
    residual: float
    direction: str  # "monogamy" or "polygamy"
    q: float
    alpha: float = 2.0

    @property
    def rhs_sum(self) -> float:
        return float(np.sum(self.rhs_terms))


def _check_focus(phi: PureState, focus: int) -> list[int]:
    if phi.n_qubits < 2:
        raise BadFocus("residuals need at least two qubits")
    if not 0 <= focus < phi.n_qubits:
        raise BadFocus(f"focus {focus} out of range for {phi.n_qubits} qubits")
    return [j for j in range(phi.n_qubits) if j != focus]


def _analytic_q(q) -> float:
    q = _as_q(q)
    if q > 2.0:
        raise RegimeError(f"inequalities proven only for 1 < q <= 2, got q = {q}")
    return q


def pairwise_concurrences(phi: PureState, focus: int) -> np.ndarray:
    """Wootters concurrences of every (focus, j) marginal, in j order.

    These are q-independent, so callers scanning a q grid evaluate the
    spin-flip spectra once.
    """
    others = _check_focus(phi, focus)
    return np.array([wootters_concurrence(phi.marginal(sorted((focus, j)))) for j in others])


def monogamy_residual(phi: PureState, focus: int, q) -> ResidualReport:
    """Squared cut value minus the sum of squared pairwise values (>= 0)."""
    return alpha_monogamy_residual(phi, focus, q, 2.0)


def alpha_monogamy_residual(phi: PureState, focus: int, q, alpha) -> ResidualReport:
    """Monogamy residual for the alpha-th power of the measure, alpha >= 2."""
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < 2.0:
        raise BadAlpha(f"alpha must be >= 2, got {alpha}")
    q = _analytic_q(q)
    lhs_base = gq_pure(phi.schmidt([focus]), q)
    margs = pairwise_concurrences(phi, focus)
    rhs = h_q(margs, q) ** alpha if margs.size else np.zeros(0)
    lhs = lhs_base**alpha
    return ResidualReport(
        focus=focus,
        lhs=float(lhs),
        rhs_terms=np.asarray(rhs, dtype=float),
        residual=float(lhs - np.sum(rhs)),
        direction="monogamy",
        q=q,
        alpha=alpha,
    )


def monogamy_profile(phi: PureState, focus: int, q_values, alpha: float = 2.0) -> list[ResidualReport]:
    """Monogamy residuals over a q grid, reusing the pairwise concurrences."""
    qs = [_analytic_q(q) for q in q_values]
    if float(alpha) < 2.0:
        raise BadAlpha(f"alpha must be >= 2, got {alpha}")
    margs = pairwise_concurrences(phi, focus)
    lam = phi.schmidt([focus])
    out = []
    for q in qs:
        lhs = gq_pure(lam, q) ** alpha
        rhs = h_q(margs, q) ** alpha if margs.size else np.zeros(0)
        out.append(
            ResidualReport(
                focus=focus,
                lhs=float(lhs),
                rhs_terms=np.asarray(rhs, dtype=float),
                residual=float(lhs - np.sum(rhs)),
                direction="monogamy",
                q=q,
                alpha=float(alpha),
            )
        )
    return out


def polygamy_residual(
    phi: PureState,
    focus: int,
    q,
    cfg: RoofConfig | None = None,
    seed=0,
) -> ResidualReport:
    """Sum of pairwise assistance values minus the cut value (>= 0).

    The input is pure, so the left side equals the plain cut measure.  The
    right-side terms are roof_maximize estimates, which only under-shoot
    the true assistance values; a nonnegative residual is therefore a
    sound verification even with imperfect optimization.
    """
    q = _analytic_q(q)
    others = _check_focus(phi, focus)
    lhs = gq_pure(phi.schmidt([focus]), q)
    children = np.random.SeedSequence(seed).spawn(len(others))
    rhs = []
    for child, j in zip(children, others):
        keep = sorted((focus, j))
        marg = phi.marginal(keep)
        cut = [keep.index(focus)]
        rhs.append(roof_maximize(marg, q, cut, cfg=cfg, seed=child).value)
    rhs = np.array(rhs)
    return ResidualReport(
        focus=focus,
        lhs=float(lhs),
        rhs_terms=rhs,
        residual=float(np.sum(rhs) - lhs),
        direction="polygamy",
        q=q,
        alpha=1.0,
    )


def tau_indicator(phi: PureState, focus: int, q) -> float:
    """Residual of the squared measure at the focus qubit, for 1 < q < 2.

    Zero on biseparable pure states; strictly positive on genuinely
    multiqubit-entangled ones, including W states.
    """
    q = _as_q(q)
    if not 1.0 < q < 2.0:
        raise RegimeError(f"indicator defined on the open interval 1 < q < 2, got q = {q}")
    return alpha_monogamy_residual(phi, focus, q, 2.0).residual


_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


class _TauObjective:
    """Ensemble-averaged indicator for three-qubit members.

    Per member the indicator needs the squared cut measure minus the
    squared pairwise values.  Members are pure, so their two-qubit
    marginals have rank <= 2 and the Wootters concurrence collapses to
    sqrt(|N|_F^2 - 2 |det N|) with N = M^T (sy x sy) M over the 4 x 2
    coefficient matrix M of the (pair | rest) split; that keeps the whole
    objective in closed form for the optimizer's line searches.
    """

    def __init__(self, focus: int, q: float):
        self.q = float(q)
        self.focus = focus
        self.others = [j for j in range(3) if j != focus]

    def sliced(self, rows) -> "_TauObjective":
        return self

    @staticmethod
    def _split(members: np.ndarray, first: list[int]) -> np.ndarray:
        lead = members.shape[:-1]
        rest = [k for k in range(3) if k not in first]
        psi = members.reshape(lead + (2, 2, 2))
        axes = tuple(range(len(lead))) + tuple(len(lead) + p for p in first + rest)
        return psi.transpose(axes).reshape(lead + (2 ** len(first), 2 ** len(rest)))

    def member_values(self, members: np.ndarray) -> np.ndarray:
        m_cut = self._split(members, [self.focus])
        gram = m_cut @ m_cut.conj().swapaxes(-1, -2)
        t = (gram[..., 0, 0] + gram[..., 1, 1]).real
        det = (gram[..., 0, 0] * gram[..., 1, 1] - gram[..., 0, 1] * gram[..., 1, 0]).real
        cut_weighted = _weighted_value_from_trace_det(t, det, self.q)
        tt = np.where(t > 1e-300, t, 1.0)
        total = (cut_weighted / tt) ** 2
        for j in self.others:
            pair = sorted((self.focus, j))
            m_pair = self._split(members, pair)  # (..., 4, 2)
            n = m_pair.swapaxes(-1, -2) @ (_SPIN_FLIP @ m_pair)
            fro2 = np.sum((n * n.conj()).real, axis=(-2, -1))
            det_n = n[..., 0, 0] * n[..., 1, 1] - n[..., 0, 1] * n[..., 1, 0]
            conc = np.sqrt(np.maximum(fro2 - 2.0 * np.abs(det_n), 0.0)) / tt
            total = total - h_q(np.clip(conc, 0.0, 1.0), self.q) ** 2
        return np.where(t > 1e-300, t * total, 0.0)

    def pair_prepare(self, pi, pj):
        return pi, pj

    def pair_eval(self, ctx, theta, phi):
        pi, pj = ctx
        return _materialized_pair_values(self.member_values, pi, pj, theta, phi)


def tau_indicator_mixed(
    rho: DensityMatrix,
    focus: int,
    q,
    cfg: RoofConfig | None = None,
    seed=0,
) -> RoofResult:
    """Roof estimate of the mixed-state indicator on a three-qubit register.

    Minimizes the ensemble average of the pure-state indicator over
    decompositions of rho; the returned value is an upper bound on the
    true indicator.  Desk-scale only (exactly three qubits).
    """
    q = _as_q(q)
    if not 1.0 < q < 2.0:
        raise RegimeError(f"indicator defined on the open interval 1 < q < 2, got q = {q}")
    if rho.n_qubits != 3:
        raise SizeOutOfRange("mixed-state indicator estimation is limited to 3 qubits")
    if not 0 <= focus < 3:
        raise BadFocus(f"focus {focus} out of range for 3 qubits")
    cfg = cfg or RoofConfig(restarts=8)
    objective = _TauObjective(focus, q)
    v, obj, converged = optimize_ensemble(rho, objective, cfg, seed, maximize=False)
    best = int(np.argmin(obj))
    ensemble = decomposition_from_isometry(rho, v[best])
    value = ensemble_average(ensemble, lambda member: tau_indicator(member, focus, q))
    return RoofResult(
        value=value,
        ensemble=ensemble,
        restarts_used=cfg.restarts,
        converged=bool(converged[best]),
    )


def tau_w_closed_form(n: int, q) -> float:
    """Indicator of the n-qubit W state from its closed-form concurrences.

    The one-vs-rest concurrence is 2 sqrt(n-1)/n and every pairwise
    marginal has concurrence 2/n, so the residual reduces to arithmetic in
    n and q.  Valid for any n >= 3 (no state vector is built).
    """
    n = int(n)
    if n < 3:
        raise SizeOutOfRange(f"closed form needs n >= 3, got {n}")
    q = _as_q(q)
    a = (n - 2.0) / n
    first = max(1.0 - ((1.0 + a) / 2.0) ** q - ((1.0 - a) / 2.0) ** q, 0.0) ** (2.0 / q)
    b = np.sqrt(n * n - 4.0) / n
    second = max(1.0 - ((1.0 + b) / 2.0) ** q - ((1.0 - b) / 2.0) ** q, 0.0) ** (2.0 / q)
    return float(first - (n - 1) * second)


# ---------------------------------------------------------------------------
# scalar diagnostics
#
# u always stands for sqrt(1 - x^2), computed as sqrt((1-x)(1+x)) to halve
# the cancellation near x = 1.


def _u_of(x):
    return np.clip(np.sqrt(np.maximum((1.0 - x) * (1.0 + x), 0.0)), 0.0, 1.0)


def _check_q(q) -> float:
    q = float(q)
    if not np.isfinite(q) or q <= 1.0:
        raise BadQ(f"q must be a finite real > 1, got {q!r}")
    return q


def _check_unit_interval(x, name: str, lo_open: bool, hi_open: bool):
    arr = np.asarray(x, dtype=float)
    lo_bad = (arr <= 0) if lo_open else (arr < -1e-12)
    hi_bad = (arr >= 1) if hi_open else (arr > 1 + 1e-12)
    if np.any(lo_bad | hi_bad):
        raise BadDomain(f"{name} outside its domain")
    return arr


def m_limit_at_one(q) -> float:
    """Continuous extension of the convexity gauge M at x = 1."""
    q = _check_q(q)
    num = -12.0 * (q**3 - 3 * q**2 + 3 * q - 1) + (2.0**q - 2.0) * (
        -2 * q**3 + 12 * q**2 - 16 * q + 6
    )
    return float(num / (3.0 * 2.0**q))


def diag_m(x, q):
    """Convexity gauge of h_q: shares the sign of the second derivative.

    M(x, q) = xi1 + xi2 (xi3 - xi4) over 0 < x < 1; at x past 1 - 1e-7 the
    closed-form limit takes over (the subterms blow up like 1/u^3 while
    their combination stays finite).
    """
    q = _check_q(q)
    scalar = np.ndim(x) == 0
    x = _check_unit_interval(x, "x", lo_open=True, hi_open=False)
    x = np.atleast_1d(np.clip(x, 1e-300, 1.0))
    near_one = x > 1.0 - 1e-7
    xs = np.where(near_one, 0.5, x)  # placeholder, overwritten below
    u = _u_of(xs)
    u2 = u * u
    up = 1.0 + u
    um = 1.0 - u
    xi1 = (1.0 - q) / 2.0**q * (xs * (up ** (q - 1) - um ** (q - 1)) / u) ** 2
    xi2 = 1.0 - (up / 2.0) ** q - (um / 2.0) ** q
    xi3 = up ** (q - 2) / u2 * (up / u - xs * xs * (q - 1))
    xi4 = um ** (q - 2) / u2 * (um / u + xs * xs * (q - 1))
    out = xi1 + xi2 * (xi3 - xi4)
    out = np.where(near_one, m_limit_at_one(q), out)
    return float(out[0]) if scalar else out


def diag_h(x, y, q):
    """H_q(x, y) = h_q(sqrt(x^2 + y^2)) - h_q(x) - h_q(y) on the unit disk."""
    q = _check_q(q)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    if np.any(r2 > 1.0 + 1e-9):
        raise BadDomain("(x, y) outside the closed unit quarter-disk")
    r = np.sqrt(np.clip(r2, 0.0, 1.0))
    return h_q(r, q) - h_q(x, q) - h_q(y, q)


def diag_htilde(x, y, q):
    """Squared-measure counterpart of diag_h; identically zero at q = 2."""
    q = _check_q(q)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    if np.any(r2 > 1.0 + 1e-9):
        raise BadDomain("(x, y) outside the closed unit quarter-disk")
    r = np.sqrt(np.clip(r2, 0.0, 1.0))
    return h_q(r, q) ** 2 - h_q(x, q) ** 2 - h_q(y, q) ** 2


def diag_l(x, q):
    """diag_h restricted to the arc x^2 + y^2 = 1, in its closed form."""
    q = _check_q(q)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(_check_unit_interval(x, "x", lo_open=False, hi_open=False))
    x = np.clip(x, 0.0, 1.0)
    u = _u_of(x)
    p2 = 2.0**q
    term_u = np.maximum(p2 - (1.0 + u) ** q - (1.0 - u) ** q, 0.0) ** (1.0 / q)
    term_x = np.maximum(p2 - (1.0 + x) ** q - (1.0 - x) ** q, 0.0) ** (1.0 / q)
    out = 0.5 * ((p2 - 2.0) ** (1.0 / q) - term_u - term_x)
    return float(out[0]) if scalar else out


def diag_ltilde(x, q):
    """diag_htilde restricted to the arc x^2 + y^2 = 1, in its closed form."""
    q = _check_q(q)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(_check_unit_interval(x, "x", lo_open=False, hi_open=False))
    x = np.clip(x, 0.0, 1.0)
    u = _u_of(x)
    p2 = 2.0**q
    term_u = np.maximum(p2 - (1.0 + u) ** q - (1.0 - u) ** q, 0.0) ** (2.0 / q)
    term_x = np.maximum(p2 - (1.0 + x) ** q - (1.0 - x) ** q, 0.0) ** (2.0 / q)
    out = 0.25 * ((p2 - 2.0) ** (2.0 / q) - term_u - term_x)
    return float(out[0]) if scalar else out


def diag_f(t, q):
    """Gradient factor whose strict decrease rules out interior critical
    points of diag_h; defined on 0 < t < 1."""
    q = _check_q(q)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(_check_unit_interval(t, "t", lo_open=True, hi_open=True))
    u = _u_of(t)
    rad = np.maximum(1.0 - ((1.0 + u) / 2.0) ** q - ((1.0 - u) / 2.0) ** q, 0.0)
    out = rad ** (1.0 / q - 1.0) * ((1.0 + u) ** (q - 1) - (1.0 - u) ** (q - 1)) / u
    return float(out[0]) if scalar else out


def diag_mtilde(t, q):
    """Sign gauge of the derivative of diag_f; negative on (0,1) x (1,2)."""
    q = _check_q(q)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(_check_unit_interval(t, "t", lo_open=True, hi_open=True))
    u = _u_of(t)
    u2 = u * u
    up = 1.0 + u
    um = 1.0 - u
    first = (1.0 - q) / 2.0**q * t * (up ** (q - 1) - um ** (q - 1)) ** 2 / u2
    bracket = up ** (q - 2) / u2 * (t * up / u - t * (q - 1)) - um ** (q - 2) / u2 * (
        t * um / u + t * (q - 1)
    )
    rad = 1.0 - (up / 2.0) ** q - (um / 2.0) ** q
    out = first + rad * bracket
    return float(out[0]) if scalar else out


_DIAGNOSTICS = {
    "M": (diag_m, 1),
    "H": (diag_h, 2),
    "l": (diag_l, 1),
    "f": (diag_f, 1),
    "Mtilde": (diag_mtilde, 1),
    "Htilde": (diag_htilde, 2),
    "ltilde": (diag_ltilde, 1),
}


def diagnostic_eval(fn_id: str, q, point):
    """Evaluate a named diagnostic (M, H, l, f, Mtilde, Htilde, ltilde)."""
    if fn_id not in _DIAGNOSTICS:
        raise BadDomain(f"unknown diagnostic {fn_id!r}; choose from {sorted(_DIAGNOSTICS)}")
    fn, arity = _DIAGNOSTICS[fn_id]
    if arity == 1:
        return fn(point, q)
    x, y = point
    return fn(x, y, q)


# ---------------------------------------------------------------------------
# sign audits


@dataclass
class SignAuditCheck:
    claim: str
    fn: str
    direction: str  # "positive", "negative", "nonpositive", "nonnegative", "zero"
    grid_min: float
    grid_max: float
    n_points: int
    tolerance: float
    passed: bool


def _judge(direction: str, lo: float, hi: float, tol: float) -> bool:
    if direction == "positive":
        return lo > tol
    if direction == "negative":
        return hi < -tol
    if direction == "nonpositive":
        return hi <= tol
    if direction == "nonnegative":
        return lo >= -tol
    if direction == "zero":
        return max(abs(lo), abs(hi)) <= tol
    raise ValueError(direction)


def sign_audit(grid_step: float = 0.01, q_lo: float = 1.05, q_hi: float = 1.95, tol: float = 1e-9) -> list[SignAuditCheck]:
    """Grid audits of the diagnostic sign claims.

    Checks, on grids of the given step: M > 0 on (0,1] x [q_lo,q_hi];
    Mtilde < 0 on (0,1) x [q_lo,q_hi]; l(1/sqrt2) <= 0 and
    ltilde(1/sqrt2) >= 0 over [q_lo,q_hi]; H <= 0 and Htilde == 0 at q=2
    over the quarter-disk (the q=2 zero claim uses tolerance 1e-10).
    """
    if not 0.0 < grid_step <= 0.1:
        raise BadDomain(f"grid_step {grid_step} outside (0, 0.1]")
    checks = []
    qs = np.arange(q_lo, q_hi + grid_step / 2, grid_step)
    xs = np.arange(grid_step, 1.0 + grid_step / 2, grid_step)
    ts = np.arange(grid_step, 1.0 - grid_step / 2, grid_step)

    vals = np.concatenate([diag_m(xs, q) for q in qs])
    checks.append(
        SignAuditCheck("M positive on (0,1]", "M", "positive",
                       float(vals.min()), float(vals.max()), vals.size, tol,
                       _judge("positive", vals.min(), vals.max(), tol))
    )
    vals = np.concatenate([diag_mtilde(ts, q) for q in qs])
    checks.append(
        SignAuditCheck("Mtilde negative on (0,1)", "Mtilde", "negative",
                       float(vals.min()), float(vals.max()), vals.size, tol,
                       _judge("negative", vals.min(), vals.max(), tol))
    )
    r = 1.0 / np.sqrt(2.0)
    vals = np.array([diag_l(r, q) for q in qs])
    checks.append(
        SignAuditCheck("l(1/sqrt2) nonpositive", "l", "nonpositive",
                       float(vals.min()), float(vals.max()), vals.size, tol,
                       _judge("nonpositive", vals.min(), vals.max(), tol))
    )
    vals = np.array([diag_ltilde(r, q) for q in qs])
    checks.append(
        SignAuditCheck("ltilde(1/sqrt2) nonnegative", "ltilde", "nonnegative",
                       float(vals.min()), float(vals.max()), vals.size, tol,
                       _judge("nonnegative", vals.min(), vals.max(), tol))
    )
    gx, gy = np.meshgrid(np.arange(0.0, 1.0 + grid_step / 2, grid_step),
                         np.arange(0.0, 1.0 + grid_step / 2, grid_step))
    mask = gx * gx + gy * gy <= 1.0 + 1e-12
    xs2, ys2 = gx[mask], gy[mask]
    vals = diag_h(xs2, ys2, 2.0)
    checks.append(
        SignAuditCheck("H nonpositive at q=2", "H", "nonpositive",
                       float(vals.min()), float(vals.max()), vals.size, tol,
                       _judge("nonpositive", vals.min(), vals.max(), tol))
    )
    vals = diag_htilde(xs2, ys2, 2.0)
    checks.append(
        SignAuditCheck("Htilde zero at q=2", "Htilde", "zero",
                       float(vals.min()), float(vals.max()), vals.size, 1e-10,
                       _judge("zero", vals.min(), vals.max(), 1e-10))
    )
    return checks


def h_superadditivity_margin(q, grid_step: float = 0.01) -> float:
    """min over the quarter-disk of h_q^2(sqrt(x^2+y^2)) - h_q^2(x) - h_q^2(y)."""
    q = _analytic_q(q)
    axis = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    gx, gy = np.meshgrid(axis, axis)
    mask = gx * gx + gy * gy <= 1.0 + 1e-12
    return float(np.min(diag_htilde(gx[mask], gy[mask], q)))


def h_subadditivity_margin(q, grid_step: float = 0.01) -> float:
    """min over the quarter-disk of h_q(x) + h_q(y) - h_q(sqrt(x^2+y^2))."""
    q = _analytic_q(q)
    axis = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    gx, gy = np.meshgrid(axis, axis)
    mask = gx * gx + gy * gy <= 1.0 + 1e-12
    return float(np.min(-diag_h(gx[mask], gy[mask], q)))


def f_decrease_margin(q, t_lo: float = 0.01, t_hi: float = 0.99, step: float = 0.01) -> float:
    """max forward difference of diag_f on the t grid (expected negative)."""
    q = _check_q(q)
    ts = np.arange(t_lo, t_hi + step / 2, step)
    vals = diag_f(ts, q)
    return float(np.max(np.diff(vals)))
