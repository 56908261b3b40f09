"""Command-line front end: measures, indicators, audits, figure CSVs.

Exit codes: 0 success / all audited inequalities hold, 1 an audited
inequality was violated, 2 bad input (unreadable state file, parameter
outside its regime, I/O failure).  All output is deterministic for a
fixed seed: floats print with 12 significant digits and rows follow
sample order, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import inequalities as ineq
from . import measures, states
from .errors import GqconError
from .roof import RoofConfig, roof_maximize, roof_minimize

_DEFAULT_Q = (1.1, 1.3, 1.5, 1.7, 1.9, 2.0)
_FIG5_Q = np.arange(1.05, 1.9501, 0.05)


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _env_seed() -> int:
    raw = os.environ.get("GQ_DEFAULT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _parse_cut(text: str, n_qubits: int) -> list[int]:
    labels = [int(tok) for tok in text.split(",") if tok != ""]
    return labels


def _q_list(args) -> list[float]:
    return list(args.q) if args.q else list(_DEFAULT_Q)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# ---------------------------------------------------------------------------
# measure


def cmd_measure(args) -> int:
    state = states.load_state_file(args.input)
    qs = _q_list(args)
    lines = ["kind,q,cut,value"]
    if isinstance(state, states.PureState):
        if args.cut:
            cuts = [_parse_cut(args.cut, state.n_qubits)]
        else:
            cuts = [[k] for k in range(state.n_qubits)]
        for cut in cuts:
            lam = state.schmidt(cut)
            label = "|".join(str(c) for c in cut)
            for q in qs:
                lines.append(f"gq,{_fmt(q)},{label},{_fmt(measures.gq_pure(lam, q))}")
            if np.sum(lam > 1e-10) <= 2:
                conc = measures.concurrence_pure(lam)
                lines.append(f"concurrence,,{label},{_fmt(conc)}")
    elif state.n_qubits == 2:
        conc = measures.wootters_concurrence(state)
        coa = measures.coa_two_qubit(state)
        lines.append(f"concurrence,,0|1,{_fmt(conc)}")
        lines.append(f"coa,,0|1,{_fmt(coa)}")
        for q in qs:
            lines.append(f"gq,{_fmt(q)},0|1,{_fmt(measures.gq_two_qubit_mixed(state, q))}")
            lines.append(f"gq_lower_bound,{_fmt(q)},0|1,{_fmt(measures.gq_lower_bound_2xd(conc, q))}")
            lines.append(f"gqcoa_lower_bound,{_fmt(q)},0|1,{_fmt(measures.gqcoa_lower_bound(state, q))}")
    else:
        raise GqconError(
            "mixed states beyond two qubits have no closed form; use the roof command"
        )
    out, close = _open_out(args.out)
    out.write("\n".join(lines) + "\n")
    if close:
        out.close()
    return 0


# ---------------------------------------------------------------------------
# indicators


def cmd_indicators(args) -> int:
    state = states.load_state_file(args.input)
    if not isinstance(state, states.PureState):
        raise GqconError("indicators need a pure state input")
    qs = _q_list(args)
    foci = [args.focus] if args.focus is not None else list(range(state.n_qubits))
    lines = ["fn,q,x,value"]
    for focus in foci:
        for q in qs:
            val = ineq.tau_indicator(state, focus, q)
            lines.append(f"tau,{_fmt(q)},{focus},{_fmt(val)}")
    out, close = _open_out(args.out)
    out.write("\n".join(lines) + "\n")
    if close:
        out.close()
    return 0


# ---------------------------------------------------------------------------
# figures


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def cmd_figures(args) -> int:
    step = args.grid_step
    if not 0.0 < step <= 0.1:
        raise GqconError(f"grid step {step} outside (0, 0.1]")
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    written = []

    # M(x, q) surface over the non-convex regime 2 < q < 5
    rows = []
    xs = np.arange(step, 1.0 + step / 2, step)
    for q in np.arange(2.05, 4.9501, 0.05):
        vals = ineq.diag_m(xs, q)
        rows.extend([("M", _fmt(q), _fmt(x), _fmt(v)) for x, v in zip(xs, vals)])
    path = os.path.join(outdir, "fig1_M.csv")
    _write_csv(path, "fn,q,x,value", rows)
    written.append(path)

    # limit of M at x -> 1 over 1 <= q <= 2 (zero exactly at both ends)
    rows = []
    for q in np.linspace(1.0, 2.0, round(1.0 / step) + 1):
        val = ineq.m_limit_at_one(q) if q > 1.0 else 0.0
        rows.append(("limM", _fmt(q), "1", _fmt(val)))
    path = os.path.join(outdir, "fig3_limM.csv")
    _write_csv(path, "fn,q,x,value", rows)
    written.append(path)

    # boundary curves at x = 1/sqrt(2): first-power and squared versions
    rows = []
    r = 1.0 / np.sqrt(2.0)
    qgrid = np.linspace(1.0, 2.0, round(1.0 / step) + 1)
    for q in qgrid:
        val = ineq.diag_l(r, q) if q > 1.0 else 0.0
        rows.append(("l", _fmt(q), _fmt(r), _fmt(val)))
    for q in qgrid:
        val = ineq.diag_ltilde(r, q) if q > 1.0 else 0.0
        rows.append(("ltilde", _fmt(q), _fmt(r), _fmt(val)))
    path = os.path.join(outdir, "fig4_ltilde.csv")
    _write_csv(path, "fn,q,x,value", rows)
    written.append(path)

    # W-state indicator curves for n = 3, 6, 9 (x column holds n)
    rows = []
    for n in (3, 6, 9):
        for q in _FIG5_Q:
            rows.append(("tauW", _fmt(q), str(n), _fmt(ineq.tau_w_closed_form(n, q))))
    path = os.path.join(outdir, "fig5_tauW.csv")
    _write_csv(path, "fn,q,x,value", rows)
    written.append(path)

    # Mtilde(t, q) surface on (0, 1) x (1, 2)
    rows = []
    ts = np.arange(step, 1.0 - step / 2, step)
    for q in np.arange(1.05, 1.9501, 0.05):
        vals = ineq.diag_mtilde(ts, q)
        rows.extend([("Mtilde", _fmt(q), _fmt(t), _fmt(v)) for t, v in zip(ts, vals)])
    path = os.path.join(outdir, "fig7_Mtilde.csv")
    _write_csv(path, "fn,q,x,value", rows)
    written.append(path)

    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# audit


def _audit_rows(args):
    """Residual rows (state_id, focus, q, alpha, lhs, rhs_sum, residual, ok)."""
    qs = [q for q in _q_list(args) if q <= 2.0]
    seed_seq = np.random.SeedSequence(args.seed)
    mono_seeds, poly_seeds = seed_seq.spawn(2)
    rows = []
    offenders = []

    def push(state_id, state, report, tol):
        ok = report.residual >= -tol
        rows.append(
            (
                state_id,
                report.focus,
                report.q,
                report.alpha,
                report.lhs,
                report.rhs_sum,
                report.residual,
                ok,
            )
        )
        if not ok:
            offenders.append((state_id, state))

    n = args.n
    # monogamy over Haar samples, every focus qubit
    for idx, child in enumerate(mono_seeds.spawn(args.samples)):
        phi = states.haar_random_pure(n, child)
        for focus in range(n):
            for rep in ineq.monogamy_profile(phi, focus, qs):
                push(f"mono:haar{n}-{idx}", phi, rep, 1e-9)
    # alpha powers on a light subsample
    for idx, child in enumerate(mono_seeds.spawn(max(1, args.samples // 10))):
        phi = states.haar_random_pure(n, child)
        for alpha in (2.5, 3.0, 4.0):
            for rep in ineq.monogamy_profile(phi, 0, qs, alpha=alpha):
                push(f"alpha:haar{n}-{idx}", phi, rep, 1e-9)
    # polygamy with roof-based assistance terms, 3-qubit scale
    roof_cfg = RoofConfig(restarts=8, step_tolerance=1e-7)
    for idx, child in enumerate(poly_seeds.spawn(max(1, args.samples // 10))):
        phi = states.haar_random_pure(3, child)
        for q in qs:
            rep = ineq.polygamy_residual(phi, 0, q, cfg=roof_cfg, seed=child.spawn(1)[0])
            push(f"poly:haar3-{idx}", phi, rep, 1e-6)
    # fixed fixtures: the tangle-blind W state and GHZ
    w3 = states.w_state(3)
    for rep in ineq.monogamy_profile(w3, 0, qs):
        push("mono:W3", w3, rep, 1e-9)
    g3 = states.ghz_state(3)
    for rep in ineq.monogamy_profile(g3, 0, qs):
        push("mono:GHZ3", g3, rep, 1e-9)
    return rows, offenders


def cmd_audit(args) -> int:
    rows, offenders = _audit_rows(args)
    lines = ["state_id,focus,q,alpha,lhs,rhs_sum,residual,pass"]
    for state_id, focus, q, alpha, lhs, rhs_sum, residual, ok in rows:
        lines.append(
            f"{state_id},{focus},{_fmt(q)},{_fmt(alpha)},{_fmt(lhs)},{_fmt(rhs_sum)},"
            f"{_fmt(residual)},{1 if ok else 0}"
        )
    all_pass = all(r[-1] for r in rows)

    # grid audits of the scalar diagnostics
    checks = ineq.sign_audit(grid_step=args.grid_step)
    for chk in checks:
        all_pass &= chk.passed
    for q in (1.1, 1.5, 1.9):
        sup = ineq.h_superadditivity_margin(q, args.grid_step)
        sub = ineq.h_subadditivity_margin(q, args.grid_step)
        dec = ineq.f_decrease_margin(q)
        all_pass &= sup >= -1e-9 and sub >= -1e-9 and dec < 1e-12

    out, close = _open_out(args.out)
    out.write("\n".join(lines) + "\n")
    if close:
        out.close()
    for chk in checks:
        print(
            f"audit {chk.fn}: {chk.claim}: min={_fmt(chk.grid_min)} max={_fmt(chk.grid_max)} "
            f"{'pass' if chk.passed else 'FAIL'}"
        )
    if offenders:
        state_id, state = offenders[0]
        print(f"violation in {state_id}:", file=sys.stderr)
        json.dump(states.state_to_json(state), sys.stderr)
        print(file=sys.stderr)
    print("audit:", "pass" if all_pass else "FAIL")
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# roof


def cmd_roof(args) -> int:
    state = states.load_state_file(args.input)
    if isinstance(state, states.PureState):
        rho = state.density()
    else:
        rho = state
    cut = _parse_cut(args.cut, rho.n_qubits) if args.cut else [0]
    cfg = RoofConfig(restarts=args.restarts)
    qs = _q_list(args)
    lines = ["kind,q,cut,value,converged,restarts"]
    label = "|".join(str(c) for c in cut)
    for q in qs:
        fn = roof_maximize if args.maximize else roof_minimize
        res = fn(rho, q, cut, cfg=cfg, seed=args.seed)
        kind = "roof_max" if args.maximize else "roof_min"
        lines.append(
            f"{kind},{_fmt(q)},{label},{_fmt(res.value)},{1 if res.converged else 0},{res.restarts_used}"
        )
    out, close = _open_out(args.out)
    out.write("\n".join(lines) + "\n")
    if close:
        out.close()
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqcon",
        description="Entanglement measures, indicators, and inequality audits on qubit registers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input):
        if needs_input:
            p.add_argument("input", help="JSON state file")
        p.add_argument("--q", action="append", type=float, help="measure parameter, repeatable")
        p.add_argument("--seed", type=int, default=_env_seed(), help="RNG seed (env GQ_DEFAULT_SEED)")
        p.add_argument("--out", default=None, help="output file ('-' for stdout)")

    p = sub.add_parser("measure", help="evaluate measures on a state file")
    common(p, True)
    p.add_argument("--cut", default=None, help="side-A qubit labels, e.g. 0 or 0,2")
    p.set_defaults(fn=cmd_measure)

    p = sub.add_parser("indicators", help="multipartite indicators of a pure state")
    common(p, True)
    p.add_argument("--focus", type=int, default=None, help="focus qubit (default: all)")
    p.set_defaults(fn=cmd_indicators)

    p = sub.add_parser("audit", help="randomized monogamy/polygamy and diagnostic audits")
    common(p, False)
    p.add_argument("--samples", type=int, default=500, help="Monte Carlo sample count")
    p.add_argument("--n", type=int, default=3, help="register size for sampled states")
    p.add_argument("--grid-step", type=float, default=0.01, help="diagnostic grid step")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("figures", help="emit figure-data CSV files")
    common(p, False)
    p.add_argument("--grid-step", type=float, default=0.01, help="x/q grid step")
    p.set_defaults(fn=cmd_figures)

    p = sub.add_parser("roof", help="ensemble-optimization bounds on a state file")
    common(p, True)
    p.add_argument("--cut", default=None, help="side-A qubit labels")
    p.add_argument("--maximize", action="store_true", help="assistance direction")
    p.add_argument("--restarts", type=int, default=32)
    p.set_defaults(fn=cmd_roof)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (GqconError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
