"""Command-line front end: JSON in, verdict JSON out, shell-composable verbs.

One verb per invocation. Exit status 0 means pass/feasible, 1 means
fail/infeasible, 2 means the input could not be parsed or validated. All
numeric output uses Python's shortest round-trip float representation, so
emitted JSON re-parses to bit-identical doubles.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import multiparty, optimizer, qmodel, ri
from .correlators import (
    CorrelatorTable,
    ProbabilityTable,
    TripartiteCorrelatorTable,
    check_no_signaling,
    chsh,
    from_probability_table,
    pr_box_table,
)
from .errors import BellRIError, MalformedInputError

VERBS = (
    "classify",
    "ri-intervals",
    "tlm-check",
    "epsilon",
    "pr-demo",
    "simulate",
    "quantum-bound",
    "chsh-r-tradeoff",
    "monogamy",
    "nparty",
    "zeta-bound",
    "optimize",
    "eta-curve",
    "geometry",
)


# ---------------------------------------------------------------------------
# Input decoding
# ---------------------------------------------------------------------------


def _read_payload(path: str) -> dict:
    if path == "-":
        text = sys.stdin.read()
        source = "<stdin>"
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise MalformedInputError(f"cannot read input {path!r}: {exc}") from exc
        source = path
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(
            f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise MalformedInputError(f"{source}: top-level JSON value must be an object")
    return payload


def _require(payload: dict, key: str):
    if key not in payload:
        raise MalformedInputError(f"missing required field {key!r}")
    return payload[key]


def decode_bipartite_table(payload: dict) -> tuple[CorrelatorTable, ProbabilityTable | None]:
    if payload.get("name") == "pr-box":
        pt = pr_box_table()
        return from_probability_table(pt), pt
    if "probabilities" in payload:
        prob = payload["probabilities"]
        pt = ProbabilityTable(
            outcomes_a=np.asarray(_require(prob, "outcomes_a"), dtype=float),
            outcomes_b=np.asarray(_require(prob, "outcomes_b"), dtype=float),
            p=np.asarray(_require(prob, "p"), dtype=float),
        )
        return from_probability_table(pt), pt
    if "ensemble" in payload:
        from .lhv import LhvEnsemble, correlators_of

        weights = np.asarray(_require(payload["ensemble"], "weights"), dtype=float)
        return correlators_of(LhvEnsemble(weights)), None
    if "pearson" in payload:
        pe = np.asarray(payload["pearson"], dtype=float)
        ct = CorrelatorTable.from_pearson(
            pe, variances=payload.get("variances"), means=payload.get("means")
        )
        return ct, None
    raise MalformedInputError(
        "bipartite input needs 'probabilities', 'pearson', 'ensemble', or name 'pr-box'"
    )


def decode_tripartite_table(payload: dict) -> TripartiteCorrelatorTable:
    return TripartiteCorrelatorTable(
        pearson_ab=np.asarray(_require(payload, "pearson_ab"), dtype=float),
        pearson_ac=np.asarray(_require(payload, "pearson_ac"), dtype=float),
        pearson_bc=np.asarray(_require(payload, "pearson_bc"), dtype=float),
    )


def _complex_array(obj, what: str) -> np.ndarray:
    if isinstance(obj, dict):
        re = np.asarray(_require(obj, "re"), dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise MalformedInputError(f"{what}: 're' and 'im' shapes differ")
        return re + 1j * im
    return np.asarray(obj, dtype=float).astype(complex)


def decode_scenario(payload: dict) -> qmodel.QuantumScenario:
    dims = tuple(int(d) for d in _require(payload, "dims"))
    state = _complex_array(_require(payload, "state"), "state")
    def obs_list(key):
        if key not in payload:
            return None
        entries = payload[key]
        if not isinstance(entries, list) or len(entries) != 2:
            raise MalformedInputError(f"{key} must list exactly two observables")
        return tuple(qmodel.Observable(_complex_array(o, key)) for o in entries)
    return qmodel.QuantumScenario(
        dims=dims,
        state=state,
        alice_obs=obs_list("alice_obs"),
        bob_obs=obs_list("bob_obs"),
        charlie_obs=obs_list("charlie_obs"),
    )


def decode_nparty(payload: dict) -> tuple[multiparty.NPartyCorrelators, float]:
    r_prime = float(_require(payload, "r_prime"))
    exps = _require(payload, "experimenters")
    first = [list(map(float, _require(e, "first"))) for e in exps]
    second = [list(map(float, _require(e, "second"))) for e in exps]
    return multiparty.NPartyCorrelators(
        rho_first=np.asarray(first), rho_second=np.asarray(second)
    ), r_prime


# ---------------------------------------------------------------------------
# Verb handlers: return (payload, exit_code)
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> tuple[dict, int]:
    payload = _read_payload(args.input)
    ct, pt = decode_bipartite_table(payload)
    ns_report = check_no_signaling(pt, tol=args.tol) if pt is not None else None
    verdict = ri.classify(ct, tol=args.tol, no_signaling=ns_report)
    return verdict.to_json_dict(), 0 if verdict.ri_feasible else 1


def _cmd_ri_intervals(args) -> tuple[dict, int]:
    ct, _ = decode_bipartite_table(_read_payload(args.input))
    v = ri.ri_feasible_bipartite(ct, tol=args.tol)
    out = {
        "intervals": [iv.to_json_dict() for iv in v.intervals],
        "feasible": v.ri_feasible,
        "witness_r": v.witness_r,
        "witness_r_bar": v.witness_r_bar,
    }
    return out, 0 if v.ri_feasible else 1


def _cmd_tlm_check(args) -> tuple[dict, int]:
    ct, _ = decode_bipartite_table(_read_payload(args.input))
    res = ri.tlm_check(ct, tol=args.tol)
    out = {
        "pass": res.passed,
        "rows": [
            {"lhs": res.lhs[0], "rhs": res.rhs[0], "slack": res.slack[0]},
            {"lhs": res.lhs[1], "rhs": res.rhs[1], "slack": res.slack[1]},
        ],
        "chsh": chsh(ct),
    }
    return out, 0 if res.passed else 1


def _cmd_epsilon(args) -> tuple[dict, int]:
    ct, _ = decode_bipartite_table(_read_payload(args.input))
    eps = ri.epsilon_gap(ct)
    return {"epsilon": eps}, 0 if eps == 0.0 else 1


def _cmd_pr_demo(args) -> tuple[dict, int]:
    return ri.pr_box_demo(), 0


def _cmd_simulate(args) -> tuple[dict, int]:
    sc = decode_scenario(_read_payload(args.input))
    if sc.n_parties == 3:
        tm = qmodel.tripartite_moments(sc)
        tct = tm.to_table()
        out = {
            "scenario": "tripartite",
            "pearson_ab": tct.pearson_ab.tolist(),
            "pearson_ac": tct.pearson_ac.tolist(),
            "pearson_bc": tct.pearson_bc.tolist(),
            "variances": {
                "a": tm.vars[0].tolist(),
                "b": tm.vars[1].tolist(),
                "c": tm.vars[2].tolist(),
            },
        }
        return out, 0
    mom = qmodel.moments(sc)
    out = {
        "scenario": "bipartite",
        "means": {"a": mom.mean_a.tolist(), "b": mom.mean_b.tolist()},
        "variances": {"a": mom.var_a.tolist(), "b": mom.var_b.tolist()},
        "cov": mom.cov.tolist(),
        "pearson": mom.pearson.tolist(),
        "eta": {"a": mom.eta_a, "b": mom.eta_b},
        "nu": {"a": mom.nu_a, "b": mom.nu_b},
        "r_q": {
            "a": {"re": mom.r_q_a.real, "im": mom.r_q_a.imag},
            "b": {"re": mom.r_q_b.real, "im": mom.r_q_b.imag},
        },
        "uncertainty_check": {
            "a": qmodel.schrodinger_robertson_check(sc, "a"),
            "b": qmodel.schrodinger_robertson_check(sc, "b"),
        },
    }
    return out, 0


def _cmd_quantum_bound(args) -> tuple[dict, int]:
    sc = decode_scenario(_read_payload(args.input))
    res = qmodel.quantum_tlm_check(sc, tol=args.tol)
    res["eta_bound"] = qmodel.tsirelson_eta_bound(sc, tol=args.tol)
    return res, 0 if res["pass"] else 1


def _cmd_chsh_r_tradeoff(args) -> tuple[dict, int]:
    sc = decode_scenario(_read_payload(args.input))
    res = qmodel.chsh_r_tradeoff_check(sc, tol=args.tol)
    return res, 0 if res["pass"] else 1


def _cmd_monogamy(args) -> tuple[dict, int]:
    payload = _read_payload(args.input)
    if "chsh_ab" in payload:
        b_ab = float(_require(payload, "chsh_ab"))
        b_ac = float(_require(payload, "chsh_ac"))
    else:
        tct = decode_tripartite_table(payload)
        ab, ac = tct.pearson_ab, tct.pearson_ac
        b_ab = float(ab[0, 0] + ab[1, 0] + ab[0, 1] - ab[1, 1])
        b_ac = float(ac[0, 0] + ac[1, 0] + ac[0, 1] - ac[1, 1])
    res = multiparty.monogamy_check(b_ab, b_ac, tol=args.tol)
    res["chsh_ab"] = b_ab
    res["chsh_ac"] = b_ac
    return res, 0 if res["pass_sq"] and res["pass_abs"] else 1


def _cmd_nparty(args) -> tuple[dict, int]:
    npc, r_prime = decode_nparty(_read_payload(args.input))
    res = multiparty.nparty_bound_check(npc, r_prime, tol=args.tol)
    return res, 0 if res["pass"] else 1


def _cmd_zeta_bound(args) -> tuple[dict, int]:
    tct = decode_tripartite_table(_read_payload(args.input))
    ctx1 = tuple(int(x) for x in args.context.split(","))
    ctx2 = tuple(int(x) for x in args.context2.split(","))
    if len(ctx1) != 2 or len(ctx2) != 2:
        raise MalformedInputError("contexts must be 'l,k' pairs")
    res = multiparty.zeta_bound_check(tct, ctx1=ctx1, ctx2=ctx2, tol=args.tol)
    return res, 0 if res["pass"] else 1


def _cmd_optimize(args) -> tuple[dict, int]:
    cfg = optimizer.OptConfig(
        restarts=args.restarts, max_evals=args.max_evals, seed=args.seed
    )
    res = optimizer.maximize(optimizer.chsh_objective, cfg)
    out = {
        "best_chsh": res.best_value,
        "evaluations": res.evaluations,
        "trajectory_max": res.trajectory_max,
        "trace": list(res.trace),
        "params": {
            "state_angles": res.best_params.state_angles.tolist(),
            "alice_bloch": res.best_params.alice_bloch.tolist(),
            "bob_bloch": res.best_params.bob_bloch.tolist(),
        },
    }
    return out, 0


def _cmd_eta_curve(args) -> tuple[dict, int]:
    etas = [float(x) for x in args.etas.split(",") if x.strip() != ""]
    cfg = optimizer.OptConfig(
        restarts=args.restarts, max_evals=args.max_evals, seed=args.seed
    )
    pts = optimizer.trace_eta_curve(etas, cfg)
    return {"points": pts}, 0


def _cmd_geometry(args) -> tuple[dict, int]:
    ct, _ = decode_bipartite_table(_read_payload(args.input))
    return emit_geometry(ct, tol=args.tol), 0


def emit_geometry(ct: CorrelatorTable, tol: float = 1e-9) -> dict:
    """Disk geometry of the two admissible regions in the r' plane.

    Each remote setting confines the normalized uncertainty parameter to a
    disk centered on the real axis; the real-axis restriction is the pair of
    feasibility intervals, classified as disjoint, tangent, or overlapping.
    """
    circles = []
    intervals = []
    for j in (0, 1):
        iv = ri.r_interval_bipartite(ct, j)
        center = 0.5 * (iv.lo + iv.hi)
        radius = 0.5 * (iv.hi - iv.lo)
        circles.append({"context": iv.context, "center": center, "radius": radius})
        intervals.append(iv)
    gap = max(iv.lo for iv in intervals) - min(iv.hi for iv in intervals)
    if gap > tol:
        relation = "disjoint"
        touch = None
    elif gap >= -tol:
        relation = "tangent"
        touch = [0.5 * (max(iv.lo for iv in intervals) + min(iv.hi for iv in intervals)), 0.0]
    else:
        relation = "overlapping"
        touch = None
    out = {
        "circles": circles,
        "relation": relation,
        "gap": max(0.0, gap),
        "intervals": [iv.to_json_dict() for iv in intervals],
    }
    if touch is not None:
        out["intersection_point"] = touch
    return out


_HANDLERS = {
    "classify": _cmd_classify,
    "ri-intervals": _cmd_ri_intervals,
    "tlm-check": _cmd_tlm_check,
    "epsilon": _cmd_epsilon,
    "pr-demo": _cmd_pr_demo,
    "simulate": _cmd_simulate,
    "quantum-bound": _cmd_quantum_bound,
    "chsh-r-tradeoff": _cmd_chsh_r_tradeoff,
    "monogamy": _cmd_monogamy,
    "nparty": _cmd_nparty,
    "zeta-bound": _cmd_zeta_bound,
    "optimize": _cmd_optimize,
    "eta-curve": _cmd_eta_curve,
    "geometry": _cmd_geometry,
}

_NEEDS_INPUT = {
    "classify",
    "ri-intervals",
    "tlm-check",
    "epsilon",
    "simulate",
    "quantum-bound",
    "chsh-r-tradeoff",
    "monogamy",
    "nparty",
    "zeta-bound",
    "geometry",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellri",
        description="Classify correlation data against locality, quantum, and "
        "shared-uncertainty feasibility bounds.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        if verb in _NEEDS_INPUT:
            p.add_argument("--input", default="-", help="JSON file path, or - for stdin")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="also write the JSON result here")
        if verb in ("optimize", "eta-curve"):
            p.add_argument("--restarts", type=int, default=24)
            p.add_argument("--max-evals", type=int, default=2000, dest="max_evals")
        if verb == "eta-curve":
            p.add_argument(
                "--etas", default="0,0.25,0.5,0.7071067811865476,0.9",
                help="comma-separated targets in [0, 1]",
            )
        if verb == "zeta-bound":
            p.add_argument("--context", default="0,0", help="first (l,k) pair")
            p.add_argument("--context2", default="1,1", help="second (l,k) pair")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", 1e-9) <= 0:
        print(json.dumps({"error": "tol must be positive"}), file=sys.stderr)
        return 2
    try:
        payload, code = _HANDLERS[args.verb](args)
    except (BellRIError, ValueError, TypeError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
