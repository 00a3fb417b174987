"""Command-line front end: ``lens``, ``orbit``, ``ss`` and ``verify``.

Every command builds one report dictionary; ``--json`` prints it, otherwise a
plain table is rendered from the same dictionary.  Exit codes: 0 success,
1 mathematical mismatch, 2 usage error.  Reports are deterministic; the
optional ``--timing`` flag adds wall time under a separate key.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Callable, Sequence

from . import __version__
from .complexes import borel_cohomology_dims, cohomology_dims, dumps_complex
from .products import lens_ring, ring_of_group
from .rings import Certificate, case_i_family, case_ii_family, check_bockstein_relation, match_presentation
from .spaces import (
    LensParams,
    default_degree_bound,
    lens_complex,
    residual_action_complex,
    standard_resolution,
)
from .spectral import BRANCHES, CONSISTENT, admissible, explore_cases, run_branch, tot_ring

SCHEMA_VERSION = 1

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "command", "params", "version", "results", "exit_code"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "params": {"type": "object"},
        "version": {"type": "string"},
        "results": {"type": "object"},
        "exit_code": {"enum": [0, 1, 2]},
        "wall_time_s": {"type": "number"},
    },
    "additionalProperties": False,
}


class UsageError(ValueError):
    pass


def _parse_q(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--q expects comma-separated integers, got {text!r}") from exc


def _params(args, n: int | None = None) -> LensParams:
    try:
        return LensParams(args.p, args.m, args.n if n is None else n, _parse_q(args.q))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _bound(args) -> int:
    D = args.max_degree if args.max_degree is not None else default_degree_bound(args.m, args.p)
    if D < 0:
        raise UsageError("--max-degree must be nonnegative")
    return D


def _ring_table(R) -> list[dict]:
    rows = []
    for d in range(R.top + 1):
        entry = {"degree": d, "dim": R.dim(d), "basis": list(R.labels[d])}
        if R.bockstein is not None and d in R.bockstein:
            entry["bockstein"] = R.bockstein[d].tolist()
        rows.append(entry)
    return rows


# ---------------------------------------------------------------------------
# commands


def cmd_lens(args) -> tuple[dict, int]:
    params = _params(args)
    D = _bound(args)
    L = lens_complex(params)
    dims = cohomology_dims(L, params.p)
    dims = (dims + [0] * (D + 1))[: D + 1]
    results: dict = {"dims": dims}
    if args.dump_complex:
        results["complex"] = json.loads(dumps_complex(L))
    code = 0
    if params.n % params.p == 0:
        R = lens_ring(params)
        hint = "z" if params.n == params.p else None
        family = case_ii_family(params.p, params.m, top=R.top, bockstein_x=hint)
        certs = match_presentation(R, family)
        results["ring"] = _ring_table(R)
        results["presentation"] = f"Z_{params.p}[x,z]/<x^2,z^{params.m}>"
        results["certificates"] = [c.to_json() for c in certs]
        beta_x = R.beta(1, R.generator("x")[1]).tolist()
        results["beta_x"] = beta_x
        results["beta_x_is"] = "z" if any(beta_x) else "0"
        if not certs:
            code = 1
    else:
        results["ring"] = None
        results["note"] = f"p does not divide n: only H^0 and H^{params.dimension} are nonzero"
    return {"params": {**params.to_json(), "max_degree": D}, "results": results}, code


def cmd_orbit(args) -> tuple[dict, int]:
    params = _params(args, n=args.p * args.p)
    D = _bound(args)
    C = residual_action_complex(params)
    W = standard_resolution(params.p, D + 1)
    borel = borel_cohomology_dims(W, C, params.p, D)
    lens = (cohomology_dims(lens_complex(params), params.p) + [0] * (D + 1))[: D + 1]
    verdict = "MATCH" if borel == lens else "MISMATCH"
    results = {"borel_dims": borel, "lens_dims": lens, "verdict": verdict}
    return {"params": {**params.to_json(), "max_degree": D}, "results": results}, 0 if verdict == "MATCH" else 1


def _ss_params(args) -> dict:
    if args.m < 2:
        raise UsageError(f"m must be > 1, got {args.m}")
    try:
        LensParams(args.p, args.m, 2)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return {"p": args.p, "m": args.m, "max_degree": _bound(args)}


def _branch_json(res) -> dict:
    out = res.to_json()
    if res.classification == CONSISTENT:
        out["tot_ring"] = tot_ring(res.final).to_json()
    return out


def cmd_ss(args) -> tuple[dict, int]:
    params = _ss_params(args)
    D = params["max_degree"]
    if args.explore:
        res = explore_cases(args.p, args.m, D)
        results = {"branches": [_branch_json(r) for r in res], "admissible": admissible(res)}
    else:
        if args.branch is None:
            raise UsageError("ss needs --branch or --explore")
        results = {"branches": [_branch_json(run_branch(args.p, args.m, args.branch, D))]}
    return {"params": {**params, "branch": args.branch, "explore": bool(args.explore)}, "results": results}, 0


def expected_admissible(p: int, m: int) -> list[str]:
    return ["case2", "case1"] if m % p == 0 else ["case2"]


def cmd_verify(args) -> tuple[dict, int]:
    params = _ss_params(args)
    p, m, D = args.p, args.m, params["max_degree"]
    if m % (p * p) == 0:
        results = {"verdict": "OUT OF THEOREM SCOPE", "note": f"p^2 = {p * p} divides m = {m}"}
        return {"params": params, "results": results}, 0
    res = explore_cases(p, m, D)
    found = admissible(res)
    ok = sorted(found) == sorted(expected_admissible(p, m))
    cases = []
    for r in res:
        if r.classification != CONSISTENT:
            continue
        T = tot_ring(r.final)
        if r.name == "case2":
            family = case_ii_family(p, m, top=D)
            label = "(ii)"
        else:
            family = case_i_family(p, m // p, top=D)
            label = "(i)"
        certs = match_presentation(T.ring, family)
        entry = {
            "branch": r.name,
            "case": label,
            "tot_checks": T.checks,
            "certificates": [c.to_json() for c in certs],
            "certified": bool(certs) and all(T.checks.values()),
        }
        if label == "(i)":
            # beta(x) = y by naturality along X_G -> B_G, where beta(s) = t
            B = ring_of_group(p, p, 3)
            cert = Certificate({"x": (1, (1,)), "y": (2, (1,))}, {}, 0)
            entry["bockstein_x_is_y"] = check_bockstein_relation(B, cert, family)
        else:
            lens_params = LensParams(p, m, p * p)
            R = lens_ring(lens_params)
            realised = match_presentation(R, case_ii_family(p, m, bockstein_x=None))
            entry["realised_by_lens_orbit"] = bool(realised)
            entry["bockstein_x_is_zero"] = bool(realised) and check_bockstein_relation(
                R, realised[0], case_ii_family(p, m, bockstein_x=None)
            )
        flags = [entry["certified"]] + [v for k, v in entry.items() if k.startswith(("bockstein", "realised"))]
        entry["verdict"] = "CERTIFIED" if all(flags) else "MISMATCH"
        ok &= entry["verdict"] == "CERTIFIED"
        cases.append(entry)
    results = {
        "verdict": "CERTIFIED" if ok else "MISMATCH",
        "classification": {r.name: r.classification for r in res},
        "admissible": found,
        "expected_admissible": expected_admissible(p, m),
        "cases": cases,
    }
    return {"params": params, "results": results}, 0 if ok else 1


# ---------------------------------------------------------------------------
# rendering


def render_text(report: dict) -> str:
    cmd, res, params = report["command"], report["results"], report["params"]
    head = f"{cmd} " + " ".join(f"{k}={v}" for k, v in params.items())
    lines = [head, "-" * len(head)]
    if cmd == "lens":
        lines.append("degree  dim  basis")
        ring = res.get("ring")
        for j, d in enumerate(res["dims"]):
            basis = ", ".join(ring[j]["basis"]) if ring and j < len(ring) else ""
            lines.append(f"{j:>6}  {d:>3}  {basis}")
        if ring is not None:
            lines.append(f"presentation {res['presentation']}: {'certified' if res['certificates'] else 'NOT matched'}")
            lines.append(f"beta(x) = {res['beta_x_is']}")
        else:
            lines.append(res["note"])
    elif cmd == "orbit":
        lines.append("degree  borel  lens")
        for j, (a, b) in enumerate(zip(res["borel_dims"], res["lens_dims"])):
            lines.append(f"{j:>6}  {a:>5}  {b:>4}")
        lines.append(f"verdict: {res['verdict']}")
    elif cmd in ("ss", "ss-run", "ss-explore"):
        for br in res["branches"]:
            lines.append(f"[{br['branch']}] {br['classification']} {br['message']}".rstrip())
            if br["total_dims"] is not None:
                lines.append("  E_inf total dims: " + " ".join(str(d) for d in br["total_dims"]))
            if br.get("tot_ring"):
                lines.append("  Tot E_inf: " + br["tot_ring"]["presentation"].replace("\n", " "))
        if "admissible" in res:
            lines.append("admissible: " + ", ".join(res["admissible"]))
    elif cmd == "verify":
        lines.append(f"verdict: {res['verdict']}")
        if "note" in res:
            lines.append(res["note"])
        for name, cls in res.get("classification", {}).items():
            lines.append(f"  {name:<14} {cls}")
        for case in res.get("cases", []):
            lines.append(f"  case {case['case']} via {case['branch']}: {case['verdict']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="odd prime")
    common.add_argument("--m", type=int, required=True, help="dimension parameter, L^{2m-1}")
    common.add_argument("--max-degree", type=int, default=None, help="degree bound (default 2m + 2p + 2)")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")

    parser = argparse.ArgumentParser(prog="lenscoh", description="mod-p cohomology of lens spaces and their orbit spaces")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    lens = sub.add_parser("lens", parents=[common], help="H*(L^{2m-1}(n; q); Z_p)")
    lens.add_argument("--n", type=int, required=True)
    lens.add_argument("--q", default=None, help="rotation weights q_1,...,q_m")
    lens.add_argument("--dump-complex", action="store_true", help="include the cellular chain complex")

    orbit = sub.add_parser("orbit", parents=[common], help="Borel cohomology of L(p) with its residual action")
    orbit.add_argument("--q", default=None)

    for name in ("ss", "ss-run", "ss-explore"):
        ss = sub.add_parser(name, parents=[common], help="symbolic spectral sequence")
        ss.add_argument("--branch", choices=BRANCHES, default=None)
        ss.add_argument("--explore", action="store_true", default=(name == "ss-explore"))

    sub.add_parser("verify", parents=[common], help="end-to-end check of the classification")
    return parser


COMMANDS: dict[str, Callable] = {
    "lens": cmd_lens,
    "orbit": cmd_orbit,
    "ss": cmd_ss,
    "ss-run": cmd_ss,
    "ss-explore": cmd_ss,
    "verify": cmd_verify,
}


def run(argv: Sequence[str] | None = None) -> tuple[dict | None, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, int(exc.code or 0)
    start = time.perf_counter()
    try:
        body, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, 2
    report = {
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "params": body["params"],
        "version": __version__,
        "results": body["results"],
        "exit_code": code,
    }
    if args.timing:
        report["wall_time_s"] = round(time.perf_counter() - start, 3)
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(render_text(report))
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)[1]


if __name__ == "__main__":
    sys.exit(main())
