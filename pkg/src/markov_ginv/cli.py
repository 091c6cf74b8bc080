"""Command-line interface: ``markov-ginv <command> CHAIN_FILE [options]``.

Every command prints a human-readable report, or with ``--json`` an
envelope holding the command, an input digest, the chain, the results, the
tolerances in force and a route-agreement summary. Failures exit non-zero
and print a JSON error object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import ginverse as gi
from . import moments as mo
from . import passage as pt
from . import perturbation as pe
from .chain import StochasticChain, validate_chain
from .errors import ChainFileError, MarkovError
from .io import read_matrix_file, read_vector_file, round_sig
from .matrix_core import DEFAULT_TOL, Tolerance, inf_norm

DEFAULT_DIGITS = 12
TOL_ENV = "GINV_DEFAULT_TOL"


def default_tolerance() -> Tolerance:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        return Tolerance.uniform(float(raw))
    except ValueError as exc:
        raise ChainFileError(f"{TOL_ENV}={raw!r}: {exc}") from None


def parse_ginv_spec(spec: str, chain: StochasticChain) -> gi.GInverse:
    """``z``, ``group``, ``mp`` or ``param:<alpha-file>,<beta-file>,<gamma>``."""
    name = spec.strip()
    low = name.lower()
    if low == "z":
        return gi.fundamental_matrix(chain)
    if low == "group":
        return gi.group_inverse(chain)
    if low == "mp":
        return gi.moore_penrose(chain)
    if low.startswith("param:"):
        parts = name[len("param:"):].split(",")
        if len(parts) != 3:
            raise ChainFileError(f"bad g-inverse spec {spec!r}: expected param:<alpha-file>,<beta-file>,<gamma>")
        alpha = read_vector_file(parts[0])
        beta = read_vector_file(parts[1])
        try:
            gamma = float(parts[2])
        except ValueError:
            raise ChainFileError(f"bad gamma {parts[2]!r} in g-inverse spec") from None
        return gi.build_parametric(chain, gi.GInverseParams(alpha, beta, gamma))
    raise ChainFileError(f"unknown g-inverse spec {spec!r}; use z, group, mp or param:...")


def _named_case(spec: str) -> str | None:
    return {"z": "Z", "group": "group", "mp": "MP"}.get(spec.strip().lower())


def _max_gap(arrays) -> float:
    arrays = list(arrays)
    ref = arrays[0]
    return max((float(np.max(np.abs(np.asarray(a) - ref))) for a in arrays[1:]), default=0.0)


def cmd_stationary(chain, args):
    residual = inf_norm(chain.pi @ chain.P - chain.pi)
    return {"pi": chain.pi, "residual_inf": residual}, {"routes": ["stationary"], "max_discrepancy": 0.0}


def cmd_mfpt(chain, args):
    routes = args.route or ["direct"]
    need_g = any(r != "direct" for r in routes)
    g = parse_ginv_spec(args.ginv, chain) if need_g else None
    funcs = {
        "direct": lambda: pt.mfpt_direct(chain).M,
        "ginv": lambda: pt.mfpt_from_ginverse(chain, g).M,
        "deflated": lambda: pt.mfpt_from_deflated(chain, g).M,
        "simplified": lambda: pt.mfpt_simplified_15a(chain, g).M,
    }
    results = {r: funcs[r]() for r in dict.fromkeys(routes)}
    gap = _max_gap(results.values())
    out = {"M": next(iter(results.values()))}
    if len(results) > 1:
        out["by_route"] = results
    return out, {"routes": list(results), "max_discrepancy": gap}


def cmd_ginv(chain, args):
    g = parse_ginv_spec(args.build, chain)
    p = g.params
    out = {"G": g.G, "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma}
    agreement = {"routes": ["matrix"], "max_discrepancy": 0.0}
    if args.classify:
        out["classes"] = ["1"] + gi.classify(chain, g).labels()
    if args.reconstruct:
        M = pt.mfpt_direct(chain).M
        rebuilt = {"general": pt.reconstruct_ginverse(p, chain.pi, M)}
        case = _named_case(args.build)
        if case is not None:
            rebuilt[case] = pt.reconstruct_special(case, chain, M)
        errors = {k: float(np.max(np.abs(v - g.G))) for k, v in rebuilt.items()}
        out["reconstruction_error"] = errors
        agreement = {"routes": ["matrix"] + list(rebuilt), "max_discrepancy": max(errors.values())}
    return out, agreement


def cmd_kemeny(chain, args):
    g = parse_ginv_spec(args.ginv, chain)
    routes = args.route or [r.value for r in mo.KemenyRoute]
    if not args.route and not gi.classify(chain, g).c5a:
        routes = [r for r in routes if r != mo.KemenyRoute.TRACE_15A.value]
    values = {}
    spread = None
    for r in dict.fromkeys(routes):
        k = mo.kemeny_constant(chain, r, g)
        values[r] = k.value
        if k.row_spread is not None:
            spread = k.row_spread
    if spread is None:
        rows = pt.mfpt_direct(chain).M @ chain.pi
        spread = float(rows.max() - rows.min())
    out = {"K": next(iter(values.values())), "by_route": values, "row_constancy_residual": spread}
    return out, {"routes": list(values), "max_discrepancy": _max_gap(values.values())}


def cmd_moments(chain, args):
    g = parse_ginv_spec(args.ginv, chain)
    M = pt.mfpt_direct(chain).M
    tau = chain.pi @ M
    routes = mo.second_moment_diag_routes(chain, g)
    routes["tau"] = mo.second_moment_diag_from_tau(chain.pi, tau)
    routes["passage_times"] = mo.second_moment_diag_from_M(chain, M)
    Md2 = mo.second_moment_diag_from_ginverse(chain, g)
    M2 = mo.second_moment_matrix(chain, M, Md2)
    out = {"Md2": Md2, "M2": M2, "tau": mo.tau_from_ginverse(chain, g), "Md2_by_route": routes}
    return out, {"routes": list(routes), "max_discrepancy": _max_gap(routes.values())}


def cmd_perturb(chain, args):
    E = read_matrix_file(args.delta, key="E").matrix
    pert = pe.make_perturbation(chain, E)
    g = parse_ginv_spec(args.ginv, chain)
    rep = pe.delta_routes(chain, pert, g)
    K = mo.kemeny_constant(chain).value
    out = {
        "pi_bar": rep.pi_bar,
        "delta": rep.delta,
        "routes": rep.routes,
        "bound": {"lhs": rep.lhs, "K": K, "E_inf_norm": inf_norm(pert.E),
                  "bound": rep.bound, "satisfied": rep.bound_satisfied},
    }
    return out, {"routes": list(rep.routes), "max_discrepancy": rep.max_discrepancy}


COMMANDS = {
    "stationary": cmd_stationary,
    "mfpt": cmd_mfpt,
    "ginv": cmd_ginv,
    "kemeny": cmd_kemeny,
    "moments": cmd_moments,
    "perturb": cmd_perturb,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("chain_file", help="transition matrix (plain, CSV or JSON)")
    common.add_argument("--format", choices=["plain", "csv", "json"], help="override format detection")
    common.add_argument("--json", action="store_true", help="emit a JSON envelope")
    common.add_argument("--full-precision", action="store_true", help="print every digit (round-trip safe)")
    common.add_argument("--tol", type=float, help=f"tolerance (overrides ${TOL_ENV})")

    parser = argparse.ArgumentParser(prog="markov-ginv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("stationary", parents=[common], help="stationary distribution")
    p = sub.add_parser("mfpt", parents=[common], help="mean first passage times")
    p.add_argument("--route", action="append", choices=["direct", "ginv", "deflated", "simplified"])
    p.add_argument("--ginv", default="z")
    p = sub.add_parser("ginv", parents=[common], help="build and inspect a g-inverse")
    p.add_argument("--build", default="z")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--reconstruct", action="store_true")
    p = sub.add_parser("kemeny", parents=[common], help="Kemeny's constant")
    p.add_argument("--route", action="append", choices=[r.value for r in mo.KemenyRoute])
    p.add_argument("--ginv", default="z")
    p = sub.add_parser("moments", parents=[common], help="second moments of passage times")
    p.add_argument("--ginv", default="z")
    p = sub.add_parser("perturb", parents=[common], help="stationary vector under P + E")
    p.add_argument("--delta", required=True, help="perturbation matrix E (rows sum to 0)")
    p.add_argument("--ginv", default="z")
    return parser


def _format_text(value, digits) -> str:
    value = round_sig(value, digits)

    def fmt(x):
        return repr(x) if digits is None else f"{x:.{digits}g}"

    def render(v, indent):
        pad = " " * indent
        if isinstance(v, dict):
            lines = []
            for k, x in v.items():
                if isinstance(x, dict) or _is_matrix(x):
                    lines += [f"{pad}{k}:", render(x, indent + 2)]
                else:
                    lines.append(f"{pad}{k}: {render(x, 0)}")
            return "\n".join(lines)
        if _is_matrix(v):
            return "\n".join(pad + "  ".join(fmt(x) for x in row) for row in v)
        if isinstance(v, list):
            return "(" + ", ".join(render(x, 0) for x in v) + ")"
        if isinstance(v, float):
            return fmt(v)
        return str(v)

    return render(value, 0)


def _is_matrix(v) -> bool:
    return isinstance(v, list) and bool(v) and all(isinstance(r, list) for r in v)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    digits = None if args.full_precision else DEFAULT_DIGITS
    try:
        tol = Tolerance.uniform(args.tol) if args.tol is not None else default_tolerance()
        cf = read_matrix_file(args.chain_file, fmt=args.format)
        chain = validate_chain(cf.matrix, tol, labels=cf.labels)
        results, agreement = COMMANDS[args.command](chain, args)
    except (MarkovError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("row", "line"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        print(json.dumps(err), file=sys.stderr)
        return 1

    if args.command == "perturb" and not args.json:
        b = results["bound"]
        results["bound_line"] = (
            f"{b['lhs']:.{digits or 17}g} <= (K-1)*||E||_inf = ({b['K']:.{digits or 17}g}-1)*"
            f"{b['E_inf_norm']:.{digits or 17}g} = {b['bound']:.{digits or 17}g}"
        )
    if args.json:
        envelope = {
            "command": args.command,
            "argv": list(sys.argv[1:] if argv is None else argv),
            "inputs_digest": cf.digest,
            "P": chain.P,
            "labels": list(chain.labels) if chain.labels else None,
            "results": results,
            "tolerances": {"abs": tol.abs, "rel": tol.rel},
            "route_agreement": agreement,
        }
        print(json.dumps(round_sig(envelope, digits), indent=2))
    else:
        print(_format_text(results, digits))
        print(f"route agreement: max discrepancy {agreement['max_discrepancy']:.3e} over {', '.join(agreement['routes'])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
