"""Batch command-line front end; every command prints one JSON report.

Exit codes: 0 pass, 1 identity violation, 2 configuration error, 3 internal fault.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction

from .cartan import AlgebraKind, CartanError, build_cartan
from .clifford import (CACHE_ENV, CliffordError, CliffordType, build_fock, classical_oracle,
                       compare_with_oracle, graded_dims, verify_relations)
from .conventions import ledger_hash
from .rmatrix import build_rbar, check_intertwining, check_ybe, invariant_dimension, invariant_vector
from .series import DEFAULT_ORDER, double_swap_check, f_series, rho_series
from .spinor import SpinorError, build_L, check_L_exchange
from .vecrep import derive_xi, duality_matrix, intertwines, verify_relations as rep_verify

EXIT_PASS, EXIT_VIOLATION, EXIT_CONFIG, EXIT_FAULT = 0, 1, 2, 3
LATTICE = {"half": "Z+1/2", "Z": "Z"}


class ConfigError(ValueError):
    pass


def _kind(args) -> AlgebraKind:
    return AlgebraKind(args.kind, args.rank)


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a rational number: {s!r}") from e


def _sample(s: str) -> tuple:
    parts = [_fraction(x) for x in s.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"a sample is v,z,w; got {s!r}")
    return tuple(parts)


def _module(args):
    t = CliffordType(_kind(args), LATTICE[args.type])
    return build_fock(t, _fraction(args.max_degree), backend=args.backend, trials=args.trials,
                      seed=args.seed, cache_dir=args.cache_dir)


# ---------------------------------------------------------------- commands

def cmd_cartan(args):
    cd = build_cartan(_kind(args))
    return True, ["cartan.data"], cd.to_json(), {}


def cmd_rep_verify(args):
    v = rep_verify(_kind(args))
    return not v, ["rep.defining-relations", "rep.q-serre"], {"violations": [x.to_json() for x in v]}, {}


def cmd_rep_xi(args):
    kind = _kind(args)
    rep = derive_xi(kind)
    fails = {str(s): [str(g) for g in intertwines(kind, rep.xi, s)] for s in (1, -1)}
    ok = not any(fails.values())
    return ok, ["rep.xi", "rep.duality"], {**rep.to_json(), "intertwining_failures": fails,
                                           "C_plus": duality_matrix(kind, 1).to_json()}, {}


def cmd_rmatrix_build(args):
    return True, ["rmatrix.build"], build_rbar(_kind(args)).to_json(), {}


def cmd_rmatrix_ybe(args):
    samples = [_sample(s) for s in args.sample] or None
    if args.exact_z:
        pts = [(s[0], s[2]) for s in samples] if samples else None
        rep = check_ybe(_kind(args), mode="exact", samples=pts)
    else:
        rep = check_ybe(_kind(args), samples=samples)
    return rep.ok, ["rmatrix.ybe"], rep.to_json(), {}


def cmd_rmatrix_intertwine(args):
    rep = check_intertwining(_kind(args))
    return rep.ok, ["rmatrix.intertwining"], rep.to_json(), {}


def cmd_rmatrix_invariant(args):
    kind = _kind(args)
    dim = invariant_dimension(kind)
    vec = {f"{i},{j}": x.to_json() for (i, j), x in sorted(invariant_vector(kind).items())} if dim == 1 else {}
    return dim == 1, ["rmatrix.invariant"], {"dimension": dim, "vector": vec}, {}


def cmd_series_rho(args):
    return True, ["series.rho"], rho_series(_kind(args), args.order).to_json(), {}


def cmd_series_f(args):
    return True, ["series.f"], f_series(_kind(args), args.order).to_json(), {}


def cmd_series_double_swap(args):
    rep = double_swap_check(_kind(args), args.order)
    return rep.ok, ["series.double-swap"], rep.to_json(), {}


def cmd_fock_build(args):
    m = _module(args)
    out = m.to_json()
    ok = True
    if args.verify:
        rep = verify_relations(m)
        out["verify"] = rep.to_json()
        ok = rep.ok
    return ok, ["fock.build"] + (["fock.relations"] if args.verify else []), out, \
        {"timings": m.timings, **m.backend.describe()}


def cmd_fock_dims(args):
    m = _module(args)
    dims = [[str(d), n] for d, n in graded_dims(m)]
    return True, ["fock.dims"], {"type": str(m.ctype), "dims": dims}, m.backend.describe()


def cmd_fock_oracle_compare(args):
    m = _module(args)
    table = compare_with_oracle(m)
    return all(r["equal"] for r in table), ["fock.oracle-compare"], \
        {"type": str(m.ctype), "table": table}, m.backend.describe()


def cmd_fock_oracle(args):
    t = CliffordType(_kind(args), LATTICE[args.type])
    dims = [[str(d), n] for d, n in classical_oracle(t, _fraction(args.max_degree))]
    return True, ["fock.oracle"], {"type": str(t), "dims": dims}, {}


def cmd_spinor_build_l(args):
    m = _module(args)
    L = build_L(m)
    return True, ["spinor.build-l"], L.to_json(m.backend), m.backend.describe()


def cmd_spinor_exchange(args):
    m = _module(args)
    rep = check_L_exchange(m, args.series_order, _fraction(args.fock_degree))
    return rep.ok, ["spinor.exchange"], rep.to_json(), m.backend.describe()


# ---------------------------------------------------------------- parser

def _common(p, fock=False):
    p.add_argument("--kind", choices=["B", "D"], required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--output", help="also write the report to this path")
    if fock:
        p.add_argument("--type", choices=sorted(LATTICE), default="half")
        p.add_argument("--max-degree", default="2")
        p.add_argument("--backend", choices=["modular", "exact"], default="modular")
        p.add_argument("--trials", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cache-dir", default=None, help=f"defaults to ${CACHE_ENV}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="group", required=True)

    p = sub.add_parser("cartan")
    _common(p)
    p.set_defaults(func=cmd_cartan)

    rep = sub.add_parser("rep").add_subparsers(dest="action", required=True)
    for name, fn in (("verify", cmd_rep_verify), ("xi", cmd_rep_xi)):
        p = rep.add_parser(name)
        _common(p)
        p.set_defaults(func=fn)

    rm = sub.add_parser("rmatrix").add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_rmatrix_build), ("intertwine", cmd_rmatrix_intertwine),
                     ("invariant", cmd_rmatrix_invariant)):
        p = rm.add_parser(name)
        _common(p)
        p.set_defaults(func=fn)
    p = rm.add_parser("ybe")
    _common(p)
    p.add_argument("--sample", action="append", default=[], help="v,z,w as rationals; repeatable")
    p.add_argument("--exact-z", action="store_true", help="exact in z at each (v, w)")
    p.set_defaults(func=cmd_rmatrix_ybe)

    se = sub.add_parser("series").add_subparsers(dest="action", required=True)
    for name, fn, default in (("rho", cmd_series_rho, DEFAULT_ORDER), ("f", cmd_series_f, DEFAULT_ORDER),
                              ("double-swap", cmd_series_double_swap, 8)):
        p = se.add_parser(name)
        _common(p)
        p.add_argument("--order", type=int, default=default)
        p.set_defaults(func=fn)

    fo = sub.add_parser("fock").add_subparsers(dest="action", required=True)
    p = fo.add_parser("build")
    _common(p, fock=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_fock_build)
    for name, fn in (("dims", cmd_fock_dims), ("oracle-compare", cmd_fock_oracle_compare),
                     ("oracle", cmd_fock_oracle)):
        p = fo.add_parser(name)
        _common(p, fock=True)
        p.set_defaults(func=fn)

    sp = sub.add_parser("spinor").add_subparsers(dest="action", required=True)
    p = sp.add_parser("build-l")
    _common(p, fock=True)
    p.set_defaults(func=cmd_spinor_build_l)
    p = sp.add_parser("exchange")
    _common(p, fock=True)
    p.add_argument("--series-order", type=int, default=1)
    p.add_argument("--fock-degree", default="1")
    p.set_defaults(func=cmd_spinor_exchange)
    return ap


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    print(text)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    command = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
    t0 = time.perf_counter()
    base = {"command": command, "ledger_hash": ledger_hash()}
    try:
        ok, tags, result, meta = args.func(args)
    except (ConfigError, CartanError, CliffordError, SpinorError) as e:
        _emit({**base, "ok": False, "error": {"type": "config", "message": str(e)}}, args.output)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001
        _emit({**base, "ok": False, "error": {"type": "internal", "class": type(e).__name__,
                                               "message": str(e)}}, args.output)
        return EXIT_FAULT
    backend = meta.get("backend", "exact")
    _emit({**base, "ok": ok, "backend": backend, "checks": tags, "result": result,
           "metadata": {"runtime_s": round(time.perf_counter() - t0, 3), **meta}}, args.output)
    return EXIT_PASS if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
