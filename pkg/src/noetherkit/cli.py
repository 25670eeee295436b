"""Command-line front end.

Subcommands: ``describe``, ``solve``, ``verify``, ``integrate``, and
``corpus {list, export}``.  Reports are JSON with the seed recorded, so a
repeated invocation with the same seed is byte-identical.

Exit codes: 0 success / PASS, 1 verification FAIL, 2 parse error,
3 regularity failure, 4 conservation precheck failure, 5 singularity during
a solve, 6 trajectory truncated at a singular zone.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path

from . import corpus as corpus_mod
from .dsl import ExprSyntaxError, parse, print_expr
from .dynamics import integrate, monitor_drift, write_trajectory_csv
from .expressions import SamplingError, UndeclaredSymbolError
from .mechanics import RegularityError
from .noether import (
    FORMS,
    NotConservedError,
    noether_integral,
    solve_alt_strong_trivial_gauge,
    solve_onflow_simplest,
    solve_onflow_with_R,
    solve_strong,
    verify_triple,
)
from .sysfile import (
    SystemFileError,
    read_system_file,
    read_triple_file,
    write_triple_file,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_REGULARITY = 3
EXIT_NOT_CONSERVED = 4
EXIT_SINGULAR = 5
EXIT_TRUNCATED = 6


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load_system(path: str):
    try:
        return read_system_file(path)
    except (OSError, SystemFileError, ExprSyntaxError, UndeclaredSymbolError) as err:
        print(f"error: {err}", file=_sys.stderr)
        raise SystemExit(EXIT_PARSE)
    except RegularityError as err:
        print(f"error: {err}", file=_sys.stderr)
        raise SystemExit(EXIT_REGULARITY)


def cmd_describe(args) -> int:
    sf = _load_system(args.system)
    sysdef = sf.system
    print(f"system {sysdef.name}: dim n = {sysdef.n}")
    print(f"  L = {print_expr(sysdef.L)}")
    for i, pi in enumerate(sysdef.p):
        print(f"  p[{i}] = {print_expr(pi)}")
    n = sysdef.n
    for i in range(n):
        row = ", ".join(print_expr(sysdef.g[i, j]) for j in range(n))
        print(f"  g[{i}] = [{row}]")
    for i, li in enumerate(sysdef.lam):
        print(f"  Lambda[{i}] = {print_expr(li)}")
    print(f"  regularity: sampled OK (|det g| above floor at 20 points)")
    for name, expr in sf.integrals.items():
        print(f"  integral {name} = {print_expr(expr)}")
    return EXIT_OK


def cmd_solve(args) -> int:
    sf = _load_system(args.system)
    sysdef = sf.system
    if args.integral in sf.integrals:
        N = sf.integrals[args.integral]
    else:
        try:
            N = parse(args.integral, sysdef.alphabet)
        except (ExprSyntaxError, UndeclaredSymbolError) as err:
            print(f"error: {err}", file=_sys.stderr)
            return EXIT_PARSE
    try:
        tau = parse(args.tau, sysdef.alphabet) if args.tau else None
        R = [parse(r, sysdef.alphabet) for r in args.R.split(";")] if args.R else None
        if args.mode == "onflow-simplest":
            tr = solve_onflow_simplest(sysdef, N, c=args.c, seed=args.seed)
        elif args.mode == "onflow-R":
            if R is None:
                R = [0] * sysdef.n
            tr = solve_onflow_with_R(sysdef, N, R, c=args.c, seed=args.seed)
        elif args.mode == "strong":
            tr = solve_strong(sysdef, N, tau if tau is not None else 0, seed=args.seed)
        else:  # alt-strong
            tr = solve_alt_strong_trivial_gauge(sysdef, N, c=args.c, seed=args.seed)
    except (ExprSyntaxError, UndeclaredSymbolError) as err:
        print(f"error: {err}", file=_sys.stderr)
        return EXIT_PARSE
    except NotConservedError as err:
        print(f"error: {err}", file=_sys.stderr)
        return EXIT_NOT_CONSERVED
    except (RegularityError, SamplingError, ZeroDivisionError) as err:
        print(f"error: {err}", file=_sys.stderr)
        return EXIT_SINGULAR
    tr = tr.simplified()
    rep = verify_triple(sysdef, tr, N, k=args.k, tol=args.tol, seed=args.seed)
    report = {
        "solver": args.mode,
        "triple": {
            "tau": print_expr(tr.tau),
            "xi": [print_expr(x) for x in tr.xi],
            "f": print_expr(tr.f),
            "form": tr.form,
        },
        "verification": rep.to_dict(),
    }
    if args.triple_out:
        write_triple_file(args.triple_out, {args.integral: tr})
    _emit(report, args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    sf = _load_system(args.system)
    sysdef = sf.system
    try:
        triples = read_triple_file(args.triple, sysdef.alphabet)
    except (OSError, SystemFileError, ExprSyntaxError, UndeclaredSymbolError) as err:
        print(f"error: {err}", file=_sys.stderr)
        return EXIT_PARSE
    form = args.form.replace("-", "_") if args.form else None
    all_passed = True
    reports = []
    try:
        for name, tr in triples.items():
            rep = verify_triple(
                sysdef, tr, form=form, k=args.k, tol=args.tol, seed=args.seed
            )
            reports.append({"triple": name, **rep.to_dict()})
            all_passed = all_passed and rep.passed
            if not rep.passed:
                print(
                    f"FAIL {name}: residual {rep.max_residual:.3e} "
                    f"at witness {rep.worst_point}",
                    file=_sys.stderr,
                )
    except SamplingError as err:
        print(f"error: {err}", file=_sys.stderr)
        return EXIT_SINGULAR
    _emit({"reports": reports}, args.out)
    return EXIT_OK if all_passed else EXIT_FAIL


def cmd_integrate(args) -> int:
    sf = _load_system(args.system)
    sysdef = sf.system
    state = [float(x) for x in args.state.split(",")]
    if len(state) != 1 + 2 * sysdef.n:
        print(
            f"error: state needs t0 and {2 * sysdef.n} components",
            file=_sys.stderr,
        )
        return EXIT_PARSE
    t0, q0, qd0 = state[0], state[1:1 + sysdef.n], state[1 + sysdef.n:]
    traj = integrate(sysdef, (t0, q0, qd0), args.t1, dt=args.dt)
    if args.csv:
        write_trajectory_csv(traj, args.csv, sysdef.alphabet.coords)
    drifts = []
    for name in args.monitor or []:
        if name not in sf.integrals:
            print(f"error: unknown integral {name!r}", file=_sys.stderr)
            return EXIT_PARSE
        drifts.append(monitor_drift(sysdef, traj, sf.integrals[name], name).to_dict())
    _emit(
        {
            "system": sysdef.name,
            "nodes": len(traj.t),
            "dt": traj.dt,
            "truncated": traj.truncated,
            "drift": drifts,
        },
        args.out,
    )
    return EXIT_TRUNCATED if traj.truncated else EXIT_OK


def cmd_corpus(args) -> int:
    if args.action == "list":
        for name in corpus_mod.CORPUS_NAMES:
            print(name)
        return EXIT_OK
    entry = corpus_mod.load(args.name)
    from .sysfile import write_system_file

    out = args.out or f"{args.name}.sys"
    write_system_file(
        out,
        entry.system,
        integrals=entry.integrals,
        triples={k: tr.simplified() for k, tr in entry.triples.items()},
    )
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="noetherkit",
        description="Build and verify Killing-type solution triples for "
        "Lagrangian systems",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--k", type=int, default=100, help="sample count")
        p.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("describe", help="print the derived structure of a system")
    p.add_argument("system")
    p.set_defaults(fn=cmd_describe)

    p = sub.add_parser("solve", help="build a triple for a first integral")
    p.add_argument("system")
    p.add_argument("integral", help="integral name from the file, or an expression")
    p.add_argument(
        "--mode",
        choices=["onflow-simplest", "onflow-R", "strong", "alt-strong"],
        required=True,
    )
    p.add_argument("--tau", help="time-change expression (strong mode)")
    p.add_argument("--R", help="semicolon-separated vector (onflow-R mode)")
    p.add_argument("--c", type=float, default=0.0, help="denominator shift L+c")
    p.add_argument("--triple-out", help="write the resulting triple file here")
    common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="verify triples from a file")
    p.add_argument("system")
    p.add_argument("triple")
    p.add_argument(
        "--form", choices=[f.replace("_", "-") for f in FORMS],
        help="override the claimed interpretation",
    )
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("integrate", help="integrate the equations of motion")
    p.add_argument("system")
    p.add_argument("state", help="t0,q...,qdot... comma-separated")
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--monitor", nargs="*", help="integral names to monitor")
    p.add_argument("--csv", help="trajectory CSV output path")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("corpus", help="list or export bundled systems")
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("name", nargs="?", choices=list(corpus_mod.CORPUS_NAMES))
    p.add_argument("--out")
    p.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "corpus" and args.action == "export" and not args.name:
        print("error: corpus export needs a name", file=_sys.stderr)
        return EXIT_PARSE
    try:
        return args.fn(args)
    except SystemExit as err:
        return int(err.code or 0)


if __name__ == "__main__":
    raise SystemExit(main())
