"""Command-line front end.

Exit codes: 0 success, 1 an identity failed, 2 bad input (parse or
validation), 3 Hamiltonian unsupported by the numerical integrator.
JSON and CSV go to stdout or files; human-readable summaries go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .algebra import GradedPolynomial
from .cartan import MultivectorSpec
from .charges import extended_hamiltonian
from .dynamics import grassmann_state, integrate, matrix_state, monitor, monitor_series
from .equivariant import BasisTooLarge, build_instance, equivariant_cohomology
from .expr import NonPolynomialError, ParseError, format_poly, parse
from .modelfile import ModelFileError, load_model
from .report import dumps, format_float
from .superfield import berezin_H, evaluate, superfield
from .verify import SUITES, run_suite

EXIT_OK, EXIT_IDENTITY, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text: str, name: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{name}: expected comma-separated numbers, got {text!r}") from None


# ------------------------------------------------------------------ verify
def cmd_verify(args) -> int:
    model = load_model(args.model)
    results = run_suite(model, args.suite)
    passed = all(i.passed for ids in results.values() for i in ids)
    report = {
        "model": model.name,
        "n": model.n,
        "hamiltonian": format_poly(model.H),
        "suite": args.suite,
        "passed": passed,
        "suites": {name: {"passed": all(i.passed for i in ids),
                          "identities": [i.to_json() for i in ids]}
                   for name, ids in results.items()},
    }
    _emit(dumps(report), args.out)
    for name, ids in results.items():
        bad = [i.name for i in ids if not i.passed]
        _log(f"{name}: {len(ids) - len(bad)}/{len(ids)} identities hold" + (f"; failing: {', '.join(bad)}" if bad else ""))
    return EXIT_OK if passed else EXIT_IDENTITY


# ------------------------------------------------------------------ evolve
def _seed_label(mask: int) -> str:
    return "t" + "t".join(str(b + 1) for b in range(mask.bit_length()) if mask >> b & 1)


def _step_plan(args):
    if args.t_final is not None:
        if not args.t_final > 0:
            raise InputError("--t-final must be positive")
        if args.steps is not None:
            steps = args.steps
        elif args.dt is not None:
            if not args.dt > 0:
                raise InputError("--dt must be positive")
            steps = max(1, int(round(args.t_final / args.dt)))
        else:
            raise InputError("--t-final needs --dt or --steps")
        if steps < 1:
            raise InputError("--steps must be >= 1")
        return args.t_final / steps, steps
    if args.dt is None or args.steps is None:
        raise InputError("give --dt and --steps (or --t-final)")
    if not args.dt > 0:
        raise InputError("--dt must be positive")
    if args.steps < 0:
        raise InputError("--steps must be non-negative")
    return args.dt, args.steps


def cmd_evolve(args) -> int:
    try:
        model = load_model(args.model)
    except NonPolynomialError as exc:
        _log(f"unsupported Hamiltonian: {exc}")
        return EXIT_UNSUPPORTED
    if not model.H.is_real():
        _log("unsupported Hamiltonian: complex coefficients cannot be integrated numerically")
        return EXIT_UNSUPPORTED
    dt, steps = _step_plan(args)
    N = model.N
    phi0 = _floats(args.phi0, "--phi0")
    lam0 = _floats(args.lam0, "--lam0") if args.lam0 else None
    if len(phi0) != N or (lam0 is not None and len(lam0) != N):
        raise InputError(f"--phi0/--lam0 need {N} entries for n={model.n}")
    if args.mode == "matrix":
        state = matrix_state(model, phi0, lam0)
    else:
        state = grassmann_state(model, phi0, lam0)
    traj = integrate(model, state, dt, steps)
    series = monitor_series(traj)
    J, _ = traj.jacobians()

    header = ["t"] + [f"phi_{a}" for a in range(1, N + 1)]
    columns = [traj.times[:, None], traj.phi]
    if args.mode == "matrix":
        header += [f"lambda_{a}" for a in range(1, N + 1)]
        columns.append(traj.lam)
    else:
        lam = traj.lam  # (T, N, 2**G)
        even = [m for m in range(lam.shape[-1]) if bin(m).count("1") % 2 == 0]
        for a in range(N):
            for m in even:
                tag = "" if m == 0 else "_" + _seed_label(m)
                header += [f"lambda_{a + 1}{tag}_re", f"lambda_{a + 1}{tag}_im"]
                columns.append(np.stack([lam[:, a, m].real, lam[:, a, m].imag], axis=1))
    header += [f"J_{a}{b}" for a in range(1, N + 1) for b in range(1, N + 1)]
    columns.append(J.reshape(len(traj), -1))
    header += list(series)
    columns.append(np.stack([series[k] for k in series], axis=1))
    table = np.concatenate(columns, axis=1)

    out = Path(args.out)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in table:
            writer.writerow([format_float(float(x)) for x in row])
    summary = {
        "model": model.name,
        "mode": args.mode,
        "dt": dt,
        "steps": steps,
        "t_final": float(traj.times[-1]),
        "phi_initial": traj.phi[0],
        "phi_final": traj.phi[-1],
        "closure": float(np.abs(traj.phi[-1] - traj.phi[0]).max()),
        "monitor": monitor(model, traj),
    }
    mon_path = out.with_suffix(".monitor.json")
    mon_path.write_text(dumps(summary))
    _log(f"wrote {out} ({len(traj)} rows) and {mon_path}")
    return EXIT_OK


# -------------------------------------------------------------- superfield
def cmd_superfield(args) -> int:
    model = load_model(args.model)
    fields = [superfield(model, a) for a in range(1, model.N + 1)]
    expanded = evaluate(model.H, fields)
    integral = berezin_H(model)
    tilde = extended_hamiltonian(model)
    equal = integral == tilde
    report = {
        "model": model.name,
        "hamiltonian": format_poly(model.H),
        "superfields": {f"Phi_{a}": {k: format_poly(v) for k, v in f.slots().items()}
                        for a, f in enumerate(fields, start=1)},
        "H_of_superfields": {k: format_poly(v) for k, v in expanded.slots().items()},
        "berezin_integral": format_poly(integral),
        "extended_hamiltonian": format_poly(tilde),
        "equal": equal,
    }
    _emit(dumps(report), args.out)
    _log(f"i * int dtheta dthetabar H[Phi] = {format_poly(integral)}")
    _log(f"H~ = {format_poly(tilde)}")
    _log(f"equal: {equal}")
    return EXIT_OK if equal else EXIT_IDENTITY


# -------------------------------------------------------------- cohomology
def _vector_field(model, spec: str) -> MultivectorSpec:
    if spec == "hamiltonian":
        return MultivectorSpec.vector(model.flow)
    if spec == "zero":
        return MultivectorSpec.vector([GradedPolynomial.zero(model.n)] * model.N)
    parts = spec.split(",")
    if len(parts) != model.N:
        raise InputError(f"--vector needs {model.N} comma-separated components, got {len(parts)}")
    comps = [parse(p, model.n) for p in parts]
    if any(not c.free_of("lam", "c", "cb") for c in comps):
        raise InputError("vector field components may only depend on phi")
    return MultivectorSpec.vector(comps)


def cmd_cohomology(args) -> int:
    model = load_model(args.model)
    V = _vector_field(model, args.vector)
    try:
        inst = build_instance(V, args.degree_cap, args.max_basis)
    except BasisTooLarge as exc:
        raise InputError(f"{exc}; raise GHOSTCARTAN_MAX_BASIS or lower --degree-cap") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    square_ok, _ = inst.square_identity()
    result = equivariant_cohomology(inst)
    report = result.to_json()
    report["model"] = model.name
    report["vector"] = args.vector
    report["square_identity"] = square_ok
    _emit(dumps(report), args.out)
    _log(f"total dimension {result.total_dim} (complete blocks: {report['total_dim_complete']})")
    for entry in report["classes"]:
        _log(f"  bigrade {tuple(entry['bigrade'])}: dim {entry['dim']}")
    return EXIT_OK if square_ok else EXIT_IDENTITY


# ------------------------------------------------------------------- main
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghostcartan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run exact identity suites on a model")
    p.add_argument("model")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", help="integrate the extended equations of motion")
    p.add_argument("model")
    p.add_argument("--phi0", required=True, help="comma-separated initial phi")
    p.add_argument("--lam0", help="comma-separated initial lambda (default 0)")
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--t-final", type=float, dest="t_final",
                   help="integrate to exactly this time; dt is adjusted to divide it evenly")
    p.add_argument("--mode", choices=("matrix", "grassmann"), default="matrix")
    p.add_argument("--out", required=True, help="trajectory CSV; the monitor JSON is written beside it")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("superfield", help="expand H on superfields and compare with H~")
    p.add_argument("model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_superfield)

    p = sub.add_parser("cohomology", help="equivariant cohomology of d - iota_V")
    p.add_argument("model")
    p.add_argument("--vector", default="hamiltonian",
                   help="'hamiltonian', 'zero', or comma-separated component expressions")
    p.add_argument("--degree-cap", type=int, required=True, dest="degree_cap")
    p.add_argument("--max-basis", type=int, dest="max_basis",
                   help="basis size cap (default: GHOSTCARTAN_MAX_BASIS or 20000)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cohomology)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, ModelFileError, InputError) as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT
    except ValueError as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
