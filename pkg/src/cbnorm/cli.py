"""Command-line front end.

Input files are UTF-8 JSON documents::

    {"kind": "density-pair" | "choi" | "stinespring",
     "dims": {"n": ..., "m": ..., "k": ...},
     "matrices": {"P": ..., "Q": ...} | {"J": ...} | {"A0": ..., "A1": ...}}

where every matrix is a list of rows and every entry a ``[re, im]`` pair.
Exit codes: 0 optimal, 1 usage or input error, 2 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import channels, diagnostics, oracles, programs
from .channels import ChoiMatrix, StinespringPair
from .linalg import NotPSDError, ShapeError, fidelity_direct
from .sdp import DEFAULT_MAX_ITER, DEFAULT_TOL

log = logging.getLogger("cbnorm")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

_REQUIRED = {
    "density-pair": (("n",), ("P", "Q")),
    "choi": (("n", "m"), ("J",)),
    "stinespring": (("n", "m", "k"), ("A0", "A1")),
}


class InputError(Exception):
    """Malformed or inconsistent input document."""


@dataclass
class InputDocument:
    kind: str
    dims: dict
    matrices: dict

    def channel(self) -> channels.ChannelRep:
        d, mats = self.dims, self.matrices
        if self.kind == "choi":
            return ChoiMatrix(mats["J"], d["n"], d["m"])
        if self.kind == "stinespring":
            return StinespringPair(mats["A0"], mats["A1"], d["n"], d["m"], d["k"])
        raise InputError(f"expected a 'choi' or 'stinespring' document, got kind '{self.kind}'")


def decode_matrix(rows, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError(f"matrix '{name}' must be a non-empty list of rows")
    width = len(rows[0])
    out = np.zeros((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"matrix '{name}': row {i} has {len(row)} entries, expected {width}")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            ):
                raise InputError(f"matrix '{name}': entry ({i}, {j}) must be a [re, im] pair of numbers")
            out[i, j] = complex(entry[0], entry[1])
    if not np.all(np.isfinite(out)):
        raise InputError(f"matrix '{name}' has non-finite entries")
    return out


def encode_matrix(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def parse_document(text: str) -> InputDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError("top level must be a JSON object")
    for key in ("kind", "dims", "matrices"):
        if key not in raw:
            raise InputError(f"missing field '{key}'")
    kind = raw["kind"]
    if kind not in _REQUIRED:
        raise InputError(f"unknown kind '{kind}' (expected one of {', '.join(_REQUIRED)})")
    dim_keys, mat_keys = _REQUIRED[kind]
    dims = raw["dims"]
    mats = raw["matrices"]
    if not isinstance(dims, dict) or not isinstance(mats, dict):
        raise InputError("'dims' and 'matrices' must be objects")
    for key in dim_keys:
        if key not in dims:
            raise InputError(f"missing field 'dims.{key}'")
        if not isinstance(dims[key], int) or isinstance(dims[key], bool) or dims[key] < 1:
            raise InputError(f"'dims.{key}' must be a positive integer")
    matrices = {}
    for key in mat_keys:
        if key not in mats:
            raise InputError(f"missing field 'matrices.{key}'")
        matrices[key] = decode_matrix(mats[key], key)
    n = dims["n"]
    expected = {
        "P": (n, n), "Q": (n, n),
        "J": (n * dims.get("m", 0), n * dims.get("m", 0)),
        "A0": (dims.get("m", 0) * dims.get("k", 0), n),
        "A1": (dims.get("m", 0) * dims.get("k", 0), n),
    }
    for key, mat in matrices.items():
        if mat.shape != expected[key]:
            raise InputError(f"matrix '{key}' has shape {mat.shape}, dims require {expected[key]}")
    return InputDocument(kind, dict(dims), matrices)


def load_document(path: str) -> InputDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text)


def document_for(rep: channels.ChannelRep) -> dict:
    """JSON document for a channel representation (inverse of :func:`parse_document`)."""
    if isinstance(rep, ChoiMatrix):
        return {"kind": "choi", "dims": {"n": rep.n, "m": rep.m}, "matrices": {"J": encode_matrix(rep.J)}}
    return {
        "kind": "stinespring",
        "dims": {"n": rep.n, "m": rep.m, "k": rep.k},
        "matrices": {"A0": encode_matrix(rep.A0), "A1": encode_matrix(rep.A1)},
    }


# -- reports -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:#.9g}"


def _certificate_fields(result: programs.NormResult) -> dict:
    c = result.certificate
    return {
        "primal_residual": c.primal_residual,
        "primal_min_eig": c.primal_min_eig,
        "dual_min_eig": c.dual_min_eig,
        "duality_gap": c.duality_gap,
        "weak_duality_ok": c.weak_duality_ok,
        "value_interval": list(c.value_interval),
    }


def _norm_report(command: str, args, result: programs.NormResult, checks: dict, elapsed: float) -> dict:
    return {
        "command": command,
        "file": args.file,
        "program": result.program,
        "value": result.value,
        "status": result.status,
        "iterations": result.solution.iterations,
        "certificate": _certificate_fields(result),
        "oracles": checks,
        "timing_s": elapsed,
        "config": {"tol": args.tol, "max_iter": args.max_iter, "seed": args.seed},
    }


def _print_text(report: dict, out) -> None:
    print(f"{report['command']}: {report['file']}", file=out)
    if "value" in report:
        print(f"  value           {_fmt(report['value'])}", file=out)
    if "status" in report:
        print(f"  status          {report['status']}", file=out)
    cert = report.get("certificate")
    if cert:
        lo, hi = cert["value_interval"]
        print(f"  interval        [{_fmt(lo)}, {_fmt(hi)}]", file=out)
        print(f"  duality gap     {cert['duality_gap']:.3e}", file=out)
        print(f"  primal residual {cert['primal_residual']:.3e}", file=out)
        print(f"  dual min eig    {cert['dual_min_eig']:.3e}", file=out)
        print(f"  weak duality    {'ok' if cert['weak_duality_ok'] else 'VIOLATED'}", file=out)
    for name, check in report.get("oracles", {}).items():
        parts = ", ".join(f"{k}={_fmt(v) if isinstance(v, float) else v}" for k, v in check.items())
        print(f"  oracle {name}: {parts}", file=out)
    for key in ("epsilon", "r_bound"):
        if key in report:
            print(f"  {key:<15} {_fmt(report[key])}", file=out)
    if "interior_point" in report:
        print(f"  interior point  {report['interior_point']}", file=out)


def _emit(report: dict, args) -> None:
    if args.json:
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        _print_text(report, sys.stdout)


def _exit_code(result: programs.NormResult) -> int:
    return EXIT_OK if result.status == "optimal" else EXIT_NUMERIC


def _trace_sink(args):
    if not args.trace:
        return None
    return lambda line: print(line, file=sys.stderr)


def cmd_fidelity(args) -> int:
    doc = load_document(args.file)
    if doc.kind != "density-pair":
        raise InputError(f"fidelity expects kind 'density-pair', got '{doc.kind}'")
    P, Q = doc.matrices["P"], doc.matrices["Q"]
    t0 = time.perf_counter()
    result = programs.fidelity_sdp(P, Q, tol=args.tol, max_iter=args.max_iter, trace=_trace_sink(args))
    direct = fidelity_direct(P, Q)
    checks = {"fidelity_direct": {"value": direct, "abs_diff": abs(direct - result.value)}}
    _emit(_norm_report("fidelity", args, result, checks, time.perf_counter() - t0), args)
    return _exit_code(result)


def _oracle_checks(rep, result, args) -> dict:
    choi = channels.to_choi(rep)
    lower, _ = oracles.rank_one_ascent(choi, oracles.AscentConfig(seed=args.seed))
    slack = args.tol * (1.0 + result.value)
    checks = {
        "rank_one_ascent": {
            "lower_bound": lower,
            "upper_bound": result.certificate.value_interval[1],
            "verdict": "pass" if lower <= result.certificate.value_interval[1] + slack else "fail",
        }
    }
    try:
        cp = oracles.cp_diamond_oracle(choi)
    except oracles.WrongRegimeError:
        pass
    else:
        ok = abs(cp - result.value) <= 1e-5 * (1.0 + cp)
        checks["cp_diamond"] = {"value": cp, "verdict": "pass" if ok else "fail"}
    return checks


def _norm_command(name: str, args, adjoint: bool) -> int:
    doc = load_document(args.file)
    if doc.kind not in ("choi", "stinespring"):
        raise InputError(f"{name} expects kind 'choi' or 'stinespring', got '{doc.kind}'")
    rep = doc.channel()
    t0 = time.perf_counter()
    fn = programs.cb_spectral_norm if adjoint else programs.diamond_norm
    result = fn(rep, tol=args.tol, max_iter=args.max_iter, trace=_trace_sink(args))
    checks = {}
    if getattr(args, "oracle", False):
        target = channels.adjoint(rep) if adjoint else rep
        checks = _oracle_checks(target, result, args)
    _emit(_norm_report(name, args, result, checks, time.perf_counter() - t0), args)
    return _exit_code(result)


def cmd_diamond(args) -> int:
    return _norm_command("diamond", args, adjoint=False)


def cmd_cb_spectral(args) -> int:
    return _norm_command("cb-spectral", args, adjoint=True)


def cmd_diagnose(args) -> int:
    doc = load_document(args.file)
    rep = doc.channel()
    report = diagnostics.solvability_report(rep)
    program = report.program
    data = rep
    verdict = diagnostics.verify_interior_point(program, data, report.epsilon, seed=args.seed)
    out = {
        "command": "diagnose",
        "file": args.file,
        "program": program,
        "epsilon": report.epsilon,
        "r_bound": report.r_bound,
        "degenerate": report.degenerate,
        "inputs": report.inputs_digest,
        "interior_point": "pass" if verdict else "fail",
        "config": {"seed": args.seed},
    }
    _emit(out, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="input JSON document")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="solver tolerance (default 1e-8)")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="iteration cap (default 200)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--trace", action="store_true", help="write the solver iteration log to stderr")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(
        prog="cbnorm",
        description="Fidelity and completely bounded norms by semidefinite programming.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("fidelity", parents=[common], help="fidelity of a density pair")
    p.set_defaults(func=cmd_fidelity)
    p = sub.add_parser("diamond", parents=[common], help="completely bounded trace norm")
    p.add_argument("--oracle", action="store_true", help="also run the independent oracles")
    p.set_defaults(func=cmd_diamond)
    p = sub.add_parser("cb-spectral", parents=[common], help="completely bounded spectral norm")
    p.set_defaults(func=cmd_cb_spectral)
    p = sub.add_parser("diagnose", parents=[common], help="interior-ball radius and trace bound")
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    if args.tol <= 0 or args.tol > 1e-2:
        print("error: --tol must lie in (0, 1e-2]", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ShapeError, NotPSDError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
