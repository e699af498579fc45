"""Command-line front end.

Subcommands: gen, certify, moments, mc, holder, nsatz3.  Exit codes:
0 verdict reached, 1 usage error, 2 certified failure, 3 inconclusive.
Every command builds a run report; ``--json`` prints it instead of the
human summary and ``--out`` writes it to a file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from . import __version__, certify, generator, nsatz3, stiefel
from .fixtures import load_seed_pairs
from .polyalg import BiformQuad, SymMapTensor, build_QA, map_to_biform, substitute_psi

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# --- serialization ---------------------------------------------------------------------------


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ","
    nl = "\n" if indent else ""
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + nl + sep.join(items) + nl + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return f"{v:.17g}" if math.isfinite(v) else "null"
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    return json.dumps(str(obj))


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float written to 17 significant digits (non-finite floats become null)."""
    return _encode(obj, indent, 0)


class RunReport:
    def __init__(self, command: str, config: dict, seed: Optional[int]):
        self.command = command
        self.config = config
        self.seed = seed
        self.timings: Dict[str, float] = {}
        self.verdicts: Dict[str, str] = {}
        self.files: List[str] = []
        self.result: dict = {}
        self.human = ""

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - t0

    def to_json(self) -> dict:
        return {"command": self.command, "config": self.config, "seed": self.seed, "timings": self.timings,
                "verdicts": self.verdicts, "files": self.files, "version": __version__, "result": self.result}


# --- input files -----------------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_biform(path: str) -> BiformQuad:
    data = _read_json(path)
    try:
        if "diag" in data:
            return map_to_biform(SymMapTensor.from_json(data))
        return BiformQuad.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{path}: not a biform or map file ({exc})") from exc


def _load_map(path: str) -> SymMapTensor:
    data = _read_json(path)
    try:
        return SymMapTensor.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{path}: not a map file ({exc})") from exc


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(Fraction(t.strip())) for t in text.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


def _fmt_vec(v) -> str:
    return "(" + ", ".join(f"{float(t):.6g}" for t in v) + ")"


# --- commands --------------------------------------------------------------------------------


def cmd_gen(args, report: RunReport) -> int:
    if args.n < 3:
        raise UsageError("n >= 3 required")
    seeds = None
    if args.seeds_file:
        data = _read_json(args.seeds_file)
        try:
            seeds = load_seed_pairs(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"{args.seeds_file}: bad seeds file ({exc})") from exc
        if int(data.get("n", args.n)) != args.n:
            raise UsageError(f"seeds file has n = {data['n']}, command line has n = {args.n}")
    with report.stage("generate"):
        try:
            out = generator.generate(args.n, args.seed, args.delta_min, args.d_max, seeds=seeds)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        except generator.DegenerateDataError as exc:
            report.verdicts["generate"] = "degenerate"
            report.result = {"detail": str(exc)}
            return EXIT_INCONCLUSIVE
    report.verdicts["generate"] = out.status
    report.result = out.to_json()
    lines = [f"status: {out.status}"]
    if out.delta is not None:
        lines.append(f"delta = {out.delta:g} certified at d = {out.psatz.d}")
    if out.not_sos is not None:
        lines.append(f"not SOS mod I: dual value {out.not_sos.value:.6g}")
    if out.detail:
        lines.append(out.detail)
    report.human = "\n".join(lines)
    return {"success": EXIT_OK, "no_delta": EXIT_FAILED}.get(out.status, EXIT_INCONCLUSIVE)


def cmd_certify(args, report: RunReport) -> int:
    p = _load_biform(args.input)
    if p.n < 2:
        raise UsageError("n >= 2 required")
    result: dict = {}
    ccp = cp = "inconclusive"
    human = []
    modes = ("sos", "falsify", "psatz") if args.mode == "all" else (args.mode,)
    if "sos" in modes:
        with report.stage("sos_mod_I"):
            v = certify.certify_sos_mod_I(p)
        result["sos_mod_I"] = {"status": v.status, "detail": v.detail,
                               "certificate": v.certificate.to_json() if v.certificate is not None else None}
        ccp = {"sos": "yes", "not_sos": "no"}.get(v.status, "inconclusive")
        if v.status == "sos":
            cp = "certified"
            human.append("completely cross-positive: YES; cross-positive: certified (trivial)")
    if cp == "inconclusive" and "falsify" in modes:
        with report.stage("falsify"):
            w = certify.falsify_cross_positivity(p, args.restarts, args.seed)
        result["falsify"] = None if w is None else {"x": w.x, "y": w.y, "value": w.value}
        if w is not None:
            cp = "falsified"
            human.append(f"cross-positive: falsified, witness=({_fmt_vec(w.x)}, {_fmt_vec(w.y)}), "
                         f"value {w.value:.6g}")
    if cp == "inconclusive" and "psatz" in modes:
        anchor = certify.random_anchor(p.n, args.seed)
        result["psatz"] = []
        for d in range(1, args.d_max + 1):
            with report.stage(f"psatz_d{d}"):
                v = certify.certify_psatz(p, d, anchor)
            result["psatz"].append({"d": d, "status": v.status, "detail": v.detail,
                                    "certificate": v.certificate.to_json() if v.certificate is not None else None})
            if v.status == "nonneg":
                cp = "certified"
                break
    report.verdicts.update({"completely_cross_positive": ccp, "cross_positive": cp})
    report.result = result
    if not human:
        head = {"yes": "YES", "no": "NO"}.get(ccp, ccp)
        if "sos" in modes:
            human.append(f"completely cross-positive: {head}; cross-positive: {cp}")
        else:
            human.append(f"cross-positive: {cp}")
    human.append(dumps({"verdicts": report.verdicts}))
    report.human = "\n".join(human)
    if cp == "inconclusive" and ccp == "inconclusive":
        return EXIT_INCONCLUSIVE
    if cp == "inconclusive" and args.mode in ("psatz", "falsify"):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_moments(args, report: RunReport) -> int:
    if args.n < 3:
        raise UsageError("n >= 3 required")
    try:
        key = stiefel.MomentKey.parse(args.monomial)
        with report.stage("moment"):
            if key.degree == 2:
                val = stiefel.moment2(args.n, key)
            elif key.degree == 4:
                val = stiefel.moment4(args.n, key)
            else:
                raise UsageError("monomial degree must be 2 or 4")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report.result = {"monomial": str(key), "value": None if val is None else str(val)}
    if val is None:
        report.verdicts["moment"] = "untabulated"
        report.human = f"{key}: not tabulated; use the mc command"
        return EXIT_INCONCLUSIVE
    report.verdicts["moment"] = "exact"
    report.human = str(val)
    return EXIT_OK


def cmd_mc(args, report: RunReport) -> int:
    if args.trials < 1000:
        raise UsageError("trials >= 1000 required")
    if args.poly:
        p = _load_biform(args.poly)
        if args.n is not None and args.n != p.n:
            raise UsageError(f"--n {args.n} does not match the file (n = {p.n})")
        n, target = p.n, p.to_float()
        label = args.poly
    elif args.monomial:
        if args.n is None:
            raise UsageError("--n is required with --monomial")
        n, label = args.n, args.monomial
        try:
            target = stiefel.moment_key_fn(args.monomial)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("one of --poly or --monomial is required")
    if n < 3:
        raise UsageError("n >= 3 required")
    with report.stage("mc_integrate"):
        mean, se = stiefel.mc_integrate(target, n, args.trials, args.seed, method=args.method)
    report.result = {"integrand": label, "n": n, "trials": args.trials, "estimate": mean, "stderr": se}
    report.verdicts["mc"] = "estimated"
    report.human = f"{mean:.10g} +- {se:.3g} (stderr, {args.trials} trials)"
    return EXIT_OK


def cmd_holder(args, report: RunReport) -> int:
    if args.n < 3:
        raise UsageError("n >= 3 required")
    if args.trials < 1:
        raise UsageError("trials >= 1 required")
    rng = np.random.default_rng(args.seed)
    bound = stiefel.HOLDER_BOUNDS[args.cls]
    with report.stage("holder"):
        B = rng.standard_normal((args.trials, args.n, args.n))
        if args.cls == "sym":
            B = B + np.swapaxes(B, 1, 2)
        elif args.cls == "skew":
            B = B - np.swapaxes(B, 1, 2)
        ratios = stiefel.holder_batch(B, args.cls)
    worst = float(ratios.max())
    witness = {"sym": stiefel.sym_witness_ratio, "skew": stiefel.skew_witness_ratio}.get(args.cls)
    ok = worst <= bound + 1e-9
    report.result = {"class": args.cls, "trials": args.trials, "max_ratio": worst, "bound": bound, "pass": ok,
                     "witness_ratio": witness(args.n) if witness else None}
    report.verdicts["holder"] = "pass" if ok else "violated"
    report.human = f"max ratio {worst:.4f} {'<=' if ok else '>'} bound {bound:.4f} ({args.cls}, n = {args.n})"
    return EXIT_OK if ok else EXIT_FAILED


def _verdict_json(v: certify.Verdict) -> dict:
    cert = v.certificate
    return {"status": v.status, "detail": v.detail,
            "certificate": cert.to_json() if hasattr(cert, "to_json") else None}


def cmd_nsatz3(args, report: RunReport) -> int:
    A = _load_map(args.map)
    if A.n != 3:
        raise UsageError("nsatz3 needs a map on 3x3 matrices")
    if args.nmax < 0:
        raise UsageError("--nmax must be >= 0")
    with report.stage("build_QA"):
        Q = build_QA(substitute_psi(map_to_biform(A)))
    code = EXIT_OK
    lines = []
    if args.check == "trace-det":
        with report.stage("trace_det"):
            res = nsatz3.check_trace_det(Q, args.nmax)
        report.result["trace_det"] = {k: _verdict_json(v) for k, v in res.items()}
        for k, v in res.items():
            report.verdicts[k] = v.status
            lines.append(f"{k}: {v.status}" + (f" ({v.detail})" if v.detail else ""))
        states = {v.status for v in res.values()}
        code = EXIT_FAILED if "falsified" in states else EXIT_INCONCLUSIVE if "inconclusive" in states else EXIT_OK
    elif args.check == "denom-power":
        with report.stage("denominator_power"):
            found = nsatz3.denominator_power_search(Q, args.nmax)
        if found is None:
            report.verdicts["denominator_power"] = "not_found"
            report.result["denominator_power"] = None
            lines.append(f"no N <= {args.nmax} with |x|^(2N) Q a matrix sum of squares")
            code = EXIT_INCONCLUSIVE
        else:
            N, cert = found
            report.verdicts["denominator_power"] = "certified"
            report.result["denominator_power"] = {"N": N, "certificate": cert.to_json()}
            lines.append(f"N = {N}: |x|^(2N) Q is a matrix sum of squares")
    else:
        if args.x0 is None:
            raise UsageError("--x0 is required for --check drift")
        x0 = _parse_vector(args.x0)
        if x0.shape != (3,):
            raise UsageError("--x0 needs three components")
        with report.stage("drift"):
            try:
                dd = nsatz3.construct_drift_C(A, x0)
            except ValueError as exc:
                report.verdicts["drift"] = "hypothesis_failed"
                report.result["drift"] = {"error": str(exc)}
                report.human = str(exc)
                return EXIT_FAILED
        report.verdicts["drift"] = dd.positivity_verdict
        report.result["drift"] = dd.to_json()
        lines.append("C = " + np.array2string(dd.C, precision=6))
        lines.append("residuals: " + ", ".join(f"{k} {v:.2e}" for k, v in dd.residuals.items()))
        lines.append(f"p_B sum of squares of bilinear forms: {dd.positivity_verdict}")
        code = EXIT_OK if dd.positivity_verdict == "sos" else EXIT_INCONCLUSIVE
    if args.unit_sphere_rep:
        with report.stage("unit_sphere_rep"):
            v = nsatz3.unit_sphere_representation(Q, args.deg_cap)
        report.verdicts["unit_sphere_rep"] = v.status
        report.result["unit_sphere_rep"] = _verdict_json(v)
        lines.append(f"unit sphere representation (deg cap {args.deg_cap}, experimental): {v.status}")
    report.human = "\n".join(lines)
    return code


# --- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crosspos", description="Cross-positive maps: generation and certificates.")
    parser.add_argument("--version", action="version", version=f"crosspos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--json", action="store_true", help="print the run report as JSON")
        p.add_argument("--out", help="write the run report to this file")

    p = sub.add_parser("gen", help="generate a proper cross-positive map")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds-file", help="orthogonal seed pairs {n, points: [{x, y}, ...]}")
    p.add_argument("--delta-min", type=float, default=1e-6)
    p.add_argument("--d-max", type=int, default=3)
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="certify or falsify (complete) cross-positivity")
    p.add_argument("input", help="biform or map JSON file")
    p.add_argument("--mode", choices=["all", "sos", "psatz", "falsify"], default="all")
    p.add_argument("--d-max", type=int, default=2)
    p.add_argument("--restarts", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("moments", help="exact Stiefel moment of a monomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--monomial", required=True, help='e.g. "z1^4", "z12*z13", "w12^2*w34^2"')
    common(p)
    p.set_defaults(func=cmd_moments, seed=None)

    p = sub.add_parser("mc", help="Monte Carlo integral over orthonormal pairs")
    p.add_argument("--n", type=int)
    p.add_argument("--poly", help="biform or map JSON file")
    p.add_argument("--monomial")
    p.add_argument("--trials", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["gaussian", "givens"], default="gaussian")
    common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("holder", help="reverse Hoelder ratios of random bilinear forms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="cls", choices=["sym", "skew", "general"], required=True)
    p.add_argument("--trials", type=int, default=10 ** 4)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_holder)

    p = sub.add_parser("nsatz3", help="certificates for maps on 3x3 matrices through Q_A")
    p.add_argument("--map", required=True)
    p.add_argument("--check", choices=["trace-det", "denom-power", "drift"], default="trace-det")
    p.add_argument("--x0", help='drift base point, e.g. "1,0,0"')
    p.add_argument("--nmax", type=int, default=nsatz3.N_MAX)
    p.add_argument("--unit-sphere-rep", action="store_true", help="also run the experimental sphere search")
    p.add_argument("--deg-cap", type=int, default=3)
    common(p)
    p.set_defaults(func=cmd_nsatz3, seed=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = {k: v for k, v in vars(args).items() if k not in ("func", "json", "out")}
    report = RunReport(args.command, config, getattr(args, "seed", None))
    try:
        code = args.func(args, report)
    except UsageError as exc:
        print(f"crosspos {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        report.files.append(args.out)
        with open(args.out, "w") as fh:
            fh.write(dumps(report.to_json(), indent=1) + "\n")
    if args.json:
        print(dumps(report.to_json()))
    else:
        print(report.human)
    return code


if __name__ == "__main__":
    sys.exit(main())
