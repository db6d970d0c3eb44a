"""Command-line front end.

Problem files are JSON, in one of two forms::

    {"form": "general", "A": [[...]], "B": [[...]], "c": [...], "d": 1.0, "f": [...]}
    {"form": "reduced", "alpha": [...], "psi": [...], "nu": 1.0}

Exit codes: 0 success, 1 input error, 2 a cross-check failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from typing import Optional, Union

import numpy as np

from . import oracle, secular
from .errors import DoubleWellError, NotPositiveDefinite
from .model import GeneralDwp, ReducedDwp, eval_g
from .reduction import BackMap, reduce
from .solvers import Check, Portrait, solve_portrait

log = logging.getLogger("doublewell")

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2

Problem = Union[GeneralDwp, ReducedDwp]


class ProblemFileError(DoubleWellError):
    pass


_NONFINITE = re.compile(r"-?\b(?:NaN|Infinity)\b")


def _position(text: str, index: int) -> tuple[int, int]:
    line = text.count("\n", 0, index) + 1
    col = index - (text.rfind("\n", 0, index) + 1) + 1
    return line, col


def _reject_constant(token):
    raise ValueError(token)


def _number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProblemFileError(f"{name}: expected a number, got {v!r}")
    return float(v)


def _vector(v, name):
    if not isinstance(v, list) or not v:
        raise ProblemFileError(f"{name}: expected a nonempty array of numbers")
    return [_number(x, f"{name}[{i}]") for i, x in enumerate(v)]


def _matrix(v, name):
    if not isinstance(v, list) or not v:
        raise ProblemFileError(f"{name}: expected a nonempty array of rows")
    rows = [_vector(r, f"{name}[{i}]") for i, r in enumerate(v)]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemFileError(f"{name}: rows have different lengths {sorted(widths)}")
    return rows


_GENERAL_KEYS = {"A", "B", "c", "d", "f"}
_REDUCED_KEYS = {"alpha", "psi", "nu"}


def parse_problem(text: str) -> Problem:
    """Parse a problem file.

    Raises:
        ProblemFileError: with a line/column diagnostic for malformed JSON.
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    except ValueError as e:
        m = _NONFINITE.search(text)
        line, col = _position(text, m.start()) if m else (0, 0)
        raise ProblemFileError(f"line {line}, column {col}: non-finite number {e} not allowed") from None
    if not isinstance(data, dict):
        raise ProblemFileError("top level must be a JSON object")
    form = data.get("form")
    keys = set(data) - {"form", "name", "comment"}
    if form == "general":
        expected, other = _GENERAL_KEYS, _REDUCED_KEYS
    elif form == "reduced":
        expected, other = _REDUCED_KEYS, _GENERAL_KEYS
    else:
        raise ProblemFileError(f'"form" must be "general" or "reduced", got {form!r}')
    if keys & other:
        raise ProblemFileError(f"{form} problem contains keys of the other form: {sorted(keys & other)}")
    missing = expected - keys
    if missing:
        raise ProblemFileError(f"{form} problem is missing keys {sorted(missing)}")
    unknown = keys - expected
    if unknown:
        raise ProblemFileError(f"unknown keys {sorted(unknown)}")
    try:
        if form == "general":
            return GeneralDwp(
                A=_matrix(data["A"], "A"),
                B=_matrix(data["B"], "B"),
                c=_vector(data["c"], "c"),
                d=_number(data["d"], "d"),
                f=_vector(data["f"], "f"),
            )
        return ReducedDwp(
            alpha=_vector(data["alpha"], "alpha"),
            psi=_vector(data["psi"], "psi"),
            nu=_number(data["nu"], "nu"),
        )
    except ValueError as e:
        raise ProblemFileError(str(e)) from None


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ProblemFileError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse_problem(text)
    except ProblemFileError as e:
        raise ProblemFileError(f"{path}: {e}") from None


def dump_problem(problem: Problem) -> str:
    if isinstance(problem, GeneralDwp):
        data = {
            "form": "general",
            "A": problem.A.tolist(),
            "B": problem.B.tolist(),
            "c": problem.c.tolist(),
            "d": problem.d,
            "f": problem.f.tolist(),
        }
    else:
        data = {"form": "reduced", "alpha": problem.alpha.tolist(), "psi": problem.psi.tolist(), "nu": problem.nu}
    return json.dumps(data, indent=2)


def to_reduced(problem: Problem) -> tuple[ReducedDwp, Optional[BackMap]]:
    if isinstance(problem, GeneralDwp):
        return reduce(problem)
    return problem, None


# ---------------------------------------------------------------- reports


def _f(x) -> str:
    return f"{float(x):.6g}"


def _vec(v) -> str:
    return "[" + ", ".join(_f(x) for x in v) + "]"


def _point_dict(pt, gp: Optional[GeneralDwp], bm: Optional[BackMap]) -> dict:
    out = {
        "kind": pt.kind.value,
        "w": pt.w.tolist(),
        "norm_sq": pt.t,
        "g": pt.value,
        "grad_norm": pt.grad_norm,
        "hessian_signature": list(pt.hessian_signature),
    }
    if pt.certificate is not None:
        c = pt.certificate
        out["certificate"] = {"t_star": c.t_star, "h": c.h_value, "h_prime": c.h_prime, "bracket": list(c.bracket)}
    if bm is not None:
        x = bm.lift(pt.w)
        out["x"] = x.tolist()
        out["Pi"] = gp.value(x)
    return out


def portrait_dict(portrait: Portrait, p: ReducedDwp, gp=None, bm=None) -> dict:
    gs = portrait.global_set
    glob = {"variant": gs.variant, "value": gs.value, "points": [_point_dict(q, gp, bm) for q in gs.points]}
    if gs.variant in ("pair", "sphere"):
        glob.update(center=gs.center.tolist(), radius=gs.radius, free_indices=list(gs.free_indices))
    return {
        "reduced": {"alpha": p.alpha.tolist(), "psi": p.psi.tolist(), "nu": p.nu, "order": p.order.tolist()},
        "global": glob,
        "local_nonglobal": None if portrait.local_nonglobal is None else _point_dict(portrait.local_nonglobal, gp, bm),
        "local_max": None if portrait.local_max is None else _point_dict(portrait.local_max, gp, bm),
        "checks": [_check_dict(c) for c in portrait.checks],
        "ok": portrait.ok,
    }


def _check_dict(c: Check) -> dict:
    return {"name": c.name, "passed": c.passed, "vacuous": c.vacuous, "detail": c.detail}


def _point_lines(pt, gp, bm, indent="  ") -> list[str]:
    lines = [
        f"{indent}w = {_vec(pt.w)}   |w|^2 = {_f(pt.t)}   g = {_f(pt.value)}",
        f"{indent}hessian (neg, zero, pos) = {pt.hessian_signature}   |grad| = {pt.grad_norm:.2e}",
    ]
    if pt.certificate is not None:
        c = pt.certificate
        lines.append(f"{indent}certificate: t* = {_f(c.t_star)}   h(t*) = {c.h_value:.2e}   h'(t*) = {_f(c.h_prime)}")
    if bm is not None:
        x = bm.lift(pt.w)
        lines.append(f"{indent}x = {_vec(x)}   Pi(x) = {_f(gp.value(x))}")
    return lines


def _check_lines(checks) -> list[str]:
    out = []
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        extra = "" if not c.detail else f": {c.detail}"
        out.append(f"  [{tag}] {c.name}{extra}")
    return out


def portrait_text(portrait: Portrait, p: ReducedDwp, gp=None, bm=None) -> str:
    lines = [f"reduced problem: n = {p.n}   nu = {_f(p.nu)}   alpha = {_vec(p.alpha)}   psi = {_vec(p.psi)}"]
    if not np.array_equal(p.order, np.arange(p.n)):
        lines.append(f"  (coordinates sorted by alpha; input order {p.order.tolist()})")
    gs = portrait.global_set
    lines.append(f"global minimizer set: {gs.variant}   value = {_f(gs.value)}")
    if gs.variant == "sphere":
        lines.append(
            f"  sphere center = {_vec(gs.center)}   radius = {_f(gs.radius)} (radius^2 = {_f(gs.radius**2)})"
            f"   free coordinates = {list(gs.free_indices)}"
        )
        lines.append(f"  {len(gs.points)} sampled points certified; first:")
        lines += _point_lines(gs.points[0], gp, bm, "    ")
    else:
        for q in gs.points:
            lines += _point_lines(q, gp, bm)
    for title, pt in (("local non-global minimizer", portrait.local_nonglobal), ("local maximizer", portrait.local_max)):
        if pt is None:
            lines.append(f"{title}: none")
        else:
            lines.append(f"{title}:")
            lines += _point_lines(pt, gp, bm)
    lines.append("checks:")
    lines += _check_lines(portrait.checks)
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    p, bm = to_reduced(problem)
    gp = problem if bm is not None else None
    portrait = solve_portrait(p, tol=args.tol)
    if args.format == "json":
        print(json.dumps(portrait_dict(portrait, p, gp, bm), indent=2))
    else:
        print(portrait_text(portrait, p, gp, bm))
    return EXIT_OK if portrait.ok else EXIT_CHECK


def cmd_reduce(args) -> int:
    problem = load_problem(args.problem)
    p, bm = to_reduced(problem)
    data = {"form": "reduced", "alpha": p.alpha.tolist(), "psi": p.psi.tolist(), "nu": p.nu}
    if bm is not None:
        data["backmap"] = {"P": bm.P.tolist(), "shift": bm.shift.tolist(), "offset": bm.offset}
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        print(f"nu = {_f(p.nu)}\nalpha = {_vec(p.alpha)}\npsi = {_vec(p.psi)}")
        if bm is not None:
            print("P =")
            for row in bm.P:
                print("  " + _vec(row))
            print(f"shift = {_vec(bm.shift)}\noffset = {_f(bm.offset)}")
    return EXIT_OK


def _region(p: ReducedDwp, t: float, slope: float) -> str:
    left = 2.0 * p.nu - 2.0 * p.alpha[0]
    lo2 = max(2.0 * p.nu - 2.0 * p.alpha[1], 0.0) if p.n >= 2 else 0.0
    hi3 = 2.0 * p.nu - 2.0 * p.alpha[-1]
    if t > left:
        return "alg1"
    in2 = lo2 < t < left
    in3 = p.nu - p.alpha[-1] > 0 and 0.0 <= t < hi3
    if in2 and in3:
        # only for n = 1; the slope sign tells which search a root would belong to
        return "alg3" if slope < 0 else "alg2"
    if in2:
        return "alg2"
    if in3:
        return "alg3"
    return "outside"


def _writer(path):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def _num(x: float) -> str:
    return repr(float(x))


def cmd_sample_secular(args) -> int:
    if args.count < 2 or not args.t_lo < args.t_hi:
        raise ProblemFileError("need --count >= 2 and --t-lo < --t-hi")
    problem = load_problem(args.problem)
    p, _ = to_reduced(problem)
    s = secular.build(p)
    inside = [q for q in s.poles if args.t_lo <= q <= args.t_hi]
    for q in sorted(set(inside)):
        print(f"pole at t = {q:.6g} inside sampled range", file=sys.stderr)
    fh, w = _writer(args.output)
    try:
        w.writerow(["t", "h", "h_prime", "region"])
        for t in np.linspace(args.t_lo, args.t_hi, args.count):
            try:
                hv, hp = secular.h_eval(s, t), secular.h_prime(s, t)
            except DoubleWellError:
                print(f"gap: row at t = {t:.17g} omitted (pole)", file=sys.stderr)
                continue
            w.writerow([_num(t), _num(hv), _num(hp), _region(p, t, hp)])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_sample_surface(args) -> int:
    problem = load_problem(args.problem)
    p, _ = to_reduced(problem)
    if p.n > 2:
        raise ProblemFileError(f"sample-surface supports n <= 2, got n = {p.n}")
    if args.resolution < 2:
        raise ProblemFileError("--resolution must be at least 2")
    box = oracle.default_box(p) if args.box is None else tuple((args.box[0], args.box[1]) for _ in range(p.n))
    axes = [np.linspace(lo, hi, args.resolution) for lo, hi in box]
    fh, w = _writer(args.output)
    try:
        if p.n == 1:
            w.writerow(["w1", "g"])
            for a in axes[0]:
                w.writerow([_num(a), _num(eval_g([a], p))])
        else:
            w.writerow(["w1", "w2", "g"])
            for a in axes[0]:
                for b in axes[1]:
                    w.writerow([_num(a), _num(b), _num(eval_g([a, b], p))])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    jobs = []
    if args.problem is not None:
        problem = load_problem(args.problem)
        jobs.append((args.problem, to_reduced(problem)[0]))
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        for k in range(args.instances):
            n = int(rng.integers(1, 3))
            jobs.append((f"seed {args.seed} #{k}", oracle.random_reduced(rng, n)))
    if not jobs:
        raise ProblemFileError("verify needs a problem file, --seed, or both")
    results = []
    for label, p in jobs:
        portrait = solve_portrait(p, tol=args.tol)
        checks = oracle.oracle_suite(p, portrait, resolution=args.resolution)
        results.append((label, p, checks))
    all_ok = all(c.passed for _, _, cs in results for c in cs)
    if args.format == "json":
        payload = [
            {"problem": label, "alpha": p.alpha.tolist(), "psi": p.psi.tolist(), "nu": p.nu,
             "checks": [_check_dict(c) for c in cs], "ok": all(c.passed for c in cs)}
            for label, p, cs in results
        ]
        print(json.dumps({"instances": payload, "ok": all_ok}, indent=2))
    else:
        for label, p, cs in results:
            print(f"{label}: n = {p.n}   nu = {_f(p.nu)}   alpha = {_vec(p.alpha)}   psi = {_vec(p.psi)}")
            print("\n".join(_check_lines(cs)))
        print("ALL PASS" if all_ok else "FAILURES PRESENT")
    return EXIT_OK if all_ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doublewell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, problem_optional=False):
        if problem_optional:
            sp.add_argument("problem", nargs="?", help="JSON problem file")
        else:
            sp.add_argument("problem", help="JSON problem file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--tol", type=float, default=None, help="stationarity tolerance override")

    sp = sub.add_parser("solve", help="global minimizers, local non-global minimizer, local maximizer")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reduce", help="print the reduced problem and back map")
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("sample-secular", help="CSV samples of h(t) and h'(t)")
    sp.add_argument("problem")
    sp.add_argument("--t-lo", type=float, required=True)
    sp.add_argument("--t-hi", type=float, required=True)
    sp.add_argument("--count", type=int, default=400)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_sample_secular)

    sp = sub.add_parser("sample-surface", help="CSV samples of g(w) for n <= 2")
    sp.add_argument("problem")
    sp.add_argument("--box", type=float, nargs=2, metavar=("LO", "HI"), default=None)
    sp.add_argument("--resolution", type=int, default=200)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=cmd_sample_surface)

    sp = sub.add_parser("verify", help="check solver output against brute-force oracles")
    common(sp, problem_optional=True)
    sp.add_argument("--seed", type=int, default=None, help="also verify random instances from this seed")
    sp.add_argument("--instances", type=int, default=1)
    sp.add_argument("--resolution", type=int, default=None, help="grid points per axis for the scan")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ProblemFileError, NotPositiveDefinite) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DoubleWellError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
