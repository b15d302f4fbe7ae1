"""Command-line workbench: every experiment as a reproducible run with CSV/JSON output.

Output rows carry their inputs plus ``value``, ``tolerance`` and ``verdict``
(``pass``, ``fail`` or ``info``).  Exit codes: 0 success, 1 failed
verification, 2 bad arguments.  Errors go to stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata, resources

import numpy as np

from . import jets as J
from .closed_forms import (
    CylinderSolution,
    clifford_back_substitution,
    clifford_polynomial,
    constant_solution_gate,
    cylinder_harmonicity,
    cylinder_laplacian_power,
    cylinder_power_by_jets,
    cylinder_problem,
    el_zero_verdict,
    hypersphere_critical,
    isometric_roots,
)
from .condition_c import CutoffXi, es4_family_energy, infimum_gap_check, ingredient_bounds
from .conformal_metrics import beta_blowup_scan
from .equivariant import Profile, ReducedProblem, el_residual
from .errors import WorkbenchError
from .geometry import ModelManifold, WarpFunction
from .spectrum import CurveProblem, closed_form_block, closed_form_eigenvalues, index_nullity, printed_basis_scale

GRAMMAR_VERSION = "1"
SCHEMA_VERSION = "1"

_FUNCS = {
    "exp": J.exp,
    "log": J.log,
    "sqrt": J.sqrt,
    "sin": J.sin,
    "cos": J.cos,
    "tan": J.tan,
    "sinh": J.sinh,
    "cosh": J.cosh,
    "tanh": J.tanh,
    "atan": J.atan,
    "asin": J.asin,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


class UsageError(Exception):
    """Bad command-line input (exit 2)."""


# -- profile grammar ------------------------------------------------------


def _compile(node):
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        v = float(node.value)
        return lambda x: v
    if isinstance(node, ast.Name):
        if node.id == "rho":
            return lambda x: x
        if node.id in _CONSTS:
            v = _CONSTS[node.id]
            return lambda x: v
        raise UsageError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        f = _compile(node.operand)
        return (lambda x: -f(x)) if isinstance(node.op, ast.USub) else f
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        a, b, op = _compile(node.left), _compile(node.right), _BINOPS[type(node.op)]
        return lambda x: op(a(x), b(x))
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
        base = _compile(node.left)
        expo = node.right
        if isinstance(expo, ast.UnaryOp) and isinstance(expo.op, ast.USub):
            expo, sign = expo.operand, -1
        else:
            sign = 1
        if not (isinstance(expo, ast.Constant) and isinstance(expo.value, (int, float))):
            raise UsageError("exponents must be numeric literals")
        p = sign * expo.value
        if float(p).is_integer():
            k = int(p)
            return (lambda x: base(x) ** k) if k >= 0 else (lambda x: 1.0 / base(x) ** (-k))
        return lambda x: J.power(base(x), float(p))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        if node.func.id not in _FUNCS or len(node.args) != 1:
            raise UsageError(f"unknown function {node.func.id!r}")
        fn, arg = _FUNCS[node.func.id], _compile(node.args[0])
        return lambda x: fn(arg(x))
    raise UsageError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_profile(expr: str) -> Profile:
    """Arithmetic over ``rho`` with + - * / **, numbers, pi, e and the jet elementary functions."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse profile {expr!r}: {exc.msg}") from None
    return Profile(_compile(tree), expr)


# -- plumbing -------------------------------------------------------------


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _threads() -> int:
    raw = os.environ.get("WORKBENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"WORKBENCH_THREADS must be an integer, got {raw!r}") from None


def pmap(fn, items) -> list:
    """Ordered map, parallel up to WORKBENCH_THREADS."""
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _row(verdict: str, value, tolerance=None, **inputs) -> dict:
    return {**inputs, "value": value, "tolerance": tolerance, "verdict": verdict}


def _pf(ok: bool) -> str:
    return "pass" if ok else "fail"


def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def schema() -> dict:
    return json.loads(resources.files("rharmonic").joinpath("schema.json").read_text(encoding="utf-8"))


def _manifest(args, command: str) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "out", "format", "handler")}
    return {
        "command": command,
        "parameters": params,
        "artifact_version": _version(),
        "grammar_version": GRAMMAR_VERSION,
        "schema_version": SCHEMA_VERSION,
    }


def render(manifest: dict, rows: list, fmt: str) -> str:
    rows = [_clean(r) for r in rows]
    manifest = _clean(manifest)
    if fmt == "json":
        return json.dumps({"manifest": manifest, "rows": rows}, sort_keys=True, indent=2) + "\n"
    cols = schema()["commands"][manifest["command"]]["columns"]
    buf = io.StringIO()
    buf.write("# manifest " + json.dumps(manifest, sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="raise")
    w.writeheader()
    for r in rows:
        w.writerow({c: (json.dumps(r.get(c), sort_keys=True) if isinstance(r.get(c), (list, dict)) else r.get(c, "")) for c in cols})
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma separated numbers, got {text!r}") from None


def _range(text: str) -> list[int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise UsageError(f"expected A..B, got {text!r}") from None
    if lo > hi:
        raise UsageError("empty range")
    return list(range(lo, hi + 1))


# -- commands -------------------------------------------------------------


def cmd_verify_hypersphere(args) -> list:
    flavor = "es4_energy" if args.flavor == "es4" else "r_energy"
    P = ReducedProblem(ModelManifold(args.m, WarpFunction.constant(1.0)), WarpFunction.sin(), args.r, flavor)
    a_star = hypersphere_critical(args.r)
    rho = np.linspace(0.5, 2.0, args.points)
    tol = args.tol if args.tol is not None else 1e-8

    def worst(alpha):
        return float(np.max(np.abs(el_residual(P, Profile.constant(alpha), rho).residual)))

    rows = [_row(_pf(worst(a_star) < tol), worst(a_star), tol, kind="critical", alpha=a_star)]
    for d in (-0.1, 0.1):
        v = worst(a_star + d)
        rows.append(_row(_pf(v > 1e-4), v, 1e-4, kind="offset", alpha=a_star + d))
    grid = np.linspace(0.0, 0.5 * math.pi, args.grid + 2)[1:-1]
    rows += [_row("info", v, None, kind="grid", alpha=float(a)) for a, v in zip(grid, pmap(worst, grid))]
    return rows


def cmd_clifford(args) -> list:
    P = clifford_polynomial(args.p, args.q, args.r)
    tol = args.tol if args.tol is not None else 1e-10
    rows = [_row("info", float(c), None, kind="coefficient", power=i) for i, c in enumerate(P.coeffs)]
    if args.isometric:
        for t in isometric_roots(args.p, args.q, args.r):
            res = clifford_back_substitution(args.p, args.q, args.r, t)
            rows.append(_row(_pf(abs(res) < tol), t, tol, kind="root", residual=res))
    return rows


def cmd_constant_solutions(args) -> list:
    tol = args.tol if args.tol is not None else 1e-8
    rho = np.linspace(0.5, 2.0, 10)

    def one(m):
        g = constant_solution_gate(m)
        out = [_row(_pf(g.admissible == (m in (8, 9))), g.roots_x, None, kind="gate", m=m, alpha_star=g.alpha_star)]
        for a in g.alpha_star:
            for flavor in ("r_energy", "es4_energy"):
                P = ReducedProblem(ModelManifold(m, WarpFunction.identity()), WarpFunction.sin(), 4, flavor)
                v = float(np.max(np.abs(el_residual(P, Profile.constant(a), rho).residual)))
                out.append(_row(_pf(v < tol), v, tol, kind="el_residual", m=m, alpha_star=a, flavor=flavor))
        return out

    return [r for rows in pmap(one, _range(args.m_range)) for r in rows]


_CYL = {"log": ("log_rho", None), "sq": ("rho_sq", None), "sqlog": ("rho_sq_log_rho", None)}


def _cylinder_solution(text: str) -> CylinderSolution:
    if text in _CYL:
        return CylinderSolution(*_CYL[text])
    if text.startswith("pow:"):
        try:
            return CylinderSolution("rho_pow", int(text[4:]))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"profile must be log, sq, sqlog or pow:K, got {text!r}")


def cmd_cylinder(args) -> list:
    sol = _cylinder_solution(args.profile)
    tol = args.tol if args.tol is not None else 1e-9
    exact = cylinder_harmonicity(sol, args.m, args.r)
    rho = np.linspace(1.0, 2.0, 20)
    zero, v, prec = el_zero_verdict(cylinder_problem(args.m, args.r), sol.profile(args.m), rho, tol)
    rows = [
        _row("info", exact, None, kind="exact_harmonic", m=args.m, r=args.r),
        _row("info", sol.validity(args.m, args.r), None, kind="catalog", m=args.m, r=args.r),
        _row(_pf(zero == exact), v, tol, kind="numeric_residual", m=args.m, r=args.r, precision=prec),
    ]
    if sol.form == "log_rho":
        c = cylinder_laplacian_power(args.m, args.r)
        got = float(cylinder_power_by_jets(args.m, args.r, np.longdouble("1.7")))
        err = abs(got - c) / max(1.0, abs(c))
        rows.append(_row(_pf(err < tol), got, tol, kind="coefficient", m=args.m, r=args.r, expected=c))
    return rows


_DOMAINS = {"ball": WarpFunction.identity, "sphere": WarpFunction.sin, "hyperbolic": WarpFunction.sinh}
_TARGETS = {"sphere": WarpFunction.sin, "hyperbolic": WarpFunction.sinh, "cylinder": lambda: WarpFunction.constant(1.0)}


def cmd_el_residual(args) -> list:
    try:
        kind, m = args.domain.split(":")
        dom = ModelManifold(int(m), _DOMAINS[kind]())
    except (ValueError, KeyError):
        raise UsageError(f"domain must be ball:M, sphere:M or hyperbolic:M, got {args.domain!r}") from None
    if args.target not in _TARGETS:
        raise UsageError(f"target must be one of {sorted(_TARGETS)}")
    flavor = "es4_energy" if args.flavor == "es4" else "r_energy"
    P = ReducedProblem(dom, _TARGETS[args.target](), args.r, flavor)
    prof = parse_profile(args.profile)
    tol = args.tol if args.tol is not None else 1e-8
    rows = []
    for rho in _floats(args.rho):
        rep = el_residual(P, prof, rho)
        res = float(rep.residual)
        parts = {k: float(v) for k, v in rep.residual_parts.items()}
        rows.append(_row(_pf(abs(res) < tol), res, tol, rho=rho, parts=parts, input_jet_order=rep.input_jet_order))
    return rows


def cmd_conformal_beta(args) -> list:
    scan = beta_blowup_scan(args.m, args.beta0, args.dbeta0, rel_tol=args.rel_tol)
    rows = []
    for name, out in (("forward", scan.forward), ("backward", scan.backward)):
        rows.append(_row("info", out.t_escape, None, direction=name, status=out.status, t_final=float(out.t_final), steps=out.steps))
    return rows


def cmd_spectrum(args) -> list:
    prob = CurveProblem(args.case, args.r, args.k)
    rep = index_nullity(prob, args.mmax, null_tol=args.null_tol, require_certificate=False)
    tol = args.tol if args.tol is not None else 1e-7
    D = np.diag([1.0, 1.0, printed_basis_scale(prob), printed_basis_scale(prob)])
    rows = []
    for b in rep.blocks:
        ev = sorted(float(x) for x in b.eigenvalues)
        printed = closed_form_block(prob, b.mode)
        if printed is None:
            rows.append(_row("info", ev, None, kind="block", mode=b.mode))
            continue
        err = float(np.max(np.abs(D @ b.matrix @ D - printed)) / max(1.0, np.max(np.abs(printed))))
        rows.append(_row(_pf(err < tol), ev, tol, kind="block", mode=b.mode, closed_form=closed_form_eigenvalues(prob, b.mode), block_error=err))
    expected_index = 1 + 2 * (args.k - 1) if args.case == "circle" else 1
    expected_null = 3 if args.case == "circle" else 1
    asserted = args.r <= 4
    rows.append(_row(_pf(rep.index == expected_index) if asserted else "info", rep.index, None, kind="index", expected=expected_index))
    rows.append(_row(_pf(rep.nullity == expected_null) if asserted else "info", rep.nullity, None, kind="nullity", expected=expected_null))
    rows.append(_row(_pf(rep.certificate["certified"]), rep.certificate["tail_min_eigenvalues"], None, kind="certificate"))
    rows.append(_row("info", rep.first_variation_max, None, kind="first_variation_max"))
    return rows


def cmd_condition_c(args) -> list:
    a_list = _floats(args.a)
    if not a_list:
        raise UsageError("--a needs at least one value")
    xi = CutoffXi.standard() if args.cutoff == "standard" else CutoffXi.variant()
    energies = pmap(lambda a: es4_family_energy(a, xi=xi), a_list)
    rows = [_row("info", e, None, kind="energy", a=a) for a, e in zip(a_list, energies)]
    for a in a_list:
        b = ingredient_bounds(a, xi)
        rows.append(_row(_pf(b["sup_sin"] <= b["sin_bound"] + 1e-12), b["sup_sin"], b["sin_bound"] + 1e-12, kind="sin_bound", a=a))
    rep = infimum_gap_check(a_list, xi, energies=energies)
    rows.append(_row(_pf(rep["monotone_decreasing"]), rep["monotone_decreasing"], 0.01, kind="monotone_decreasing"))
    if rep["decay_exponent"] is not None:
        rows.append(_row("info", rep["decay_exponent"], None, kind="decay_exponent"))
    rows.append(_row("info", rep["inf_estimate"], None, kind="inf_estimate", infimum_attained=rep["infimum_attained"]))
    return rows


def cmd_self_test(args) -> list:
    from .selftest import run_checks

    return [_row(_pf(ok), value, tol, check=name) for name, ok, value, tol in pmap(lambda c: c(), run_checks())]


# -- parser ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rharmonic", description="Equivariant r-harmonic map workbench.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--out", help="output file (default stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="json")
        s.add_argument("--tol", type=float, default=None, help="verification tolerance")
        s.add_argument("--quad-n", type=int, default=None, help="quadrature nodes (recorded in the manifest)")
        s.set_defaults(handler=handler)
        return s

    s = add("verify-hypersphere", cmd_verify_hypersphere, "residuals of constant profiles into the sphere")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--flavor", choices=("r", "es4"), default="r")
    s.add_argument("--points", type=int, default=10)
    s.add_argument("--grid", type=int, default=16)

    s = add("clifford", cmd_clifford, "Clifford cubic, roots and back-substitution")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--isometric", action="store_true")

    s = add("constant-solutions", cmd_constant_solutions, "constant-solution gate over a range of m")
    s.add_argument("--m-range", required=True, help="A..B")

    s = add("cylinder", cmd_cylinder, "cylinder catalog harmonicity")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--profile", required=True, help="log, sq, sqlog or pow:K")

    s = add("el-residual", cmd_el_residual, "Euler-Lagrange residual of a profile expression")
    s.add_argument("--domain", required=True, help="ball:M, sphere:M or hyperbolic:M")
    s.add_argument("--target", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--flavor", choices=("r", "es4"), default="r")
    s.add_argument("--profile", required=True, help="expression in rho")
    s.add_argument("--rho", required=True, help="comma separated radii")

    s = add("conformal-beta", cmd_conformal_beta, "blow-up scan of the beta equation")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--beta0", type=float, required=True)
    s.add_argument("--dbeta0", type=float, required=True)
    s.add_argument("--rel-tol", type=float, default=1e-10)

    s = add("spectrum", cmd_spectrum, "index and nullity of critical curves")
    s.add_argument("--case", choices=("circle", "paraboloid"), required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--mmax", type=int, required=True)
    s.add_argument("--null-tol", type=float, default=1e-6)

    s = add("condition-c", cmd_condition_c, "energy decay of the degree-one family")
    s.add_argument("--a", required=True, help="comma separated a > 1")
    s.add_argument("--cutoff", choices=("standard", "variant"), default="standard")

    add("self-test", cmd_self_test, "full invariant suite")
    return p


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        rows = args.handler(args)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except (ValueError, WorkbenchError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)
    text = render(_manifest(args, args.command), rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if r["verdict"] == "fail"]
    if failed:
        return _fail("verification", f"{len(failed)} row(s) failed", 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
