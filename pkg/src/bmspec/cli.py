"""Command-line front end.

Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage or
input error, 3 numeric degeneracy.
"""

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import io as bio
from .errors import (
    BMError,
    DegenerateInstanceError,
    DimensionError,
    DocumentError,
    IncompleteBasisError,
    NegativeSquareError,
    PreconditionError,
    SingularSystemError,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


def default_seed():
    raw = os.environ.get("BMSPEC_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DocumentError(f"BMSPEC_SEED must be an integer, got {raw!r}")


# ------------------------------------------------------------------ rendering helpers

def _emit(report, as_json, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report, sort_keys=True, default=_jsonable) + "\n")
        return
    for key, val in report.items():
        out.write(f"{key}: {_text(val)}\n")


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _text(v):
    if isinstance(v, (np.ndarray, list, tuple, dict)):
        return json.dumps(v, default=_jsonable)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_gen_orth(n, seed, params):
    from .orthogonal import OrthParams, orth_direct_sum

    if params:
        p = OrthParams.from_flat(params, singleton=bool(n % 2))
        if p.n != n:
            raise DocumentError(f"--params gives {p.n} rows, --n is {n}")
        meta = {"params": [list(b) for b in p.blocks], "singleton": p.singleton}
    else:
        rng = np.random.default_rng(seed)
        p = OrthParams.for_size(n, rng)
        meta = {"seed": seed, "params": [list(b) for b in p.blocks], "singleton": p.singleton}
    return bio.dumps(orth_direct_sum(p), meta)


def render_gen_planted(n, seed, kind="hyper"):
    """Planted instance document and its ground-truth sidecar, both as JSON text."""
    rng = np.random.default_rng(seed)
    if kind == "matrix":
        from .instances import planted_matrix

        A, Q, lam = planted_matrix(n, rng)
        truth = {"kind": "matrix", "seed": seed, "Q": Q.tolist(), "lambda": lam.tolist()}
    else:
        from .search import planted_instance

        A, params, W = planted_instance(n, rng)
        truth = {"kind": "hyper", "seed": seed, "params": [list(b) for b in params.blocks],
                 "singleton": params.singleton, "W": W.tolist()}
    return bio.dumps(A, {"seed": seed, "kind": kind}), json.dumps(truth, sort_keys=True)


def _load_truth_hyper(path):
    from .orthogonal import OrthParams, orth_direct_sum

    t = bio.read_json(path)
    try:
        params = OrthParams(tuple(tuple(b) for b in t["params"]), bool(t.get("singleton", False)))
        W = np.asarray(t["W"], dtype=float) if "W" in t else None
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"{path}: malformed truth sidecar ({exc})") from exc
    return orth_direct_sum(params), W


# ------------------------------------------------------------------ commands

def cmd_gen(args):
    if args.what == "orth":
        text = render_gen_orth(args.n, args.seed, args.params)
        _write_text(args.output, text)
        return EXIT_OK
    doc, truth = render_gen_planted(args.n, args.seed, args.kind)
    _write_text(args.output, doc)
    if args.truth:
        _write_text(args.truth, truth)
    return EXIT_OK


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_check(args):
    from .orthogonal import orthogonality_residual

    Q, _ = bio.read(args.file)
    tol = args.tol if args.tol is not None else 1e-9
    r = orthogonality_residual(Q)
    _emit({"orthogonality_residual": r, "tol": tol, "orthogonal": r < tol}, args.json)
    return EXIT_OK if r < tol else EXIT_FAIL


def _generic_eigenbasis(A):
    """Eigenvectors of symmetric A with any repeated eigenspace rotated to a generic basis."""
    from .instances import random_rotation

    w, Q = np.linalg.eigh(A)
    scale = max(1.0, float(np.max(np.abs(w))))
    i = 0
    n = len(w)
    while i < n:
        j = i + 1
        while j < n and abs(w[j] - w[i]) <= 1e-9 * scale:
            j += 1
        if j - i > 1:
            Q[:, i:j] = Q[:, i:j] @ random_rotation(j - i, np.random.default_rng(0))
        i = j
    return w, Q


def cmd_elim(args):
    A, meta = bio.read(args.file)
    if args.what == "matrix":
        return _elim_matrix(A, args)
    return _elim_hyper(A, args)


def _elim_matrix(A, args):
    from .elim_matrix import default_tol, id_residual, iq_consistency, iq_solve, offdiag_residual

    if A.ndim != 2:
        raise DimensionError("elim matrix expects an order-2 document")
    if float(np.max(np.abs(A - A.T))) > 1e-12 * max(1.0, float(np.max(np.abs(A)))):
        raise PreconditionError("elim matrix expects a symmetric matrix")
    tol = args.tol if args.tol is not None else default_tol(A)
    w, Q = _generic_eigenbasis(A)
    report = {"eigenvalues": w}
    try:
        report["id_residual"] = id_residual(A, w, squared=True)
    except SingularSystemError:
        report["id_residual"] = None
        report["id_note"] = "repeated eigenvalues: Vandermonde route skipped"
    table = iq_solve(A, Q)
    report["mu"] = {f"{s},{t}": v for (s, t), v in sorted(table.mu.items())}
    report["iq_equation_residual"] = table.equation_residual
    try:
        resid, lam = iq_consistency(table, tol)
    except NegativeSquareError as exc:
        report["consistency_residual"] = None
        report["verdict"] = f"no real scaling: {exc}"
        _emit(report, args.json)
        return EXIT_FAIL
    report["consistency_residual"] = resid
    report["lambda"] = lam
    report["offdiag_residual"] = offdiag_residual(A, Q)
    ok = lam is not None and (report["id_residual"] is None or report["id_residual"] <= tol)
    report["verdict"] = "consistent" if ok else "inconsistent"
    _emit(report, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def _elim_hyper(A, args):
    from .elim_hyper import monomial_consistency_residual, spectral_system, w_values
    from .orthogonal import OrthParams, orth_direct_sum

    if A.ndim != 3:
        raise DimensionError("elim hyper expects an order-3 document")
    n = A.shape[0]
    tol = args.tol if args.tol is not None else 1e-8
    if args.truth:
        Q, W = _load_truth_hyper(args.truth)
    elif args.params:
        Q, W = orth_direct_sum(OrthParams.from_flat(args.params, singleton=bool(n % 2))), None
    else:
        raise DocumentError("elim hyper needs --truth or --params to fix the orthogonal factor")
    K = args.K or n
    with warnings.catch_warnings():
        # count mismatches are carried in the report instead
        warnings.simplefilter("ignore", RuntimeWarning)
        system = spectral_system(A, Q, K)
    report = {"n": n, "levels": K, "rows": system.shape[0], "basis_size": len(system.basis),
              "expected_count": system.expected_count, "warnings": system.warnings}
    if W is not None:
        x = system.evaluate_basis(w_values(W))
        source = "truth"
    else:
        x = system.solve()
        source = "least squares"
    report["solution_source"] = source
    report["equation_residual"] = system.residual(x)
    try:
        report["consistency_residual"] = monomial_consistency_residual(system, x)
    except IncompleteBasisError as exc:
        report["consistency_residual"] = None
        report["verdict"] = f"incomplete basis: {exc}"
        _emit(report, args.json)
        return EXIT_FAIL
    ok = report["equation_residual"] < tol and report["consistency_residual"] < tol
    report["verdict"] = "non-trivial" if ok else "inconsistent"
    _emit(report, args.json)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_charpoly(args):
    from .elim_hyper import charpoly222

    if args.file:
        A, _ = bio.read(args.file)
        if A.shape != (2, 2, 2):
            raise DimensionError("charpoly expects a 2x2x2 document")
        a000, a111 = float(A[0, 0, 0]), float(A[1, 1, 1])
    elif args.a000 is not None and args.a111 is not None:
        a000, a111 = args.a000, args.a111
    else:
        raise DocumentError("charpoly needs a file or both --a000 and --a111")
    p, ev = charpoly222(a000, a111)
    report = {"p(u,v,t)": str(p), "coefficients": {"".join(map(str, e)): c for e, c in p.sorted_terms()}}
    if args.w is not None:
        report["value"] = ev(*args.w)
    if args.json:
        _emit(report, True)
    else:
        sys.stdout.write(f"p(u,v,t) = {p}\n")
        if args.w is not None:
            sys.stdout.write(f"value: {report['value']!r}\n")
    return EXIT_OK


def cmd_decompose(args):
    from .search import SearchConfig, decomposability_search

    A, _ = bio.read(args.file)
    if A.ndim != 3:
        raise DimensionError("decompose expects an order-3 document")
    config = SearchConfig(restarts=args.restarts, max_evals=args.max_evals,
                          tol=args.tol if args.tol is not None else 1e-6, seed=args.seed, jobs=args.jobs)
    rep = decomposability_search(A, config)
    _emit(rep.to_dict(), args.json)
    return EXIT_OK if rep.decomposable else EXIT_FAIL


def cmd_bounds(args):
    from .elim_matrix import MatrixSpectralData
    from .spectral import HyperSpectralData, hyper_bound_check, hyper_term_values, matrix_bound_check

    A, _ = bio.read(args.file)
    rng = np.random.default_rng(args.seed)
    tol = args.tol if args.tol is not None else 1e-10
    admissible = violations = drawn = 0
    worst = 0.0
    if A.ndim == 2:
        w, Q = np.linalg.eigh(A)
        if np.any(w < -1e-12 * max(1.0, float(np.max(np.abs(w))))):
            raise PreconditionError("matrix bounds need a positive semidefinite matrix")
        data = MatrixSpectralData(Q, np.sqrt(np.maximum(w, 0.0)))
        while admissible < args.trials and drawn < args.budget:
            x, y = rng.standard_normal((2, A.shape[0]))
            drawn += 1
            rep = matrix_bound_check(data, x, y, A, tol)
            if rep.admissible:
                admissible += 1
                violations += not rep.holds
                worst = max(worst, rep.violation)
    else:
        if not args.truth:
            raise DocumentError("hypermatrix bounds need --truth with the decomposition")
        Q, W = _load_truth_hyper(args.truth)
        if W is None:
            raise DocumentError("truth sidecar lacks W")
        data = HyperSpectralData(Q, W)
        while admissible < args.trials and drawn < args.budget:
            x, y, z = rng.standard_normal((3, A.shape[0]))
            drawn += 1
            if np.any(hyper_term_values(data, x, y, z) < -tol):
                continue
            rep = hyper_bound_check(data, x, y, z, A, tol)
            admissible += 1
            violations += not rep.holds
            worst = max(worst, rep.violation)
    report = {"admissible": admissible, "drawn": drawn, "violations": violations, "worst_violation": worst}
    _emit(report, args.json)
    return EXIT_OK if violations == 0 else EXIT_FAIL


def cmd_svd3(args):
    from .search import SearchConfig
    from .spectral import svd3

    A, _ = bio.read(args.file)
    if A.ndim != 3:
        raise DimensionError("svd3 expects an order-3 document")
    config = SearchConfig(restarts=args.restarts, seed=args.seed, jobs=args.jobs)
    rep = svd3(A, config)
    _emit(rep.to_dict(), args.json)
    return EXIT_OK


def cmd_selftest(args):
    from .acceptance import run_all

    out = None if args.json else (lambda s: (sys.stdout.write(s + "\n"), sys.stdout.flush()))
    results = run_all(out)
    if args.json:
        _emit({"criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                             "details": {k: _text(v) for k, v in r.details.items()},
                             "seconds": r.seconds} for r in results]}, True)
    else:
        passed = sum(r.passed for r in results)
        sys.stdout.write(f"{passed}/{len(results)} criteria passed\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="override the default tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--jobs", type=int, default=1, help="parallel search restarts")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $BMSPEC_SEED or 0)")

    parser = argparse.ArgumentParser(prog="bmspec", description="BM hypermatrix spectral toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instances")
    gsub = gen.add_subparsers(dest="what", required=True)
    g = gsub.add_parser("orth", parents=[common], help="orthogonal hypermatrix")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--params", type=float, nargs="+", help="6 parameters per 2x2x2 block")
    g.add_argument("-o", "--output", default="-")
    g = gsub.add_parser("planted", parents=[common], help="decomposable instance plus truth sidecar")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kind", choices=("hyper", "matrix"), default="hyper")
    g.add_argument("-o", "--output", default="-")
    g.add_argument("--truth", help="path for the ground-truth sidecar")
    gen.set_defaults(func=cmd_gen)

    check = sub.add_parser("check", help="validate instances")
    csub = check.add_subparsers(dest="what", required=True)
    c = csub.add_parser("orth", parents=[common], help="orthogonality residual")
    c.add_argument("file")
    check.set_defaults(func=cmd_check)

    elim = sub.add_parser("elim", help="elimination pipelines")
    esub = elim.add_subparsers(dest="what", required=True)
    e = esub.add_parser("matrix", parents=[common], help="matrix I_D / I_Q report")
    e.add_argument("file")
    e = esub.add_parser("hyper", parents=[common], help="monomial system and consistency report")
    e.add_argument("file")
    e.add_argument("--truth", help="sidecar with params (and optionally W)")
    e.add_argument("--params", type=float, nargs="+")
    e.add_argument("--K", type=int, default=None, help="number of background levels")
    elim.set_defaults(func=cmd_elim)

    p = sub.add_parser("charpoly", parents=[common], help="2x2x2 characteristic polynomial")
    p.add_argument("file", nargs="?")
    p.add_argument("--a000", type=float)
    p.add_argument("--a111", type=float)
    p.add_argument("--w", type=float, nargs=3, metavar=("W00", "W01", "W11"))
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("decompose", parents=[common], help="decomposability search")
    p.add_argument("file")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-evals", type=int, default=2000)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bounds", parents=[common], help="spectral bound report")
    p.add_argument("file")
    p.add_argument("--truth")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--budget", type=int, default=10 ** 5)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("svd3", parents=[common], help="symmetrization and weight fit")
    p.add_argument("file")
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_svd3)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None:
            args.seed = default_seed()
        return args.func(args)
    except (DocumentError, DimensionError, PreconditionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (SingularSystemError, DegenerateInstanceError) as exc:
        sys.stderr.write(f"degenerate: {exc}\n")
        return EXIT_DEGENERATE
    except BMError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
