"""Acceptance checks, one function per criterion.

Each check returns a ``CriterionResult``; ``run_all`` runs them in order.
Seeds are fixed so every run sees the same instances.
"""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import io as bio
from .core import T, T2, bm_product, bm_summand, delta
from .elim_hyper import (
    assemble222,
    charpoly222,
    forward,
    general_spectral_system,
    spectral_system,
    u_sequence,
    vandermonde_relations222_residual,
    vandermonde_relations222_scale,
    variable_count,
    w_matrix,
)
from .elim_matrix import (
    MatrixSpectralData,
    id_generators_symbolic,
    id_residual,
    iq_consistency,
    iq_solve,
    matrix_resolution_residual,
    uv_solve,
)
from .errors import DegenerateInstanceError
from .instances import biorthogonal_pair, planted_general, planted_matrix, random_rotation
from .oracles import bm_product_bg_loops, bm_product_loops, jacobi_eigh
from .orthogonal import OrthParams, orth222, orth_direct_sum, orthogonality_residual, resolution_residual
from .search import SearchConfig, decomposability_search, planted_instance, random_symmetric_instance
from .spectral import HyperSpectralData, fit_alphas, hyper_bound_check, hyper_term_values, matrix_bound_check


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{status}] criterion {self.number:2d} {self.name}: {parts}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _rng(tag):
    return np.random.default_rng([20240917, tag])


# ------------------------------------------------------------------ 1

def criterion_1():
    rng = _rng(1)
    worst = max(orthogonality_residual(orth222(rng.uniform(-1, 1, 6))) for _ in range(1000))
    Q = orth222(np.zeros(6))
    c = 2.0 ** (-1.0 / 3.0)
    expected = np.array([[[c, 1.0], [c, 1.0]], [[-1.0, c], [1.0, c]]])
    entry_err = float(np.max(np.abs(Q - expected)))
    ok = worst < 1e-9 and entry_err <= 1e-15
    return ok, {"max_residual": worst, "r0_entry_error": entry_err}


# ------------------------------------------------------------------ 2

def criterion_2():
    rng = _rng(2)
    worst, off_nonzero = 0.0, 0
    for n in (4, 5, 6):
        params = OrthParams.for_size(n, rng)
        Q = orth_direct_sum(params, n)
        worst = max(worst, orthogonality_residual(Q))
        mask = np.zeros(Q.shape, dtype=bool)
        sizes = [2] * len(params.blocks) + [1] * int(params.singleton)
        o = 0
        for m in sizes:
            mask[o:o + m, o:o + m, o:o + m] = True
            o += m
        off_nonzero += int(np.count_nonzero(Q[~mask]))
    return worst < 1e-9 and off_nonzero == 0, {"max_residual": worst, "off_block_nonzeros": off_nonzero}


# ------------------------------------------------------------------ 3

def criterion_3():
    rng = _rng(3)
    worst_m, worst_h = 0.0, 0.0
    for n in (2, 4):
        Qm = random_rotation(n, rng)
        Qh = orth_direct_sum(OrthParams.for_size(n, rng))
        for _ in range(100):
            u, v, w = rng.standard_normal((3, n))
            worst_m = max(worst_m, matrix_resolution_residual(Qm, u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
            scale = np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(w)
            worst_h = max(worst_h, resolution_residual(Qh, u, v, w) / scale)
    return max(worst_m, worst_h) < 1e-9, {"matrix_rel": worst_m, "hyper_rel": worst_h}


# ------------------------------------------------------------------ 4, 5 shared instances

def _matrix_instances():
    rng = _rng(4)
    out = []
    for idx in range(100):
        n = 2 + idx % 4
        A, _, _ = planted_matrix(n, rng)
        w, V = jacobi_eigh(A)
        out.append((A, w, V))
    return out


def criterion_4():
    worst_rel, worst_ratio = 0.0, np.inf
    for A, w, _ in _matrix_instances():
        lam = np.sqrt(w)
        norm = max(1.0, float(np.max(np.abs(A))))
        good = id_residual(A, lam)
        worst_rel = max(worst_rel, good / norm)
        bad_lam = lam.copy()
        bad_lam[0] *= 1.1
        if np.min(np.abs(bad_lam[0] ** 2 - lam[1:] ** 2)) < 1e-6 * norm:
            bad_lam[0] = lam[0] * 0.9
        bad = id_residual(A, bad_lam)
        worst_ratio = min(worst_ratio, bad / max(good, 1e-300))
    ok = worst_rel < 1e-8 and worst_ratio >= 1e3
    return ok, {"max_rel_residual": worst_rel, "min_perturbed_ratio": worst_ratio}


def criterion_5():
    worst_cons, worst_lam = 0.0, 0.0
    for A, w, V in _matrix_instances():
        norm = max(1.0, float(np.max(np.abs(A))))
        table = iq_solve(A, V)
        resid, lam = iq_consistency(table)
        worst_cons = max(worst_cons, resid / norm ** 2)
        if lam is None:
            worst_lam = np.inf
            continue
        ref = np.sqrt(w)
        worst_lam = max(worst_lam, float(np.max(np.abs(np.abs(lam) - ref) / ref)))
    Q = np.array([[0.6, 0.8], [-0.8, 0.6]])
    A = (Q * np.array([1.0, 4.0])) @ Q.T
    t = iq_solve(A, Q)
    worked = max(abs(t[0, 0] - 1), abs(t[0, 1] - 2), abs(t[1, 1] - 4))
    ok = worst_cons < 1e-8 and worst_lam < 1e-6 and worked < 1e-10
    return ok, {"max_consistency_rel": worst_cons, "max_lambda_rel_err": worst_lam, "worked_example_err": worked}


# ------------------------------------------------------------------ 6

def criterion_6():
    rng = _rng(6)
    gens = id_generators_symbolic(2)
    worst_consistent, weakest_inconsistent = 0.0, np.inf
    for _ in range(1000):
        Q = random_rotation(2, rng)
        lam = rng.uniform(0.5, 3.0, 2)
        A = (Q * lam ** 2) @ Q.T
        pt = [A[0, 0], A[0, 1], A[1, 1], lam[0], lam[1]]
        scale = max(1.0, float(np.max(lam ** 2)), float(np.max(np.abs(A)))) ** 2
        worst_consistent = max(worst_consistent, max(abs(g.evaluate(pt)) for g in gens) / scale)
        a00, a11 = rng.uniform(-3, 3, 2)
        a01 = rng.uniform(-3, 3)
        lam = rng.uniform(0.5, 3.0, 2)
        pt = [a00, a01, a11, lam[0], lam[1]]
        scale = max(1.0, float(np.max(lam ** 2)), abs(a00), abs(a01), abs(a11)) ** 2
        weakest_inconsistent = min(weakest_inconsistent, max(abs(g.evaluate(pt)) for g in gens) / scale)
    ok = worst_consistent < 1e-8 and weakest_inconsistent > 1e-6
    return ok, {"max_consistent": worst_consistent, "min_inconsistent": weakest_inconsistent}


# ------------------------------------------------------------------ 7

def criterion_7():
    rng = _rng(7)
    worst_rel, worst_char = 0.0, 0.0
    for _ in range(200):
        Q = orth222(rng.uniform(-0.5, 0.5, 6))
        while True:
            w00, w01, w11 = rng.uniform(0.5, 1.5, 3)
            s = np.array([w00, w01, w11]) ** 6
            if min(abs(s[0] - s[1]), abs(s[1] - s[2])) > 1e-2:
                break
        A = forward(Q, w_matrix(w00, w01, w11))
        resid = vandermonde_relations222_residual(A, w00, w01, w11)
        worst_rel = max(worst_rel, resid / max(1.0, vandermonde_relations222_scale(A, w00, w01, w11)))
        _, ev = charpoly222(A[0, 0, 0], A[1, 1, 1])
        scale = max(1.0, float(np.max(s)), float(np.max(np.abs(A)))) ** 2
        worst_char = max(worst_char, abs(ev(w00, w01, w11)) / scale)
    e0, e1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    diag = assemble222(e0, e1, e0, e1, [1.0, 2.0], [2.0, 3.0])
    try:
        vandermonde_relations222_residual(diag, 1.0, 2.0, 3.0)
        raised = False
    except DegenerateInstanceError:
        raised = True
    ok = worst_rel < 1e-8 and worst_char < 1e-8 and raised
    return ok, {"max_relation_rel": worst_rel, "max_charpoly_rel": worst_char, "degenerate_raises": raised}


# ------------------------------------------------------------------ 8

def criterion_8():
    rng = _rng(8)
    worst_orth = 0.0
    for n in range(1, 7):
        Q = orth_direct_sum(OrthParams.for_size(n, rng))
        for U in u_sequence(Q, n + 1):
            worst_orth = max(worst_orth, float(np.max(np.abs(U - delta(n)))))
    worst_oracle = 0.0
    for n in (2, 3):
        Q = rng.uniform(-1, 1, (n, n, n))
        Us = u_sequence(Q, 3)
        ref1 = bm_product_loops(Q, T2(Q), T(Q))
        ref2 = bm_product_bg_loops(ref1, Q, T2(Q), T(Q))
        for U, ref in ((Us[1], ref1), (Us[2], ref2)):
            worst_oracle = max(worst_oracle, float(np.max(np.abs(U - ref))) / max(1.0, float(np.max(np.abs(ref)))))
    ok = worst_orth < 1e-9 and worst_oracle < 1e-12
    return ok, {"max_orthogonal_dev": worst_orth, "max_oracle_rel": worst_oracle}


# ------------------------------------------------------------------ 9

def criterion_9():
    rng = _rng(9)
    counts, warned = {}, []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Q2 = orth222(rng.uniform(-1, 1, 6))
        s2 = spectral_system(forward(Q2, np.ones((2, 2))), Q2, 2)
        Q3 = rng.uniform(-1, 1, (3, 3, 3))
        s3 = spectral_system(np.zeros((3, 3, 3)), Q3, 1)
        warned = [str(w.message) for w in caught]
    counts = {2: len(s2.basis), 3: len(s3.basis)}
    ok = counts[2] == variable_count(2) == 8 and counts[3] == variable_count(3) == 33 and not warned
    return ok, {"n2": counts[2], "n3": counts[3], "warnings": len(warned)}


# ------------------------------------------------------------------ 10

def criterion_10(restarts=20, trials=50):
    rng = _rng(10)
    hits, below = 0, 0
    worst_planted = 0.0
    random_decomposable = 0
    for t in range(trials):
        A, _, _ = planted_instance(2, rng)
        rep = decomposability_search(A, SearchConfig(restarts=restarts, seed=t))
        hits += rep.residual < 1e-6
        worst_planted = max(worst_planted, rep.residual)
        R = random_symmetric_instance(2, rng)
        rrep = decomposability_search(R, SearchConfig(restarts=restarts, seed=t))
        below += rep.residual < rrep.residual
        random_decomposable += rrep.residual < 1e-6
    ok = hits >= 0.9 * trials and below >= 0.95 * trials
    return ok, {"planted_hits": f"{hits}/{trials}", "planted_below_random": f"{below}/{trials}",
                "random_found_decomposable": f"{random_decomposable}/{trials}", "worst_planted": worst_planted}


# ------------------------------------------------------------------ 11

def _admissible_pairs(Q, rng, count, budget=10 ** 5):
    n = Q.shape[0]
    found = []
    drawn = 0
    while len(found) < count and drawn < budget:
        X = rng.standard_normal((1024, n))
        Y = rng.standard_normal((1024, n))
        drawn += 1024
        terms = (X @ Q) * (Y @ Q)
        keep = np.all(terms >= 0, axis=1)
        found.extend(zip(X[keep], Y[keep]))
    return found[:count]


def criterion_11():
    rng = _rng(11)
    matrix_violations, matrix_pairs, worst_m = 0, 0, 0.0
    per = 10 ** 4 // 20
    for idx in range(20):
        n = 2 + idx % 4
        A, Q, lam = planted_matrix(n, rng)
        data = MatrixSpectralData(Q, lam)
        for x, y in _admissible_pairs(Q, rng, per):
            rep = matrix_bound_check(data, x, y, A)
            matrix_pairs += 1
            if not rep.holds:
                matrix_violations += 1
            worst_m = max(worst_m, rep.violation)
    hyper_violations, hyper_triples, worst_h = 0, 0, 0.0
    for idx in range(10):
        Q = orth222(rng.uniform(-1, 1, 6))
        w00, w01, w11 = np.sort(rng.uniform(0.5, 1.5, 3))
        data = HyperSpectralData(Q, w_matrix(w00, w01, w11))
        A = data.reconstruct()
        got = 0
        while got < 10:
            x, y, z = rng.standard_normal((3, 2))
            if np.any(hyper_term_values(data, x, y, z) < 0):
                continue
            rep = hyper_bound_check(data, x, y, z, A)
            got += 1
            hyper_triples += 1
            if not rep.holds:
                hyper_violations += 1
            worst_h = max(worst_h, rep.violation)
    # equality case: all slices equal
    Q = orth222(rng.uniform(-1, 1, 6))
    data = HyperSpectralData(Q, 1.3 * np.ones((2, 2)))
    x, y, z = rng.standard_normal((3, 2))
    rep = hyper_bound_check(data, x, y, z)
    eq_gap = abs(rep.upper - rep.lower) + abs(rep.value - rep.lower)
    eq_ok = eq_gap < 1e-12 * max(1.0, abs(rep.value))
    ok = matrix_violations == 0 and matrix_pairs == 10 ** 4 and hyper_violations == 0 and eq_ok
    return ok, {"matrix_pairs": matrix_pairs, "matrix_violations": matrix_violations,
                "hyper_triples": hyper_triples, "hyper_violations": hyper_violations,
                "worst_hyper_violation": worst_h, "equality_gap": eq_gap}


# ------------------------------------------------------------------ 12

def criterion_12():
    rng = _rng(12)
    worst_res, worst_alpha = 0.0, 0.0
    for n in (2, 3):
        for _ in range(10):
            Qt, Et, Ft = rng.standard_normal((3, n, n, n))
            _, res, _ = fit_alphas(bm_product(Qt, Et, Ft), Qt, Et, Ft)
            worst_res = max(worst_res, res)
            alpha, _, _ = fit_alphas(3.0 * bm_summand(Qt, Et, Ft, 0), Qt, Et, Ft)
            worst_alpha = max(worst_alpha, abs(alpha[0] - 3.0))
    ok = worst_res < 1e-8 and worst_alpha < 1e-8
    return ok, {"max_fit_residual": worst_res, "max_alpha0_error": worst_alpha}


# ------------------------------------------------------------------ 13

def criterion_13():
    rng = _rng(13)
    worst_mu, worst_diag = 0.0, 0.0
    for _ in range(20):
        U, V = biorthogonal_pair(2, rng)
        lam, gam = rng.uniform(0.5, 2.0, 2), rng.uniform(0.5, 2.0, 2)
        A = U @ np.diag(lam * gam) @ V.T
        table = uv_solve(A, U, V)
        truth = np.outer(lam, gam)
        err = np.abs(table.as_matrix() - truth)
        worst_mu = max(worst_mu, float(np.max(err)))
        worst_diag = max(worst_diag, float(np.max(np.diag(err))))
    worst_gen = 0.0
    for _ in range(10):
        A, (Q, Ug, Vg), ds = planted_general(2, rng)
        sysm = general_spectral_system(A, Q, Ug, Vg, 2)
        x = sysm.evaluate_basis(np.concatenate([d.ravel() for d in ds]))
        worst_gen = max(worst_gen, sysm.residual(x))
    ok = worst_mu < 1e-8 and worst_gen < 1e-6
    return ok, {"max_mu_error": worst_mu, "max_diag_mu_error": worst_diag, "general_residual": worst_gen}


# ------------------------------------------------------------------ 14

def serialization_roundtrip(rng=None):
    rng = rng or _rng(14)
    specials = [0.1, 1 / 3, 5e-324, 2.2250738585072014e-308, 1.7976931348623157e308, -0.0, 1e-17]
    worst = 0
    for shape in ((2, 2), (3, 3), (2, 2, 2), (3, 3, 3)):
        a = rng.standard_normal(shape) * 10.0 ** rng.integers(-300, 300, size=shape)
        flat = a.ravel()
        flat[: len(specials)] = specials[: flat.size]
        b, _ = bio.loads(bio.dumps(a))
        worst += int(np.count_nonzero(a.view(np.uint64) != b.view(np.uint64)))
    return worst == 0


def determinism():
    from .cli import render_gen_orth, render_gen_planted

    a = render_gen_orth(4, 11, None)
    b = render_gen_orth(4, 11, None)
    c = render_gen_planted(3, 5)
    d = render_gen_planted(3, 5)
    return a == b and c == d


def criterion_14(previous=None):
    rt = serialization_roundtrip()
    det = determinism()
    if previous is None:
        previous = [run_one(k) for k in range(1, 14)]
    green = all(r.passed for r in previous)
    return rt and det and green, {"roundtrip_exact": rt, "deterministic": det, "selftest_green": green}


CRITERIA = {
    1: ("orthogonal family", criterion_1),
    2: ("direct sums", criterion_2),
    3: ("resolution of identity", criterion_3),
    4: ("matrix I_D route", criterion_4),
    5: ("matrix I_Q route", criterion_5),
    6: ("symbolic n=2 generators", criterion_6),
    7: ("2x2x2 round trip", criterion_7),
    8: ("background recurrence", criterion_8),
    9: ("variable count", criterion_9),
    10: ("decomposability search", criterion_10),
    11: ("spectral bounds", criterion_11),
    12: ("symmetrization fit", criterion_12),
    13: ("general (U, V) case", criterion_13),
    14: ("cli round trip and determinism", criterion_14),
}


def run_one(number, **kwargs):
    name, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        passed, details = fn(**kwargs)
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        passed, details = False, {"error": f"{type(exc).__name__}: {exc}"}
    return CriterionResult(number, name, bool(passed), details, time.perf_counter() - start)


def run_all(out=None):
    results = []
    for k in range(1, 14):
        r = run_one(k)
        results.append(r)
        if out:
            out(r.line())
    r14 = run_one(14, previous=results)
    results.append(r14)
    if out:
        out(r14.line())
    return results
