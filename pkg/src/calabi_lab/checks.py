"""The identity suite behind `calabi-lab verify`.

Each check runs a seeded randomized verification of one identity or estimate
and returns a record with a stable anchor name, a pass/fail status, and the
worst residual observed.  Residual tolerances follow the package defaults:
1e-10 relative for direct multilinear identities, 1e-9 where an
eigendecomposition is involved.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from . import certify as ct
from . import curvature as cv
from . import model_spaces as ms
from . import weitzenboeck as wz
from .frames import (
    EndoC,
    FormPQ,
    FrameConvention,
    RealForm,
    dense_z_to_e,
    kaehler_bivector,
    lefschetz_adjoint,
    multi_indices,
)
from .spectral import weight_principle

TOL_DIRECT = 1e-10
TOL_EIGEN = 1e-9

__all__ = ["run_verify_suite", "CHECKS"]


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(tag)]))


def _record(name: str, anchor: str, residual: float, tol: float, **values) -> dict:
    return {
        "name": name,
        "anchor": anchor,
        "status": "pass" if residual <= tol else "fail",
        "residual": float(residual),
        "tolerance": tol,
        "values": values,
    }


def _random_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return (a + a.conj().T) / 2.0


def _pairs(n: int, max_degree: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(n + 1) for q in range(p + 1)
            if 1 <= p + q <= min(max_degree, n)]


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def check_validator(n: int, trials: int, seed: int) -> dict:
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(max(trials // 10, 3)):
        t = ms.random_kaehler(n, int(rng.integers(2 ** 31)))
        worst = max(worst, *t.residuals.values())
        r = cv.random_riemannian(FrameConvention(n), int(rng.integers(2 ** 31)))
        worst = max(worst, r.residuals["bianchi"],
                    r.residuals["antisymmetry_first_pair"],
                    r.residuals["pair_exchange"])
    return _record("tensor_validator", "curvature-symmetry-validation", worst, 1e-12)


def check_roundtrip(n: int, trials: int, seed: int) -> dict:
    rng = _rng(seed, 2)
    conv = FrameConvention(n)
    m = n * (n + 1) // 2
    worst = 0.0
    for _ in range(trials):
        h = _random_hermitian(rng, m)
        t = cv.tensor_from_calabi(h, conv)
        back = cv.calabi_from_tensor(t).matrix
        scale = max(1.0, float(np.max(np.abs(h))))
        worst = max(worst, float(np.max(np.abs(back - h))) / scale,
                    t.residuals["bianchi"] / scale)
    return _record("calabi_vesentini_roundtrip", "calabi-correspondence-roundtrip",
                   worst, 1e-12, trials=trials)


def check_kaehler_structure(n: int, trials: int, seed: int) -> dict:
    """Vanishing on Lambda^{2,0}, the exchange symmetry, and the mixed-pair
    eigen-expansion of the curvature endomorphisms."""
    rng = _rng(seed, 3)
    conv = FrameConvention(n)
    worst = 0.0
    for _ in range(max(trials // 10, 3)):
        t = ms.random_kaehler(n, int(rng.integers(2 ** 31)))
        rz = t.complexified()
        scale = max(1.0, float(np.max(np.abs(rz))))
        # R(Z_a, Z_b, ., .) = 0 and R(., ., Z_c, Z_d) = 0
        worst = max(worst, float(np.max(np.abs(rz[:n, :n]))) / scale,
                    float(np.max(np.abs(rz[:, :, :n, :n]))) / scale)
        # exchange symmetry R(X, cY, Z, cW) = R(Z, cY, X, cW) = R(X, cW, Z, cY)
        q = rz[:n, n:, :n, n:]
        worst = max(worst, float(np.max(np.abs(q - q.transpose(2, 1, 0, 3)))) / scale,
                    float(np.max(np.abs(q - q.transpose(0, 3, 2, 1)))) / scale)
        # eigen-expansion of R(Z_a, conj Z_b)
        spec = cv.calabi_from_tensor(t).spectrum()
        mats = wz._sym2_eigen_endos(conv, spec)
        bar = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
        for a in range(n):
            for b in range(n):
                lhs = t.endo_zz(a, n + b)
                rhs = np.zeros_like(lhs)
                for nu in range(spec.size):
                    sig = mats[nu]
                    sig_c = sig.conj()[np.ix_(bar, bar)]
                    va = sig_c @ conv.z(a + 1)
                    vb = sig @ conv.zbar(b + 1)
                    rhs -= spec.eigenvalues[nu] * (np.outer(vb, va[bar]) - np.outer(va, vb[bar]))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    return _record("kaehler_structure", "kaehler-symmetries-and-eigen-expansion",
                   worst, TOL_EIGEN)


def check_r2_gl(n: int, trials: int, seed: int) -> dict:
    rng = _rng(seed, 4)
    conv = FrameConvention(n)
    worst = 0.0
    for _ in range(max(trials // 5, 5)):
        t = cv.random_riemannian(conv, int(rng.integers(2 ** 31)))
        for p in (1, 2, 3):
            if p > conv.dim:
                continue
            de = wz.random_real_pform(conv, p, rng)
            worst = max(worst, wz.check_r2_gl_identity(t, de)["residual"])
    return _record("r2_gl_contraction", "tensor-square-operator-gl-contraction",
                   worst, TOL_DIRECT)


def check_ricl_split(n: int, trials: int, seed: int) -> dict:
    rng = _rng(seed, 5)
    conv = FrameConvention(n)
    worst = 0.0
    for _ in range(max(trials // 5, 5)):
        t = cv.random_riemannian(conv, int(rng.integers(2 ** 31)))
        for p in (1, 2, 3):
            if p > conv.dim:
                continue
            de = wz.random_real_pform(conv, p, rng)
            out = wz.check_ricl_r2_split(t, de)
            worst = max(worst, out["residual_split"], out["residual_translation"])
    return _record("ricl_r2_split", "lichnerowicz-term-splitting-and-translation",
                   worst, TOL_EIGEN)


def check_curvature_term(n: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    """The curvature term of a Kaehler tensor equals twice the eigenvalue-
    weighted action norms, against the brute-force frame summation."""
    rng = _rng(seed, 6)
    conv = FrameConvention(n)
    pairs = _pairs(n, max_degree)
    forms = defaultdict(list)
    for (p, q) in pairs:
        for _ in range(3):
            forms[p + q].append(wz.random_primitive_real(conv, p, q, rng))
    stacks = {k: np.array([f.to_dense() for f in fs]) for k, fs in forms.items()}
    worst = 0.0
    for _ in range(trials):
        t = ms.random_kaehler(n, int(rng.integers(2 ** 31)))
        spec = cv.calabi_from_tensor(t).spectrum()
        for k, stack_z in stacks.items():
            stack_e = dense_z_to_e(stack_z, conv, k)
            bf = wz.ricl_pairing_batch(t, stack_e)
            ec = wz.ricl_via_calabi_batch(spec, conv, stack_z)
            worst = max(worst, float(np.max(np.abs(bf - ec) / np.maximum(1.0, np.abs(bf)))))
    return _record("curvature_term_via_calabi", "curvature-term-via-calabi-eigenvalues",
                   worst, TOL_EIGEN, trials=trials)


def check_norm_identities(n: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    """Insertion-norm identity, the hat-norm identity with and without the
    Lefschetz correction, the su-norm identity, and the u-decomposition."""
    rng = _rng(seed, 7)
    conv = FrameConvention(n)
    om = kaehler_bivector(conv)
    worst = 0.0
    count = max(trials // 5, 5)
    for (p, q) in _pairs(n, max_degree):
        k = p + q
        for _ in range(count):
            phi = FormPQ(conv, p, q, {key: complex(rng.standard_normal(), rng.standard_normal())
                                      for key in multi_indices(n, p, q)})
            dz = phi.to_dense()
            if k >= 2:
                ins = k * (k - 1) * float(np.sum(np.abs(
                    dz[np.ix_(range(n, 2 * n), range(n))]) ** 2))
                target = p * q * phi.norm_sq()
                worst = max(worst, abs(ins - target) / max(1.0, target))
            psi = RealForm.symmetrize(phi)
            hat2 = wz.norm_phi_g(psi, "sym2_10")
            lam = lefschetz_adjoint(psi.phi)
            lam_sq = lam.norm_sq() * (2.0 if p != q else 1.0)
            expect = 0.25 * (k * (n + 1) - 2 * p * q) * psi.norm_sq()
            if k >= 2:
                expect -= lam_sq / (2 * k * (k - 1))
            worst = max(worst, abs(hat2 - expect) / max(1.0, abs(expect)))

            prim = wz.random_primitive_real(conv, p, q, rng).phi
            su2 = wz.norm_phi_g(prim, "su")
            expect_su = (2 * p * q + k * (n + 1 - k) - (p - q) ** 2 / n) * prim.norm_sq()
            worst = max(worst, abs(su2 - expect_su) / max(1.0, abs(expect_su)))
            u2 = wz.norm_phi_g(prim, "u")
            om2 = float(np.sum(np.abs(om.act_dense(prim.to_dense())) ** 2))
            worst = max(worst, abs(u2 - (om2 / n + su2)) / max(1.0, u2))
            # |L phi|^2 <= (p+q) |L|_u^2 |phi|^2 for L in u(n)
            cmat = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            L = EndoC.from_lambda11(conv, cmat)
            lhs = float(np.sum(np.abs(L.act_dense(prim.to_dense())) ** 2))
            bound = k * L.norm_u_sq() * prim.norm_sq()
            worst = max(worst, max(lhs - bound, 0.0) / max(1.0, bound))
    return _record("norm_identities", "insertion-hat-su-norm-identities", worst, TOL_DIRECT)


def check_main_estimate(n: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    rng = _rng(seed, 8)
    conv = FrameConvention(n)
    violations = 0
    samples = 0
    worst_attain = 0.0
    for (p, q) in _pairs(n, max_degree):
        out = wz.estimate_sampling(conv, p, q, n_psi=max(trials // 10, 3), n_s=50, rng=rng)
        violations += out["violations"]
        samples += out["samples"]
        psi = wz.achievability_form(conv, p, q)
        s = wz.achievability_endo(conv, p + q)
        r = wz.estimate_bound(s, psi)
        expect = wz.achievability_ratio(p, q) * s.norm_sq() * psi.norm_sq()
        worst_attain = max(worst_attain, abs(r.lhs - expect) / max(1.0, expect))
    residual = worst_attain + float(violations)
    return _record("main_estimate", "symmetric-action-estimate-and-attainment",
                   residual, TOL_DIRECT, violations=violations, samples=samples)


def check_weight_principle(n: int, trials: int, seed: int) -> dict:
    rng = _rng(seed, 9)
    m = n * (n + 1) // 2
    bad = 0
    total = 0
    for _ in range(trials * 10):
        vals = np.sort(rng.normal(size=m))
        wmax = float(abs(rng.normal()) + 0.1)
        w = rng.uniform(0.0, wmax, size=m)
        tot = float(np.sum(w))
        if tot / wmax > m:
            continue
        kappa = -float(abs(rng.normal()))
        out = weight_principle(vals, w, tot, wmax, kappa)
        total += 1
        if out.certified and float(w @ vals) < out.lower_bound - 1e-9 * max(1.0, abs(out.lower_bound)):
            bad += 1
    return _record("weight_principle", "weighted-eigenvalue-sum-bound",
                   float(bad), 0.5, certified_trials=total)


def check_einstein_identities(n: int, trials: int, seed: int, max_degree: int = 4) -> dict:
    """omega_K eigenvector, su-trace identity, and the Einstein curvature term
    via the restricted Kaehler spectrum."""
    rng = _rng(seed, 10)
    conv = FrameConvention(n)
    worst = 0.0
    for _ in range(max(trials // 10, 2)):
        t = ms.random_kaehler_einstein(n, int(rng.integers(2 ** 31)))
        ric = cv.ricci(t)
        lam = ric.einstein_lambda
        k_op = cv.kaehler_operator(t)
        w = cv.omega_coords(n)
        scale = max(1.0, abs(lam))
        worst = max(worst, float(np.linalg.norm(k_op.matrix @ w - lam * w)) / scale)
        worst = max(worst, abs(lam - ric.scal / (2 * n)) / scale)
        ksu = cv.restrict_su(k_op, ric)
        worst = max(worst, abs(float(np.trace(ksu.matrix).real) - (n - 1) * lam) / scale)
        spec = ksu.spectrum()
        endos = wz.su_eigen_endos(conv, spec)
        for (p, q) in _pairs(n, max_degree):
            phi = wz.random_primitive_real(conv, p, q, rng).phi
            bf = wz.ricl_pairing(t, phi).real
            ke = wz.ricl_via_kaehler_su(lam, spec, endos, phi)
            worst = max(worst, abs(bf - ke) / max(1.0, abs(bf)))
        # (n,0)-forms: curvature term = (scal/2) |phi|^2
        top = FormPQ.generator(conv, tuple(range(1, n + 1)), ())
        bf = wz.ricl_pairing(t, top).real
        worst = max(worst, abs(bf - 0.5 * ric.scal * top.norm_sq()) / max(1.0, abs(bf)))
    return _record("einstein_identities", "einstein-restricted-spectrum-identities",
                   worst, TOL_EIGEN)


def check_thresholds(n: int, trials: int, seed: int) -> dict:
    from fractions import Fraction

    worst = 0.0
    tb = ct.thresholds(n)
    checks = [tb.upsilons_exact[(1, 1)] == Fraction(n, 2) if n >= 1 else True]
    for p in range(1, n + 1):
        checks.append(tb.upsilons_exact[(p, p)] == Fraction(p * (n + 1 - p), 1 + p))
        checks.append(tb.upsilons_exact[(p, 0)] == Fraction(p * (n + 1), 2))
        checks.append(tb.gammas[(p, p)] == n + 1 - p)
    checks.append(tb.gammas[(n, 0)] == Fraction(n * n - 1, n))
    checks.append(ct.upsilon_min_holds(n))
    worst = 0.0 if all(checks) else 1.0
    return _record("threshold_closed_forms", "threshold-table-closed-forms", worst, 0.5,
                   gamma_reduction_violations=ct.gamma_reduction_violations(n))


def check_model_spaces(n: int, trials: int, seed: int) -> dict:
    worst = 0.0
    nq = max(n, 2)
    spec, rep = ms.quadric_spectrum(nq)
    ric = cv.ricci(ms.quadric(nq))
    ok = (ric.is_einstein and ric.einstein_lambda > 0
          and rep.partial_sum >= -1e-10 and rep.partial_sum <= 1e-10)
    if nq >= 3:
        ok = ok and spec.eigenvalues[0] < -1e-10
    worst = 0.0 if ok else 1.0
    t = ms.chsc(n, 1.0)
    h = cv.calabi_from_tensor(t).matrix
    worst = max(worst, float(np.max(np.abs(h - np.eye(len(h))))))
    return _record("model_spaces", "model-space-spectra", worst, 1e-12,
                   quadric_n=nq, quadric_eigenvalues=[float(v) for v in spec.eigenvalues])


def stress_probe(n: int, seed: int, max_degree: int = 4) -> dict:
    """Info record: best |S psi|^2 / (|S|^2 |psi|^2) found by the projected
    gradient ascent (500 iterations, step 0.05, 16 restarts), per bidegree,
    next to the attained constant of the equality family and the proven cap.
    Nothing is asserted about optimality."""
    conv = FrameConvention(n)
    table = {}
    for (p, q) in _pairs(n, max_degree):
        best = wz.stress_search(conv, p, q, seed=seed)
        table[f"{p},{q}"] = {
            "best_found": best,
            "equality_family": wz.achievability_ratio(p, q),
            "proven_cap": 0.5 + min(p, q, (p * q) ** 0.5 / 2.0),
        }
    return {
        "name": "stress_search",
        "anchor": "estimate-tightness-probe",
        "status": "info",
        "residual": None,
        "tolerance": None,
        "values": table,
    }


CHECKS = [
    check_validator,
    check_roundtrip,
    check_kaehler_structure,
    check_r2_gl,
    check_ricl_split,
    check_curvature_term,
    check_norm_identities,
    check_main_estimate,
    check_weight_principle,
    check_einstein_identities,
    check_thresholds,
    check_model_spaces,
]


def run_verify_suite(n: int, trials: int, seed: int, max_degree: int = 4) -> list[dict]:
    """Run every check; failures are collected, not fatal.

    Checks are independent and may run on CALABI_LAB_THREADS threads; the
    record order is always the CHECKS order.
    """
    from .report import parallel_map

    def run(fn):
        if "max_degree" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
            return fn(n, trials, seed, max_degree=max_degree)
        return fn(n, trials, seed)

    return parallel_map(run, CHECKS)
