"""The Lichnerowicz curvature term and the action estimates."""

import math

import numpy as np
import pytest

from calabi_lab.curvature import (
    calabi_from_tensor,
    kaehler_operator,
    random_riemannian,
    restrict_su,
    ricci,
    validate_tensor,
)
from calabi_lab.frames import (
    EndoC,
    FormPQ,
    FrameConvention,
    RealForm,
    dense_conj,
    dense_z_to_e,
    multi_indices,
)
from calabi_lab.model_spaces import chsc, random_kaehler, random_kaehler_einstein
from calabi_lab.weitzenboeck import (
    NotSymmetric,
    achievability_endo,
    achievability_form,
    achievability_ratio,
    check_r2_gl_identity,
    check_ricl_r2_split,
    estimate_bound,
    estimate_sampling,
    normal_form,
    norm_phi_g,
    phi_g,
    random_primitive_real,
    random_real_pform,
    ricl_bruteforce,
    ricl_pairing,
    ricl_via_calabi,
    ricl_via_kaehler_su,
    stress_search,
    su_eigen_endos,
)

RNG = np.random.default_rng(99)


def random_form(conv, p, q, rng=RNG):
    return FormPQ(conv, p, q, {k: complex(rng.standard_normal(), rng.standard_normal())
                               for k in multi_indices(conv.n, p, q)})


def test_ricl_zero_curvature():
    conv = FrameConvention(2)
    zero = validate_tensor(np.zeros((4,) * 4), conv)
    psi = random_primitive_real(conv, 1, 1, RNG)
    assert abs(ricl_pairing(zero, psi)) < 1e-15


def test_ricl_one_forms_pair_to_ricci():
    rng = np.random.default_rng(1)
    conv = FrameConvention(2)
    t = random_kaehler(2, 5)
    ric = ricci(t)
    phi = random_form(conv, 1, 0, rng)
    # phi = sum c_a Z^a has musical dual sum c_a conj(Z_a)
    cvec = phi.coefficient_vector()
    p = conv.frame_change
    ric_z = p.T @ ric.ricci @ p
    vec = np.concatenate([np.zeros(2), cvec])
    dual = np.concatenate([cvec.conj(), np.zeros(2)])
    expected = vec @ ric_z @ dual
    assert abs(ricl_pairing(t, phi) - expected) < 1e-11 * max(1.0, abs(expected))


def test_ricl_top_forms_pair_to_half_scal():
    # (n,0)-forms: the curvature term is (scal/2)|phi|^2
    for n in (1, 2, 3):
        t = random_kaehler(n, 21)
        ric = ricci(t)
        conv = t.convention
        top = FormPQ.generator(conv, tuple(range(1, n + 1)), ())
        val = ricl_pairing(t, top).real
        assert abs(val - 0.5 * ric.scal * top.norm_sq()) < 1e-10 * max(1.0, abs(val))


def test_curvature_term_matches_bruteforce():
    rng = np.random.default_rng(2)
    worst = 0.0
    for n in (2, 3):
        conv = FrameConvention(n)
        for seed in (1, 2, 3):
            t = random_kaehler(n, seed)
            spec = calabi_from_tensor(t).spectrum()
            for (p, q) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)]:
                if p + q > n:
                    continue
                psi = random_primitive_real(conv, p, q, rng)
                bf = ricl_pairing(t, psi).real
                ec = ricl_via_calabi(spec, psi)
                worst = max(worst, abs(bf - ec) / max(1.0, abs(bf)))
    assert worst < 1e-9


def test_curvature_term_on_mixed_degree_real_forms():
    rng = np.random.default_rng(3)
    conv = FrameConvention(2)
    t = random_kaehler(2, 9)
    spec = calabi_from_tensor(t).spectrum()
    from calabi_lab.weitzenboeck import _batched_action, _sym2_eigen_endos

    dense = random_form(conv, 2, 0, rng).to_dense() + random_form(conv, 1, 1, rng).to_dense()
    dense = dense + dense_conj(dense, conv)
    de = dense_z_to_e(dense, conv)
    bf = float(np.real(np.sum(ricl_bruteforce(t, de) * de.conj())))
    acted = _batched_action(_sym2_eigen_endos(conv, spec), dense)
    ec = 2.0 * float(np.dot(spec.eigenvalues,
                            np.sum(np.abs(acted.reshape(spec.size, -1)) ** 2, axis=1)))
    assert abs(bf - ec) < 1e-9 * max(1.0, abs(bf))


def test_chsc_curvature_term_closed_form():
    # Calabi = Id: the curvature term is half of ((p+q)(n+1) - 2pq) |psi|^2
    rng = np.random.default_rng(5)
    n = 3
    conv = FrameConvention(n)
    t = chsc(n, 1.0)
    spec = calabi_from_tensor(t).spectrum()
    for (p, q) in [(1, 0), (1, 1), (2, 1)]:
        psi = random_primitive_real(conv, p, q, rng)
        expected = 0.5 * ((p + q) * (n + 1) - 2 * p * q) * psi.norm_sq()
        assert abs(ricl_via_calabi(spec, psi) - expected) < 1e-10 * expected
        assert abs(ricl_pairing(t, psi).real - expected) < 1e-10 * expected


def test_hat_norm_identity_with_and_without_primitivity():
    rng = np.random.default_rng(6)
    n = 3
    conv = FrameConvention(n)
    from calabi_lab.frames import lefschetz_adjoint

    for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 1)]:
        phi = random_form(conv, p, q, rng)
        psi = RealForm.symmetrize(phi)
        k = p + q
        hat2 = norm_phi_g(psi, "sym2_10")
        lam_sq = lefschetz_adjoint(psi.phi).norm_sq() * (2.0 if p != q else 1.0)
        expect = 0.25 * (k * (n + 1) - 2 * p * q) * psi.norm_sq()
        if k >= 2:
            expect -= lam_sq / (2 * k * (k - 1))
        assert abs(hat2 - expect) < 1e-10 * max(1.0, abs(expect))


def test_su_norm_and_u_decomposition():
    rng = np.random.default_rng(7)
    n = 3
    conv = FrameConvention(n)
    from calabi_lab.frames import kaehler_bivector

    om = kaehler_bivector(conv)
    for (p, q) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)]:
        prim = random_primitive_real(conv, p, q, rng).phi
        k = p + q
        su2 = norm_phi_g(prim, "su")
        expect = (2 * p * q + k * (n + 1 - k) - (p - q) ** 2 / n) * prim.norm_sq()
        assert abs(su2 - expect) < 1e-10 * max(1.0, abs(expect))
        u2 = norm_phi_g(prim, "u")
        om2 = float(np.sum(np.abs(om.act_dense(prim.to_dense())) ** 2))
        assert abs(u2 - (om2 / n + su2)) < 1e-10 * max(1.0, u2)


def test_u_estimate_sampled():
    rng = np.random.default_rng(8)
    conv = FrameConvention(3)
    for _ in range(200):
        cmat = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        L = EndoC.from_lambda11(conv, cmat)
        p, q = sorted(rng.integers(0, 4, size=2))[::-1]
        if p + q < 1 or p + q > 3 or p > 3:
            continue
        phi = random_primitive_real(conv, p, q, rng).phi
        lhs = float(np.sum(np.abs(L.act_dense(phi.to_dense())) ** 2))
        assert lhs <= (p + q) * L.norm_u_sq() * phi.norm_sq() * (1 + 1e-10)


def test_r2_gl_identity_general_riemannian():
    rng = np.random.default_rng(9)
    conv = FrameConvention(2)
    for seed in range(5):
        t = random_riemannian(conv, seed)
        for p in (1, 2, 3):
            de = random_real_pform(conv, p, rng)
            out = check_r2_gl_identity(t, de)
            assert out["residual"] < 1e-10
    # p = 1: both sides vanish
    de = random_real_pform(conv, 1, rng)
    out = check_r2_gl_identity(random_riemannian(conv, 100), de)
    assert abs(out["rhs"]) == 0.0


def test_ricl_r2_split_and_translation():
    rng = np.random.default_rng(10)
    conv = FrameConvention(2)
    for seed in range(5):
        t = random_riemannian(conv, 50 + seed)
        for p in (1, 2, 3):
            de = random_real_pform(conv, p, rng)
            out = check_ricl_r2_split(t, de)
            assert out["residual_split"] < 1e-9
            assert out["residual_translation"] < 1e-9


def test_einstein_curvature_term_via_restricted_spectrum():
    rng = np.random.default_rng(11)
    for n in (2, 3):
        conv = FrameConvention(n)
        t = random_kaehler_einstein(n, 77)
        ric = ricci(t)
        ksu = restrict_su(kaehler_operator(t), ric)
        spec = ksu.spectrum()
        endos = su_eigen_endos(conv, spec)
        for (p, q) in [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)]:
            if p + q > n:
                continue
            phi = random_primitive_real(conv, p, q, rng).phi
            bf = ricl_pairing(t, phi).real
            ke = ricl_via_kaehler_su(ric.einstein_lambda, spec, endos, phi)
            assert abs(bf - ke) < 1e-9 * max(1.0, abs(bf))


def test_estimate_bound_trivial_and_sampled():
    conv = FrameConvention(3)
    rng = np.random.default_rng(12)
    # S = Z_1 (x) Z_1 cannot act on a (0,q) form avoiding index 1
    s = EndoC.from_sym_hat(conv, np.diag([1.0, 0, 0]).astype(complex))
    psi = RealForm.symmetrize(FormPQ.generator(conv, (), (2, 3)))
    out = estimate_bound(s, psi)
    assert out.lhs < 1e-14 and out.satisfied
    res = estimate_sampling(conv, 1, 1, n_psi=10, n_s=40, rng=rng)
    assert res["violations"] == 0


def test_achievability_family_attains_constant():
    for n in (2, 3, 4):
        conv = FrameConvention(n)
        for (p, q) in [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (4, 0)]:
            if p + q > n or q > p:
                continue
            psi = achievability_form(conv, p, q)
            s = achievability_endo(conv, p + q)
            out = estimate_bound(s, psi)
            expect = achievability_ratio(p, q) * s.norm_sq() * psi.norm_sq()
            assert abs(out.lhs - expect) < 1e-10 * max(1.0, expect)
            assert out.satisfied


def test_normal_form():
    conv = FrameConvention(4)
    rng = np.random.default_rng(13)
    for _ in range(20):
        hat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        hat = (hat + hat.T) / 2
        s = EndoC.from_sym_hat(conv, hat)
        w, rho = normal_form(s)
        assert np.all(rho >= 0)
        scale = max(1.0, float(np.max(np.abs(hat))))
        assert np.max(np.abs(w @ np.diag(rho) @ w.T - hat)) < 1e-10 * scale
        assert np.max(np.abs(w.conj().T @ w - np.eye(4))) < 1e-10
    # simple closed-form cases
    conv2 = FrameConvention(2)
    s = EndoC.from_sym_hat(conv2, np.diag([math.sqrt(2), 0.0]).astype(complex))
    _, rho = normal_form(s)
    np.testing.assert_allclose(rho, [math.sqrt(2), 0.0], atol=1e-12)
    _, rho0 = normal_form(EndoC.from_sym_hat(conv2, np.zeros((2, 2), dtype=complex)))
    np.testing.assert_allclose(rho0, 0.0)
    with pytest.raises(NotSymmetric):
        normal_form(EndoC(conv2, np.eye(4, dtype=complex)))


def test_phi_g_unknown_tag():
    conv = FrameConvention(2)
    with pytest.raises(ValueError):
        phi_g(random_form(conv, 1, 0), "nope")


def test_stress_search_stays_below_bound():
    conv = FrameConvention(2)
    best = stress_search(conv, 1, 1, seed=3, iterations=60, restarts=2)
    cap = 0.5 + min(1, 1, 0.5)
    assert best <= cap + 1e-8
    assert best > 0.0
