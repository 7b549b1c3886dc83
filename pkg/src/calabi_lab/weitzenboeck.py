"""The Lichnerowicz curvature term on forms, computed several independent
ways, together with the derivation-family norms and the eigenvalue estimates.

The trusted oracle is ``ricl_bruteforce``: a direct summation of
``Ric_L(phi)(x_1..x_k) = sum_s sum_j (R(x_s, e_j) phi)(x_1, .., e_j, .., x_k)``
over the real frame, with no reference to any operator eigenstructure.  The
eigenvalue routes (via the Calabi operator, via the restricted Kaehler
operator for Einstein tensors) are checked against it.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curvature import AlgebraicCurvatureTensor, RicciData
from .frames import (
    EndoC,
    FormPQ,
    FrameConvention,
    RealForm,
    alternate,
    dense_z_to_e,
    derivation_action,
    lambda2_10_basis_endos,
    lambda11_element,
    lefschetz_adjoint,
    project_primitive,
    su_basis_endos,
    sym2_basis_endos,
    sym2_element,
    u_basis_endos,
)
from .spectral import Spectrum, takagi

__all__ = [
    "PhiG",
    "EstimateResult",
    "NotSymmetric",
    "ricl_bruteforce",
    "ricl_pairing",
    "ricl_via_calabi",
    "ricl_via_kaehler_su",
    "phi_g",
    "norm_phi_g",
    "check_r2_gl_identity",
    "check_ricl_r2_split",
    "estimate_bound",
    "achievability_form",
    "achievability_endo",
    "normal_form",
    "random_primitive_real",
    "random_real_pform",
    "stress_search",
]


class NotSymmetric(ValueError):
    pass


# ---------------------------------------------------------------------------
# brute-force Ric_L over the real frame
# ---------------------------------------------------------------------------

_LETTERS = string.ascii_lowercase


def ricl_bruteforce(t: AlgebraicCurvatureTensor, dense_e: np.ndarray,
                    batched: bool = False) -> np.ndarray:
    """Ric_L(phi) on components over the real frame.

    dense_e holds the covariant components of a k-form over e_1..e_{2n}
    (complex allowed), optionally with one leading batch axis.
    """
    r = t.components
    arr = np.asarray(dense_e, dtype=complex)
    if not batched:
        arr = arr[None]
    k = arr.ndim - 1
    out = np.zeros_like(arr)
    if k == 0:
        return out if batched else out[0]
    slot = [_LETTERS[12 + i] for i in range(k)]  # m, n, o, ... clear of a/c/d/j/z
    base = "z" + "".join(slot)
    for s in range(k):
        for tt in range(k):
            if tt == s:
                # argument substituted at slot s is acted on itself
                rc = np.einsum("ajjd->ad", r)
                src = base.replace(slot[s], "d")
                term = np.einsum(f"ad,{src}->{base.replace(slot[s], 'a')}", rc, arr)
            else:
                src = base.replace(slot[s], "j").replace(slot[tt], "d")
                dst = base.replace(slot[s], "a").replace(slot[tt], "c")
                term = np.einsum(f"ajcd,{src}->{dst}", r, arr, optimize=True)
            out -= term
    return out if batched else out[0]


def _form_dense_e(psi: FormPQ | RealForm) -> np.ndarray:
    return dense_z_to_e(psi.to_dense(), psi.convention)


def ricl_pairing(t: AlgebraicCurvatureTensor, psi: FormPQ | RealForm) -> complex:
    """g(Ric_L(psi), conj psi) by the brute-force oracle (real for real psi)."""
    de = _form_dense_e(psi)
    out = ricl_bruteforce(t, de)
    return complex(np.sum(out * de.conj()))


# ---------------------------------------------------------------------------
# eigenvalue routes
# ---------------------------------------------------------------------------

def _batched_action(mats: np.ndarray, dense: np.ndarray) -> np.ndarray:
    """Derivation action of a stack of endomorphisms on one dense tensor."""
    k = dense.ndim
    slot = [_LETTERS[i] for i in range(k)]
    base = "".join(slot)
    out = np.zeros((mats.shape[0],) + dense.shape, dtype=complex)
    for s in range(k):
        # (L phi)_{.. C ..} = - sum_D L[D, C] phi_{.. D ..}
        src = base.replace(slot[s], "y")
        term = np.einsum(f"xyw,{src}->x{base.replace(slot[s], 'w')}", mats, dense,
                         optimize=True)
        out -= term
    return out


def _sym2_eigen_endos(conv: FrameConvention, spec: Spectrum) -> np.ndarray:
    """Eigen-elements of a Calabi matrix as a stack of endomorphism matrices."""
    mats = []
    for nu in range(spec.size):
        mats.append(sym2_element(conv, spec.eigenvectors[:, nu]).matrix)
    return np.array(mats)


def ricl_via_calabi(spec: Spectrum, psi: FormPQ | RealForm) -> float:
    """Curvature term 2 sum_nu sigma_nu |Sigma_nu psi|^2 from a Calabi spectrum.

    ``spec`` must be the eigensystem of the Calabi matrix in the unit
    sym^2 V^{1,0} basis; the eigen-elements Sigma_nu are then unitary.
    """
    conv = psi.convention
    if spec.size != conv.n * (conv.n + 1) // 2:
        raise ValueError("spectrum dimension does not match sym^2 V^{1,0}")
    if spec.eigenvectors is None:
        raise ValueError("eigenvectors required")
    mats = _sym2_eigen_endos(conv, spec)
    acted = _batched_action(mats, psi.to_dense())
    norms = np.sum(np.abs(acted.reshape(spec.size, -1)) ** 2, axis=1)
    return float(2.0 * np.dot(spec.eigenvalues, norms))


def ricl_via_kaehler_su(lam: float, su_spec: Spectrum, su_endos: np.ndarray,
                        phi: FormPQ) -> float:
    """Curvature term of an Einstein tensor on a primitive (p,q)-form via the
    restricted Kaehler operator:
    g(Ric_L phi, conj phi) = lam (p-q)^2 / n |phi|^2 + sum_a lam_a |Xi_a phi|^2.
    """
    conv = phi.convention
    first = lam * (phi.p - phi.q) ** 2 / conv.n * phi.norm_sq()
    acted = _batched_action(su_endos, phi.to_dense())
    norms = np.sum(np.abs(acted.reshape(su_spec.size, -1)) ** 2, axis=1)
    return float(first + np.dot(su_spec.eigenvalues, norms))


def _batched_norms(mats: np.ndarray, dense_stack: np.ndarray) -> np.ndarray:
    """|Xi_m psi_b|^2 for a stack of endomorphisms and a stack of dense forms."""
    m = mats.shape[0]
    b = dense_stack.shape[0]
    k = dense_stack.ndim - 1
    slot = [_LETTERS[i] for i in range(k)]
    base = "".join(slot)
    norms = np.zeros((m, b))
    for i in range(m):
        acted = np.zeros_like(dense_stack)
        for s in range(k):
            src = "z" + base.replace(slot[s], "y")
            acted -= np.einsum(f"yw,{src}->z{base.replace(slot[s], 'w')}",
                               mats[i], dense_stack, optimize=True)
        norms[i] = np.sum(np.abs(acted.reshape(b, -1)) ** 2, axis=1)
    return norms


def ricl_via_calabi_batch(spec: Spectrum, conv: FrameConvention,
                          dense_stack: np.ndarray) -> np.ndarray:
    """Vectorized 2 sum sigma_nu |Sigma_nu psi|^2 over a stack of Z-frame forms."""
    mats = _sym2_eigen_endos(conv, spec)
    norms = _batched_norms(mats, dense_stack)
    return 2.0 * (spec.eigenvalues @ norms)


def ricl_pairing_batch(t: AlgebraicCurvatureTensor, dense_e_stack: np.ndarray) -> np.ndarray:
    """Vectorized brute-force g(Ric_L psi, conj psi) over stacked e-frame forms."""
    out = ricl_bruteforce(t, dense_e_stack, batched=True)
    b = dense_e_stack.shape[0]
    return np.real(np.sum(out.reshape(b, -1) * dense_e_stack.reshape(b, -1).conj(), axis=1))


def su_eigen_endos(conv: FrameConvention, ksu_spec: Spectrum) -> np.ndarray:
    """Eigen-elements of the restricted Kaehler operator as endomorphisms,
    normalized in the half-trace convention (sqrt2 times the tensor unit)."""
    from .curvature import su_complement

    comp = su_complement(conv.n)
    mats = []
    for alpha in range(ksu_spec.size):
        coords = comp @ ksu_spec.eigenvectors[:, alpha]
        mats.append(lambda11_element(conv, coords, scale=math.sqrt(2.0)).matrix)
    return np.array(mats)


# ---------------------------------------------------------------------------
# derivation families phi^g
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiG:
    """The family {Xi_a phi} over a recorded unitary basis of an algebra."""

    tag: str
    parts: np.ndarray
    basis_note: str

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.parts) ** 2))


def _real_gl_mats(d: int) -> np.ndarray:
    mats = np.zeros((d * d, d, d))
    for i in range(d):
        for j in range(d):
            mats[i * d + j, j, i] = 1.0
    return mats


def _real_so_mats(d: int) -> np.ndarray:
    out = []
    s = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d))
            m[j, i] = s
            m[i, j] = -s
            out.append(m)
    return np.array(out)


def _real_sym2_mats(d: int) -> np.ndarray:
    out = []
    s = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i, d):
            m = np.zeros((d, d))
            if i == j:
                m[i, i] = 1.0
            else:
                m[j, i] = s
                m[i, j] = s
            out.append(m)
    return np.array(out)


_FAMILY_NOTES = {
    "gl": "e_i (x) e_j over the real frame",
    "so": "e_i ^ e_j / sqrt2",
    "sym2_real": "e_i (.) e_j / sqrt2, e_i (x) e_i",
    "sym2_10": "Z_a (.) Z_b / sqrt2 (a<b), Z_a (x) Z_a",
    "lambda2_10": "Z_a ^ Z_b / sqrt2 (a<b)",
    "u": "Z_a ^ conj(Z_b)  (half-trace unitary)",
    "su": "traceless part of u(n) (half-trace unitary)",
}

_REAL_FRAME_TAGS = ("gl", "so", "sym2_real")


@lru_cache(maxsize=None)
def family_mats(n: int, tag: str) -> np.ndarray:
    """Stacked endomorphism matrices of the unitary basis of the tagged algebra."""
    conv = FrameConvention(n)
    if tag in _REAL_FRAME_TAGS:
        builder = {"gl": _real_gl_mats, "so": _real_so_mats, "sym2_real": _real_sym2_mats}[tag]
        return builder(conv.dim)
    if tag == "sym2_10":
        endos = sym2_basis_endos(conv)
    elif tag == "lambda2_10":
        endos = lambda2_10_basis_endos(conv)
    elif tag == "u":
        endos = u_basis_endos(conv)
    elif tag == "su":
        endos = su_basis_endos(conv)
    else:
        raise ValueError(f"unknown algebra tag {tag!r}")
    if not endos:
        return np.zeros((0, conv.dim, conv.dim), dtype=complex)
    return np.array([e.matrix for e in endos])


def phi_g(phi: FormPQ | RealForm | np.ndarray, tag: str,
          conv: FrameConvention | None = None) -> PhiG:
    """Derivation family of phi over the unitary basis of the tagged algebra.

    Real-frame algebras (gl, so, sym2_real) expect dense components over the
    real frame; the complex algebras act on the Z-frame representation.
    """
    if isinstance(phi, np.ndarray):
        if conv is None:
            raise ValueError("dense input requires the frame convention")
        dense = np.asarray(phi, dtype=complex)
    else:
        conv = phi.convention
        dense = phi.to_dense()
        if tag in _REAL_FRAME_TAGS:
            dense = dense_z_to_e(dense, conv)
    mats = family_mats(conv.n, tag)
    if mats.shape[0] == 0:
        return PhiG(tag, np.zeros((0,) + dense.shape, dtype=complex), _FAMILY_NOTES[tag])
    return PhiG(tag, _batched_action(mats, dense), _FAMILY_NOTES[tag])


def norm_phi_g_batch(tag: str, conv: FrameConvention, dense_stack: np.ndarray) -> np.ndarray:
    """|psi_b^g|^2 for a stack of dense forms (in the algebra's frame)."""
    mats = family_mats(conv.n, tag)
    if mats.shape[0] == 0:
        return np.zeros(dense_stack.shape[0])
    return np.sum(_batched_norms(mats, dense_stack), axis=0)


def norm_phi_g(phi: FormPQ | RealForm | np.ndarray, tag: str,
               conv: FrameConvention | None = None) -> float:
    return phi_g(phi, tag, conv).norm_sq()


# ---------------------------------------------------------------------------
# general-Riemannian identities
# ---------------------------------------------------------------------------

def _pairing_value(op_pair: np.ndarray, fam: PhiG, coords: np.ndarray) -> float:
    """sum_{ab} g(Op Xi_b, Xi_a) <Xi_b phi, Xi_a phi> for a real family."""
    m = fam.parts.shape[0]
    flat = fam.parts.reshape(m, -1)
    gram = (flat @ flat.conj().T).real
    return float(np.sum(op_pair * gram.T))


def _r2_pair_matrix(r: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Matrix g(R2 Xi_b, Xi_a) for real tensor-coordinate elements Xi."""
    coords = mats.transpose(0, 2, 1)  # endo matrix M[c,a] -> tensor T^{ac}
    # sum_{ij} coords[b,i,j] r[i,k,l,j] -> [b,k,l], then against coords[a,k,l]
    mid = np.tensordot(coords, r, axes=((1, 2), (0, 3)))
    return np.tensordot(coords, mid, axes=((1, 2), (1, 2)))


def _r1_pair_matrix(r: np.ndarray, mats: np.ndarray) -> np.ndarray:
    coords = mats.transpose(0, 2, 1)
    mid = np.tensordot(coords, r, axes=((1, 2), (0, 1)))
    return np.tensordot(coords, mid, axes=((1, 2), (1, 2)))


def check_r2_gl_identity(t: AlgebraicCurvatureTensor, dense_e: np.ndarray) -> dict:
    """g(R2(phi^gl), phi^gl) = -(p(p-1)/2) sum R_ijkl phi_{ijI} phi_{klI}."""
    conv = t.convention
    p = dense_e.ndim
    fam = phi_g(dense_e, "gl", conv)
    lhs = _pairing_value(_r2_pair_matrix(t.components, _real_gl_mats(conv.dim)),
                         fam, None)
    if p >= 2:
        mid = np.tensordot(t.components, dense_e, axes=((0, 1), (0, 1)))
        rhs = -0.5 * p * (p - 1) * float(np.real(np.sum(mid * dense_e.conj())))
    else:
        rhs = 0.0
    scale = max(1.0, abs(lhs), abs(rhs))
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs) / scale}


def check_ricl_r2_split(t: AlgebraicCurvatureTensor, dense_e: np.ndarray,
                        ric: RicciData | None = None) -> dict:
    """(3/2) g(Ric_L phi, phi) = g(R2(phi^S2), phi^S2) + p sum R_ij phi_iI phi_jI,
    plus the translation g(R1(phi^so), phi^so) = g(Ric_L phi, phi)."""
    from .curvature import ricci as ricci_of

    conv = t.convention
    p = dense_e.ndim
    ric = ric or ricci_of(t)
    ricl = float(np.real(np.sum(ricl_bruteforce(t, dense_e) * dense_e.conj())))

    fam_s2 = phi_g(dense_e, "sym2_real", conv)
    r2_s2 = _pairing_value(_r2_pair_matrix(t.components, _real_sym2_mats(conv.dim)),
                           fam_s2, None)
    if p:
        contracted = np.tensordot(ric.ricci, dense_e, axes=(0, 0))
        ric_term = p * float(np.real(np.sum(contracted * dense_e.conj())))
    else:
        ric_term = 0.0
    lhs = 1.5 * ricl
    rhs = r2_s2 + ric_term
    scale = max(1.0, abs(lhs), abs(rhs))

    fam_so = phi_g(dense_e, "so", conv)
    r1_so = _pairing_value(_r1_pair_matrix(t.components, _real_so_mats(conv.dim)),
                           fam_so, None)
    scale_so = max(1.0, abs(ricl), abs(r1_so))
    return {
        "ricl": ricl,
        "residual_split": abs(lhs - rhs) / scale,
        "residual_translation": abs(r1_so - ricl) / scale_so,
    }


# ---------------------------------------------------------------------------
# the main estimate
# ---------------------------------------------------------------------------

def _min_constant(p: int, q: int) -> float:
    return min(p, q, math.sqrt(p * q) / 2.0)


@dataclass(frozen=True)
class EstimateResult:
    lhs: float
    bound: float
    bound_primitive: float | None
    satisfied: bool


def estimate_bound(s: EndoC, psi: RealForm, tol: float = 1e-10) -> EstimateResult:
    """|S psi|^2 against (1/2 + min(p,q,sqrt(pq)/2)) |S|^2 |psi|^2, and the
    |psi^{sym2 V^{1,0}}|^2-phrased variant when psi is primitive."""
    p, q = psi.p, psi.q
    dense = psi.to_dense()
    lhs = float(np.sum(np.abs(s.act_dense(dense)) ** 2))
    s_norm = s.norm_sq()
    bound = (0.5 + _min_constant(p, q)) * s_norm * psi.norm_sq()

    bound_prim = None
    lam = lefschetz_adjoint(psi.phi)
    if lam.norm_sq() <= 1e-20 * max(1.0, psi.norm_sq()):
        denom = (p + q) * (psi.convention.n + 1) - 2 * p * q
        hat_norm = norm_phi_g(psi, "sym2_10")
        bound_prim = (2.0 + 4.0 * _min_constant(p, q)) / denom * s_norm * hat_norm
    scale = max(1.0, bound)
    return EstimateResult(lhs, bound, bound_prim, lhs <= bound + tol * scale)


def estimate_sampling(conv: FrameConvention, p: int, q: int, n_psi: int, n_s: int,
                      rng: np.random.Generator, tol: float = 1e-10) -> dict:
    """Random-pair stress test of the main estimate: n_psi primitive real forms
    against n_s symmetric elements each.  Returns violation counts and the
    largest ratio lhs/bound observed."""
    n = conv.n
    denom = (p + q) * (n + 1) - 2 * p * q
    cmin = _min_constant(p, q)
    violations = 0
    max_ratio = 0.0
    for _ in range(n_psi):
        psi = random_primitive_real(conv, p, q, rng)
        dense = psi.to_dense()
        psi_norm = psi.norm_sq()
        hat_norm = norm_phi_g(psi, "sym2_10")
        hats = rng.normal(size=(n_s, n, n)) + 1j * rng.normal(size=(n_s, n, n))
        hats = (hats + hats.transpose(0, 2, 1)) / 2.0
        mats = np.zeros((n_s, conv.dim, conv.dim), dtype=complex)
        mats[:, :n, n:] = hats
        norms = _batched_norms(mats, dense[None])[:, 0]
        s_norms = np.sum(np.abs(hats.reshape(n_s, -1)) ** 2, axis=1)
        bound = (0.5 + cmin) * s_norms * psi_norm
        bound_prim = (2.0 + 4.0 * cmin) / denom * s_norms * hat_norm
        tight = np.minimum(bound, bound_prim)
        violations += int(np.sum(norms > tight + tol * np.maximum(1.0, tight)))
        max_ratio = max(max_ratio, float(np.max(norms / np.maximum(bound, 1e-300))))
    return {"violations": violations, "samples": n_psi * n_s, "max_ratio": max_ratio}


def achievability_form(conv: FrameConvention, p: int, q: int) -> RealForm:
    """Re(sum_K Z^K) over the (p,q)-multi-indices with I cup J = {1..p+q}."""
    import itertools

    k = p + q
    if k > conv.n:
        raise ValueError("achievability family needs n >= p + q")
    coeffs = {}
    for I in itertools.combinations(range(1, k + 1), p):
        J = tuple(sorted(set(range(1, k + 1)) - set(I)))
        from .frames import MultiIndexK
        coeffs[MultiIndexK(I, J)] = 0.5
    phi = FormPQ(conv, p, q, coeffs)
    return RealForm.symmetrize(phi)


def achievability_endo(conv: FrameConvention, k: int) -> EndoC:
    """S = sum_{a<=k} Z_a (x) Z_a."""
    hat = np.zeros((conv.n, conv.n), dtype=complex)
    for a in range(k):
        hat[a, a] = 1.0
    return EndoC.from_sym_hat(conv, hat)


def achievability_ratio(p: int, q: int) -> float:
    """The attained constant (1/2 + pq/(p+q)) of the equality family."""
    return 0.5 + p * q / (p + q)


def stress_search(conv: FrameConvention, p: int, q: int, seed: int = 0,
                  iterations: int = 500, step: float = 0.05,
                  restarts: int = 16) -> float:
    """Projected gradient ascent on |S psi|^2 / (|S|^2 |psi|^2) over unit S,
    with a fresh random primitive real psi per restart; returns the best
    ratio found.  Only probes tightness; nothing is asserted about optimality.

    In the unit sym^2 coordinates c of S the objective is the Hermitian form
    c* G c with G the Gram matrix of the basis actions on psi, so the ascent
    runs on G directly.
    """
    rng = np.random.default_rng(seed)
    m = conv.n * (conv.n + 1) // 2
    mats = family_mats(conv.n, "sym2_10")
    best = 0.0
    for _ in range(restarts):
        psi = random_primitive_real(conv, p, q, rng)
        acted = _batched_action(mats, psi.to_dense()).reshape(m, -1)
        # |S psi|^2 = vdot(c, gram @ c) for S = sum_mu c_mu u_mu
        gram = (acted.conj() @ acted.T) / psi.norm_sq()
        c = rng.normal(size=m) + 1j * rng.normal(size=m)
        for _ in range(iterations):
            c /= np.linalg.norm(c)
            c = c + step * 2.0 * (gram @ c)
        c /= np.linalg.norm(c)
        best = max(best, float(np.real(np.vdot(c, gram @ c))))
    return best


# ---------------------------------------------------------------------------
# normal form of holomorphic symmetric elements
# ---------------------------------------------------------------------------

def normal_form(s: EndoC) -> tuple[np.ndarray, np.ndarray]:
    """Unitary frame and rho_1 >= .. >= rho_n >= 0 with S = sum rho_a Z'_a (x) Z'_a.

    Column a of the returned matrix holds the Z-coordinates of Z'_a.
    Raises NotSymmetric when the endomorphism is not a sym^2 V^{1,0} element.
    """
    conv = s.convention
    n = conv.n
    hat = s.hat
    rest = s.matrix.copy()
    rest[:n, n:] = 0.0
    scale = max(1.0, float(np.max(np.abs(s.matrix))))
    if np.max(np.abs(rest)) > 1e-12 * scale or np.max(np.abs(hat - hat.T)) > 1e-12 * scale:
        raise NotSymmetric("normal_form expects an element of sym^2 V^{1,0}")
    rho, w = takagi(hat)
    return w, rho


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def random_primitive_real(conv: FrameConvention, p: int, q: int,
                          rng: np.random.Generator) -> RealForm:
    """Random real primitive form in Lambda^{p,q} + Lambda^{q,p}.

    Complex Gaussian coefficients on the (p,q) generators, projected onto the
    primitive subspace, then symmetrized.
    """
    from .frames import multi_indices

    keys = multi_indices(conv.n, p, q)
    for _ in range(16):
        coeffs = {k: complex(rng.standard_normal(), rng.standard_normal()) for k in keys}
        phi = project_primitive(FormPQ(conv, p, q, coeffs))
        real = RealForm.symmetrize(phi)
        if real.norm_sq() > 1e-8:
            return real
    raise RuntimeError(f"no nonzero primitive ({p},{q})-form found at n={conv.n}")


def random_real_pform(conv: FrameConvention, p: int, rng: np.random.Generator) -> np.ndarray:
    """Random real p-form as dense components over the real frame."""
    raw = rng.standard_normal(size=(conv.dim,) * p)
    dense = alternate(raw) / math.factorial(max(p, 1))
    nrm = math.sqrt(float(np.sum(dense ** 2)))
    return dense / nrm if nrm > 0 else dense
