"""Algebraic curvature tensors and their induced operators.

Sign conventions are pinned by two anchors:

* the curvature operator on 2-vectors, ``g(F(X ^ Y), Z ^ W) = 2 R(X,Y,Z,W)``,
  is the identity for the round sphere, which forces
  ``sec(X, Y) = R(X, Y, X, Y)`` on orthonormal pairs;
* the Ricci contraction ``Ric_ij = sum_k R_kikj`` then makes constant
  positive holomorphic sectional curvature Einstein with positive constant.

Operator pairings:

* Calabi operator on sym^2 V^{1,0}: ``g(C(X(.)Y), conj Z (.) conj W) = 4 R(X, conj Z, conj W, Y)``;
* Kaehler operator on Lambda^{1,1}: ``g(K(X ^ conj Y), Z ^ conj W) = 2 R(X, conj Y, Z, conj W)``;
* tensor-square operators ``g(R1(X@Y), Z@W) = R(X,Y,Z,W)`` and
  ``g(R2(X@Y), Z@W) = R(X,Z,W,Y)``.

All operator matrices are taken in unit-norm bases, so the stored Hermitian
matrix is the matrix of the operator and its eigenvalues are the operator's.
"""

from __future__ import annotations

import contextlib
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .frames import FrameConvention, lambda11_basis_labels, sym2_basis_labels
from .spectral import Spectrum, eigensystem

__all__ = [
    "AlgebraicCurvatureTensor",
    "CurvatureOperatorMatrix",
    "RicciData",
    "SymmetryViolation",
    "NotKaehler",
    "NotHermitian",
    "NotEinstein",
    "validate_tensor",
    "calabi_from_tensor",
    "tensor_from_calabi",
    "kaehler_operator",
    "restrict_su",
    "r1_r2_operators",
    "ricci",
    "random_riemannian",
    "inject_sign_bug",
]

DEFAULT_TOL = 1e-10

# internal mutation hook for the non-vacuousness test: when enabled,
# calabi_from_tensor flips the sign of the (0, 0) entry of the assembled matrix
_SIGN_BUG = False


@contextlib.contextmanager
def inject_sign_bug():
    """Enable the internal sign-flip bug in calabi_from_tensor (tests only)."""
    global _SIGN_BUG
    _SIGN_BUG = True
    try:
        yield
    finally:
        _SIGN_BUG = False


def _bug_active() -> bool:
    return _SIGN_BUG or os.environ.get("CALABI_LAB_INJECT_SIGN_BUG", "") == "1"


class SymmetryViolation(ValueError):
    def __init__(self, identity: str, index: tuple[int, ...], residual: float):
        self.identity = identity
        self.index = index
        self.residual = residual
        super().__init__(f"{identity} violated at {index}: residual {residual:.3e}")


class NotKaehler(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class NotEinstein(ValueError):
    pass


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------

@dataclass
class AlgebraicCurvatureTensor:
    """Validated real curvature tensor R_ijkl on R^{2n} (0-based indices)."""

    convention: FrameConvention
    components: np.ndarray
    bianchi_validated: bool
    kaehler_validated: bool
    residuals: dict[str, float] = field(default_factory=dict)
    _complexified: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.convention.n

    def complexified(self) -> np.ndarray:
        """Components over the Z-frame, R(W_A, W_B, W_C, W_D)."""
        if self._complexified is None:
            from .frames import contract_each_slot

            p = self.convention.frame_change
            self._complexified = contract_each_slot(
                self.components.astype(complex), p.T)
        return self._complexified

    def endo_zz(self, a: int, b: int) -> np.ndarray:
        """R(W_a, W_b) as an endomorphism matrix in the Z-frame (0-based a, b)."""
        n = self.n
        rz = self.complexified()
        bar = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
        # (R(Wa,Wb) W_C)^D = R(Wa, Wb, W_C, W_{bar D})
        return rz[a, b][:, bar].T

    def scaled(self, c: float) -> "AlgebraicCurvatureTensor":
        return AlgebraicCurvatureTensor(
            self.convention, self.components * c,
            self.bianchi_validated, self.kaehler_validated, dict(self.residuals))


def _j_matrix(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    for a in range(n):
        j[a + n, a] = 1.0
        j[a, a + n] = -1.0
    return j


def validate_tensor(components: np.ndarray, convention: FrameConvention,
                    require_kaehler: bool = False,
                    tol: float = DEFAULT_TOL) -> AlgebraicCurvatureTensor:
    """Validate pair symmetries (mandatory), Bianchi and Kaehler (flagged).

    Raises SymmetryViolation naming the identity and the worst index tuple
    when a pair symmetry fails; Bianchi and Kaehler failures only clear the
    corresponding flags unless require_kaehler is set.
    """
    r = np.asarray(components, dtype=float)
    d = convention.dim
    if r.shape != (d,) * 4:
        raise SymmetryViolation("shape", r.shape, float("nan"))
    scale = max(1.0, float(np.max(np.abs(r))))
    residuals: dict[str, float] = {}

    checks = {
        "antisymmetry_first_pair": r + r.transpose(1, 0, 2, 3),
        "antisymmetry_second_pair": r + r.transpose(0, 1, 3, 2),
        "pair_exchange": r - r.transpose(2, 3, 0, 1),
    }
    for name, delta in checks.items():
        worst = float(np.max(np.abs(delta)))
        residuals[name] = worst
        if worst > tol * scale:
            idx = np.unravel_index(int(np.argmax(np.abs(delta))), delta.shape)
            raise SymmetryViolation(name, tuple(int(i) for i in idx), worst)

    bianchi = r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)
    residuals["bianchi"] = float(np.max(np.abs(bianchi)))
    bianchi_ok = residuals["bianchi"] <= tol * scale

    jm = _j_matrix(convention.n)
    t1 = np.tensordot(jm, r, axes=(1, 0))                     # [i, b, k, l]
    k1 = np.tensordot(jm, t1, axes=(1, 1)).transpose(1, 0, 2, 3) - r
    t2 = np.tensordot(r, jm, axes=(2, 1))                     # [i, j, d, k]
    k2 = np.tensordot(t2, jm, axes=(2, 1)) - r                # [i, j, k, l]
    residuals["kaehler_first_pair"] = float(np.max(np.abs(k1)))
    residuals["kaehler_second_pair"] = float(np.max(np.abs(k2)))
    kaehler_ok = bianchi_ok and max(
        residuals["kaehler_first_pair"], residuals["kaehler_second_pair"]) <= tol * scale

    if require_kaehler and not kaehler_ok:
        raise NotKaehler(
            f"Kaehler symmetry residuals {residuals['kaehler_first_pair']:.3e}, "
            f"{residuals['kaehler_second_pair']:.3e}, bianchi {residuals['bianchi']:.3e}")
    return AlgebraicCurvatureTensor(convention, r, bianchi_ok, kaehler_ok, residuals)


# ---------------------------------------------------------------------------
# operator matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureOperatorMatrix:
    """Hermitian matrix of an induced operator in a recorded unit-norm basis."""

    kind: str
    matrix: np.ndarray
    basis_labels: tuple
    basis_note: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermitian_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def spectrum(self) -> Spectrum:
        return eigensystem(self.matrix, source=self.kind)


@dataclass(frozen=True)
class RicciData:
    """Ricci matrix, scalar curvature, and the Einstein constant if present."""

    ricci: np.ndarray
    scal: float
    einstein_lambda: float | None

    @property
    def is_einstein(self) -> bool:
        return self.einstein_lambda is not None


@lru_cache(maxsize=None)
def _sym2_norms(n: int) -> np.ndarray:
    """c_ab with Z_a (.) Z_b = c_ab * (unit element); sqrt2 off-diagonal, 2 diagonal."""
    c = np.full((n, n), math.sqrt(2.0))
    np.fill_diagonal(c, 2.0)
    return c


@lru_cache(maxsize=None)
def _sym2_pair_index(n: int) -> np.ndarray:
    pid = np.zeros((n, n), dtype=int)
    for nu, (a, b) in enumerate(sym2_basis_labels(n)):
        pid[a - 1, b - 1] = pid[b - 1, a - 1] = nu
    return pid


def calabi_from_tensor(t: AlgebraicCurvatureTensor, tol: float = DEFAULT_TOL) -> CurvatureOperatorMatrix:
    """Calabi operator matrix in the unit basis {Z_a(.)Z_b/sqrt2 (a<b), Z_a(x)Z_a}."""
    if not t.kaehler_validated:
        raise NotKaehler("calabi_from_tensor requires a validated Kaehler tensor")
    n = t.n
    rz = t.complexified()
    c = _sym2_norms(n)
    labels = sym2_basis_labels(n)
    m = len(labels)
    h = np.zeros((m, m), dtype=complex)
    for nu, (a, b) in enumerate(labels):
        for mu, (cc, dd) in enumerate(labels):
            h[mu, nu] = 4.0 * rz[a - 1, n + cc - 1, n + dd - 1, b - 1] / (
                c[a - 1, b - 1] * c[cc - 1, dd - 1])
    if _bug_active():
        h[0, 0] = -h[0, 0]
    return CurvatureOperatorMatrix("calabi", h, labels,
                                   "Z_a(.)Z_b/sqrt2 for a<b, Z_a(x)Z_a on the diagonal")


def tensor_from_calabi(matrix: np.ndarray | CurvatureOperatorMatrix,
                       convention: FrameConvention,
                       tol: float = DEFAULT_TOL) -> AlgebraicCurvatureTensor:
    """The unique Kaehler curvature tensor whose Calabi operator is the given
    Hermitian matrix (the Calabi--Vesentini correspondence)."""
    h = matrix.matrix if isinstance(matrix, CurvatureOperatorMatrix) else np.asarray(matrix, dtype=complex)
    n = convention.n
    m = n * (n + 1) // 2
    if h.shape != (m, m):
        raise NotHermitian(f"expected a {m}x{m} matrix for n={n}, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * scale:
        raise NotHermitian("Calabi matrix must be Hermitian")

    pid = _sym2_pair_index(n)
    c = _sym2_norms(n)
    # s4[a,b,c,d] = R(Z_a, conj Z_c, conj Z_d, Z_b)
    hfull = h[pid[:, :, None, None], pid[None, None, :, :]]
    s4 = c[:, :, None, None] * c[None, None, :, :] * hfull.transpose(2, 3, 0, 1) / 4.0
    # qm[a,b,c,d] = R(Z_a, conj Z_b, Z_c, conj Z_d)
    qm = -s4.transpose(0, 2, 1, 3)

    d = 2 * n
    rz = np.zeros((d,) * 4, dtype=complex)
    u = slice(0, n)
    v = slice(n, d)
    rz[u, v, u, v] = qm
    rz[v, u, u, v] = -qm.transpose(1, 0, 2, 3)
    rz[u, v, v, u] = -qm.transpose(0, 1, 3, 2)
    rz[v, u, v, u] = qm.transpose(1, 0, 3, 2)

    from .frames import contract_each_slot

    re = contract_each_slot(rz, convention.frame_change.conj())
    if np.max(np.abs(re.imag)) > 1e-10 * scale:
        raise NotHermitian("reconstructed tensor is not real; input matrix malformed")
    return validate_tensor(re.real, convention, require_kaehler=True, tol=tol)


def kaehler_operator(t: AlgebraicCurvatureTensor) -> CurvatureOperatorMatrix:
    """Kaehler operator matrix in the unit basis {Z_a ^ conj(Z_b)/sqrt2}."""
    if not t.kaehler_validated:
        raise NotKaehler("kaehler_operator requires a validated Kaehler tensor")
    n = t.n
    rz = t.complexified()
    qm = rz[:n, n:, :n, n:]
    mat4 = -qm.transpose(3, 2, 0, 1)
    k = mat4.reshape(n * n, n * n)
    return CurvatureOperatorMatrix("kaehler", k, lambda11_basis_labels(n),
                                   "Z_a ^ conj(Z_b)/sqrt2")


def omega_coords(n: int) -> np.ndarray:
    """Unit-norm coordinates of the Kaehler direction in the Lambda^{1,1} basis."""
    w = np.zeros(n * n, dtype=complex)
    for nu, (a, b) in enumerate(lambda11_basis_labels(n)):
        if a == b:
            w[nu] = 1.0j / math.sqrt(n)
    return w


def su_complement(n: int) -> np.ndarray:
    """Deterministic orthonormal basis of the complement of the Kaehler direction."""
    w = omega_coords(n)
    m = n * n
    cols = [w] + [np.eye(m, dtype=complex)[:, j] for j in range(m)]
    q, _ = np.linalg.qr(np.column_stack(cols))
    return q[:, 1:m]


def restrict_su(k_op: CurvatureOperatorMatrix, ric: RicciData,
                tol: float = DEFAULT_TOL) -> CurvatureOperatorMatrix:
    """Restriction of the Kaehler operator to the complement of the Kaehler form.

    Requires an Einstein tensor; the Kaehler direction is then an eigenvector
    with eigenvalue lambda and the restriction is well defined.
    """
    if k_op.kind != "kaehler":
        raise NotKaehler("restrict_su expects a Kaehler operator matrix")
    if not ric.is_einstein:
        raise NotEinstein("restriction to su(n) requires an Einstein tensor")
    m = k_op.dim
    n = int(round(math.sqrt(m)))
    w = omega_coords(n)
    resid = float(np.linalg.norm(k_op.matrix @ w - ric.einstein_lambda * w))
    if resid > 1e-8 * max(1.0, abs(ric.einstein_lambda)):
        raise NotEinstein(f"Kaehler form is not an eigenvector (residual {resid:.3e})")
    b = su_complement(n)
    return CurvatureOperatorMatrix(
        "kaehler_su", b.conj().T @ k_op.matrix @ b,
        tuple(range(m - 1)), "orthonormal complement of omega_K/sqrt(n)")


def r1_r2_operators(t: AlgebraicCurvatureTensor) -> tuple[CurvatureOperatorMatrix, CurvatureOperatorMatrix]:
    """R1 restricted to Lambda^2 V and R2 restricted to sym^2 V, real unit bases."""
    r = t.components
    d = t.convention.dim
    lam_labels = tuple((i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1))
    m1 = np.zeros((len(lam_labels), len(lam_labels)))
    for nu, (i, j) in enumerate(lam_labels):
        for mu, (k, l) in enumerate(lam_labels):
            m1[mu, nu] = 2.0 * r[i - 1, j - 1, k - 1, l - 1]

    sym_labels = tuple((i, j) for i in range(1, d + 1) for j in range(i, d + 1))
    cn = np.where(np.eye(d, dtype=bool), 2.0, math.sqrt(2.0))
    m2 = np.zeros((len(sym_labels), len(sym_labels)))
    for nu, (i, j) in enumerate(sym_labels):
        for mu, (k, l) in enumerate(sym_labels):
            val = 2.0 * (r[i - 1, k - 1, l - 1, j - 1] + r[i - 1, l - 1, k - 1, j - 1])
            m2[mu, nu] = val / (cn[i - 1, j - 1] * cn[k - 1, l - 1])
    return (
        CurvatureOperatorMatrix("r1_lambda2", m1, lam_labels, "e_i ^ e_j / sqrt2"),
        CurvatureOperatorMatrix("r2_sym2", m2, sym_labels, "e_i(.)e_j/sqrt2, e_i(x)e_i"),
    )


def ricci(t: AlgebraicCurvatureTensor, tol: float = DEFAULT_TOL) -> RicciData:
    """Ricci contraction Ric_ij = sum_k R_kikj and Einstein detection."""
    ric = np.einsum("kikj->ij", t.components)
    scal = float(np.trace(ric))
    lam = scal / t.convention.dim
    resid = float(np.max(np.abs(ric - lam * np.eye(t.convention.dim))))
    einstein = lam if resid <= tol * max(1.0, float(np.max(np.abs(ric)))) else None
    return RicciData(ric, scal, einstein)


# ---------------------------------------------------------------------------
# random Riemannian tensors (general, non-Kaehler)
# ---------------------------------------------------------------------------

def random_riemannian(convention: FrameConvention, seed) -> AlgebraicCurvatureTensor:
    """Random validated algebraic curvature tensor (Bianchi, not Kaehler).

    A symmetric operator on Lambda^2 gives a tensor with the pair symmetries;
    removing its full antisymmetrization (the Lambda^4 part) enforces Bianchi.
    """
    rng = np.random.default_rng(seed)
    d = convention.dim
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    m = rng.normal(size=(len(pairs), len(pairs)))
    m = 0.5 * (m + m.T)
    r = np.zeros((d,) * 4)
    for nu, (i, j) in enumerate(pairs):
        for mu, (k, l) in enumerate(pairs):
            val = m[mu, nu]
            for (a, b, sa) in ((i, j, 1.0), (j, i, -1.0)):
                for (c, e, sc) in ((k, l, 1.0), (l, k, -1.0)):
                    r[a, b, c, e] = sa * sc * val
    bianchi_part = (r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)) / 3.0
    return validate_tensor(r - bianchi_part, convention)
