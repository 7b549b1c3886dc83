"""Frames, complexification, and the algebra of (p,q)-forms.

This module pins every linear-algebra convention the rest of the package
relies on:

* real orthonormal frame ``e_1 .. e_{2n}`` with ``J e_a = e_{a+n}``;
* unitary frame ``Z_a = (e_a - i J e_a) / sqrt(2)``; complexified frame
  indices run ``0 .. 2n-1`` where ``A < n`` means ``Z_{A+1}`` and
  ``A >= n`` means ``conj(Z_{A-n+1})``;
* the metric ``g`` is extended C-bilinearly, so ``g(Z_a, Z_b) = 0`` and
  ``g(Z_a, conj Z_b) = delta_ab``;
* tensors carry the tensor norm (sum of squared components over an
  orthonormal real frame).  Because the Z-frame is unitary for the
  Hermitian pairing ``<S, T> = g(S, conj T)``, that pairing is the plain
  component dot product in either frame;
* wedge products are alternating sums over all permutations without a
  normalizing factor, so ``|e_1 ^ ... ^ e_k|^2 = k!``;
* a (p,q)-form is stored either densely (components over the Z-frame) or
  sparsely as coefficients over the unit-norm generators ``Z^K``; the
  generator for multi-index ``K = (I, J)`` equals the wedge monomial in
  the canonical interleaved order divided by ``sqrt((p+q)!)``.

Endomorphisms act on covariant tensors as derivations,
``(L T)(x_1, .., x_k) = - sum_i T(x_1, .., L x_i, .., x_k)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FrameConvention",
    "MultiIndexK",
    "FormPQ",
    "RealForm",
    "EndoC",
    "evaluate_form",
    "endo_act",
    "lefschetz_adjoint",
    "project_primitive",
    "kaehler_bivector",
    "sym2_basis_labels",
    "sym2_basis_endos",
    "lambda11_basis_labels",
    "multi_indices",
]


class FrameError(ValueError):
    """Raised for dimension or arity mismatches in frame operations."""


# ---------------------------------------------------------------------------
# frame convention
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrameConvention:
    """Complex dimension plus the frame bookkeeping derived from it."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise FrameError(f"complex dimension must be >= 1, got {self.n}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def frame_change(self) -> np.ndarray:
        """Unitary P with column A = complex frame vector W_A in e-coordinates."""
        return _frame_change(self.n)

    def bar(self, a: int) -> int:
        """Toggle the bar on a complexified frame index (0-based)."""
        return (a + self.n) % self.dim

    # coordinate vectors in the Z-frame, 1-based labels
    def z(self, a: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[a - 1] = 1.0
        return v

    def zbar(self, a: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.n + a - 1] = 1.0
        return v

    def e(self, i: int) -> np.ndarray:
        """Real frame vector e_i (1-based) in Z-frame coordinates."""
        a = (i - 1) % self.n
        v = np.zeros(self.dim, dtype=complex)
        if i <= self.n:
            v[a] = 1.0 / math.sqrt(2.0)
            v[a + self.n] = 1.0 / math.sqrt(2.0)
        else:
            v[a] = 1.0j / math.sqrt(2.0)
            v[a + self.n] = -1.0j / math.sqrt(2.0)
        return v


@lru_cache(maxsize=None)
def _frame_change(n: int) -> np.ndarray:
    p = np.zeros((2 * n, 2 * n), dtype=complex)
    s = 1.0 / math.sqrt(2.0)
    for a in range(n):
        p[a, a] = s
        p[a + n, a] = -1.0j * s
        p[a, a + n] = s
        p[a + n, a + n] = 1.0j * s
    return p


# ---------------------------------------------------------------------------
# dense tensor helpers (shared by every module)
# ---------------------------------------------------------------------------

def contract_each_slot(arr: np.ndarray, mat: np.ndarray, k: int | None = None) -> np.ndarray:
    """Apply ``out[.. i ..] = sum_A mat[i, A] arr[.. A ..]`` on the last k axes."""
    k = arr.ndim if k is None else k
    lead = arr.ndim - k
    for slot in range(lead, arr.ndim):
        arr = np.moveaxis(np.tensordot(arr, mat, axes=(slot, 1)), -1, slot)
    return arr


def dense_z_to_e(arr: np.ndarray, conv: FrameConvention, k: int | None = None) -> np.ndarray:
    """Covariant components over the real frame from Z-frame components."""
    return contract_each_slot(arr, conv.frame_change.conj(), k)


def dense_e_to_z(arr: np.ndarray, conv: FrameConvention, k: int | None = None) -> np.ndarray:
    return contract_each_slot(np.asarray(arr, dtype=complex), conv.frame_change.T, k)


def dense_conj(arr: np.ndarray, conv: FrameConvention, k: int | None = None) -> np.ndarray:
    """Complex conjugate of a tensor in Z-frame components (bar-toggled indices)."""
    k = arr.ndim if k is None else k
    perm = np.concatenate([np.arange(conv.n, 2 * conv.n), np.arange(conv.n)])
    out = arr.conj()
    for slot in range(arr.ndim - k, arr.ndim):
        out = out.take(perm, axis=slot)
    return out


def hermitian_pairing(a: np.ndarray, b: np.ndarray) -> complex:
    """``g(a, conj b)``; valid on components in the e-frame or the Z-frame."""
    return complex(np.sum(a * b.conj()))


def derivation_action(mat: np.ndarray, arr: np.ndarray, k: int | None = None) -> np.ndarray:
    """Derivation action of the endomorphism ``mat`` (same frame as ``arr``)."""
    k = arr.ndim if k is None else k
    out = np.zeros_like(arr, dtype=np.result_type(arr, mat))
    for slot in range(arr.ndim - k, arr.ndim):
        out -= np.moveaxis(np.tensordot(arr, mat, axes=(slot, 0)), -1, slot)
    return out


def alternate(arr: np.ndarray) -> np.ndarray:
    """Full antisymmetrization sum (no 1/k! factor)."""
    k = arr.ndim
    out = np.zeros_like(arr)
    for perm in itertools.permutations(range(k)):
        out += _perm_sign(perm) * arr.transpose(perm)
    return out


def wedge_dense(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Wedge of two alternating tensors, normalized so v ^ w = v@w - w@v."""
    k, l = a.ndim, b.ndim
    return alternate(np.multiply.outer(a, b)) / (math.factorial(k) * math.factorial(l))


def interior_product(vec: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """iota_X phi = phi(X, ., .., .)."""
    return np.tensordot(vec, arr, axes=(0, 0))


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# multi-indices and sparse (p,q)-forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndexK:
    """Multi-index K = (I, J): I unbarred, J barred, both strictly increasing, 1-based."""

    I: tuple[int, ...]
    J: tuple[int, ...]

    def __post_init__(self) -> None:
        for name, idx in (("I", self.I), ("J", self.J)):
            if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                raise FrameError(f"{name} must be strictly increasing, got {idx}")
            if idx and idx[0] < 1:
                raise FrameError(f"{name} entries must be >= 1, got {idx}")

    @property
    def p(self) -> int:
        return len(self.I)

    @property
    def q(self) -> int:
        return len(self.J)

    @property
    def degree(self) -> int:
        return self.p + self.q

    def interleave_sign(self) -> int:
        """Sign relating Z^{i_1}^..^Z^{i_p}^conjZ^{j_1}^..^conjZ^{j_q} to the
        canonical interleaved order (lexicographic, unbarred before barred at
        equal value): (-1)^(number of pairs (i, j) in I x J with j < i)."""
        inv = sum(1 for i in self.I for j in self.J if j < i)
        return -1 if inv % 2 else 1

    def overlap(self) -> int:
        return len(set(self.I) & set(self.J))


@lru_cache(maxsize=None)
def multi_indices(n: int, p: int, q: int) -> tuple[MultiIndexK, ...]:
    """All multi-indices of bidegree (p, q) on n complex dimensions, sorted."""
    if p < 0 or q < 0 or p > n or q > n:
        return ()
    return tuple(
        MultiIndexK(I, J)
        for I in itertools.combinations(range(1, n + 1), p)
        for J in itertools.combinations(range(1, n + 1), q)
    )


@lru_cache(maxsize=None)
def generator_dense_basis(n: int, p: int, q: int) -> np.ndarray:
    """Dense Z-frame components of all unit generators Z^K, stacked."""
    keys = multi_indices(n, p, q)
    k = p + q
    out = np.zeros((len(keys),) + (2 * n,) * k, dtype=complex)
    norm = 1.0 / math.sqrt(math.factorial(k)) if k else 1.0
    for row, key in enumerate(keys):
        base = tuple(i - 1 for i in key.I) + tuple(n + j - 1 for j in key.J)
        amp = key.interleave_sign() * norm
        if k == 0:
            out[row] = amp
            continue
        for perm in itertools.permutations(range(k)):
            out[(row,) + tuple(base[t] for t in perm)] += amp * _perm_sign(perm)
    return out


class FormPQ:
    """A (p,q)-form as coefficients over the unit-norm generators Z^K.

    Generators are orthonormal for the Hermitian pairing, so
    ``|phi|^2 = sum_K |phi_K|^2``.  Instances are treated as immutable.
    """

    __slots__ = ("convention", "p", "q", "coeffs", "_dense")

    def __init__(self, convention: FrameConvention, p: int, q: int,
                 coeffs: dict[MultiIndexK, complex] | None = None):
        n = convention.n
        if not (0 <= p <= n and 0 <= q <= n):
            raise FrameError(f"bidegree ({p},{q}) out of range for n={n}")
        self.convention = convention
        self.p = p
        self.q = q
        self.coeffs = {}
        for key, val in (coeffs or {}).items():
            if (key.p, key.q) != (p, q):
                raise FrameError(f"multi-index {key} has wrong bidegree for ({p},{q})")
            if val != 0:
                self.coeffs[key] = complex(val)
        self._dense = None

    @property
    def degree(self) -> int:
        return self.p + self.q

    @classmethod
    def zero(cls, convention: FrameConvention, p: int, q: int) -> "FormPQ":
        return cls(convention, p, q)

    @classmethod
    def generator(cls, convention: FrameConvention, I: Iterable[int], J: Iterable[int]) -> "FormPQ":
        key = MultiIndexK(tuple(I), tuple(J))
        return cls(convention, key.p, key.q, {key: 1.0})

    def coefficient_vector(self) -> np.ndarray:
        keys = multi_indices(self.convention.n, self.p, self.q)
        return np.array([self.coeffs.get(k, 0.0) for k in keys], dtype=complex)

    @classmethod
    def from_coefficient_vector(cls, convention: FrameConvention, p: int, q: int,
                                vec: np.ndarray) -> "FormPQ":
        keys = multi_indices(convention.n, p, q)
        if len(vec) != len(keys):
            raise FrameError("coefficient vector has wrong length")
        return cls(convention, p, q, {k: v for k, v in zip(keys, vec) if v != 0})

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "FormPQ") -> "FormPQ":
        if (self.p, self.q) != (other.p, other.q):
            raise FrameError("cannot add forms of different bidegree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return FormPQ(self.convention, self.p, self.q, out)

    def __sub__(self, other: "FormPQ") -> "FormPQ":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "FormPQ":
        return FormPQ(self.convention, self.p, self.q,
                      {k: c * v for k, v in self.coeffs.items()})

    def conjugate(self) -> "FormPQ":
        """conj(phi) as a (q,p)-form: coeff (J,I) = (-1)^|I cap J| conj(coeff (I,J))."""
        out: dict[MultiIndexK, complex] = {}
        for k, v in self.coeffs.items():
            sign = -1 if k.overlap() % 2 else 1
            out[MultiIndexK(k.J, k.I)] = sign * np.conj(v)
        return FormPQ(self.convention, self.q, self.p, out)

    def norm_sq(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.coeffs.values()))

    def inner(self, other: "FormPQ") -> complex:
        """Hermitian inner product g(self, conj other)."""
        if (self.p, self.q) != (other.p, other.q):
            return 0.0
        small, big = sorted((self.coeffs, other.coeffs), key=len)
        return complex(sum(self.coeffs.get(k, 0.0) * np.conj(other.coeffs.get(k, 0.0))
                           for k in small))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())

    # -- dense conversion -----------------------------------------------------

    def to_dense(self) -> np.ndarray:
        """Covariant components over the Z-frame, shape (2n,)*(p+q)."""
        if self._dense is None:
            basis = generator_dense_basis(self.convention.n, self.p, self.q)
            vec = self.coefficient_vector()
            self._dense = np.tensordot(vec, basis, axes=(0, 0))
        return self._dense

    @classmethod
    def from_dense(cls, convention: FrameConvention, p: int, q: int,
                   dense: np.ndarray) -> "FormPQ":
        """Extract the (p,q)-part of a dense alternating tensor (Z-frame)."""
        k = p + q
        if dense.ndim != k:
            raise FrameError("dense array rank does not match bidegree")
        root = math.sqrt(math.factorial(k)) if k else 1.0
        coeffs = {}
        for key in multi_indices(convention.n, p, q):
            base = tuple(i - 1 for i in key.I) + tuple(convention.n + j - 1 for j in key.J)
            val = root * key.interleave_sign() * (dense[base] if k else complex(dense))
            if val != 0:
                coeffs[key] = val
        return cls(convention, p, q, coeffs)

    def __repr__(self) -> str:
        return f"FormPQ(n={self.convention.n}, p={self.p}, q={self.q}, terms={len(self.coeffs)})"


def split_bidegrees(dense: np.ndarray, conv: FrameConvention) -> dict[tuple[int, int], FormPQ]:
    """Split a dense alternating k-tensor into its nonzero (p,q)-components."""
    k = dense.ndim
    out = {}
    for p in range(0, min(k, conv.n) + 1):
        q = k - p
        if q > conv.n:
            continue
        part = FormPQ.from_dense(conv, p, q, dense)
        if part.coeffs:
            out[(p, q)] = part
    return out


# ---------------------------------------------------------------------------
# real forms
# ---------------------------------------------------------------------------

class RealForm:
    """A conjugation-invariant element of Lambda^{p,q} + Lambda^{q,p}.

    For p != q the stored (p,q)-piece is phi and the represented object is
    psi = phi + conj(phi), with |psi|^2 = 2 |phi|^2.  For p = q the stored
    form must itself be self-conjugate.
    """

    __slots__ = ("phi", "_dense")

    def __init__(self, phi: FormPQ, tol: float = 1e-12):
        if phi.p == phi.q:
            delta = phi - phi.conjugate()
            scale = math.sqrt(phi.norm_sq()) or 1.0
            if math.sqrt(delta.norm_sq()) > tol * scale:
                raise FrameError("a (p,p) real form must be self-conjugate")
        self.phi = phi
        self._dense = None

    @classmethod
    def symmetrize(cls, phi: FormPQ) -> "RealForm":
        """Build the real form phi + conj(phi) from any (p,q)-form."""
        if phi.p == phi.q:
            return cls(phi + phi.conjugate())
        return cls(phi)

    @property
    def p(self) -> int:
        return self.phi.p

    @property
    def q(self) -> int:
        return self.phi.q

    @property
    def degree(self) -> int:
        return self.phi.degree

    @property
    def convention(self) -> FrameConvention:
        return self.phi.convention

    def norm_sq(self) -> float:
        if self.p == self.q:
            return self.phi.norm_sq()
        return 2.0 * self.phi.norm_sq()

    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            d = self.phi.to_dense()
            if self.p != self.q:
                d = d + dense_conj(d, self.convention)
            self._dense = d
        return self._dense

    def __repr__(self) -> str:
        return f"RealForm(n={self.convention.n}, p={self.p}, q={self.q})"


# ---------------------------------------------------------------------------
# endomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndoC:
    """Complex-linear endomorphism of V^C, as a matrix in the Z-frame.

    ``matrix[C, A]`` is the W_C-coefficient of L(W_A).  The optional tag
    records the algebra the element belongs to.  ``norm_sq`` is the tensor
    norm tr(L L*); ``norm_u_sq`` is the u(n)-convention norm tr(L L*)/2
    used for type-preserving algebras in the eigenvalue estimates.
    """

    convention: FrameConvention
    matrix: np.ndarray
    tag: str | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.convention.dim, self.convention.dim):
            raise FrameError("endomorphism matrix has wrong shape")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_sym_hat(cls, conv: FrameConvention, hat: np.ndarray, tag: str = "sym2_10") -> "EndoC":
        """Element of sym^2 V^{1,0} from its complex symmetric hat matrix."""
        hat = np.asarray(hat, dtype=complex)
        if hat.shape != (conv.n, conv.n):
            raise FrameError("hat matrix must be n x n")
        if np.max(np.abs(hat - hat.T)) > 1e-12 * max(1.0, np.max(np.abs(hat))):
            raise FrameError("hat matrix must be complex symmetric")
        m = np.zeros((conv.dim, conv.dim), dtype=complex)
        m[: conv.n, conv.n:] = hat
        return cls(conv, m, tag)

    @property
    def hat(self) -> np.ndarray:
        """Hat matrix of a sym^2 V^{1,0} element (upper right block)."""
        return self.matrix[: self.convention.n, self.convention.n:]

    @classmethod
    def from_lambda11(cls, conv: FrameConvention, c: np.ndarray, tag: str = "lambda11") -> "EndoC":
        """Endomorphism of the Lambda^{1,1} bivector sum c_ab Z_a ^ conj(Z_b)."""
        c = np.asarray(c, dtype=complex)
        m = np.zeros((conv.dim, conv.dim), dtype=complex)
        m[: conv.n, : conv.n] = -c
        m[conv.n:, conv.n:] = c.T
        return cls(conv, m, tag)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def norm_u_sq(self) -> float:
        return 0.5 * self.norm_sq()

    def act_dense(self, dense: np.ndarray) -> np.ndarray:
        return derivation_action(self.matrix, dense)

    def conjugate(self) -> "EndoC":
        n = self.convention.n
        perm = np.concatenate([np.arange(n, 2 * n), np.arange(n)])
        m = self.matrix.conj()[np.ix_(perm, perm)]
        return EndoC(self.convention, m, self.tag)


def kaehler_bivector(conv: FrameConvention) -> EndoC:
    """The Kaehler bivector as an endomorphism.

    Acts on (p,q)-forms by multiplication with i(p-q) and has
    ``norm_u_sq == n``; it spans the trace part of u(n).
    """
    diag = np.concatenate([-1.0j * np.ones(conv.n), 1.0j * np.ones(conv.n)])
    return EndoC(conv, np.diag(diag), tag="u")


# ---------- standard bases -------------------------------------------------

@lru_cache(maxsize=None)
def sym2_basis_labels(n: int) -> tuple[tuple[int, int], ...]:
    """Index pairs (a, b), a <= b, 1-based, ordering the sym^2 V^{1,0} basis."""
    return tuple((a, b) for a in range(1, n + 1) for b in range(a, n + 1))


def sym2_basis_endos(conv: FrameConvention) -> list[EndoC]:
    """Unit-norm basis of sym^2 V^{1,0}: Z_a(.)Z_b/sqrt2 (a<b) and Z_a(x)Z_a."""
    out = []
    for a, b in sym2_basis_labels(conv.n):
        hat = np.zeros((conv.n, conv.n), dtype=complex)
        if a == b:
            hat[a - 1, a - 1] = 1.0
        else:
            hat[a - 1, b - 1] = hat[b - 1, a - 1] = 1.0 / math.sqrt(2.0)
        out.append(EndoC.from_sym_hat(conv, hat))
    return out


def sym2_element(conv: FrameConvention, coords: np.ndarray) -> EndoC:
    """sym^2 V^{1,0} element from coordinates in the unit basis."""
    hat = np.zeros((conv.n, conv.n), dtype=complex)
    for (a, b), c in zip(sym2_basis_labels(conv.n), coords):
        if a == b:
            hat[a - 1, a - 1] += c
        else:
            hat[a - 1, b - 1] += c / math.sqrt(2.0)
            hat[b - 1, a - 1] += c / math.sqrt(2.0)
    return EndoC.from_sym_hat(conv, hat)


def sym2_coords(conv: FrameConvention, endo: EndoC) -> np.ndarray:
    """Coordinates of a sym^2 V^{1,0} element in the unit basis."""
    hat = endo.hat
    return np.array([hat[a - 1, a - 1] if a == b else math.sqrt(2.0) * hat[a - 1, b - 1]
                     for a, b in sym2_basis_labels(conv.n)], dtype=complex)


@lru_cache(maxsize=None)
def lambda11_basis_labels(n: int) -> tuple[tuple[int, int], ...]:
    """Index pairs (a, b), 1-based, ordering the Lambda^{1,1} basis Z_a ^ conj(Z_b)/sqrt2."""
    return tuple((a, b) for a in range(1, n + 1) for b in range(1, n + 1))


def lambda11_element(conv: FrameConvention, coords: np.ndarray, scale: float = 1.0) -> EndoC:
    """Lambda^{1,1} element sum_nu coords_nu Z_a ^ conj(Z_b)/sqrt2, times scale."""
    c = np.zeros((conv.n, conv.n), dtype=complex)
    for (a, b), x in zip(lambda11_basis_labels(conv.n), coords):
        c[a - 1, b - 1] += x / math.sqrt(2.0) * scale
    return EndoC.from_lambda11(conv, c)


def lambda2_10_basis_endos(conv: FrameConvention) -> list[EndoC]:
    """Unit-norm basis Z_a ^ Z_b / sqrt2 (a < b) of Lambda^2 V^{1,0} as endomorphisms."""
    out = []
    for a in range(1, conv.n + 1):
        for b in range(a + 1, conv.n + 1):
            m = np.zeros((conv.dim, conv.dim), dtype=complex)
            s = 1.0 / math.sqrt(2.0)
            # (Z_a ^ Z_b) conj(Z_c) = delta_ac Z_b - delta_bc Z_a
            m[b - 1, conv.n + a - 1] = s
            m[a - 1, conv.n + b - 1] = -s
            out.append(EndoC(conv, m, tag="lambda2_10"))
    return out


def u_basis_endos(conv: FrameConvention) -> list[EndoC]:
    """Unitary basis of u(n) in the half-trace convention: {Z_a ^ conj(Z_b)}."""
    out = []
    for a, b in lambda11_basis_labels(conv.n):
        c = np.zeros((conv.n, conv.n), dtype=complex)
        c[a - 1, b - 1] = 1.0
        out.append(EndoC.from_lambda11(conv, c, tag="u"))
    return out


def su_basis_endos(conv: FrameConvention) -> list[EndoC]:
    """Unitary basis of su(n) (half-trace convention): off-diagonal Z_a ^ conj(Z_b)
    plus n-1 traceless diagonal combinations."""
    n = conv.n
    out = []
    for a, b in lambda11_basis_labels(n):
        if a != b:
            c = np.zeros((n, n), dtype=complex)
            c[a - 1, b - 1] = 1.0
            out.append(EndoC.from_lambda11(conv, c, tag="su"))
    for k in range(1, n):
        c = np.zeros((n, n), dtype=complex)
        w = 1.0 / math.sqrt(k * (k + 1))
        for a in range(k):
            c[a, a] = w
        c[k, k] = -k * w
        out.append(EndoC.from_lambda11(conv, c, tag="su"))
    return out


# ---------------------------------------------------------------------------
# form operations
# ---------------------------------------------------------------------------

def evaluate_form(phi: FormPQ | RealForm, args: Sequence[np.ndarray]) -> complex:
    """Alternating multilinear evaluation at frame vectors (Z-frame coordinates)."""
    dense = phi.to_dense()
    if len(args) != dense.ndim:
        raise FrameError(f"expected {dense.ndim} arguments, got {len(args)}")
    out = dense
    for vec in args:
        out = np.tensordot(np.asarray(vec, dtype=complex), out, axes=(0, 0))
    return complex(out)


def endo_act(L: EndoC, phi: FormPQ) -> dict[tuple[int, int], FormPQ]:
    """Derivation action of L on phi, split into bidegree components."""
    if L.convention.n != phi.convention.n:
        raise FrameError("endomorphism and form live on different dimensions")
    return split_bidegrees(L.act_dense(phi.to_dense()), phi.convention)


def endo_act_single(L: EndoC, phi: FormPQ, p: int, q: int) -> FormPQ:
    """Derivation action when the output bidegree is known (e.g. S in sym^2 V^{1,0})."""
    return FormPQ.from_dense(phi.convention, p, q, L.act_dense(phi.to_dense()))


def lefschetz_adjoint(phi: FormPQ) -> FormPQ:
    """Formal adjoint of the Lefschetz map,
    (Lambda phi)(v_1..v_{k-2}) = -i k(k-1) sum_a phi(Z_a, conj Z_a, v_1, ..)."""
    conv = phi.convention
    k = phi.degree
    if phi.p < 1 or phi.q < 1:
        return FormPQ.zero(conv, max(phi.p - 1, 0), max(phi.q - 1, 0))
    dense = phi.to_dense()
    idx = np.arange(conv.n)
    out = -1.0j * k * (k - 1) * dense[idx, idx + conv.n].sum(axis=0)
    return FormPQ.from_dense(conv, phi.p - 1, phi.q - 1, out)


@lru_cache(maxsize=None)
def _lefschetz_matrix(n: int, p: int, q: int) -> np.ndarray:
    """Matrix of the adjoint Lefschetz map on generator coefficients."""
    conv = FrameConvention(n)
    src = multi_indices(n, p, q)
    dst = multi_indices(n, p - 1, q - 1)
    dst_pos = {k: i for i, k in enumerate(dst)}
    mat = np.zeros((len(dst), len(src)), dtype=complex)
    for col, key in enumerate(src):
        img = lefschetz_adjoint(FormPQ(conv, p, q, {key: 1.0}))
        for k2, v in img.coeffs.items():
            mat[dst_pos[k2], col] = v
    return mat


@lru_cache(maxsize=None)
def _primitive_projector(n: int, p: int, q: int) -> np.ndarray:
    """Orthogonal projector onto ker(Lambda) in generator coordinates."""
    dim = len(multi_indices(n, p, q))
    if p < 1 or q < 1:
        return np.eye(dim)
    lam = _lefschetz_matrix(n, p, q)
    return np.eye(dim) - np.linalg.pinv(lam, rcond=1e-12) @ lam


def project_primitive(phi: FormPQ) -> FormPQ:
    """Orthogonal projection onto the primitive (ker Lambda) subspace."""
    if phi.degree > phi.convention.n:
        raise FrameError("primitive projection requires p + q <= n")
    proj = _primitive_projector(phi.convention.n, phi.p, phi.q)
    return FormPQ.from_coefficient_vector(
        phi.convention, phi.p, phi.q, proj @ phi.coefficient_vector())
