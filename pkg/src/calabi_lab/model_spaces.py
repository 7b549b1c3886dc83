"""Curvature tensors of the reference geometries.

Constant holomorphic sectional curvature comes straight from the operator
correspondence (Calabi matrix = c * Id).  The complex quadric is built as the
rank-2 symmetric space SO(n+2)/(SO(2) x SO(n)): curvature of the isotropy
representation, R(X, Y, Z, W) = <[X, Y], [Z, W]> on the tangent block, with
the invariant complex structure rotating the SO(2) factor, normalized so the
largest Calabi eigenvalue is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import (
    AlgebraicCurvatureTensor,
    calabi_from_tensor,
    ricci,
    tensor_from_calabi,
    validate_tensor,
)
from .frames import FrameConvention, sym2_basis_labels
from .spectral import PositivityReport, Spectrum, k_test

__all__ = [
    "SpaceDescriptor",
    "build",
    "chsc",
    "flat_torus",
    "product",
    "quadric",
    "quadric_spectrum",
    "random_kaehler",
    "random_kaehler_einstein",
    "EinsteinProjectionError",
]


class EinsteinProjectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpaceDescriptor:
    """Recipe for a model curvature tensor.

    variant: one of chsc, quadric, product, flat, random, random_ke.
    ``c`` scales chsc and quadric; ``seed`` feeds the random variants;
    ``factors`` holds the product descriptors.
    """

    variant: str
    n: int = 0
    c: float = 1.0
    seed: int = 0
    factors: tuple["SpaceDescriptor", ...] = ()

    @property
    def complex_dim(self) -> int:
        if self.variant == "product":
            return sum(f.complex_dim for f in self.factors)
        return self.n

    def validate(self) -> None:
        known = {"chsc", "quadric", "flat", "random", "random_ke", "product"}
        if self.variant not in known:
            raise ValueError(f"unknown space variant {self.variant!r}")
        if self.variant == "product":
            if len(self.factors) < 1:
                raise ValueError("product needs at least one factor")
            for f in self.factors:
                f.validate()
        elif self.n < 1:
            raise ValueError(f"{self.variant} needs n >= 1")
        if self.variant == "quadric" and self.n < 2:
            raise ValueError("quadric needs n >= 2")


def build(desc: SpaceDescriptor) -> AlgebraicCurvatureTensor:
    desc.validate()
    if desc.variant == "chsc":
        return chsc(desc.n, desc.c)
    if desc.variant == "quadric":
        return quadric(desc.n, desc.c)
    if desc.variant == "flat":
        return flat_torus(desc.n)
    if desc.variant == "random":
        return random_kaehler(desc.n, desc.seed)
    if desc.variant == "random_ke":
        return random_kaehler_einstein(desc.n, desc.seed)
    return product([build(f) for f in desc.factors])


def chsc(n: int, c: float = 1.0) -> AlgebraicCurvatureTensor:
    """Constant holomorphic sectional curvature c (Calabi operator = c Id)."""
    conv = FrameConvention(n)
    m = n * (n + 1) // 2
    return tensor_from_calabi(c * np.eye(m), conv)


def flat_torus(n: int) -> AlgebraicCurvatureTensor:
    conv = FrameConvention(n)
    return validate_tensor(np.zeros((conv.dim,) * 4), conv)


def product(factors: list[AlgebraicCurvatureTensor]) -> AlgebraicCurvatureTensor:
    """Direct-sum curvature tensor on the product, mixed components zero."""
    dims = [t.convention.n for t in factors]
    n = sum(dims)
    conv = FrameConvention(n)
    r = np.zeros((conv.dim,) * 4)
    offset = 0
    for t, nf in zip(factors, dims):
        gmap = np.concatenate([
            offset + np.arange(nf),
            n + offset + np.arange(nf),
        ])
        r[np.ix_(gmap, gmap, gmap, gmap)] += t.components
        offset += nf
    return validate_tensor(r, conv)


# ---------------------------------------------------------------------------
# the complex quadric
# ---------------------------------------------------------------------------

def _quadric_raw(n: int) -> AlgebraicCurvatureTensor:
    conv = FrameConvention(n)
    size = n + 2

    def gen(i: int, alpha: int) -> np.ndarray:
        x = np.zeros((size, size))
        x[i, alpha] = 1.0
        x[alpha, i] = -1.0
        return x

    # e_a = X_{0, a+2}, J e_a = e_{a+n} = X_{1, a+2}
    basis = [gen(0, a + 2) for a in range(n)] + [gen(1, a + 2) for a in range(n)]
    brackets = [[bi @ bj - bj @ bi for bj in basis] for bi in basis]

    def inner(x: np.ndarray, y: np.ndarray) -> float:
        return -0.5 * float(np.trace(x @ y))

    d = conv.dim
    r = np.zeros((d,) * 4)
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                for l in range(k + 1, d):
                    val = inner(brackets[i][j], brackets[k][l])
                    r[i, j, k, l] = val
                    r[j, i, k, l] = -val
                    r[i, j, l, k] = -val
                    r[j, i, l, k] = val
    return validate_tensor(r, conv)


def quadric(n: int, scale: float = 1.0) -> AlgebraicCurvatureTensor:
    """Symmetric-space quadric, normalized by its largest Calabi eigenvalue
    and multiplied by scale (scale=-1 gives the sign-flipped dual tensor)."""
    raw = _quadric_raw(n)
    top = float(np.max(calabi_from_tensor(raw).spectrum().eigenvalues))
    return raw.scaled(scale / top)


def quadric_spectrum(n: int, scale: float = 1.0) -> tuple[Spectrum, PositivityReport]:
    """Calabi spectrum of the quadric and its fractional test at k = n/2."""
    spec = calabi_from_tensor(quadric(n, scale)).spectrum()
    return spec, k_test(spec, n / 2.0)


# ---------------------------------------------------------------------------
# seeded random tensors
# ---------------------------------------------------------------------------

def _rng(seed: int, *stream) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def random_kaehler(n: int, seed: int) -> AlgebraicCurvatureTensor:
    """Kaehler tensor from a GUE-style random Hermitian Calabi matrix."""
    conv = FrameConvention(n)
    m = n * (n + 1) // 2
    rng = _rng(seed, n, 0)
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return tensor_from_calabi((a + a.conj().T) / 2.0, conv)


def _ricci_traceless_block(t: AlgebraicCurvatureTensor) -> np.ndarray:
    """Traceless Hermitian h_ab = Ric(Z_a, conj Z_b) - (scal/2n) delta_ab."""
    conv = t.convention
    ric = ricci(t)
    p = conv.frame_change
    ric_z = p.T @ ric.ricci @ p
    h = ric_z[: conv.n, conv.n:]
    return h - (np.trace(h) / conv.n) * np.eye(conv.n)


def _calabi_matrix_from_hermitian(h: np.ndarray) -> np.ndarray:
    """Matrix (unit sym^2 basis) of the operator S -> h Shat + Shat h^T."""
    n = h.shape[0]
    labels = sym2_basis_labels(n)
    hats = []
    for a, b in labels:
        hat = np.zeros((n, n), dtype=complex)
        if a == b:
            hat[a - 1, a - 1] = 1.0
        else:
            hat[a - 1, b - 1] = hat[b - 1, a - 1] = 1.0 / math.sqrt(2.0)
        hats.append(hat)
    m = len(labels)
    out = np.zeros((m, m), dtype=complex)
    for nu in range(m):
        img = h @ hats[nu] + hats[nu] @ h.T
        for mu in range(m):
            out[mu, nu] = np.sum(img * hats[mu].conj())
    return out


def random_kaehler_einstein(n: int, seed: int, tol: float = 1e-10,
                            max_iter: int = 200) -> AlgebraicCurvatureTensor:
    """Random Kaehler--Einstein curvature tensor by projecting the traceless
    Ricci part out through the equivariant family h -> (h Shat + Shat h^T)."""
    t = random_kaehler(n, seed)
    conv = t.convention
    for _ in range(max_iter):
        h = _ricci_traceless_block(t)
        resid = float(np.max(np.abs(h)))
        if resid <= tol:
            break
        # the Ricci block is a Hermitian form; the derivation action needs the
        # endomorphism convention, which is its conjugate
        corr = tensor_from_calabi(_calabi_matrix_from_hermitian(h.conj()), conv)
        hc = _ricci_traceless_block(corr)
        alpha = float(np.real(np.sum(hc * h.conj()))) / float(np.sum(np.abs(h) ** 2))
        if abs(alpha) < 1e-12:
            raise EinsteinProjectionError("equivariant correction is degenerate")
        t = validate_tensor(t.components - corr.components / alpha, conv,
                            require_kaehler=True)
    else:
        raise EinsteinProjectionError(
            f"traceless Ricci residual {resid:.3e} after {max_iter} iterations")
    ric = ricci(t)
    if not ric.is_einstein:
        raise EinsteinProjectionError("projection finished but Einstein check failed")
    return t
