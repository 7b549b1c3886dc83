"""Hermitian eigendecomposition, fractional k-positivity tests, and the
weight principle for weighted eigenvalue sums.

The eigensolver is a self-contained cyclic Jacobi iteration for Hermitian
matrices (off-diagonal norm threshold 1e-13 * ||H||_F, cap 100 sweeps), with
a deterministic ordering: ascending eigenvalue, columns phase-fixed so the
largest-magnitude entry is real positive, ties broken lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Spectrum",
    "PositivityReport",
    "WeightBound",
    "NotHermitian",
    "ConvergenceFailure",
    "eigensystem",
    "k_test",
    "weight_principle",
    "takagi",
]

HERMITIAN_TOL = 1e-10
OFFDIAG_FACTOR = 1e-13
MAX_SWEEPS = 100


class NotHermitian(ValueError):
    pass


class ConvergenceFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Sorted real eigenvalues (ascending) with a unitary eigenvector matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str = ""

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    def scaled(self, c: float) -> "Spectrum":
        vals = self.eigenvalues * c
        vecs = self.eigenvectors
        if c < 0:
            vals, vecs = vals[::-1].copy(), vecs[:, ::-1].copy()
        return Spectrum(vals, vecs, self.source)


@dataclass(frozen=True)
class PositivityReport:
    """Fractional-k partial sum test of a sorted spectrum."""

    k: float
    partial_sum: float
    nonneg: bool
    positive: bool
    kappa_bound: float | None = None


@dataclass(frozen=True)
class WeightBound:
    """Outcome of the weight principle."""

    certified: bool
    lower_bound: float | None
    upsilon: float
    partial_sum: float


# ---------------------------------------------------------------------------
# cyclic Jacobi for Hermitian matrices
# ---------------------------------------------------------------------------

def eigensystem(H: np.ndarray, source: str = "", max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.conj().T)) > HERMITIAN_TOL * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")

    m = H.shape[0]
    A = 0.5 * (H + H.conj().T)
    V = np.eye(m, dtype=complex)
    norm = np.linalg.norm(A)
    threshold = OFFDIAG_FACTOR * max(norm, 1e-300)

    for _ in range(max_sweeps):
        if _offdiag_norm(A) <= threshold:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) <= threshold / max(m, 1):
                    continue
                _rotate(A, V, p, q)
    else:
        if _offdiag_norm(A) > threshold:
            raise ConvergenceFailure(
                f"Jacobi did not reach off-diagonal norm {threshold:g} in {max_sweeps} sweeps")

    vals = np.real(np.diag(A)).copy()
    vecs = _phase_fix(V)
    order = _deterministic_order(vals, vecs)
    return Spectrum(vals[order], np.ascontiguousarray(vecs[:, order]), source)


def _offdiag_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing A[p, q] in place.

    Factoring the phase of A[p, q] into diag(1, conj(phase)) reduces the
    2x2 block to the real symmetric [[a_pp, |a_pq|], [|a_pq|, a_qq]]; the
    small-angle root of t^2 - 2 tau t - 1 = 0 with tau = (a_qq - a_pp)/2|a_pq|
    then zeroes the pivot.
    """
    apq = A[p, q]
    mag = abs(apq)
    phase = apq / mag
    tau = (A[q, q].real - A[p, p].real) / (2.0 * mag)
    if tau == 0.0:
        t = 1.0
    else:
        # small-magnitude root of t^2 - 2 tau t - 1 = 0, cancellation-free form
        t = -math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c

    # U = [[c, -s], [conj(phase) s, conj(phase) c]] acting on columns (p, q)
    colp, colq = A[:, p].copy(), A[:, q].copy()
    A[:, p] = c * colp + np.conj(phase) * s * colq
    A[:, q] = -s * colp + np.conj(phase) * c * colq
    rowp, rowq = A[p, :].copy(), A[q, :].copy()
    A[p, :] = c * rowp + phase * s * rowq
    A[q, :] = -s * rowp + phase * c * rowq
    A[p, q] = 0.0
    A[q, p] = 0.0
    A[p, p] = A[p, p].real
    A[q, q] = A[q, q].real

    colp, colq = V[:, p].copy(), V[:, q].copy()
    V[:, p] = c * colp + np.conj(phase) * s * colq
    V[:, q] = -s * colp + np.conj(phase) * c * colq


def _phase_fix(V: np.ndarray) -> np.ndarray:
    out = V.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        if abs(col[i]) > 0:
            out[:, j] = col * (np.conj(col[i]) / abs(col[i]))
    return out


def _deterministic_order(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    # exact eigenvalue is the primary key (so the output is truly ascending);
    # bitwise ties are broken lexicographically by the phase-fixed vectors
    keys = []
    for r in range(vecs.shape[0] - 1, -1, -1):
        keys.append(np.round(vecs[r, :].imag, 9))
        keys.append(np.round(vecs[r, :].real, 9))
    keys.append(vals)
    return np.lexsort(keys)


# ---------------------------------------------------------------------------
# fractional k tests and the weight principle
# ---------------------------------------------------------------------------

def _sorted_eigenvalues(s: Spectrum | Sequence[float] | np.ndarray) -> np.ndarray:
    vals = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalues must be sorted ascending")
    return vals


def k_test(s: Spectrum | Sequence[float], k: float) -> PositivityReport:
    """Partial sum lambda_1 + .. + lambda_floor(k) + (k - floor(k)) lambda_{floor(k)+1}.

    k may be fractional; at the boundary floor(k) == m the fractional term is 0.
    """
    vals = _sorted_eigenvalues(s)
    m = len(vals)
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if k > m + 1e-12:
        raise ValueError(f"k = {k} exceeds the number of eigenvalues {m}")
    k = min(float(k), float(m))
    whole = int(math.floor(k))
    frac = k - whole
    total = float(np.sum(vals[:whole]))
    if whole < m and frac > 0:
        total += frac * float(vals[whole])
    return PositivityReport(
        k=k,
        partial_sum=total,
        nonneg=total >= 0.0,
        positive=total > 0.0,
        kappa_bound=total / k,
    )


def weight_principle(s: Spectrum | Sequence[float], weights: Sequence[float],
                     total_weight: float, max_weight: float,
                     kappa: float = 0.0, tol: float = 1e-9) -> WeightBound:
    """Certified lower bound on sum_nu w_nu lambda_nu.

    Requires 0 <= w_nu <= max_weight, sum w_nu = total_weight, kappa <= 0 and
    Upsilon := total_weight / max_weight <= m.  If the spectrum's fractional
    partial sum at Upsilon is >= kappa * Upsilon, the weighted sum is
    certified to be >= kappa * total_weight.
    """
    vals = _sorted_eigenvalues(s)
    w = np.asarray(weights, dtype=float)
    if len(w) != len(vals):
        raise ValueError("one weight per eigenvalue required")
    if kappa > 0:
        raise ValueError("kappa must be <= 0")
    scale = max(max_weight, 1.0)
    if np.any(w < -tol * scale) or np.any(w > max_weight + tol * scale):
        raise ValueError("weights must lie in [0, max_weight]")
    if abs(float(np.sum(w)) - total_weight) > tol * max(total_weight, 1.0):
        raise ValueError("weights must sum to total_weight")
    if max_weight <= 0:
        raise ValueError("max_weight must be positive")
    upsilon = total_weight / max_weight
    if upsilon > len(vals) + 1e-9:
        raise ValueError("total_weight / max_weight exceeds the spectrum size")
    report = k_test(vals, min(upsilon, float(len(vals))))
    if report.partial_sum >= kappa * upsilon:
        return WeightBound(True, kappa * total_weight, upsilon, report.partial_sum)
    return WeightBound(False, None, upsilon, report.partial_sum)


# ---------------------------------------------------------------------------
# Takagi factorization of complex symmetric matrices
# ---------------------------------------------------------------------------

def takagi(A: np.ndarray, tol: float = 1e-11) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization A = W diag(rho) W^T, rho >= 0 descending, W unitary.

    Reduces to the real symmetric eigenproblem of [[X, Y], [Y, -X]] where
    A = X + iY: an eigenpair (u; v) with eigenvalue rho gives the Takagi
    vector w = u + iv with A conj(w) = rho w.
    """
    A = np.asarray(A, dtype=complex)
    m = A.shape[0]
    if A.shape != (m, m):
        raise ValueError("takagi expects a square matrix")
    scale = max(1.0, float(np.max(np.abs(A))) if m else 1.0)
    if np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise ValueError("takagi expects a complex symmetric matrix")
    X, Y = A.real, A.imag
    B = np.block([[X, Y], [Y, -X]])
    spec = eigensystem(B, source="takagi")
    vals = spec.eigenvalues[::-1]
    vecs = spec.eigenvectors.real[:, ::-1]

    # the doubled spectrum carries each singular value as a +/- pair; walk the
    # candidates in descending eigenvalue order and keep a complex-orthonormal
    # selection (near-zero pairs produce complex-parallel duplicates w, ~iw)
    cols: list[np.ndarray] = []
    rhos: list[float] = []
    for i in range(2 * m):
        if len(cols) == m:
            break
        w = vecs[:m, i] + 1.0j * vecs[m:, i]
        for c in cols:
            w = w - c * np.vdot(c, w)
        nw = float(np.linalg.norm(w))
        if nw > 1e-6:
            cols.append(w / nw)
            rhos.append(max(float(vals[i]), 0.0))
    for basis_col in range(m):
        # fill any remaining kernel directions from the standard basis
        if len(cols) == m:
            break
        w = np.zeros(m, dtype=complex)
        w[basis_col] = 1.0
        for c in cols:
            w = w - c * np.vdot(c, w)
        nw = float(np.linalg.norm(w))
        if nw > 1e-6:
            cols.append(w / nw)
            rhos.append(0.0)
    W = np.column_stack(cols) if cols else np.zeros((m, 0))
    return np.array(rhos), W
