"""Dense Hermitian linear algebra and superoperator helpers.

All superoperators act on column-stacked density matrices,
``vec(X)[i + j*d] = X[i, j]``, so that ``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] < 1:
        raise ValueError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def hermiticity_defect(M):
    M = np.asarray(M)
    return float(np.linalg.norm(M - M.conj().T))


def check_hermitian(M, tol=HERMITIAN_TOL, name="matrix"):
    M = _as_square(M, name)
    defect = hermiticity_defect(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    if defect > tol * scale:
        raise NotHermitianError(
            f"{name} is not Hermitian: ||M - M^dag||_F = {defect:.3e}")
    return M


def hermitian_eig(M, tol=HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns
    are the matching eigenvectors.
    """
    M = check_hermitian(M, tol)
    M = 0.5 * (M + M.conj().T)
    w, V = np.linalg.eigh(M)
    return w, V


def psd_sqrt(R, floor=PSD_FLOOR):
    """Principal square root of a positive semi-definite matrix.

    Eigenvalues in ``[floor, 0)`` are treated as round-off and clamped to 0;
    anything below ``floor`` raises :class:`NotPSDError`.
    """
    w, V = hermitian_eig(R)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < floor * scale:
        raise NotPSDError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    s = np.sqrt(np.clip(w, 0.0, None))
    S = (V * s) @ V.conj().T
    return 0.5 * (S + S.conj().T)


def matrix_exp(M):
    # Pade scaling-and-squaring; deterministic for a fixed input.
    M = _as_square(M)
    return scipy.linalg.expm(M)


def vec(X):
    return np.asarray(X, dtype=complex).reshape(-1, order="F")


def unvec(v, d=None):
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorised square matrix")
    return v.reshape(d, d, order="F")


def spre(A):
    """Superoperator of X -> A X."""
    A = np.asarray(A, dtype=complex)
    return np.kron(np.eye(A.shape[0]), A)


def spost(B):
    """Superoperator of X -> X B."""
    B = np.asarray(B, dtype=complex)
    return np.kron(B.T, np.eye(B.shape[0]))


def commutator_super(H):
    """Superoperator of rho -> -i[H, rho]."""
    return -1j * (spre(H) - spost(H))


def dissipator_super(A, B):
    """Superoperator of ``rho -> A rho B^dag - 1/2 {B^dag A, rho}``."""
    A = _as_square(A, "A")
    B = _as_square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    d = A.shape[0]
    BdA = B.conj().T @ A
    eye = np.eye(d)
    return np.kron(B.conj(), A) - 0.5 * (np.kron(eye, BdA) + np.kron(BdA.T, eye))


def apply_super(S, rho):
    rho = np.asarray(rho, dtype=complex)
    return unvec(np.asarray(S) @ vec(rho), rho.shape[0])


def super_dim(S):
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"superoperator must be square, got {S.shape}")
    d = int(round(np.sqrt(S.shape[0])))
    if d * d != S.shape[0]:
        raise ValueError(f"superoperator size {S.shape[0]} is not a perfect square")
    return d


def trace_defect_super(S):
    """Norm of vec(I)^dag S; zero for a trace-annihilating generator."""
    d = super_dim(S)
    return float(np.linalg.norm(vec(np.eye(d)).conj() @ np.asarray(S)))


def choi_of(S):
    """Choi matrix ``sum_ij map(|i><j|) kron |i><j|`` (output factor first)."""
    S = np.asarray(S, dtype=complex)
    d = super_dim(S)
    # S[a + b d, i + j d] = map(|i><j|)[a, b]; reshape in Fortran order
    # gives S4[a, b, i, j].
    S4 = S.reshape(d, d, d, d, order="F")
    J = S4.transpose(0, 2, 1, 3).reshape(d * d, d * d)
    return J


def partial_trace_output(J, d):
    J4 = np.asarray(J).reshape(d, d, d, d)
    return np.einsum("aiaj->ij", J4)


@dataclass(frozen=True)
class CPTPReport:
    is_cptp: bool
    min_eigenvalue: float
    trace_defect: float
    hermiticity_defect: float

    def __bool__(self):
        return self.is_cptp


def is_cptp(S, tol=1e-8):
    """Check complete positivity and trace preservation through the Choi matrix."""
    d = super_dim(S)
    J = choi_of(S)
    herm = hermiticity_defect(J)
    Jh = 0.5 * (J + J.conj().T)
    min_eig = float(np.linalg.eigvalsh(Jh)[0])
    defect = float(np.linalg.norm(partial_trace_output(J, d) - np.eye(d)))
    ok = min_eig >= -tol and defect <= tol and herm <= max(tol, 1e-12)
    return CPTPReport(ok, min_eig, defect, herm)
