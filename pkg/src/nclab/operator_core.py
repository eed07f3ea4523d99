"""Dense complex operators, antilinear maps and residual bookkeeping.

Every linear operator in the package is a square ``complex128`` numpy array.
An antilinear isometry ``J`` is stored through its unitary part ``U`` and
acts as ``v -> U @ conj(v)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TAU = 1e-10


class OperatorError(ValueError):
    """Raised on malformed operator data (shape, finiteness, dimension)."""


class SpectrumError(ArithmeticError):
    """Raised when the eigensolver fails to converge."""


def as_matrix(A, name="matrix", dim=None):
    """Validate and coerce ``A`` to a square finite complex matrix."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise OperatorError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise OperatorError(f"{name} has non-finite entries")
    if dim is not None and M.shape[0] != dim:
        raise OperatorError(f"{name} has dimension {M.shape[0]}, expected {dim}")
    return M


def _check_same(X, Y):
    if X.shape != Y.shape:
        raise OperatorError(f"dimension mismatch: {X.shape} vs {Y.shape}")


@dataclass(frozen=True)
class Tolerance:
    """Relative residual bound used by every checker."""

    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if not (self.tau > 0 and np.isfinite(self.tau)):
            raise ValueError(f"tolerance must be positive and finite, got {self.tau}")

    def ok(self, residual):
        return residual <= self.tau


def as_tolerance(tol):
    if tol is None:
        return Tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def rel_residual(X, Y):
    """Return ``||X - Y||_F / (1 + ||X||_F + ||Y||_F)``."""
    X = np.asarray(X, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    _check_same(X, Y)
    diff = np.linalg.norm(X - Y)
    if diff == 0.0:
        return 0.0
    return float(diff / (1.0 + np.linalg.norm(X) + np.linalg.norm(Y)))


def opnorm(A):
    """Operator (spectral) norm: the largest singular value."""
    A = np.asarray(A, dtype=np.complex128)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def dagger(A):
    return np.conj(A).T


def is_unitary(U, tau=DEFAULT_TAU):
    return rel_residual(U @ dagger(U), np.eye(U.shape[0])) <= tau


def is_hermitian(A, tau=DEFAULT_TAU):
    return rel_residual(A, dagger(A)) <= tau


def kron(A, B):
    """Kronecker product of two square complex matrices."""
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def spectrum(A):
    """Eigenvalues of ``A`` with algebraic multiplicity.

    Hermitian input is routed through ``eigvalsh`` so the returned values are
    exactly real. Convergence failures surface as :class:`SpectrumError`.
    """
    A = as_matrix(A)
    try:
        if is_hermitian(A, 1e-14):
            return np.linalg.eigvalsh((A + dagger(A)) / 2).astype(np.complex128)
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver did not converge: {exc}") from exc


@dataclass(frozen=True, eq=False)
class AntilinearOp:
    """Antilinear isometry ``J v = U conj(v)`` with ``J^2 = epsilon``.

    Parameters
    ----------
    unitary_part : array_like
        The unitary matrix ``U``.
    epsilon : int
        Sign with ``J^2 = epsilon * id``; equivalently ``U conj(U) = epsilon I``.

    The constructor only enforces shape and sign; unitarity and the square
    relation are reported by :meth:`isometry_residual` and
    :meth:`square_residual` so that checkers can flag them as verdicts.
    """

    unitary_part: np.ndarray
    epsilon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "unitary_part", as_matrix(self.unitary_part, "J.unitary_part"))
        if self.epsilon not in (1, -1):
            raise OperatorError(f"epsilon must be +1 or -1, got {self.epsilon}")

    @property
    def U(self):
        return self.unitary_part

    @property
    def dim(self):
        return self.unitary_part.shape[0]

    def isometry_residual(self):
        return rel_residual(self.U @ dagger(self.U), np.eye(self.dim))

    def square_residual(self):
        return rel_residual(self.U @ np.conj(self.U), self.epsilon * np.eye(self.dim))

    def inverse(self):
        # J^{-1} = epsilon J for an antiunitary with J^2 = epsilon
        return AntilinearOp(self.epsilon * self.U, self.epsilon)

    def __call__(self, v):
        return antilinear_apply(self, v)

    def conjugate(self, A):
        return antilinear_conjugate(self, A)

    def left_compose(self, A):
        """Unitary part of the antilinear map ``A J`` (A linear)."""
        return as_matrix(A, dim=self.dim) @ self.U

    def right_compose(self, A):
        """Unitary part of the antilinear map ``J A`` (A linear)."""
        return self.U @ np.conj(as_matrix(A, dim=self.dim))

    def transform(self, W):
        """The antilinear map ``W J W^{-1}`` for a unitary ``W``: ``U -> W U W^T``."""
        W = as_matrix(W, "W", self.dim)
        return AntilinearOp(W @ self.U @ W.T, self.epsilon)

    def __eq__(self, other):
        if not isinstance(other, AntilinearOp):
            return NotImplemented
        return self.epsilon == other.epsilon and np.array_equal(self.U, other.U)

    __hash__ = None


def antilinear_apply(J, v):
    """Apply ``J`` to a vector: ``U conj(v)``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] != J.dim:
        raise OperatorError(f"vector of shape {v.shape} does not match dimension {J.dim}")
    return J.U @ np.conj(v)


def antilinear_conjugate(J, A):
    """``Ad_J(A) = J A J^{-1} = U conj(A) U*``."""
    A = as_matrix(A, "A")
    if A.shape[0] != J.dim:
        raise OperatorError(f"operator of dimension {A.shape[0]} does not match J of dimension {J.dim}")
    return J.U @ np.conj(A) @ dagger(J.U)


def random_unitary(n, rng):
    """Haar-distributed unitary via QR with phase correction."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(n, rng):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + dagger(Z)) / 2
