from __future__ import annotations

import logging
from typing import List

import numpy as np
import numpy.typing as npt

from esdsim.errors import DomainError, EigenvalueConvergenceError, NotHermitianError


logger = logging.getLogger(__name__)


# Mat2 / Mat4 are plain complex128 arrays of shape (2, 2) / (4, 4), row-major.
Mat2 = npt.NDArray[np.complex128]
Mat4 = npt.NDArray[np.complex128]

ALGEBRA_TOL = 1e-12
EIG_TOL = 1e-9

I2: Mat2 = np.eye(2, dtype=np.complex128)
I4: Mat4 = np.eye(4, dtype=np.complex128)
SIGMA_X: Mat2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y: Mat2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z: Mat2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PROJ_0: Mat2 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
PROJ_1: Mat2 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
LOWER_01: Mat2 = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|

# Qubit exchange in the |00>, |01>, |10>, |11> ordering.
SWAP: Mat4 = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=np.complex128,
)


def _as_square(m: npt.ArrayLike, dim: int) -> npt.NDArray[np.complex128]:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.shape != (dim, dim):
        raise DomainError(f"Expected a {dim}x{dim} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"Matrix entries must be finite: {arr!r}")
    return arr


def as_mat2(m: npt.ArrayLike) -> Mat2:
    return _as_square(m, 2)


def as_mat4(m: npt.ArrayLike) -> Mat4:
    return _as_square(m, 4)


def dagger(m: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    return m.conj().T


def hermiticity_deviation(m: npt.NDArray[np.complex128]) -> float:
    """Largest entry of |m - m^dagger|."""
    return float(np.max(np.abs(m - dagger(m))))


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> Mat4:
    """Kronecker product of two 2x2 matrices; block (i, j) is a[i][j] * b."""
    return np.kron(as_mat2(a), as_mat2(b))


def eig_general(m: npt.ArrayLike, tol: float = EIG_TOL) -> List[complex]:
    """Eigenvalues of a general (non-Hermitian) 4x4 matrix, in no particular order.

    LAPACK reduces to Hessenberg form and runs shifted QR. Each eigenpair is
    checked against ``||m v - lambda v|| <= tol * ||m||``; a failed check or a
    solver that does not converge raises EigenvalueConvergenceError.
    """
    mat = as_mat4(m)
    try:
        values, vectors = np.linalg.eig(mat)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueConvergenceError(f"Eigenvalue iteration did not converge: {exc}") from exc

    scale = float(np.linalg.norm(mat))
    for k in range(4):
        vec = vectors[:, k]
        residual = float(np.linalg.norm(mat @ vec - values[k] * vec))
        if residual > tol * scale:
            raise EigenvalueConvergenceError(
                f"Eigenpair {k} residual {residual:.3e} exceeds tol*|m| = {tol * scale:.3e}"
            )
    logger.debug("eig_general: %s", values)
    return [complex(v) for v in values]


def eig_hermitian(m: npt.ArrayLike, tol: float = ALGEBRA_TOL) -> List[float]:
    """Real spectrum of a Hermitian 4x4 matrix, ascending."""
    mat = as_mat4(m)
    deviation = hermiticity_deviation(mat)
    if deviation > tol:
        raise NotHermitianError(f"Matrix is not Hermitian: |m - m^dagger| = {deviation:.3e} > {tol:.1e}")
    values = np.linalg.eigvalsh(0.5 * (mat + dagger(mat)))
    return [float(v) for v in values]
