from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import numpy.typing as npt

from esdsim.errors import DomainError, InvalidStateError, NotXFormError
from esdsim.matcore import ALGEBRA_TOL, I4, Mat4, as_mat4, dagger, hermiticity_deviation


# Basis order for every matrix in this package: |00>, |01>, |10>, |11>.
BASIS_LABELS: Tuple[str, str, str, str] = ("00", "01", "10", "11")

PSD_TOL = 1e-10
POSITIVITY_SLACK = 1e-10

# Entries allowed to be nonzero in an X-shaped matrix (diagonal + anti-diagonal).
_X_MASK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


@dataclass(frozen=True)
class DensityMatrix:
    """Two-qubit state in the computational basis.

    Construction only checks shape and finiteness; physical validity is
    reported by :func:`validate` and enforced by :func:`require_valid`.
    """

    mat: Mat4

    def __post_init__(self) -> None:
        arr = as_mat4(self.mat).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))


@dataclass(frozen=True)
class WernerLikeParams:
    """Mixing weight ``r`` and Bell-like angle ``theta`` (radians, any real)."""

    r: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and 0.0 <= self.r <= 1.0):
            raise DomainError(f"r must be within [0, 1], got r={self.r}")
        if not math.isfinite(self.theta):
            raise DomainError(f"theta must be finite, got theta={self.theta}")


@dataclass(frozen=True)
class XElements:
    """The six parameters of an X-shaped two-qubit density matrix.

    x, y, z, w are the diagonal populations of |00>, |01>, |10>, |11>;
    u = rho[01,10] and v = rho[00,11] are the two coherences.
    """

    x: float
    y: float
    z: float
    w: float
    u: complex = 0j
    v: complex = 0j

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "w"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < -ALGEBRA_TOL:
                raise DomainError(f"X element {name} must be finite and nonnegative, got {name}={value}")
            object.__setattr__(self, name, value)
        for name in ("u", "v"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError(f"X element {name} must be finite, got {name}={value}")
            object.__setattr__(self, name, value)

        total = self.x + self.y + self.z + self.w
        if abs(total - 1.0) > ALGEBRA_TOL:
            raise DomainError(f"X populations must sum to 1, got {total!r}")
        if abs(self.u) > math.sqrt(max(self.y * self.z, 0.0)) + POSITIVITY_SLACK:
            raise DomainError(f"|u|={abs(self.u)!r} exceeds sqrt(y*z); matrix is not positive")
        if abs(self.v) > math.sqrt(max(self.x * self.w, 0.0)) + POSITIVITY_SLACK:
            raise DomainError(f"|v|={abs(self.v)!r} exceeds sqrt(x*w); matrix is not positive")

    def as_tuple(self) -> Tuple[float, float, float, float, complex, complex]:
        return (self.x, self.y, self.z, self.w, self.u, self.v)

    def as_dict(self) -> Dict[str, object]:
        """JSON-friendly form; complex entries become ``[re, im]`` pairs."""
        return {
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "w": self.w,
            "u": [self.u.real, self.u.imag],
            "v": [self.v.real, self.v.imag],
        }


@dataclass(frozen=True)
class ValidationReport:
    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _bell_vector(theta: float) -> npt.NDArray[np.complex128]:
    return np.array([math.sin(theta), 0.0, 0.0, math.cos(theta)], dtype=np.complex128)


def bell_like(theta: float) -> DensityMatrix:
    """Projector onto sin(theta)|00> + cos(theta)|11>."""
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got theta={theta}")
    phi = _bell_vector(theta)
    return DensityMatrix(np.outer(phi, phi.conj()))


def werner_like(params: WernerLikeParams) -> DensityMatrix:
    """r |Phi><Phi| + (1 - r)/4 I, the extended Werner-like family."""
    phi = _bell_vector(params.theta)
    mat = params.r * np.outer(phi, phi.conj()) + (1.0 - params.r) / 4.0 * I4
    return DensityMatrix(mat)


def werner_x(params: WernerLikeParams) -> XElements:
    r = params.r
    s = math.sin(params.theta)
    c = math.cos(params.theta)
    mixed = (1.0 - r) / 4.0
    return XElements(
        x=mixed + r * s**2,
        y=mixed,
        z=mixed,
        w=mixed + r * c**2,
        u=0j,
        v=complex(r * s * c),
    )


def extract_x(rho: DensityMatrix, tol: float = ALGEBRA_TOL) -> XElements:
    """Read the X parameters of ``rho``; entries off the X pattern must vanish within ``tol``."""
    mat = rho.mat
    outside = np.abs(np.where(_X_MASK, 0.0, mat))
    worst = float(np.max(outside))
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(outside)), outside.shape)
        raise NotXFormError(
            f"Entry rho[{BASIS_LABELS[i]},{BASIS_LABELS[j]}] = {mat[i, j]!r} lies outside the X pattern (tol={tol:.1e})"
        )
    return XElements(
        x=float(mat[0, 0].real),
        y=float(mat[1, 1].real),
        z=float(mat[2, 2].real),
        w=float(mat[3, 3].real),
        u=complex(mat[1, 2]),
        v=complex(mat[0, 3]),
    )


def x_to_density(xe: XElements) -> DensityMatrix:
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = xe.x
    mat[1, 1] = xe.y
    mat[2, 2] = xe.z
    mat[3, 3] = xe.w
    mat[1, 2] = xe.u
    mat[2, 1] = xe.u.conjugate()
    mat[0, 3] = xe.v
    mat[3, 0] = xe.v.conjugate()
    return DensityMatrix(mat)


def validate(rho: DensityMatrix | npt.ArrayLike, tol: float = ALGEBRA_TOL, psd_tol: float = PSD_TOL) -> ValidationReport:
    """Check unit trace, Hermiticity and positivity; failures are listed, never raised."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else as_mat4(rho)

    trace_dev = abs(complex(np.trace(mat)) - 1.0)
    herm_dev = hermiticity_deviation(mat)
    min_eig = float(np.linalg.eigvalsh(0.5 * (mat + dagger(mat)))[0])

    failures: List[str] = []
    if trace_dev > tol:
        failures.append(f"trace {complex(np.trace(mat)).real:.12g} deviates from 1 by {trace_dev:.3e}")
    if herm_dev > tol:
        failures.append(f"not Hermitian: deviation {herm_dev:.3e}")
    if min_eig < -psd_tol:
        failures.append(f"not positive semidefinite: min eigenvalue {min_eig:.3e}")

    return ValidationReport(
        trace_deviation=trace_dev,
        hermiticity_deviation=herm_dev,
        min_eigenvalue=min_eig,
        failures=failures,
    )


def require_valid(rho: DensityMatrix, tol: float = ALGEBRA_TOL) -> DensityMatrix:
    report = validate(rho, tol)
    if not report.passed:
        raise InvalidStateError("Invalid density matrix: " + "; ".join(report.failures), report)
    return rho


def purity_tr(rho: DensityMatrix) -> float:
    """Tr(rho^2). Not the mixing weight ``r``, which the literature also calls purity."""
    return float(np.real(np.trace(rho.mat @ rho.mat)))


def entanglement_threshold_r(theta: float) -> float:
    """Smallest r at which werner_like(r, theta) is entangled; inf if never."""
    sc = abs(math.sin(theta) * math.cos(theta))
    if sc == 0.0:
        return math.inf
    return 1.0 / (1.0 + 4.0 * sc)
