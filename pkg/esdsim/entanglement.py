from __future__ import annotations

import logging
import math
from typing import List, Union

import numpy as np

from esdsim.channels import ChannelKind, evolve_werner_analytic
from esdsim.errors import NumericalError, SpuriousImaginaryError
from esdsim.matcore import EIG_TOL, SIGMA_Y, SWAP, Mat4, eig_general, kron
from esdsim.states import DensityMatrix, WernerLikeParams, XElements, require_valid


logger = logging.getLogger(__name__)


# Concurrence values are plain floats in [0, 1].
Concurrence = float

IMAG_TOL = 1e-9
CLAMP_TOL = 1e-9
RANGE_SLACK = 1e-12
# Eigenvalues of rho*rho~ at or below this many ulps of ||rho*rho~|| count as exact zeros.
ZERO_EIG_ULPS = 64

_YY: Mat4 = kron(SIGMA_Y, SIGMA_Y)


def _as_concurrence(value: float) -> Concurrence:
    if not (0.0 <= value <= 1.0 + RANGE_SLACK):
        raise NumericalError(f"Concurrence {value!r} is outside [0, 1]")
    return value


def spin_flip(rho: DensityMatrix) -> Mat4:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    return _YY @ rho.mat.conj() @ _YY


def zeta_eigenvalues(rho: DensityMatrix, tol: float = EIG_TOL) -> List[float]:
    """Eigenvalues of rho * spin_flip(rho), real, clamped at zero, descending."""
    require_valid(rho)
    zeta = rho.mat @ spin_flip(rho)
    floor = ZERO_EIG_ULPS * float(np.finfo(np.float64).eps) * max(1.0, float(np.linalg.norm(zeta)))
    values: List[float] = []
    for lam in eig_general(zeta, tol):
        if abs(lam.imag) > IMAG_TOL:
            raise SpuriousImaginaryError(f"Eigenvalue {lam!r} of rho*rho~ has a significant imaginary part")
        re = lam.real
        if re < -CLAMP_TOL:
            raise NumericalError(f"Eigenvalue {re!r} of rho*rho~ is negative beyond rounding")
        values.append(0.0 if re <= floor else re)
    values.sort(reverse=True)
    return values


def concurrence_eig(rho: DensityMatrix, tol: float = EIG_TOL) -> Concurrence:
    """Wootters concurrence from the spectrum of rho * spin_flip(rho)."""
    roots = [math.sqrt(lam) for lam in zeta_eigenvalues(rho, tol)]
    value = max(0.0, roots[0] - roots[1] - roots[2] - roots[3])
    logger.debug("concurrence_eig: sqrt-lambdas=%s C=%s", roots, value)
    return _as_concurrence(value)


def concurrence_x(xe: XElements) -> Concurrence:
    """2 max{0, |u| - sqrt(xw), |v| - sqrt(yz)} for an X-shaped state."""
    value = 2.0 * max(
        0.0,
        abs(xe.u) - math.sqrt(xe.x * xe.w),
        abs(xe.v) - math.sqrt(xe.y * xe.z),
    )
    return _as_concurrence(value)


def concurrence(state: Union[DensityMatrix, XElements]) -> Concurrence:
    if isinstance(state, XElements):
        return concurrence_x(state)
    return concurrence_eig(state)


def concurrence_at(kind: ChannelKind, params: WernerLikeParams, p: float) -> Concurrence:
    """Concurrence of the Werner-like state after both qubits pass the channel at ``p``."""
    return concurrence_x(evolve_werner_analytic(kind, params, p))


def swap_qubits(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(SWAP @ rho.mat @ SWAP)
