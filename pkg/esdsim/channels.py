from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import numpy.typing as npt

from esdsim.errors import DomainError
from esdsim.matcore import (
    ALGEBRA_TOL,
    I2,
    LOWER_01,
    PROJ_0,
    PROJ_1,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Mat2,
    as_mat2,
    dagger,
)
from esdsim.states import DensityMatrix, WernerLikeParams, XElements, require_valid, werner_like


class ChannelKind(str, Enum):
    AD = "ad"
    PD = "pd"
    D = "d"

    @property
    def label(self) -> str:
        return self.name


def _check_probability(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise DomainError(f"p must be within [0, 1], got p={p}")
    return p


@dataclass(frozen=True)
class KrausChannel:
    """Single-qubit CPTP map given by its Kraus operators."""

    kind: ChannelKind
    p: float
    ops: Tuple[Mat2, ...]

    def __post_init__(self) -> None:
        _check_probability(self.p)
        ops = tuple(as_mat2(op).copy() for op in self.ops)
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "ops", ops)

        deviation = completeness_deviation(self)
        if deviation > ALGEBRA_TOL:
            raise DomainError(f"Kraus operators of {self.kind.label}(p={self.p}) are incomplete: deviation {deviation:.3e}")


def completeness_deviation(ch: KrausChannel) -> float:
    """Largest entry of |sum_k E_k^dagger E_k - I|."""
    total = sum((dagger(op) @ op for op in ch.ops), np.zeros((2, 2), dtype=np.complex128))
    return float(np.max(np.abs(total - I2)))


def amplitude_damping(p: float) -> KrausChannel:
    """E0 = |0><0| + sqrt(1-p)|1><1|, E1 = sqrt(p)|0><1|."""
    p = _check_probability(p)
    e0 = PROJ_0 + math.sqrt(1.0 - p) * PROJ_1
    e1 = math.sqrt(p) * LOWER_01
    return KrausChannel(ChannelKind.AD, p, (e0, e1))


def phase_damping(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p (P0 rho P0 + P1 rho P1)."""
    p = _check_probability(p)
    return KrausChannel(
        ChannelKind.PD,
        p,
        (math.sqrt(1.0 - p) * I2, math.sqrt(p) * PROJ_0, math.sqrt(p) * PROJ_1),
    )


def depolarizing(p: float) -> KrausChannel:
    """rho -> (1-p) rho + p I/2."""
    p = _check_probability(p)
    weight = math.sqrt(p / 4.0)
    return KrausChannel(
        ChannelKind.D,
        p,
        (math.sqrt(1.0 - 0.75 * p) * I2, weight * SIGMA_X, weight * SIGMA_Y, weight * SIGMA_Z),
    )


_CONSTRUCTORS = {
    ChannelKind.AD: amplitude_damping,
    ChannelKind.PD: phase_damping,
    ChannelKind.D: depolarizing,
}


def channel(kind: ChannelKind, p: float) -> KrausChannel:
    return _CONSTRUCTORS[ChannelKind(kind)](p)


def apply_single(ch: KrausChannel, rho1: npt.ArrayLike) -> Mat2:
    mat = as_mat2(rho1)
    return sum((op @ mat @ dagger(op) for op in ch.ops), np.zeros((2, 2), dtype=np.complex128))


def literal_map(kind: ChannelKind, p: float, rho1: npt.ArrayLike) -> Mat2:
    """The single-qubit map written out directly, without Kraus operators."""
    p = _check_probability(p)
    mat = as_mat2(rho1)
    kind = ChannelKind(kind)
    if kind is ChannelKind.AD:
        q = math.sqrt(1.0 - p)
        return np.array(
            [
                [mat[0, 0] + p * mat[1, 1], q * mat[0, 1]],
                [q * mat[1, 0], (1.0 - p) * mat[1, 1]],
            ],
            dtype=np.complex128,
        )
    if kind is ChannelKind.PD:
        dephased = PROJ_0 @ mat @ PROJ_0 + PROJ_1 @ mat @ PROJ_1
        return (1.0 - p) * mat + p * dephased
    return (1.0 - p) * mat + p * np.trace(mat) * I2 / 2.0


def apply_local(ch_a: KrausChannel, ch_b: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """sum_ij (E_i x F_j) rho (E_i x F_j)^dagger with independent channels per qubit."""
    require_valid(rho)
    ops = np.array([np.kron(e, f) for e in ch_a.ops for f in ch_b.ops])
    out = np.einsum("kij,jl,kml->im", ops, rho.mat, ops.conj())
    return DensityMatrix(out)


def p_of_t(gamma: float, t: float) -> float:
    """Decay probability 1 - exp(-gamma t / 2) after time ``t`` at rate ``gamma``."""
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise DomainError(f"gamma must be finite and >= 0, got gamma={gamma}")
    if not (t >= 0.0):
        raise DomainError(f"t must be >= 0, got t={t}")
    return -math.expm1(-0.5 * gamma * t)


def evolve_werner_analytic(kind: ChannelKind, params: WernerLikeParams, p: float) -> XElements:
    """Closed-form X elements of the Werner-like state after the channel acts on both qubits."""
    p = _check_probability(p)
    kind = ChannelKind(kind)
    r = params.r
    s = math.sin(params.theta)
    c = math.cos(params.theta)
    mixed = (1.0 - r) / 4.0

    if kind is ChannelKind.AD:
        x = mixed * (1.0 + p) ** 2 + r * (c**2 * p**2 + s**2)
        y = z = mixed * (1.0 - p**2) + r * c**2 * p * (1.0 - p)
        w = (mixed + r * c**2) * (1.0 - p) ** 2
        v = r * s * c * (1.0 - p)
    elif kind is ChannelKind.PD:
        x = mixed + r * s**2
        y = z = mixed
        w = mixed + r * c**2
        v = r * s * c * (1.0 - p) ** 2
    else:
        half = p / 2.0
        x = (1.0 - half) ** 2 * (mixed + r * s**2) + p * (1.0 - half) * mixed + half**2 * (mixed + r * c**2)
        y = z = mixed * (1.0 - p + p**2 / 2.0) + p / 4.0 * (1.0 - half) * (1.0 + r)
        w = (1.0 - half) ** 2 * (mixed + r * c**2) + p * (1.0 - half) * mixed + half**2 * (mixed + r * s**2)
        v = r * s * c * (1.0 - p) ** 2

    return XElements(x=x, y=y, z=z, w=w, u=0j, v=complex(v))


def evolve_werner_kraus(kind: ChannelKind, params: WernerLikeParams, p: float) -> DensityMatrix:
    ch = channel(kind, p)
    return apply_local(ch, ch, werner_like(params))
