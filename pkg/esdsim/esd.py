"""Critical probabilities for entanglement sudden death.

``pc_analytic`` evaluates the closed forms known for the amplitude and phase
damping channels, ``pc_numeric`` brackets the zero of the concurrence
discriminant for any channel and refines it with bisection.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from esdsim.channels import ChannelKind, evolve_werner_analytic
from esdsim.entanglement import Concurrence, concurrence_at
from esdsim.errors import BracketError, DomainError, NumericalError, UnsupportedChannelError
from esdsim.states import WernerLikeParams


logger = logging.getLogger(__name__)


DEFAULT_TOL = 1e-10
SCAN_POINTS = 1024
# Initial concurrence at or below this counts as separable.
ENTANGLEMENT_TOL = 1e-12
# Margin keeping boundary cases (pc == 1 up to rounding) out of the ESD set.
BOUNDARY_TOL = 1e-12


class CriticalStatus(str, Enum):
    NOT_ENTANGLED_INITIALLY = "NotEntangledInitially"
    NO_ESD = "NoESD"
    ESD = "ESD"


@dataclass(frozen=True)
class CriticalResult:
    status: CriticalStatus
    pc: Optional[float] = None

    def __post_init__(self) -> None:
        if self.status is CriticalStatus.ESD:
            if self.pc is None or not (0.0 < self.pc < 1.0):
                raise DomainError(f"ESD result needs 0 < pc < 1, got pc={self.pc}")
        elif self.pc is not None:
            raise DomainError(f"pc is only defined for ESD results, got status={self.status.value} pc={self.pc}")

    @property
    def has_esd(self) -> bool:
        return self.status is CriticalStatus.ESD


NOT_ENTANGLED = CriticalResult(CriticalStatus.NOT_ENTANGLED_INITIALLY)
NO_ESD = CriticalResult(CriticalStatus.NO_ESD)


def initial_concurrence(params: WernerLikeParams) -> Concurrence:
    sc = abs(math.sin(params.theta) * math.cos(params.theta))
    return 2.0 * max(0.0, params.r * sc - (1.0 - params.r) / 4.0)


def is_initially_entangled(params: WernerLikeParams) -> bool:
    return initial_concurrence(params) > ENTANGLEMENT_TOL


def esd_condition_ad(params: WernerLikeParams) -> bool:
    """|sin cos| - cos^2 < (1/r - 1)/2: ESD under amplitude damping."""
    if not is_initially_entangled(params):
        raise DomainError(f"State r={params.r}, theta={params.theta} is not entangled initially")
    s = math.sin(params.theta)
    c = math.cos(params.theta)
    lhs = abs(s * c) - c * c
    rhs = 0.5 * (1.0 / params.r - 1.0)
    return lhs < rhs - BOUNDARY_TOL


def pc_analytic(kind: ChannelKind, params: WernerLikeParams) -> CriticalResult:
    kind = ChannelKind(kind)
    if kind is ChannelKind.D:
        raise UnsupportedChannelError("No closed-form critical probability for the depolarizing channel; use bisection")
    if not is_initially_entangled(params):
        return NOT_ENTANGLED

    r = params.r
    s = math.sin(params.theta)
    c = math.cos(params.theta)
    sc = abs(s * c)

    if kind is ChannelKind.AD:
        if not esd_condition_ad(params):
            return NO_ESD
        pc = (4.0 * r * sc + r - 1.0) / (4.0 * r * c * c - r + 1.0)
        return CriticalResult(CriticalStatus.ESD, pc)

    # Pure states never lose entanglement under dephasing before p = 1.
    if r >= 1.0:
        return NO_ESD
    pc = 1.0 - math.sqrt((1.0 - r) / (4.0 * r * sc))
    return CriticalResult(CriticalStatus.ESD, pc)


def _discriminant(kind: ChannelKind, params: WernerLikeParams) -> Callable[[float], float]:
    """g(p) with C(p) = 2 max(0, g(p))."""

    def g(p: float) -> float:
        xe = evolve_werner_analytic(kind, params, min(1.0, max(0.0, p)))
        return max(abs(xe.u) - math.sqrt(xe.x * xe.w), abs(xe.v) - math.sqrt(xe.y * xe.z))

    return g


def _find_bracket(grid: np.ndarray, values: List[float]) -> Optional[Tuple[float, float]]:
    """Return the cell where g leaves the positive region, None if it never does before p = 1."""
    positive = [v > 0.0 for v in values]
    changes = [k for k in range(len(positive) - 1) if positive[k] != positive[k + 1]]
    if len(changes) > 1:
        raise BracketError(
            f"Discriminant changes sign {len(changes)} times on the pre-scan "
            f"(near p={', '.join(f'{grid[k]:.6f}' for k in changes[:4])})"
        )
    if not changes:
        return None
    k = changes[0]
    if k == len(grid) - 2 and values[-1] >= 0.0:
        # Concurrence reaches zero only at p = 1, the asymptotic steady state.
        return None
    return float(grid[k]), float(grid[k + 1])


def pc_numeric(
    kind: ChannelKind,
    params: WernerLikeParams,
    tol: float = DEFAULT_TOL,
    scan_points: int = SCAN_POINTS,
) -> CriticalResult:
    if not (tol > 0.0):
        raise DomainError(f"tol must be positive, got tol={tol}")
    kind = ChannelKind(kind)
    if not is_initially_entangled(params):
        return NOT_ENTANGLED

    g = _discriminant(kind, params)
    grid = np.linspace(0.0, 1.0, scan_points)
    bracket = _find_bracket(grid, [g(float(p)) for p in grid])
    if bracket is None:
        logger.debug("pc_numeric %s r=%s theta=%s: no ESD", kind.label, params.r, params.theta)
        return NO_ESD

    lo, hi = bracket
    pc, info = bisect(g, lo, hi, xtol=tol, full_output=True, disp=False)
    if not info.converged:
        raise NumericalError(f"Bisection on [{lo}, {hi}] did not converge: {info.flag}")

    residual = 2.0 * max(0.0, g(pc))
    if residual > 10.0 * tol:
        raise NumericalError(f"Concurrence {residual:.3e} at pc={pc!r} exceeds 10*tol")
    logger.debug(
        "pc_numeric %s r=%s theta=%s: bracket [%s, %s] -> pc=%s after %d iterations",
        kind.label,
        params.r,
        params.theta,
        lo,
        hi,
        pc,
        info.iterations,
    )
    return CriticalResult(CriticalStatus.ESD, float(pc))


def critical_probability(
    kind: ChannelKind,
    params: WernerLikeParams,
    method: str = "analytic",
    tol: float = DEFAULT_TOL,
) -> CriticalResult:
    if method == "analytic":
        return pc_analytic(kind, params)
    if method == "bisect":
        return pc_numeric(kind, params, tol)
    raise DomainError(f"method must be 'analytic' or 'bisect', got {method!r}")


def no_revival_scan(kind: ChannelKind, params: WernerLikeParams, steps: int = 1001) -> bool:
    """True iff, on a uniform p grid, concurrence never returns once it hits zero."""
    if steps < 2:
        raise DomainError(f"steps must be >= 2, got steps={steps}")
    dead = [concurrence_at(kind, params, float(p)) == 0.0 for p in np.linspace(0.0, 1.0, steps)]
    first = next((k for k, flag in enumerate(dead) if flag), None)
    return first is None or all(dead[first:])


def critical_time(result: CriticalResult, gamma: float) -> Optional[float]:
    """Time at which p_of_t(gamma, t) reaches pc; None without ESD."""
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise DomainError(f"gamma must be positive, got gamma={gamma}")
    if result.pc is None:
        return None
    # Inverse of p_of_t.
    return -2.0 * math.log1p(-result.pc) / gamma


def ad_all_theta_threshold() -> float:
    """Below this r every initially entangled theta shows ESD under amplitude damping."""
    return 1.0 / math.sqrt(2.0)


def pd_pure_concurrence(theta: float, p: float) -> Concurrence:
    """2 |sin cos| (1 - p)^2: dephasing of the pure Bell-like state."""
    return 2.0 * abs(math.sin(theta) * math.cos(theta)) * (1.0 - p) ** 2
