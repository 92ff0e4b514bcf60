from __future__ import annotations

import math

import numpy as np
import pytest

from esdsim.channels import ChannelKind, p_of_t
from esdsim.entanglement import concurrence_at
from esdsim.errors import BracketError, DomainError, UnsupportedChannelError
from esdsim.esd import (
    NO_ESD,
    CriticalResult,
    CriticalStatus,
    _find_bracket,
    ad_all_theta_threshold,
    critical_probability,
    critical_time,
    esd_condition_ad,
    initial_concurrence,
    is_initially_entangled,
    no_revival_scan,
    pc_analytic,
    pc_numeric,
    pd_pure_concurrence,
)
from esdsim.states import WernerLikeParams, entanglement_threshold_r


R_VALUES = [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
THETAS = [k * math.pi / 40 for k in range(1, 20)]


def _params(r: float, theta: float) -> WernerLikeParams:
    return WernerLikeParams(r, theta)


def test_initial_concurrence() -> None:
    assert initial_concurrence(_params(1.0, math.pi / 4)) == pytest.approx(1.0)
    assert initial_concurrence(_params(0.7, math.pi / 4)) == pytest.approx(0.55)
    assert initial_concurrence(_params(0.2, math.pi / 4)) == 0.0


def test_esd_condition_ad() -> None:
    assert not esd_condition_ad(_params(1.0, math.pi / 4))
    assert esd_condition_ad(_params(1.0, math.pi / 6))
    assert esd_condition_ad(_params(0.7, 1.2))
    with pytest.raises(DomainError):
        esd_condition_ad(_params(0.2, math.pi / 4))


def test_pc_analytic_examples() -> None:
    assert pc_analytic(ChannelKind.AD, _params(1.0, math.pi / 4)) == NO_ESD

    result = pc_analytic(ChannelKind.AD, _params(1.0, math.pi / 6))
    assert result.status is CriticalStatus.ESD
    assert result.pc == pytest.approx(math.tan(math.pi / 6), abs=1e-12)

    result = pc_analytic(ChannelKind.PD, _params(0.7, math.pi / 4))
    assert result.pc == pytest.approx(1 - math.sqrt(0.3 / 1.4), abs=1e-12)
    assert result.pc == pytest.approx(0.5370904, abs=1e-6)

    assert pc_analytic(ChannelKind.PD, _params(1.0, math.pi / 8)) == NO_ESD


def test_pc_analytic_depolarizing_unsupported() -> None:
    with pytest.raises(UnsupportedChannelError):
        pc_analytic(ChannelKind.D, _params(1.0, math.pi / 4))


def test_not_entangled_below_threshold() -> None:
    params = _params(1 / 3, math.pi / 4)
    assert not is_initially_entangled(params)
    for kind in (ChannelKind.AD, ChannelKind.PD):
        assert pc_analytic(kind, params).status is CriticalStatus.NOT_ENTANGLED_INITIALLY
    assert pc_numeric(ChannelKind.D, params).status is CriticalStatus.NOT_ENTANGLED_INITIALLY


def test_pure_amplitude_damping_window() -> None:
    for theta in THETAS:
        result = pc_analytic(ChannelKind.AD, _params(1.0, theta))
        if theta < math.pi / 4 - 1e-9:
            assert result.pc == pytest.approx(math.tan(theta), abs=1e-12)
        else:
            assert result == NO_ESD


@pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 6, math.pi / 5])
def test_pure_amplitude_damping_numeric(theta: float) -> None:
    result = pc_numeric(ChannelKind.AD, _params(1.0, theta))
    assert result.pc == pytest.approx(math.tan(theta), abs=1e-8)


def test_depolarizing_bell_root() -> None:
    result = pc_numeric(ChannelKind.D, _params(1.0, math.pi / 4))
    # Root of 3p^2 - 6p + 2 = 0 in (0, 1).
    root = (6 - math.sqrt(36 - 24)) / 6
    assert root == pytest.approx(1 - 1 / math.sqrt(3), abs=1e-15)
    assert result.pc == pytest.approx(root, abs=1e-6)
    assert concurrence_at(ChannelKind.D, _params(1.0, math.pi / 4), result.pc) <= 1e-9


@pytest.mark.parametrize("kind", [ChannelKind.AD, ChannelKind.PD])
def test_analytic_and_numeric_agree(kind: ChannelKind) -> None:
    for r in R_VALUES:
        for theta in THETAS:
            params = _params(r, theta)
            analytic = pc_analytic(kind, params)
            numeric = pc_numeric(kind, params)
            assert numeric.status is analytic.status, (kind, r, theta)
            if analytic.has_esd:
                assert abs(numeric.pc - analytic.pc) <= 1e-8, (kind, r, theta)


def test_pd_mixed_states_always_die() -> None:
    for r in R_VALUES[:-1]:
        for theta in THETAS:
            params = _params(r, theta)
            if is_initially_entangled(params):
                assert pc_analytic(ChannelKind.PD, params).has_esd


def test_depolarizing_pure_states_always_die() -> None:
    for theta in THETAS:
        assert pc_numeric(ChannelKind.D, _params(1.0, theta)).has_esd


def test_depolarizing_pc_grows_with_r() -> None:
    pcs = [pc_numeric(ChannelKind.D, _params(r, math.pi / 4)).pc for r in R_VALUES]
    assert all(a < b for a, b in zip(pcs, pcs[1:]))


def test_ad_threshold_all_theta() -> None:
    assert ad_all_theta_threshold() == pytest.approx(1 / math.sqrt(2))
    for r in (0.5, 0.6, 0.7):
        for k in range(1, 80):
            params = _params(r, k * math.pi / 80)
            if is_initially_entangled(params):
                assert esd_condition_ad(params), (r, k)
                assert pc_analytic(ChannelKind.AD, params).has_esd


def test_entangled_iff_above_threshold() -> None:
    theta = math.pi / 4
    threshold = entanglement_threshold_r(theta)
    assert not is_initially_entangled(_params(threshold - 1e-6, theta))
    assert is_initially_entangled(_params(threshold + 1e-6, theta))


def test_no_revival_examples() -> None:
    assert no_revival_scan(ChannelKind.AD, _params(1.0, math.pi / 6))
    assert no_revival_scan(ChannelKind.PD, _params(0.7, math.pi / 4))
    with pytest.raises(DomainError):
        no_revival_scan(ChannelKind.PD, _params(0.7, math.pi / 4), steps=1)


@pytest.mark.parametrize("kind", list(ChannelKind))
def test_no_revival_on_grid(kind: ChannelKind) -> None:
    for r in np.linspace(0.0, 1.0, 11):
        for theta in np.linspace(0.0, math.pi, 21):
            assert no_revival_scan(kind, _params(float(r), float(theta)))


def test_critical_time() -> None:
    result = pc_analytic(ChannelKind.AD, _params(1.0, math.pi / 6))
    tc = critical_time(result, 0.5)
    assert p_of_t(0.5, tc) == pytest.approx(result.pc, abs=1e-12)
    assert critical_time(NO_ESD, 0.5) is None
    with pytest.raises(DomainError):
        critical_time(result, 0.0)


def test_critical_result_invariants() -> None:
    with pytest.raises(DomainError):
        CriticalResult(CriticalStatus.ESD)
    with pytest.raises(DomainError):
        CriticalResult(CriticalStatus.ESD, 1.0)
    with pytest.raises(DomainError):
        CriticalResult(CriticalStatus.NO_ESD, 0.5)


def test_critical_probability_dispatch() -> None:
    params = _params(0.7, math.pi / 4)
    analytic = critical_probability(ChannelKind.PD, params)
    numeric = critical_probability(ChannelKind.PD, params, method="bisect", tol=1e-12)
    assert numeric.pc == pytest.approx(analytic.pc, abs=1e-10)
    with pytest.raises(DomainError):
        critical_probability(ChannelKind.PD, params, method="newton")
    with pytest.raises(DomainError):
        pc_numeric(ChannelKind.PD, params, tol=0.0)


def test_bracket_rejects_multiple_sign_changes() -> None:
    grid = np.linspace(0.0, 1.0, 4)
    with pytest.raises(BracketError):
        _find_bracket(grid, [1.0, -1.0, 1.0, -1.0])


def test_bracket_ignores_zero_at_endpoint() -> None:
    grid = np.linspace(0.0, 1.0, 4)
    assert _find_bracket(grid, [1.0, 0.5, 0.1, 0.0]) is None
    assert _find_bracket(grid, [1.0, -0.5, -0.6, -0.7]) == (0.0, pytest.approx(1 / 3))


def test_pd_pure_concurrence_matches_evolution() -> None:
    for theta in THETAS:
        for p in np.linspace(0.0, 1.0, 11):
            expected = concurrence_at(ChannelKind.PD, _params(1.0, theta), float(p))
            assert pd_pure_concurrence(theta, float(p)) == pytest.approx(expected, abs=1e-12)
