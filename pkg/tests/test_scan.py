from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from esdsim.channels import ChannelKind
from esdsim.entanglement import concurrence_at
from esdsim.errors import ConfigError, DomainError
from esdsim.esd import pc_numeric
from esdsim.scan import (
    CSV_HEADER,
    FIGURE_6_R_VALUES,
    ScanConfig,
    caption_predicate,
    figure_dataset,
    figure_spec,
    format_number,
    render_csv,
    render_json,
    rows_payload,
    scan_surface,
    write_csv,
    write_json,
)
from esdsim.states import WernerLikeParams


def _cfg(kind: ChannelKind, *r_values: float, **overrides) -> ScanConfig:
    return ScanConfig(kind=kind, r_values=r_values, **overrides)


def test_surface_size_and_pure_bell_start() -> None:
    rows = scan_surface(_cfg(ChannelKind.AD, 1.0))
    assert len(rows) == 101 * 101
    bell = [row for row in rows if abs(row.theta - math.pi / 4) < 1e-12 and row.p == 0.0]
    assert len(bell) == 1
    assert bell[0].concurrence == pytest.approx(1.0, abs=1e-12)


def test_pure_dephasing_surface_stays_entangled() -> None:
    for row in scan_surface(_cfg(ChannelKind.PD, 1.0)):
        if row.p < 1.0 and abs(math.sin(2 * row.theta)) > 1e-9:
            assert row.concurrence > 0.0


def test_depolarizing_crossing_near_critical_probability() -> None:
    theta = math.pi / 4
    rows = scan_surface(_cfg(ChannelKind.D, 0.7, theta_start=theta, theta_stop=theta, theta_steps=2))
    first_zero = next(row.p for row in rows if row.concurrence == 0.0)
    pc = pc_numeric(ChannelKind.D, WernerLikeParams(0.7, theta)).pc
    assert pc <= first_zero <= pc + 0.01


def test_row_order_is_r_theta_p() -> None:
    rows = scan_surface(_cfg(ChannelKind.PD, 0.5, 1.0, theta_steps=3, p_steps=2))
    keys = [(row.r, row.theta, row.p) for row in rows]
    assert keys == sorted(keys)
    assert [row.r for row in rows] == [0.5] * 6 + [1.0] * 6


def test_threads_do_not_change_output() -> None:
    cfg = _cfg(ChannelKind.AD, 0.7, 1.0, theta_steps=17, p_steps=9)
    assert scan_surface(cfg, threads=4) == scan_surface(cfg, threads=1)


@pytest.mark.parametrize(
    "overrides",
    [
        {"theta_steps": 1},
        {"p_steps": 1},
        {"p_start": 0.5, "p_stop": 0.2},
        {"fmt": "xml"},
    ],
)
def test_scan_config_validation(overrides: dict) -> None:
    with pytest.raises(ConfigError):
        _cfg(ChannelKind.AD, 0.5, **overrides)


def test_scan_config_names_bad_r() -> None:
    with pytest.raises(ConfigError, match="r"):
        _cfg(ChannelKind.AD, 1.5)


def test_figure_spec() -> None:
    assert figure_spec(2).kind is ChannelKind.AD
    assert figure_spec(2).r_values == (0.7,)
    with pytest.raises(DomainError):
        figure_spec(7)


def test_figure_six_dataset() -> None:
    rows = figure_dataset(figure_spec(6))
    assert len(rows) == len(FIGURE_6_R_VALUES) * 101
    assert {row.r for row in rows} == set(FIGURE_6_R_VALUES)
    assert all(row.theta == math.pi / 4 for row in rows)


@pytest.mark.parametrize("number", [1, 2, 3, 4, 5, 6])
def test_caption_predicates_hold(number: int) -> None:
    assert caption_predicate(number, figure_dataset(figure_spec(number)))


def test_caption_predicate_detects_wrong_dataset() -> None:
    assert not caption_predicate(3, figure_dataset(figure_spec(4)))


def test_format_number() -> None:
    assert format_number(0.01) == "0.01"
    assert format_number(1.0) == "1"
    assert format_number(math.pi, 9) == "3.14159265"
    assert "e" not in format_number(1e-20)


def test_csv_layout() -> None:
    rows = scan_surface(_cfg(ChannelKind.AD, 0.7, theta_steps=5, p_steps=5))
    text = render_csv(rows)
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[-1] == ""
    assert len(lines) == len(rows) + 2
    assert "\r" not in text
    assert all(line == line.strip() for line in lines)


def test_csv_values_reproduce_concurrence() -> None:
    kind = ChannelKind.D
    rows = scan_surface(_cfg(kind, 0.8, theta_steps=11, p_steps=11))
    reader = csv.DictReader(io.StringIO(render_csv(rows)))
    for record in reader:
        params = WernerLikeParams(float(record["r"]), float(record["theta"]))
        expected = concurrence_at(kind, params, float(record["p"]))
        assert abs(float(record["concurrence"]) - expected) <= 1e-12


def test_json_payload() -> None:
    rows = scan_surface(_cfg(ChannelKind.PD, 0.7, theta_steps=2, p_steps=2))
    payload = json.loads(render_json(rows_payload(ChannelKind.PD, rows)))
    assert len(payload) == 4
    assert set(payload[0]) == {"channel", "r", "theta", "p", "x_elements", "concurrence"}
    assert payload[0]["channel"] == "PD"
    assert payload[0]["x_elements"]["v"] == [0.0, 0.0]


def test_writers_are_deterministic(tmp_path) -> None:
    rows = figure_dataset(figure_spec(6), p_steps=21)
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_csv(rows, first)
    write_csv(rows, second)
    assert first.read_bytes() == second.read_bytes()

    out = io.StringIO()
    write_json({"rows": len(rows)}, out)
    assert out.getvalue() == '{\n  "rows": 147\n}\n'


def test_theta_grid_endpoints() -> None:
    grid = _cfg(ChannelKind.AD, 1.0).theta_grid()
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(math.pi)
    assert np.all(np.diff(grid) > 0)
