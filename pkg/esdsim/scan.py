from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, NamedTuple, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from esdsim.channels import ChannelKind, evolve_werner_analytic
from esdsim.entanglement import concurrence_x
from esdsim.errors import ConfigError, DomainError
from esdsim.states import WernerLikeParams, XElements


logger = logging.getLogger(__name__)


CSV_HEADER = ("theta", "p", "r", "concurrence")
# Initial concurrence above this marks a theta-slice as entangled.
ENTANGLED_TOL = 1e-12

OutputFormat = Literal["csv", "json"]
Target = Union[str, Path, TextIO]


class ScanRow(NamedTuple):
    theta: float
    p: float
    r: float
    concurrence: float
    xe: XElements


@dataclass(frozen=True)
class ScanConfig:
    kind: ChannelKind
    r_values: Tuple[float, ...]
    theta_start: float = 0.0
    theta_stop: float = math.pi
    theta_steps: int = 101
    p_start: float = 0.0
    p_stop: float = 1.0
    p_steps: int = 101
    output: Optional[Path] = None
    fmt: OutputFormat = "csv"

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", ChannelKind(self.kind))
        except ValueError as exc:
            raise ConfigError(f"kind: unknown channel {self.kind!r}") from exc
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))
        if not self.r_values:
            raise ConfigError("r: at least one value is required")
        for r in self.r_values:
            if not (0.0 <= r <= 1.0):
                raise ConfigError(f"r: {r} is outside [0, 1]")
        if self.theta_steps < 2:
            raise ConfigError(f"theta_steps: must be >= 2, got {self.theta_steps}")
        if self.p_steps < 2:
            raise ConfigError(f"p_steps: must be >= 2, got {self.p_steps}")
        if not (math.isfinite(self.theta_start) and math.isfinite(self.theta_stop)):
            raise ConfigError("theta_start/theta_stop: must be finite")
        if not (0.0 <= self.p_start <= self.p_stop <= 1.0):
            raise ConfigError(f"p_start/p_stop: need 0 <= p_start <= p_stop <= 1, got {self.p_start}, {self.p_stop}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format: must be 'csv' or 'json', got {self.fmt!r}")

    def theta_grid(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_stop, self.theta_steps)

    def p_grid(self) -> np.ndarray:
        return np.linspace(self.p_start, self.p_stop, self.p_steps)


@dataclass(frozen=True)
class FigureSpec:
    """Parameters baked into one of the six published datasets."""

    figure_number: int
    kind: ChannelKind
    r_values: Tuple[float, ...]
    theta: Optional[float] = None  # fixed angle for curve figures; None means a theta surface

    def __post_init__(self) -> None:
        if not 1 <= self.figure_number <= 6:
            raise DomainError(f"Unknown figure number {self.figure_number}; expected 1..6")


FIGURE_6_R_VALUES: Tuple[float, ...] = (0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

FIGURES: Dict[int, FigureSpec] = {
    1: FigureSpec(1, ChannelKind.AD, (1.0,)),
    2: FigureSpec(2, ChannelKind.AD, (0.7,)),
    3: FigureSpec(3, ChannelKind.PD, (1.0,)),
    4: FigureSpec(4, ChannelKind.PD, (0.7,)),
    5: FigureSpec(5, ChannelKind.D, (1.0,)),
    6: FigureSpec(6, ChannelKind.D, FIGURE_6_R_VALUES, theta=math.pi / 4),
}


def figure_spec(figure_number: int) -> FigureSpec:
    try:
        return FIGURES[figure_number]
    except KeyError:
        raise DomainError(f"Unknown figure number {figure_number}; expected 1..6") from None


def _slice_rows(kind: ChannelKind, r: float, theta: float, p_grid: Sequence[float]) -> List[ScanRow]:
    params = WernerLikeParams(r=r, theta=theta)
    rows: List[ScanRow] = []
    for p in p_grid:
        xe = evolve_werner_analytic(kind, params, float(p))
        rows.append(ScanRow(theta, float(p), r, concurrence_x(xe), xe))
    return rows


def _run_slices(
    kind: ChannelKind,
    slices: Sequence[Tuple[float, float]],
    p_grid: Sequence[float],
    threads: int,
) -> List[ScanRow]:
    """Evaluate (r, theta) slices, possibly in parallel; output order follows ``slices``."""

    def work(item: Tuple[float, float]) -> List[ScanRow]:
        r, theta = item
        return _slice_rows(kind, r, theta, p_grid)

    if threads <= 1:
        chunks = [work(item) for item in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, slices))
    return [row for chunk in chunks for row in chunk]


def scan_surface(cfg: ScanConfig, threads: int = 1) -> List[ScanRow]:
    """Rows ordered r outermost, then theta, then p."""
    slices = [(r, float(theta)) for r in cfg.r_values for theta in cfg.theta_grid()]
    logger.info(
        "scan %s: %d r x %d theta x %d p on %d thread(s)",
        cfg.kind.label,
        len(cfg.r_values),
        cfg.theta_steps,
        cfg.p_steps,
        max(1, threads),
    )
    rows = _run_slices(cfg.kind, slices, [float(p) for p in cfg.p_grid()], threads)
    logger.info("scan %s: %d rows", cfg.kind.label, len(rows))
    return rows


def figure_dataset(
    spec: FigureSpec,
    *,
    theta_start: float = 0.0,
    theta_stop: float = math.pi,
    theta_steps: int = 101,
    p_steps: int = 101,
    threads: int = 1,
) -> List[ScanRow]:
    if spec.theta is None:
        cfg = ScanConfig(
            kind=spec.kind,
            r_values=spec.r_values,
            theta_start=theta_start,
            theta_stop=theta_stop,
            theta_steps=theta_steps,
            p_steps=p_steps,
        )
        return scan_surface(cfg, threads)

    if p_steps < 2:
        raise ConfigError(f"p_steps: must be >= 2, got {p_steps}")
    slices = [(r, spec.theta) for r in spec.r_values]
    p_grid = [float(p) for p in np.linspace(0.0, 1.0, p_steps)]
    return _run_slices(spec.kind, slices, p_grid, threads)


# -- caption predicates -------------------------------------------------------


def _group_slices(rows: Iterable[ScanRow]) -> List[Tuple[float, float, List[ScanRow]]]:
    groups: List[Tuple[float, float, List[ScanRow]]] = []
    for row in rows:
        if groups and groups[-1][0] == row.r and groups[-1][1] == row.theta:
            groups[-1][2].append(row)
        else:
            groups.append((row.r, row.theta, [row]))
    return groups


def _interior(slice_rows: List[ScanRow]) -> List[ScanRow]:
    return slice_rows[:-1]


def _is_entangled(slice_rows: List[ScanRow]) -> bool:
    return slice_rows[0].concurrence > ENTANGLED_TOL


def _has_zero_before_end(slice_rows: List[ScanRow]) -> bool:
    return any(row.concurrence == 0.0 for row in _interior(slice_rows))


def _first_zero(slice_rows: List[ScanRow]) -> Optional[float]:
    return next((row.p for row in slice_rows if row.concurrence == 0.0), None)


def caption_predicate(figure_number: int, rows: Sequence[ScanRow]) -> bool:
    """Machine-checked version of the claim each figure caption makes."""
    figure_spec(figure_number)
    entangled = [g for g in _group_slices(rows) if _is_entangled(g[2])]
    if not entangled:
        return False

    if figure_number == 1:
        for _, theta, slice_rows in entangled:
            in_window = abs(math.sin(theta)) < abs(math.cos(theta))
            has_zero = _has_zero_before_end(slice_rows)
            if has_zero and not in_window:
                return False
            last_interior_p = _interior(slice_rows)[-1].p
            if abs(math.tan(theta)) < last_interior_p - 1e-9 and not has_zero:
                return False
        return True

    if figure_number in (2, 4, 5):
        return all(_has_zero_before_end(slice_rows) for _, _, slice_rows in entangled)

    if figure_number == 3:
        return not any(_has_zero_before_end(slice_rows) for _, _, slice_rows in entangled)

    crossings = sorted((r, _first_zero(slice_rows)) for r, _, slice_rows in entangled)
    if any(p is None for _, p in crossings):
        return False
    ordered = [p for _, p in crossings]
    return all(a < b for a, b in zip(ordered, ordered[1:]))


# -- serialization ------------------------------------------------------------


def format_number(value: float, digits: Optional[int] = None) -> str:
    """Positional (exponent-free) text; shortest round-trip form unless ``digits`` is given."""
    if digits is None:
        return np.format_float_positional(value, unique=True, trim="-")
    return np.format_float_positional(value, precision=digits, unique=False, fractional=False, trim="-")


def render_csv(rows: Iterable[ScanRow], digits: Optional[int] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([format_number(v, digits) for v in (row.theta, row.p, row.r, row.concurrence)])
    return buf.getvalue()


def evaluation_payload(kind: ChannelKind, r: float, theta: float, p: float, xe: XElements, c: float) -> Dict[str, Any]:
    return {
        "channel": ChannelKind(kind).label,
        "r": r,
        "theta": theta,
        "p": p,
        "x_elements": xe.as_dict(),
        "concurrence": c,
    }


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def rows_payload(kind: ChannelKind, rows: Iterable[ScanRow]) -> List[Dict[str, Any]]:
    return [evaluation_payload(kind, row.r, row.theta, row.p, row.xe, row.concurrence) for row in rows]


def write_text(text: str, target: Target) -> None:
    """Write UTF-8 text with LF line endings to a path or an open stream."""
    if isinstance(target, (str, Path)):
        path = Path(target)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info("wrote %s (%d bytes)", path, len(text.encode("utf-8")))
    else:
        target.write(text)


def write_csv(rows: Iterable[ScanRow], target: Target, digits: Optional[int] = None) -> None:
    write_text(render_csv(rows, digits), target)


def write_json(payload: Any, target: Target) -> None:
    write_text(render_json(payload), target)
