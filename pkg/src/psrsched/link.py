"""Link budget and PSR favorability classification.

Pathloss follows the indoor residential model with a 5 m breakpoint and a
fixed loss per wall crossed (single floor).  For every pair of a non-RTA
station ``i`` and an RTA station ``j`` the expected SINR of a PSR uplink from
``j`` during a trigger-based uplink of ``i`` is computed from received powers
only, and ``i`` is favorable for ``j`` when that SINR clears the threshold.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .objective import FavorabilityMatrix, InvalidInputError


class ConfigurationError(ValueError):
    pass


def db_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def mw_to_db(mw):
    return 10.0 * np.log10(mw)


@dataclass(frozen=True)
class NodePosition:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"non-finite position ({self.x}, {self.y})")

    def distance(self, other: NodePosition) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def walls_to(self, other: NodePosition, floorplan: Floorplan) -> int:
        return floorplan.walls_between(self, other)


Segment = tuple[tuple[float, float], tuple[float, float]]


def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (v > 1e-12) - (v < -1e-12)


def _crosses(p: NodePosition, q: NodePosition, seg: Segment) -> bool:
    (x1, y1), (x2, y2) = seg
    d1 = _orient(p.x, p.y, q.x, q.y, x1, y1)
    d2 = _orient(p.x, p.y, q.x, q.y, x2, y2)
    d3 = _orient(x1, y1, x2, y2, p.x, p.y)
    d4 = _orient(x1, y1, x2, y2, q.x, q.y)
    return d1 * d2 < 0 and d3 * d4 < 0


@dataclass(frozen=True)
class Floorplan:
    """Rectangular apartments plus optional interior walls on one floor."""

    apartments: tuple[tuple[float, float, float, float], ...] = ((0.0, 0.0, 10.0, 7.0), (13.0, 0.0, 23.0, 7.0))
    interior_walls: tuple[Segment, ...] = ()

    @property
    def walls(self) -> tuple[Segment, ...]:
        out = []
        for x0, y0, x1, y1 in self.apartments:
            out += [((x0, y0), (x1, y0)), ((x1, y0), (x1, y1)), ((x1, y1), (x0, y1)), ((x0, y1), (x0, y0))]
        return tuple(out) + tuple(self.interior_walls)

    def walls_between(self, a: NodePosition, b: NodePosition) -> int:
        """Walls crossed by the straight segment between ``a`` and ``b``."""
        return sum(_crosses(a, b, w) for w in self.walls)

    def contains(self, p: NodePosition, apartment: int) -> bool:
        x0, y0, x1, y1 = self.apartments[apartment]
        return x0 <= p.x <= x1 and y0 <= p.y <= y1


DEFAULT_REQUIRED_SINR_DB = {0: 3.0, 8: 29.0}


@dataclass(frozen=True)
class LinkBudgetConfig:
    carrier_frequency_ghz: float = 5.0
    channel_width_mhz: float = 20.0
    ap_tx_power_dbm: float = 20.0
    sta_tx_power_dbm: float = 15.0
    noise_figure_db: float = 7.0
    sinr_threshold_db: float = 3.0
    psr_safety_margin_db: float = 1.0
    wall_loss_db: float = 5.0
    required_sinr_db: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_REQUIRED_SINR_DB))
    window: int = 8

    def __post_init__(self):
        if self.channel_width_mhz <= 0:
            raise ConfigurationError("channel_width_mhz must be positive")
        if self.carrier_frequency_ghz <= 0:
            raise ConfigurationError("carrier_frequency_ghz must be positive")
        if not math.isfinite(self.sinr_threshold_db):
            raise ConfigurationError("sinr_threshold_db must be finite")
        if self.psr_safety_margin_db < 0:
            raise ConfigurationError("psr_safety_margin_db must be non-negative")
        if self.window < 1:
            raise ConfigurationError("window must be at least 1")
        object.__setattr__(self, "required_sinr_db", {int(k): float(v) for k, v in self.required_sinr_db.items()})

    @property
    def noise_dbm(self) -> float:
        return -174.0 + 10.0 * math.log10(self.channel_width_mhz * 1e6) + self.noise_figure_db


def pathloss_db(a: NodePosition, b: NodePosition, cfg: LinkBudgetConfig, walls: int = 0) -> float:
    d = a.distance(b)
    if d <= 0:
        raise InvalidInputError(f"pathloss undefined at zero distance ({a} -> {b})")
    pl = 40.05 + 20 * math.log10(cfg.carrier_frequency_ghz / 2.4) + 20 * math.log10(min(d, 5.0))
    if d > 5.0:
        pl += 35 * math.log10(d / 5.0)
    return pl + cfg.wall_loss_db * walls


def psr_max_tx_power(tf_rssi: float, ap_tx: float, accept_interference: float, cfg: LinkBudgetConfig) -> float:
    """Transmit power allowed for a PSR transmission, capped at the STA maximum."""
    limit = (ap_tx + accept_interference) - tf_rssi - cfg.psr_safety_margin_db
    return min(cfg.sta_tx_power_dbm, limit)


def accept_interference_dbm(ul_rx_power_dbm: float, mcs: int, cfg: LinkBudgetConfig) -> float:
    """Largest interference a trigger-based uplink received at ``ul_rx_power_dbm``
    tolerates at its MCS."""
    try:
        req = cfg.required_sinr_db[mcs]
    except KeyError:
        raise ConfigurationError(f"no required SINR configured for MCS {mcs}") from None
    return ul_rx_power_dbm - req - cfg.psr_safety_margin_db


@dataclass(frozen=True)
class Deployment:
    """Node placement for one non-RTA BSS and one RTA BSS."""

    nonrta_ap: NodePosition
    rta_ap: NodePosition
    nonrta_stas: tuple[NodePosition, ...]
    rta_stas: tuple[NodePosition, ...]
    floorplan: Floorplan = Floorplan()
    psr_allowed: tuple[bool, ...] | None = None
    nonrta_mcs: int = 8

    def __post_init__(self):
        object.__setattr__(self, "nonrta_stas", tuple(self.nonrta_stas))
        object.__setattr__(self, "rta_stas", tuple(self.rta_stas))
        allowed = self.psr_allowed
        if allowed is None:
            allowed = (True,) * len(self.nonrta_stas)
        if len(allowed) != len(self.nonrta_stas):
            raise InvalidInputError("psr_allowed needs one flag per non-RTA station")
        object.__setattr__(self, "psr_allowed", tuple(bool(a) for a in allowed))

    def pathloss(self, a: NodePosition, b: NodePosition, cfg: LinkBudgetConfig) -> float:
        return pathloss_db(a, b, cfg, self.floorplan.walls_between(a, b))


@dataclass(frozen=True)
class PsrLinkTerms:
    """Intermediate powers of one (RTA STA, non-RTA STA) PSR evaluation, all dBm."""

    tx_power: float
    signal: float
    interference: float
    noise: float

    @property
    def sinr_db(self) -> float:
        return self.signal - float(mw_to_db(db_to_mw(self.interference) + db_to_mw(self.noise)))


def psr_link_terms(rta_sta: int, nonrta_sta: int, dep: Deployment, cfg: LinkBudgetConfig) -> PsrLinkTerms:
    sta_j = dep.rta_stas[rta_sta]
    sta_i = dep.nonrta_stas[nonrta_sta]
    ul_rx = cfg.sta_tx_power_dbm - dep.pathloss(sta_i, dep.nonrta_ap, cfg)
    allowed = accept_interference_dbm(ul_rx, dep.nonrta_mcs, cfg)
    tf_rssi = cfg.ap_tx_power_dbm - dep.pathloss(dep.nonrta_ap, sta_j, cfg)
    tx = psr_max_tx_power(tf_rssi, cfg.ap_tx_power_dbm, allowed, cfg)
    signal = tx - dep.pathloss(sta_j, dep.rta_ap, cfg)
    interference = cfg.sta_tx_power_dbm - dep.pathloss(sta_i, dep.rta_ap, cfg)
    return PsrLinkTerms(tx, signal, interference, cfg.noise_dbm)


def expected_psr_sinr(rta_sta: int, nonrta_sta: int, dep: Deployment, cfg: LinkBudgetConfig) -> float:
    """SINR at the RTA AP of a PSR uplink from ``rta_sta`` while ``nonrta_sta``
    holds a trigger-based uplink."""
    return psr_link_terms(rta_sta, nonrta_sta, dep, cfg).sinr_db


def sinr_table(dep: Deployment, cfg: LinkBudgetConfig) -> np.ndarray:
    """Expected PSR SINR, shape ``(M, N)``."""
    out = np.empty((len(dep.rta_stas), len(dep.nonrta_stas)))
    for j in range(out.shape[0]):
        for i in range(out.shape[1]):
            out[j, i] = expected_psr_sinr(j, i, dep, cfg)
    return out


def classification_round(dep: Deployment, cfg: LinkBudgetConfig, sinr: np.ndarray | None = None) -> np.ndarray:
    """One measurement round: boolean ``(M, N)`` pass/fail outcomes."""
    if sinr is None:
        sinr = sinr_table(dep, cfg)
    allowed = np.array(dep.psr_allowed, dtype=bool)
    return (sinr > cfg.sinr_threshold_db) & allowed[None, :]


def classify_favorability(dep: Deployment, cfg: LinkBudgetConfig) -> FavorabilityMatrix:
    return FavorabilityMatrix.from_array(classification_round(dep, cfg).astype(np.int8))


def windowed_favorable(outcomes: Iterable[bool]) -> bool:
    """A pair stays favorable only if every recent measurement passed."""
    outcomes = list(outcomes)
    if not outcomes:
        raise RuntimeError("no measurements in window")
    return all(outcomes)


class MeasurementWindow:
    """Ring of the ``depth`` most recent classification rounds for all pairs."""

    def __init__(self, depth: int):
        if depth < 1:
            raise InvalidInputError("window depth must be at least 1")
        self.depth = depth
        self._rounds: deque[np.ndarray] = deque(maxlen=depth)

    def __len__(self):
        return len(self._rounds)

    def push(self, outcomes) -> None:
        outcomes = np.asarray(outcomes, dtype=bool)
        if self._rounds and outcomes.shape != self._rounds[0].shape:
            raise InvalidInputError(f"round shape {outcomes.shape} != {self._rounds[0].shape}")
        self._rounds.append(outcomes)

    def outcomes(self, rta_sta: int, nonrta_sta: int) -> list[bool]:
        return [bool(r[rta_sta, nonrta_sta]) for r in self._rounds]

    def favorable(self) -> np.ndarray:
        if not self._rounds:
            raise RuntimeError("no measurements in window")
        return np.logical_and.reduce(np.stack(self._rounds), axis=0)


def classify_windowed(dep: Deployment, cfg: LinkBudgetConfig, rounds: int | None = None) -> FavorabilityMatrix:
    """Favorability after filling a measurement window.

    Measurements are deterministic here, so every round repeats the same
    outcome; the window only matters when rounds differ.
    """
    win = MeasurementWindow(cfg.window)
    sinr = sinr_table(dep, cfg)
    for _ in range(rounds or cfg.window):
        win.push(classification_round(dep, cfg, sinr))
    return FavorabilityMatrix.from_array(win.favorable().astype(np.int8))

