"""Discrete-event model of a saturated non-RTA BSS next to an RTA BSS.

Time advances TXOP by TXOP.  Each TXOP is preceded by a short contention gap
in which RTA stations with queued packets may seize the channel.  The TXOP
itself is split evenly into a downlink half (no PSR) and a trigger-based
uplink half from one non-RTA station.  During that uplink, RTA stations for
which the uplinking station is PSR-favorable may send at reduced power: one
packet each, one after another in random order (the rest sense the medium
busy and defer) until the phase runs out.  ``psr_stations_per_uplink``
limits how many of them get a turn.  Non-RTA stations are served in cycles
in which everyone transmits exactly once; the policy decides the order
within a cycle.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .link import Deployment, LinkBudgetConfig, MeasurementWindow, classification_round
from .metrics import delay_quantile, jain_index, loss_ratio
from .objective import InvalidInputError

DEFAULT_DATA_RATES_MBPS = {0: 8.6, 8: 103.2}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation run needs except the policy and the seed.

    Either ``deployment`` (favorability comes from the link budget) or
    ``favorability`` (explicit favorability vectors, one per non-RTA station,
    each of length M) must be given; the explicit vectors win when both are
    present.
    """

    deployment: Deployment | None = None
    favorability: tuple[tuple[int, ...], ...] | None = None
    link: LinkBudgetConfig = field(default_factory=LinkBudgetConfig)
    t_rta_ms: float = 20.0
    rta_packet_bytes: int = 256
    nonrta_packet_bytes: int = 1000
    rta_mcs: int = 0
    nonrta_mcs: int = 8
    data_rates_mbps: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_DATA_RATES_MBPS))
    txop_ms: float = 5.0
    ppdu_overhead_us: float = 100.0
    gap_us: float = 100.0
    edca_win_probability: float = 0.25
    delay_bound_ms: float = 20.0
    quantile: float = 0.999
    sim_duration_s: float = 60.0
    warmup_fraction: float = 0.1
    psr_stations_per_uplink: int | None = None

    def __post_init__(self):
        if self.deployment is None and self.favorability is None:
            raise InvalidInputError("scenario needs a deployment or an explicit favorability matrix")
        if self.favorability is not None:
            vecs = tuple(tuple(int(v) for v in col) for col in self.favorability)
            if not vecs or len({len(c) for c in vecs}) != 1 or any(v not in (0, 1) for c in vecs for v in c):
                raise InvalidInputError("favorability override must be a rectangular binary matrix")
            object.__setattr__(self, "favorability", vecs)
        if self.deployment is not None and self.deployment.nonrta_mcs != self.nonrta_mcs:
            object.__setattr__(self, "deployment", dataclasses.replace(self.deployment, nonrta_mcs=self.nonrta_mcs))
        checks = [
            (self.t_rta_ms > 0, "t_rta_ms must be positive"),
            (self.txop_ms > 0, "txop_ms must be positive"),
            (0 <= self.edca_win_probability <= 1, "edca_win_probability must lie in [0, 1]"),
            (0 < self.quantile < 1, "quantile must lie in (0, 1)"),
            (self.sim_duration_s > 0, "sim_duration_s must be positive"),
            (0 <= self.warmup_fraction < 1, "warmup_fraction must lie in [0, 1)"),
            (self.gap_us >= 0 and self.ppdu_overhead_us >= 0, "gap and overhead must be non-negative"),
            (self.delay_bound_ms >= 0, "delay_bound_ms must be non-negative"),
            (self.psr_stations_per_uplink is None or self.psr_stations_per_uplink >= 1,
             "psr_stations_per_uplink must be at least 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidInputError(msg)
        for mcs in (self.rta_mcs, self.nonrta_mcs):
            if mcs not in self.data_rates_mbps:
                raise InvalidInputError(f"no data rate configured for MCS {mcs}")
        if self.ppdu_overhead_us >= self.txop_ms * 500:
            raise InvalidInputError("per-PPDU overhead does not fit in half a TXOP")
        object.__setattr__(self, "data_rates_mbps", {int(k): float(v) for k, v in self.data_rates_mbps.items()})

    @property
    def n_nonrta(self) -> int:
        if self.favorability is not None:
            return len(self.favorability)
        return len(self.deployment.nonrta_stas)

    @property
    def n_rta(self) -> int:
        if self.favorability is not None:
            return len(self.favorability[0])
        return len(self.deployment.rta_stas)

    def measurement_round(self) -> np.ndarray:
        """Boolean ``(M, N)`` pass/fail outcomes of one classification round."""
        if self.favorability is not None:
            return np.array(self.favorability, dtype=bool).reshape(self.n_nonrta, self.n_rta).T
        return classification_round(self.deployment, self.link)

    @property
    def rta_airtime_us(self) -> float:
        return self.rta_packet_bytes * 8 / self.data_rates_mbps[self.rta_mcs] + self.ppdu_overhead_us

    @property
    def phase_bytes(self) -> int:
        """Non-RTA payload bytes carried in one half-TXOP (whole packets only)."""
        usable = self.txop_ms * 500 - self.ppdu_overhead_us
        per_phase = usable * self.data_rates_mbps[self.nonrta_mcs] / 8
        return int(per_phase // self.nonrta_packet_bytes) * self.nonrta_packet_bytes

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["data_rates_mbps"] = {str(k): v for k, v in self.data_rates_mbps.items()}
        d["link"]["required_sinr_db"] = {str(k): v for k, v in self.link.required_sinr_db.items()}
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class SchedulePolicy:
    """``baseline`` redraws a random order every cycle; ``fixed`` repeats ``order``."""

    kind: str = "baseline"
    order: tuple[int, ...] | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ("baseline", "fixed"):
            raise InvalidInputError(f"unknown policy kind {self.kind!r}")
        if self.kind == "fixed":
            if self.order is None:
                raise InvalidInputError("fixed policy needs an order")
            object.__setattr__(self, "order", tuple(int(k) for k in self.order))

    @classmethod
    def baseline(cls) -> SchedulePolicy:
        return cls("baseline", None, "baseline")

    @classmethod
    def fixed(cls, order, label: str = "fixed") -> SchedulePolicy:
        return cls("fixed", tuple(order), label)

    @property
    def tag(self) -> str:
        return self.label or self.kind


def airtime_fair_order(n: int, rng: np.random.Generator) -> list[int]:
    """One cycle of the airtime-fairness baseline: a uniformly random order.

    Every station gets one equal-length uplink per cycle; only the order is
    random, so unfavorable stations can land back to back across cycles.
    """
    if n < 1:
        raise InvalidInputError("need at least one station")
    return rng.permutation(n).tolist()


@dataclass(eq=False)
class SimReport:
    seed: int
    policy: str
    config_digest: str
    quantile: float
    delay_bound_ms: float
    delays_ms: np.ndarray
    sources: np.ndarray
    nonrta_bytes: np.ndarray
    measured_s: float
    psr_tx: int = 0
    gap_tx: int = 0
    denied: int = 0
    generated: int = 0
    delivered: int = 0
    queued: int = 0
    uplink_trace: list[int] | None = None

    @property
    def delivered_mask(self) -> np.ndarray:
        return np.isfinite(self.delays_ms)

    @property
    def throughput_mbps(self) -> np.ndarray:
        if self.measured_s <= 0:
            return np.zeros_like(self.nonrta_bytes, dtype=float)
        return self.nonrta_bytes * 8 / (self.measured_s * 1e6)

    @property
    def avg_throughput_mbps(self) -> float:
        tp = self.throughput_mbps
        return float(tp.mean()) if tp.size else float("nan")

    @property
    def jain(self) -> float:
        tp = self.throughput_mbps
        return jain_index(tp) if tp.size and tp.any() else float("nan")

    @property
    def delay_quantile_ms(self) -> float:
        return delay_quantile(self.delays_ms, self.quantile) if self.delays_ms.size else float("nan")

    @property
    def loss_ratio(self) -> float:
        return loss_ratio(self.delays_ms, self.delay_bound_ms) if self.delays_ms.size else float("nan")

    def metrics(self) -> dict[str, float]:
        return {
            "delay_quantile_ms": self.delay_quantile_ms,
            "loss_ratio": self.loss_ratio,
            "avg_throughput_mbps": self.avg_throughput_mbps,
            "jain_index": self.jain,
            "rta_packets": int(self.delays_ms.size),
        }

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "policy": self.policy,
            "config_digest": self.config_digest,
            "quantile": self.quantile,
            "delay_bound_ms": self.delay_bound_ms,
            # JSON has no infinity; undelivered packets are null
            "delays_ms": [float(d) if math.isfinite(d) else None for d in self.delays_ms],
            "sources": self.sources.tolist(),
            "nonrta_bytes": self.nonrta_bytes.tolist(),
            "measured_s": self.measured_s,
            "psr_tx": self.psr_tx,
            "gap_tx": self.gap_tx,
            "denied": self.denied,
            "generated": self.generated,
            "delivered": self.delivered,
            "queued": self.queued,
            "uplink_trace": self.uplink_trace,
        }

    @classmethod
    def from_dict(cls, d: dict) -> SimReport:
        d = dict(d)
        d["delays_ms"] = np.array([math.inf if v is None else v for v in d["delays_ms"]], dtype=float)
        d["sources"] = np.array(d["sources"], dtype=np.int64)
        d["nonrta_bytes"] = np.array(d["nonrta_bytes"], dtype=np.int64)
        return cls(**d)


def run_simulation(cfg: ScenarioConfig, policy: SchedulePolicy, seed: int = 0,
                   trace: bool = False, check_invariants: bool = False) -> SimReport:
    """Simulate ``cfg`` under ``policy``; deterministic in ``(cfg, policy, seed)``."""
    n, m = cfg.n_nonrta, cfg.n_rta
    if n < 1:
        raise InvalidInputError("scenario has no non-RTA stations")
    if policy.kind == "fixed" and sorted(policy.order) != list(range(n)):
        raise InvalidInputError(f"policy order {policy.order} is not a permutation of 0..{n - 1}")

    # independent streams so the order policy never perturbs channel access
    order_ss, access_ss, offset_ss = np.random.SeedSequence(seed).spawn(3)
    order_rng = np.random.default_rng(order_ss)
    access_rng = np.random.default_rng(access_ss)
    offset_rng = np.random.default_rng(offset_ss)

    end = cfg.sim_duration_s * 1e6
    warm = cfg.warmup_fraction * end
    period = cfg.t_rta_ms * 1e3
    half = cfg.txop_ms * 500.0
    gap = cfg.gap_us
    air = cfg.rta_airtime_us
    p_win = cfg.edca_win_probability
    phase_bytes = cfg.phase_bytes
    psr_cap = cfg.psr_stations_per_uplink or m

    next_arrival = (offset_rng.random(m) * period).tolist()
    queues: list[deque[float]] = [deque() for _ in range(m)]
    window = MeasurementWindow(cfg.link.window)
    outcome = cfg.measurement_round()

    out_delay: list[float] = []
    out_src: list[int] = []
    nonrta_bytes = np.zeros(n, dtype=np.int64)
    generated = delivered = psr_tx = gap_tx = denied = 0
    uplinks: list[int] | None = [] if trace else None

    def arrive(until: float) -> None:
        nonlocal generated
        for j in range(m):
            t_next = next_arrival[j]
            while t_next <= until and t_next < end:
                queues[j].append(t_next)
                generated += 1
                t_next += period
            next_arrival[j] = t_next

    def send(j: int, start: float) -> float:
        nonlocal delivered
        enq = queues[j].popleft()
        done = start + air
        delivered += 1
        if enq >= warm:
            out_delay.append((done - enq) / 1e3)
            out_src.append(j)
        return done

    def pick(cands: list[int]) -> int:
        return cands[0] if len(cands) == 1 else cands[int(access_rng.integers(len(cands)))]

    t = 0.0
    # throughput is credited per complete cycle so every station is counted
    # the same number of times
    measure_from = measure_to = None
    cycle_bytes = np.zeros(n, dtype=np.int64)
    cycle_start = 0.0
    cycle: list[int] = []
    pos = 0
    fav = None
    while t < end:
        if pos == len(cycle):
            if cycle and cycle_start >= warm:
                nonrta_bytes += cycle_bytes
                if measure_from is None:
                    measure_from = cycle_start
                measure_to = t
            cycle_bytes[:] = 0
            cycle_start = t
            cycle = list(policy.order) if policy.kind == "fixed" else airtime_fair_order(n, order_rng)
            pos = 0
            window.push(outcome)
            fav = window.favorable()
        sta = cycle[pos]
        pos += 1
        if uplinks is not None:
            uplinks.append(sta)

        # contention gap: RTA stations with backlog try to grab the channel
        t_access = t + gap
        arrive(t_access)
        if m:
            draws = access_rng.random(m)
            attempters = [j for j in range(m) if queues[j] and draws[j] < p_win]
        else:
            attempters = []
        if attempters:
            t_dl = send(pick(attempters), t_access)
            gap_tx += 1
        else:
            t_dl = t_access

        t_ul = t_dl + half
        t_end = t_ul + half
        cycle_bytes[sta] += 2 * phase_bytes

        # trigger-based uplink of `sta`: favorable RTA stations with a packet
        # take turns (random order, one packet each) while the phase lasts
        arrive(t_end)
        cursor = t_ul
        ready = [j for j in range(m) if fav[j, sta] and queues[j]]
        for _ in range(psr_cap):
            if not ready:
                break
            start = max(cursor, min(queues[j][0] for j in ready))
            if start + air > t_end:
                break
            j = pick([j for j in ready if queues[j][0] <= start])
            cursor = send(j, start)
            ready.remove(j)
            psr_tx += 1
        denied += len(ready)
        t = t_end

        if check_invariants:
            backlog = sum(len(q) for q in queues)
            assert generated == delivered + backlog, (generated, delivered, backlog)

    delays = out_delay + [math.inf for j in range(m) for enq in queues[j] if enq >= warm]
    sources = out_src + [j for j in range(m) for enq in queues[j] if enq >= warm]
    return SimReport(
        seed=int(seed),
        policy=policy.tag,
        config_digest=cfg.digest(),
        quantile=cfg.quantile,
        delay_bound_ms=cfg.delay_bound_ms,
        delays_ms=np.array(delays, dtype=float),
        sources=np.array(sources, dtype=np.int64),
        nonrta_bytes=nonrta_bytes,
        measured_s=(measure_to - measure_from) / 1e6 if measure_from is not None else 0.0,
        psr_tx=psr_tx,
        gap_tx=gap_tx,
        denied=denied,
        generated=generated,
        delivered=delivered,
        queued=sum(len(q) for q in queues),
        uplink_trace=uplinks,
    )
