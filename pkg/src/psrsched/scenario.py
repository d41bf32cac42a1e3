"""Scenario files: JSON documents describing geometry, radio, traffic and run
parameters, plus seeded random placement of the non-RTA stations.

Precedence is: explicit overrides (command line) > values in the file >
built-in defaults.  Unknown keys are rejected with the key path and, when the
document came from text, the line it appears on.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .link import Deployment, Floorplan, LinkBudgetConfig, NodePosition
from .objective import InvalidInputError
from .sim import DEFAULT_DATA_RATES_MBPS, ScenarioConfig

CONFIG_DIR_ENV = "PSRSCHED_CONFIG_DIR"

# derive_seed stream tags
PLACEMENT_STREAM = 1
SIM_STREAM = 2
BENCH_STREAM = 3


class ScenarioError(InvalidInputError):
    pass


GEOMETRY_KEYS = {"apartments", "interior_walls", "nonrta_ap", "rta_ap", "rta_stas", "nonrta_stas", "psr_allowed"}
RANDOM_PLACEMENT_KEYS = {"count", "apartment", "min_ap_distance_m"}
RADIO_KEYS = {f.name for f in dataclasses.fields(LinkBudgetConfig)}
TRAFFIC_KEYS = {"t_rta_ms", "rta_packet_bytes", "nonrta_packet_bytes", "rta_mcs", "nonrta_mcs", "data_rates_mbps"}
SIMULATION_KEYS = {
    "duration_s", "warmup_fraction", "txop_ms", "ppdu_overhead_us", "gap_us", "edca_win_probability",
    "delay_bound_ms", "quantile", "seeds", "placements", "psr_stations_per_uplink",
}
FAVORABILITY_KEYS = {"vectors"}
TOP_KEYS = {"name", "description", "seed", "geometry", "radio", "traffic", "simulation", "favorability"}

DEFAULT_GEOMETRY = {
    "apartments": [[0.0, 0.0, 10.0, 7.0], [13.0, 0.0, 23.0, 7.0]],
    "interior_walls": [],
    "nonrta_ap": [9.5, 3.5],
    "rta_ap": [13.5, 3.5],
    "rta_stas": [[15.5, 0.5], [13.5, 5.5]],
    "nonrta_stas": {"random": {"count": 8, "apartment": 0, "min_ap_distance_m": 0.5}},
}


def derive_seed(root: int, *path: int) -> int:
    """Child seed for an independent stream identified by ``path``."""
    return int(np.random.SeedSequence([int(root), *map(int, path)]).generate_state(1)[0])


def random_placement(floorplan: Floorplan, apartment: int, count: int, rng: np.random.Generator,
                     avoid: tuple[NodePosition, ...] = (), min_distance: float = 0.5) -> list[NodePosition]:
    """Uniform positions inside one apartment, rejecting points too close to ``avoid``."""
    x0, y0, x1, y1 = floorplan.apartments[apartment]
    out = []
    while len(out) < count:
        p = NodePosition(*rng.uniform((x0, y0), (x1, y1)))
        if all(p.distance(a) >= min_distance for a in avoid):
            out.append(p)
    return out


@dataclass(frozen=True)
class Scenario:
    """Validated scenario document; ``config(k)`` yields the run configuration
    for placement ``k``."""

    name: str
    root_seed: int
    floorplan: Floorplan | None
    nonrta_ap: NodePosition | None
    rta_ap: NodePosition | None
    rta_stas: tuple[NodePosition, ...]
    nonrta_fixed: tuple[NodePosition, ...] | None
    random_count: int
    random_apartment: int
    min_ap_distance_m: float
    psr_allowed: tuple[bool, ...] | None
    favorability: tuple[tuple[int, ...], ...] | None
    base: ScenarioConfig
    seeds: int = 1
    placements: int = 20
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_geometric(self) -> bool:
        return self.favorability is None

    @property
    def randomized(self) -> bool:
        return self.is_geometric and self.nonrta_fixed is None

    def deployment(self, placement: int = 0) -> Deployment:
        if not self.is_geometric:
            raise ScenarioError("scenario uses an explicit favorability matrix and has no geometry")
        if self.nonrta_fixed is not None:
            stas = self.nonrta_fixed
        else:
            rng = np.random.default_rng(derive_seed(self.root_seed, PLACEMENT_STREAM, placement))
            stas = random_placement(self.floorplan, self.random_apartment, self.random_count, rng,
                                    (self.nonrta_ap, self.rta_ap), self.min_ap_distance_m)
        return Deployment(self.nonrta_ap, self.rta_ap, tuple(stas), self.rta_stas, self.floorplan,
                          self.psr_allowed, self.base.nonrta_mcs)

    def config(self, placement: int = 0, **changes) -> ScenarioConfig:
        cfg = self.base
        if self.is_geometric:
            cfg = dataclasses.replace(cfg, deployment=self.deployment(placement))
        return dataclasses.replace(cfg, **changes) if changes else cfg

    def sim_seed(self, placement: int, k: int) -> int:
        return derive_seed(self.root_seed, SIM_STREAM, placement, k)


def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return ""
    return f" (line {text.count(chr(10), 0, m.start()) + 1})"


def _check_keys(section: dict, allowed: set[str], where: str, text: str | None) -> None:
    if not isinstance(section, dict):
        raise ScenarioError(f"{where}: expected an object")
    for key in section:
        if key not in allowed:
            raise ScenarioError(f"{where}.{key}: unknown key{_line_of(text, key)}".lstrip("."))


def _point(v, where: str) -> NodePosition:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ScenarioError(f"{where}: expected [x, y] in metres")
    try:
        return NodePosition(float(v[0]), float(v[1]))
    except (TypeError, ValueError, InvalidInputError) as e:
        raise ScenarioError(f"{where}: {e}") from None


def apply_overrides(doc: dict, overrides: dict[str, Any] | None) -> dict:
    """Return a copy of ``doc`` with dotted-path ``overrides`` applied."""
    doc = copy.deepcopy(doc)
    for path, value in (overrides or {}).items():
        if value is None:
            continue
        node = doc
        *parents, leaf = path.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    return doc


def parse_scenario(doc: dict, text: str | None = None, name: str = "scenario") -> Scenario:
    _check_keys(doc, TOP_KEYS, "", text)
    for sec, keys in (("radio", RADIO_KEYS), ("traffic", TRAFFIC_KEYS), ("simulation", SIMULATION_KEYS),
                      ("favorability", FAVORABILITY_KEYS)):
        if sec in doc:
            _check_keys(doc[sec], keys, sec, text)

    fav = None
    if "favorability" in doc:
        vecs = doc["favorability"].get("vectors")
        if not isinstance(vecs, list) or not vecs:
            raise ScenarioError("favorability.vectors: expected a non-empty list of vectors")
        if any(not isinstance(v, list) for v in vecs) or len({len(v) for v in vecs}) != 1:
            raise ScenarioError("favorability.vectors: vectors must be lists of equal length (rectangular)")
        if any(e not in (0, 1) or isinstance(e, bool) for v in vecs for e in v):
            raise ScenarioError("favorability.vectors: entries must be 0 or 1")
        fav = tuple(tuple(v) for v in vecs)

    geo = None
    if fav is None or "geometry" in doc:
        geo = dict(DEFAULT_GEOMETRY)
        if "geometry" in doc:
            _check_keys(doc["geometry"], GEOMETRY_KEYS, "geometry", text)
            geo.update(doc["geometry"])

    radio = dict(doc.get("radio", {}))
    if "required_sinr_db" in radio:
        radio["required_sinr_db"] = {int(k): v for k, v in radio["required_sinr_db"].items()}
    try:
        link = LinkBudgetConfig(**radio)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"radio: {e}") from None

    traffic = dict(doc.get("traffic", {}))
    if "data_rates_mbps" in traffic:
        traffic["data_rates_mbps"] = {int(k): v for k, v in traffic["data_rates_mbps"].items()}
    sim = dict(doc.get("simulation", {}))
    seeds = int(sim.pop("seeds", 1))
    placements = int(sim.pop("placements", 20))
    if seeds < 1 or placements < 1:
        raise ScenarioError("simulation.seeds and simulation.placements must be at least 1")
    if "duration_s" in sim:
        sim["sim_duration_s"] = sim.pop("duration_s")
    traffic.setdefault("data_rates_mbps", dict(DEFAULT_DATA_RATES_MBPS))

    floorplan = nonrta_ap = rta_ap = None
    rta_stas: tuple[NodePosition, ...] = ()
    fixed = None
    count, apartment, min_d = 0, 0, 0.5
    allowed = None
    if geo is not None:
        try:
            floorplan = Floorplan(tuple(tuple(float(c) for c in a) for a in geo["apartments"]),
                                  tuple(tuple(tuple(float(c) for c in p) for p in w) for w in geo["interior_walls"]))
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"geometry.apartments: {e}") from None
        nonrta_ap = _point(geo["nonrta_ap"], "geometry.nonrta_ap")
        rta_ap = _point(geo["rta_ap"], "geometry.rta_ap")
        rta_stas = tuple(_point(p, f"geometry.rta_stas[{k}]") for k, p in enumerate(geo["rta_stas"]))
        stas_spec = geo["nonrta_stas"]
        if isinstance(stas_spec, dict):
            _check_keys(stas_spec, {"random"}, "geometry.nonrta_stas", text)
            rnd = stas_spec.get("random", {})
            _check_keys(rnd, RANDOM_PLACEMENT_KEYS, "geometry.nonrta_stas.random", text)
            count = int(rnd.get("count", 8))
            apartment = int(rnd.get("apartment", 0))
            min_d = float(rnd.get("min_ap_distance_m", 0.5))
            if count < 1:
                raise ScenarioError("geometry.nonrta_stas.random.count must be at least 1")
            if not 0 <= apartment < len(floorplan.apartments):
                raise ScenarioError("geometry.nonrta_stas.random.apartment: no such apartment")
        else:
            fixed = tuple(_point(p, f"geometry.nonrta_stas[{k}]") for k, p in enumerate(stas_spec))
            if not fixed:
                raise ScenarioError("geometry.nonrta_stas: at least one station required")
        if "psr_allowed" in geo:
            allowed = tuple(bool(a) for a in geo["psr_allowed"])
            n = len(fixed) if fixed is not None else count
            if len(allowed) != n:
                raise ScenarioError(f"geometry.psr_allowed: expected {n} flags, got {len(allowed)}")

    # placeholder deployment so the base config validates; replaced per placement
    placeholder = None
    if fav is None:
        dummy = fixed if fixed is not None else tuple(NodePosition(0.0, 0.0) for _ in range(count))
        placeholder = Deployment(nonrta_ap, rta_ap, dummy, rta_stas, floorplan, allowed)
    try:
        base = ScenarioConfig(deployment=placeholder, favorability=fav, link=link, **traffic, **sim)
    except TypeError as e:
        raise ScenarioError(f"invalid traffic/simulation parameter: {e}") from None
    except InvalidInputError as e:
        raise ScenarioError(str(e)) from None

    return Scenario(
        name=str(doc.get("name", name)),
        root_seed=int(doc.get("seed", 0)),
        floorplan=floorplan if fav is None else None,
        nonrta_ap=nonrta_ap,
        rta_ap=rta_ap,
        rta_stas=rta_stas,
        nonrta_fixed=fixed,
        random_count=count,
        random_apartment=apartment,
        min_ap_distance_m=min_d,
        psr_allowed=allowed,
        favorability=fav,
        base=base,
        seeds=seeds,
        placements=placements,
        raw=doc,
    )


def resolve_scenario_path(ref: str | os.PathLike) -> Path:
    """Find a scenario: as given, under ``$PSRSCHED_CONFIG_DIR``, or bundled by name."""
    p = Path(ref)
    if p.is_file():
        return p
    env = os.environ.get(CONFIG_DIR_ENV)
    if env and not p.is_absolute():
        for cand in (Path(env) / p, Path(env) / f"{p}.json"):
            if cand.is_file():
                return cand
    bundled = resources.files("psrsched") / "scenarios"
    for cand in (bundled / p.name, bundled / f"{p.name}.json"):
        if cand.is_file():
            return Path(str(cand))
    raise ScenarioError(f"scenario file not found: {ref}")


def load_scenario(ref: str | os.PathLike, overrides: dict[str, Any] | None = None) -> Scenario:
    path = resolve_scenario_path(ref)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_scenario(apply_overrides(doc, overrides), text, name=path.stem)
