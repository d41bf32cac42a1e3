import json

import numpy as np
import pytest

from psrsched.experiment import compare_policies, favorability_for, policy_for, summarize
from psrsched.scenario import (
    CONFIG_DIR_ENV,
    ScenarioError,
    apply_overrides,
    derive_seed,
    load_scenario,
    parse_scenario,
    resolve_scenario_path,
)


def test_defaults_apply():
    sc = parse_scenario({})
    assert sc.is_geometric and sc.randomized
    cfg = sc.config(0)
    assert cfg.n_nonrta == 8 and cfg.n_rta == 2
    assert cfg.link.sinr_threshold_db == 3 and cfg.link.psr_safety_margin_db == 1
    assert cfg.t_rta_ms == 20 and cfg.quantile == 0.999 and cfg.delay_bound_ms == 20
    assert sc.placements == 20 and sc.seeds == 1


def test_random_placement_seeded_and_inside():
    sc = parse_scenario({"seed": 11})
    a, b, c = sc.deployment(0), sc.deployment(0), sc.deployment(1)
    assert a == b and a != c
    for p in a.nonrta_stas:
        assert sc.floorplan.contains(p, 0)
        assert p.distance(sc.nonrta_ap) >= 0.5
    assert parse_scenario({"seed": 12}).deployment(0) != a


def test_derive_seed_streams():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert len({derive_seed(1, 2, k) for k in range(50)}) == 50
    assert derive_seed(1, 1, 0) != derive_seed(1, 2, 0)


def test_fixed_positions_and_psr_flags():
    sc = parse_scenario({"geometry": {"nonrta_stas": [[1, 1], [2, 2], [3, 3]], "psr_allowed": [True, False, True]}})
    assert not sc.randomized
    dep = sc.deployment(5)
    assert len(dep.nonrta_stas) == 3 and dep.psr_allowed == (True, False, True)
    assert favorability_for(sc.config(0)).to_array()[:, 1].tolist() == [0, 0]


def test_favorability_override():
    sc = parse_scenario({"favorability": {"vectors": [[1, 0], [0, 1], [1, 0], [0, 1]]}})
    assert not sc.is_geometric
    cfg = sc.config(3)
    assert favorability_for(cfg).to_array().tolist() == [[1, 0, 1, 0], [0, 1, 0, 1]]
    pol, sol = policy_for("brute", cfg)
    assert sol.objective == (1, 1) and pol.kind == "fixed"
    with pytest.raises(ScenarioError):
        sc.deployment(0)


def test_override_with_no_rta_rows():
    sc = parse_scenario({"favorability": {"vectors": [[], [], []]}})
    assert sc.config(0).n_nonrta == 3 and sc.config(0).n_rta == 0


@pytest.mark.parametrize("doc, fragment", [
    ({"bogus": 1}, "bogus: unknown key"),
    ({"radio": {"wal_loss_db": 5}}, "radio.wal_loss_db"),
    ({"geometry": {"rta_sta": []}}, "geometry.rta_sta"),
    ({"geometry": {"nonrta_stas": {"random": {"cnt": 3}}}}, "geometry.nonrta_stas.random.cnt"),
    ({"simulation": {"quantile": 1.5}}, "quantile"),
    ({"radio": {"channel_width_mhz": 0}}, "channel_width_mhz"),
    ({"favorability": {"vectors": [[1, 0], [1]]}}, "rectangular"),
    ({"favorability": {"vectors": [[1, 2]]}}, "0 or 1"),
    ({"geometry": {"nonrta_ap": [1]}}, "geometry.nonrta_ap"),
    ({"geometry": {"psr_allowed": [True]}}, "psr_allowed"),
    ({"simulation": {"seeds": 0}}, "seeds"),
])
def test_validation_names_offending_key(doc, fragment):
    with pytest.raises(ScenarioError, match=fragment.replace(".", r"\.").replace("[", r"\[")):
        parse_scenario(doc)


def test_line_number_in_diagnostic(tmp_path):
    f = tmp_path / "s.json"
    f.write_text('{\n  "seed": 3,\n  "traffic": {\n    "t_rta": 20\n  }\n}\n')
    with pytest.raises(ScenarioError, match=r"traffic\.t_rta: unknown key \(line 4\)"):
        load_scenario(f)
    f.write_text('{\n  "seed": 3,\n  "traffic": {\n')
    with pytest.raises(ScenarioError, match="line 4"):
        load_scenario(f)


def test_precedence_cli_over_file_over_defaults(tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"traffic": {"t_rta_ms": 25}, "radio": {"wall_loss_db": 7}}))
    sc = load_scenario(f)
    assert sc.base.t_rta_ms == 25 and sc.base.link.wall_loss_db == 7 and sc.base.txop_ms == 5
    sc = load_scenario(f, {"traffic.t_rta_ms": 30, "simulation.txop_ms": 4})
    assert sc.base.t_rta_ms == 30 and sc.base.link.wall_loss_db == 7 and sc.base.txop_ms == 4
    assert apply_overrides({"a": {"b": 1}}, {"a.b": None}) == {"a": {"b": 1}}


def test_resolution_order(tmp_path, monkeypatch):
    assert resolve_scenario_path("two_apartments_m2").name == "two_apartments_m2.json"
    (tmp_path / "two_apartments_m2.json").write_text(json.dumps({"name": "mine", "seed": 1}))
    monkeypatch.setenv(CONFIG_DIR_ENV, str(tmp_path))
    assert load_scenario("two_apartments_m2").name == "mine"
    with pytest.raises(ScenarioError, match="not found"):
        load_scenario("no_such_scenario")


@pytest.mark.parametrize("name", ["two_apartments_m2", "two_apartments_m4", "alternating"])
def test_bundled_scenarios_load(name):
    sc = load_scenario(name)
    assert sc.name == name
    sc.config(0)


def test_summarize_handles_nan():
    s = summarize([{"a": 1.0, "b": float("nan")}, {"a": 3.0, "b": float("nan")}])
    assert s["a"] == {"mean": 2.0, "min": 1.0, "max": 3.0}
    assert np.isnan(s["b"]["mean"])


def test_compare_policies_small():
    sc = parse_scenario({"simulation": {"duration_s": 10}})
    res = compare_policies(sc, 20, placements=2, policies=("baseline", "greedy"))
    assert set(res) == {"baseline", "greedy"}
    assert res["greedy"]["rta_packets"] > 0
