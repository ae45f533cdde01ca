import subprocess
import sys
from pathlib import Path

import pytest

from routewalk.cli import main
from routewalk.errors import ScenarioError
from routewalk.scenario import load_scenario, manifest_text, with_reference

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

TINY = """\
[topology]
builder = cycle
nodes = 3
capacity_bps = 1000000
prop_delay_s = 0.010

[traffic]
pattern = adjacent
packet_size_bytes = 800
interval_s = 0.01

[sim]
duration_s = 2.0
warmup_s = 0.5

[walk]
num_walks = 2
num_steps = 15
max_lag = 10
seed = 7

[output]
dir = {out}
"""


@pytest.fixture
def tiny_scenario(tmp_path):
    def write(name="tiny.scn", text=TINY, out="out"):
        path = tmp_path / name
        path.write_text(text.format(out=tmp_path / out))
        return path

    return write


class TestScenarioLoading:
    def test_shipped_hotspot(self):
        scenario = load_scenario(SCENARIOS / "hotspot-6cycle.scn")
        assert scenario.topology.num_nodes == 6
        assert len(scenario.traffic.flows) == 10
        assert scenario.walk.num_walks == 5
        assert scenario.walk.num_steps == 300
        assert scenario.walk.seed == 42
        assert scenario.sim.queue_limit == 0
        assert scenario.sim.duration_s == 10.0

    def test_shipped_adjacent(self):
        scenario = load_scenario(SCENARIOS / "adjacent-6cycle.scn")
        assert len(scenario.traffic.flows) == 12

    def test_defaults(self, tmp_path):
        path = tmp_path / "min.scn"
        path.write_text(
            "[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = adjacent\n"
        )
        scenario = load_scenario(path)
        assert scenario.sim.duration_s == 30.0
        assert scenario.sim.warmup_s == 5.0
        assert scenario.sim.queue_limit == 0
        assert scenario.walk.num_steps == 10 * 12  # 10 x n(n-1)
        assert scenario.walk.max_lag == min(scenario.walk.num_steps - 1, 200)
        assert scenario.walk.seed == 0
        assert scenario.enum_cap == 2**24
        assert scenario.out_dir == Path("runs/min")

    def test_seed_override(self, tiny_scenario):
        scenario = load_scenario(tiny_scenario(), seed_override=99)
        assert scenario.walk.seed == 99
        assert dict(dict(scenario.resolved)["walk"])["seed"] == "99"

    def test_topology_from_file(self, tmp_path):
        (tmp_path / "net.topo").write_text("nodes 3\nlink 0 1 1e6 0.01\nlink 1 2 1e6 0.01\nlink 2 0 1e6 0.01\n")
        path = tmp_path / "s.scn"
        path.write_text("[topology]\nfile = net.topo\n\n[traffic]\npattern = adjacent\n")
        scenario = load_scenario(path)
        assert scenario.topology.num_nodes == 3
        # manifests inline the file so they stay self-contained
        assert "inline" in dict(dict(scenario.resolved)["topology"])

    def test_inline_topology(self, tmp_path):
        path = tmp_path / "s.scn"
        path.write_text(
            "[topology]\ninline = nodes 2; link 0 1 1e6 0.01\n\n"
            "[traffic]\npattern = adjacent\n"
        )
        assert load_scenario(path).topology.num_nodes == 2

    @pytest.mark.parametrize("direction,count", [("to_hub", 5), ("from_hub", 5), ("both", 10)])
    def test_hotspot_direction_knob(self, tmp_path, direction, count):
        path = tmp_path / "s.scn"
        path.write_text(
            "[topology]\nbuilder = cycle\nnodes = 6\n\n"
            f"[traffic]\npattern = hotspot\nhub = 2\ndirection = {direction}\n"
        )
        flows = load_scenario(path).traffic.flows
        assert len(flows) == count
        if direction == "to_hub":
            assert all(f.dst == 2 for f in flows)
        if direction == "from_hub":
            assert all(f.src == 2 for f in flows)

    @pytest.mark.parametrize(
        "mutation,match",
        [
            ("[topology]\nbuilder = torus\nnodes = 4\n\n[traffic]\npattern = adjacent\n", "builder"),
            ("[topology]\nbuilder = cycle\nnodes = 2\n\n[traffic]\npattern = adjacent\n", "cycle"),
            ("[traffic]\npattern = adjacent\n", "topology"),
            ("[topology]\nbuilder = cycle\nnodes = 4\n", "traffic"),
            ("[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = mesh\n", "pattern"),
            (
                "[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = hotspot\nhub = 9\n",
                "hub",
            ),
            (
                "[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = adjacent\n\n"
                "[sim]\nduration_s = 1.0\nwarmup_s = 2.0\n",
                "duration",
            ),
            (
                "[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = adjacent\n\n"
                "[walk]\nnum_steps = 1\n",
                "num_steps",
            ),
            (
                "[topology]\nbuilder = cycle\nnodes = 4\n\n[traffic]\npattern = adjacent\n\n"
                "[cooling]\nrate = 1\n",
                "unknown sections",
            ),
            (
                "[topology]\nbuilder = cycle\nnodes = 4\nflux = 3\n\n[traffic]\npattern = adjacent\n",
                "unknown keys",
            ),
            (
                "[topology]\nbuilder = cycle\nnodes = four\n\n[traffic]\npattern = adjacent\n",
                "not a valid int",
            ),
        ],
    )
    def test_rejects_bad_scenarios(self, tmp_path, mutation, match):
        path = tmp_path / "bad.scn"
        path.write_text(mutation)
        with pytest.raises(ScenarioError, match=match):
            load_scenario(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="not found"):
            load_scenario(tmp_path / "nope.scn")

    def test_manifest_round_trip(self, tiny_scenario, tmp_path):
        scenario = load_scenario(tiny_scenario())
        manifest = tmp_path / "manifest.scn"
        manifest.write_text(manifest_text(scenario, {"tool": "routewalk"}))
        again = load_scenario(manifest)
        assert again.topology == scenario.topology
        assert again.traffic == scenario.traffic
        assert again.sim == scenario.sim
        assert again.walk == scenario.walk

    def test_with_reference_round_trip(self, tiny_scenario, tmp_path):
        scenario = load_scenario(tiny_scenario())
        scenario = with_reference(scenario, (0,) * 6, 0.0164)
        manifest = tmp_path / "manifest.scn"
        manifest.write_text(manifest_text(scenario, {}))
        again = load_scenario(manifest)
        assert again.reference == ((0,) * 6, 0.0164)

    def test_reference_length_checked(self, tmp_path):
        path = tmp_path / "s.scn"
        path.write_text(
            "[topology]\nbuilder = cycle\nnodes = 3\n\n[traffic]\npattern = adjacent\n\n"
            "[reference]\nconfig = 0,0\nfitness = 1.0\n"
        )
        with pytest.raises(ScenarioError, match="entries"):
            load_scenario(path)


class TestValidateCommand:
    def test_hotspot_summary(self, capsys):
        code = main(["validate", str(SCENARIOS / "hotspot-6cycle.scn")])
        out = capsys.readouterr().out
        assert code == 0
        assert "N = 30" in out
        assert "space_size = 1073741824" in out
        assert "flows = 10" in out

    def test_invalid_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.scn"
        path.write_text("[topology]\nbuilder = cycle\nnodes = 2\n\n[traffic]\npattern = adjacent\n")
        assert main(["validate", str(path)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_dump_routes(self, tmp_path, capsys):
        out_csv = tmp_path / "routes.csv"
        code = main(["validate", str(SCENARIOS / "adjacent-3cycle.scn"),
                     "--dump-routes", str(out_csv)])
        assert code == 0
        assert out_csv.read_text().startswith("pair_index,src,dst,route_index,node_sequence")


class TestWalkCommand:
    def test_writes_all_outputs(self, tiny_scenario, tmp_path, capsys):
        code = main(["walk", str(tiny_scenario())])
        assert code == 0
        out_dir = tmp_path / "out"
        for name in ("correlation.csv", "scatter.csv", "summary.txt", "manifest.scn"):
            assert (out_dir / name).is_file()
        correlation = (out_dir / "correlation.csv").read_text().splitlines()
        assert correlation[0] == "lag,r,samples_at_lag"
        assert len(correlation) == 1 + 11  # lags 0..10
        assert correlation[1].startswith("0,1.0,")
        scatter = (out_dir / "scatter.csv").read_text().splitlines()
        assert scatter[0] == "rank_by_fitness,hamming_distance_to_best,fitness_seconds"
        assert len(scatter) == 1 + 30  # 2 walks x 15 steps
        summary = (out_dir / "summary.txt").read_text()
        assert "fdc = " in summary
        assert "classification = " in summary
        assert "num_samples = 30" in summary

    def test_malformed_scenario_writes_nothing(self, tmp_path, capsys):
        bad = tmp_path / "bad.scn"
        bad.write_text("[topology\nbuilder=cycle\n")
        code = main(["walk", str(bad), "--out", str(tmp_path / "never")])
        assert code == 2
        assert not (tmp_path / "never").exists()

    def test_runtime_failure_writes_nothing(self, tiny_scenario, tmp_path, capsys):
        # Horizon shorter than one hop's delay: nothing can be delivered.
        text = TINY.replace("duration_s = 2.0", "duration_s = 0.01").replace(
            "warmup_s = 0.5", "warmup_s = 0.0"
        )
        path = tiny_scenario(name="degenerate.scn", text=text, out="never")
        code = main(["walk", str(path)])
        assert code == 1
        assert not (tmp_path / "never").exists()
        assert "error:" in capsys.readouterr().err

    def test_manifest_rerun_is_byte_identical(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        assert main(["walk", str(path)]) == 0
        out_dir = tmp_path / "out"
        rerun_dir = tmp_path / "rerun"
        assert main(["walk", str(out_dir / "manifest.scn"), "--out", str(rerun_dir)]) == 0
        for name in ("correlation.csv", "scatter.csv", "summary.txt"):
            assert (out_dir / name).read_bytes() == (rerun_dir / name).read_bytes()

    def test_jobs_do_not_change_outputs(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        assert main(["walk", str(path), "--out", str(tmp_path / "j1"), "--jobs", "1"]) == 0
        assert main(["walk", str(path), "--out", str(tmp_path / "j2"), "--jobs", "2"]) == 0
        for name in ("correlation.csv", "scatter.csv", "summary.txt"):
            assert (tmp_path / "j1" / name).read_bytes() == (tmp_path / "j2" / name).read_bytes()

    def test_seed_override_changes_results_and_manifest(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        assert main(["walk", str(path), "--out", str(tmp_path / "a")]) == 0
        assert main(["walk", str(path), "--out", str(tmp_path / "b"), "--seed", "8"]) == 0
        assert (tmp_path / "a" / "scatter.csv").read_text() != (
            tmp_path / "b" / "scatter.csv"
        ).read_text()
        assert "seed = 8" in (tmp_path / "b" / "manifest.scn").read_text()


class TestEnumerateCommand:
    def test_three_cycle_ground_truth(self, tmp_path, capsys):
        out_dir = tmp_path / "enum"
        code = main(["enumerate", str(SCENARIOS / "adjacent-3cycle.scn"),
                     "--out", str(out_dir)])
        assert code == 0
        rows = (out_dir / "enumeration.csv").read_text().splitlines()
        assert rows[0] == "config_index,config,fitness_seconds"
        assert len(rows) == 1 + 64
        fits = [float(r.split(",")[2]) for r in rows[1:]]
        optimum = (out_dir / "optimum.csv").read_text().splitlines()[1]
        opt_fit = float(optimum.split(",")[2])
        assert opt_fit == min(fits)
        assert all(opt_fit <= f for f in fits)

    def test_refuses_large_space(self, tmp_path, capsys):
        out_dir = tmp_path / "never"
        code = main(["enumerate", str(SCENARIOS / "hotspot-6cycle.scn"),
                     "--out", str(out_dir)])
        assert code == 2
        assert "1073741824" in capsys.readouterr().err
        assert not out_dir.exists()

    def test_jobs_do_not_change_enumeration(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        assert main(["enumerate", str(path), "--out", str(tmp_path / "e1"), "--jobs", "1"]) == 0
        assert main(["enumerate", str(path), "--out", str(tmp_path / "e2"), "--jobs", "3"]) == 0
        for name in ("enumeration.csv", "optimum.csv"):
            assert (tmp_path / "e1" / name).read_bytes() == (tmp_path / "e2" / name).read_bytes()


class TestEnumeratedOptimumFlag:
    def test_walk_uses_external_reference(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        enum_dir = tmp_path / "enum"
        assert main(["enumerate", str(path), "--out", str(enum_dir)]) == 0
        walk_dir = tmp_path / "walk"
        assert main([
            "walk", str(path), "--out", str(walk_dir),
            "--use-enumerated-optimum", str(enum_dir / "optimum.csv"),
        ]) == 0
        summary = (walk_dir / "summary.txt").read_text()
        assert "reference_source = external" in summary
        optimum_fit = float(
            (enum_dir / "optimum.csv").read_text().splitlines()[1].split(",")[2]
        )
        assert f"reference_fitness = {optimum_fit!r}" in summary
        manifest = (walk_dir / "manifest.scn").read_text()
        assert "[reference]" in manifest
        # rerunning the manifest reproduces the run without the CSV flag
        rerun = tmp_path / "rerun"
        assert main(["walk", str(walk_dir / "manifest.scn"), "--out", str(rerun)]) == 0
        assert (walk_dir / "scatter.csv").read_bytes() == (rerun / "scatter.csv").read_bytes()

    def test_full_enumeration_csv_also_accepted(self, tiny_scenario, tmp_path, capsys):
        path = tiny_scenario()
        enum_dir = tmp_path / "enum"
        assert main(["enumerate", str(path), "--out", str(enum_dir)]) == 0
        assert main([
            "walk", str(path), "--out", str(tmp_path / "walk"),
            "--use-enumerated-optimum", str(enum_dir / "enumeration.csv"),
        ]) == 0

    def test_missing_csv_is_validation_error(self, tiny_scenario, tmp_path, capsys):
        assert main([
            "walk", str(tiny_scenario()), "--out", str(tmp_path / "walk"),
            "--use-enumerated-optimum", str(tmp_path / "nope.csv"),
        ]) == 2


class TestProcessEntry:
    def test_subprocess_exit_codes(self, tmp_path):
        ok = subprocess.run(
            [sys.executable, "-m", "routewalk.cli", "validate",
             str(SCENARIOS / "adjacent-3cycle.scn")],
            capture_output=True, text=True,
        )
        assert ok.returncode == 0
        bad = subprocess.run(
            [sys.executable, "-m", "routewalk.cli", "validate", str(tmp_path / "no.scn")],
            capture_output=True, text=True,
        )
        assert bad.returncode == 2
        assert "error:" in bad.stderr

    def test_log_env_var(self):
        import os

        env = dict(os.environ, ROUTEWALK_LOG="DEBUG")
        run = subprocess.run(
            [sys.executable, "-m", "routewalk.cli", "validate",
             str(SCENARIOS / "adjacent-3cycle.scn")],
            capture_output=True, text=True, env=env,
        )
        assert run.returncode == 0
