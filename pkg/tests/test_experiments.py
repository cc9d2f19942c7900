import numpy as np
import pytest

from hybridfb import (
    ScenarioConfig,
    Scheme,
    db_to_linear,
    derived_rng,
    load_config,
    run_bound,
    run_classify,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    scenario_profiles,
    validate_config,
)
from hybridfb.cli import main

TINY = """
num_antennas = 8
num_users = 3
num_paths = 4
b_total = 6
p_d_grid_db = 0, 10
p_d_db = 10
k_grid = 2, 3
b_total_grid = 3, 6
trials = 5
seed = 1
leakage_margin = 2
"""


class TestValidateConfig:
    def test_empty_text_gives_defaults(self):
        cfg = validate_config("")
        assert cfg.num_antennas == 128
        assert cfg.num_users == 10
        assert cfg.b_total == 40
        assert cfg.leakage_margin == 10
        assert cfg.scheme == Scheme.HYBRID

    def test_round_trips_comments_and_values(self):
        cfg = validate_config(TINY + "# trailing comment\n\nscheme = ConventionalDFT\n")
        assert cfg.num_antennas == 8
        assert cfg.p_d_grid_db == (0.0, 10.0)
        assert cfg.k_grid == (2, 3)
        assert cfg.scheme == Scheme.CONV_DFT

    def test_rejects_nonpositive_trials(self):
        with pytest.raises(ValueError, match="trials"):
            validate_config("trials = -3\nnum_users = 1\nb_total = 4")

    def test_rejects_unknown_keys_with_line_numbers(self):
        with pytest.raises(ValueError, match="line 1"):
            validate_config("mystery = 1")

    def test_rejects_bad_enum(self):
        with pytest.raises(ValueError, match="scheme"):
            validate_config("scheme = Magic")

    def test_warns_when_budget_floors_to_zero_bits(self):
        with pytest.warns(UserWarning, match="zero bits"):
            validate_config("num_users = 20\nb_total = 10")

    def test_loads_from_file(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text(TINY)
        assert load_config(path) == validate_config(TINY)


class TestScenarioProfiles:
    def test_prefix_stability_across_user_counts(self):
        cfg = validate_config(TINY)
        small = scenario_profiles(cfg, num_users=2)
        big = scenario_profiles(cfg, num_users=3)
        for a, b in zip(small, big):
            assert a.mean_aoa == b.mean_aoa
            np.testing.assert_array_equal(a.path_angles, b.path_angles)

    def test_stream_split_is_stable(self):
        a = derived_rng(3, 0, 1).random(4)
        b = derived_rng(3, 0, 1).random(4)
        c = derived_rng(3, 0, 2).random(4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)


class TestRunners:
    def test_fig1_rows_and_curves(self):
        cfg = validate_config(TINY)
        csv = run_fig1(cfg)
        lines = csv.strip().split("\n")
        header = lines[0].split(",")
        assert header[0] == "scenario_id" and "sum_rate" in header
        assert len(lines) == 1 + 2 * 3  # two grid points, three curves
        curves = {line.split(",")[2] for line in lines[1:]}
        assert curves == {"monte_carlo", "lower_bound"}

    def test_fig1_with_no_users_is_all_zero(self):
        cfg = validate_config("num_users = 0\nnum_antennas = 8\ntrials = 2\np_d_grid_db = 5")
        csv = run_fig1(cfg)
        rates = [float(line.split(",")[-2]) for line in csv.strip().split("\n")[1:]]
        assert rates == [0.0, 0.0, 0.0]

    def test_fig2_has_four_labelled_curves(self):
        cfg = validate_config(TINY)
        csv = run_fig2(cfg)
        lines = csv.strip().split("\n")[1:]
        assert len(lines) == 2 * 4
        pairs = {(line.split(",")[3], line.split(",")[4]) for line in lines}
        assert pairs == {
            ("HybridProposed", "dft"),
            ("HybridProposed", "skewed"),
            ("ConventionalDFT", "dft"),
            ("ConventionalSkewed", "skewed"),
        }

    def test_fig3_sweeps_users(self):
        cfg = validate_config(TINY)
        csv = run_fig3(cfg)
        ks = {line.split(",")[6] for line in csv.strip().split("\n")[1:]}
        assert ks == {"2", "3"}

    def test_fig4_sweeps_budget(self):
        cfg = validate_config(TINY)
        csv = run_fig4(cfg)
        budgets = {line.split(",")[8] for line in csv.strip().split("\n")[1:]}
        assert budgets == {"3", "6"}

    def test_classify_emits_one_row_per_user_per_point(self):
        cfg = validate_config(TINY)
        lines = run_classify(cfg).strip().split("\n")
        assert len(lines) == 1 + 2 * 3
        labels = {line.split(",")[13] for line in lines[1:]}
        assert labels <= {"I", "S"}

    def test_bound_runner_matches_fig1_bound_rows(self):
        cfg = validate_config(TINY)
        bound_rows = run_bound(cfg).strip().split("\n")[1:]
        fig1_rows = [
            line for line in run_fig1(cfg).strip().split("\n")[1:]
            if line.split(",")[2] == "lower_bound"
        ]
        bound_vals = [line.split(",")[-2] for line in bound_rows]
        fig1_vals = [line.split(",")[-2] for line in fig1_rows]
        assert bound_vals == fig1_vals


class TestDeterminism:
    @pytest.mark.parametrize("runner", [run_fig1, run_fig2, run_fig3, run_fig4, run_classify, run_bound])
    def test_repeat_runs_are_byte_identical(self, runner):
        cfg = validate_config(TINY)
        assert runner(cfg) == runner(cfg)

    @pytest.mark.parametrize("runner", [run_fig1, run_fig2])
    def test_thread_count_does_not_change_bytes(self, runner):
        cfg = validate_config(TINY)
        assert runner(cfg, threads=1) == runner(cfg, threads=3)

    def test_seed_changes_results(self):
        cfg = validate_config(TINY)
        import dataclasses

        other = dataclasses.replace(cfg, seed=2)
        assert run_fig1(cfg) != run_fig1(other)


class TestCli:
    def test_writes_csv_file(self, tmp_path):
        cfg_path = tmp_path / "s.cfg"
        cfg_path.write_text(TINY)
        out = tmp_path / "out.csv"
        code = main(["fig1", "--config", str(cfg_path), "--out", str(out), "--threads", "2"])
        assert code == 0
        text = out.read_text()
        assert text.startswith("scenario_id,")
        assert len(text.strip().split("\n")) == 7

    def test_stdout_mode_and_overrides(self, tmp_path, capsys):
        cfg_path = tmp_path / "s.cfg"
        cfg_path.write_text(TINY)
        code = main(["bound", "--config", str(cfg_path), "--seed", "9", "--trials", "2"])
        assert code == 0
        text = capsys.readouterr().out
        assert ",9," in text  # overridden seed shows up in the rows

    def test_bad_config_exits_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "bad.cfg"
        cfg_path.write_text("mystery = 1\n")
        assert main(["fig1", "--config", str(cfg_path)]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_invalid_overrides_exit_2(self, tmp_path, capsys):
        assert main(["bound", "--trials", "0", "--out", str(tmp_path / "x.csv")]) == 2
        assert "trials" in capsys.readouterr().err
        assert main(["bound", "--seed", "-5", "--out", str(tmp_path / "x.csv")]) == 2
        assert "seed" in capsys.readouterr().err

    def test_defaults_without_config(self, tmp_path):
        out = tmp_path / "c.csv"
        code = main([
            "classify", "--out", str(out), "--trials", "1", "--seed", "0",
        ])
        assert code == 0
        assert out.read_text().count("\n") >= 2
