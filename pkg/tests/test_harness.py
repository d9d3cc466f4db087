"""Tests for configuration parsing, the experiment registry, CSV output,
goldens, and the command-line interface."""

import numpy as np
import pytest

from sobspec.cli import main
from sobspec.harness import (
    CSV_HEADER,
    EIGEN_HEADER,
    PROFILE_HEADER,
    REGISTRY,
    ConfigError,
    ExperimentConfig,
    RunResult,
    check_goldens,
    emit_csv,
    emit_plotdata,
    format_csv,
    golden_manifest,
    nominal_dt,
    parse_config,
    registry_ids,
    run_experiment,
    write_goldens,
)

EXPECTED_IDS = ["problem1", "problem2", "nonsmooth_pulse", "nonsmooth_tent",
                "nonsmooth_pq", "nonsmooth_pq_dt2", "riemann_a", "riemann_b",
                "eigen_bn", "custom"]


class TestRegistry:
    def test_expected_experiments_present(self):
        assert registry_ids() == EXPECTED_IDS

    def test_entries_documented(self):
        for entry in REGISTRY.values():
            assert entry.kind in ("errors", "eigen", "profiles")
            assert entry.description


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config('experiment = "eigen_bn"')
        assert cfg.experiment == "eigen_bn"
        assert cfg.N is None and cfg.dt is None

    def test_scalars_promote_to_lists(self):
        cfg = parse_config('experiment = "custom"\nN = 16\ndt = 0.1')
        assert cfg.N == [16] and cfg.dt == [0.1]

    def test_full_custom_config(self):
        cfg = parse_config(
            'experiment = "custom"\n'
            'method = "legendre_gni"\n'
            'integrator = "gamma_half"\n'
            'N = [16, 32]\n'
            'dt_rule = "half_h"\n'
            'T = 1.0\n'
            'domain = [-2.0, 2.0]\n'
            'a = 1.0\nbeta = -1.0\n'
            'flux = "porous"\ninitial = "riemann"\n'
            'S_L = 0.9\nS_R = 0.0\n'
            'output = "out.csv"\n')
        assert cfg.domain == (-2.0, 2.0)
        assert cfg.flux == "porous" and cfg.S_L == 0.9

    @pytest.mark.parametrize("text,fragment", [
        ("experiment = 3", "unknown experiment"),
        ('experiment = "nope"', "unknown experiment"),
        ('experiment = "custom"\nwidget = 1', "unknown config keys"),
        ('N = 8', "must name an experiment"),
        ('experiment = "custom"\nmethod = "fem"', "method must be"),
        ('experiment = "custom"\nmethod = 7', "must be a string"),
        ('experiment = "custom"\nintegrator = "rk4"', "integrator must be"),
        ('experiment = "custom"\ndt_rule = "cfl"', "dt_rule must be"),
        ('experiment = "custom"\nflux = "cubic"', "flux must be"),
        ('experiment = "custom"\ninitial = "spike"', "initial must be"),
        ('experiment = "custom"\ndt = 0.1\ndt_rule = "half_h"', "not both"),
        ('experiment = "custom"\nN = 1', "N must be"),
        ('experiment = "custom"\nN = [8, true]', "N must be"),
        ('experiment = "custom"\ndt = "fast"', "entries must be numbers"),
        ('experiment = "custom"\nP = 1', "P must be"),
        ('experiment = "custom"\ndomain = [2.0, -1.0]', "domain must be"),
        ('experiment = "custom"\ndomain = [0.0, 1.0, 2.0]', "domain must be"),
        ('experiment = "custom"\nT = -1.0', "T must be positive"),
        ('experiment = = "custom"', "config parse error"),
    ])
    def test_rejections(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text)


class TestNominalDt:
    def test_rules(self):
        assert nominal_dt("half_h", 64) == 1.0 / 64.0
        assert nominal_dt("quarter_h_squared", 32) == (2.0 / 32.0) ** 2 / 4.0

    def test_unknown_rule_rejected(self):
        with pytest.raises(ConfigError, match="rule"):
            nominal_dt("cfl", 16)


class TestRunExperiment:
    def test_eigen_run_shape(self):
        result = run_experiment(ExperimentConfig(experiment="eigen_bn"))
        assert result.kind == "eigen"
        assert len(result.eigen_rows) == 18  # three degrees, six values each
        assert [row[0] for row in result.eigen_rows[:6]] == [16] * 6
        assert [row[1] for row in result.eigen_rows[:6]] == [1, 2, 3, 4, 5, 6]

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            run_experiment(ExperimentConfig(experiment="nope"))

    def test_step_count_rounding_adjusts_dt(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8], dt=[0.3],
                               T=1.0, integrator="gamma_half")
        result = run_experiment(cfg)
        rep = result.error_groups[0][0]
        assert rep.dt == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_explicit_dt_overrides_registry_rule(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8], dt=[0.25],
                               T=0.5, integrator="gamma_half")
        result = run_experiment(cfg)
        assert [rep.dt for rep in result.error_groups[0]] == [0.25]

    def test_default_integrators_give_two_groups(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8, 16], T=0.25)
        result = run_experiment(cfg)
        assert len(result.error_groups) == 2
        assert {rep.integrator for rep in result.error_groups[0]} == {"gamma_half"}
        assert {rep.integrator for rep in result.error_groups[1]} == {"gamma_third_order"}
        assert [rep.N for rep in result.error_groups[0]] == [8, 16]

    def test_dt_ladder_needs_single_resolution(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8, 16],
                               dt=[0.1, 0.05], T=1.0)
        with pytest.raises(ConfigError, match="single N"):
            run_experiment(cfg)

    def test_custom_requires_solver_fields(self):
        with pytest.raises(ConfigError, match="custom experiment needs"):
            run_experiment(ExperimentConfig(experiment="custom"))

    def test_custom_riemann_requires_states(self):
        cfg = ExperimentConfig(experiment="custom", method="legendre_gni",
                               N=[16], dt=[0.1], T=0.2, domain=(-1.0, 1.0),
                               initial="riemann")
        with pytest.raises(ConfigError, match="S_L and S_R"):
            run_experiment(cfg)

    def test_custom_profile_run(self):
        cfg = ExperimentConfig(experiment="custom", method="legendre_gni",
                               N=[8], dt=[0.1], T=0.2, domain=(-1.0, 1.0),
                               initial="sin_pi", a=1.0, beta=-1.0,
                               snapshot_times=[0.0, 0.2])
        result = run_experiment(cfg)
        assert result.kind == "profiles"
        times = sorted({row[0] for row in result.profile_rows})
        assert times == [0.0, 0.2]
        assert len(result.profile_rows) == 2 * 9


class TestThreading:
    def test_invalid_thread_count_rejected(self, monkeypatch):
        monkeypatch.setenv("SOBSPEC_THREADS", "many")
        with pytest.raises(ConfigError, match="SOBSPEC_THREADS"):
            run_experiment(ExperimentConfig(experiment="nonsmooth_pulse",
                                            N=[8], T=0.25))

    def test_threaded_run_is_byte_identical(self, monkeypatch):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8, 16], T=0.25)
        monkeypatch.setenv("SOBSPEC_THREADS", "1")
        serial = format_csv(run_experiment(cfg))
        monkeypatch.setenv("SOBSPEC_THREADS", "2")
        threaded = format_csv(run_experiment(cfg))
        assert serial == threaded


class TestFormatCsv:
    def test_error_header_only_when_empty(self):
        result = RunResult(kind="errors", experiment="demo")
        assert format_csv(result) == CSV_HEADER + "\n"

    def test_single_report_has_no_rates(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8], T=0.25,
                               integrator="gamma_half")
        text = format_csv(run_experiment(cfg))
        lines = text.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2
        assert lines[1].endswith(",,")  # rate columns empty on the first row

    def test_rate_columns_follow_the_ladder(self):
        cfg = ExperimentConfig(experiment="nonsmooth_pulse", N=[8, 16], T=0.25,
                               integrator="gamma_half")
        result = run_experiment(cfg)
        lines = format_csv(result).splitlines()
        first, second = lines[1].split(","), lines[2].split(",")
        assert first[10] == "" and second[10] != ""
        reps = result.error_groups[0]
        assert float(second[9]) == pytest.approx(np.log2(reps[0].l2 / reps[1].l2))

    def test_eigen_and_profile_headers(self):
        eigen = format_csv(run_experiment(ExperimentConfig(experiment="eigen_bn")))
        assert eigen.startswith(EIGEN_HEADER + "\n")
        assert eigen.count("\n") == 19
        profile = RunResult(kind="profiles", experiment="demo",
                            profile_rows=[(0.0, -1.0, 0.5)])
        text = format_csv(profile)
        assert text == PROFILE_HEADER + "\n0.0,-1.0,0.5\n"

    def test_floats_round_trip(self):
        result = RunResult(kind="eigen", experiment="eigen_bn",
                           eigen_rows=[(16, 1, 0.1 + 0.2)])
        value = format_csv(result).splitlines()[1].split(",")[2]
        assert float(value) == 0.1 + 0.2

    def test_output_is_stable_across_runs(self):
        cfg = ExperimentConfig(experiment="eigen_bn")
        assert format_csv(run_experiment(cfg)) == format_csv(run_experiment(cfg))


class TestEmission:
    def test_emit_csv_row_count_and_line_endings(self, tmp_path):
        path = tmp_path / "eigen.csv"
        rows = emit_csv(run_experiment(ExperimentConfig(experiment="eigen_bn")),
                        str(path))
        assert rows == 18
        data = path.read_bytes()
        assert b"\r" not in data
        assert data.decode("utf-8").splitlines()[0] == EIGEN_HEADER

    def test_emit_plotdata_rejects_non_profiles(self, tmp_path):
        result = RunResult(kind="errors", experiment="demo")
        with pytest.raises(ValueError, match="profiles"):
            emit_plotdata(result, str(tmp_path / "x.csv"))


class TestGoldens:
    def test_manifest_contents(self):
        manifest = golden_manifest()
        assert set(manifest) == {"eigen_bn.csv", "pulse_small.csv"}

    def test_write_then_check_round_trips(self, tmp_path):
        write_goldens(str(tmp_path))
        assert sorted(p.name for p in tmp_path.iterdir()) == ["eigen_bn.csv",
                                                              "pulse_small.csv"]
        assert check_goldens(str(tmp_path)) == []

    def test_tampered_golden_reported(self, tmp_path):
        write_goldens(str(tmp_path))
        target = tmp_path / "eigen_bn.csv"
        target.write_text(target.read_text().replace("1", "2", 1))
        mismatches = check_goldens(str(tmp_path))
        assert mismatches == ["eigen_bn.csv: differs"]

    def test_missing_golden_reported(self, tmp_path):
        write_goldens(str(tmp_path))
        (tmp_path / "pulse_small.csv").unlink()
        assert check_goldens(str(tmp_path)) == ["pulse_small.csv: missing"]


DIVERGENT_CONFIG = """\
experiment = "custom"
method = "chebyshev_colloc"
domain = [-1.0, 1.0]
N = 8
dt = 50.0
T = 50.0
a = 1.0
beta = -1.0
gamma = 5.0
flux = "burgers"
initial = "sin_pi"
"""


class TestCli:
    def test_list_prints_registry(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        for exp_id in EXPECTED_IDS:
            assert exp_id in out

    def test_run_writes_csv(self, tmp_path, capsys):
        cfg = tmp_path / "eigen.toml"
        cfg.write_text('experiment = "eigen_bn"\n', encoding="utf-8")
        out_path = tmp_path / "eigen.csv"
        assert main(["run", str(cfg), "-o", str(out_path)]) == 0
        assert out_path.exists()
        assert f"wrote {out_path}" in capsys.readouterr().out

    def test_flag_output_beats_config_output(self, tmp_path):
        cfg = tmp_path / "eigen.toml"
        cfg.write_text(f'experiment = "eigen_bn"\noutput = "{tmp_path}/from_config.csv"\n',
                       encoding="utf-8")
        flag_path = tmp_path / "from_flag.csv"
        assert main(["run", str(cfg), "-o", str(flag_path)]) == 0
        assert flag_path.exists()
        assert not (tmp_path / "from_config.csv").exists()

    def test_config_output_used_without_flag(self, tmp_path):
        out_path = tmp_path / "from_config.csv"
        cfg = tmp_path / "eigen.toml"
        cfg.write_text(f'experiment = "eigen_bn"\noutput = "{out_path}"\n',
                       encoding="utf-8")
        assert main(["run", str(cfg)]) == 0
        assert out_path.exists()

    def test_missing_config_file_is_a_usage_error(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.toml")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_is_a_usage_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text('experiment = "nope"\n', encoding="utf-8")
        assert main(["run", str(cfg)]) == 1
        assert "unknown experiment" in capsys.readouterr().err

    def test_numerical_failure_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "divergent.toml"
        cfg.write_text(DIVERGENT_CONFIG, encoding="utf-8")
        assert main(["run", str(cfg), "-o", str(tmp_path / "out.csv")]) == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_goldens_write_and_check(self, tmp_path, capsys):
        gold_dir = tmp_path / "gold"
        assert main(["goldens", "--dir", str(gold_dir)]) == 0
        assert main(["goldens", "--check", "--dir", str(gold_dir)]) == 0
        assert "goldens match" in capsys.readouterr().out
        target = gold_dir / "eigen_bn.csv"
        target.write_text(target.read_text() + "tail\n")
        assert main(["goldens", "--check", "--dir", str(gold_dir)]) == 1
        assert "golden mismatch" in capsys.readouterr().err

    def test_unknown_subcommand_is_a_usage_error(self, capsys):
        assert main(["explode"]) == 1
        assert "error:" in capsys.readouterr().err
