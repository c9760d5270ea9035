"""Benchmark problems, experiment configs, CSV output and the CLI."""
import csv
import math

import numpy as np
import pytest
from scipy import integrate, special

from gimqfrac.bench import cli
from gimqfrac.bench.config import ConfigError, ExperimentConfig, load_config, parse_config
from gimqfrac.bench.problems import (
    benchmark_data,
    elliptic_lshape,
    heat_stripe,
    poisson1d_hom,
    poisson1d_sinc,
)
from gimqfrac.bench.runner import (
    SERIES_COLUMNS,
    STEADY_COLUMNS,
    ExperimentError,
    evolve_benchmark,
    run_experiment,
)
from gimqfrac.geometry import uniform_points
from gimqfrac.shapeparam import assign_constant

# (alpha, x, forcing) from mpmath hyp2f1 at 30 digits, s = 3
HOM_FORCING_REFERENCE = [
    (1.0, 0.4, 0.50682799999999974936),
    (0.6, 0.9, -0.36980731748833269829),
    (1.5, 0.0, 3.9984066363200608427),
]


def _col(x):
    return np.atleast_1d(np.asarray(x, dtype=float))[:, None]


class TestProblems:
    def test_hom_exact_solution(self):
        bench = poisson1d_hom(1.0)
        np.testing.assert_array_equal(bench.exact(_col([-1.0, 1.0, 1.5])), 0.0)
        assert bench.exact(_col(0.5))[0] == pytest.approx(0.75**3.5, rel=1e-15)

    def test_hom_forcing_classical(self):
        # -u'' for u = (1 - x^2)^4
        f = poisson1d_hom(2.0).data.f
        x = np.linspace(-0.9, 0.9, 7)
        expected = 8 * (1 - x**2) ** 3 - 48 * x**2 * (1 - x**2) ** 2
        np.testing.assert_allclose(f(_col(x)), expected, rtol=1e-13, atol=1e-13)
        assert f(_col(0.0))[0] == pytest.approx(8.0, rel=1e-14)

    @pytest.mark.parametrize("alpha,x,value", HOM_FORCING_REFERENCE)
    def test_hom_forcing_reference(self, alpha, x, value):
        assert poisson1d_hom(alpha).data.f(_col(x))[0] == pytest.approx(value, rel=1e-13)

    def test_hom_rejects_fractional_s(self):
        with pytest.raises(ValueError):
            poisson1d_hom(1.0, s=2.5)

    @pytest.mark.parametrize("alpha", [0.6, 1.0, 1.7])
    def test_sinc_forcing_is_fourier_integral(self, alpha):
        f = poisson1d_sinc(alpha).data.f
        for x in (0.0, 0.45, 0.99):
            direct = integrate.quad(lambda k: k**alpha * math.cos(k * x), 0, 1,
                                    epsabs=0, epsrel=1e-13)[0]
            assert f(_col(x))[0] == pytest.approx(math.sqrt(2 / math.pi) * direct, rel=1e-11)

    def test_sinc_exact_and_boundary(self):
        bench = poisson1d_sinc(1.0)
        assert bench.exact(_col(0.0))[0] == pytest.approx(math.sqrt(2 / math.pi))
        assert bench.data.g_boundary(_col(1.0), 0.0)[0] == pytest.approx(0.6713967071, abs=1e-10)

    @pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5, 2.0])
    def test_lshape_forcing_at_origin(self, alpha):
        f = elliptic_lshape(alpha).data.f
        expected = 2**alpha * special.gamma(1 + alpha / 2) + 2
        assert f(np.zeros((1, 2)))[0] == pytest.approx(expected, rel=1e-13)

    def test_lshape_forcing_classical(self):
        # -Lap exp(-r^2) = (4 - 4 r^2) exp(-r^2) in 2D
        f = elliptic_lshape(2.0).data.f
        pts = np.array([[0.3, -0.2], [-0.8, 0.5], [0.0, -1.0]])
        r2 = np.sum(pts**2, axis=1)
        np.testing.assert_allclose(f(pts), (6 - 4 * r2) * np.exp(-r2), rtol=1e-12)

    def test_stripe_data(self):
        g = heat_stripe(1.0, x_c=1.0).data.g_exterior
        pts = np.array([[1.0, 0.0], [1.25, 0.0], [1.125, 0.0], [1.3, 0.0], [1.1, 1.2]])
        np.testing.assert_allclose(g(pts, 0.0),
                                   [1.0, math.sin(0.75 * math.pi), math.sin(0.625 * math.pi),
                                    0.0, 0.0], atol=1e-15)

    def test_stripe_rejects_overlap(self):
        with pytest.raises(ValueError):
            heat_stripe(1.0, x_c=0.9)

    def test_lookup(self):
        assert benchmark_data("poisson1d_hom", 1.0, d=1, s=2).exact is not None
        assert benchmark_data("diffusion_hole", 1.0).exact is None
        with pytest.raises(KeyError):
            benchmark_data("wave", 1.0)
        with pytest.raises(ValueError):
            benchmark_data("elliptic_lshape", 1.0, d=1)

    def test_stripe_classical_far_stays_zero(self):
        bench = heat_stripe(2.0, x_c=1.3)
        ps = assign_constant(uniform_points(bench.domain, 7), 2.0)
        series = evolve_benchmark(bench, ps, 0.02, 10)
        assert np.max(series.max_abs) == 0.0


class TestConfig:
    def test_full_grammar(self):
        cfg = parse_config("""
            # a comment line
            benchmark = poisson1d_hom   # trailing comment
            alpha = 0.6, 1,1.5
            eps = 3, 3.5, 3.5
            resolution = 5, 9
            sweep = 0.5:1.5:0.25
            kappa = none
            seed = 4
        """)
        assert cfg.alpha == (0.6, 1.0, 1.5)
        assert cfg.resolution == (5, 9)
        assert cfg.sweep == (0.5, 0.75, 1.0, 1.25, 1.5)
        assert cfg.eps_for(1) == 3.5
        assert cfg.kappa is None and cfg.seed == 4

    def test_single_eps_broadcasts(self):
        cfg = parse_config("alpha = 1, 2\nresolution = 5\neps = 2")
        assert cfg.eps_for(0) == cfg.eps_for(1) == 2.0

    @pytest.mark.parametrize("text,fragment", [
        ("alpha 1\nresolution = 5", "line 1"),
        ("resolution = 5\ncolour = red", "unknown key"),
        ("resolution = 5\nresolution = 9", "duplicate"),
        ("resolution = five", "bad value"),
        ("resolution = 5\nbenchmark = wave", "unknown benchmark"),
        ("resolution = 5\nstrategy = magic", "strategy"),
        ("resolution = 5\nalpha = 2.5", "alpha"),
        ("resolution = 5\nalpha = 1, 2\neps = 1, 2, 3", "eps"),
        ("alpha = 1", "resolution"),
        ("resolution = 5\nsweep = 1:2:0", "step"),
        ("resolution = 5\neps_min = 4\neps_max = 1", "eps_min"),
    ])
    def test_errors(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text)

    def test_overrides_ignore_none(self):
        cfg = ExperimentConfig(resolution=(5,), seed=3)
        assert cfg.with_overrides(seed=None).seed == 3
        assert cfg.with_overrides(seed=8).seed == 8

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("resolution = 5\n")
        assert load_config(path).resolution == (5,)


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunner:
    def test_steady_csv(self, tmp_path):
        cfg = parse_config("alpha = 1, 2\neps = 3.5\nresolution = 5, 9\noutput = t.csv")
        rows = run_experiment(cfg, tmp_path)
        table = _read_rows(tmp_path / "t.csv")
        assert table[0] == STEADY_COLUMNS
        assert len(table) == 5 and len(rows) == 4
        assert [r[2] for r in table[1:]] == ["5", "9", "5", "9"]
        # floats are written as shortest round-trip decimals
        assert float(table[1][5]) == rows[0]["rms"]
        assert table[1][5] == repr(rows[0]["rms"])
        assert (tmp_path / "t.csv").read_bytes().count(b"\r") == 0

    def test_csv_deterministic(self, tmp_path):
        text = ("benchmark = poisson1d_hom\nalpha = 0.6\nstrategy = random\n"
                "eps_min = 1\neps_max = 5\nresolution = 9\nseed = 5\noutput = r.csv")
        tables = []
        for sub in ("a", "b"):
            run_experiment(parse_config(text), tmp_path / sub)
            rows = _read_rows(tmp_path / sub / "r.csv")
            tables.append([r[:-1] for r in rows])
        assert tables[0] == tables[1]
        assert tables[0][1][3] == "random(1.0,5.0;seed=5)"

    def test_sweep_rows(self, tmp_path):
        cfg = parse_config("alpha = 1\nresolution = 9\nsweep = 1:2:0.5\noutput = s.csv")
        rows = run_experiment(cfg, tmp_path, sweep=True)
        assert [r["eps"] for r in rows] == [1.0, 1.5, 2.0]

    def test_sweep_needs_values(self, tmp_path):
        cfg = parse_config("alpha = 1\nresolution = 9")
        with pytest.raises(ExperimentError):
            run_experiment(cfg, tmp_path, sweep=True)

    def test_cond_indicated_row(self, tmp_path):
        cfg = parse_config("alpha = 1\nresolution = 33\nstrategy = cond_indicated")
        row = run_experiment(cfg, tmp_path)[0]
        assert 1e13 <= row["cond2"] <= 1e16
        assert row["strategy"] == "cond_indicated" and row["eps"] > 0

    def test_failure_writes_marker_row(self, tmp_path):
        text = ("alpha = 1\nresolution = 5, 9\nstrategy = cond_indicated\n"
                "max_iters = 2\noutput = f.csv")
        with pytest.raises(ExperimentError) as info:
            run_experiment(parse_config(text), tmp_path)
        assert "alpha=1.0 n_bar=5" in str(info.value)
        table = _read_rows(tmp_path / "f.csv")
        assert table[-1][0] == "FAILED"
        assert "n_bar=5" in table[-1][1]

    def test_time_series_and_snapshots(self, tmp_path):
        text = ("benchmark = diffusion_hole\nalpha = 2\neps = 2\nresolution = 9\n"
                "tau = 0.01\nsteps = 4\nsnapshot_every = 2\nnorm_cells = 40\noutput = d.csv")
        rows = run_experiment(parse_config(text), tmp_path)
        table = _read_rows(tmp_path / "d.csv")
        assert table[0] == SERIES_COLUMNS
        assert [r["step"] for r in rows] == [0, 1, 2, 3, 4]
        norms = [r["l2_norm"] for r in rows]
        assert all(b <= a for a, b in zip(norms, norms[1:]))
        snaps = sorted(p.name for p in tmp_path.glob("snapshot_*"))
        assert len(snaps) == 3
        assert _read_rows(tmp_path / snaps[0])[0] == ["x", "y", "u"]


class TestCli:
    def test_run_success(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("alpha = 1\neps = 3.5\nresolution = 5\noutput = out.csv\n")
        assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
        assert (tmp_path / "o" / "out.csv").exists()
        assert "wrote 1 rows" in capsys.readouterr().out

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("alpha = 1\nstrategy = random\nresolution = 5\noutput = out.csv\n")
        cli.main(["run", str(cfg), "--out", str(tmp_path), "--seed", "9",
                  "--quad-tol", "1e-9", "--threads", "2"])
        assert "seed=9" in _read_rows(tmp_path / "out.csv")[1][3]

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha = 1\nresolution = 5\nbogus = 1\n")
        assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "nope.cfg")]) == 2

    def test_wrong_command_for_benchmark(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("benchmark = diffusion_hole\nalpha = 1\nresolution = 5\n")
        assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 2

    def test_experiment_failure_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("alpha = 1\nresolution = 5\nstrategy = cond_indicated\nmax_iters = 1\n")
        assert cli.main(["run", str(cfg), "--out", str(tmp_path)]) == 1
        err = capsys.readouterr().err
        assert "n_bar=5" in err and "condition number" in err

    def test_canned_tables_parse(self):
        for text in cli.TABLE_CONFIGS.values():
            parse_config(text)

    def test_usage_error(self):
        with pytest.raises(SystemExit):
            cli.main(["launch"])
