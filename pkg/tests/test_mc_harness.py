import math

import pytest

from osineq.distributions import Gamma, Lomax, parse_distribution
from osineq.mc_harness import (ExperimentConfig, ExperimentTable, load_config,
                               render_table, run_experiment)
from osineq.weights import gini, mth_gini

SMALL = ExperimentConfig(
    distributions=(Gamma(2.0, 1.0), Lomax(3.0, 1.0)),
    n_values=(10, 20),
    master_seed=2026,
    r_mc=200,
)


def test_reproducibility_byte_identical():
    a = render_table(run_experiment(SMALL), "csv")
    b = render_table(run_experiment(SMALL), "csv")
    assert a == b


def test_worker_count_does_not_change_results():
    a = render_table(run_experiment(SMALL), "csv")
    b = render_table(run_experiment(SMALL, workers=4), "csv")
    assert a == b


def test_seed_changes_results():
    other = ExperimentConfig(distributions=SMALL.distributions,
                             n_values=SMALL.n_values, master_seed=2027, r_mc=200)
    assert render_table(run_experiment(SMALL), "csv") != \
        render_table(run_experiment(other), "csv")


def test_rmse_decomposition():
    table = run_experiment(SMALL)
    for row in table.rows:
        assert row.rmse ** 2 >= row.bias ** 2 - 1e-12


def test_gamma_cell_bias_within_noise():
    cfg = ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(30,),
                           master_seed=314, r_mc=2000)
    row = run_experiment(cfg).rows[0]
    assert abs(row.bias) <= 3.0 * row.se_bias


def test_estimator_method_agreement():
    base = ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                            master_seed=11, r_mc=400)
    sub = ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                           master_seed=12, r_mc=400, b_combs=2000,
                           estimator_method="subsample")
    row_f = run_experiment(base).rows[0]
    row_s = run_experiment(sub).rows[0]
    combined = math.hypot(row_f.se_bias, row_s.se_bias)
    assert abs(row_f.bias - row_s.bias) <= 3.0 * combined


def test_benchmark_modes_agree():
    quad = ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                            master_seed=13, r_mc=100)
    mc = ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                          master_seed=13, r_mc=100, r_true=100_000,
                          benchmark="mc")
    t_quad = run_experiment(quad)
    t_mc = run_experiment(mc)
    se_bench = t_mc.benchmark_se[0]
    assert se_bench > 0
    # switching the benchmark shifts the bias by exactly the benchmark gap
    gap = abs(t_quad.rows[0].i_true - t_mc.rows[0].i_true)
    assert gap <= 3.0 * se_bench
    assert abs(t_quad.rows[0].bias - t_mc.rows[0].bias) == pytest.approx(gap, abs=1e-12)


def test_render_csv_shape():
    import csv as csv_mod
    import io
    table = run_experiment(ExperimentConfig(
        distributions=(Gamma(2.0, 1.0),), n_values=(10,), master_seed=3, r_mc=50))
    text = render_table(table, "csv")
    lines = text.strip().split("\n")
    assert lines[0] == "distribution,n,i_true,mean,bias,rmse,se_bias"
    assert len(lines) == 2
    rows = list(csv_mod.reader(io.StringIO(text)))
    assert len(rows[1]) == 7   # the comma inside the spec string is quoted
    assert rows[1][0] == "gamma:2,1" and rows[1][1] == "10"


def test_render_formats_carry_identical_numbers():
    import csv as csv_mod
    import io
    table = run_experiment(SMALL)
    csv_rows = list(csv_mod.reader(io.StringIO(render_table(table, "csv"))))
    csv_cells = [row[2:] for row in csv_rows[1:]]
    md_text = render_table(table, "markdown")
    md_rows = [r for r in md_text.strip().split("\n")[2:]]
    md_cells = [[c.strip() for c in row.strip("|").split("|")[2:]] for row in md_rows]
    assert csv_cells == md_cells


def test_render_full_precision_round_trips():
    import csv as csv_mod
    import io
    table = run_experiment(ExperimentConfig(
        distributions=(Gamma(2.0, 1.0),), n_values=(10,), master_seed=3, r_mc=50))
    text = render_table(table, "csv", full_precision=True)
    rows = list(csv_mod.reader(io.StringIO(text)))
    assert float(rows[1][3]) == table.rows[0].mean


def test_render_empty_and_bad_format():
    empty = ExperimentTable((), "gini", "quadrature", (), 0)
    with pytest.raises(ValueError):
        render_table(empty, "csv")
    table = run_experiment(ExperimentConfig(
        distributions=(Gamma(2.0, 1.0),), n_values=(10,), master_seed=3, r_mc=50))
    with pytest.raises(ValueError):
        render_table(table, "latex")


def test_config_validation():
    with pytest.raises(ValueError, match="below the scheme order"):
        ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(2,),
                         master_seed=1, scheme=mth_gini(3))
    with pytest.raises(ValueError):
        ExperimentConfig(distributions=(), n_values=(10,), master_seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                         master_seed=1, estimator_method="exact")
    with pytest.raises(ValueError):
        ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                         master_seed=1, benchmark="none")
    with pytest.raises(ValueError):
        ExperimentConfig(distributions=(Gamma(2.0, 1.0),), n_values=(10,),
                         master_seed=1, r_mc=0)


def test_load_config(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text(
        'distributions = ["gamma:2,1", "lomax:3,1"]\n'
        'n_values = [10, 20]\n'
        'master_seed = 99\n'
        'scheme = "gini"\n'
        'r_mc = 123\n'
        'b_combs = 456\n'
        'r_true = 789\n'
        'estimator_method = "subsample"\n'
        'benchmark = "mc"\n')
    cfg = load_config(str(p))
    assert cfg.scheme.name == "gini"
    assert cfg.r_mc == 123 and cfg.b_combs == 456 and cfg.r_true == 789
    assert cfg.estimator_method == "subsample" and cfg.benchmark == "mc"
    assert cfg.distributions[1] == parse_distribution("lomax:3,1")


def test_load_config_defaults_to_documented_scheme(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text('distributions = ["gamma:2,1"]\nn_values = [10]\nmaster_seed = 1\n')
    cfg = load_config(str(p))
    assert cfg.scheme.name == "mth_gini(3)"
    assert cfg.r_mc == 2000 and cfg.b_combs == 8000 and cfg.r_true == 250_000


def test_load_config_unknown_key(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text('distributions = ["gamma:2,1"]\nn_values = [10]\n'
                 'master_seed = 1\nreplication_count = 5\n')
    with pytest.raises(ValueError, match="replication_count"):
        load_config(str(p))


def test_load_config_missing_key(tmp_path):
    p = tmp_path / "exp.toml"
    p.write_text('distributions = ["gamma:2,1"]\nn_values = [10]\n')
    with pytest.raises(ValueError, match="master_seed"):
        load_config(str(p))
