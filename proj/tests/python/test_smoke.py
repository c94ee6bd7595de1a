import math

import numpy as np
import pytest

import mcfi

SMALL_1D = """
scenario = burgers1d
grid.nx = 41
solver.t_end = 0.3
objective.kind = quadratic_mode
"""


@pytest.fixture
def config():
    return mcfi.Config.from_text(SMALL_1D)


def test_config_properties(config):
    assert config.scenario == "burgers1d"
    assert config.design_size == 4
    assert len(config.hash) == 16
    np.testing.assert_array_equal(config.initial_design, np.zeros(4))
    assert np.all(config.lower < config.upper)


def test_bad_config_raises():
    with pytest.raises(mcfi.ConfigError):
        mcfi.Config.from_text("scenario = burgers1d\nno.such.key = 1\n")
    with pytest.raises(mcfi.Error):
        mcfi.Config.from_text("grid.nx = -3\n")


def test_hash_ignores_key_order():
    a = mcfi.parse_key_values("a = 1\nb = 2\n")
    b = mcfi.parse_key_values("b = 2\na = 1\n")
    assert mcfi.config_hash(a) == mcfi.config_hash(b)


def test_simulate_shapes(config):
    ic = mcfi.initial_condition(config)
    assert ic.shape == (41,)
    run = mcfi.simulate(config)
    assert run["snapshots"].shape[0] == 41
    assert run["snapshots"].shape[1] == len(run["dt"])
    assert math.isclose(sum(run["dt"]), 0.3, rel_tol=1e-12)
    np.testing.assert_array_equal(run["initial_state"], ic)


def test_gradient_matches_forward_differences(config):
    problem = mcfi.Problem(config)
    x = np.array([0.3, -0.1, 0.1, 0.2])
    f, g = problem.value_and_gradient(x)
    assert f == problem.objective(x)
    rows, worst = problem.grad_check(x, 1e-6)
    assert len(rows) == 4
    assert worst < 1e-3
    for row, gi in zip(rows, g):
        assert row["adjoint"] == gi


def test_minimize_descends(config):
    problem = mcfi.Problem(config)
    result = problem.minimize()
    f = result["history"]["f"]
    assert all(b <= a for a, b in zip(f, f[1:]))
    assert result["f"] < 1e-3 * f[0]
    assert result["history"]["x"].shape == (len(f), 4)


def test_run_forward_writes_outputs(tmp_path):
    cfg = mcfi.Config.from_text(SMALL_1D + f"output.dir = {tmp_path}\nforward.times = 0.1, 0.3\n")
    code, log, err = mcfi.run("forward", cfg)
    assert code == 0, err
    text = (tmp_path / "snapshots.csv").read_text()
    assert text.startswith("# mcfi ")
    assert cfg.hash in text.splitlines()[0]


def test_run_unknown_command(config):
    code, _, err = mcfi.run("bogus", config)
    assert code == 1
    assert err
