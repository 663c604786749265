from fractions import Fraction

import pytest
from pydantic import ValidationError

from src import config
from src.cli.commands import build_run_config
from src.models.schemas import RunConfig, TheoryResult
from src.utils.error_handler import ConfigException, EXIT_CONFIG


def test_defaults_from_environment_module():
    run = RunConfig(command="sweep", map_id="mx_mod1:3", n=100, ell=2)
    assert run.cap == config.DEFAULT_LADDER_CAP
    assert run.q_list == [1, 5, 10]
    assert (run.u_min, run.u_max) == (5, 20)
    assert run.tau == 1


def test_q_list_parsing():
    run = RunConfig(command="sweep", q_list="10, 1,5,5")
    assert run.q_list == [1, 5, 10]
    with pytest.raises(ValidationError):
        RunConfig(command="sweep", q_list="1,x")


def test_range_validation():
    with pytest.raises(ValidationError):
        RunConfig(command="sweep", u_min=10, u_max=5)
    with pytest.raises(ValidationError):
        RunConfig(command="sweep", n=0)
    with pytest.raises(ValidationError):
        RunConfig(command="sweep", unknown_field=1)
    with pytest.raises(ValidationError):
        RunConfig(command="theta-exact", tau="-1/2")


def test_gaps_and_tau_parsing():
    run = RunConfig(command="theta-exact", gaps="4", tau="3/2")
    assert run.gaps == 4
    assert run.tau == Fraction(3, 2)
    assert RunConfig(command="theta-exact").gaps == "auto"


def test_config_hash_ignores_parallelism_and_verbosity():
    base = RunConfig(command="sweep", map_id="mx_mod1:3", n=100, ell=2)
    noisy = RunConfig(command="sweep", map_id="mx_mod1:3", n=100, ell=2, threads=7, quiet=True,
                      log_level="DEBUG", output="out.csv")
    assert base.config_hash() == noisy.config_hash()
    assert base.config_hash() != RunConfig(command="sweep", map_id="mx_mod1:3", n=100, ell=2, seed=1).config_hash()
    assert len(base.config_hash()) == 64


def test_config_file_merged_with_flags(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("map_id=mx_mod1:5\nn=500\nell=3\nseed=4\n")
    run = build_run_config("sweep", {'config_file': str(path), 'seed': 9})
    assert (run.map_id, run.n, run.ell, run.seed) == ("mx_mod1:5", 500, 3, 9)


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.env"
    path.write_text("map=mx_mod1:5\n")
    with pytest.raises(ConfigException, match="unknown key"):
        build_run_config("sweep", {'config_file': str(path)})
    with pytest.raises(ConfigException) as raised:
        build_run_config("sweep", {'config_file': str(tmp_path / "missing.env")})
    assert raised.value.exit_code == EXIT_CONFIG
    with pytest.raises(ConfigException, match="--n"):
        build_run_config("sweep", {'n': 0})


def test_theory_result_serializes_rationals():
    result = TheoryResult(map_id="mx_mod1:3", level=2, q=2, theta_exact="1/3", mu_u=Fraction(4, 9),
                          mu_a=Fraction(4, 27), components=4)
    dumped = result.model_dump(mode='json')
    assert dumped['theta_exact'] == "1/3"
    assert result.theta == pytest.approx(1 / 3)
    with pytest.raises(ValidationError):
        TheoryResult(map_id="x", level=1, q=1, theta_exact=Fraction(3, 2), mu_u=1, mu_a=Fraction(3, 2),
                     components=1)
