"""Config layering: defaults < file < environment < explicit overrides."""
import json

import pytest

from stablefit.config import AnalysisConfig, ENV_PREFIX, load_config
from stablefit.errors import DomainError


def test_defaults():
    c = AnalysisConfig()
    assert c.regression_grid().points.size == 81
    assert c.distance_grid().points.size == 100
    assert c.portions == ("xmin", 0.05, 0.15, 0.30, 0.45)
    assert c.gof_replicates == 1000


def test_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"epsilon": 0.02, "max_iter": 7, "gof_replicates": 50}))
    env = {ENV_PREFIX + "MAX_ITER": "8", ENV_PREFIX + "GOF_REPLICATES": "60"}
    c = load_config(path, {"gof_replicates": 70, "seed": None}, environ=env)
    assert (c.epsilon, c.max_iter, c.gof_replicates, c.seed) == (0.02, 8, 70, 0)


def test_list_parsing():
    env = {ENV_PREFIX + "PORTIONS": "xmin,0.1", ENV_PREFIX + "INTERVALS": "[3600, 7200]"}
    c = load_config(environ=env)
    assert c.portions == ("xmin", 0.1)
    assert c.intervals == (3600, 7200)


def test_unknown_key(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"nope": 1}))
    with pytest.raises(DomainError):
        load_config(path, environ={})


@pytest.mark.parametrize("bad", [{"epsilon": 0}, {"density_mode": "weird"}, {"portions": ["0.5", "2"]},
                                 {"reg_k_min": 2.0}])
def test_invalid(bad):
    with pytest.raises(DomainError):
        load_config(overrides=bad, environ={})


def test_manifest_dict_excludes_threads():
    d = AnalysisConfig(threads=4).to_dict()
    assert "threads" not in d
    assert d["intervals"] == [300, 900, 1800, 3600, 7200, 14400, 28800, 86400]
    assert AnalysisConfig(threads=4) == AnalysisConfig(threads=1)
