import pytest
from hypothesis import given, settings, strategies as st

from hetlasso.config import RunConfig, dump_config, load_config, parse_config_text
from hetlasso.exceptions import ConfigError


def test_defaults_roundtrip(tmp_path):
    cfg = RunConfig()
    path = tmp_path / "a.cfg"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**63),
    lags=st.lists(st.integers(1, 900), min_size=1, max_size=30, unique=True),
    tau=st.floats(0, 5, allow_nan=False),
    lam_num=st.one_of(st.none(), st.integers(1, 500)),
    eps=st.one_of(st.none(), st.floats(0, 1)),
    crit=st.sampled_from(["aic", "hqc", "bic"]),
    threshold=st.booleans(),
)
def test_roundtrip_property(seed, lags, tau, lam_num, eps, crit, threshold):
    cfg = RunConfig(seed=seed, mean_lags=tuple(sorted(lags)), tau=tau, lambda_num=lam_num, stop_epsilon=eps,
                    criterion=crit, threshold=threshold)
    assert RunConfig(**parse_config_text(dump_config(cfg))) == cfg


def test_ranges_comments_and_overrides(tmp_path):
    path = tmp_path / "b.cfg"
    path.write_text("# header\nmean_lags = 1..3, 10  # trailing\nseed = 4\ninput = data.csv\nthreads =\n")
    cfg = load_config(path, {"seed": 9})
    assert cfg.mean_lags == (1, 2, 3, 10)
    assert cfg.seed == 9
    assert cfg.threads is None
    assert cfg.input == str(tmp_path / "data.csv")


@pytest.mark.parametrize("text", [
    "colour = red\n",
    "seed = abc\n",
    "seed\n",
    "seed = 1\nseed = 2\n",
    "command = plot\n",
    "intercept = maybe\n",
    "criterion = cv\n",
])
def test_rejects_bad_configs(tmp_path, text):
    path = tmp_path / "c.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_unknown_override_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(None, {"bogus": 1})
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_full_scale_replications():
    assert RunConfig(N=50).replications == 50
    assert RunConfig(N=50, full_scale=True).replications == 1000
