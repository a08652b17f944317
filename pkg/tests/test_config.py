import pytest

from cctf.config import parse_config, parse_sim_config, parse_sweep_config
from cctf.engine import InterceptorMode
from cctf.errors import ConfigError


def test_empty_file_needs_team_split():
    with pytest.raises(ConfigError, match="scouts"):
        parse_config("")


def test_empty_file_defaults():
    cfg = parse_config("", {"scouts": 2, "detectors": 3})
    assert (cfg.n_routers, cfg.team_size, cfg.delta_interceptor) == (30, 10, 10)
    assert (cfg.vul_rate, cfg.p_scout, cfg.p_exploiter) == (0.02, 1.0, 0.02)
    assert cfg.interceptor_mode is InterceptorMode.RECOVER


def test_scouts_range_error_quotes_constraint():
    with pytest.raises(ConfigError, match="1 ≤ S < N") as info:
        parse_config("detectors = 2\nscouts = 12\n")
    assert info.value.line == 2
    assert "scouts" in str(info.value)


def test_flag_overrides_file():
    cfg = parse_config("scouts = 3\ndetectors = 2\n", {"scouts": 5, "detectors": None})
    assert cfg.scouts == 5 and cfg.detectors == 2


def test_sim_section_and_mode():
    cfg = parse_sim_config('[sim]\nscouts = 1\ndetectors = 9\ninterceptor_mode = "isolate"\nvul_rate = 0\n')
    assert cfg.interceptor_mode is InterceptorMode.ISOLATE
    assert cfg.vul_rate == 0.0


def test_parse_error_has_line_number():
    with pytest.raises(ConfigError) as info:
        parse_config("scouts = 3\ndetectors = = 2\n")
    assert info.value.line == 2


@pytest.mark.parametrize("text,line", [
    ("scouts = 3\ndetectors = 2\nbogus = 1\n", 3),
    ("scouts = 3\ndetectors = 2.5\n", 2),
    ('scouts = 3\ndetectors = 2\ninterceptor_mode = "fight"\n', 3),
    ("scouts = 3\ndetectors = 2\nvul_rate = 2.0\n", 3),
])
def test_bad_values(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line


def test_sweep_defaults_to_paper_grid():
    grid = parse_sweep_config("")
    assert grid.n_configs == 1296 and grid.trials == 5


def test_sweep_grid_section(tmp_path):
    text = "max_ticks = 50\n[grid]\nscouts = [1, 2]\ndetectors = [5]\np_detector_vulnerable = [1]\n" \
           "p_detector_exploited = [0.5, 1.0]\ntrials = 3\nmaster_seed = 4\n"
    grid = parse_config(text, {"master_seed": 8}, kind="sweep")
    assert grid.scouts_values == (1, 2)
    assert grid.p_detector_vulnerable_values == (1.0,)
    assert grid.trials == 3 and grid.master_seed == 8
    assert grid.base.max_ticks == 50
    assert grid.n_runs == 12


def test_sweep_rejects_out_of_range_list_entry():
    with pytest.raises(ConfigError, match="1 ≤ d < N"):
        parse_sweep_config("[grid]\ndetectors = [1, 10]\n")


def test_sweep_rejects_unknown_grid_key():
    with pytest.raises(ConfigError) as info:
        parse_sweep_config("[grid]\nscouts = [1]\nexploiters = [3]\n")
    assert info.value.line == 3
