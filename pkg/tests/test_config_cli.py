import subprocess
import sys

import pytest

from dbada.cli import EXIT_CONFIG, EXIT_OK, main
from dbada.config import ConfigError, DEFAULT_SCENARIOS, default_config, load_config


def test_empty_file_gives_defaults(tmp_path):
    f = tmp_path / "empty.toml"
    f.write_text("")
    cfg = load_config(f)
    assert cfg == default_config()
    assert cfg.rate.total_bandwidth_hz == 100e6
    assert cfg.energy.macro_power_w == 390.0 and cfg.energy.sectors == 3
    assert cfg.macro.tx_power_dbm == 46.0 and cfg.pico.tx_power_dbm == 30.0
    assert cfg.macro.antenna_gain_dbi == 14.0 and cfg.pico.antenna_gain_dbi == 5.0
    assert cfg.pico.active_power_w == 9.0
    assert cfg.traffic.macro_means[0] == 197
    assert [s.label for s in cfg.scenarios][-1] == "DBADA/beta=0.5"
    assert len(cfg.scenarios) == len(DEFAULT_SCENARIOS)
    assert cfg.drops == 100


def test_bandwidth_passthrough(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text("system_bandwidth_hz = 2e8\n")
    assert load_config(f).rate.total_bandwidth_hz == 200e6


def test_sections_and_dotted_keys(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text(
        "layout.hotspots = 4\n"
        "[energy]\npico_idle_w = 1.0\n"
        "[traffic]\nmacro_means = [10, 20]\nhotspot_means = [1, 2]\nfluctuation = 0.0\n"
        "[scenarios]\ninclude = ['MO/EA', 'DBADA']\nbeta = [0.0, 2.0]\n")
    cfg = load_config(f)
    assert cfg.layout.hotspots == 4
    assert cfg.energy.pico_idle_w == 1.0
    assert cfg.traffic.hours == 2
    assert [s.label for s in cfg.scenarios] == ["MO/EA", "DBADA/beta=0", "DBADA/beta=2"]


@pytest.mark.parametrize("text, key", [
    ("bandwith = 1e8\n", "bandwith"),
    ("[layout]\nradius = 3\n", "layout.radius"),
    ("[layout]\nhotspots = -1\n", "layout.hotspots"),
    ("drops = 0\n", "drops"),
    ("[energy]\npico_idle_w = 10.0\n", "energy"),
    ("[traffic]\nmacro_means = [1, 2]\n", "traffic"),
    ("[scenarios]\ninclude = ['PA/EA']\n", "scenarios.include"),
    ("[layout]\nhotspot_fraction = 0.95\n", "layout"),
    ("[foo]\nbar = 1\n", "foo"),
])
def test_schema_errors_name_the_key(tmp_path, text, key):
    f = tmp_path / "c.toml"
    f.write_text(text)
    with pytest.raises(ConfigError, match=key):
        load_config(f)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.toml")


def test_overrides_win(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text("seed = 5\ndrops = 7\n")
    cfg = load_config(f, {"seed": 9})
    assert cfg.seed == 9 and cfg.drops == 7


def test_cli_config_error_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.toml"
    f.write_text("bandwith = 1\n")
    assert main(["--config", str(f), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "bandwith" in capsys.readouterr().err


def test_cli_bad_beta(tmp_path):
    assert main(["--beta", "a,b", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cli_small_run(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[traffic]\nmacro_means = [20]\nhotspot_means = [5]\n")
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "--drops", "2", "--seed", "3",
                 "--scenarios", "MO/PFS,PA50/EA,DBADA", "--beta", "0.5,1",
                 "--out", str(out), "--no-figures"])
    assert code == EXIT_OK
    lines = (out / "summary.csv").read_text().splitlines()
    assert [l.split(",")[0] for l in lines[1:]] == [
        "MO/PFS", "PA50/EA", "DBADA/beta=0.5", "DBADA/beta=1"]
    assert len((out / "records.csv").read_text().splitlines()) == 1 + 2 * 4
    assert len((out / "improvement.csv").read_text().splitlines()) == 1 + 2 * 2


def test_cli_entry_point_runs(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dbada.cli", "--config", str(tmp_path / "x")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_CONFIG
