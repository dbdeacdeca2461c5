import pytest

from feclab.cli import parse_code_spec
from feclab.codebook import build_ca_polar_code
from feclab.simharness import (ConfigError, parse_config, parse_csv, run_sweep,
                               wilson_interval, write_csv, CSV_HEADER)
from feclab.wsphere import build_sphere, save_sphere

BASE_CONFIG = """
code_family = ca_polar
code_n = 64
code_k = 16
snr_db_grid = 2.0, 4.0
stage1 = scl
scl_list_size = 4
wsd_radius_index = 2
wsd_max_iterations = 4
wsd_num_paths = 4
activation_mode = crc_gated
max_trials = 300
min_block_errors = 40
seed = 313
"""


@pytest.fixture(scope="module")
def sphere_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("spheres") / "ca64_r2.cws"
    save_sphere(build_sphere(build_ca_polar_code(64, 16), 2), path)
    return str(path)


def _config(sphere_file, **overrides):
    text = BASE_CONFIG + f"sphere_path = {sphere_file}\n"
    cfg = parse_config(text)
    for key, val in overrides.items():
        setattr(cfg, key, val)
    return cfg


def test_parse_config_round_trip(sphere_file):
    cfg = _config(sphere_file)
    assert cfg.code_family == "ca_polar"
    assert cfg.snr_db_grid == [2.0, 4.0]
    assert cfg.wsd_filter_size is None  # formula default


def test_parse_config_rejects_unknown_and_missing_keys():
    with pytest.raises(ConfigError, match="unknown"):
        parse_config(BASE_CONFIG + "turbo_mode = yes\n")
    with pytest.raises(ConfigError, match="missing"):
        parse_config("code_family = rm\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(BASE_CONFIG + "seed = 1\n")


def test_parse_config_validates_values():
    with pytest.raises(ConfigError, match="ascending"):
        parse_config(BASE_CONFIG.replace("2.0, 4.0", "4.0, 2.0"))
    with pytest.raises(ConfigError, match="crc_gated"):
        parse_config(BASE_CONFIG.replace("ca_polar", "rm")
                     .replace("code_k = 16", "code_k = 29")
                     .replace("code_n = 64", "code_n = 128")
                     .replace("stage1 = scl", "stage1 = osd"))


def test_wilson_interval_behaviour():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0) and lo > 0.95
    lo, hi = wilson_interval(10, 100)
    assert lo < 0.1 < hi


def test_write_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv([], path)
    assert path.read_text() == CSV_HEADER + "\n"


def test_sweep_csv_round_trip_and_conservation(sphere_file, tmp_path):
    cfg = _config(sphere_file)
    records = run_sweep(cfg)
    path = tmp_path / "sweep.csv"
    write_csv(records, path)
    rows = parse_csv(path)
    assert len(rows) == len(records) == 2
    for row, rec in zip(rows, records):
        assert row["code"] == "ca-polar:64:16"
        assert int(row["trials"]) == rec.trials
        assert float(row["bler"]) == pytest.approx(rec.bler, rel=1e-5)
        assert float(row["p_act"]) == pytest.approx(rec.activation_rate, rel=1e-5)
    # crc_gated conservation: stage-1 passes plus activations cover all trials
    for rec in records:
        assert rec.stage1_pass_rate + rec.activation_rate == pytest.approx(1.0)


def test_sweep_noiseless_limit(sphere_file):
    cfg = _config(sphere_file, snr_db_grid=[20.0], max_trials=1000,
                  min_block_errors=1000)
    rec = run_sweep(cfg)[0]
    assert rec.trials == 1000
    assert rec.block_errors == 0 and rec.bler == 0.0
    assert rec.activation_rate == 0.0


def test_sweep_deterministic_across_threads(sphere_file, tmp_path):
    cfg = _config(sphere_file)
    blobs = []
    for threads in (1, 3):
        path = tmp_path / f"t{threads}.csv"
        write_csv(run_sweep(cfg, threads=threads), path)
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1]


def test_sweep_seed_changes_output(sphere_file):
    a = run_sweep(_config(sphere_file, snr_db_grid=[2.0]))
    b = run_sweep(_config(sphere_file, snr_db_grid=[2.0], seed=999))
    assert (a[0].block_errors, a[0].ed_units_mean) != (b[0].block_errors, b[0].ed_units_mean)


def test_ml_sweep_uses_codebook_cost(sphere_file):
    cfg = _config(sphere_file, snr_db_grid=[3.0], max_trials=50,
                  min_block_errors=50)
    rec = run_sweep(cfg, decoder_kind="ml")[0]
    assert rec.stage1_label == "ml"
    assert rec.ed_units_mean == pytest.approx(2 ** 16)
    assert rec.activation_rate == 0.0


def test_sweep_requires_matching_sphere(sphere_file):
    cfg = _config(sphere_file, wsd_radius_index=3)
    with pytest.raises(ConfigError, match="radius"):
        run_sweep(cfg)


def test_parse_code_spec():
    assert parse_code_spec("ca-polar:64:16").label() == "ca-polar:64:16"
    assert parse_code_spec("rm:128:29").label() == "rm:128:29"
    assert parse_code_spec("polar:32:8").label() == "polar:32:8"
    with pytest.raises(ConfigError):
        parse_code_spec("rm:128:30")
    with pytest.raises(ConfigError):
        parse_code_spec("hamming:7:4")


def test_cli_end_to_end(sphere_file, tmp_path):
    from feclab.cli import main
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text(BASE_CONFIG.replace("2.0, 4.0", "3.0")
                        + f"sphere_path = {sphere_file}\n")
    out = tmp_path / "run.csv"
    rc = main(["simulate", "--config", str(cfg_path), "--out", str(out),
               "--seed", "5", "--threads", "2"])
    assert rc == 0
    rows = parse_csv(out)
    assert len(rows) == 1 and rows[0]["seed"] == "5"

    sphere_out = tmp_path / "cli.cws"
    rc = main(["sphere", "--code", "ca-polar:64:16", "--radius", "1",
               "--out", str(sphere_out)])
    assert rc == 0 and sphere_out.exists()

    rc = main(["simulate", "--config", str(tmp_path / "missing.cfg"),
               "--out", str(out)])
    assert rc == 2
