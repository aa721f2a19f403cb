import csv
import json
from pathlib import Path

import pytest

from cgolab.cli import HEADER, catalog_text, main
from cgolab.experiments import CATALOG, all_quantities

ROOT = Path(__file__).resolve().parents[1]

CARLEMAN = """
[experiment]
name = carleman
seed = 3

[grid]
n = 3
N = {N}
L = 2pi

[physics]
tau = 2, 4
samples = 3
{extra}
"""

SPEC_OPERATIONS = {
    "sample_haar", "plane_avg", "avg_qnorm", "strichartz_constant", "bilinear_norm",
    "verify_localization", "verify_zeta_stability", "verify_dyadic_sums",
    "make_conductivity", "make_zeta_pair", "select_parameters", "recover_fourier",
    "alessandrini_gap", "gradient_identity_check",
}


def write(tmp_path, N=32, extra=""):
    p = tmp_path / "c.ini"
    p.write_text(CARLEMAN.format(N=N, extra=extra))
    return p


def read_rows(out):
    with open(out / "results.csv", newline="") as fh:
        return list(csv.reader(fh))


def test_carleman_run(tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(write(tmp_path)), "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == HEADER
    assert len(rows) == 1 + 6
    assert {r[6] for r in rows[1:]} == {"dz_inverse_isometry"}
    assert max(float(r[7]) for r in rows[1:]) <= 1e-12
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 3 and man["all_gates_passed"]
    assert man["tolerances"]["headroom"] == 4
    assert set(man["versions"]) >= {"numpy", "scipy", "cgolab"}


def test_seed_override_and_repeatability(tmp_path):
    cfg = write(tmp_path)
    outs = []
    for name, seed in (("a", "5"), ("b", "5"), ("c", "6")):
        main(["run", str(cfg), "--out", str(tmp_path / name), "--seed", seed])
        outs.append((tmp_path / name / "results.csv").read_bytes())
    assert outs[0] == outs[1] != outs[2]


def test_bad_grid_exits_1(tmp_path, capsys):
    assert main(["run", str(write(tmp_path, N=48)), "--out", str(tmp_path / "o")]) == 1
    assert "grid.N" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_nyquist_violation_exits_1(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text(CARLEMAN.format(N=32, extra="").replace("tau = 2, 4", "tau = 2, 5"))
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "Nyquist" in capsys.readouterr().err


def test_missing_config_and_unknown_experiment(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.ini")]) == 1
    cfg = tmp_path / "c.ini"
    cfg.write_text(CARLEMAN.format(N=32, extra="").replace("name = carleman", "name = warp"))
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "experiment.name" in capsys.readouterr().err


def test_gate_failure_exits_2(tmp_path):
    cfg = write(tmp_path, extra="[tolerances]\nisometry = 1e-30")
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out)]) == 2
    assert not json.loads((out / "manifest.json").read_text())["all_gates_passed"]


def test_catalog_lists_every_operation_once(capsys):
    ops = [op for e in CATALOG.values() for op in e.operations]
    assert len(ops) == len(set(ops))
    assert SPEC_OPERATIONS <= set(ops)
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    assert text == catalog_text()
    for name in ("strichartz", "planeavg", "recovery"):
        assert name + "\n" in text


def test_smoke_rows_use_catalog_quantities(tmp_path):
    out = tmp_path / "smoke"
    code = main(["run", str(ROOT / "configs" / "smoke.ini"), "--out", str(out)])
    assert code == 0
    rows = read_rows(out)[1:]
    assert {r[6] for r in rows} <= all_quantities()
    assert {r[0] for r in rows} == set(CATALOG)
    assert rows == sorted(rows, key=lambda r: (r[0], -1.0 if r[4] == "" else float(r[4]), r[5], r[6]))


@pytest.mark.parametrize("name", sorted(p.name for p in (ROOT / "configs").glob("*.ini")))
def test_shipped_configs_parse(name):
    from cgolab.config import parse_config

    cfg = parse_config((ROOT / "configs" / name).read_text())
    for exp in cfg.experiments:
        assert exp in CATALOG
        for key in CATALOG[exp].required:
            cfg.get(key, exp)
