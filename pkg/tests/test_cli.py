import json

import numpy as np
import pytest

from maxplus_ifs.cli import main
from maxplus_ifs.errors import ConfigError, InvalidScale, NonFiniteInput, UnknownFamily
from maxplus_ifs.grid import UniformGrid
from maxplus_ifs.higuchi import hfd_2d
from maxplus_ifs.io import (field_to_image, image_to_field, parse_config, read_density_csv,
                            read_field_csv, read_pgm, read_series, write_density_csv, write_pgm)
from maxplus_ifs.pipeline import (compute_attractor, run_attractor, run_dtheta, run_hfd,
                                  run_oracle_check)

NEG_INF = float("-inf")


def base_config(**overrides):
    cfg = {
        "space": {"dimension": 1, "M": 16},
        "system": {"family": "dyadic-shift-1d", "weights": "neg-square", "n": 2},
        "iteration": {"N": 10},
    }
    for key, val in overrides.items():
        cfg[key] = val
    return cfg


def write_json(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.mark.parametrize("mutate,path", [
    (lambda c: c["space"].update(M=1), "space.M"),
    (lambda c: c["space"].update(dimension=3), "space.dimension"),
    (lambda c: c["system"].update(n=0), "system.n"),
    (lambda c: c["system"].pop("n"), "system.n"),
    (lambda c: c["system"].update(extra=1), "system.extra"),
    (lambda c: c.update(iteration={"N": 0}), "iteration.N"),
    (lambda c: c.update(iteration={"tolerance": -1}), "iteration.tolerance"),
    (lambda c: c.update(iteration={"initial_support": [3, 40]}), "iteration.initial_support"),
    (lambda c: c.update(higuchi={"k_max": 10}), "higuchi.k_max"),
    (lambda c: c.update(higuchi={"k_max": [3, 10]}), "higuchi.k_max[1]"),
    (lambda c: c.update(outputs={"image_path": 5}), "outputs.image_path"),
    (lambda c: c["system"].update(family="checker-2d"), "system.family"),
    (lambda c: c.update(system={"maps": [{"slope": 0.5}], "weights": [0.3]}), "system.weights[0]"),
    (lambda c: c.update(system={"maps": [{"slope": 0.5}, {"matrix": 1}], "weights": [0, 0]}),
     "system.maps[1]"),
    (lambda c: c.update(bogus={}), "bogus"),
])
def test_config_errors_carry_field_path(mutate, path):
    cfg = base_config()
    mutate(cfg)
    with pytest.raises(ConfigError) as exc:
        parse_config(cfg)
    assert exc.value.path == path
    assert path in str(exc.value)


def test_unknown_family_and_scale_are_config_errors():
    cfg = base_config()
    cfg["system"]["family"] = "fern"
    with pytest.raises(UnknownFamily):
        parse_config(cfg)
    with pytest.raises(InvalidScale):
        parse_config(base_config(higuchi={"k_max": 1}))


def test_explicit_maps_config():
    cfg = parse_config({
        "space": {"dimension": 2, "M": 8},
        "system": {"maps": [{"matrix": [[0.5, 0], [0, 0.5]], "offset": [0, 0]},
                            {"matrix": [[0.5, 0], [0, 0.5]], "offset": [0.5, 0.5]}],
                   "weights": [-0.5, -2.0]},
        "iteration": {"initial_support": [[0, 0], [8, 8]]},
        "higuchi": {"k_max": [2, 4]},
    })
    assert cfg.n == 2 and cfg.k_max == (2, 4)
    assert cfg.iteration.initial_support == ((0, 0), (8, 8))


def test_geometric_attractor_csv(tmp_path):
    cfg = parse_config(base_config(
        space={"dimension": 1, "M": 1000},
        system={"family": "dyadic-shift-1d", "weights": "neg-geometric", "n": 100},
        iteration={"N": 30},
        outputs={"density_path": str(tmp_path / "d.csv"), "fuzzy_path": str(tmp_path / "u.csv")}))
    run = run_attractor(cfg)
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "index,x,lambda,u" and len(lines) == 1002
    u, grid = read_field_csv(tmp_path / "u.csv")
    assert grid == UniformGrid(1, 1000) and u.max() == 1.0
    dens, _ = read_density_csv(tmp_path / "d.csv")
    assert np.array_equal(dens, run.density)
    s = run.summary()
    assert s["alpha_n"] == -(0.5 ** 100)
    assert s["gamma"] == 0.5 and s["delta"] == pytest.approx(0.002)


def test_single_map_collapses(tmp_path):
    # fixed point 1/2 sits on index 8 and no neighbour snaps onto itself
    cfg = parse_config(base_config(system={"maps": [{"slope": 0.3, "offset": 0.35}],
                                            "weights": [0.0]}, iteration={"N": 20}))
    run = compute_attractor(cfg)
    assert run.report.converged
    assert np.flatnonzero(np.isfinite(run.density)).tolist() == [8]


def test_pgm_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    u = rng.random((9, 9))
    u[0, 0], u[8, 8] = 0.0, 1.0
    for binary in (False, True):
        p = tmp_path / f"img{binary}.pgm"
        write_pgm(p, u, binary=binary)
        pix = read_pgm(p)
        assert pix.shape == (9, 9)
        assert np.array_equal(pix, field_to_image(u))
        assert np.abs(image_to_field(pix) - u).max() <= 0.5 / 255 + 1e-12
    text = (tmp_path / "imgFalse.pgm").read_text().splitlines()
    assert text[:3] == ["P2", "9 9", "255"]
    assert all(len(line) <= 70 for line in text)


def test_pgm_orientation():
    u = np.zeros((3, 3))
    u[2, 0] = 1.0  # x1 = 1, x2 = 0: bottom-right corner
    img = field_to_image(u)
    assert img[2, 2] == 255 and img.sum() == 255


def test_density_csv_roundtrip_2d(tmp_path):
    g = UniformGrid(2, 4)
    d = -np.random.default_rng(0).exponential(size=g.shape)
    d[1, 3] = NEG_INF
    d[0, 0] = 0.0
    write_density_csv(tmp_path / "d.csv", d, g)
    back, grid = read_density_csv(tmp_path / "d.csv")
    assert grid == g and np.array_equal(back, d)
    assert ",-inf," in (tmp_path / "d.csv").read_text()


def test_checker_outputs_deterministic_and_quantization_robust(tmp_path):
    def run(tag):
        outs = {k: str(tmp_path / f"{tag}.{ext}") for k, ext in
                (("density_path", "csv"), ("image_path", "pgm"))}
        cfg = parse_config({"space": {"dimension": 2, "M": 256},
                            "system": {"family": "checker-2d", "weights": "neg-square", "n": 15},
                            "iteration": {"N": 15}, "outputs": outs})
        return run_attractor(cfg)

    first = run("a")
    run("b")
    for ext in ("csv", "pgm"):
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()
    exact = hfd_2d(first.field, 65)
    quantized = hfd_2d(read_series(tmp_path / "a.pgm"), 65)
    assert abs(exact - quantized) < 0.02


def test_hfd_on_files(tmp_path):
    (tmp_path / "flat.txt").write_text("\n".join(["0.5"] * 30))
    res = run_hfd(str(tmp_path / "flat.txt"), [5])
    assert res["dimensions"]["5"] == 1.0 and res["degenerate"]["5"]
    (tmp_path / "bad.txt").write_text("0\n1\ninf\n2\n")
    with pytest.raises(NonFiniteInput):
        run_hfd(str(tmp_path / "bad.txt"), [2])
    np.savetxt(tmp_path / "line.txt", np.arange(200.0))
    res = run_hfd(str(tmp_path / "line.txt"), [10, 20], fit_path=str(tmp_path / "fit.csv"))
    assert res["dimensions"]["20"] == pytest.approx(1.0, abs=0.02)
    rows = (tmp_path / "fit.csv").read_text().splitlines()
    assert rows[0] == "k,measure,abscissa,ordinate,cumulative_dimension" and len(rows) == 21


def test_oracle_check_examples():
    cfg = parse_config(base_config(oracle={"depth": 5}))
    assert run_oracle_check(cfg)["passed"]
    assert run_oracle_check(cfg, depth=0)["passed"]
    checker = parse_config({"space": {"dimension": 2, "M": 8},
                            "system": {"family": "checker-2d", "n": 3}})
    report = run_oracle_check(checker, depth=4)
    assert report["max_discrepancy"] == 0.0


def test_cli_exit_codes(tmp_path, capsys):
    good = write_json(tmp_path / "good.json", base_config(
        outputs={"density_path": str(tmp_path / "a.csv")}))
    assert main(["attractor", good]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n"] == 2 and summary["iterations"] == 10
    assert len(summary["sup_change_trace"]) == 10
    assert main(["oracle-check", good, "--depth", "4"]) == 0
    assert main(["dtheta", str(tmp_path / "a.csv"), str(tmp_path / "a.csv")]) == 0
    assert json.loads(capsys.readouterr().out.split("}\n", 1)[1])["dtheta"] == 0.0
    assert main(["hfd", good, "--kmax", "4"]) == 0

    bad = write_json(tmp_path / "bad.json", base_config(space={"dimension": 1, "M": 1}))
    assert main(["attractor", bad]) == 2
    assert "space.M" in capsys.readouterr().err
    assert main(["attractor", str(tmp_path / "missing.json")]) == 2
    expanding = write_json(tmp_path / "exp.json", base_config(
        system={"maps": [{"slope": 1.0, "offset": 0.0}], "weights": [0.0]}))
    assert main(["attractor", expanding]) == 3
    assert main(["oracle-check", good, "--depth", "30"]) == 4
