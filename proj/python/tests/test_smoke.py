import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest

import ldp_activation as ldp

ROOT = pathlib.Path(__file__).resolve().parents[2]

BERNOULLI = {
    "n_c": 10,
    "n_v": 1,
    "z_f": 0,
    "law_Zc": {"kind": "degenerate", "value": 1},
    "law_Zv": {"kind": "degenerate", "value": 1},
    "law_W": {"kind": "discrete", "support": [0, 1], "probs": [0.5, 0.5]},
}

MIXED = {
    "n_c": 150,
    "n_v": 249,
    "z_f": 0,
    "law_Zc": {"kind": "discrete", "support": [1, 2, 3], "probs": [0.3, 0.4, 0.3]},
    "law_Zv": {"kind": "discrete", "support": [0, 2, 5], "probs": [0.5, 0.3, 0.2]},
    "law_W": {"kind": "scaled_beta", "alpha": 2, "beta": 5, "max": 1},
}


def test_version_and_schema():
    assert ldp.__version__
    schema = ldp.config_schema()
    shipped = json.loads((ROOT / "schemas" / "config.schema.json").read_text())
    assert schema == shipped


def test_bernoulli_closed_form():
    # psi(theta) = (11/12) ln((1 + e^theta) / 2); at a = 0.75 * 11/12 the tilt is ln 3
    p = ldp.model(BERNOULLI)
    a = 0.75 * 11 / 12
    t = ldp.rate_annealed(p, a)
    assert t["theta"] == pytest.approx(math.log(3), abs=1e-9)
    assert t["rate"] == pytest.approx(11 / 12 * (0.75 * math.log(3) - math.log(2)), abs=1e-9)


def test_sharp_estimate_against_exact():
    w = {"kind": "discrete",
         "support": [0.03, 0.11, 0.19, 0.26, 0.38, 0.47, 0.55, 0.68, 0.79, 0.91, 1.0],
         "probs": [0.12, 0.11, 0.1, 0.1, 0.09, 0.09, 0.09, 0.08, 0.08, 0.07, 0.07]}
    p = ldp.model(MIXED | {"law_W": w, "law_Zv": {"kind": "discrete", "support": [0, 1, 2, 4],
                                                  "probs": [0.3, 0.3, 0.2, 0.2]},
                           "n_c": 5, "n_v": 6})
    a = 2.2274
    est = ldp.probability_annealed(p, a)
    assert est["theta"] * math.sqrt(p.n) >= 3
    exact = ldp.exact_tail(p, a)
    assert exact.method == "exact"
    assert abs(est["value"] / exact.value - 1) <= 0.25


def test_quenched_and_decomposition():
    p = ldp.model(MIXED)
    env = ldp.sample_environment(p, "R", seed=5)
    assert env.kind == "R" and len(env.values) == p.n
    a = 0.65
    q = ldp.probability_quenched(p, env, a)
    assert 0 < q["value"] < 1
    d = ldp.decompose_rate(p, env, a)
    assert d["direct_rate"] == pytest.approx(q["rate"], rel=1e-9)
    assert abs(d["discrepancy"]) < 1e-3


def test_errors_carry_codes():
    p = ldp.model(MIXED)
    with pytest.raises(ldp.DomainError) as info:
        ldp.probability_annealed(p, 0.1)
    assert info.value.code == "below-mean"
    assert isinstance(info.value, ldp.LdpError)
    with pytest.raises(ldp.SchemaError):
        ldp.model({"n_c": 1})
    with pytest.raises(ldp.DomainError):
        ldp.derived_constants(p.with_z_f(1e6))


def test_oracles_agree():
    p = ldp.model(MIXED | {"n_c": 5, "n_v": 6, "law_W": {"kind": "discrete",
                                                      "support": [0.0, 0.17, 0.29, 0.41, 0.64, 0.83],
                                                      "probs": [0.3, 0.2, 0.2, 0.15, 0.1, 0.05]}})
    a = 1.2 * ldp.moments_annealed(p)["mean"] / p.n
    exact = ldp.exact_tail(p, a)
    mc = ldp.naive_mc(p, a, draws=40000, seed=3)
    assert abs(mc.value - exact.value) < 4 * mc.std_error + 1e-12
    is_ = ldp.tilted_is(p, a, draws=40000, seed=3)
    assert abs(is_.value - exact.value) < 4 * is_.std_error + 1e-12


def test_fluctuation_report_shape():
    p = ldp.model(MIXED)
    rep = ldp.simulate_fluctuation(p, "Z", [0.6, 0.7], replicas=200, seed=1)
    cov = rep["empirical_cov"]
    assert len(cov) == 2 and cov[0][1] == cov[1][0]
    assert rep["min_eigen_predicted"] > 0


def test_run_config_summary_validates(tmp_path):
    schema = ldp.summary_schema()
    configs = {
        "curve": {"experiment": "curve", "regime": "quenched-Z", "model": MIXED,
                  "a_grid": [0.55, 0.6, 0.7], "z_f_list": [0, 10], "seed": 2, "gnuplot": True},
        "moments": {"experiment": "moments", "regime": "annealed", "model": MIXED,
                    "z_f_list": [0, 10, 50]},
        "fluctuation": {"experiment": "fluctuation", "regime": "quenched-R", "model": MIXED,
                        "a_grid": [0.6, 0.7], "replicas": 150, "seed": 4},
    }
    for name, cfg in configs.items():
        out = tmp_path / name
        cfg = cfg | {"output_dir": str(out)}
        ldp.check_config(cfg)
        code, summary = ldp.run_config(cfg)
        assert code == 0
        jsonschema.validate(summary, schema)
        on_disk = json.loads((out / "summary.json").read_text())
        jsonschema.validate(on_disk, schema)
        for f in summary["output_files"]:
            assert (out / f).exists()
    header = (tmp_path / "curve" / "results.csv").read_text().splitlines()[0]
    assert header.startswith("regime,env_index,env_hash,z_f,a,probability")


def test_shipped_configs_match_schema():
    schema = ldp.config_schema()
    configs = sorted((ROOT / "configs").glob("*.json"))
    assert configs
    for path in configs:
        cfg = json.loads(path.read_text())
        jsonschema.validate(cfg, schema)
        ldp.check_config(cfg)


@pytest.mark.skipif("LDP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_schema_and_exit_codes(tmp_path):
    cli = os.environ["LDP_CLI"]
    out = subprocess.run([cli, "schema"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ldp.config_schema()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "curve", "model": MIXED, "a_grid": []}))
    res = subprocess.run([cli, "run", str(bad)], capture_output=True, text=True)
    assert res.returncode == 2
    assert json.loads(res.stderr)["error"]["kind"] == "schema"
