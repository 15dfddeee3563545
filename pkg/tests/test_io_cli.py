import json

import numpy as np
import pytest

import ssalab as sl
from ssalab import io as sio
from ssalab.cli import main, parse_group


def write_cosine_csv(path, n_points=100, header=False):
    f = np.cos(2 * np.pi * np.arange(n_points) / 10)
    lines = (["value"] if header else []) + [repr(float(v)) for v in f]
    path.write_text("\n".join(lines) + "\n")
    return f


# -- series CSV -------------------------------------------------------------------


def test_read_series_plain_and_header(tmp_path):
    p = tmp_path / "a.csv"
    f = write_cosine_csv(p, header=False)
    np.testing.assert_array_equal(sio.read_series(p), f)
    f2 = write_cosine_csv(p, header=True)
    np.testing.assert_array_equal(sio.read_series(p), f2)


def test_read_series_rejects_nan_and_garbage(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1.0\nnan\n2.0\n")
    with pytest.raises(ValueError, match="NaN"):
        sio.read_series(p)
    p.write_text("1.0\ntwo\n")
    with pytest.raises(ValueError, match="not a number"):
        sio.read_series(p)
    p.write_text("")
    with pytest.raises(ValueError):
        sio.read_series(p)


def test_series_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(50)
    p = tmp_path / "x.csv"
    sio.write_series(p, f)
    np.testing.assert_array_equal(sio.read_series(p), f)


def test_eigentriples_round_trip_exact(tmp_path):
    f = np.cos(2 * np.pi * np.arange(60) / 10) + 0.05 * np.random.default_rng(1).standard_normal(60)
    ets = sl.decompose(sl.embed(f, 20))
    p = tmp_path / "ets.json"
    sio.write_eigentriples(p, ets, mean=None)
    back, mean = sio.read_eigentriples(p)
    assert mean == 0.0
    assert back.method == ets.method and back.L == ets.L and back.K == ets.K
    np.testing.assert_array_equal(back.sigmas, ets.sigmas)
    np.testing.assert_array_equal(back.u, ets.u)
    np.testing.assert_array_equal(back.v, ets.v)


def test_parse_group():
    assert parse_group("1,2,5-8") == [1, 2, 5, 6, 7, 8]
    assert parse_group("3") == [3]
    with pytest.raises(ValueError):
        parse_group("0,1")
    with pytest.raises(ValueError):
        parse_group("a-b")
    with pytest.raises(ValueError):
        parse_group(",")


# -- CLI subcommands ----------------------------------------------------------------


def test_cli_reconstruct_noise_free_cosine(tmp_path):
    src = tmp_path / "cos.csv"
    f = write_cosine_csv(src)
    out = tmp_path / "rec.csv"
    rc = main(
        ["reconstruct", "--input", str(src), "--window", "50", "--group", "1,2",
         "--output", str(out)]
    )
    assert rc == 0
    rec = sio.read_series(out)
    assert np.max(np.abs(rec - f)) <= 1e-8


def test_cli_decompose_reconstruct_round_trip_bitwise(tmp_path):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    ets_path = tmp_path / "ets.json"
    direct = tmp_path / "direct.csv"
    via = tmp_path / "via.csv"
    assert main(["decompose", "-i", str(src), "-L", "50", "-o", str(ets_path)]) == 0
    assert main(
        ["reconstruct", "-i", str(src), "-L", "50", "--group", "1,2", "-o", str(direct)]
    ) == 0
    assert main(
        ["reconstruct", "--from-decomposition", str(ets_path), "--group", "1,2", "-o", str(via)]
    ) == 0
    assert direct.read_bytes() == via.read_bytes()


def test_cli_estimate_esprit(tmp_path):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "est.csv"
    rc = main(
        ["estimate", "-i", str(src), "-L", "50", "--rank", "2", "--method", "esprit-ls",
         "-o", str(out)]
    )
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "frequency,damping,modulus"
    freqs = [float(r.split(",")[0]) for r in rows[1:]]
    assert any(abs(fr - 0.1) <= 1e-6 for fr in freqs)


@pytest.mark.parametrize("method", ["esprit-tls", "root-music", "root-minnorm", "music", "minnorm"])
def test_cli_estimate_all_methods(tmp_path, method):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "est.csv"
    rc = main(
        ["estimate", "-i", str(src), "-L", "20", "--rank", "2", "--method", method,
         "-o", str(out)]
    )
    assert rc == 0
    rows = out.read_text().strip().splitlines()[1:]
    freqs = [float(r.split(",")[0]) for r in rows]
    assert any(abs(fr - 0.1) <= 1e-4 for fr in freqs), (method, freqs)


def test_cli_estimate_ev_needs_noise_triples(tmp_path):
    # noise-free input retains no noise eigentriples, so EV weighting must refuse
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "est.csv"
    rc = main(
        ["estimate", "-i", str(src), "-L", "20", "--rank", "2", "--method", "ev",
         "-o", str(out)]
    )
    assert rc == 3

    noisy = tmp_path / "noisy.csv"
    f = np.cos(2 * np.pi * np.arange(200) / 10)
    f = f + 0.1 * np.random.default_rng(0).standard_normal(200)
    noisy.write_text("\n".join(repr(float(v)) for v in f) + "\n")
    rc = main(
        ["estimate", "-i", str(noisy), "-L", "60", "--rank", "2", "--method", "ev",
         "-o", str(out)]
    )
    assert rc == 0
    rows = out.read_text().strip().splitlines()[1:]
    freqs = [float(r.split(",")[0]) for r in rows]
    assert any(abs(fr - 0.1) <= 1e-3 for fr in freqs)


def test_cli_forecast_exponential(tmp_path):
    src = tmp_path / "exp.csv"
    f = 2.0 ** np.arange(20)
    src.write_text("\n".join(repr(float(v)) for v in f) + "\n")
    out = tmp_path / "fc.csv"
    rc = main(
        ["forecast", "-i", str(src), "--window", "10", "--rank", "1", "--steps", "3",
         "-o", str(out)]
    )
    assert rc == 0
    got = sio.read_series(out)
    want = np.array([2.0**20, 2.0**21, 2.0**22])
    assert np.max(np.abs(got - want) / want) <= 1e-6


def test_cli_pseudospectrum(tmp_path):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "ps.csv"
    rc = main(
        ["pseudospectrum", "-i", str(src), "-L", "20", "--rank", "2", "--method", "music",
         "--gridsize", "512", "-o", str(out)]
    )
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "omega,value"
    assert len(rows) == 513


def test_cli_simulate_reproducible(tmp_path):
    cfg = {
        "signal": {"kind": "damped_cos_wn", "n": 60, "b": 1.0, "sigma": 0.1},
        "windows": [20, 30],
        "reps": 5,
        "functional": "reconstruction",
        "seed": 3,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["simulate", "--config", str(cfg_path), "-o", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg_path), "-o", str(out2)]) == 0
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
    report = json.loads((tmp_path / "r1.json").read_text())
    assert report["windows"] == [20, 30]
    assert len(report["rmse"]) == 2
    header = (tmp_path / "r1.csv").read_text().splitlines()[0]
    assert header == "L,functional,MSD,RMSE,reps"


def test_cli_center_flag_round_trip(tmp_path):
    src = tmp_path / "shifted.csv"
    base = np.cos(2 * np.pi * np.arange(100) / 10) + 5.0
    src.write_text("\n".join(repr(float(v)) for v in base) + "\n")
    out = tmp_path / "rec.csv"
    rc = main(
        ["reconstruct", "-i", str(src), "-L", "40", "--group", "1,2", "--center",
         "-o", str(out)]
    )
    assert rc == 0
    rec = sio.read_series(out)
    assert np.max(np.abs(rec - base)) <= 1e-8


def test_cli_exit_codes(tmp_path):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    nan_csv = tmp_path / "nan.csv"
    nan_csv.write_text("1.0\nnan\n")
    out = str(tmp_path / "o.csv")
    # io error: missing input
    assert main(["decompose", "-i", str(tmp_path / "missing.csv"), "-o", out]) == 4
    # parse error: NaN input
    assert main(["decompose", "-i", str(nan_csv), "-o", out]) == 2
    # domain error: window out of range
    assert main(["decompose", "-i", str(src), "-L", "1000", "-o", out]) == 3
    # parse error: bad group syntax
    assert main(
        ["reconstruct", "-i", str(src), "-L", "20", "--group", "x", "-o", out]
    ) == 2
    # domain error: rank too large for the retained triples
    assert main(
        ["estimate", "-i", str(src), "-L", "20", "--rank", "19", "--method", "esprit-ls",
         "-o", out]
    ) == 3


def test_cli_verbose_window_default(tmp_path, capsys):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "rec.csv"
    assert main(["reconstruct", "-i", str(src), "--group", "1,2", "-o", str(out),
                 "--verbose"]) == 0
    err = capsys.readouterr().err
    assert "defaulted" in err and "50" in err


def test_cli_toeplitz_forecast_warns(tmp_path, capsys):
    src = tmp_path / "cos.csv"
    write_cosine_csv(src)
    out = tmp_path / "fc.csv"
    rc = main(
        ["forecast", "-i", str(src), "-L", "20", "--rank", "2", "--steps", "2",
         "--toeplitz", "-o", str(out)]
    )
    assert rc == 0
    assert "warning" in capsys.readouterr().err.lower()


def test_signal_model_json(tmp_path):
    f = np.cos(2 * np.pi * np.arange(40) / 10)
    z = np.exp(2j * np.pi / 10)
    model = sl.fit_signal_model(f, sl.PoleSet(np.array([z, z.conjugate()])))
    p = tmp_path / "model.json"
    sio.write_signal_model(p, model)
    doc = json.loads(p.read_text())
    assert len(doc) == 2
    assert doc[0]["multiplicity"] == 1
    assert doc[0]["coefficients"][0][0] == pytest.approx(0.5, abs=1e-8)
