import json

import numpy as np
import pytest

from gacpd.arma import SimSpec, ts_sim
from gacpd.cli import main, read_series, summary_text, write_series
from gacpd.core import Chromosome, GaResult


@pytest.fixture
def series(tmp_path):
    path = tmp_path / "x.csv"
    assert main(["simulate", "--n", "1000", "--beta", "0.5", "--phi", "0.5", "--sigma", "1",
                 "--delta", "2,-2", "--cp", "250,750", "--seed", "1234", "-o", str(path)]) == 0
    return path


def test_simulate_writes_series_and_sidecar(series):
    x = read_series(str(series))
    assert x.size == 1000
    np.testing.assert_array_equal(x, ts_sim(SimSpec(n=1000, beta=(0.5,), phi=(0.5,), delta=(2.0, -2.0),
                                                    cp_loc=(250, 750), seed=1234)))
    side = json.loads((series.parent / "x.csv.json").read_text())
    assert side["taus"] == [250, 750] and side["seed"] == 1234
    assert series.read_text().splitlines()[0] == "x"


def test_simulate_is_byte_reproducible(tmp_path, series):
    other = tmp_path / "y.csv"
    main(["simulate", "--n", "1000", "--beta", "0.5", "--phi", "0.5", "--sigma", "1",
          "--delta", "2,-2", "--cp", "250,750", "--seed", "1234", "-o", str(other)])
    assert other.read_bytes() == series.read_bytes()


def test_noiseless_simulation(tmp_path):
    path = tmp_path / "s.csv"
    assert main(["simulate", "--n", "6", "--beta", "1", "--sigma", "0", "--phi", "",
                 "--delta", "2", "--cp", "3", "-o", str(path)]) == 0
    assert read_series(str(path)).tolist() == [1, 1, 1, 3, 3, 3]


def test_simulate_rejects_bad_parameters(tmp_path, capsys):
    code = main(["simulate", "--n", "100", "--phi", "1.2", "-o", str(tmp_path / "b.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_detect_basic_run(tmp_path, series, capsys):
    out, trace = tmp_path / "r.json", tmp_path / "t.tsv"
    code = main(["detect", "-i", str(series), "--objective", "bic-ar1", "--pop-size", "100",
                 "--maxgen", "4000", "--maxconv", "1000", "--seed", "7",
                 "--out", str(out), "--trace", str(trace)])
    assert code == 0
    text = capsys.readouterr().out
    assert "Number of Changepoints =  2" in text
    res = json.loads(out.read_text())
    taus = res["best_chromosome"]["taus"]
    assert abs(taus[0] - 250) <= 5 and abs(taus[1] - 750) <= 5
    assert trace.read_text().startswith("generation\tbest_fitness\n")
    # the summary is a function of the stored JSON
    assert summary_text(GaResult.from_dict(res)) == text


def test_divisibility_error_before_running(series, capsys):
    code = main(["detect", "-i", str(series), "--engine", "gaisl", "--pop-size", "100", "--islands", "7"])
    assert code == 2
    assert "divisible" in capsys.readouterr().err


def test_prange_without_order_genes_rejected(series):
    assert main(["detect", "-i", str(series), "--objective", "bic-ar1", "--prange", "0-3,0-3"]) == 2


def test_config_precedence(tmp_path, series):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"input = {series}\nobjective = bic-iid\npop-size = 20\nmaxgen = 50\nseed = 3\n"
                   f"out = {tmp_path / 'a.json'}\n")
    assert main(["detect", "--config", str(cfg)]) == 0
    first = json.loads((tmp_path / "a.json").read_text())
    assert first["settings"]["pop_size"] == 20 and first["generations"] == 50
    assert main(["detect", "--config", str(cfg), "--pop-size", "30", "--out", str(tmp_path / "b.json")]) == 0
    second = json.loads((tmp_path / "b.json").read_text())
    assert second["settings"]["pop_size"] == 30 and second["settings"]["seed"] == 3


def test_unknown_config_key(tmp_path, series):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("popsize = 20\n")
    assert main(["detect", "-i", str(series), "--config", str(cfg)]) == 2


def test_suggestions_file(tmp_path, series):
    sfile = tmp_path / "sug.txt"
    sfile.write_text("750,250\n\n400\n")
    out = tmp_path / "s.json"
    assert main(["detect", "-i", str(series), "--objective", "bic-iid", "--pop-size", "10",
                 "--maxgen", "0", "--suggest-file", str(sfile), "--seed", "1", "--out", str(out)]) == 0
    best = json.loads(out.read_text())["best_chromosome"]["taus"]
    assert best == [250, 750]


def test_distance_command(capsys):
    assert main(["distance", "--tau1", "249,750", "--tau2", "250,750", "--n", "1000"]) == 0
    assert capsys.readouterr().out.strip() == "0.001"
    assert main(["distance", "--tau1", "", "--tau2", "250,750", "--n", "1000"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert main(["distance", "--tau1", "1", "--tau2", "5", "--n", "10"]) == 2


def test_order_selection_summary_layout():
    res = GaResult(best_fitness=2874.037, best_chromosome=Chromosome(n=1000, taus=(249, 749), orders=(1, 1)),
                   generations=5000, migrations=101, engine="gaisl",
                   settings={"pop_size": 400, "num_islands": 10, "pcrossover": 0.95, "pmutation": 0.3,
                             "pchangepoint": 0.01, "option": "both", "parallel": False})
    text = summary_text(res)
    assert "ar = 1" in text and "ma = 1" in text
    assert "Changepoints Locations =  249 749" in text
    assert "Number of Island        =  10" in text


def test_small_order_selection_run(tmp_path, capsys):
    x = ts_sim(SimSpec(n=300, beta=(0.0,), phi=(0.7,), delta=(4.0,), cp_loc=(150,), seed=2))
    path = tmp_path / "o.csv"
    write_series(str(path), x)
    code = main(["detect", "-i", str(path), "--objective", "bic-arma-order", "--prange", "0-1,0-1",
                 "--pop-size", "20", "--maxgen", "300", "--seed", "4"])
    assert code == 0
    text = capsys.readouterr().out
    assert "Model hyperparameters:" in text and "ar = " in text and "ma = " in text


def test_study_with_no_replications(tmp_path, capsys):
    scn = tmp_path / "s.cfg"
    scn.write_text("replications = 0\nn = 200\ncp = 100\ndelta = 3\n")
    report = tmp_path / "rep.json"
    assert main(["study", str(scn), "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["by_min_dist"]["1"]["replications"] == 0
    assert data["by_min_dist"]["1"]["mean_dist"] is None
