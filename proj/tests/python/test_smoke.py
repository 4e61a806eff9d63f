import json
import math

import pytest

import excitrans
from excitrans.schema import CSV_COLUMNS, SchemaError, read_table


def test_schema_columns_match_the_core():
    assert tuple(excitrans.csv_columns()) == CSV_COLUMNS


def test_polariton_energies():
    upper, lower = excitrans.polariton_energies(100, 50.0)
    assert upper == pytest.approx(499.0)
    assert lower == pytest.approx(-501.0)


def test_transmission_is_a_probability():
    amplitudes = excitrans.transmission_q(N=100, g=50.0, Jprime=13.7, Delta=498.0, q=math.pi / 2)
    assert 0.0 <= amplitudes["T"] <= 1.0
    assert abs(amplitudes["t"]) ** 2 + abs(amplitudes["r"]) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_headline_packet_run():
    run = excitrans.transmit(N=50, g=10, Delta=69, Jprime=10)
    assert run["T_ts"] > 0.5
    assert run["t_s"] == pytest.approx(30.0)
    assert run["t_l"] == pytest.approx(55.0)


def test_steady_current_and_continuity():
    run = excitrans.steady(N=10, g=0.2, gamma_P=0.5, gamma_out=2.0, deltaJ=0.2, seed=3)
    assert run["I_out"] > 0.0
    assert abs(run["continuity_residual"]) < 1e-9


def test_unknown_override_is_rejected():
    with pytest.raises(ValueError, match="Nope"):
        excitrans.transmit(Nope=3)


def test_scenario_output_follows_the_schema(tmp_path):
    result = excitrans.scenario("fig1b", tmp_path, N=10)
    rows = read_table(result["csv"])
    assert len(rows) == result["rows"]
    assert {row["scenario"] for row in rows} == {"fig1b"}
    assert all(row["N"] == 10 for row in rows)
    meta = json.loads((tmp_path / "fig1b.meta.json").read_text())
    assert meta["resolved_parameters"]["N"] == 10
    assert "fig1b" in excitrans.scenario_ids()


def test_schema_errors(tmp_path):
    missing = tmp_path / "missing.csv"
    missing.write_text("scenario,seed,N\nfig1b,1,50\n")
    with pytest.raises(SchemaError, match="missing column M"):
        read_table(missing)
    extra = tmp_path / "extra.csv"
    extra.write_text(",".join(CSV_COLUMNS + ("bonus",)) + "\n")
    with pytest.raises(SchemaError, match="unexpected column bonus"):
        read_table(extra)
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(CSV_COLUMNS) + "\n")
    with pytest.raises(SchemaError, match="no data rows"):
        read_table(empty)


def test_fit_scaling_recovers_an_exponent():
    xs = [10.0, 20.0, 40.0, 80.0]
    fit = excitrans.fit_scaling(xs, [3.0 * x**-2 for x in xs], "power_law")
    assert fit["slope"] == pytest.approx(-2.0, abs=1e-9)
    with pytest.raises(ValueError):
        excitrans.fit_scaling(xs, xs, "cubic")


def test_quick_invariants_pass():
    checks = excitrans.validate()
    assert checks
    assert all(check["pass"] for check in checks), checks
