import numpy as np
import pytest

from midas_specd.dataio import load_sample, save_sample
from midas_specd.dgp import DgpSpec, simulate
from midas_specd.exceptions import MissingValue, ParseError, RaggedPeriod


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def toy(tmp_path):
    low = _write(tmp_path / "low.csv", "period_id,y\n2,0.5\n1,1.5\n")
    high = _write(tmp_path / "high.csv",
                  "period_id,lag_index,x\n1,1,10\n1,0,11\n2,0,21\n2,1,20\n")
    return low, high


def test_toy_load(toy):
    s = load_sample(*toy)
    np.testing.assert_array_equal(s.y, [1.5, 0.5])
    np.testing.assert_array_equal(s.x_high, [[11, 10], [21, 20]])
    assert s.m == 2
    assert load_sample(*toy, m=2).x_high.tolist() == s.x_high.tolist()


def test_numeric_period_order(tmp_path):
    low = _write(tmp_path / "l.csv", "y,period_id\n1,10\n2,9\n")
    high = _write(tmp_path / "h.csv", "period_id,lag_index,x\n10,0,1\n9,0,2\n")
    s = load_sample(low, high)
    assert s.y.tolist() == [2.0, 1.0]


def test_ragged_period(toy, tmp_path):
    low, _ = toy
    high = _write(tmp_path / "h.csv",
                  "period_id,lag_index,x\n1,0,1\n1,1,2\n2,0,1\n2,1,2\n2,2,3\n")
    with pytest.raises(RaggedPeriod) as info:
        load_sample(low, high, m=2)
    assert info.value.period == "2" and info.value.count == 3


def test_missing_lag_is_ragged(toy, tmp_path):
    low, _ = toy
    high = _write(tmp_path / "h.csv", "period_id,lag_index,x\n1,0,1\n1,1,2\n2,0,1\n2,2,2\n")
    with pytest.raises(RaggedPeriod):
        load_sample(low, high)


def test_missing_value(toy, tmp_path):
    low, high = toy
    bad = _write(tmp_path / "l.csv", "period_id,y\n1,\n2,1\n")
    with pytest.raises(MissingValue):
        load_sample(bad, high)
    bad = _write(tmp_path / "h.csv", "period_id,lag_index,x\n1,0,NaN\n1,1,1\n2,0,1\n2,1,1\n")
    with pytest.raises(MissingValue):
        load_sample(low, bad)


def test_parse_errors_carry_line(toy, tmp_path):
    low, high = toy
    bad = _write(tmp_path / "h.csv", "period_id,lag_index,x\n1,0,1\n1,1,abc\n")
    with pytest.raises(ParseError) as info:
        load_sample(low, bad)
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        load_sample(_write(tmp_path / "l2.csv", "period,y\n1,2\n"), high)
    assert info.value.line == 1
    with pytest.raises(ParseError):
        load_sample(_write(tmp_path / "l3.csv", "period_id,y\n1,2\n1,3\n"), high)
    with pytest.raises(ParseError):
        load_sample(tmp_path / "nope.csv", high)


def test_round_trip_is_exact(tmp_path):
    s = simulate(DgpSpec(T=37, m=9, c=0.4, d=0.2, theta=1.1, seed=6))
    save_sample(s, tmp_path / "l.csv", tmp_path / "h.csv")
    back = load_sample(tmp_path / "l.csv", tmp_path / "h.csv")
    assert back.y.tobytes() == s.y.tobytes()
    assert back.x_high.tobytes() == s.x_high.tobytes()
