import math
import os

import pytest

import iptree

DATA = os.environ.get("IPTREE_DATA", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


@pytest.fixture
def coin():
    return iptree.Model(os.path.join(DATA, "imprecise_coin.json"))


def test_states(coin):
    assert coin.states == ["H", "T"]


def test_upper_and_lower(coin):
    assert coin.upper("ind(X[1]==H)") == pytest.approx(0.6, abs=1e-15)
    assert coin.lower("ind(X[1]==H)") == pytest.approx(0.4, abs=1e-15)
    assert coin.upper("ind(X[1]==H && X[2]==H)") == pytest.approx(0.36, abs=1e-15)
    assert coin.upper("ind(X[2]==H)", ["T"]) == pytest.approx(0.6, abs=1e-15)


def test_envelope_matches_engine(coin):
    expr = "sum(i=1..3, ind(X[i]==H)) - 2 * ind(X[1]==T && X[3]==T)"
    assert coin.envelope(expr) == pytest.approx(coin.upper(expr), abs=1e-12)


def test_hitting(coin):
    r = coin.hit_time(["T"], tol=1e-12, max_horizon=80)
    assert r["upper"]["value"] == pytest.approx(2.5, abs=1e-8)
    assert r["lower"]["value"] == pytest.approx(5 / 3, abs=1e-8)
    up, low = coin.hit_probability(["T"], tol=1e-12, max_horizon=40)
    assert up == pytest.approx(1.0, abs=1e-6) and low == pytest.approx(1.0, abs=1e-6)


def test_certificate_round_trip(coin):
    expr = "ind(X[1]==H) + ind(X[2]==H)"
    cert = coin.certificate(expr)
    report = coin.verify_certificate(cert, expr)
    assert report["valid"]
    assert report["bound"] == pytest.approx(coin.upper(expr), abs=1e-12)


def test_model_from_dict_round_trip(coin):
    again = iptree.Model(coin.to_dict())
    assert again.to_dict() == coin.to_dict()


def test_errors(coin):
    with pytest.raises(iptree.ExpressionSyntaxError):
        coin.upper("ind(X[1]==")
    with pytest.raises(iptree.SchemaError):
        iptree.Model({"schema": 1, "states": ["a"], "model": {"kind": "nope"}})
    with pytest.raises(iptree.Error):
        coin.upper("ind(X[1]==Q)")


def test_run_queries_is_deterministic(coin):
    queries = [{"kind": "eval", "expr": "ind(X[1]==H)"}, {"kind": "oracle_check", "trials": 5}]
    a = iptree.run_queries(coin, queries, seed=3)
    b = iptree.run_queries(coin, queries, seed=3, parallel=True)
    assert a == b
    assert a["schema"] == 1 and a["summary"]["failed"] == 0
    assert not any(isinstance(v, float) and math.isnan(v) for v in a["results"][0]["result"].values())
