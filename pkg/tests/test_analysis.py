import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cctf.analysis import (
    METRIC_COLUMNS,
    correlation_table,
    increase_fraction,
    pearson_r,
    surface_table,
)
from cctf.errors import InvalidArgument, UndefinedCorrelation, UnknownColumn


def pearson_oracle(x, y):
    """Two-pass definitional Pearson R with compensated sums, no numpy."""
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [a - mx for a in x]
    dy = [b - my for b in y]
    cov = math.fsum(a * b for a, b in zip(dx, dy))
    vx = math.fsum(a * a for a in dx)
    vy = math.fsum(b * b for b in dy)
    return cov / math.sqrt(vx * vy)


@pytest.mark.parametrize("x,y,want", [
    ([1, 2, 3], [2, 4, 6], 1.0),
    ([1, 2, 3], [-1, -2, -3], -1.0),
    ([1, 2, 3], [1, 3, 2], 0.5),
])
def test_worked_examples(x, y, want):
    assert pearson_r(x, y) == pytest.approx(want, abs=1e-15)


def test_random_sequences_match_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 501))
        x = rng.normal(size=n)
        y = rng.uniform(-1, 1) * x + rng.normal(size=n)
        worst = max(worst, abs(pearson_r(x, y) - pearson_oracle(x.tolist(), y.tolist())))
    assert worst < 1e-12


def test_errors():
    with pytest.raises(InvalidArgument):
        pearson_r([1, 2, 3], [1, 2])
    with pytest.raises(InvalidArgument):
        pearson_r([1], [2])
    with pytest.raises(UndefinedCorrelation):
        pearson_r([1, 1, 1], [1, 2, 3])
    with pytest.raises(UndefinedCorrelation):
        pearson_r([1, 2, 3], [4, 4, 4])


finite = st.floats(-1e6, 1e6, allow_nan=False)
pairs = st.integers(3, 60).flatmap(lambda n: st.tuples(
    st.lists(finite, min_size=n, max_size=n), st.lists(finite, min_size=n, max_size=n)))


def spread(v):
    v = np.asarray(v)
    return np.ptp(v) > 1e-3 * (np.abs(v).max() + 1)


@settings(max_examples=300, deadline=None)
@given(pairs, st.floats(0.01, 100), st.floats(-100, 100))
def test_symmetry_and_affine_invariance(xy, a, b):
    x, y = xy
    if not (spread(x) and spread(y)):
        return
    r = pearson_r(x, y)
    assert -1.0 <= r <= 1.0
    assert pearson_r(y, x) == pytest.approx(r, abs=1e-12)
    assert pearson_r(a * np.asarray(x) + b, y) == pytest.approx(r, abs=1e-9)
    assert pearson_r(x, -np.asarray(x)) == pytest.approx(-1.0, abs=1e-12)


def toy_columns():
    # 4 rows, hand-picked
    return {
        "config_index": np.array([0, 1, 2, 3]),
        "trial": np.zeros(4, dtype=np.int64),
        "seed": np.zeros(4, dtype=np.uint64),
        "exploiters": np.array([1.0, 2.0, 3.0, 4.0]),
        "interceptors": np.array([4.0, 1.0, 3.0, 2.0]),
        "mean_compromised": np.array([0.4, 0.3, 0.2, 0.1]),
        "max_compromised": np.array([0.9, 0.5, 0.7, 0.2]),
        "mean_offline": np.array([0.1, 0.0, 0.3, 0.2]),
        "max_offline": np.array([0.5, 0.5, 0.6, 0.1]),
        "metric2_two_thirds": np.array([1.0, 0.0, 1.0, 0.0]),
        "metric3_center": np.array([1.0, 1.0, 0.0, 0.0]),
    }


def test_correlation_table_matches_oracle():
    cols = toy_columns()
    table = correlation_table(cols)
    for strategy, scol in (("attacker_strategy", "exploiters"), ("defender_strategy", "interceptors")):
        for metric in METRIC_COLUMNS:
            want = pearson_oracle(cols[scol].tolist(), cols[metric].tolist())
            assert table[(strategy, metric)] == pytest.approx(want, abs=1e-12)
    # strictly decreasing mean_compromised in exploiters
    assert table[("attacker_strategy", "mean_compromised")] == pytest.approx(-1.0)
    lines = table.to_csv().splitlines()
    assert lines[0] == "strategy," + ",".join(METRIC_COLUMNS)
    assert lines[1].startswith("attacker_strategy,-1.000000")


def test_config_level_correlation():
    cols = toy_columns()
    doubled = {k: np.concatenate([v, v]) for k, v in cols.items()}
    a = correlation_table(cols)
    b = correlation_table(doubled, level="configs")
    for key in a.values:
        assert b[key] == pytest.approx(a[key], abs=1e-12)


def test_single_config_is_undefined():
    cols = {k: v[:1].repeat(3) for k, v in toy_columns().items()}
    with pytest.raises(UndefinedCorrelation, match="attacker_strategy"):
        correlation_table(cols)


def test_surface_raw_values_when_one_row_per_cell():
    cols = toy_columns()
    s = surface_table(cols, "mean_compromised")
    assert s.exploiters == (1, 2, 3, 4) and s.interceptors == (1, 2, 3, 4)
    assert s.cell(1, 4) == 0.4 and s.cell(2, 1) == 0.3 and s.cell(3, 3) == 0.2 and s.cell(4, 2) == 0.1
    assert np.isnan(s.cell(1, 1))


def test_surface_constant_metric():
    cols = toy_columns()
    cols["mean_offline"] = np.full(4, 0.25)
    s = surface_table(cols, "mean_offline", "max")
    vals = s.values[~np.isnan(s.values)]
    assert np.all(vals == 0.25)


def test_surface_two_by_two_with_trials():
    cols = {
        "config_index": np.arange(8),
        "exploiters": np.array([1, 1, 1, 1, 2, 2, 2, 2], dtype=float),
        "interceptors": np.array([1, 1, 2, 2, 1, 1, 2, 2], dtype=float),
        "max_compromised": np.array([0.1, 0.3, 0.2, 0.6, 0.5, 0.7, 0.0, 1.0]),
    }
    s = surface_table(cols, "max_compromised")
    assert s.values.ravel().tolist() == pytest.approx([0.2, 0.4, 0.6, 0.5])
    m = surface_table(cols, "max_compromised", "max")
    assert m.values.tolist() == [[0.3, 0.6], [0.7, 1.0]]
    assert increase_fraction(s) == 0.5
    csv = s.to_csv().splitlines()
    assert csv[0] == "exploiters\\interceptors,1,2"
    assert csv[1] == "1,0.200000,0.400000"


def test_surface_errors():
    with pytest.raises(UnknownColumn):
        surface_table(toy_columns(), "nope")
    with pytest.raises(InvalidArgument):
        surface_table(toy_columns(), "mean_offline", "median")
