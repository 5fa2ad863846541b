import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from h8verify import conjectures as cj
from h8verify.errors import OddNError
from h8verify.prime_tables import primes_upto


def test_constant():
    assert cj.GOLDBACH_CONSTANT == pytest.approx(1.1507283, abs=1e-7)


def test_goldbach_small_cases():
    count, w = cj.goldbach_weighted(100)
    primes = oracles.goldbach_primes(100)
    assert primes == [3, 11, 17, 29, 41, 47, 53, 59, 71, 83, 89, 97]
    assert count == 12 and w == pytest.approx(math.fsum(map(math.log, primes)), abs=1e-12)
    assert w == pytest.approx(43.053, abs=1e-3)
    assert cj.goldbach_weighted(6) == (1, pytest.approx(math.log(3)))
    assert cj.goldbach_weighted(4) == (0, 0.0)
    with pytest.raises(OddNError):
        cj.goldbach_weighted(101)


def test_goldbach_rhs():
    assert cj.goldbach_rhs(100) == pytest.approx(21.994, abs=1e-3)
    assert cj.goldbach_rhs(10**6) == pytest.approx(1.1507283 * 0.8802157 * 1e6 / math.log(1e6), rel=1e-6)


def test_twin_small_cases():
    count, w = cj.twin_weighted(100)
    assert oracles.twin_larger(100) == [5, 7, 13, 19, 31, 43, 61, 73]
    assert count == 8 and w == pytest.approx(24.661, abs=1e-3)
    assert cj.twin_weighted(6) == (1, pytest.approx(math.log(5)))
    assert cj.twin_weighted(10**6)[0] == 8169


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 2000))
def test_goldbach_against_oracle(m):
    N = 2 * m
    count, w = cj.goldbach_weighted(N)
    primes = oracles.goldbach_primes(N)
    assert count == len(primes)
    assert w == pytest.approx(math.fsum(map(math.log, primes)), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10**4))
def test_twins_against_oracle(N):
    count, w = cj.twin_weighted(N)
    larger = oracles.twin_larger(N)
    assert count == len(larger)
    assert w == pytest.approx(math.fsum(map(math.log, larger)), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10**5))
def test_goldbach_count_parity(m):
    N = 2 * m
    count, _ = cj.goldbach_weighted(N)
    half_prime = m > 2 and oracles.is_prime(m)
    assert count % 2 == (1 if half_prime else 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10**5), st.integers(0, 5000))
def test_twin_weight_monotone(N, dN):
    assert cj.twin_weighted(N + dN)[1] >= cj.twin_weighted(N)[1]


def test_range_matches_direct():
    rows = cj.goldbach_range(1, 3000)
    assert rows[0].N == 6 and rows[-1].N == 3000
    for r in rows[:: 37]:
        count, w = cj.goldbach_weighted(r.N)
        assert r.lhs_count == count
        assert r.lhs_weighted == pytest.approx(w, rel=1e-9)
    assert cj.goldbach_range(10, 8) == []


def test_counts_table():
    r = cj.goldbach_counts(200)
    assert [int(r[n]) for n in (6, 8, 10, 100, 200)] == [1, 2, 3, 12, len(oracles.goldbach_primes(200))]


def test_every_even_number_up_to_1e5_has_a_representation():
    rows = cj.goldbach_range(6, 10**5)
    assert len(rows) == (10**5 - 6) // 2 + 1
    assert min(r.lhs_count for r in rows) >= 1


def test_bound_comparison_examples():
    g = cj.bound_comparison(100, "GOLDBACH")
    assert g.ratio == pytest.approx(1.957, abs=1e-3) and g.passed
    t = cj.bound_comparison(100, "TWIN")
    assert t.ratio == pytest.approx(1.121, abs=1e-3) and t.passed
    empty = cj.bound_comparison(4, "TWIN")
    assert empty.lhs_count == 0 and empty.ratio == 0.0 and not empty.passed


def test_bound_csv(tmp_path):
    path = tmp_path / "b.csv"
    cj.write_bound_csv([cj.bound_comparison(100, "GOLDBACH")], path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(cj.BOUND_CSV_FIELDS)
    assert lines[1].startswith("100,GOLDBACH,12,") and lines[1].endswith(",PASS")
