import math
from functools import lru_cache

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from h8verify.errors import (
    BoundaryTooCloseError,
    PoleError,
    StepTooCoarseWarning,
    TooCloseToZeroError,
    UnsupportedRegionError,
)
from h8verify.zeta_engine import (
    ZERO_CSV_FIELDS,
    ZeroRecord,
    count_zeros_rectangle,
    find_zeta_zeros,
    functional_eq_residual_zeta,
    lemma3_report,
    lemma3_residual,
    read_zero_table,
    safe_height,
    write_zero_table,
    xi_eval,
    xi_on_line_signed,
    zeta_eval,
    zeta_log_derivative,
)

# mpmath.zetazero(1..3)
FIRST_ZEROS = (14.134725141734693, 21.022039638771555, 25.010857580145688)

finite = dict(allow_nan=False, allow_infinity=False)
strip = st.builds(complex, st.floats(0.1, 0.9, **finite), st.floats(1.0, 100.0, **finite))


@lru_cache(maxsize=None)
def mpmath_zeros():
    return tuple(float(mpmath.zetazero(n).imag) for n in range(1, 30))


@pytest.fixture(scope="module")
def zeros_to_100():
    return find_zeta_zeros(0, 100)


def test_zeta_reference_values():
    assert zeta_eval(2) == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert zeta_eval(2) == pytest.approx(1.6449340668, abs=1e-10)
    assert zeta_eval(0) == pytest.approx(-0.5, abs=1e-12)
    assert abs(zeta_eval(0.5 + 14.134725j)) < 1e-4


@pytest.mark.parametrize("s", [0.5 + 1j, -1.5 + 3j, 3 - 40j, 0.5 + 999j, 0.2 + 5000j, 1.0 + 1e-6j])
def test_zeta_matches_mpmath(s):
    ref = complex(mpmath.zeta(s))
    assert abs(zeta_eval(s) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_zeta_pole_and_region():
    with pytest.raises(PoleError):
        zeta_eval(1)
    with pytest.raises(UnsupportedRegionError):
        zeta_eval(-3)
    with pytest.raises(UnsupportedRegionError):
        zeta_eval(0.5 + 2e4j)


def test_log_derivative_routes_agree():
    s = 0.3 + 17j
    ref = complex(mpmath.zeta(s, derivative=1) / mpmath.zeta(s))
    assert abs(zeta_log_derivative(s) - ref) < 1e-10
    assert abs(zeta_log_derivative(s, "difference") - ref) < 1e-6
    with pytest.raises(ValueError):
        zeta_log_derivative(s, "bogus")


def test_xi_values():
    assert xi_eval(0.5) == pytest.approx(0.4971207782, abs=1e-10)
    assert xi_eval(0) == pytest.approx(0.5, abs=1e-12)
    assert xi_eval(1) == pytest.approx(0.5, abs=1e-12)
    assert abs(xi_eval(0.3 + 7j) - xi_eval(0.7 - 7j)) < 1e-10
    assert abs(xi_eval(0.5 + 14.134725j)) < 1e-6


def test_xi_matches_mpmath_definition():
    s = mpmath.mpc(0.25, 9)
    ref = complex(s * (s - 1) / 2 * mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))
    assert abs(xi_eval(complex(s)) - ref) < 1e-12


@pytest.mark.parametrize("s", [0.3 + 7j, 0.5 + 50j, 0.9 + 3j])
def test_functional_equation_examples(s):
    assert functional_eq_residual_zeta(s) < 1e-9


@settings(max_examples=200, deadline=None)
@given(strip)
def test_functional_equation_on_strip(s):
    assert functional_eq_residual_zeta(s) < 1e-8


def test_functional_equation_undefined_at_pole():
    with pytest.raises(PoleError):
        functional_eq_residual_zeta(1.0)


def test_line_function_has_sign_of_xi():
    t = np.array([3.0, 17.0, 22.0, 40.0])
    direct = np.array([complex(mpmath.zeta(0.5 + 1j * x) * mpmath.gamma(0.25 + 0.5j * x)
                               * mpmath.pi ** (-0.25 - 0.5j * x) * (-0.25 - x * x)) for x in t])
    assert np.all(np.sign(xi_on_line_signed(t)) == np.sign(direct.real))


def test_first_three_zeros():
    recs = find_zeta_zeros(1, 30)
    assert len(recs) == 3
    for rec, ref in zip(recs, FIRST_ZEROS):
        assert rec.gamma_height == pytest.approx(ref, abs=1e-8)
        assert rec.residual_abs < 1e-8 and rec.source == "ZETA" and rec.refinement_width <= 1e-9


def test_zeros_to_100_match_mpmath(zeros_to_100):
    assert len(zeros_to_100) == 29
    heights = [r.gamma_height for r in zeros_to_100]
    assert heights == sorted(heights)
    for n, h in enumerate(heights, start=1):
        assert h == pytest.approx(float(mpmath.zetazero(n).imag), abs=1e-8)


def test_zero_records_are_zeros(zeros_to_100):
    for r in zeros_to_100:
        assert r.residual_abs <= 1e-8
        assert abs(zeta_eval(0.5 + 1j * r.gamma_height)) <= 1e-6


def test_empty_and_invalid_scan_ranges():
    assert find_zeta_zeros(20, 20) == []
    assert find_zeta_zeros(1, 10) == []
    with pytest.raises(UnsupportedRegionError):
        find_zeta_zeros(0, 2000)


def test_coarse_step_is_flagged():
    # neighbouring zeros closer than the step cancel in one grid cell
    with pytest.warns(StepTooCoarseWarning):
        find_zeta_zeros(10, 60, step=7.0, check_count=True)


@pytest.mark.parametrize("T, expected", [(5, 0), (30, 3), (100, 29)])
def test_rectangle_counts(T, expected):
    assert count_zeros_rectangle(T) == expected


@pytest.mark.parametrize("T", [30, 50, 100])
def test_rectangle_count_equals_line_count(T, zeros_to_100):
    top = safe_height(T, [r.gamma_height for r in zeros_to_100])
    on_line = sum(1 for r in zeros_to_100 if r.gamma_height < top)
    assert count_zeros_rectangle(top) == on_line == int(mpmath.nzeros(top))


def test_rectangle_count_rejects_contour_through_zero():
    with pytest.raises(BoundaryTooCloseError):
        count_zeros_rectangle(FIRST_ZEROS[0])


def test_safe_height_moves_off_zeros():
    h = safe_height(FIRST_ZEROS[0], FIRST_ZEROS)
    assert min(abs(h - z) for z in FIRST_ZEROS) >= 0.5
    assert safe_height(40.0, FIRST_ZEROS) == 40.0


@pytest.mark.parametrize("s", [0.6 + 5j, 0.5 + 2j, FIRST_ZEROS[0] * 1j + 0.5 + 0.01])
def test_lemma3_examples(s):
    assert lemma3_residual(s) < 1e-6


def test_lemma3_printed_coefficients_do_not_hold():
    rep = lemma3_report(0.6 + 5j)
    assert rep.residual < 1e-10
    assert rep.printed > 0.1


def test_lemma3_guard_near_zero():
    with pytest.raises(TooCloseToZeroError):
        lemma3_residual(0.5 + 1j * FIRST_ZEROS[0])


@settings(max_examples=200, deadline=None)
@given(strip)
def test_lemma3_on_strip_away_from_zeros(s):
    if min(abs(s - complex(0.5, h)) for h in mpmath_zeros()) < 0.05:
        return
    assert lemma3_residual(s) < 1e-5


def test_zero_table_round_trip(tmp_path):
    recs = [ZeroRecord(21.5, 1e-12, "ZETA", 1e-10), ZeroRecord(14.25, 2e-12, "ZETA", 5e-10)]
    path = tmp_path / "z.csv"
    write_zero_table(recs, path)
    assert path.read_text().splitlines()[0] == ",".join(ZERO_CSV_FIELDS)
    back = read_zero_table(path)
    assert [r.gamma_height for r in back] == [14.25, 21.5]
    assert back[0] == recs[1]


def test_zero_table_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_zero_table(path)
