"""Riemann zeta and xi evaluation, functional-equation checks, and zero
location on the critical line (sign scan of the real xi(1/2+it)) with an
independent argument-principle count.
"""
from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from ._euler_maclaurin import hurwitz_sum
from .errors import (
    BoundaryTooCloseError,
    PoleError,
    StepTooCoarseWarning,
    TooCloseToZeroError,
    UnsupportedRegionError,
)
from .special_functions import digamma, loggamma

LOG_PI = math.log(math.pi)
ZETA_SOURCE = "ZETA"
DEFAULT_ZERO_TOL = 1e-8
MAX_REFINEMENT_WIDTH = 1e-9
SCAN_STEP = 0.05


@dataclass(frozen=True)
class ZeroRecord:
    gamma_height: float
    residual_abs: float
    source: str
    refinement_width: float


def _check_region(s: np.ndarray, im_max: float = 1e4) -> None:
    if np.any(s.real <= -2.0):
        raise UnsupportedRegionError("continuation supported for Re(s) > -2 only")
    if np.any(np.abs(s.imag) > im_max):
        raise UnsupportedRegionError(f"|Im s| must be <= {im_max:g}")


def zeta_eval(s):
    """zeta(s) by Euler-Maclaurin, N = max(50, 2|s|), 12 Bernoulli terms."""
    arr = np.asarray(s, dtype=complex)
    _check_region(arr)
    if np.any(np.abs(arr - 1.0) <= 1e-12):
        raise PoleError("zeta has a pole at s = 1")
    value, _ = hurwitz_sum(arr, [1.0], [1.0])
    return complex(value) if arr.ndim == 0 else value


def zeta_and_derivative(s):
    arr = np.asarray(s, dtype=complex)
    _check_region(arr)
    if np.any(np.abs(arr - 1.0) <= 1e-12):
        raise PoleError("zeta has a pole at s = 1")
    value, deriv = hurwitz_sum(arr, [1.0], [1.0], derivative=True)
    if arr.ndim == 0:
        return complex(value), complex(deriv)
    return value, deriv


def zeta_log_derivative(s: complex, method: str = "analytic", h: float = 1e-6) -> complex:
    """zeta'/zeta(s).

    ``analytic`` differentiates the Euler-Maclaurin terms; ``difference`` is
    a central difference with one Richardson step (kept as the independent
    second route).
    """
    s = complex(s)
    if method == "analytic":
        z, dz = zeta_and_derivative(s)
        return dz / z
    if method == "difference":
        return central_log_derivative(zeta_eval, s, h)
    raise ValueError(f"unknown method {method!r}")


def central_log_derivative(f: Callable, s: complex, h: float = 1e-6) -> complex:
    pts = np.array([s + h, s - h, s + h / 2, s - h / 2])
    v = f(pts)
    d_h = (v[0] - v[1]) / (2 * h)
    d_h2 = (v[2] - v[3]) / h
    return complex((4 * d_h2 - d_h) / 3) / complex(f(s))


def _xi_log_factor(s: np.ndarray) -> np.ndarray:
    """log of (s-1) pi^{-s/2} Gamma(1 + s/2) = log of s(s-1)/2 pi^{-s/2} Gamma(s/2)."""
    return np.log(s - 1.0) - 0.5 * s * LOG_PI + loggamma(1.0 + 0.5 * s)


def xi_factorized(s):
    """(log_factor, zeta(s)) with xi(s) = exp(log_factor) * zeta(s).

    Working with the pair avoids the e^{-pi t/4} underflow of xi at large
    heights; phases and signs come from the pair without ever forming xi.
    """
    arr = np.asarray(s, dtype=complex)
    _check_region(arr)
    return _xi_log_factor(arr), zeta_eval(arr)


def xi_eval(s):
    """xi(s) = s(s-1)/2 pi^{-s/2} Gamma(s/2) zeta(s), with the s = 0, 1 limits.

    Underflows to 0 for heights around 900 and above; use ``xi_factorized``
    when only phase or sign is needed there.
    """
    arr = np.asarray(s, dtype=complex)
    near_one = np.abs(arr - 1.0) < 1e-8
    # xi(s) = xi(1-s): fold the removable singularity at s = 1 onto s = 0
    t = np.where(near_one, 1.0 - arr, arr)
    lf, z = xi_factorized(t)
    out = np.exp(lf) * z
    return complex(out) if arr.ndim == 0 else out


def zeta_functional_equation_rhs(s):
    """pi^{s-1/2} Gamma((1-s)/2) / Gamma(s/2) * zeta(1-s)."""
    arr = np.asarray(s, dtype=complex)
    factor = np.exp((arr - 0.5) * LOG_PI + loggamma(0.5 * (1.0 - arr)) - loggamma(0.5 * arr))
    out = factor * zeta_eval(1.0 - arr)
    return complex(out) if arr.ndim == 0 else out


def functional_eq_residual_zeta(s):
    """max of the normalized residuals of xi(s) = xi(1-s) and of
    zeta(s) = pi^{s-1/2} Gamma((1-s)/2)/Gamma(s/2) zeta(1-s)."""
    arr = np.asarray(s, dtype=complex)
    if np.any(np.abs(arr) < 1e-12) or np.any(np.abs(arr - 1.0) < 1e-12):
        raise PoleError("functional-equation residual undefined at s = 0, 1")
    xi_s = xi_eval(arr)
    xi_r = xi_eval(1.0 - arr)
    r_xi = np.abs(xi_s - xi_r) / (1.0 + np.abs(xi_s))
    z = zeta_eval(arr)
    r_z = np.abs(z - zeta_functional_equation_rhs(arr)) / (1.0 + np.abs(z))
    out = np.maximum(r_xi, r_z)
    return float(out) if arr.ndim == 0 else out


# -- critical line -----------------------------------------------------------

def xi_on_line_signed(t):
    """A positive multiple of xi(1/2 + it): Re(e^{i Im log_factor} zeta).

    Same sign as xi(1/2+it) at every height, no underflow.
    """
    t = np.asarray(t, dtype=float)
    s = 0.5 + 1j * t
    lf, z = xi_factorized(s)
    return np.real(np.exp(1j * lf.imag) * z)


def _scan_values(f: Callable, grid: np.ndarray, workers: int) -> np.ndarray:
    if workers <= 1 or len(grid) < 2 * workers:
        return f(grid)
    parts = np.array_split(grid, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(f, parts))
    return np.concatenate(results)


def bisect_sign_changes(
    f: Callable,
    brackets: Sequence[tuple[float, float]],
    width: float,
    max_iter: int = 200,
) -> list[tuple[float, float]]:
    """Vectorized bisection of every bracket until hi - lo <= width."""
    if not brackets:
        return []
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    f_lo = f(lo)
    for _ in range(max_iter):
        active = (hi - lo) > width
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        # a midpoint can stop moving once it reaches float resolution
        stuck = (mid == lo) | (mid == hi)
        if np.all(stuck | ~active):
            break
        f_mid = f(mid)
        same = np.sign(f_mid) == np.sign(f_lo)
        move_lo = active & same
        move_hi = active & ~same
        lo = np.where(move_lo, mid, lo)
        f_lo = np.where(move_lo, f_mid, f_lo)
        hi = np.where(move_hi, mid, hi)
    return list(zip(lo.tolist(), hi.tolist()))


def scan_sign_changes(
    f: Callable,
    t_min: float,
    t_max: float,
    step: float = SCAN_STEP,
    width: float = MAX_REFINEMENT_WIDTH,
    workers: int = 1,
) -> list[tuple[float, float]]:
    """Brackets (lo, hi) of width <= ``width`` around every grid sign change."""
    if t_max <= t_min:
        return []
    n = int(math.ceil((t_max - t_min) / step))
    grid = np.minimum(t_min + step * np.arange(n + 1), t_max)
    vals = _scan_values(f, grid, workers)
    brackets = []
    exact = []
    for k in range(len(grid) - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0.0:
            exact.append(grid[k])
        elif a * b < 0:
            brackets.append((grid[k], grid[k + 1]))
    if vals[-1] == 0.0:
        exact.append(grid[-1])
    refined = bisect_sign_changes(f, brackets, width)
    refined += [(t, t) for t in exact]
    return sorted(refined)


def find_zeta_zeros(
    t_min: float,
    t_max: float,
    tol: float = MAX_REFINEMENT_WIDTH,
    step: float = SCAN_STEP,
    zero_tol: float = DEFAULT_ZERO_TOL,
    workers: int = 1,
    check_count: bool = False,
) -> list[ZeroRecord]:
    """Zeros 1/2 + i gamma with t_min <= gamma <= t_max, ascending.

    Every grid sign change of xi(1/2+it) is bisected to width
    <= min(tol, 1e-9).  With ``check_count`` the number found is compared to
    the contour count and a StepTooCoarseWarning is issued on mismatch.
    """
    if t_max > 1e3:
        raise UnsupportedRegionError("zero scan supported up to height 1e3")
    if t_min < 0:
        raise ValueError("t_min must be non-negative")
    if t_max <= t_min:
        return []
    width = min(tol, MAX_REFINEMENT_WIDTH)
    brackets = scan_sign_changes(xi_on_line_signed, t_min, t_max, step, width, workers)
    records = []
    for lo, hi in brackets:
        g = 0.5 * (lo + hi)
        resid = abs(zeta_eval(0.5 + 1j * g))
        if resid > zero_tol:
            warnings.warn(f"zero near {g:.10f} has residual {resid:.3g} > {zero_tol:g}", RuntimeWarning)
        records.append(ZeroRecord(g, resid, ZETA_SOURCE, hi - lo))
    if check_count:
        _compare_with_contour(records, t_min, t_max)
    return records


def safe_height(t: float, heights: Iterable[float], margin: float = 0.5, search: float = 2.0) -> float:
    """A height within ``search`` below t that stays >= margin away from all heights if possible."""
    hs = np.asarray(list(heights), dtype=float)
    if hs.size == 0 or np.min(np.abs(hs - t)) >= margin:
        return t
    candidates = t - np.linspace(0.0, search, 81)
    dist = np.array([np.min(np.abs(hs - c)) for c in candidates])
    return float(candidates[int(np.argmax(dist))])


def _compare_with_contour(records: list[ZeroRecord], t_min: float, t_max: float) -> None:
    heights = [r.gamma_height for r in records]
    top = safe_height(t_max, heights)
    expected = count_zeros_rectangle(top)
    if t_min > 0:
        bottom = safe_height(t_min, heights)
        if bottom > 0.5:
            expected -= count_zeros_rectangle(bottom)
        found = sum(1 for h in heights if bottom < h < top)
    else:
        found = sum(1 for h in heights if h < top)
    if found != expected:
        warnings.warn(
            f"sign scan found {found} zeros but the contour counts {expected} below {top:g}; "
            "refine the scan step",
            StepTooCoarseWarning,
        )


# -- argument principle --------------------------------------------------------

ARG_STEP_LIMIT = 0.5   # max phase change (rad) tolerated between samples
MIN_BOUNDARY_ABS = 1e-12


def _xi_phase(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lf, z = xi_factorized(s)
    return lf.imag + np.angle(z), np.abs(z)


def _edge_phase_change(a: complex, b: complex, initial: int) -> float:
    """Continuous change of arg xi along the segment a -> b, by adaptive refinement."""
    params = np.linspace(0.0, 1.0, initial + 1)
    for _ in range(30):
        pts = a + (b - a) * params
        phase, mag = _xi_phase(pts)
        if np.min(mag) < MIN_BOUNDARY_ABS:
            raise BoundaryTooCloseError(f"|zeta| < {MIN_BOUNDARY_ABS:g} on the contour near {pts[np.argmin(mag)]}")
        d = np.diff(phase)
        d = (d + np.pi) % (2 * np.pi) - np.pi
        bad = np.abs(d) > ARG_STEP_LIMIT
        if not np.any(bad):
            return float(np.sum(d))
        mids = 0.5 * (params[:-1][bad] + params[1:][bad])
        params = np.sort(np.concatenate([params, mids]))
    raise BoundaryTooCloseError("phase refinement did not converge; contour passes too near a zero")


def count_zeros_rectangle(T: float, sigma_lo: float = -0.1, sigma_hi: float = 1.1) -> int:
    """Number of zeros of xi in [sigma_lo, sigma_hi] x [0, T], with multiplicity.

    On the bottom edge xi is real and positive, so the winding number comes
    from the right, top, and left edges only.
    """
    if T > 1e3:
        raise UnsupportedRegionError("contour count supported up to height 1e3")
    if T <= 0:
        return 0
    per_unit = 20
    right = _edge_phase_change(complex(sigma_hi, 0.0), complex(sigma_hi, T), max(8, int(T * per_unit)))
    top = _edge_phase_change(complex(sigma_hi, T), complex(sigma_lo, T), 64)
    left = _edge_phase_change(complex(sigma_lo, T), complex(sigma_lo, 0.0), max(8, int(T * per_unit)))
    turns = (right + top + left) / (2 * math.pi)
    count = round(turns)
    if abs(turns - count) > 0.1:
        raise BoundaryTooCloseError(f"winding {turns:.4f} is not close to an integer")
    return int(count)


# -- Lemma 3 ---------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResidual:
    """Residuals of the logarithmic-derivative identity at s and at conj(s).

    ``residual``   zeta'/zeta(s) + zeta'/zeta(1-s) - log pi
                   + (psi(s/2) + psi((1-s)/2))/2, which follows from the
                   functional equation.
    ``printed``    zeta'/zeta(s) + zeta'/zeta(1-s) + 2 log pi
                   - psi(s/2) - psi((1-s)/2), the coefficients as printed.
    """

    residual: float
    printed: float


ZERO_GUARD = 1e-10


def _guard(value: complex, where: complex) -> None:
    if abs(value) < ZERO_GUARD:
        raise TooCloseToZeroError(f"|zeta| = {abs(value):.3g} < {ZERO_GUARD:g} at {where}")


def lemma3_report(s: complex, method: str = "analytic") -> IdentityResidual:
    """Both residuals, each the max over s and conj(s)."""
    s = complex(s)
    if abs(s) < 1e-12 or abs(s - 1) < 1e-12:
        raise PoleError("identity undefined at s = 0, 1")
    derived, printed = [], []
    for point in (s, s.conjugate()):
        z, z1 = zeta_eval(np.array([point, 1 - point]))
        _guard(z, point)
        _guard(z1, 1 - point)
        lhs = zeta_log_derivative(point, method) + zeta_log_derivative(1 - point, method)
        psi_sum = complex(np.sum(digamma(np.array([point / 2, (1 - point) / 2]))))
        derived.append(abs(lhs - LOG_PI + 0.5 * psi_sum))
        printed.append(abs(lhs + 2 * LOG_PI - psi_sum))
    return IdentityResidual(max(derived), max(printed))


def lemma3_residual(s: complex, method: str = "analytic") -> float:
    return lemma3_report(s, method).residual


# -- zero tables -------------------------------------------------------------------

ZERO_CSV_FIELDS = ("source", "gamma_height", "residual_abs", "refinement_width")


def write_zero_table(records: Sequence[ZeroRecord], path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ZERO_CSV_FIELDS)
        for r in sorted(records, key=lambda r: r.gamma_height):
            w.writerow([r.source, f"{r.gamma_height:.12g}", f"{r.residual_abs:.12g}", f"{r.refinement_width:.12g}"])


def read_zero_table(path) -> list[ZeroRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != ZERO_CSV_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            ZeroRecord(float(row["gamma_height"]), float(row["residual_abs"]), row["source"],
                       float(row["refinement_width"]))
            for row in reader
        ]
