"""Dirichlet characters, Gauss sums, L(s, chi) and xi(s, chi), the
logarithmic-derivative identity, L-zeros for real characters, and the
truncated explicit formula for psi(x, chi).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import cache as _cache
from ._euler_maclaurin import hurwitz_sum
from .errors import (
    MissingZeroTableError,
    ModulusTooLargeError,
    NonPrimitiveCharacterError,
    PoleError,
    TooCloseToZeroError,
    UnsupportedCharacterError,
    UnsupportedRegionError,
)
from .prime_tables import psi_chi
from .special_functions import digamma, loggamma
from .zeta_engine import (
    MAX_REFINEMENT_WIDTH,
    SCAN_STEP,
    DEFAULT_ZERO_TOL,
    ZeroRecord,
    central_log_derivative,
    scan_sign_changes,
)

MAX_MODULUS = 10**4
LOG_PI = math.log(math.pi)


# -- group structure -----------------------------------------------------------

def factorize(n: int) -> list[tuple[int, int]]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int) -> int:
    order = p - 1
    factors = [f for f, _ in factorize(order)]
    for g in range(2, p):
        if all(pow(g, order // f, p) != 1 for f in factors):
            return g
    return 1


@dataclass(frozen=True)
class _Component:
    """One prime-power factor p^e of q with its cyclic generators."""

    p: int
    e: int
    generators: tuple[int, ...]   # residues mod p^e
    orders: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p ** self.e


def _components(q: int) -> list[_Component]:
    comps = []
    for p, e in factorize(q):
        pe = p ** e
        if p == 2:
            if e == 1:
                comps.append(_Component(2, 1, (), ()))
            elif e == 2:
                comps.append(_Component(2, 2, (pe - 1,), (2,)))
            else:
                comps.append(_Component(2, e, (pe - 1, 5), (2, 2 ** (e - 2))))
        else:
            g = _primitive_root(p)
            # a primitive root mod p lifts to p^e unless g^{p-1} = 1 mod p^2
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            comps.append(_Component(p, e, (g,), ((p - 1) * p ** (e - 1),)))
    return comps


class CharacterGroup:
    """Discrete-log tables for (Z/qZ)^*: ``logs[n]`` is the exponent vector of
    n over the generators (in CRT order), -1 rows for non-units."""

    def __init__(self, q: int):
        self.q = q
        self.components = _components(q)
        self.orders = tuple(o for c in self.components for o in c.orders)
        self.exponent = math.lcm(*self.orders) if self.orders else 1
        n = np.arange(q)
        cols = []
        unit = np.gcd(n, q) == 1
        for comp in self.components:
            m = comp.modulus
            if not comp.generators:
                continue
            table = np.full((m, len(comp.generators)), -1, dtype=np.int64)
            if len(comp.generators) == 1:
                (g,), (o,) = comp.generators, comp.orders
                v = 1
                for k in range(o):
                    table[v, 0] = k
                    v = v * g % m
            else:
                (g1, g2), (o1, o2) = comp.generators, comp.orders
                for a in range(o1):
                    va = pow(g1, a, m)
                    v = va
                    for b in range(o2):
                        table[v] = (a, b)
                        v = v * g2 % m
            cols.append(table[n % m])
        self.unit = unit
        self.logs = np.concatenate(cols, axis=1) if cols else np.zeros((q, 0), dtype=np.int64)
        self.logs[~unit] = -1

    def phase_index(self, label: tuple[int, ...]) -> np.ndarray:
        """chi(n) = exp(2 pi i idx[n] / exponent); idx = -1 where chi(n) = 0."""
        weights = np.array([k * (self.exponent // o) for k, o in zip(label, self.orders)], dtype=np.int64)
        idx = (self.logs @ weights) % self.exponent if len(weights) else np.zeros(self.q, dtype=np.int64)
        return np.where(self.unit, idx, -1)


@lru_cache(maxsize=64)
def character_group(q: int) -> CharacterGroup:
    return CharacterGroup(q)


def _local_conductor(comp: _Component, ks: Sequence[int]) -> int:
    if comp.p != 2:
        (k,) = ks
        if k == 0:
            return 1
        f = 1
        while k % comp.p ** (comp.e - f) != 0:
            f += 1
        return comp.p ** f
    if comp.e == 1:
        return 1
    if comp.e == 2:
        return 1 if ks[0] == 0 else 4
    a, b = ks
    if b == 0:
        return 1 if a == 0 else 4
    f = 3
    while b % 2 ** (comp.e - f) != 0:
        f += 1
    return 2 ** f


def _snap(z: np.ndarray) -> np.ndarray:
    """Exact 0, +-1, +-i where rounding noise would otherwise remain."""
    re = np.where(np.abs(z.real) < 1e-15, 0.0, z.real)
    im = np.where(np.abs(z.imag) < 1e-15, 0.0, z.imag)
    return re + 1j * im


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    label: tuple[int, ...]
    conductor: int = field(compare=False)

    @property
    def group(self) -> CharacterGroup:
        return character_group(self.modulus)

    @cached_property
    def phase(self) -> np.ndarray:
        return self.group.phase_index(self.label)

    @cached_property
    def values(self) -> np.ndarray:
        idx = self.phase
        m = self.group.exponent
        v = np.exp(2j * np.pi * np.where(idx >= 0, idx, 0) / m)
        return _snap(np.where(idx >= 0, v, 0.0))

    @property
    def order(self) -> int:
        orders = [o // math.gcd(k, o) for k, o in zip(self.label, self.group.orders)]
        return math.lcm(*orders) if orders else 1

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.label)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @property
    def parity_delta(self) -> int:
        return 0 if self.values[self.modulus - 1].real > 0 else 1

    @property
    def label_str(self) -> str:
        return ".".join(str(k) for k in self.label) if self.label else "0"

    @property
    def source(self) -> str:
        return f"L:{self.modulus}:{self.label_str}"

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def conjugate(self) -> "DirichletCharacter":
        label = tuple((-k) % o for k, o in zip(self.label, self.group.orders))
        return DirichletCharacter(self.modulus, label, self.conductor)


def _conductor(q: int, label: tuple[int, ...]) -> int:
    f, pos = 1, 0
    for comp in character_group(q).components:
        r = len(comp.generators)
        f *= _local_conductor(comp, label[pos:pos + r])
        pos += r
    return f


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, lexicographic in the generator exponents."""
    if q > MAX_MODULUS:
        raise ModulusTooLargeError(f"modulus must be <= {MAX_MODULUS}")
    if q < 1:
        raise ValueError("modulus must be positive")
    orders = character_group(q).orders
    labels = [()]
    for o in orders:
        labels = [lab + (k,) for lab in labels for k in range(o)]
    return [DirichletCharacter(q, lab, _conductor(q, lab)) for lab in labels]


def character_from_label(q: int, label: str) -> DirichletCharacter:
    orders = character_group(q).orders
    parts = () if label in ("", "0") and not orders else tuple(int(k) for k in label.split("."))
    if len(parts) != len(orders) or any(not 0 <= k < o for k, o in zip(parts, orders)):
        raise ValueError(f"label {label!r} invalid for modulus {q}")
    return DirichletCharacter(q, parts, _conductor(q, parts))


def parse_source(source: str) -> DirichletCharacter:
    """``L:q:label`` -> character."""
    tag, q, label = source.split(":")
    if tag != "L":
        raise ValueError(f"not an L source: {source!r}")
    return character_from_label(int(q), label)


def principal_character(q: int) -> DirichletCharacter:
    return character_from_label(q, ".".join("0" for _ in character_group(q).orders) or "0")


def quadratic_primitive_characters(q: int) -> list[DirichletCharacter]:
    return [c for c in enumerate_characters(q) if c.is_primitive and c.is_real and not c.is_principal]


def export_character_table(chars: Sequence[DirichletCharacter], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "label", "n", "re", "im"])
        for c in chars:
            for n, v in enumerate(c.values):
                w.writerow([c.modulus, c.label_str, n, f"{v.real:.12g}", f"{v.imag:.12g}"])


# -- Gauss sums and L-values ----------------------------------------------------------

def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{n=1..q} chi(n) e(n/q)."""
    q = chi.modulus
    n = np.arange(q)
    return complex(np.sum(chi.values * np.exp(2j * np.pi * n / q)))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^delta sqrt(q)), of modulus 1 for primitive chi."""
    return gauss_sum(chi) / (1j ** chi.parity_delta * math.sqrt(chi.modulus))


def _l_parts(s: np.ndarray, chi: DirichletCharacter, derivative: bool):
    q = chi.modulus
    a = np.arange(1, q + 1)
    w = chi.values[a % q]
    keep = w != 0
    return hurwitz_sum(s, a[keep] / q, w[keep], derivative=derivative)


def _check_l_region(s: np.ndarray, chi: DirichletCharacter) -> None:
    if np.any(s.real <= -2.0):
        raise UnsupportedRegionError("continuation supported for Re(s) > -2 only")
    if np.any(np.abs(s.imag) > 1e3):
        raise UnsupportedRegionError("|Im s| must be <= 1e3")
    if chi.is_principal and np.any(np.abs(s - 1.0) <= 1e-12):
        raise PoleError("L(s, principal) has a pole at s = 1")


def l_eval(s, chi: DirichletCharacter):
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""
    arr = np.asarray(s, dtype=complex)
    _check_l_region(arr, chi)
    h, _ = _l_parts(arr, chi, False)
    out = np.exp(-arr * math.log(chi.modulus)) * h
    return complex(out) if arr.ndim == 0 else out


def l_log_derivative(s: complex, chi: DirichletCharacter, method: str = "analytic") -> complex:
    s = complex(s)
    if method == "difference":
        return central_log_derivative(lambda z: l_eval(z, chi), s)
    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    arr = np.asarray(s, dtype=complex)
    _check_l_region(arr, chi)
    h, dh = _l_parts(arr, chi, True)
    return complex(dh / h) - math.log(chi.modulus)


def _xi_l_log_factor(s: np.ndarray, chi: DirichletCharacter) -> np.ndarray:
    half = 0.5 * (s + chi.parity_delta)
    return half * math.log(chi.modulus / math.pi) + loggamma(half)


def xi_l(s, chi: DirichletCharacter):
    """xi(s, chi) = (q/pi)^{(s+delta)/2} Gamma((s+delta)/2) L(s, chi)."""
    arr = np.asarray(s, dtype=complex)
    out = np.exp(_xi_l_log_factor(arr, chi)) * l_eval(arr, chi)
    return complex(out) if arr.ndim == 0 else out


def _require_primitive(chi: DirichletCharacter) -> None:
    if not chi.is_primitive:
        raise NonPrimitiveCharacterError(f"{chi.source} has conductor {chi.conductor}")


def functional_eq_residual_l(s, chi: DirichletCharacter):
    """|xi(s,chi) - (i^delta sqrt q / tau(conj chi)) xi(1-s, conj chi)| / (1 + |xi(s,chi)|).

    Also checks the same relation divided through by the Gamma factor
    (an L-level residual, which stays O(1) at large heights) and returns
    the larger of the two.
    """
    _require_primitive(chi)
    arr = np.asarray(s, dtype=complex)
    bar = chi.conjugate()
    factor = 1j ** chi.parity_delta * math.sqrt(chi.modulus) / gauss_sum(bar)
    lf_s = _xi_l_log_factor(arr, chi)
    lf_r = _xi_l_log_factor(1.0 - arr, bar)
    l_s = l_eval(arr, chi)
    l_r = l_eval(1.0 - arr, bar)
    xi_s = np.exp(lf_s) * l_s
    r_xi = np.abs(xi_s - factor * np.exp(lf_r) * l_r) / (1.0 + np.abs(xi_s))
    r_l = np.abs(l_s - factor * np.exp(lf_r - lf_s) * l_r) / (1.0 + np.abs(l_s))
    out = np.maximum(r_xi, r_l)
    return float(out) if arr.ndim == 0 else out


# -- logarithmic-derivative identity ---------------------------------------------------------

ZERO_GUARD = 1e-10


@dataclass(frozen=True)
class LIdentityResidual:
    """``residual``: L'/L(s,chi) + L'/L(1-s,conj chi) + log(q/pi)
    + (psi((s+d)/2) + psi((1-s+d)/2))/2, which the functional equation forces to 0.
    ``same_character``: the same with chi in place of conj chi at 1-s.
    ``printed``: L'/L(s,chi) + L'/L(1-s,chi) + 2 log pi - psi((s+d)/2) - psi((1-s+d)/2).
    """

    residual: float
    same_character: float
    printed: float


def lemma4_report(s: complex, chi: DirichletCharacter, method: str = "analytic") -> LIdentityResidual:
    _require_primitive(chi)
    s = complex(s)
    bar = chi.conjugate()
    for z, c in ((s, chi), (1 - s, bar), (1 - s, chi)):
        v = l_eval(z, c)
        if abs(v) < ZERO_GUARD:
            raise TooCloseToZeroError(f"|L| = {abs(v):.3g} < {ZERO_GUARD:g} at {z}")
    d = chi.parity_delta
    psi_sum = complex(np.sum(digamma(np.array([(s + d) / 2, (1 - s + d) / 2]))))
    ld_s = l_log_derivative(s, chi, method)
    ld_bar = l_log_derivative(1 - s, bar, method)
    ld_same = l_log_derivative(1 - s, chi, method) if not chi.is_real else ld_bar
    log_q_pi = math.log(chi.modulus / math.pi)
    return LIdentityResidual(
        residual=abs(ld_s + ld_bar + log_q_pi + 0.5 * psi_sum),
        same_character=abs(ld_s + ld_same + log_q_pi + 0.5 * psi_sum),
        printed=abs(ld_s + ld_same + 2 * LOG_PI - psi_sum),
    )


def lemma4_residual(s: complex, chi: DirichletCharacter, method: str = "analytic") -> float:
    return lemma4_report(s, chi, method).residual


# -- zeros of real characters --------------------------------------------------------------

def l_on_line_signed(t, chi: DirichletCharacter) -> np.ndarray:
    """Positive multiple of the real function xi(1/2+it, chi) for real primitive chi."""
    t = np.asarray(t, dtype=float)
    s = 0.5 + 1j * t
    lf = _xi_l_log_factor(s, chi)
    return np.real(np.exp(1j * lf.imag) * l_eval(s, chi))


def line_function(chi: DirichletCharacter):
    """t -> epsilon^{-1/2} xi(1/2+it, chi) up to a positive factor; real for
    every primitive chi since xi(1/2+it, chi) = epsilon * conj(xi(1/2+it, chi))."""
    _require_primitive(chi)
    rot = 1.0 if chi.is_real else root_number(chi) ** -0.5

    def z(t):
        t = np.asarray(t, dtype=float)
        s = 0.5 + 1j * t
        lf = _xi_l_log_factor(s, chi)
        return np.real(rot * np.exp(1j * lf.imag) * l_eval(s, chi))

    return z


def line_zero_heights(chi: DirichletCharacter, t_min: float, t_max: float,
                      step: float = SCAN_STEP) -> list[float]:
    """Sign changes of the rotated line function for any primitive chi (t may be
    negative; complex characters have no t -> -t symmetry).  Used to place
    exclusion disks; find_l_zeros is the checked interface for real chi."""
    brackets = scan_sign_changes(line_function(chi), t_min, t_max, step, MAX_REFINEMENT_WIDTH)
    return [0.5 * (lo + hi) for lo, hi in brackets]


def _check_zero_scan(chi: DirichletCharacter, t_min: float, t_max: float) -> None:
    if not chi.is_real or chi.is_principal:
        raise UnsupportedCharacterError("zero finding supports real non-principal characters only")
    _require_primitive(chi)
    if chi.modulus > 20:
        raise ModulusTooLargeError("zero finding supports q <= 20")
    if t_min < 0 or t_max > 200:
        raise UnsupportedRegionError("zero finding supports 0 <= t <= 200")


def find_l_zeros(chi: DirichletCharacter, t_min: float, t_max: float, tol: float = MAX_REFINEMENT_WIDTH,
                 step: float = SCAN_STEP, zero_tol: float = DEFAULT_ZERO_TOL, workers: int = 1) -> list[ZeroRecord]:
    """Sign changes of xi(1/2+it, chi) (real because epsilon(chi) = 1 for real
    primitive chi), bisected to width <= min(tol, 1e-9)."""
    _check_zero_scan(chi, t_min, t_max)
    if t_max <= t_min:
        return []
    width = min(tol, MAX_REFINEMENT_WIDTH)
    brackets = scan_sign_changes(lambda t: l_on_line_signed(t, chi), t_min, t_max, step, width, workers)
    records = []
    for lo, hi in brackets:
        if lo <= 0.0 <= hi:
            continue        # Z(0) = 0 would signal a real zero at s = 1/2, not a height
        g = 0.5 * (lo + hi)
        resid = abs(l_eval(0.5 + 1j * g, chi))
        records.append(ZeroRecord(g, resid, chi.source, hi - lo))
    return records


def cached_l_zeros(chi: DirichletCharacter, height: float, root=None, allow_compute: bool = True) -> list[ZeroRecord]:
    return _cache.cached_zeros(chi.source, height, lambda h: find_l_zeros(chi, 0.0, h), root, allow_compute)


# -- explicit formula --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitFormulaResult:
    bound_form: float
    truncation_residual: float
    psi_value: complex
    zero_sum: complex
    n_zeros: int


def explicit_formula_residual(x: float, chi: DirichletCharacter, T: float,
                              zeros: Sequence[ZeroRecord] | None = None,
                              zeros_height: float | None = None) -> ExplicitFormulaResult:
    """psi(x, chi) against the zeros with |gamma| <= T (beta = 1/2).

    bound_form          sum x^{1/2} / (1 + |gamma|)
    truncation_residual |psi(x, chi) + sum x^rho / rho|

    Zeros come from ``zeros`` (valid up to ``zeros_height``, default T) or
    from the on-disk cache; a MissingZeroTableError is raised if neither
    covers T.  For real chi the zeros come in conjugate pairs.
    """
    if chi.is_principal:
        raise ValueError("explicit formula needs a non-principal character")
    _require_primitive(chi)
    if not 1e2 <= x <= 1e6:
        raise UnsupportedRegionError("x must lie in [1e2, 1e6]")
    if zeros is None:
        zeros = cached_l_zeros(chi, T, allow_compute=False)
    elif (zeros_height if zeros_height is not None else T) < T:
        raise MissingZeroTableError(f"zeros supplied only up to {zeros_height:g} < T = {T:g}")
    if not chi.is_real:
        raise UnsupportedCharacterError("explicit formula check needs the real-character zero tables")
    g = np.array([z.gamma_height for z in zeros if z.gamma_height <= T], dtype=float)
    rho = 0.5 + 1j * g
    sx = math.sqrt(x)
    terms = np.exp(rho * math.log(x)) / rho
    zero_sum = complex(2.0 * np.sum(terms.real))    # rho and conj(rho) together
    bound = float(2.0 * np.sum(sx / (1.0 + g)))
    psi_value = psi_chi(x, chi)
    return ExplicitFormulaResult(bound, abs(psi_value + zero_sum), psi_value, zero_sum, 2 * len(g))


def explicit_formula_scale(x: float, q: int, T: float) -> float:
    """x log^2(x q T) / T, the shape of the truncation error."""
    return x * math.log(x * q * T) ** 2 / T
