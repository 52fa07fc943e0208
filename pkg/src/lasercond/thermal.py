"""Dicke multiplet counting and thermal averages for N two-level molecules.

At coupling zero the molecules are an ideal paramagnet: states |r, m> with
energy m (level splitting = 1) and multiplicity P(r) per cooperation
number r.  This module provides P(r) in exact integer arithmetic, the
closed-form thermal moments of m and of r(r+1), and two brute-force
oracles -- one summing over the (r, m) ensemble, one averaging over the
degeneracy at fixed m -- used to pin down which of the closed forms are
exact and which are large-N approximations.

beta = E/kT is dimensionless; ``math.inf`` is accepted as the frozen
(zero-temperature) limit and handled symbolically, never through exp().
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "EnsembleParams",
    "ThermalMoments",
    "ThermalEnumeration",
    "degeneracy",
    "log_degeneracy",
    "thermal_m_mean",
    "small_beta_m_mean",
    "thermal_m_variance",
    "r2_mean_given_m",
    "r2_spread_given_m",
    "fixed_m_enumeration",
    "thermal_r2_mean",
    "thermal_r2_variance",
    "thermal_sigma_r2",
    "thermal_moments",
    "enumeration_moments",
]

ENUMERATION_LIMIT = 14
EXACT_INTEGER_LIMIT = 30  # factorial formula stays exact far beyond; kept as the documented switch point


@dataclass(frozen=True)
class EnsembleParams:
    """N molecules at inverse temperature beta = E/kT (beta=inf allowed)."""

    n_molecules: int
    beta: float

    def __post_init__(self):
        if self.n_molecules < 1:
            raise ValueError(f"need at least one molecule, got {self.n_molecules}")
        if math.isnan(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")

    @property
    def frozen(self) -> bool:
        return math.isinf(self.beta)


@dataclass(frozen=True)
class ThermalMoments:
    """Closed-form thermal averages (the spread/variance of r(r+1) are
    the printed large-N forms, not exact -- compare enumeration_moments)."""

    m_mean: float
    m_variance: float
    r2_mean: float
    r2_variance: float
    sigma_r2_mean: float


@dataclass(frozen=True)
class ThermalEnumeration:
    """Exact (r, m)-ensemble sums for small N.

    m_moments[k] = <m^k>, r2_moments[k] = <[r(r+1)]^k> for k = 0..4;
    sigma_r2_mean is the thermal average of the fixed-m spread N^2/4 - m^2.
    """

    n_molecules: int
    beta: float
    z: float
    m_moments: np.ndarray
    r2_moments: np.ndarray

    @property
    def m_mean(self) -> float:
        return self.m_moments[1]

    @property
    def m_variance(self) -> float:
        return self.m_moments[2] - self.m_moments[1] ** 2

    @property
    def r2_mean(self) -> float:
        return self.r2_moments[1]

    @property
    def r2_variance(self) -> float:
        return self.r2_moments[2] - self.r2_moments[1] ** 2

    @property
    def sigma_r2_mean(self) -> float:
        return self.n_molecules**2 / 4.0 - self.m_moments[2]


def _check_two_r(n_molecules: int, two_r: int) -> None:
    if two_r < 0 or two_r > n_molecules:
        raise ValueError(f"2r={two_r} outside 0..N={n_molecules}")
    if (n_molecules - two_r) % 2 != 0:
        raise ValueError(f"2r={two_r} must have the parity of N={n_molecules}")


def degeneracy(n_molecules: int, two_r: int) -> int:
    """Multiplicity P(r) = N!(2r+1) / ((N/2+r+1)!(N/2-r)!), exactly.

    Python integers keep this exact for any N; the documented guarantee
    is N <= EXACT_INTEGER_LIMIT, use log_degeneracy for asymptotics.
    """
    _check_two_r(n_molecules, two_r)
    upper = (n_molecules + two_r) // 2 + 1
    lower = (n_molecules - two_r) // 2
    numerator = math.factorial(n_molecules) * (two_r + 1)
    denominator = math.factorial(upper) * math.factorial(lower)
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise RuntimeError("multiplicity formula produced a non-integer")
    return quotient


def log_degeneracy(n_molecules: int, two_r: int) -> float:
    """log P(r) via lgamma, for N beyond exact-integer practicality."""
    _check_two_r(n_molecules, two_r)
    upper = (n_molecules + two_r) // 2 + 1
    lower = (n_molecules - two_r) // 2
    return (
        math.lgamma(n_molecules + 1)
        + math.log(two_r + 1)
        - math.lgamma(upper + 1)
        - math.lgamma(lower + 1)
    )


def thermal_m_mean(params: EnsembleParams) -> float:
    """<m> = -(N/2) tanh(beta/2); exact for independent molecules."""
    if params.frozen:
        return -params.n_molecules / 2.0
    # + 0.0 keeps beta = 0 from returning a negative zero
    return -(params.n_molecules / 2.0) * math.tanh(params.beta / 2.0) + 0.0


def small_beta_m_mean(params: EnsembleParams) -> tuple[float, bool]:
    """High-temperature linearization -N beta / 4 and its beta < 1 validity."""
    if params.frozen:
        return -math.inf, False
    return -params.n_molecules * params.beta / 4.0, params.beta < 1.0


def thermal_m_variance(params: EnsembleParams) -> float:
    """Var(m) = N/4 - <m>^2/N  (= (N/4) sech^2(beta/2); exact)."""
    if params.frozen:
        return 0.0
    m = thermal_m_mean(params)
    return params.n_molecules / 4.0 - m * m / params.n_molecules


def r2_mean_given_m(n_molecules: int, two_m: int) -> float:
    """Degeneracy average of r(r+1) at fixed m: N/2 + m^2 (exact identity)."""
    _check_two_m(n_molecules, two_m)
    return n_molecules / 2.0 + (two_m / 2.0) ** 2


def r2_spread_given_m(n_molecules: int, two_m: int) -> float:
    """Degeneracy variance of r(r+1) at fixed m, as printed: N^2/4 - m^2."""
    _check_two_m(n_molecules, two_m)
    return n_molecules**2 / 4.0 - (two_m / 2.0) ** 2


def _check_two_m(n_molecules: int, two_m: int) -> None:
    if abs(two_m) > n_molecules:
        raise ValueError(f"|2m|={abs(two_m)} exceeds N={n_molecules}")
    if (n_molecules - two_m) % 2 != 0:
        raise ValueError(f"2m={two_m} must have the parity of N={n_molecules}")


def fixed_m_enumeration(n_molecules: int, two_m: int) -> tuple[Fraction, Fraction]:
    """Exact degeneracy-weighted mean and variance of r(r+1) at fixed m.

    Sums P(r) over r >= |m| with Fraction arithmetic, so comparisons with
    the closed forms are integer identities, not float checks.
    """
    _check_two_m(n_molecules, two_m)
    total = 0
    first = Fraction(0)
    second = Fraction(0)
    for two_r in range(abs(two_m), n_molecules + 1, 2):
        weight = degeneracy(n_molecules, two_r)
        x = Fraction(two_r * (two_r + 2), 4)
        total += weight
        first += weight * x
        second += weight * x * x
    mean = first / total
    return mean, second / total - mean * mean


def thermal_r2_mean(params: EnsembleParams) -> float:
    """Thermal mean of r(r+1): 3N/4 + <m>^2 (1 - 1/N); exact."""
    n = params.n_molecules
    m = thermal_m_mean(params)
    return 0.75 * n + m * m * (1.0 - 1.0 / n)


def thermal_r2_variance(params: EnsembleParams) -> float:
    """Printed large-N form of the thermal variance of r(r+1).

    N(N-1)/8 + ((N-1)(N-2)/N) <m>^2 - (2(2N-3)(N-1)/N^3) <m>^4.
    This tracks the variance of the conditional mean m^2 + N/2 only; the
    fixed-m spread it omits is O(N^2), so trust it when <m>^2 >> N.
    """
    n = params.n_molecules
    m = thermal_m_mean(params)
    return (
        n * (n - 1) / 8.0
        + ((n - 1) * (n - 2) / n) * m * m
        - (2.0 * (2 * n - 3) * (n - 1) / n**3) * m**4
    )


def thermal_sigma_r2(params: EnsembleParams) -> float:
    """Thermal average of the fixed-m spread: (N(N-1)/4)(1 - 4<m>^2/N^2)."""
    n = params.n_molecules
    m = thermal_m_mean(params)
    return (n * (n - 1) / 4.0) * (1.0 - 4.0 * m * m / n**2)


def thermal_moments(params: EnsembleParams) -> ThermalMoments:
    """Bundle of all closed-form thermal averages."""
    return ThermalMoments(
        m_mean=thermal_m_mean(params),
        m_variance=thermal_m_variance(params),
        r2_mean=thermal_r2_mean(params),
        r2_variance=thermal_r2_variance(params),
        sigma_r2_mean=thermal_sigma_r2(params),
    )


def enumeration_moments(params: EnsembleParams) -> ThermalEnumeration:
    """Direct partition sum Z = sum_r P(r) sum_m e^(-beta m), N <= 14.

    Returns <m^k> and <[r(r+1)]^k> for k <= 4.  The frozen beta=inf limit
    is evaluated symbolically: only the unique maximal multiplet reaches
    m = -N/2.
    """
    n = params.n_molecules
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration oracle limited to N <= {ENUMERATION_LIMIT}")
    powers = np.arange(5)
    if params.frozen:
        m_floor = -n / 2.0
        x_top = (n / 2.0) * (n / 2.0 + 1.0)
        return ThermalEnumeration(
            n_molecules=n,
            beta=params.beta,
            z=math.inf,
            m_moments=m_floor**powers,
            r2_moments=x_top**powers,
        )
    z = 0.0
    m_sums = np.zeros(5)
    x_sums = np.zeros(5)
    for two_r in range(n % 2, n + 1, 2):
        weight = float(degeneracy(n, two_r))
        x = two_r * (two_r + 2) / 4.0
        for two_m in range(-two_r, two_r + 1, 2):
            m = two_m / 2.0
            boltzmann = weight * math.exp(-params.beta * m)
            z += boltzmann
            m_sums += boltzmann * m**powers
            x_sums += boltzmann * x**powers
    return ThermalEnumeration(
        n_molecules=n,
        beta=params.beta,
        z=z,
        m_moments=m_sums / z,
        r2_moments=x_sums / z,
    )
