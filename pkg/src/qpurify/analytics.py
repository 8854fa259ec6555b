"""Closed-form statistics of the total-spin blocks of N identical qubits.

Everything here is binomial/geometric arithmetic, so it stays cheap for
register sizes in the hundreds where dense 2^N objects are impossible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import MixedQubit, kron_power, outer, qubit_eigenstates

_LOG_SPACE_N = 50  # above this, block_probability evaluates in log space
_SMALL_LAMBDA = 1e-8  # below this, maximally-mixed limit branches kick in
_CONVOLVE_MAX_J = 512  # largest block handled by the exact positive-sum path


def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise ValueError(f"register size must be a positive even integer, got {n}")


def _check_lambda(lam: float) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"Bloch length must lie in [0, 1], got {lam}")


def multiplicity(n: int, j: int) -> int:
    """Number of equivalent spin-j blocks in n qubits (exact integer)."""
    _check_even(n)
    J = n // 2
    if not 0 <= j <= J:
        raise ValueError(f"total spin must lie in 0..{J}, got {j}")
    if j == J:
        return 1
    return math.comb(n, J - j) - math.comb(n, J - j - 1)


def cross_power_sum(c1: float, c0: float, m: int) -> float:
    """sum_{k=0..m} c1^k c0^(m-k), a cancellation-free form of
    (c1^(m+1) - c0^(m+1)) / (c1 - c0)."""
    return math.fsum(c1**k * c0 ** (m - k) for k in range(m + 1))


def block_probability(n: int, lam: float, j: int) -> float:
    """Probability that n copies with Bloch length lam land in total spin j."""
    _check_lambda(lam)
    d = multiplicity(n, j)
    J = n // 2
    if lam < _SMALL_LAMBDA:
        # maximally mixed limit; the big-int division is correctly rounded
        return (d * (2 * j + 1)) / (4**J)
    c1 = (1.0 + lam) / 2.0
    c0 = (1.0 - lam) / 2.0
    if n <= _LOG_SPACE_N:
        return d * (c0 * c1) ** (J - j) * cross_power_sum(c1, c0, 2 * j)
    if c0 == 0.0:
        return 1.0 if j == J else 0.0
    lc1 = math.log(c1)
    lc0 = math.log(c0)
    log_r = lc0 - lc1
    # log of (1 - r^(2j+1)) / (1 - r) with r = c0/c1 < 1
    ratio = math.log(-math.expm1((2 * j + 1) * log_r)) - math.log(-math.expm1(log_r))
    log_p = math.log(d) + (J - j) * (lc0 + lc1) + 2 * j * lc1 + ratio
    return math.exp(log_p)


def _fidelity_limit_j0(lam: float) -> float:
    # Continuous j -> 0 limit of block_fidelity; series for small lam where
    # the closed form cancels catastrophically.
    if lam > 1.0 - 1e-12:
        return 1.0
    if lam < 1e-2:
        l2 = lam * lam
        return 0.5 + lam * (1.0 / 3.0 + l2 * (1.0 / 15.0 + l2 / 35.0))
    c1 = (1.0 + lam) / 2.0
    c0 = (1.0 - lam) / 2.0
    return c1 / lam + c1 * c0 * math.log(c0 / c1) / lam**2


def block_fidelity(lam: float, j: int) -> float:
    """Fidelity of each kept qubit after the spin-j measurement outcome.

    Defined for j >= 1 by the geometric-weight average over the block.
    j = 0 keeps no qubits; the continuous j -> 0 limit is returned so the
    value can still enter averaged figures of merit.
    """
    _check_lambda(lam)
    if j < 0:
        raise ValueError("total spin j must be nonnegative")
    if j == 0:
        return _fidelity_limit_j0(lam)
    if lam < _SMALL_LAMBDA:
        return 0.5
    if lam > 1.0 - 1e-12:
        return 1.0
    c1 = (1.0 + lam) / 2.0
    c0 = (1.0 - lam) / 2.0
    if j <= _CONVOLVE_MAX_J:
        k = np.arange(2 * j + 1, dtype=float)
        c1p = c1**k
        c0p = c0**k
        # s[m] = cross_power_sum(c1, c0, m); entries up to m = 2j are complete
        s = np.convolve(c1p, c0p)
        t = float(np.dot(c1p[: 2 * j], s[2 * j - 1 :: -1][: 2 * j]))
        return c1 * t / (2 * j * float(s[2 * j]))
    log_r = math.log(c0) - math.log(c1)
    big = -math.expm1((2 * j + 1) * log_r)  # 1 - r^(2j+1)
    small = -math.expm1(log_r)  # 1 - r
    return ((2 * j + 1) / big - 1.0 / small) / (2 * j)


class SpectrumRow(NamedTuple):
    j: int
    multiplicity: int
    probability: float
    fidelity: float


@dataclass(frozen=True)
class BlockSpectrum:
    """Per-j table of block multiplicity, probability and kept-qubit fidelity."""

    n: int
    lam: float
    rows: tuple[SpectrumRow, ...]

    @property
    def total_spin_max(self) -> int:
        return self.n // 2

    def probabilities(self) -> np.ndarray:
        return np.array([row.probability for row in self.rows])

    def fidelities(self) -> np.ndarray:
        return np.array([row.fidelity for row in self.rows])

    def multiplicities(self) -> list[int]:
        return [row.multiplicity for row in self.rows]


def block_spectrum(n: int, lam: float) -> BlockSpectrum:
    """All (j, d_j, p_j, f_j) rows for a register of n qubits."""
    _check_even(n)
    _check_lambda(lam)
    rows = tuple(
        SpectrumRow(j, multiplicity(n, j), block_probability(n, lam, j), block_fidelity(lam, j))
        for j in range(n // 2 + 1)
    )
    return BlockSpectrum(n=n, lam=lam, rows=rows)


def yield_factor(n: int, lam: float) -> float:
    """Expected fraction of qubits kept by the block measurement."""
    spect = block_spectrum(n, lam)
    J = n // 2
    return math.fsum(row.probability * row.j / J for row in spect.rows)


def mean_fidelity(n: int, lam: float, include_j0: bool = True) -> float:
    """Probability-weighted kept-qubit fidelity.

    The spin-0 outcome keeps no qubits; by default its weight multiplies
    the continuity value block_fidelity(lam, 0) so the sum runs over every
    j, and ``include_j0=False`` drops that term instead.
    """
    spect = block_spectrum(n, lam)
    terms = [row.probability * row.fidelity for row in spect.rows if row.j >= 1]
    if include_j0:
        terms.append(spect.rows[0].probability * spect.rows[0].fidelity)
    return math.fsum(terms)


def yield_asymptote(n: int, lam: float) -> float:
    """Large-N approximation of yield_factor: lam + (1 - lam)/(n lam)."""
    if lam <= 0.0:
        raise ValueError("asymptote requires lam > 0")
    return lam + (1.0 - lam) / (n * lam)


def mean_fidelity_asymptote(n: int, lam: float) -> float:
    """Large-N approximation of mean_fidelity: 1 - (1 - lam)/(2 n lam^2)."""
    if lam <= 0.0:
        raise ValueError("asymptote requires lam > 0")
    return 1.0 - (1.0 - lam) / (2.0 * n * lam * lam)


def block_state_matrix(q: MixedQubit, j: int, cap: int | None = None) -> np.ndarray:
    """Density operator of the 2j qubits kept after a spin-j outcome.

    Diagonal in the Dicke basis rotated to the qubit's Bloch direction,
    with geometric weights built from the eigenvalues (c1, c0).
    """
    if j < 1:
        raise ValueError("the kept block needs j >= 1")
    from .blocks import dicke_state  # deferred: blocks depends on this module

    aligned, anti = qubit_eigenstates(q)
    rot = np.column_stack([anti, aligned])  # maps |0> -> |0_n>, |1> -> |1_n>
    rot_n = kron_power(rot, 2 * j, cap)
    c1, c0 = q.c1, q.c0
    norm = cross_power_sum(c1, c0, 2 * j)
    dim = 1 << (2 * j)
    rho = np.zeros((dim, dim), dtype=complex)
    for m in range(-j, j + 1):
        weight = c1 ** (j + m) * c0 ** (j - m) / norm
        if weight == 0.0:
            continue
        vec = rot_n @ dicke_state(j, m)
        rho += weight * outer(vec)
    return rho
