"""Optimal cloning and state-estimation fidelities for mixed qubits.

The N -> M cloning fidelity of a mixed input decomposes over the spin
blocks: each block clones like 2j pure copies, degraded by the block
fidelity.  The M -> infinity limit doubles as the best achievable
state-estimation fidelity, conveniently expressed as a Bloch length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import analytics
from .core import MixedQubit, dense_cap, state_fidelity
from .oracle import pure_component_moments

INFINITE_CLONES = math.inf


@dataclass(frozen=True)
class CloneSettings:
    """Cloning task: n_in identical copies in, m_out clones out."""

    n_in: int
    m_out: float  # integer count, or math.inf for the estimation limit
    lam: float

    def __post_init__(self) -> None:
        if self.n_in < 2 or self.n_in % 2:
            raise ValueError(f"n_in must be a positive even integer, got {self.n_in}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"Bloch length must lie in [0, 1], got {self.lam}")
        if math.isinf(self.m_out):
            return
        if self.m_out != int(self.m_out) or self.m_out < self.n_in:
            raise ValueError(f"m_out must be an integer >= n_in or infinity, got {self.m_out}")


@dataclass(frozen=True)
class CovariantMapParams:
    """Weights (x, y) of a rotation-covariant single-output map."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if self.x < 0.0 or self.y < 0.0 or self.x + self.y > 1.0 + 1e-12:
            raise ValueError(f"need x, y >= 0 with x + y <= 1, got ({self.x}, {self.y})")


def pure_cloning_fidelity(j: int, m_out: float) -> float:
    """Best per-clone fidelity for 2j pure copies cloned to m_out outputs.

    m_out = math.inf gives the estimation limit (2j+1)/(2j+2); j = 0 is
    the no-information boundary value 1/2.
    """
    if j < 0:
        raise ValueError("total spin j must be nonnegative")
    if math.isinf(m_out):
        return (2 * j + 1) / (2 * j + 2)
    m = int(m_out)
    if m != m_out or m < 2 * j:
        raise ValueError(f"m_out must be an integer >= 2j = {2 * j} or infinity, got {m_out}")
    return (m * (2 * j + 1) + 2 * j) / (m * (2 * j + 2))


def mixed_cloning_fidelity(settings: CloneSettings) -> float:
    """Optimal per-clone fidelity for n_in mixed copies cloned to m_out.

    Block-probability average of the pure bound applied to each block,
    with the complementary weight landing on the orthogonal state.
    """
    spect = analytics.block_spectrum(settings.n_in, settings.lam)
    terms = []
    for row in spect.rows:
        f_pure = pure_cloning_fidelity(row.j, settings.m_out)
        terms.append(
            row.probability * (f_pure * row.fidelity + (1.0 - f_pure) * (1.0 - row.fidelity))
        )
    return math.fsum(terms)


def estimation_lambda(n: int, lam: float) -> float:
    """Bloch length achievable by estimating the aligned state from n copies.

    Equals 2 F - 1 at m_out = infinity; the spin-0 block carries no
    direction information and contributes nothing.
    """
    spect = analytics.block_spectrum(n, lam)
    return math.fsum(
        row.probability * (2.0 * row.fidelity - 1.0) * row.j / (row.j + 1)
        for row in spect.rows
        if row.j >= 1
    )


def scaling_relation_check(settings: CloneSettings) -> float:
    """Residual of the finite-M identity 2F - 1 = (2F_inf - 1)(M + 2)/M."""
    if math.isinf(settings.m_out):
        raise ValueError("the scaling relation needs a finite m_out")
    lhs = 2.0 * mixed_cloning_fidelity(settings) - 1.0
    rhs = estimation_lambda(settings.n_in, settings.lam) * (settings.m_out + 2.0) / settings.m_out
    return abs(lhs - rhs)


class ScanResult(NamedTuple):
    x: float
    y: float
    fidelity: float


def covariant_output_fidelity(
    q: MixedQubit, j: int, params: CovariantMapParams, nodes: int | None = None
) -> float:
    """Fidelity of a covariant (x, y)-map applied to the spin-j block state.

    Evaluated through the pure-component integral of the block state, not
    through any closed-form shortcut, so it independently tests the block
    fidelity formula.
    """
    if params.x + params.y <= 0.0:
        raise ValueError("need x + y > 0 for a normalizable output")
    moment_kept, moment_flipped = pure_component_moments(q, j, nodes)
    out = params.x * moment_kept + params.y * moment_flipped
    target = np.array([0.0, 1.0], dtype=complex)
    # moments are expressed in the (anti, aligned) eigenbasis
    return state_fidelity(out / np.real(np.trace(out)), target)


def optimality_scan(
    q: MixedQubit, j: int, grid: int = 21, nodes: int | None = None, cap: int | None = None
) -> ScanResult:
    """Maximize the covariant-map fidelity over the triangle x, y >= 0, x+y <= 1.

    Returns the best grid point; the maximum sits on the y = 0 edge where
    the map keeps the component aligned with the input block.
    """
    if j < 1:
        raise ValueError("the scan needs j >= 1")
    if 2 * j > dense_cap(cap):
        raise ValueError(f"2j = {2 * j} exceeds the dense cap")
    if grid < 11:
        raise ValueError("need a grid of at least 11 points per edge")
    moment_kept, moment_flipped = pure_component_moments(q, j, nodes)
    target = np.array([0.0, 1.0], dtype=complex)
    kept_term = state_fidelity(moment_kept, target)
    flipped_term = state_fidelity(moment_flipped, target)
    best = ScanResult(math.nan, math.nan, -math.inf)
    steps = grid - 1
    for ix in range(grid):
        x = ix / steps
        for iy in range(grid - ix):
            y = iy / steps
            if x + y == 0.0:
                continue
            CovariantMapParams(x, y)  # range validation
            fid = (x * kept_term + y * flipped_term) / (x + y)
            if fid > best.fidelity:
                best = ScanResult(x, y, fid)
    return best
