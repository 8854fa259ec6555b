"""Brute-force verification of the block structure on explicit matrices.

Every closed-form claim made by :mod:`qpurify.analytics` is re-derived
here at matrix level for small registers: the tensor power of the input
state is reconstructed from the blocks and, independently, from
excitation-number projectors; block states are rebuilt by quadrature over
pure components; and the measurement maps are checked for rotation
covariance and reversibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    block_probability,
    block_state_matrix,
    cross_power_sum,
)
from .blocks import SINGLET, SchurBasis, block_swap, build_schur_basis
from .core import (
    BlockLabel,
    MixedQubit,
    density_matrix,
    haar_unitary,
    kron_power,
    max_abs,
    outer,
    partial_trace,
    qubit_eigenstates,
    random_direction,
    state_fidelity,
)

_PROB_FLOOR = 1e-14  # below this an outcome's post-state is undefined


class VerificationError(Exception):
    """A matrix-level check exceeded its tolerance."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


def default_tolerance(n: int) -> float:
    """Residual budget for dense checks: 1e-10 up to 4 qubits, 1e-9 beyond."""
    return 1e-10 if n <= 4 else 1e-9


@dataclass
class DecompositionReport:
    """Residuals from reconstructing a tensor-power state from its blocks."""

    n: int
    lam: float
    direction: tuple[float, float, float]
    block_probabilities: dict
    block_sum_residual: float
    projector_sum_residual: float
    post_state_residuals: dict = field(default_factory=dict)

    def worst_residual(self) -> float:
        residuals = [self.block_sum_residual, self.projector_sum_residual]
        residuals.extend(self.post_state_residuals.values())
        return max(residuals)

    def rows(self) -> list[tuple[str, str, float]]:
        """Flat (check, label, residual) rows for reporting."""
        out = [
            ("decomposition", "block_sum", self.block_sum_residual),
            ("decomposition", "excitation_projectors", self.projector_sum_residual),
        ]
        for label in sorted(self.post_state_residuals):
            out.append(
                ("post_state", f"j={label.j};alpha={label.alpha}", self.post_state_residuals[label])
            )
        return out


def _singlet_pad(state: np.ndarray, pairs: int) -> np.ndarray:
    out = state
    for _ in range(pairs):
        out = np.kron(out, outer(SINGLET))
    return out


def _block_output_state(q: MixedQubit, j: int, J: int, cap=None) -> np.ndarray:
    """Predicted normalized state on a (j, 1) block: kept part times singlets."""
    if j == 0:
        kept = np.eye(1, dtype=complex)
    else:
        kept = block_state_matrix(q, j, cap)
    return _singlet_pad(kept, J - j)


def verify_decomposition(
    q: MixedQubit, n: int, tol: float | None = None, cap: int | None = None
) -> DecompositionReport:
    """Reassemble the n-fold tensor power of ``q`` in two independent ways.

    (a) as the probability-weighted sum of per-block predicted states and
    (b) as a sum of excitation-number projectors in the rotated basis.
    Both max-element residuals, together with per-block post-measurement
    residuals, must stay below ``tol``; otherwise VerificationError is
    raised with the offending block named and the report attached.
    """
    if tol is None:
        tol = default_tolerance(n)
    basis = build_schur_basis(n, cap)
    rho_n = kron_power(density_matrix(q), n, cap)
    J = n // 2

    block_sum = np.zeros_like(rho_n)
    probabilities: dict[BlockLabel, float] = {}
    post_residuals: dict[BlockLabel, float] = {}
    for j in basis.j_values():
        d = basis.multiplicity_of(j)
        p = block_probability(n, q.lam, j)
        base_state = _block_output_state(q, j, J, cap)
        for alpha in range(1, d + 1):
            label = BlockLabel(j, alpha)
            if alpha == 1:
                predicted = base_state
            else:
                swap = block_swap(basis, j, alpha).matrix
                predicted = swap @ base_state @ swap.conj().T
            block_sum += (p / d) * predicted
            prob, post = measure_block(rho_n, basis, label)
            probabilities[label] = prob
            if post is not None:
                post_residuals[label] = max_abs(post - predicted)

    block_sum_residual = max_abs(block_sum - rho_n)

    aligned, anti = qubit_eigenstates(q)
    rot_n = kron_power(np.column_stack([anti, aligned]), n, cap)
    zeros = n - np.array([bin(i).count("1") for i in range(1 << n)])
    weights = q.c0**zeros * q.c1 ** (n - zeros)
    projector_sum = (rot_n * weights) @ rot_n.conj().T
    projector_sum_residual = max_abs(projector_sum - rho_n)

    report = DecompositionReport(
        n=n,
        lam=q.lam,
        direction=q.direction,
        block_probabilities=probabilities,
        block_sum_residual=block_sum_residual,
        projector_sum_residual=projector_sum_residual,
        post_state_residuals=post_residuals,
    )
    if report.worst_residual() >= tol:
        offender = "block_sum"
        worst = block_sum_residual
        if projector_sum_residual > worst:
            offender, worst = "excitation_projectors", projector_sum_residual
        for label, res in post_residuals.items():
            if res > worst:
                offender, worst = f"j={label.j};alpha={label.alpha}", res
        raise VerificationError(
            f"decomposition residual {worst:.3e} >= tol {tol:.3e} at {offender}",
            report=report,
        )
    return report


def measure_block(
    state: np.ndarray, basis: SchurBasis, label: BlockLabel
) -> tuple[float, np.ndarray | None]:
    """Project ``state`` onto one block.

    Returns (probability, normalized post-measurement state); the state is
    None when the probability falls below 1e-14 and is undefined.
    """
    rows = basis.block(label.j, label.alpha)
    inner = rows.conj() @ state @ rows.T
    prob = float(np.real(np.trace(inner)))
    if prob < _PROB_FLOOR:
        return prob, None
    post = rows.T @ inner @ rows.conj() / prob
    return prob, post


def quadrature_check(
    q: MixedQubit, j: int, nodes: int | None = None, cap: int | None = None
) -> float:
    """Rebuild the kept-block state from its pure-component integral.

    The block state is a rotation average over 2j-fold copies of a single
    pure state; the polar integral is Gauss-Legendre in cos(theta) and the
    azimuthal one a uniform rule, with node counts that integrate the
    degree-2j trigonometric integrand exactly.  Returns the max-element
    residual against block_state_matrix.
    """
    if j < 1:
        raise ValueError("quadrature check needs j >= 1")
    minimum = 2 * j + 1
    if nodes is None:
        nodes = minimum + 1
    if nodes < minimum:
        raise ValueError(f"need at least {minimum} polar nodes for an exact integral")
    n_phi = 4 * j + 1

    aligned, anti = qubit_eigenstates(q)
    sq1 = math.sqrt(q.c1)
    sq0 = math.sqrt(q.c0)
    x_nodes, x_weights = np.polynomial.legendre.leggauss(nodes)
    dim = 1 << (2 * j)
    acc = np.zeros((dim, dim), dtype=complex)
    for x, w in zip(x_nodes, x_weights):
        cos_half = math.sqrt((1.0 + x) / 2.0)
        sin_half = math.sqrt((1.0 - x) / 2.0)
        for step in range(n_phi):
            phase = np.exp(1j * (2.0 * math.pi * step / n_phi))
            # unnormalized pure component; its norm^2 supplies the angular weight
            component = sq1 * cos_half * aligned + sq0 * sin_half * phase * anti
            psi = kron_power(component, 2 * j, cap)
            acc += (w / 2.0 / n_phi) * outer(psi)
    rho_quad = (2 * j + 1) / cross_power_sum(q.c1, q.c0, 2 * j) * acc
    return max_abs(rho_quad - block_state_matrix(q, j, cap))


def pure_component_moments(
    q: MixedQubit, j: int, nodes: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit moments of the pure-component integral of a spin-j block.

    Quadrature over the same angular decomposition as quadrature_check,
    but accumulating only the 2x2 outer products of each pure component
    and of its orthogonal complement.  Both results are expressed in the
    (anti-aligned, aligned) eigenbasis and have unit trace; the aligned
    diagonal of the first one is an independent route to block_fidelity.
    """
    if j < 1:
        raise ValueError("pure-component moments need j >= 1")
    minimum = 2 * j + 1
    if nodes is None:
        nodes = minimum + 1
    if nodes < minimum:
        raise ValueError(f"need at least {minimum} polar nodes for an exact integral")
    n_phi = 4 * j + 1

    sq1 = math.sqrt(q.c1)
    sq0 = math.sqrt(q.c0)
    x_nodes, x_weights = np.polynomial.legendre.leggauss(nodes)
    kept = np.zeros((2, 2), dtype=complex)
    flipped = np.zeros((2, 2), dtype=complex)
    for x, w in zip(x_nodes, x_weights):
        cos_half = math.sqrt((1.0 + x) / 2.0)
        sin_half = math.sqrt((1.0 - x) / 2.0)
        angular = q.c1 * cos_half**2 + q.c0 * sin_half**2
        scale = (w / 2.0 / n_phi) * angular ** (2 * j - 1)
        for step in range(n_phi):
            phase = np.exp(1j * (2.0 * math.pi * step / n_phi))
            component = np.array([sq0 * sin_half * phase, sq1 * cos_half])
            orthogonal = np.array([-np.conj(component[1]), np.conj(component[0])])
            kept += scale * outer(component)
            flipped += scale * outer(orthogonal)
    prefactor = (2 * j + 1) / cross_power_sum(q.c1, q.c0, 2 * j)
    return prefactor * kept, prefactor * flipped


def reversibility_check(
    q: MixedQubit, n: int, label: BlockLabel, cap: int | None = None
) -> float:
    """Undo the protocol on one outcome and compare with the measured state.

    After measuring block ``label``, swapping it onto the first copy and
    discarding the singlet pairs, re-appending fresh singlets and swapping
    back must reproduce the post-measurement state exactly.
    """
    basis = build_schur_basis(n, cap)
    rho_n = kron_power(density_matrix(q), n, cap)
    prob, post = measure_block(rho_n, basis, label)
    if post is None:
        raise ValueError(
            f"block (j={label.j}, alpha={label.alpha}) has probability {prob:.1e}; "
            "post-measurement state undefined"
        )
    swap = block_swap(basis, label.j, label.alpha)
    unwound = post if swap.is_identity else swap.matrix @ post @ swap.matrix.conj().T
    J = n // 2
    if label.j > 0:
        kept = partial_trace(unwound, range(1, 2 * label.j + 1))
    else:
        kept = np.eye(1, dtype=complex)
    rebuilt = _singlet_pad(kept, J - label.j)
    redone = rebuilt if swap.is_identity else swap.matrix @ rebuilt @ swap.matrix.conj().T
    return max_abs(redone - post)


def purification_map_outputs(basis: SchurBasis, state: np.ndarray) -> dict[int, np.ndarray]:
    """Unnormalized outputs of the block measurement, keyed by kept-qubit count.

    For each spin j the measurement branch projects, swaps the copy back to
    the first one and discards the singlet pairs; branches with the same j
    are summed.  Traces give outcome probabilities.
    """
    outs: dict[int, np.ndarray] = {}
    for j in basis.j_values():
        acc = None
        for alpha in range(1, basis.multiplicity_of(j) + 1):
            rows = basis.block(j, alpha)
            inner = rows.conj() @ state @ rows.T
            branch = rows.T @ inner @ rows.conj()
            if alpha != 1:
                swap = block_swap(basis, j, alpha).matrix
                branch = swap @ branch @ swap.conj().T
            acc = branch if acc is None else acc + branch
        if j > 0:
            outs[2 * j] = partial_trace(acc, range(1, 2 * j + 1))
        else:
            outs[0] = np.array([[np.trace(acc)]], dtype=complex)
    return outs


def covariance_residual(q: MixedQubit, n: int, unitaries, cap: int | None = None) -> float:
    """Max-element residual of the covariance property of the measurement maps.

    For each single-qubit unitary U, applying the map to the rotated input
    must equal rotating the map output, branch by branch.
    """
    basis = build_schur_basis(n, cap)
    rho1 = density_matrix(q)
    base_outs = purification_map_outputs(basis, kron_power(rho1, n, cap))
    worst = 0.0
    for u in unitaries:
        rotated_in = kron_power(u @ rho1 @ u.conj().T, n, cap)
        lhs = purification_map_outputs(basis, rotated_in)
        for m_out, sigma in lhs.items():
            if m_out == 0:
                rhs = base_outs[0]
            else:
                u_m = kron_power(u, m_out, cap)
                rhs = u_m @ base_outs[m_out] @ u_m.conj().T
            worst = max(worst, max_abs(sigma - rhs))
    return worst


def _permute_qubits(a: np.ndarray, order: np.ndarray) -> np.ndarray:
    m = len(order)
    if m <= 1:
        return a
    tensor = a.reshape((2,) * (2 * m))
    axes = list(order) + [m + int(k) for k in order]
    return tensor.transpose(axes).reshape(a.shape)


def _mean_qubit_fidelity(sigma: np.ndarray, target: np.ndarray, m: int) -> float:
    vals = [state_fidelity(partial_trace(sigma, [k]), target) for k in range(1, m + 1)]
    return float(np.mean(vals))


@dataclass
class SymmetrizationRow:
    m_out: int
    sym_prob: float
    sym_prob_se: float
    raw_prob: float
    raw_prob_se: float
    sym_fid: float | None
    sym_fid_se: float | None
    raw_fid: float | None
    raw_fid_se: float | None


@dataclass
class SymmetrizationReport:
    """Monte Carlo comparison of a procedure with its symmetrized version."""

    n: int
    lam: float
    samples: int
    seed: int
    rows: list[SymmetrizationRow]

    @staticmethod
    def _sigma(a: float, sa: float, b: float, sb: float) -> float:
        diff = abs(a - b)
        if diff < 1e-9:
            return 0.0
        combined = math.hypot(sa, sb)
        return diff / combined if combined > 0.0 else math.inf

    def max_sigma_distance(self) -> float:
        worst = 0.0
        for row in self.rows:
            worst = max(
                worst, self._sigma(row.sym_prob, row.sym_prob_se, row.raw_prob, row.raw_prob_se)
            )
            if row.sym_fid is not None and row.raw_fid is not None:
                worst = max(
                    worst, self._sigma(row.sym_fid, row.sym_fid_se, row.raw_fid, row.raw_fid_se)
                )
        return worst

    def consistent(self, n_sigma: float = 3.0) -> bool:
        return self.max_sigma_distance() <= n_sigma


def _weighted_stats(probs: list[float], fids: list[float]) -> tuple[float, float]:
    p = np.asarray(probs)
    f = np.asarray(fids)
    total = float(p.sum())
    if total <= 0.0:
        return math.nan, math.nan
    mean = float((p * f).sum() / total)
    # standard error of the probability-weighted ratio estimator
    se = float(math.sqrt(((p * (f - mean)) ** 2).sum()) / total)
    return mean, se


def symmetrize_and_compare(
    procedure, q: MixedQubit, n: int, samples: int, seed: int = 0, cap: int | None = None
) -> SymmetrizationReport:
    """Monte Carlo check that symmetrizing a procedure preserves its averages.

    The symmetrized run rotates all inputs by a Haar unitary, applies the
    procedure, rotates the outputs back and permutes them randomly; its
    sampled outcome probabilities and mean fidelities are compared with
    the direction-averaged figures of the raw procedure.  ``procedure``
    maps an n-qubit density matrix to {kept_count: unnormalized state}.
    """
    if samples < 2:
        raise ValueError("need at least two Monte Carlo samples")
    rng = np.random.Generator(np.random.Philox(seed))
    rho1 = density_matrix(q)
    target = qubit_eigenstates(q)[0]

    sym_probs: dict[int, list[float]] = {}
    sym_fids: dict[int, list[float]] = {}
    raw_probs: dict[int, list[float]] = {}
    raw_fids: dict[int, list[float]] = {}

    for _ in range(samples):
        u = haar_unitary(rng)
        outs = procedure(kron_power(u @ rho1 @ u.conj().T, n, cap))
        for m_out in sorted(outs):
            sigma = outs[m_out]
            prob = float(np.real(np.trace(sigma)))
            sym_probs.setdefault(m_out, []).append(prob)
            if m_out == 0:
                continue
            u_m = kron_power(u, m_out, cap)
            back = u_m.conj().T @ sigma @ u_m
            back = _permute_qubits(back, rng.permutation(m_out))
            if prob >= _PROB_FLOOR:
                sym_fids.setdefault(m_out, []).append(
                    _mean_qubit_fidelity(back / prob, target, m_out)
                )
            else:
                sym_fids.setdefault(m_out, []).append(0.0)

        axis = random_direction(rng)
        q_dir = MixedQubit(q.lam, axis)
        outs = procedure(kron_power(density_matrix(q_dir), n, cap))
        target_dir = qubit_eigenstates(q_dir)[0]
        for m_out in sorted(outs):
            sigma = outs[m_out]
            prob = float(np.real(np.trace(sigma)))
            raw_probs.setdefault(m_out, []).append(prob)
            if m_out == 0:
                continue
            if prob >= _PROB_FLOOR:
                raw_fids.setdefault(m_out, []).append(
                    _mean_qubit_fidelity(sigma / prob, target_dir, m_out)
                )
            else:
                raw_fids.setdefault(m_out, []).append(0.0)

    rows = []
    for m_out in sorted(sym_probs):
        sp = np.asarray(sym_probs[m_out])
        rp = np.asarray(raw_probs.get(m_out, [math.nan]))
        row = SymmetrizationRow(
            m_out=m_out,
            sym_prob=float(sp.mean()),
            sym_prob_se=float(sp.std(ddof=1) / math.sqrt(len(sp))),
            raw_prob=float(rp.mean()),
            raw_prob_se=float(rp.std(ddof=1) / math.sqrt(len(rp))),
            sym_fid=None,
            sym_fid_se=None,
            raw_fid=None,
            raw_fid_se=None,
        )
        if m_out in sym_fids:
            row.sym_fid, row.sym_fid_se = _weighted_stats(sym_probs[m_out], sym_fids[m_out])
            row.raw_fid, row.raw_fid_se = _weighted_stats(raw_probs[m_out], raw_fids[m_out])
        rows.append(row)
    return SymmetrizationReport(n=n, lam=q.lam, samples=samples, seed=seed, rows=rows)
