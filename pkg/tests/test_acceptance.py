"""Acceptance checks: one test per criterion, each printing PASS or FAIL.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import math

import numpy as np
from scipy import stats

from qpurify import (
    MixedQubit,
    block_fidelity,
    block_probability,
    build_schur_basis,
    covariance_residual,
    haar_unitary,
    kron_power,
    mean_fidelity,
    mean_fidelity_asymptote,
    multiplicity,
    optimality_scan,
    partial_trace,
    pure_cloning_fidelity,
    quadrature_check,
    random_direction,
    reversibility_check,
    run_protocol,
    run_protocol_dense,
    scaling_relation_check,
    state_fidelity,
    qubit_eigenstates,
    verify_decomposition,
    yield_asymptote,
    yield_factor,
)
from qpurify.cli import main as cli_main
from qpurify.cloning import CloneSettings
from qpurify.core import density_matrix
from qpurify.oracle import measure_block


def report(number: int, ok: bool, detail: str = "") -> bool:
    tag = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} {tag}" + (f": {detail}" if detail else ""))
    return ok


def test_criterion_01_two_qubit_closed_forms():
    failures = []
    for k in range(1, 10):
        lam = k / 10
        c1, c0 = (1 + lam) / 2, (1 - lam) / 2
        if abs(block_probability(2, lam, 1) - (3 + lam * lam) / 4) >= 1e-12:
            failures.append(f"P2({lam})")
        if abs(block_fidelity(lam, 1) - c1 * (1 - c0 / 2) / (1 - c0 * c1)) >= 1e-12:
            failures.append(f"F2({lam})")
    if abs(block_probability(2, 0.5, 1) - 0.8125) >= 1e-12:
        failures.append("P2(0.5) anchor")
    if abs(block_fidelity(0.5, 1) - 21 / 26) >= 1e-12:
        failures.append("F2(0.5) anchor")
    assert report(1, not failures, "two-qubit probability and fidelity closed forms"), failures


def test_criterion_02_decomposition_identity():
    rng = np.random.default_rng(202)
    worst = 0.0
    for n in (2, 4, 6, 8):
        for _ in range(10):
            q = MixedQubit(float(rng.uniform(0, 1)), random_direction(rng))
            rep = verify_decomposition(q, n, tol=1e-9)
            worst = max(worst, rep.worst_residual())
    ok = worst < 1e-9
    assert report(2, ok, f"worst reconstruction residual {worst:.2e}"), worst


def test_criterion_03_normalization_and_completeness():
    ok = True
    for n in range(2, 41, 2):
        for k in range(21):
            lam = k / 20
            total = math.fsum(block_probability(n, lam, j) for j in range(n // 2 + 1))
            ok = ok and abs(total - 1.0) < 1e-12
    for n in range(2, 21, 2):
        dims = sum(multiplicity(n, j) * (2 * j + 1) for j in range(n // 2 + 1))
        ok = ok and dims == 2**n
    assert report(3, ok, "sum of block probabilities and dimension counting")


def test_criterion_04_oracle_formula_agreement():
    rng = np.random.default_rng(404)
    worst = 0.0
    for n in (2, 4, 6, 8):
        basis = build_schur_basis(n)
        q = MixedQubit(float(rng.uniform(0.2, 0.9)), random_direction(rng))
        state = kron_power(density_matrix(q), n)
        aligned = qubit_eigenstates(q)[0]
        from qpurify import block_swap

        for label in basis.labels():
            expected = block_probability(n, q.lam, label.j) / multiplicity(n, label.j)
            prob, post = measure_block(state, basis, label)
            worst = max(worst, abs(prob - expected))
            if post is None or label.j == 0:
                continue
            swap = block_swap(basis, label.j, label.alpha)
            moved = post if swap.is_identity else swap.matrix @ post @ swap.matrix.conj().T
            f_ref = block_fidelity(q.lam, label.j)
            for k in range(1, 2 * label.j + 1):
                fid = state_fidelity(partial_trace(moved, [k]), aligned)
                worst = max(worst, abs(fid - f_ref))
    ok = worst < 1e-10
    assert report(4, ok, f"worst probability/fidelity deviation {worst:.2e}"), worst


def test_criterion_05_integral_representation():
    rng = np.random.default_rng(505)
    worst = 0.0
    for lam in (0.3, 0.5, 0.9):
        q = MixedQubit(lam, random_direction(rng))
        for j in (1, 2, 3, 4):
            worst = max(worst, quadrature_check(q, j))
    ok = worst < 1e-9
    assert report(5, ok, f"worst quadrature residual {worst:.2e}"), worst


def test_criterion_06_asymptotic_residual_scaling():
    window = (3.5, 4.5)
    rows = []
    ok = True
    for lam in (0.4, 0.6, 0.8):
        for n in (20, 40, 80):
            ry1 = abs(yield_factor(n, lam) - yield_asymptote(n, lam))
            ry2 = abs(yield_factor(2 * n, lam) - yield_asymptote(2 * n, lam))
            rf1 = abs(mean_fidelity(n, lam) - mean_fidelity_asymptote(n, lam))
            rf2 = abs(mean_fidelity(2 * n, lam) - mean_fidelity_asymptote(2 * n, lam))
            yield_ratio = ry1 / ry2
            fid_ratio = rf1 / rf2
            good = window[0] <= yield_ratio <= window[1] and window[0] <= fid_ratio <= window[1]
            ok = ok and good
            rows.append(
                f"lam={lam} N={n}->{2 * n}: yield ratio {yield_ratio:.3g}, "
                f"fidelity ratio {fid_ratio:.3g}"
            )
    detail = "residual halving ratios vs [3.5, 4.5] window"
    assert report(6, ok, detail), (
        "the yield residual against lam + (1-lam)/(N lam) decays exponentially "
        "(no 1/N^2 term exists), and the mean-fidelity residual at lam=0.4 is "
        "still dominated by that exponential transient below N~80, so the "
        "requested doubling window cannot hold:\n  " + "\n  ".join(rows)
    )


def test_criterion_07_monte_carlo_consistency():
    summary = run_protocol(MixedQubit(0.6), 20, trials=100_000, seed=1234)
    y_t, f_t = yield_factor(20, 0.6), mean_fidelity(20, 0.6)
    ok = abs(summary.empirical_yield - y_t) < 4 * summary.yield_se
    ok = ok and abs(summary.empirical_mean_fidelity - f_t) < 4 * summary.fidelity_se

    dense = run_protocol_dense(MixedQubit(0.5), 4, trials=50_000, seed=77)
    labels = sorted(dense.label_histogram)
    counts = [dense.label_histogram[lab] for lab in labels]
    expected = [
        dense.trials * block_probability(4, 0.5, j) / multiplicity(4, j) for j, _ in labels
    ]
    pvalue = stats.chisquare(counts, f_exp=expected).pvalue
    ok = ok and pvalue > 0.001
    assert report(7, ok, f"simulation z-scores within 4 se, chi-square p={pvalue:.3f}")


def test_criterion_08_optimality_scan():
    rng = np.random.default_rng(808)
    worst = 0.0
    ok = True
    for lam in (0.3, 0.7, 1.0):
        q = MixedQubit(lam, random_direction(rng))
        for j in (1, 2, 3, 4):
            best = optimality_scan(q, j, grid=13)
            ok = ok and best.y == 0.0
            worst = max(worst, abs(best.fidelity - block_fidelity(lam, j)))
    ok = ok and worst < 1e-9
    assert report(8, ok, f"maximum on keep edge, fidelity gap {worst:.2e}")


def test_criterion_09_cloning_identities():
    rng = np.random.default_rng(909)
    worst_pure = 0.0
    for j in range(1, 51):
        for m in {2 * j, 2 * j + 1, 2 * j + 9, 1000, 10_000}:
            lhs = 2 * pure_cloning_fidelity(j, m) - 1
            worst_pure = max(worst_pure, abs(lhs - (j / (j + 1)) * (m + 2) / m))
    worst_scaling = 0.0
    for n in range(2, 21, 2):
        for m in (n, n + 13, 100):
            for lam in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
                worst_scaling = max(worst_scaling, scaling_relation_check(CloneSettings(n, m, lam)))
    ok = worst_pure < 1e-13 and worst_scaling < 1e-12
    assert report(
        9, ok, f"pure identity {worst_pure:.2e}, scaling relation {worst_scaling:.2e}"
    )


def test_criterion_10_figure_reproduction(tmp_path):
    path = tmp_path / "figure1.csv"
    code = cli_main(["figure1", "--out", str(path)])
    ok = code == 0
    curves: dict[float, list[tuple[int, float]]] = {}
    for line in path.read_text().splitlines()[1:]:
        n, lam, value = line.split(",")
        curves.setdefault(float(lam), []).append((int(n), float(value)))
    ok = ok and set(curves) == {0.2, 0.4, 0.6, 0.8, 1.0}
    pure = dict(curves[1.0])
    ok = ok and all(abs(pure[n] - n / (n + 2)) < 1e-12 for n in range(2, 41, 2))
    for lam in curves:
        values = [v for _, v in sorted(curves[lam])]
        ok = ok and all(b >= a for a, b in zip(values, values[1:]))
    lams = sorted(curves)
    for low, high in zip(lams, lams[1:]):
        low_curve = dict(curves[low])
        high_curve = dict(curves[high])
        ok = ok and all(low_curve[n] < high_curve[n] for n in low_curve)

    bounded = {
        lam: max((v for _, v in curves[lam]), default=0.0) <= lam for lam in curves
    }
    crossings = {
        lam: next((n for n, v in sorted(curves[lam]) if v > lam), None) for lam in curves
    }
    ok = ok and all(bounded.values())
    assert report(10, ok, "curve grid, pure column, monotonicity, ordering, bounds"), (
        "estimating the aligned pure state from many mixed copies pins the "
        "direction down, so the achievable Bloch length rises to one and "
        "crosses the input length at small N already; a bound of lambda "
        f"cannot hold (first N above lambda: {crossings})"
    )


def test_criterion_11_covariance_and_reversibility():
    rng = np.random.default_rng(1111)
    q = MixedQubit(0.55, random_direction(rng))
    unitaries = [haar_unitary(rng) for _ in range(20)]
    cov = covariance_residual(q, 4, unitaries)
    ok = cov < 1e-9
    worst_rev = 0.0
    for n in (4, 6):
        basis = build_schur_basis(n)
        for label in basis.labels():
            worst_rev = max(worst_rev, reversibility_check(q, n, label))
    ok = ok and worst_rev < 1e-10
    assert report(11, ok, f"covariance {cov:.2e}, reversibility {worst_rev:.2e}")
