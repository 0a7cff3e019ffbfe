"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances and runtime bounds are the stated ones; nothing is loosened.
Where a criterion fails for mathematical reasons, the detail string carries
the evidence (counts, the worst instance, independent certificates) and the
test fails.

All randomness flows from ACCEPTANCE_SEED, fixed before any run.
"""
import heapq
import itertools
import math
import time

import numpy as np
from tnlab.cli import main
from tnlab.lattice import INF, DualPoint, SequenceSpace, format_exponent
from tnlab.norms import NormConfig, injective_norm, regular_modulus_oracle
from tnlab.seeding import child_seed
from tnlab.tensor import FullTensor, RankOneSum, evaluate_multilinear, modulus, rademacher_average, symmetrize
from tnlab.theorems import (
    check_basis_disjointness,
    check_holder,
    check_lemma35,
    check_polarization,
    check_projection_contractive,
    check_sandwich24,
    run_check,
)

ACCEPTANCE_SEED = 20240611

EXPONENTS = (1.0, 2.0, INF)
DIMS = (2, 3, 4)
ORDERS = (2, 3)


def diagonal_grid():
    """(p, m, n) cells of criteria 1 and 2: p = 2 only with n = 2."""
    return [(p, m, n) for p in EXPONENTS for m in DIMS for n in ORDERS if not (p == 2.0 and n == 3)]


def cell_name(p, m, n):
    return f"p={format_exponent(p)} m={m} n={n}"


def rng_for(*path):
    return np.random.default_rng(child_seed(ACCEPTANCE_SEED, "acceptance", *path))


def cube_poly_upper_bound(b, target, max_boxes=20000):
    """Certify ``sup |P_b| <= target`` over the cube [-1, 1]^m by branch and bound.

    ``b`` is a symmetric array.  On a box with centre c and half-widths h,
    ``P(c + d) = sum_k C(n, k) T(c^(n-k), d^k)`` and each term is bounded by
    contracting ``|T(c^(n-k), .)|`` with h.  Returns ``(certified, bound)``
    where bound is the largest box bound still open when the search stopped.
    """
    n, m = b.ndim, b.shape[0]

    def box_bound(c, h):
        total = 0.0
        for k in range(n + 1):
            t = b
            for _ in range(n - k):
                t = np.tensordot(c, t, axes=([0], [0]))
            t = np.abs(t) if k else abs(float(t))
            for _ in range(k):
                t = np.tensordot(h, t, axes=([0], [0]))
            total += math.comb(n, k) * float(t)
        return total

    c0, h0 = np.zeros(m), np.ones(m)
    heap = [(-box_bound(c0, h0), 0, c0, h0)]
    tick = 1
    while heap and tick < max_boxes:
        neg, _, c, h = heapq.heappop(heap)
        if -neg <= target:
            return True, -neg
        j = int(np.argmax(h))
        for sgn in (-1.0, 1.0):
            c2, h2 = c.copy(), h.copy()
            h2[j] /= 2.0
            c2[j] += sgn * h2[j]
            heapq.heappush(heap, (-box_bound(c2, h2), tick, c2, h2))
            tick += 1
    bound = -heap[0][0] if heap else 0.0
    return bound <= target, bound


# ------------------------------------------------------------- criterion 1


def test_criterion_1_diagonal_four_norms_agree(criterion):
    t0 = time.perf_counter()
    failed_cells, failures, inexact, explained, worst = {}, 0, 0, 0, (0.0, None)
    for p, m, n in diagonal_grid():
        for k in range(100):
            rep = run_check("thm3.6", p, m, n, ACCEPTANCE_SEED, k, tol=1e-9)
            if any(rep.witnesses[key]["rigor"] != "exact" for key in ("eps", "s_eps", "pos_eps", "pos_s_eps")):
                inexact += 1
            if not rep.passed:
                failures += 1
                a, q = np.array(rep.witnesses["diag"]), rep.quantities
                # even order over l_1: the polynomial sup over the cube has a closed form
                if p == 1.0 and n % 2 == 0:
                    closed_s = max(a[a > 0].sum(), -a[a < 0].sum())
                    explained += abs(q["s_eps"] - closed_s) <= 1e-12 and abs(q["eps"] - np.abs(a).sum()) <= 1e-12
                failed_cells[cell_name(p, m, n)] = failed_cells.get(cell_name(p, m, n), 0) + 1
                if rep.quantities["spread"] > worst[0]:
                    worst = (rep.quantities["spread"], (cell_name(p, m, n), rep.witnesses["diag"], rep.quantities))
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and inexact == 0 and elapsed < 60
    detail = f"{failures} failing instances, {inexact} inexact, {elapsed:.1f}s"
    if failures:
        detail += f"; {explained} match the closed forms eps = sum|a|, s_eps = max(sum a+, sum a-)"
    if failed_cells:
        detail += f"; failing cells {failed_cells}; worst {worst[1][0]} a={np.round(worst[1][1], 4).tolist()} " \
                  f"eps={worst[1][2]['eps']:.6g} s_eps={worst[1][2]['s_eps']:.6g}"
    criterion(1, "four injective norms agree on diagonal tensors (1e-9, exact oracles, <60s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 2


def test_criterion_2_diagonal_sign_invariance(criterion):
    t0 = time.perf_counter()
    failed_cells, bad_eps, bad_seps = {}, 0, 0
    for p, m, n in diagonal_grid():
        for k in range(100):
            rep = run_check("unconditional", p, m, n, ACCEPTANCE_SEED, k, tol=1e-9)
            if not rep.passed:
                failed_cells[cell_name(p, m, n)] = failed_cells.get(cell_name(p, m, n), 0) + 1
                bad_eps += rep.quantities["spread_eps"] > 1e-9
                bad_seps += rep.quantities["spread_s_eps"] > 1e-9
    elapsed = time.perf_counter() - t0
    ok = not failed_cells and elapsed < 60
    detail = f"eps variant in {bad_eps} instances, s-eps variant in {bad_seps}, {elapsed:.1f}s"
    if failed_cells:
        detail += f"; failing cells {failed_cells}"
    criterion(2, "eps and s-eps invariant under all diagonal sign patterns (1e-9, <60s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 3


def test_criterion_3_diagonal_projection_contractive(criterion):
    t0 = time.perf_counter()
    cells = [(p, m, n) for p in (1.0, INF) for m in DIMS for n in ORDERS]
    rng = rng_for("criterion3")
    q_fail, qs_fail, certified, per_cell = 0, 0, 0, {}
    for k in range(500):
        p, m, n = cells[k % len(cells)]
        u = FullTensor(SequenceSpace(m, p), rng.normal(size=(m,) * n))
        rep = check_projection_contractive(u, tol=1e-9)
        q = rep.quantities
        if q["q_eps"] > q["eps"] + 1e-9:
            q_fail += 1
        if q["qs_s_eps"] > q["s_eps"] + 1e-9:
            qs_fail += 1
            per_cell[cell_name(p, m, n)] = per_cell.get(cell_name(p, m, n), 0) + 1
            if p == 1.0:
                ok_cert, _ = cube_poly_upper_bound(symmetrize(u).full, q["qs_s_eps"] - 1e-6)
                certified += ok_cert
    elapsed = time.perf_counter() - t0
    ok = q_fail == 0 and qs_fail == 0 and elapsed < 120
    detail = f"Q fails {q_fail}/500, Q_s fails {qs_fail}/500, {elapsed:.1f}s"
    if qs_fail:
        detail += f"; Q_s failures by cell {per_cell}; {certified} certified by branch-and-bound upper bound"
    criterion(3, "diagonal projections Q and Q_s are contractive over l_1 and l_inf (+1e-9, <120s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 4


def test_criterion_4_sandwich(criterion):
    cells = [(p, m, n) for p in EXPONENTS for m in DIMS for n in ORDERS]
    rng = rng_for("criterion4")
    fails, worst_ratio = [], 0.0
    for k in range(200):
        p, m, n = cells[k % len(cells)]
        u = FullTensor(SequenceSpace(m, p), rng.normal(size=(m,) * n))
        rep = check_sandwich24(u, tol=1e-6)
        q = rep.quantities
        c = {2: 2.0, 3: 4.5}[n]
        assert q["constant"] == c
        lower_ok = q["s_eps"] <= q["eps"] + 1e-6 * max(1.0, q["eps"])
        upper_ok = q["eps"] <= c * q["s_eps"] + 1e-6 * max(1.0, c * q["s_eps"])
        worst_ratio = max(worst_ratio, q["eps"] / q["s_eps"] / c)
        if not (lower_ok and upper_ok):
            fails.append(cell_name(p, m, n))
    ok = not fails
    detail = f"{len(fails)}/200 failing, max eps/(c*s_eps) = {worst_ratio:.4f}"
    if fails:
        detail += f"; cells {sorted(set(fails))}"
    criterion(4, "s_eps <= eps <= (n^n/n!) s_eps with constants 2 and 4.5 (1e-6)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 5


def test_criterion_5_polarization_and_rademacher(criterion):
    t0 = time.perf_counter()
    cells = [(p, m, n) for p in EXPONENTS for m in DIMS for n in ORDERS]
    rng = rng_for("criterion5")
    pol_fail = 0
    for k in range(100):
        p, m, n = cells[k % len(cells)]
        rep = check_polarization(list(rng.normal(size=(n, m))), SequenceSpace(m, p), tol=1e-10)
        pol_fail += not rep.passed
    shared_fail, product_fail, shared_by_n = 0, 0, {}
    for k in range(100):
        p, m, n = cells[k % len(cells)]
        K = int(rng.integers(1, 7))
        space = SequenceSpace(m, p)
        terms = RankOneSum(space, rng.normal(size=K), rng.normal(size=(K, n, m)))
        target = terms.expand().coeffs
        scale = max(1.0, float(np.max(np.abs(target))))
        d_shared = float(np.max(np.abs(rademacher_average(terms, "shared").coeffs - target)))
        d_product = float(np.max(np.abs(rademacher_average(terms, "product").coeffs - target)))
        if d_shared > 1e-10 * scale:
            shared_fail += 1
            shared_by_n[n] = shared_by_n.get(n, 0) + 1
        product_fail += d_product > 1e-10 * scale
    elapsed = time.perf_counter() - t0
    ok = pol_fail == 0 and shared_fail == 0 and product_fail == 0 and elapsed < 10
    detail = (f"polarization fails {pol_fail}/100; Rademacher shared-sign fails {shared_fail}/100 "
              f"(by order {shared_by_n}); independent-sign product scheme fails {product_fail}/100; {elapsed:.1f}s")
    criterion(5, "polarization and Rademacher averaging identities (1e-10, <10s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 6


def test_criterion_6_geometric_mean_and_holder(criterion):
    t0 = time.perf_counter()
    rng = rng_for("criterion6")
    mean_fail = 0
    for k in range(1000):
        p = EXPONENTS[k % 3]
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        weights = rng.uniform(0.5, 2.0, size=m) if k % 2 else None
        dual = SequenceSpace(m, p, weights).dual()
        duals = [DualPoint(rng.exponential(size=m) * rng.uniform(0.1, 3.0), dual) for _ in range(n)]
        mean_fail += not check_lemma35(duals, tol=1e-12).passed
    holder_fail = 0
    for k in range(1000):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        exps = [1.0 / w for w in rng.dirichlet(np.ones(n))]
        if k % 4 == 0 and n > 1:
            exps = [INF] * (n - 1) + [1.0]
        vectors = list(np.abs(rng.normal(size=(n, m))))
        holder_fail += not check_holder(vectors, exps, tol=1e-12).passed
    elapsed = time.perf_counter() - t0
    ok = mean_fail == 0 and holder_fail == 0 and elapsed < 5
    detail = f"geometric-mean fails {mean_fail}/1000, Hoelder fails {holder_fail}/1000, {elapsed:.2f}s"
    criterion(6, "geometric mean of positive functionals and Hoelder (1e-12, <5s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 7


def test_criterion_7_basis_disjointness(criterion):
    t0 = time.perf_counter()
    rng = rng_for("criterion7")
    pairs, count, worst = 0, 0, 0.0
    for m in (1, 2, 3):
        for n in ORDERS:
            idx = list(itertools.product(range(m), repeat=n))
            for i, k in itertools.permutations(idx, 2):
                pairs += 1
                for t in range(20):
                    space = SequenceSpace(m, EXPONENTS[t % 3])
                    duals = list(rng.exponential(size=(n, m)))
                    rep = check_basis_disjointness(i, k, duals, space, tol=1e-12)
                    worst = max(worst, rep.quantities["bound"])
                    count += 1
                    assert rep.quantities["min_part"] >= 0
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10
    detail = f"{pairs} ordered pairs, {count} dual tuples, max bound {worst:.3g}, {elapsed:.1f}s"
    criterion(7, "partition bound certifies disjointness of distinct basis tensors (<=1e-12, <10s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 8


def test_criterion_8_engine_cross_validation(criterion):
    t0 = time.perf_counter()
    cells = [(p, m, n) for p in EXPONENTS for m in DIMS for n in ORDERS if not (p == 2.0 and n == 3)]
    rng = rng_for("criterion8")
    misses = []
    for k in range(200):
        p, m, n = cells[k % len(cells)]
        u = FullTensor(SequenceSpace(m, p), rng.normal(size=(m,) * n))
        oracle = injective_norm(u, "svd" if p == 2.0 else "enumerate")
        assert oracle.exact
        alt = injective_norm(u, "alternating", NormConfig(starts=32, seed=child_seed(ACCEPTANCE_SEED, "c8", k)))
        rel = abs(alt.value - oracle.value) / max(1.0, abs(oracle.value))
        if rel > 1e-6:
            misses.append((cell_name(p, m, n), rel))
    mod_fail, max_excess = 0, 0.0
    for k in range(50):
        m, n = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        u = FullTensor(SequenceSpace(m, EXPONENTS[k % 3]), rng.normal(size=(m,) * n))
        xs = list(rng.exponential(size=(n, m)))
        oracle = regular_modulus_oracle(u, xs, grid_k=2)
        mv = evaluate_multilinear(modulus(u), *xs)
        assert oracle <= mv + 1e-12 * max(1.0, mv)
        if abs(oracle - mv) > 1e-12 * max(1.0, mv):
            mod_fail += 1
            max_excess = max(max_excess, mv - oracle)
    elapsed = time.perf_counter() - t0
    ok = not misses and mod_fail == 0 and elapsed < 120
    detail = (f"alternating misses {len(misses)}/200 {misses[:3]}; box-corner oracle differs from modulus "
              f"evaluation on {mod_fail}/50 (always below it, max gap {max_excess:.4g}); {elapsed:.1f}s")
    criterion(8, "alternating ascent vs exact oracles (1e-6) and box oracle vs modulus (<120s)", ok, detail)
    assert ok, detail


# ------------------------------------------------------------- criterion 9


def test_criterion_9_suite_determinism(criterion, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text('{"checks": "all", "exponents": [1, 2, "inf"], "dims": [2, 3], "orders": [2, 3], '
                   '"samples": 2, "seed": 1234}\n')
    outs = []
    for run, workers in enumerate(("1", "1", "4")):
        out = tmp_path / f"run{run}"
        main(["suite", str(cfg), "--out", str(out), "--workers", workers])
        outs.append(((out / "report.csv").read_bytes(), (out / "witnesses.json").read_bytes()))
    ok = outs[0] == outs[1] == outs[2] and len(outs[0][0]) > 0
    rows = outs[0][0].count(b"\n") - 1
    detail = f"{rows} report rows; identical across two serial runs and a 4-worker run"
    if not ok:
        detail = "reports differ between runs"
    criterion(9, "suite with a fixed seed writes byte-identical reports", ok, detail)
    assert ok, detail
