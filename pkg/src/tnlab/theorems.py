"""Numerical checks of the structural results on tensor diagonals.

Every ``check_*`` function computes the quantities involved in one result,
compares them at a stated tolerance and returns a :class:`CheckReport`.  The
registry :data:`CHECKS` maps short identifiers (used by the command line and
by suite configs) to a check together with a seeded instance generator, and
:func:`run_suite` sweeps a grid of exponents, dimensions and orders.

Tolerances are direction aware.  Equality checks use the strict tolerance
only when every norm involved was computed exactly.  Inequality checks use
it only when every norm on the larger side is exact, since a lower bound on
the smaller side can only make the check harder to pass.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .lattice import (
    DualPoint,
    SequenceSpace,
    format_exponent,
    holder_check,
    holder_mean_functional,
    parse_exponent,
)
from .norms import (
    NormConfig,
    NormEstimate,
    injective_norm,
    positive_injective_norm,
    positive_sym_injective_norm,
    regular_modulus_oracle,
    sym_injective_norm,
)
from .seeding import check_seed, child_seed
from .tensor import (
    MAX_RADEMACHER_TERMS,
    FullTensor,
    RankOneSum,
    SymmetricTensor,
    basis_tensor,
    coefficient_sign_flip,
    coordinate_multiply,
    diagonal_project,
    diagonal_symmetric,
    diagonal_tensor,
    evaluate_multilinear,
    modulus,
    polarization_expand,
    rademacher_average,
    rank_one,
    symmetrize,
)

TOL_EXACT = 1e-9
TOL_APPROX = 1e-4
TOL_SANDWICH = 1e-6
TOL_IDENTITY = 1e-10
TOL_POINTWISE = 1e-12
MAX_RADEMACHER_DRAW = 6


@dataclass
class CheckReport:
    check_id: str
    instance: dict
    quantities: dict
    tolerance: float
    passed: bool
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "instance": dict(self.instance),
            "quantities": dict(self.quantities),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }


# ---------------------------------------------------------------- helpers


def _require_order(n: int):
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")


def _instance(space: SequenceSpace, n: int, u=None) -> dict:
    d = {"p": format_exponent(space.exponent), "m": space.dim, "n": int(n)}
    if u is not None:
        d["tensor_hash"] = u.digest()
    return d


def _rel_diff(x: float, y: float) -> float:
    top = max(abs(x), abs(y))
    return 0.0 if top == 0 else abs(x - y) / top


def _spread(values: Sequence[float]) -> float:
    return max((_rel_diff(x, y) for x, y in itertools.combinations(values, 2)), default=0.0)


def _le(small: float, large: float, tol: float) -> bool:
    return small <= large + tol * max(1.0, abs(large))


def _pick_tol(tol, strict: float, estimates: Sequence[NormEstimate]) -> float:
    if tol is not None:
        return float(tol)
    return strict if all(e.exact for e in estimates) else TOL_APPROX


def _est(e: NormEstimate) -> dict:
    return {
        "value": e.value,
        "method": e.method,
        "rigor": e.rigor,
        "gap": e.gap,
        "certificates": [c.to_list() for c in e.certificates],
    }


def _coords(x, dim: int) -> np.ndarray:
    a = np.asarray(getattr(x, "coords", x), dtype=float)
    if a.shape != (dim,):
        raise ValueError(f"expected length {dim}, got shape {a.shape}")
    return a


def _as_symmetric(u) -> SymmetricTensor:
    if isinstance(u, SymmetricTensor):
        return u
    return SymmetricTensor.from_array(u.space, u.coeffs, atol=1e-9)


# ----------------------------------------------------------------- checks


def check_diagonal_four_norms(a, space: SequenceSpace, n: int, method: str = "auto",
                              config: NormConfig | None = None, tol: float | None = None) -> CheckReport:
    """On ``sum a_i e_i^(x)n`` the four injective norms coincide."""
    _require_order(n)
    a = _coords(a, space.dim)
    u = diagonal_tensor(space, a, n)
    us = diagonal_symmetric(space, a, n)
    ests = {
        "eps": injective_norm(u, method, config),
        "s_eps": sym_injective_norm(us, method, config),
        "pos_eps": positive_injective_norm(u, method, config),
        "pos_s_eps": positive_sym_injective_norm(us, method, config),
    }
    tol = _pick_tol(tol, TOL_EXACT, list(ests.values()))
    q = {k: e.value for k, e in ests.items()}
    q["spread"] = _spread([e.value for e in ests.values()])
    w = {k: _est(e) for k, e in ests.items()}
    w["diag"] = a.tolist()
    return CheckReport("thm3.6", _instance(space, n, u), q, tol, q["spread"] <= tol, w)


def check_diagonal_unconditionality(a, space: SequenceSpace, n: int, method: str = "auto",
                                    config: NormConfig | None = None, tol: float | None = None) -> CheckReport:
    """Flipping signs of diagonal coefficients leaves both injective norms unchanged.

    Every pattern in {+1, -1}^m is evaluated; flipping twice is the identity,
    so the values must be equal, not merely bounded.
    """
    _require_order(n)
    a = _coords(a, space.dim)
    thetas = [np.array(t) for t in itertools.product((1.0, -1.0), repeat=space.dim)]
    eps, seps, all_est = [], [], []
    for th in thetas:
        e = injective_norm(diagonal_tensor(space, th * a, n), method, config)
        s = sym_injective_norm(diagonal_symmetric(space, th * a, n), method, config)
        eps.append(e.value)
        seps.append(s.value)
        all_est += [e, s]
    tol = _pick_tol(tol, TOL_EXACT, all_est)
    q = {
        "eps_min": min(eps), "eps_max": max(eps),
        "s_eps_min": min(seps), "s_eps_max": max(seps),
        "spread_eps": _spread([min(eps), max(eps)]),
        "spread_s_eps": _spread([min(seps), max(seps)]),
    }
    passed = q["spread_eps"] <= tol and q["spread_s_eps"] <= tol
    w = {
        "diag": a.tolist(),
        "theta_eps_min": thetas[int(np.argmin(eps))].tolist(),
        "theta_eps_max": thetas[int(np.argmax(eps))].tolist(),
        "theta_s_eps_min": thetas[int(np.argmin(seps))].tolist(),
        "theta_s_eps_max": thetas[int(np.argmax(seps))].tolist(),
    }
    return CheckReport("unconditional", _instance(space, n, diagonal_tensor(space, a, n)), q, tol, passed, w)


def check_projection_contractive(u: FullTensor, method: str = "auto", config: NormConfig | None = None,
                                 tol: float | None = None, symmetric: bool | None = None) -> CheckReport:
    """``||Q u||_eps <= ||u||_eps`` and ``||Q_s s(u)||_{s,eps} <= ||s(u)||_{s,eps}``.

    ``symmetric=False`` checks only the first inequality, ``True`` only the
    second, ``None`` both.
    """
    if isinstance(u, SymmetricTensor):
        u = u.to_full()
    q, w, large = {}, {}, []
    passed = True
    parts = []
    if symmetric in (None, False):
        qe = injective_norm(diagonal_project(u), method, config)
        ue = injective_norm(u, method, config)
        q.update(q_eps=qe.value, eps=ue.value)
        w.update(q_eps=_est(qe), eps=_est(ue))
        large.append(ue)
        parts.append((qe.value, ue.value))
    if symmetric in (None, True):
        s = symmetrize(u)
        qs = sym_injective_norm(diagonal_project(s), method, config)
        ss = sym_injective_norm(s, method, config)
        q.update(qs_s_eps=qs.value, s_eps=ss.value)
        w.update(qs_s_eps=_est(qs), s_eps=_est(ss))
        large.append(ss)
        parts.append((qs.value, ss.value))
    tol = _pick_tol(tol, TOL_EXACT, large)
    passed = all(_le(small, big, tol) for small, big in parts)
    w["coeffs"] = u.coeffs.ravel().tolist()
    check_id = {None: "lemma3.1+3.2", False: "lemma3.1", True: "lemma3.2"}[symmetric]
    return CheckReport(check_id, _instance(u.space, u.order, u), q, tol, passed, w)


def disjointness_partition(idx_k: Sequence[int], duals: Sequence) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split each ``x*_j`` into ``x*_j[k_j] e_{k_j}`` and the remainder."""
    parts = []
    for kj, x in zip(idx_k, duals):
        first = np.zeros_like(x)
        first[kj] = x[kj]
        parts.append((first, x - first))
    return parts


def check_basis_disjointness(idx_i: Sequence[int], idx_k: Sequence[int], duals: Sequence,
                             space: SequenceSpace | None = None, tol: float = TOL_POINTWISE) -> CheckReport:
    """Certify that two distinct basis tensors are disjoint at the given positive arguments.

    Each argument is split in two positive pieces; the sum over all ``2**n``
    choices of pieces of ``min(<e_i, pieces>, <e_k, pieces>)`` bounds the
    meet ``|e_i| ^ |e_k|`` evaluated at the arguments, and must vanish.
    """
    i = tuple(int(v) for v in idx_i)
    k = tuple(int(v) for v in idx_k)
    n = len(i)
    _require_order(n)
    if len(k) != n or len(duals) != n:
        raise ValueError("multi-indices and dual arguments must all have length n")
    if i == k:
        raise ValueError("multi-indices must differ")
    if space is None:
        if not isinstance(duals[0], DualPoint):
            raise ValueError("pass a space or DualPoint arguments")
        space = duals[0].space.dual()
    xs = [_coords(d, space.dim) for d in duals]
    if any(np.any(x < 0) for x in xs):
        raise ValueError("dual arguments must be positive")
    parts = disjointness_partition(k, xs)
    ei, ek = basis_tensor(space, i), basis_tensor(space, k)
    bound = 0.0
    for choice in itertools.product((0, 1), repeat=n):
        args = [parts[j][c] for j, c in enumerate(choice)]
        bound += min(evaluate_multilinear(ei, *args), evaluate_multilinear(ek, *args))
    min_part = float(min(p.min() for pair in parts for p in pair))
    passed = bound <= tol and min_part >= 0
    q = {"bound": float(bound), "min_part": min_part}
    w = {"i": list(i), "k": list(k), "duals": [x.tolist() for x in xs]}
    return CheckReport("thm3.3", _instance(space, n), q, tol, passed, w)


def check_positive_sign_invariance(u: FullTensor, signs, method: str = "auto",
                                   config: NormConfig | None = None, tol: float | None = None) -> CheckReport:
    """The positive injective norm ignores coefficient signs."""
    flipped = coefficient_sign_flip(u, signs)
    a = positive_injective_norm(u, method, config)
    b = positive_injective_norm(flipped, method, config)
    tol = _pick_tol(tol, TOL_EXACT, [a, b])
    q = {"pos_eps": a.value, "pos_eps_flipped": b.value, "spread": _rel_diff(a.value, b.value)}
    w = {"signs": np.asarray(signs).ravel().tolist(), "pos_eps": _est(a), "pos_eps_flipped": _est(b)}
    return CheckReport("cor3.4", _instance(u.space, u.order, u), q, tol, q["spread"] <= tol, w)


def check_lemma35(duals: Sequence[DualPoint], tol: float = TOL_POINTWISE) -> CheckReport:
    """The coordinatewise geometric mean of positive functionals has norm at most the geometric mean of norms."""
    if len(duals) == 0:
        raise ValueError("need at least one functional (n >= 1)")
    n = len(duals)
    x = holder_mean_functional(duals)
    lhs = x.norm
    rhs = float(np.prod([d.norm ** (1.0 / n) for d in duals]))
    q = {"lhs": lhs, "rhs": rhs}
    w = {"duals": [d.to_list() for d in duals], "mean": x.to_list()}
    return CheckReport("lemma3.5", _instance(duals[0].space.dual(), n), q, tol, _le(lhs, rhs, tol), w)


def check_holder(vectors: Sequence, exponents: Sequence, tol: float = TOL_POINTWISE) -> CheckReport:
    """``sum_i |prod_k b_k[i]| <= prod_k ||b_k||_{p_k}`` with conjugate exponents."""
    if len(vectors) == 0:
        raise ValueError("need at least one vector (n >= 1)")
    res = holder_check(vectors, exponents, tol=0.0)
    m = len(np.asarray(vectors[0]))
    q = {"lhs": res.lhs, "rhs": res.rhs}
    w = {"exponents": [format_exponent(parse_exponent(p)) for p in exponents]}
    inst = {"p": "-", "m": m, "n": len(vectors)}
    return CheckReport("holder", inst, q, tol, _le(res.lhs, res.rhs, tol), w)


def check_polarization(vectors: Sequence, space: SequenceSpace, tol: float = TOL_IDENTITY) -> CheckReport:
    """The signed sum of tensor powers reproduces the symmetrized product coordinatewise."""
    if len(vectors) == 0:
        raise ValueError("need at least one vector (n >= 1)")
    lhs = polarization_expand(vectors, space).expand().coeffs
    rhs = symmetrize(rank_one(space, vectors)).full
    diff = float(np.max(np.abs(lhs - rhs)))
    scale = max(1.0, float(np.max(np.abs(rhs))))
    q = {"max_abs_diff": diff}
    return CheckReport("eq2.3", _instance(space, len(vectors), rank_one(space, vectors)), q, tol,
                       diff <= tol * scale, {})


def check_rademacher(terms: RankOneSum, tol: float = TOL_IDENTITY) -> CheckReport:
    """Averaging products of Rademacher sums over all sign patterns recovers the sum of rank-one terms.

    Both averaging schemes of :func:`rademacher_average` are recorded; the
    check passes only if both reproduce the sum.
    """
    rhs = terms.expand().coeffs
    scale = max(1.0, float(np.max(np.abs(rhs))))
    shared = float(np.max(np.abs(rademacher_average(terms, "shared").coeffs - rhs)))
    product = float(np.max(np.abs(rademacher_average(terms, "product").coeffs - rhs)))
    q = {"max_abs_diff": shared, "max_abs_diff_product": product, "terms": float(terms.terms)}
    passed = shared <= tol * scale and product <= tol * scale
    return CheckReport("rademacher", _instance(terms.space, terms.order, terms.expand()), q, tol, passed, {})


def sandwich_constant(n: int) -> float:
    """``n**n / n!``: 2 for n = 2, 4.5 for n = 3."""
    return n**n / math.factorial(n)


def check_sandwich24(u, method: str = "auto", config: NormConfig | None = None,
                     tol: float | None = None) -> CheckReport:
    """``||s(u)||_{s,eps} <= ||s(u)||_eps <= n^n/n! * ||s(u)||_{s,eps}``."""
    s = symmetrize(u) if isinstance(u, FullTensor) else u
    n = s.order
    e = injective_norm(s.to_full(), method, config)
    se = sym_injective_norm(s, method, config)
    c = sandwich_constant(n)
    tol = _pick_tol(tol, TOL_SANDWICH, [e, se])
    passed = _le(se.value, e.value, tol) and _le(e.value, c * se.value, tol)
    q = {"s_eps": se.value, "eps": e.value, "constant": c, "upper": c * se.value}
    w = {"eps": _est(e), "s_eps": _est(se)}
    return CheckReport("eq2.4", _instance(s.space, n, s), q, tol, passed, w)


def check_norm_ordering(u: FullTensor, method: str = "auto", config: NormConfig | None = None,
                        tol: float | None = None) -> CheckReport:
    """``||u||_eps <= ||u||_{|eps|}`` and ``||s(u)||_{s,eps} <= ||s(u)||_{s,|eps|}``."""
    s = symmetrize(u)
    e = injective_norm(u, method, config)
    pe = positive_injective_norm(u, method, config)
    se = sym_injective_norm(s, method, config)
    pse = positive_sym_injective_norm(s, method, config)
    tol = _pick_tol(tol, TOL_EXACT, [pe, pse])
    passed = _le(e.value, pe.value, tol) and _le(se.value, pse.value, tol)
    q = {"eps": e.value, "pos_eps": pe.value, "s_eps": se.value, "pos_s_eps": pse.value}
    w = {"eps": _est(e), "pos_eps": _est(pe), "s_eps": _est(se), "pos_s_eps": _est(pse)}
    return CheckReport("lemma2.4", _instance(u.space, u.order, u), q, tol, passed, w)


def check_modulus_oracle(u: FullTensor, duals: Sequence, grid_k: int = 2, tol: float = TOL_EXACT) -> CheckReport:
    """Compare the brute-force box supremum with the coefficientwise-modulus evaluation.

    Passes when the two agree.  ``dominated`` records the one-sided bound
    ``oracle <= modulus_value``, which holds for every tensor.
    """
    xs = [_coords(d, u.dim) for d in duals]
    oracle = regular_modulus_oracle(u, xs, grid_k)
    mv = evaluate_multilinear(modulus(u), *xs)
    q = {"oracle": oracle, "modulus_value": mv, "difference": mv - oracle,
         "dominated": float(_le(oracle, mv, tol))}
    passed = abs(mv - oracle) <= tol * max(1.0, abs(mv))
    w = {"duals": [x.tolist() for x in xs], "coeffs": u.coeffs.ravel().tolist(), "grid_k": grid_k}
    return CheckReport("lemma2.3", _instance(u.space, u.order, u), q, tol, passed, w)


def _op_norm(t: np.ndarray) -> float:
    # a coordinate multiplier on a weighted l_p space has norm max |t_i|
    return float(np.max(np.abs(t)))


def check_multiplier_monotonicity(u: FullTensor, multipliers: Sequence, method: str = "auto",
                                  config: NormConfig | None = None, tol: float | None = None) -> CheckReport:
    """``||(T_1 (x) ... (x) T_n) u||_eps <= ||T_1|| ... ||T_n|| ||u||_eps`` for coordinate multipliers."""
    ts = [_coords(t, u.dim) for t in multipliers]
    if len(ts) != u.order:
        raise ValueError(f"expected {u.order} multipliers, got {len(ts)}")
    lhs = injective_norm(coordinate_multiply(u, ts), method, config)
    base = injective_norm(u, method, config)
    factor = float(np.prod([_op_norm(t) for t in ts]))
    tol = _pick_tol(tol, TOL_EXACT, [base])
    q = {"lhs": lhs.value, "eps": base.value, "op_norm_product": factor, "rhs": factor * base.value}
    w = {"multipliers": [t.tolist() for t in ts], "lhs": _est(lhs), "eps": _est(base)}
    return CheckReport("lemma2.1", _instance(u.space, u.order, u), q, tol, _le(q["lhs"], q["rhs"], tol), w)


def check_symmetric_multiplier_monotonicity(u, multiplier, method: str = "auto",
                                            config: NormConfig | None = None,
                                            tol: float | None = None) -> CheckReport:
    """``||T^(x)n s||_{s,eps} <= ||T||^n ||s||_{s,eps}`` for a coordinate multiplier T."""
    s = symmetrize(u) if isinstance(u, FullTensor) else u
    t = _coords(multiplier, s.dim)
    image = _as_symmetric(coordinate_multiply(s.to_full(), [t] * s.order))
    lhs = sym_injective_norm(image, method, config)
    base = sym_injective_norm(s, method, config)
    factor = _op_norm(t) ** s.order
    tol = _pick_tol(tol, TOL_EXACT, [base])
    q = {"lhs": lhs.value, "s_eps": base.value, "op_norm_power": factor, "rhs": factor * base.value}
    w = {"multiplier": t.tolist(), "lhs": _est(lhs), "s_eps": _est(base)}
    return CheckReport("lemma2.2", _instance(s.space, s.order, s), q, tol, _le(q["lhs"], q["rhs"], tol), w)


# --------------------------------------------------------------- registry


@dataclass(frozen=True)
class Instance:
    """Everything a check needs besides its random data."""

    check_id: str
    space: SequenceSpace
    n: int
    seed: int
    index: int
    method: str = "auto"
    tol: float | None = None
    norm_config: NormConfig = NormConfig()


def _tensor_data(inst: Instance, rng, data: dict) -> FullTensor:
    if data.get("tensor") is not None:
        return data["tensor"]
    if data.get("diag") is not None:
        return diagonal_tensor(inst.space, data["diag"], inst.n)
    return FullTensor(inst.space, rng.normal(size=(inst.space.dim,) * inst.n))


def _diag_data(inst: Instance, rng, data: dict) -> np.ndarray:
    if data.get("diag") is not None:
        return _coords(data["diag"], inst.space.dim)
    if data.get("tensor") is not None:
        t = data["tensor"]
        if not t.is_diagonal:
            raise ValueError(f"{inst.check_id} needs a diagonal tensor")
        return np.array(t.coeffs[(np.arange(t.dim),) * t.order])
    return rng.normal(size=inst.space.dim)


def _or(tol, default: float) -> float:
    return default if tol is None else tol


def _positive_duals(inst: Instance, rng) -> list[DualPoint]:
    dual = inst.space.dual()
    return [DualPoint(rng.exponential(size=inst.space.dim), dual) for _ in range(inst.n)]


def _run_four_norms(inst, rng, data):
    return check_diagonal_four_norms(_diag_data(inst, rng, data), inst.space, inst.n, inst.method,
                                     inst.norm_config, inst.tol)


def _run_unconditional(inst, rng, data):
    return check_diagonal_unconditionality(_diag_data(inst, rng, data), inst.space, inst.n, inst.method,
                                           inst.norm_config, inst.tol)


def _run_q(inst, rng, data):
    return check_projection_contractive(_tensor_data(inst, rng, data), inst.method, inst.norm_config,
                                        inst.tol, symmetric=False)


def _run_qs(inst, rng, data):
    return check_projection_contractive(_tensor_data(inst, rng, data), inst.method, inst.norm_config,
                                        inst.tol, symmetric=True)


def _run_disjoint(inst, rng, data):
    m, n = inst.space.dim, inst.n
    if m == 1:
        raise ValueError("disjointness needs two distinct multi-indices, so dim >= 2")
    i = tuple(int(v) for v in rng.integers(m, size=n))
    k = i
    while k == i:
        k = tuple(int(v) for v in rng.integers(m, size=n))
    return check_basis_disjointness(i, k, _positive_duals(inst, rng), inst.space, _or(inst.tol, TOL_POINTWISE))


def _run_sign_invariance(inst, rng, data):
    u = _tensor_data(inst, rng, data)
    signs = rng.choice([-1.0, 1.0], size=u.coeffs.shape)
    return check_positive_sign_invariance(u, signs, inst.method, inst.norm_config, inst.tol)


def _run_lemma35(inst, rng, data):
    return check_lemma35(_positive_duals(inst, rng), _or(inst.tol, TOL_POINTWISE))


def _run_holder(inst, rng, data):
    m, n = inst.space.dim, inst.n
    w = rng.dirichlet(np.ones(n))
    exps = [1.0 / v for v in w]
    vectors = rng.normal(size=(n, m))
    rep = check_holder(list(vectors), exps, _or(inst.tol, TOL_POINTWISE))
    rep.instance["p"] = format_exponent(inst.space.exponent)
    return rep


def _run_polarization(inst, rng, data):
    vectors = list(rng.normal(size=(inst.n, inst.space.dim)))
    return check_polarization(vectors, inst.space, _or(inst.tol, TOL_IDENTITY))


def _run_rademacher(inst, rng, data):
    K = int(rng.integers(1, MAX_RADEMACHER_DRAW + 1))
    K = min(K, MAX_RADEMACHER_TERMS // max(1, inst.n - 1))
    terms = RankOneSum(inst.space, rng.normal(size=K), rng.normal(size=(K, inst.n, inst.space.dim)))
    return check_rademacher(terms, _or(inst.tol, TOL_IDENTITY))


def _run_sandwich(inst, rng, data):
    return check_sandwich24(_tensor_data(inst, rng, data), inst.method, inst.norm_config, inst.tol)


def _run_ordering(inst, rng, data):
    return check_norm_ordering(_tensor_data(inst, rng, data), inst.method, inst.norm_config, inst.tol)


def _run_modulus(inst, rng, data):
    u = _tensor_data(inst, rng, data)
    xs = [d.coords for d in _positive_duals(inst, rng)]
    return check_modulus_oracle(u, xs, 2, _or(inst.tol, TOL_EXACT))


def _run_multipliers(inst, rng, data):
    u = _tensor_data(inst, rng, data)
    ts = list(rng.uniform(-1.0, 1.0, size=(inst.n, inst.space.dim)))
    return check_multiplier_monotonicity(u, ts, inst.method, inst.norm_config, inst.tol)


def _run_sym_multipliers(inst, rng, data):
    u = _tensor_data(inst, rng, data)
    t = rng.uniform(-1.0, 1.0, size=inst.space.dim)
    return check_symmetric_multiplier_monotonicity(u, t, inst.method, inst.norm_config, inst.tol)


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    summary: str
    run: Callable


CHECKS: dict[str, CheckSpec] = {c.check_id: c for c in (
    CheckSpec("thm3.6", "four injective norms agree on diagonal tensors", _run_four_norms),
    CheckSpec("unconditional", "diagonal sign flips preserve eps and s-eps norms", _run_unconditional),
    CheckSpec("lemma3.1", "diagonal projection is eps-contractive", _run_q),
    CheckSpec("lemma3.2", "symmetric diagonal projection is s-eps-contractive", _run_qs),
    CheckSpec("thm3.3", "distinct basis tensors are disjoint", _run_disjoint),
    CheckSpec("cor3.4", "positive injective norm ignores coefficient signs", _run_sign_invariance),
    CheckSpec("lemma3.5", "geometric mean of positive functionals", _run_lemma35),
    CheckSpec("holder", "generalized Hoelder inequality", _run_holder),
    CheckSpec("eq2.3", "polarization identity", _run_polarization),
    CheckSpec("rademacher", "Rademacher averaging identity", _run_rademacher),
    CheckSpec("eq2.4", "symmetric/full injective norm sandwich", _run_sandwich),
    CheckSpec("lemma2.4", "injective norms are dominated by positive injective norms", _run_ordering),
    CheckSpec("lemma2.3", "box oracle agrees with the coefficientwise modulus", _run_modulus),
    CheckSpec("lemma2.1", "coordinate multipliers are eps-monotone", _run_multipliers),
    CheckSpec("lemma2.2", "coordinate multipliers are s-eps-monotone", _run_sym_multipliers),
)}


def run_check(check_id: str, p, m: int, n: int, seed: int = 0, index: int = 0, method: str = "auto",
              tol: float | None = None, weights=None, data: dict | None = None,
              norm_config: NormConfig | None = None) -> CheckReport:
    """Run one check on a seeded instance.

    The random data are drawn from a generator seeded by
    ``child_seed(seed, check_id, p, m, n, index)``; ``data`` may supply a
    ``"tensor"`` (FullTensor) or ``"diag"`` (coefficients) instead.
    """
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}; known: {', '.join(sorted(CHECKS))}")
    _require_order(n)
    space = SequenceSpace(m, p, weights)
    inst_seed = child_seed(check_seed(seed), check_id, format_exponent(space.exponent), m, n, index)
    cfg = replace(norm_config or NormConfig(), seed=inst_seed)
    inst = Instance(check_id, space, n, inst_seed, index, method, tol, cfg)
    rng = np.random.default_rng(inst_seed)
    data = dict(data or {})
    if data.get("tensor") is not None:
        t = data["tensor"]
        if isinstance(t, SymmetricTensor):
            data["tensor"] = t = t.to_full()
        if t.space != space or t.order != n:
            raise ValueError(f"tensor is order {t.order} over {t.space}, expected order {n} over {space}")
    report = CHECKS[check_id].run(inst, rng, data)
    report.check_id = check_id
    report.instance = {**report.instance, "seed": inst_seed, "index": index}
    return report


@dataclass(frozen=True)
class SuiteConfig:
    checks: tuple[str, ...] = tuple(CHECKS)
    exponents: tuple = (1.0, 2.0, math.inf)
    dims: tuple[int, ...] = (2, 3, 4)
    orders: tuple[int, ...] = (2, 3)
    samples: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    method: str = "auto"
    workers: int = 1

    def __post_init__(self):
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ValueError(f"unknown check ids: {unknown}")
        unknown = [c for c in self.tolerances if c not in CHECKS]
        if unknown:
            raise ValueError(f"tolerance overrides for unknown checks: {unknown}")
        object.__setattr__(self, "checks", tuple(self.checks))
        object.__setattr__(self, "exponents", tuple(parse_exponent(p) for p in self.exponents))
        object.__setattr__(self, "dims", tuple(int(m) for m in self.dims))
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if any(m < 1 for m in self.dims):
            raise ValueError("dims must be positive")
        for n in self.orders:
            _require_order(n)
        if self.samples < 0:
            raise ValueError("samples must be nonnegative")
        object.__setattr__(self, "seed", check_seed(self.seed))


def suite_tasks(config: SuiteConfig) -> list[tuple]:
    """``(check_id, p, m, n, index)`` in report order: by check id, then instance index."""
    tasks = []
    for cid in sorted(set(config.checks)):
        index = 0
        for p in config.exponents:
            for m in config.dims:
                for n in config.orders:
                    for _ in range(config.samples):
                        tasks.append((cid, p, m, n, index))
                        index += 1
    return tasks


def run_suite(config: SuiteConfig) -> list[CheckReport]:
    """Run every configured check on every grid point; deterministic given ``config.seed``."""
    tasks = suite_tasks(config)

    def one(task):
        cid, p, m, n, index = task
        return run_check(cid, p, m, n, config.seed, index, config.method, config.tolerances.get(cid))

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(one, tasks))
    return [one(t) for t in tasks]


def summarize(reports: Sequence[CheckReport]) -> dict:
    failures = [r for r in reports if not r.passed]
    return {
        "checks": len({r.check_id for r in reports}),
        "instances": len(reports),
        "failures": len(failures),
        "first_failure": failures[0].to_dict() if failures else None,
    }


def summary_line(reports: Sequence[CheckReport]) -> str:
    s = summarize(reports)
    return f"{s['checks']} checks, {s['instances']} instances, {s['failures']} failures"
