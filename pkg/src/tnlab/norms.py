"""Engines for the injective, symmetric injective and positive injective norms.

All four norms are suprema of a multilinear form (or of its diagonal
polynomial) over dual unit balls.  Writing a dual functional as
``x* = s * z`` with ``s`` the space scale turns every dual ball into the
unweighted unit l_q ball, so the engines work on the rescaled coefficient
array ``b * (s (x) ... (x) s)`` and convert certificates back at the end.

Methods
-------
enumerate
    Exact vertex enumeration; available when the dual exponent is 1 or inf
    (and, for the symmetric norms, only when the polynomial is known to peak
    on the enumerated candidate set).
svd
    Exact for order 2 over l_2 (largest singular value, or largest absolute
    eigenvalue for the symmetric norms).
alternating
    Multi-start ascent.  Full tensors use block-coordinate ascent with a
    closed-form block update; symmetric tensors use projected-gradient ascent.
    Values are lower bounds.
grid
    ``alternating`` followed by a second ascent phase seeded from an angular
    grid on the unit sphere; ``gap`` records how much the phases disagree.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lattice import INF, DualPoint, SequenceSpace, sample_ball
from .tensor import FullTensor, SymmetricTensor, evaluate_multilinear, evaluate_polynomial, modulus

METHODS = ("auto", "enumerate", "svd", "alternating", "grid")
NORM_KINDS = ("eps", "s-eps", "pos-eps", "pos-s-eps")
ENUM_GUARD = 2**24
ORACLE_BUDGET = 10**7
EXACT_METHODS = ("enumerate", "svd")


class IncompatibleMethodError(ValueError):
    """The requested method cannot handle this tensor/exponent combination."""


@dataclass(frozen=True)
class NormConfig:
    starts: int = 32
    seed: int = 0
    tol: float = 1e-12
    max_sweeps: int = 500
    stall_sweeps: int = 2
    grid_k: int = 9
    grid_cap: int = 20000
    workers: int = 1


@dataclass(frozen=True)
class NormEstimate:
    value: float
    certificates: tuple[DualPoint, ...]
    method: str
    rigor: str
    kind: str
    iterations: int = 0
    starts: int = 0
    gap: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def exact(self) -> bool:
        return self.rigor == "exact"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "method": self.method,
            "rigor": self.rigor,
            "iterations": self.iterations,
            "starts": self.starts,
            "gap": self.gap,
            "certificates": [c.to_list() for c in self.certificates],
        }


# ---------------------------------------------------------------- helpers


def normalized_coeffs(b: np.ndarray, space: SequenceSpace) -> np.ndarray:
    s = space.scale
    out = np.array(b, dtype=float)
    for axis in range(out.ndim):
        shape = [1] * out.ndim
        shape[axis] = space.dim
        out = out * s.reshape(shape)
    return out


def ball_vertices(m: int, r: float, positive: bool = False) -> np.ndarray:
    """Extreme points of the unit l_r ball (r in {1, inf}), or of its positive part.

    The positive part of the l_1 ball also contains 0; it is omitted because a
    multilinear form with nonnegative data never peaks there uniquely.
    """
    if r == INF:
        vals = (1.0, 0.0) if positive else (1.0, -1.0)
        return np.array(list(itertools.product(vals, repeat=m)))
    if r == 1:
        eye = np.eye(m)
        if positive:
            return eye
        return np.stack([eye, -eye], axis=1).reshape(2 * m, m)
    raise IncompatibleMethodError(f"no finite vertex set for the l_{r:g} ball")


def _symmetric_candidates(m: int, r: float, positive: bool) -> np.ndarray:
    if r == INF:
        vals = (1.0, 0.0) if positive else (1.0, 0.0, -1.0)
        return np.array(list(itertools.product(vals, repeat=m)))
    return ball_vertices(m, r, positive)


def poly_rows(b: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``P(z)`` for every row ``z`` of ``Z`` (``b`` symmetric)."""
    N, m = Z.shape
    W = Z @ b.reshape(m, -1)
    for _ in range(b.ndim - 1):
        W = np.einsum("ni,nij->nj", Z, W.reshape(N, m, -1))
    return W.reshape(N)


def sphere_grid(m: int, r: float, k: int, positive: bool = False, cap: int = 20000) -> np.ndarray:
    """Angular grid on the unit l_r sphere, ``k`` angles per spherical coordinate.

    ``k`` is reduced when ``k**(m-1)`` would exceed ``cap``.
    """
    if m == 1:
        return np.array([[1.0]]) if positive else np.array([[1.0], [-1.0]])
    while k > 2 and k ** (m - 1) > cap:
        k -= 1
    if positive:
        axes = [np.linspace(0.0, math.pi / 2, k)] * (m - 1)
    else:
        axes = [np.linspace(0.0, math.pi, k)] * (m - 2) + [np.linspace(0.0, 2 * math.pi, k, endpoint=False)]
    ang = np.array(list(itertools.product(*axes)))
    pts = np.ones((ang.shape[0], m))
    sin_prod = np.ones(ang.shape[0])
    for j in range(m - 1):
        pts[:, j] = sin_prod * np.cos(ang[:, j])
        sin_prod = sin_prod * np.sin(ang[:, j])
    pts[:, m - 1] = sin_prod
    if positive:
        pts = np.abs(pts)
    norms = np.array([_lp(p, r) for p in pts])
    keep = norms > 1e-12
    pts = pts[keep] / norms[keep, None]
    return np.unique(np.round(pts, 15), axis=0)


def _lp(x, p):
    a = np.abs(x)
    if p == INF:
        return float(a.max())
    return float(np.sum(a**p) ** (1.0 / p))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _run(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda a: fn(*a), jobs))
    return [fn(*a) for a in jobs]


def _best(results: list) -> int:
    """Index of the largest value; earliest index wins ties."""
    best = 0
    for i, res in enumerate(results):
        if res[0] > results[best][0]:
            best = i
    return best


def _certs(zs, space: SequenceSpace) -> tuple[DualPoint, ...]:
    s = space.scale
    dual = space.dual()
    return tuple(DualPoint(np.asarray(z) * s, dual) for z in np.atleast_2d(zs))


def _resolve_multilinear(method: str, space: SequenceSpace, n: int) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method != "auto":
        return method
    r = space.conjugate
    if n == 1:
        return "enumerate"
    if n == 2 and space.exponent == 2:
        return "svd"
    if r in (1, INF) and _enum_count(space.dim, r, n) <= ENUM_GUARD:
        return "enumerate"
    return "grid"


def _enum_count(m: int, r: float, n: int) -> int:
    nv = 2**m if r == INF else 2 * m
    return nv ** (n - 1)


# ------------------------------------------------------- multilinear norms


def _multilinear(u: FullTensor, positive: bool, kind: str, method: str, config: NormConfig | None) -> NormEstimate:
    if isinstance(u, SymmetricTensor):
        u = u.to_full()
    config = config or NormConfig()
    space, n, m = u.space, u.order, u.dim
    r = space.conjugate
    bt = normalized_coeffs(u.coeffs, space)
    if positive:
        bt = np.abs(bt)
    method = _resolve_multilinear(method, space, n)

    if method == "svd":
        if n != 2 or space.exponent != 2:
            raise IncompatibleMethodError("svd needs an order-2 tensor over an l_2 space")
        U, S, Vt = np.linalg.svd(bt)
        zs = np.array([U[:, 0], Vt[0]])
        value = float(S[0])
        if positive:
            zs = _polish_positive(bt, np.abs(zs), value, config)
        return _finish(u, zs, value, "svd", "exact", kind, positive)

    if method == "enumerate":
        if n > 1 and r not in (1, INF):
            raise IncompatibleMethodError(
                f"enumerate needs dual exponent 1 or inf, got {r:g} (space {space})")
        if n > 1 and _enum_count(m, r, n) > ENUM_GUARD:
            raise IncompatibleMethodError(
                f"enumeration of {_enum_count(m, r, n)} vertex tuples exceeds the guard {ENUM_GUARD}")
        V = ball_vertices(m, r, positive) if n > 1 else np.zeros((1, m))
        value, zs = kernels.enumerate_multilinear(bt, V, r, positive)
        return _finish(u, zs, float(value), "enumerate", "exact", kind, positive)

    phase1 = _alternating_multistart(bt, r, positive, config, grid=False)
    if method == "alternating":
        value, zs, sweeps, converged, gap = phase1
        rigor = "lower_bound" if converged else "approx"
        return _finish(u, zs, value, "alternating", rigor, kind, positive, sweeps, config.starts,
                       None if converged else gap)
    phase2 = _alternating_multistart(bt, r, positive, config, grid=True)
    best = phase1 if phase1[0] >= phase2[0] else phase2
    return _finish(u, best[1], best[0], "grid", "approx", kind, positive, phase1[2] + phase2[2],
                   2 * config.starts, best[0] - phase2[0])


def _polish_positive(bt, zs, target, config):
    # abs() of singular vectors is optimal unless the top singular value is
    # repeated; a short positive ascent restores optimality in that case
    if kernels.contract(bt, zs) >= target * (1 - 1e-12):
        return zs
    _, z, _, _ = kernels.alternating_ascent(bt, zs, 2.0, True, config.tol, config.max_sweeps, config.stall_sweeps)
    return z


def _alternating_multistart(bt, r, positive, config: NormConfig, grid: bool):
    n, m = bt.ndim, bt.shape[0]
    S = config.starts
    starts = []
    for k in range(S):
        starts.append(sample_ball(_rng(config.seed, k + (S if grid else 0)), m, r, size=n, positive=positive))
    if grid:
        G = sphere_grid(m, r, config.grid_k, positive, config.grid_cap)
        W = G @ bt.reshape(m, -1)
        if n == 2:
            score = _row_dual_norms(W, r, positive)
        else:
            score = np.linalg.norm(W, axis=1)
        order = np.argsort(-score, kind="stable")[:S]
        for k, gi in enumerate(order):
            starts[k][0] = G[gi]
    elif r in (1, INF):
        _extreme_starts(starts, m, n, r, positive, config)
    jobs = [(bt, z0, r, positive, config.tol, config.max_sweeps, config.stall_sweeps) for z0 in starts]
    results = _run(kernels.alternating_ascent, jobs, config.workers)
    i = _best(results)
    value, zs, _, converged = results[i]
    sweeps = sum(res[2] for res in results)
    gap = None
    if not converged:
        more = kernels.alternating_ascent(bt, zs, r, positive, config.tol, 1, 1)
        gap = float(more[0] - value)
    return float(value), zs, sweeps, converged, gap


def _extreme_starts(starts, m, n, r, positive, config: NormConfig):
    """Overwrite up to half of ``starts`` with vertex starts.

    Factor 0 ranges over the vertices up to sign (negating two factors leaves
    the form unchanged) and factors 2..n-1, which the first block update
    reads, over all vertices.  Distinct tuples are drawn without replacement,
    so small vertex spaces are covered exhaustively.
    """
    full = ball_vertices(m, r, positive)
    V = full
    if not positive:
        V = full[: len(full) // 2] if r == INF else full[0::2]
    shape = (len(V),) + (len(full),) * (n - 2)
    total = math.prod(shape)
    n_ext = min(config.starts // 2, total)
    rng = _rng(config.seed, 2**31)
    if total <= n_ext:
        picks = np.arange(total)
    elif total <= 10**6:
        picks = np.sort(rng.choice(total, n_ext, replace=False))
    else:
        picks = rng.integers(total, size=n_ext)
    for k, flat in enumerate(picks):
        tup = np.unravel_index(int(flat), shape)
        starts[k][0] = V[tup[0]]
        for j in range(2, n):
            starts[k][j] = full[tup[j - 1]]


def _row_dual_norms(W, r, positive):
    D = np.maximum(W, 0.0) if positive else np.abs(W)
    if r == INF:
        return D.sum(axis=1)
    if r == 1:
        return D.max(axis=1)
    rc = r / (r - 1.0)
    return np.sum(D**rc, axis=1) ** (1.0 / rc)


def _finish(u, zs, value, method, rigor, kind, positive, iterations=0, starts=0, gap=None, symmetric=False):
    certs = _certs(zs, u.space)
    if symmetric:
        target = modulus(u) if positive else u
        check = evaluate_polynomial(target, certs[0])
    else:
        target = modulus(u) if positive else u
        check = evaluate_multilinear(target, *certs)
    value = abs(float(value))
    return NormEstimate(value, certs, method, rigor, kind, int(iterations), int(starts), gap,
                        meta={"certificate_value": abs(check)})


def injective_norm(u: FullTensor, method: str = "auto", config: NormConfig | None = None) -> NormEstimate:
    """Supremum of ``|T_u|`` over the product of dual unit balls."""
    return _multilinear(u, False, "eps", method, config)


def positive_injective_norm(u: FullTensor, method: str = "auto", config: NormConfig | None = None) -> NormEstimate:
    """Regular-norm variant: the injective norm of ``modulus(u)`` over positive dual balls.

    For a positive tensor this is the supremum over the positive parts of the
    dual balls.  For a general tensor the coefficientwise modulus realizes the
    modulus of the associated multilinear form, since the order is
    coordinatewise; :func:`regular_modulus_oracle` checks that numerically.
    Certificates evaluate ``modulus(u)``.
    """
    return _multilinear(u, True, "pos-eps", method, config)


# --------------------------------------------------------- symmetric norms


def _as_symmetric(u) -> SymmetricTensor:
    if isinstance(u, SymmetricTensor):
        return u
    if isinstance(u, FullTensor) and u.is_symmetric:
        return SymmetricTensor.from_array(u.space, u.coeffs)
    raise ValueError("symmetric norms need a symmetric tensor; symmetrize it first")


def symmetric_enumerate_is_exact(u: SymmetricTensor, positive: bool) -> bool:
    """Whether the finite candidate set provably contains a maximizer of |P|.

    Dual l_inf ball: candidates {-1, 0, 1}^m; exact for diagonal tensors
    (separable, each term peaks at -1, 0 or 1) and for nonnegative tensors
    (``|P(z)| <= P(|z|) <= P(1, ..., 1)``).  Dual l_1 ball: candidates +-e_i;
    exact for diagonal tensors.
    """
    r = u.space.conjugate
    nonneg = positive or all(v >= 0 for v in u.coeffs.values())
    if r == INF:
        return u.is_diagonal or nonneg
    if r == 1:
        return u.is_diagonal
    return False


def _symmetric(u, positive: bool, kind: str, method: str, config: NormConfig | None) -> NormEstimate:
    u = _as_symmetric(u)
    config = config or NormConfig()
    space, n, m = u.space, u.order, u.dim
    r = space.conjugate
    bt = normalized_coeffs(u.full, space)
    if positive:
        bt = np.abs(bt)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "auto":
        if n == 1:
            method = "enumerate"
        elif n == 2 and space.exponent == 2:
            method = "svd"
        elif symmetric_enumerate_is_exact(u, positive) and 3**m <= ENUM_GUARD:
            method = "enumerate"
        else:
            method = "grid"

    if n == 1 and method in ("enumerate", "svd"):
        value, z = kernels.linear_max(bt, r, positive)
        return _finish(u, z[None], value, "enumerate", "exact", kind, positive, symmetric=True)

    if method == "svd":
        if n != 2 or space.exponent != 2:
            raise IncompatibleMethodError("svd needs an order-2 tensor over an l_2 space")
        w, Q = np.linalg.eigh(bt)
        k = int(np.argmax(w)) if positive else int(np.argmax(np.abs(w)))
        value = float(w[k]) if positive else float(abs(w[k]))
        z = Q[:, k]
        if positive:
            z = np.abs(z)
            if kernels.poly(bt, z) < value * (1 - 1e-12):
                z = kernels.sym_ascent(bt, z, 2.0, True, 1.0, config.tol, config.max_sweeps, config.stall_sweeps)[1]
        return _finish(u, z[None], value, "svd", "exact", kind, positive, symmetric=True)

    if method == "enumerate":
        if not symmetric_enumerate_is_exact(u, positive):
            raise IncompatibleMethodError(
                "symmetric enumeration is exact only for diagonal tensors (dual exponent 1 or inf) "
                "or nonnegative tensors (dual exponent inf)")
        C = _symmetric_candidates(m, r, positive)
        vals = poly_rows(bt, C)
        score = vals if positive else np.abs(vals)
        k = int(np.argmax(score))
        return _finish(u, C[k][None], float(score[k]), "enumerate", "exact", kind, positive, symmetric=True)

    phase1 = _sym_multistart(bt, r, positive, config, grid=False)
    if method == "alternating":
        value, z, iters, converged, gap = phase1
        rigor = "lower_bound" if converged else "approx"
        return _finish(u, z[None], value, "alternating", rigor, kind, positive, iters, config.starts,
                       None if converged else gap, symmetric=True)
    phase2 = _sym_multistart(bt, r, positive, config, grid=True)
    best = phase1 if phase1[0] >= phase2[0] else phase2
    return _finish(u, best[1][None], best[0], "grid", "approx", kind, positive, phase1[2] + phase2[2],
                   2 * config.starts, best[0] - phase2[0], symmetric=True)


def _sym_multistart(bt, r, positive, config: NormConfig, grid: bool):
    n, m = bt.ndim, bt.shape[0]
    S = config.starts
    signs = (1.0,) if (positive or n % 2 == 1) else (1.0, -1.0)
    jobs = []
    if grid:
        G = sphere_grid(m, r, config.grid_k, positive, config.grid_cap)
        vals = poly_rows(bt, G)
        for sg in signs:
            for gi in np.argsort(-sg * vals, kind="stable")[:S]:
                jobs.append((bt, G[gi], r, positive, sg, config.tol, config.max_sweeps, config.stall_sweeps))
    else:
        starts = [sample_ball(_rng(config.seed, k), m, r, positive=positive) for k in range(S)]
        if r in (1, INF):
            V = ball_vertices(m, r, positive)
            n_ext = min(len(V), S // 2)
            if len(V) > n_ext:
                V = V[np.sort(_rng(config.seed, 2**31).choice(len(V), n_ext, replace=False))]
            for k in range(n_ext):
                starts[k] = V[k]
        for z0 in starts:
            for sg in signs:
                jobs.append((bt, z0, r, positive, sg, config.tol, config.max_sweeps, config.stall_sweeps))
    results = _run(kernels.sym_ascent, jobs, config.workers)
    i = _best(results)
    value, z, _, converged = results[i]
    iters = sum(res[2] for res in results)
    gap = None
    if not converged:
        sg = jobs[i][4]
        more = kernels.sym_ascent(bt, z, r, positive, sg, config.tol, 1, 1)
        gap = float(more[0] - value)
    return float(value), z, iters, converged, gap


def sym_injective_norm(u: SymmetricTensor, method: str = "auto", config: NormConfig | None = None) -> NormEstimate:
    """Supremum of ``|P_u|`` over the dual unit ball."""
    return _symmetric(u, False, "s-eps", method, config)


def positive_sym_injective_norm(u: SymmetricTensor, method: str = "auto",
                                config: NormConfig | None = None) -> NormEstimate:
    """Supremum of ``P_{modulus(u)}`` over the positive part of the dual unit ball."""
    return _symmetric(u, True, "pos-s-eps", method, config)


def compute_norm(u, kind: str, method: str = "auto", config: NormConfig | None = None) -> NormEstimate:
    """Dispatch on the norm name used by the command line: eps, s-eps, pos-eps, pos-s-eps."""
    engines = {
        "eps": injective_norm,
        "s-eps": sym_injective_norm,
        "pos-eps": positive_injective_norm,
        "pos-s-eps": positive_sym_injective_norm,
    }
    if kind not in engines:
        raise ValueError(f"unknown norm {kind!r}; choose from {NORM_KINDS}")
    return engines[kind](u, method, config)


# ------------------------------------------------------------------ oracle


def regular_modulus_oracle(u: FullTensor, duals, grid_k: int = 2, budget: int = ORACLE_BUDGET) -> float:
    """Brute-force ``sup |T_u(y*_1, ..., y*_n)|`` over grids on the boxes ``|y*_j| <= x*_j``.

    Each coordinate interval ``[-x*_j[i], x*_j[i]]`` is sampled at ``grid_k``
    evenly spaced points, corners included.  For a correct modulus the result
    equals ``T_{modulus(u)}(x*_1, ..., x*_n)``.
    """
    if isinstance(u, SymmetricTensor):
        u = u.to_full()
    n, m = u.order, u.dim
    xs = np.array([np.asarray(getattr(d, "coords", d), dtype=float) for d in duals])
    if xs.shape != (n, m):
        raise ValueError(f"expected {n} functionals of length {m}")
    if np.any(xs < 0):
        raise ValueError("box radii must be positive functionals")
    if grid_k < 2:
        raise ValueError("grid_k must be at least 2 so that corners are included")
    if grid_k ** (m * n) > budget:
        raise ValueError(f"grid of {grid_k}^{m * n} points exceeds the budget {budget}")
    unit = np.array(list(itertools.product(np.linspace(-1.0, 1.0, grid_k), repeat=m)))
    grids = [unit * x for x in xs]
    N = unit.shape[0]
    rest = N ** (n - 1)
    chunk = max(1, 10**6 // max(rest, 1))
    best = 0.0
    for start in range(0, N, chunk):
        W = np.tensordot(grids[0][start:start + chunk], u.coeffs, axes=([1], [0]))
        for j in range(1, n):
            # axis j is the next coefficient axis; new grid axis goes last
            W = np.moveaxis(np.tensordot(W, grids[j], axes=([j], [1])), -1, j)
        best = max(best, float(np.max(np.abs(W))))
    return best
