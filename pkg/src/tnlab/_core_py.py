"""Pure-numpy kernels; reference semantics for the compiled ``_core`` module.

All routines work on *normalized* tensors: the dual ball is the unweighted
unit l_r ball in every argument.  Arguments ``zs`` are ``(n, m)`` arrays.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

INF = math.inf
_MAX_HALVINGS = 60
_CHUNK = 1 << 20


def _lp(x: np.ndarray, p: float) -> float:
    x = np.abs(x)
    if p == INF:
        return float(x.max()) if x.size else 0.0
    top = float(x.max()) if x.size else 0.0
    if top == 0.0:
        return 0.0
    return top * float(np.sum((x / top) ** p)) ** (1.0 / p)


def contract(b: np.ndarray, zs: np.ndarray) -> float:
    n = b.ndim
    ops = [b, list(range(n))]
    for j in range(n):
        ops += [zs[j], [j]]
    return float(np.einsum(*ops, []))


def partial_contract(b: np.ndarray, zs: np.ndarray, skip: int) -> np.ndarray:
    n = b.ndim
    ops = [b, list(range(n))]
    for j in range(n):
        if j != skip:
            ops += [zs[j], [j]]
    return np.einsum(*ops, [skip])


def linear_max(g: np.ndarray, r: float, positive: bool) -> tuple[float, np.ndarray]:
    """Maximize <g, z> over the unit l_r ball (positive part if requested)."""
    m = g.size
    z = np.zeros(m)
    if r == INF:
        if positive:
            z[g >= 0] = 1.0
            return float(np.sum(np.maximum(g, 0.0))), z
        z = np.where(g >= 0, 1.0, -1.0)
        return float(np.sum(np.abs(g))), z
    d = np.maximum(g, 0.0) if positive else g
    if r == 1.0:
        j = int(np.argmax(np.abs(d)))
        if positive and d[j] <= 0:
            return 0.0, z
        z[j] = 1.0 if d[j] >= 0 else -1.0
        return float(abs(d[j])), z
    rc = r / (r - 1.0)
    val = _lp(d, rc)
    if val == 0.0:
        return 0.0, z
    z = np.sign(d) * (np.abs(d) / val) ** (rc - 1.0)
    return val, z


def _dual_norm_rows(G: np.ndarray, r: float, positive: bool) -> np.ndarray:
    D = np.maximum(G, 0.0) if positive else np.abs(G)
    if r == INF:
        return D.sum(axis=1)
    if r == 1.0:
        return D.max(axis=1)
    rc = r / (r - 1.0)
    top = D.max(axis=1)
    safe = np.where(top > 0, top, 1.0)
    return top * np.sum((D / safe[:, None]) ** rc, axis=1) ** (1.0 / rc)


def alternating_ascent(b, z0, r, positive, tol, max_sweeps, stall):
    """Block-coordinate ascent; each block update is a closed-form ``linear_max``.

    Factors are updated in the order 1, ..., n-1, 0 so that a start whose
    first factor is an extreme point is exploited before being overwritten.
    Returns ``(value, zs, sweeps, converged)``.
    """
    b = np.asarray(b, dtype=float)
    n = b.ndim
    z = np.array(z0, dtype=float)
    value = contract(b, z)
    prev = value
    stalls = 0
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        for jj in range(n):
            j = (jj + 1) % n
            g = partial_contract(b, z, j)
            value, z[j] = linear_max(g, r, positive)
        if value - prev < tol * max(1.0, abs(value)):
            stalls += 1
            if stalls >= stall:
                converged = True
                break
        else:
            stalls = 0
        prev = value
    return value, z, sweeps, converged


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - 1.0) / k > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project(z: np.ndarray, r: float, positive: bool) -> np.ndarray:
    """Map ``z`` into the unit l_r ball (Euclidean projection for r in {1, 2, inf})."""
    z = np.maximum(z, 0.0) if positive else np.array(z, dtype=float)
    if r == INF:
        return np.clip(z, -1.0, 1.0)
    if r == 1.0:
        a = np.abs(z)
        if a.sum() <= 1.0:
            return z
        return np.sign(z) * _project_simplex(a)
    nz = _lp(z, r)
    return z / nz if nz > 1.0 else z


def poly(b: np.ndarray, z: np.ndarray) -> float:
    return contract(b, np.tile(z, (b.ndim, 1)))


def sym_ascent(b, z0, r, positive, sign, tol, max_iter, stall):
    """Projected-gradient ascent of ``sign * P(z)`` over the unit l_r ball.

    ``b`` must be a symmetric array.  Each iteration tries the linearization
    maximizer ``linear_max(grad)`` and a backtracked projected-gradient step,
    and moves only on strict improvement.  Returns
    ``(value, z, iterations, converged)`` where value is ``sign * P(z)``.
    """
    b = np.asarray(b, dtype=float)
    n = b.ndim
    z = project(np.asarray(z0, dtype=float), r, positive)
    f = sign * poly(b, z)
    eta = 1.0
    stalls = 0
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        g = sign * n * partial_contract(b, np.tile(z, (n, 1)), 0)
        best_z, best_f = z, f
        _, zp = linear_max(g, r, positive)
        fp = sign * poly(b, zp)
        if fp > best_f:
            best_z, best_f = zp, fp
        # halve from eta while the value keeps improving; keep the best step
        step, line_f, line_z, line_step = eta, f, None, 0.0
        for _ in range(_MAX_HALVINGS):
            zg = project(z + step * g, r, positive)
            fg = sign * poly(b, zg)
            if fg > line_f:
                line_f, line_z, line_step = fg, zg, step
            elif line_z is not None:
                break
            step *= 0.5
        if line_z is not None:
            eta = min(line_step * 2.0, 1e8)
            if line_f > best_f:
                best_z, best_f = line_z, line_f
        improvement = best_f - f
        z, f = best_z, best_f
        if improvement < tol * max(1.0, abs(f)):
            stalls += 1
            if stalls >= stall:
                converged = True
                break
        else:
            stalls = 0
    return f, z, it, converged


def enumerate_multilinear(b, vertices, r, positive):
    """Exact max of ``T`` over products of polytopes with the given vertices.

    Factors 0..n-2 range over ``vertices`` (odometer order, last fastest); the
    last factor is solved in closed form.  Returns ``(value, zs)``; the first
    maximizer in enumeration order wins ties.
    """
    b = np.asarray(b, dtype=float)
    V = np.asarray(vertices, dtype=float)
    n, m = b.ndim, b.shape[0]
    if n == 1:
        value, z = linear_max(b, r, positive)
        return value, z[None, :]
    nv = V.shape[0]
    per_first = nv ** (n - 2) * m
    chunk = max(1, _CHUNK // max(per_first, 1))
    best_val, best_flat = -np.inf, 0
    for start in range(0, nv, chunk):
        # axes (v0, i1, ..., i_{n-1}); contract i_t for t = 1..n-2 keeping vertex axes in factor order
        W = np.tensordot(V[start:start + chunk], b, axes=([1], [0]))
        for t in range(1, n - 1):
            W = np.moveaxis(np.tensordot(W, V, axes=([t], [1])), -1, t)
        vals = _dual_norm_rows(W.reshape(-1, m), r, positive)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_flat = float(vals[k]), start * nv ** (n - 2) + k
    tup = np.unravel_index(best_flat, (nv,) * (n - 1))
    zs = np.zeros((n, m))
    for j, t in enumerate(tup):
        zs[j] = V[t]
    g = partial_contract(b, zs, n - 1)
    value, zs[n - 1] = linear_max(g, r, positive)
    return value, zs

