# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same signatures and semantics as ``tnlab._core_py``.

The inner loops run without the GIL so multi-start drivers can fan out over
threads.
"""
import numpy as np

from libc.math cimport fabs, pow, isinf, fmax, fmin

BACKEND = "cython"

cdef enum:
    MAXN = 16
    MAX_HALVINGS = 60


cdef double _contract(const double* b, int m, int n, const double* z, int skip,
                      double* out) noexcept nogil:
    """Full contraction (skip < 0) or all-but-``skip`` contraction into ``out``."""
    cdef int idx[MAXN]
    cdef Py_ssize_t f, total = 1
    cdef int j
    cdef double prod, acc = 0.0
    for j in range(n):
        idx[j] = 0
        total *= m
    if skip >= 0:
        for j in range(m):
            out[j] = 0.0
    for f in range(total):
        prod = b[f]
        if prod != 0.0:
            for j in range(n):
                if j != skip:
                    prod *= z[j * m + idx[j]]
            if skip >= 0:
                out[idx[skip]] += prod
            else:
                acc += prod
        j = n - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < m:
                break
            idx[j] = 0
            j -= 1
    return acc


cdef double _lp(const double* x, int m, double p) noexcept nogil:
    cdef int i
    cdef double top = 0.0, s = 0.0
    for i in range(m):
        top = fmax(top, fabs(x[i]))
    if isinf(p) or top == 0.0:
        return top
    for i in range(m):
        s += pow(fabs(x[i]) / top, p)
    return top * pow(s, 1.0 / p)


cdef double _linmax(const double* g, int m, double r, bint positive, double* z,
                    double* work) noexcept nogil:
    cdef int i, j
    cdef double val = 0.0, best, v, rc
    if isinf(r):
        for i in range(m):
            if g[i] >= 0:
                z[i] = 1.0
                val += g[i]
            elif positive:
                z[i] = 0.0
            else:
                z[i] = -1.0
                val -= g[i]
        return val
    for i in range(m):
        work[i] = g[i] if (not positive or g[i] > 0) else 0.0
        z[i] = 0.0
    if r == 1.0:
        j = 0
        best = -1.0
        for i in range(m):
            v = fabs(work[i])
            if v > best:
                best = v
                j = i
        if positive and work[j] <= 0:
            return 0.0
        z[j] = 1.0 if work[j] >= 0 else -1.0
        return best
    rc = r / (r - 1.0)
    val = _lp(work, m, rc)
    if val == 0.0:
        return 0.0
    for i in range(m):
        v = pow(fabs(work[i]) / val, rc - 1.0)
        z[i] = v if work[i] > 0 else (-v if work[i] < 0 else 0.0)
    return val


cdef void _project_simplex(double* v, int m, double* work) noexcept nogil:
    # work: sorted copy (descending) by insertion sort; m is small
    cdef int i, k, rho = 0
    cdef double t, css = 0.0, css_rho = 0.0
    for i in range(m):
        t = v[i]
        k = i
        while k > 0 and work[k - 1] < t:
            work[k] = work[k - 1]
            k -= 1
        work[k] = t
    for i in range(m):
        css += work[i]
        if work[i] - (css - 1.0) / (i + 1.0) > 0:
            rho = i
            css_rho = css
    t = (css_rho - 1.0) / (rho + 1.0)
    for i in range(m):
        v[i] = fmax(v[i] - t, 0.0)


cdef void _project(double* z, int m, double r, bint positive, double* work,
                   double* work2) noexcept nogil:
    cdef int i
    cdef double s = 0.0, nz
    if positive:
        for i in range(m):
            if z[i] < 0:
                z[i] = 0.0
    if isinf(r):
        for i in range(m):
            z[i] = fmin(fmax(z[i], -1.0), 1.0)
        return
    if r == 1.0:
        for i in range(m):
            s += fabs(z[i])
        if s <= 1.0:
            return
        for i in range(m):
            work[i] = fabs(z[i])
        _project_simplex(work, m, work2)
        for i in range(m):
            z[i] = work[i] if z[i] > 0 else (-work[i] if z[i] < 0 else 0.0)
        return
    nz = _lp(z, m, r)
    if nz > 1.0:
        for i in range(m):
            z[i] = z[i] / nz


cdef double _poly(const double* b, int m, int n, const double* z, double* rows) noexcept nogil:
    cdef int i, j
    for j in range(n):
        for i in range(m):
            rows[j * m + i] = z[i]
    return _contract(b, m, n, rows, -1, NULL)


def _prep(b):
    a = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim > MAXN:
        raise ValueError(f"order {a.ndim} exceeds the compiled limit {MAXN}")
    return a, a.shape[0], a.ndim


def contract(b, zs):
    a, m, n = _prep(b)
    z = np.ascontiguousarray(zs, dtype=np.float64)
    cdef const double[::1] bv = a.ravel()
    cdef const double[:, ::1] zv = z
    return _contract(&bv[0], m, n, &zv[0, 0], -1, NULL)


def partial_contract(b, zs, int skip):
    a, m, n = _prep(b)
    z = np.ascontiguousarray(zs, dtype=np.float64)
    out = np.empty(m)
    cdef const double[::1] bv = a.ravel()
    cdef const double[:, ::1] zv = z
    cdef double[::1] ov = out
    _contract(&bv[0], m, n, &zv[0, 0], skip, &ov[0])
    return out


def linear_max(g, double r, bint positive):
    gg = np.ascontiguousarray(g, dtype=np.float64)
    m = gg.shape[0]
    z = np.empty(m)
    work = np.empty(m)
    cdef const double[::1] gv = gg
    cdef double[::1] zv = z, wv = work
    val = _linmax(&gv[0], m, r, positive, &zv[0], &wv[0])
    return val, z


def project(z, double r, bint positive):
    out = np.array(z, dtype=np.float64, order="C", copy=True)
    m = out.shape[0]
    w1 = np.empty(m)
    w2 = np.empty(m)
    cdef double[::1] ov = out, a = w1, c = w2
    _project(&ov[0], m, r, positive, &a[0], &c[0])
    return out


def poly(b, z):
    a, m, n = _prep(b)
    zz = np.ascontiguousarray(z, dtype=np.float64)
    rows = np.empty(n * m)
    cdef const double[::1] bv = a.ravel(), zv = zz
    cdef double[::1] rv = rows
    return _poly(&bv[0], m, n, &zv[0], &rv[0])


def alternating_ascent(b, z0, double r, bint positive, double tol, int max_sweeps, int stall):
    a, m_, n_ = _prep(b)
    cdef int m = m_, n = n_
    z = np.array(z0, dtype=np.float64, order="C", copy=True)
    g = np.empty(m)
    work = np.empty(m)
    cdef const double[::1] bv = a.ravel()
    cdef double[::1] gv = g, wv = work
    cdef double[:, ::1] zv = z
    cdef double value, prev
    cdef int stalls = 0, sweeps = 0, jj, j
    cdef bint converged = False
    with nogil:
        value = _contract(&bv[0], m, n, &zv[0, 0], -1, NULL)
        prev = value
        while sweeps < max_sweeps:
            sweeps += 1
            for jj in range(n):
                j = (jj + 1) % n
                _contract(&bv[0], m, n, &zv[0, 0], j, &gv[0])
                value = _linmax(&gv[0], m, r, positive, &zv[j, 0], &wv[0])
            if value - prev < tol * fmax(1.0, fabs(value)):
                stalls += 1
                if stalls >= stall:
                    converged = True
                    break
            else:
                stalls = 0
            prev = value
    return value, z, sweeps, bool(converged)


def sym_ascent(b, z0, double r, bint positive, double sign, double tol, int max_iter, int stall):
    a, m_, n_ = _prep(b)
    cdef int m = m_, n = n_
    z = np.array(z0, dtype=np.float64, order="C", copy=True)
    bufs = np.empty((8, m))
    rows = np.empty(n * m)
    cdef const double[::1] bv = a.ravel()
    cdef double[::1] zv = z, rv = rows
    cdef double[:, ::1] B = bufs
    cdef double* g = &B[0, 0]
    cdef double* zp = &B[1, 0]
    cdef double* zg = &B[2, 0]
    cdef double* best = &B[3, 0]
    cdef double* w1 = &B[4, 0]
    cdef double* w2 = &B[5, 0]
    cdef double* zt = &B[6, 0]
    cdef double* zl = &B[7, 0]
    cdef double f, fp, fg, best_f, eta = 1.0, step, improvement, line_f, line_step
    cdef int it = 0, stalls = 0, h, i
    cdef bint converged = False
    with nogil:
        _project(&zv[0], m, r, positive, w1, w2)
        f = sign * _poly(&bv[0], m, n, &zv[0], &rv[0])
        while it < max_iter:
            it += 1
            for i in range(m):
                zt[i] = zv[i]
            for h in range(n):
                for i in range(m):
                    rv[h * m + i] = zt[i]
            _contract(&bv[0], m, n, &rv[0], 0, g)
            for i in range(m):
                g[i] = sign * n * g[i]
                best[i] = zv[i]
            best_f = f
            _linmax(g, m, r, positive, zp, w1)
            fp = sign * _poly(&bv[0], m, n, zp, &rv[0])
            if fp > best_f:
                best_f = fp
                for i in range(m):
                    best[i] = zp[i]
            # halve from eta while the value keeps improving; keep the best step
            step = eta
            line_f = f
            line_step = 0.0
            for h in range(MAX_HALVINGS):
                for i in range(m):
                    zg[i] = zv[i] + step * g[i]
                _project(zg, m, r, positive, w1, w2)
                fg = sign * _poly(&bv[0], m, n, zg, &rv[0])
                if fg > line_f:
                    line_f = fg
                    line_step = step
                    for i in range(m):
                        zl[i] = zg[i]
                elif line_step > 0.0:
                    break
                step *= 0.5
            if line_step > 0.0:
                eta = fmin(line_step * 2.0, 1e8)
                if line_f > best_f:
                    best_f = line_f
                    for i in range(m):
                        best[i] = zl[i]
            improvement = best_f - f
            for i in range(m):
                zv[i] = best[i]
            f = best_f
            if improvement < tol * fmax(1.0, fabs(f)):
                stalls += 1
                if stalls >= stall:
                    converged = True
                    break
            else:
                stalls = 0
    return f, z, it, bool(converged)


cdef void _fold(const double* w, Py_ssize_t size, int m, const double* v, double* out) noexcept nogil:
    """Contract the leading axis of ``w`` (``size = m * rest``) with ``v``."""
    cdef Py_ssize_t rest = size // m, t
    cdef int i
    cdef double c
    for t in range(rest):
        out[t] = 0.0
    for i in range(m):
        c = v[i]
        if c != 0.0:
            for t in range(rest):
                out[t] += c * w[i * rest + t]


def enumerate_multilinear(b, vertices, double r, bint positive):
    a, m_, n_ = _prep(b)
    cdef int m = m_, n = n_
    V = np.ascontiguousarray(vertices, dtype=np.float64)
    if n == 1:
        return _single(a, r, positive)
    cdef int nv = V.shape[0]
    cdef int j, i, k = n - 1, changed
    # level t holds b contracted with the current vertices of factors 0..t-1
    cdef Py_ssize_t sizes[MAXN]
    cdef Py_ssize_t offs[MAXN]
    cdef Py_ssize_t total = 0
    for j in range(n):
        sizes[j] = m ** (n - j)
        offs[j] = total
        total += sizes[j]
    levels = np.empty(total)
    levels[:sizes[0]] = a.ravel()
    zs = np.zeros((n, m))
    zt = np.empty(m)
    work = np.empty(m)
    cdef double[::1] lv = levels, tv = zt, wv = work
    cdef const double[:, ::1] Vv = V
    cdef double[:, ::1] zv = zs
    cdef int tup[MAXN]
    cdef int best_tup[MAXN]
    cdef double val, best_val = -1.0
    cdef bint first = True
    with nogil:
        for j in range(k):
            tup[j] = 0
            best_tup[j] = 0
        changed = 0
        while True:
            for j in range(changed, k):
                _fold(&lv[offs[j]], sizes[j], m, &Vv[tup[j], 0], &lv[offs[j + 1]])
            val = _linmax(&lv[offs[k]], m, r, positive, &tv[0], &wv[0])
            if first or val > best_val:
                first = False
                best_val = val
                for j in range(k):
                    best_tup[j] = tup[j]
            j = k - 1
            while j >= 0:
                tup[j] += 1
                if tup[j] < nv:
                    break
                tup[j] = 0
                j -= 1
            if j < 0:
                break
            changed = j
        for j in range(k):
            for i in range(m):
                zv[j, i] = Vv[best_tup[j], i]
        _contract(&lv[0], m, n, &zv[0, 0], k, &wv[0])
        val = _linmax(&wv[0], m, r, positive, &zv[k, 0], &tv[0])
    return val, zs


def _single(a, double r, bint positive):
    val, z = linear_max(a, r, positive)
    return val, z[None, :]
