# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for extragradient, SPEG and optimistic GDA.

Signatures and semantics mirror :mod:`pbssp._fallback`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, INFINITY
from libc.stdlib cimport qsort

cnp.import_array()

cdef enum:
    EUCLID = 0
    ENTROPIC = 1

cdef enum:
    BOX = 1
    SIMPLEX = 2


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<double*>a)[0]
    cdef double y = (<double*>b)[0]
    if x < y:
        return 1
    if x > y:
        return -1
    return 0


cdef void _proj_simplex(double[::1] v, double[::1] work) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0], i
    cdef double css = 0.0, theta = 0.0, top = v[0]
    for i in range(1, n):
        if v[i] > top:
            top = v[i]
    for i in range(n):
        v[i] -= top
        work[i] = v[i]
    qsort(&work[0], n, sizeof(double), _cmp_desc)
    for i in range(n):
        css += work[i]
        if work[i] - (css - 1.0) / (i + 1) > 0:
            theta = (css - 1.0) / (i + 1)
    for i in range(n):
        v[i] = v[i] - theta if v[i] > theta else 0.0


cdef void _step(int geom, int dom, double[::1] z, double[::1] lz, double[::1] g, double eta,
                double wq, double[::1] s, double W, double[::1] l,
                double[::1] lo, double[::1] hi,
                double[::1] out, double[::1] lout, double[::1] work) noexcept nogil:
    cdef Py_ssize_t n = z.shape[0], i
    cdef double m, acc, den
    if geom == ENTROPIC:
        den = 1.0 + eta * W
        m = -INFINITY
        for i in range(n):
            lout[i] = (lz[i] - eta * g[i] + eta * l[i]) / den
            if lout[i] > m:
                m = lout[i]
        acc = 0.0
        for i in range(n):
            acc += exp(lout[i] - m)
        acc = m + log(acc)
        for i in range(n):
            lout[i] -= acc
            out[i] = exp(lout[i])
        return
    den = 1.0 + eta * wq
    for i in range(n):
        out[i] = (z[i] - eta * g[i] + eta * s[i]) / den
    if dom == BOX:
        for i in range(n):
            if out[i] < lo[i]:
                out[i] = lo[i]
            elif out[i] > hi[i]:
                out[i] = hi[i]
    elif dom == SIMPLEX:
        _proj_simplex(out, work)


cdef void _operator(double[:, ::1] Q, double[:, ::1] R, double[:, ::1] B,
                    double[::1] a, double[::1] b, double[::1] x, double[::1] y,
                    double[::1] gx, double[::1] gy) noexcept nogil:
    cdef Py_ssize_t dx = B.shape[0], dy = B.shape[1], i, j
    cdef double acc, xi
    for i in range(dx):
        acc = a[i]
        for j in range(dy):
            acc += B[i, j] * y[j]
        gx[i] = acc
    for j in range(dy):
        gy[j] = -b[j]
    for i in range(dx):
        xi = x[i]
        for j in range(dy):
            gy[j] -= B[i, j] * xi
    if Q.shape[0]:
        for i in range(dx):
            acc = 0.0
            for j in range(dx):
                acc += Q[i, j] * x[j]
            gx[i] += acc
    if R.shape[0]:
        for i in range(dy):
            acc = 0.0
            for j in range(dy):
                acc += R[i, j] * y[j]
            gy[i] += acc


cdef void _init_log(int geom, double[::1] z, double[::1] lz) noexcept nogil:
    cdef Py_ssize_t i
    if geom == ENTROPIC:
        for i in range(z.shape[0]):
            lz[i] = log(z[i]) if z[i] > 1e-300 else log(1e-300)


def eg_solve(Q, R, B, a, b,
             int xgeom, int xdom, xlo, xhi, double xwq, xs, double xW, xl,
             int ygeom, int ydom, ylo, yhi, double ywq, ys, double yW, yl,
             x0, y0, double eta, double tol, long max_iters):
    cdef double[:, ::1] Qv = np.ascontiguousarray(Q, dtype=np.float64)
    cdef double[:, ::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    cdef double[:, ::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t dx = Bv.shape[0], dy = Bv.shape[1], i
    cdef double[::1] xlov = np.ascontiguousarray(xlo, dtype=np.float64)
    cdef double[::1] xhiv = np.ascontiguousarray(xhi, dtype=np.float64)
    cdef double[::1] ylov = np.ascontiguousarray(ylo, dtype=np.float64)
    cdef double[::1] yhiv = np.ascontiguousarray(yhi, dtype=np.float64)
    cdef double[::1] xsv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] ysv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] xlv = np.ascontiguousarray(xl, dtype=np.float64)
    cdef double[::1] ylv = np.ascontiguousarray(yl, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64)
    y_arr = np.array(y0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef double[::1] lx = np.zeros(dx)
    cdef double[::1] ly = np.zeros(dy)
    cdef double[::1] xh = np.zeros(dx)
    cdef double[::1] yh = np.zeros(dy)
    cdef double[::1] lxh = np.zeros(dx)
    cdef double[::1] lyh = np.zeros(dy)
    cdef double[::1] gx = np.zeros(dx)
    cdef double[::1] gy = np.zeros(dy)
    cdef double[::1] wx = np.zeros(dx)
    cdef double[::1] wy = np.zeros(dy)
    cdef double[::1] xn = np.zeros(dx)
    cdef double[::1] yn = np.zeros(dy)
    cdef double[::1] lxn = np.zeros(dx)
    cdef double[::1] lyn = np.zeros(dy)
    cdef double res = INFINITY, acc, d
    cdef long it
    cdef bint done = False
    with nogil:
        _init_log(xgeom, x, lx)
        _init_log(ygeom, y, ly)
        it = 0
        while it < max_iters:
            _operator(Qv, Rv, Bv, av, bv, x, y, gx, gy)
            _step(xgeom, xdom, x, lx, gx, eta, xwq, xsv, xW, xlv, xlov, xhiv, xh, lxh, wx)
            _step(ygeom, ydom, y, ly, gy, eta, ywq, ysv, yW, ylv, ylov, yhiv, yh, lyh, wy)
            acc = 0.0
            for i in range(dx):
                d = x[i] - xh[i]
                acc += d * d
            for i in range(dy):
                d = y[i] - yh[i]
                acc += d * d
            res = sqrt(acc) / eta
            if res <= tol:
                done = True
                break
            _operator(Qv, Rv, Bv, av, bv, xh, yh, gx, gy)
            _step(xgeom, xdom, x, lx, gx, eta, xwq, xsv, xW, xlv, xlov, xhiv, xn, lxn, wx)
            _step(ygeom, ydom, y, ly, gy, eta, ywq, ysv, yW, ylv, ylov, yhiv, yn, lyn, wy)
            for i in range(dx):
                x[i] = xn[i]
                if xgeom == ENTROPIC:
                    lx[i] = lxn[i]
            for i in range(dy):
                y[i] = yn[i]
                if ygeom == ENTROPIC:
                    ly[i] = lyn[i]
            it += 1
    return x_arr, y_arr, it, res, done


def speg_run(B1, B2, x0, y0, double xW, xl, double yW, yl, double eta, sum_x, sum_y):
    cdef double[:, :, ::1] B1v = np.ascontiguousarray(B1, dtype=np.float64)
    cdef double[:, :, ::1] B2v = np.ascontiguousarray(B2, dtype=np.float64)
    cdef Py_ssize_t K = B1v.shape[0], dx = B1v.shape[1], dy = B1v.shape[2], t, i, j
    x_arr = np.array(x0, dtype=np.float64)
    y_arr = np.array(y0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef double[::1] xlv = np.ascontiguousarray(xl, dtype=np.float64)
    cdef double[::1] ylv = np.ascontiguousarray(yl, dtype=np.float64)
    cdef double[::1] sx = sum_x
    cdef double[::1] sy = sum_y
    cdef double[::1] lx = np.zeros(dx)
    cdef double[::1] ly = np.zeros(dy)
    cdef double[::1] xh = np.zeros(dx)
    cdef double[::1] yh = np.zeros(dy)
    cdef double[::1] lxh = np.zeros(dx)
    cdef double[::1] lyh = np.zeros(dy)
    cdef double[::1] gx = np.zeros(dx)
    cdef double[::1] gy = np.zeros(dy)
    cdef double[::1] dummy = np.zeros(max(dx, dy))
    cdef double acc, xi
    with nogil:
        _init_log(ENTROPIC, x, lx)
        _init_log(ENTROPIC, y, ly)
        for t in range(K):
            for i in range(dx):
                acc = 0.0
                for j in range(dy):
                    acc += B1v[t, i, j] * y[j]
                gx[i] = acc
            for j in range(dy):
                gy[j] = 0.0
            for i in range(dx):
                xi = x[i]
                for j in range(dy):
                    gy[j] -= B1v[t, i, j] * xi
            _step(ENTROPIC, SIMPLEX, x, lx, gx, eta, 0.0, dummy, xW, xlv, dummy, dummy, xh, lxh, dummy)
            _step(ENTROPIC, SIMPLEX, y, ly, gy, eta, 0.0, dummy, yW, ylv, dummy, dummy, yh, lyh, dummy)
            for i in range(dx):
                acc = 0.0
                for j in range(dy):
                    acc += B2v[t, i, j] * yh[j]
                gx[i] = acc
            for j in range(dy):
                gy[j] = 0.0
            for i in range(dx):
                xi = xh[i]
                for j in range(dy):
                    gy[j] -= B2v[t, i, j] * xi
            _step(ENTROPIC, SIMPLEX, x, lx, gx, eta, 0.0, dummy, xW, xlv, dummy, dummy, x, lx, dummy)
            _step(ENTROPIC, SIMPLEX, y, ly, gy, eta, 0.0, dummy, yW, ylv, dummy, dummy, y, ly, dummy)
            for i in range(dx):
                sx[i] += x[i]
            for j in range(dy):
                sy[j] += y[j]
    return x_arr, y_arr


def ogda_run(Q, R, B, a, b, double xwq, xs, double ywq, ys, noise_x, noise_y, x0, y0, double eta):
    cdef double[:, ::1] Qv = np.ascontiguousarray(Q, dtype=np.float64)
    cdef double[:, ::1] Rv = np.ascontiguousarray(R, dtype=np.float64)
    cdef double[:, ::1] Bv = np.ascontiguousarray(B, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] xsv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] ysv = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[:, ::1] nx = np.ascontiguousarray(noise_x, dtype=np.float64)
    cdef double[:, ::1] ny = np.ascontiguousarray(noise_y, dtype=np.float64)
    cdef Py_ssize_t K = nx.shape[0], dx = Bv.shape[0], dy = Bv.shape[1], k, i
    x_arr = np.array(x0, dtype=np.float64)
    y_arr = np.array(y0, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] y = y_arr
    cdef double[::1] fx = np.zeros(dx)
    cdef double[::1] fy = np.zeros(dy)
    cdef double[::1] px = np.zeros(dx)
    cdef double[::1] py = np.zeros(dy)
    with nogil:
        for k in range(K):
            _operator(Qv, Rv, Bv, av, bv, x, y, fx, fy)
            for i in range(dx):
                fx[i] += nx[k, i] + xwq * x[i] - xsv[i]
            for i in range(dy):
                fy[i] += -ny[k, i] + ywq * y[i] - ysv[i]
            if k == 0:
                for i in range(dx):
                    px[i] = fx[i]
                for i in range(dy):
                    py[i] = fy[i]
            for i in range(dx):
                x[i] -= eta * (2.0 * fx[i] - px[i])
                px[i] = fx[i]
            for i in range(dy):
                y[i] -= eta * (2.0 * fy[i] - py[i])
                py[i] = fy[i]
    return x_arr, y_arr
