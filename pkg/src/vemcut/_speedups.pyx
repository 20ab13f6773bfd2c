# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure numpy kernels in `_pycore`.

Same contract, same results to roundoff; `tests/test_backends.py` pins
the two together.  See `_pycore` for the kernel documentation.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, hypot, sqrt

cnp.import_array()

STAB_BROKEN_HALF = 0
STAB_L2_EDGE = 1
STAB_DOF = 2
STAB_TANGENTIAL = 3


def element_arrays(verts_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] verts = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef Py_ssize_t n = verts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grads = np.empty((n, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] consts = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] values = np.empty((n, n))
    cdef double area = 0.0, diam2 = 0.0, perim = 0.0
    cdef double momx = 0.0, momy = 0.0
    cdef double dx, dy, dd, hj, hprev
    cdef Py_ssize_t i, j, jn

    for j in range(n):
        jn = (j + 1) % n
        area += verts[j, 0] * verts[jn, 1] - verts[jn, 0] * verts[j, 1]
        for i in range(j + 1, n):
            dx = verts[i, 0] - verts[j, 0]
            dy = verts[i, 1] - verts[j, 1]
            dd = dx * dx + dy * dy
            if dd > diam2:
                diam2 = dd
    area *= 0.5
    cdef double diameter = sqrt(diam2)

    for j in range(n):
        jn = (j + 1) % n
        dx = verts[jn, 0] - verts[j, 0]
        dy = verts[jn, 1] - verts[j, 1]
        hj = hypot(dx, dy)
        perim += hj
        momx += hj * 0.5 * (verts[j, 0] + verts[jn, 0])
        momy += hj * 0.5 * (verts[j, 1] + verts[jn, 1])
        # h_e * outward normal of edge j is (dy, -dx); basis j and j+1 share it
        grads[j, 0] = dy
        grads[j, 1] = -dx

    cdef double inv2a = 1.0 / (2.0 * area)
    cdef double gx, gy
    cdef Py_ssize_t jp
    # combine each vertex's two adjacent edges (previous edge has index j-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] hn = grads.copy()
    for j in range(n):
        jp = n - 1 if j == 0 else j - 1
        gx = (hn[j, 0] + hn[jp, 0]) * inv2a
        gy = (hn[j, 1] + hn[jp, 1]) * inv2a
        grads[j, 0] = gx
        grads[j, 1] = gy

    cdef double bint_j
    for j in range(n):
        jp = n - 1 if j == 0 else j - 1
        jn = (j + 1) % n
        dx = verts[jn, 0] - verts[j, 0]
        dy = verts[jn, 1] - verts[j, 1]
        hj = hypot(dx, dy)
        dx = verts[j, 0] - verts[jp, 0]
        dy = verts[j, 1] - verts[jp, 1]
        hprev = hypot(dx, dy)
        bint_j = 0.5 * (hj + hprev)
        consts[j] = (bint_j - grads[j, 0] * momx - grads[j, 1] * momy) / perim

    for i in range(n):
        for j in range(n):
            values[i, j] = verts[i, 0] * grads[j, 0] + verts[i, 1] * grads[j, 1] + consts[j]

    return area, diameter, grads, consts, values


def consistency_matrix(double area, grads_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] grads = np.ascontiguousarray(grads_in, dtype=np.float64)
    cdef Py_ssize_t n = grads.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, n))
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            out[i, j] = area * (grads[i, 0] * grads[j, 0] + grads[i, 1] * grads[j, 1])
    return out


def stab_matrix(verts_in, values_in, int kind):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] verts = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] values = np.ascontiguousarray(values_in, dtype=np.float64)
    cdef Py_ssize_t n = verts.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.empty((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n))
    cdef Py_ssize_t i, j, e, en
    cdef double dx, dy, he, di, dj, wa_i, wb_i, wa_j, wb_j

    for i in range(n):
        for j in range(n):
            w[i, j] = (1.0 if i == j else 0.0) - values[i, j]

    if kind == STAB_DOF:
        for i in range(n):
            for j in range(n):
                for e in range(n):
                    out[i, j] += w[e, i] * w[e, j]
        return out

    for e in range(n):
        en = (e + 1) % n
        dx = verts[en, 0] - verts[e, 0]
        dy = verts[en, 1] - verts[e, 1]
        he = hypot(dx, dy)
        for i in range(n):
            wa_i = w[e, i]
            wb_i = w[en, i]
            di = wb_i - wa_i
            for j in range(n):
                wa_j = w[e, j]
                wb_j = w[en, j]
                dj = wb_j - wa_j
                if kind == STAB_BROKEN_HALF:
                    out[i, j] += di * dj
                elif kind == STAB_TANGENTIAL:
                    out[i, j] += di * dj / he
                elif kind == STAB_L2_EDGE:
                    out[i, j] += (2.0 * wa_i * wa_j + wa_i * wb_j + wb_i * wa_j
                                  + 2.0 * wb_i * wb_j) / 6.0
                else:
                    raise ValueError("unknown stabilization kind %d" % kind)
    if kind == STAB_L2_EDGE:
        for i in range(n):
            for j in range(i + 1, n):
                di = 0.5 * (out[i, j] + out[j, i])
                out[i, j] = di
                out[j, i] = di
    return out


cdef bint _point_in(double px, double py, double[:, :] verts, Py_ssize_t n, double tol):
    cdef bint inside = False
    cdef Py_ssize_t j, jn
    cdef double ax, ay, bx, by, xin, ex, ey, ee, t, dx, dy, dist2
    cdef double tol2 = tol * tol
    for j in range(n):
        jn = (j + 1) % n
        ax = verts[j, 0]; ay = verts[j, 1]
        bx = verts[jn, 0]; by = verts[jn, 1]
        if (ay <= py) != (by <= py):
            xin = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < xin:
                inside = not inside
        ex = bx - ax; ey = by - ay
        ee = ex * ex + ey * ey
        if ee > 0.0:
            t = ((px - ax) * ex + (py - ay) * ey) / ee
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            dx = px - (ax + t * ex)
            dy = py - (ay + t * ey)
            dist2 = dx * dx + dy * dy
            if dist2 <= tol2:
                return True
    return inside


cdef inline double _orient(double ax, double ay, double bx, double by,
                           double cx, double cy) nogil:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


cdef inline int _tsign(double o, double eps) nogil:
    if o > eps:
        return 1
    if o < -eps:
        return -1
    return 0


cdef bint _side_clean(double sx, double sy, double apx, double apy,
                      double[:, :] verts, Py_ssize_t n, double eps):
    """True when segment (s -> apex) has no proper crossing with any
    polygon edge (touching within the orientation tolerance eps does
    not count)."""
    cdef Py_ssize_t j, jn
    cdef int s1, s2, s3, s4
    for j in range(n):
        jn = (j + 1) % n
        s1 = _tsign(_orient(sx, sy, apx, apy, verts[j, 0], verts[j, 1]), eps)
        s2 = _tsign(_orient(sx, sy, apx, apy, verts[jn, 0], verts[jn, 1]), eps)
        s3 = _tsign(_orient(verts[j, 0], verts[j, 1], verts[jn, 0], verts[jn, 1], sx, sy), eps)
        s4 = _tsign(_orient(verts[j, 0], verts[j, 1], verts[jn, 0], verts[jn, 1], apx, apy), eps)
        if s1 * s2 < 0 and s3 * s4 < 0:
            return False
    return True


def apex_feasible(local_in, double h_e, double ell, xs_in, double tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] local = np.ascontiguousarray(local_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef Py_ssize_t n = local.shape[0]
    cdef Py_ssize_t m = xs.shape[0]
    cdef double[:, :] v = local
    cdef Py_ssize_t k
    cdef double ax, scale, eps
    scale = h_e if h_e > ell else ell
    for k in range(n):
        if fabs(local[k, 0]) > scale:
            scale = fabs(local[k, 0])
        if fabs(local[k, 1]) > scale:
            scale = fabs(local[k, 1])
    eps = 1e-11 * scale * scale

    for k in range(m):
        ax = xs[k]
        if not _point_in(ax, ell, v, n, tol):
            continue
        if not _point_in(0.5 * ax, 0.5 * ell, v, n, tol):
            continue
        if not _point_in(0.5 * (ax + h_e), 0.5 * ell, v, n, tol):
            continue
        if not _point_in((ax + h_e) / 3.0, ell / 3.0, v, n, tol):
            continue
        if not _side_clean(0.0, 0.0, ax, ell, v, n, eps):
            continue
        if not _side_clean(h_e, 0.0, ax, ell, v, n, eps):
            continue
        return True
    return False
