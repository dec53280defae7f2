# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled geometry/integration kernels.

Mirror of scmp._kernels_py (same functions, same arithmetic order); built
with -ffp-contract=off so results match the pure-Python backend bit for
bit.  See that module for semantics.
"""

from libc.math cimport acos, asin, atan2, cos, fabs, floor, fmod, sin, sqrt

cdef double PI = 3.141592653589793
cdef double TWO_PI = 6.283185307179586
cdef double INF = float("inf")


cdef inline double _norm(double a) nogil:
    return a - TWO_PI * floor((a + PI) / TWO_PI)


def normalize_angle(double a):
    """Wrap an angle to [-pi, pi). Idempotent for already-wrapped inputs."""
    return _norm(a)


cdef inline void _corners(double x, double y, double yaw, double front, double rear,
                          double half_w, double* out) nogil:
    cdef double c = cos(yaw)
    cdef double s = sin(yaw)
    out[0] = x - rear * c + half_w * s
    out[1] = y - rear * s - half_w * c
    out[2] = x + front * c + half_w * s
    out[3] = y + front * s - half_w * c
    out[4] = x + front * c - half_w * s
    out[5] = y + front * s + half_w * c
    out[6] = x - rear * c - half_w * s
    out[7] = y - rear * s + half_w * c


def rect_corners(double x, double y, double yaw, double front, double rear, double half_w):
    """Corners of a body rectangle: rear axle at (x, y), long axis along yaw."""
    cdef double r[8]
    _corners(x, y, yaw, front, rear, half_w, r)
    return (r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7])


cdef inline bint _project_gap(double ax, double ay, double* r1, double* r2) nogil:
    cdef double lo1, hi1, lo2, hi2, p, q
    cdef int k
    lo1 = hi1 = r1[0] * ax + r1[1] * ay
    lo2 = hi2 = r2[0] * ax + r2[1] * ay
    for k in range(2, 8, 2):
        p = r1[k] * ax + r1[k + 1] * ay
        if p < lo1:
            lo1 = p
        elif p > hi1:
            hi1 = p
        q = r2[k] * ax + r2[k + 1] * ay
        if q < lo2:
            lo2 = q
        elif q > hi2:
            hi2 = q
    return hi1 < lo2 or hi2 < lo1


cdef inline bint _rects_overlap(double* r1, double* r2) nogil:
    if _project_gap(r1[2] - r1[0], r1[3] - r1[1], r1, r2):
        return False
    if _project_gap(r1[6] - r1[0], r1[7] - r1[1], r1, r2):
        return False
    if _project_gap(r2[2] - r2[0], r2[3] - r2[1], r1, r2):
        return False
    if _project_gap(r2[6] - r2[0], r2[7] - r2[1], r1, r2):
        return False
    return True


cdef inline void _load8(object seq, double* out):
    cdef int k
    for k in range(8):
        out[k] = seq[k]


def rects_overlap(r1, r2):
    """Closed overlap test between two oriented rectangles (separating axes)."""
    cdef double a[8]
    cdef double b[8]
    _load8(r1, a)
    _load8(r2, b)
    return _rects_overlap(a, b)


def rect_circle_overlap(r, double cx, double cy, double rad):
    """Closed overlap test between an oriented rectangle and a circle."""
    cdef double a[8]
    _load8(r, a)
    cdef double ex = a[2] - a[0]
    cdef double ey = a[3] - a[1]
    cdef double fx = a[6] - a[0]
    cdef double fy = a[7] - a[1]
    cdef double e2 = ex * ex + ey * ey
    cdef double f2 = fx * fx + fy * fy
    cdef double dx = cx - a[0]
    cdef double dy = cy - a[1]
    cdef double u = (dx * ex + dy * ey) / e2
    cdef double v = (dx * fx + dy * fy) / f2
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    if v < 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    cdef double qx = a[0] + u * ex + v * fx
    cdef double qy = a[1] + u * ey + v * fy
    cdef double ddx = cx - qx
    cdef double ddy = cy - qy
    return ddx * ddx + ddy * ddy <= rad * rad


def poses_overlap(double x1, double y1, double yaw1, double front1, double rear1, double halfw1,
                  double x2, double y2, double yaw2, double front2, double rear2, double halfw2):
    """Closed body-body overlap between two rear-axle poses."""
    cdef double a[8]
    cdef double b[8]
    _corners(x1, y1, yaw1, front1, rear1, halfw1, a)
    _corners(x2, y2, yaw2, front2, rear2, halfw2, b)
    return _rects_overlap(a, b)


def pose_overlaps_any(double x, double y, double yaw, double front, double rear, double half_w,
                      double[:, ::1] rects):
    """True if the body rectangle at the pose overlaps any row of rects (n, 8)."""
    cdef Py_ssize_t n = rects.shape[0]
    if n == 0:
        return False
    cdef double me[8]
    _corners(x, y, yaw, front, rear, half_w, me)
    cdef Py_ssize_t i
    for i in range(n):
        if _rects_overlap(me, &rects[i, 0]):
            return True
    return False


cdef bint _pose_blocked(double x, double y, double yaw, double front, double rear,
                        double half_w, double circ_r,
                        double xmin, double xmax, double ymin, double ymax,
                        double[:, ::1] circles, double[:, ::1] obst_rects,
                        double[:, ::1] avoid_rects) nogil:
    cdef double c = cos(yaw)
    cdef double s = sin(yaw)
    cdef double corners[8]
    corners[0] = x - rear * c + half_w * s
    corners[1] = y - rear * s - half_w * c
    corners[2] = x + front * c + half_w * s
    corners[3] = y + front * s - half_w * c
    corners[4] = x + front * c - half_w * s
    corners[5] = y + front * s + half_w * c
    corners[6] = x - rear * c - half_w * s
    corners[7] = y - rear * s + half_w * c
    cdef int k
    cdef double px, py
    for k in range(0, 8, 2):
        px = corners[k]
        py = corners[k + 1]
        if px < xmin or px > xmax or py < ymin or py > ymax:
            return True
    cdef Py_ssize_t i
    cdef Py_ssize_t nc = circles.shape[0]
    cdef double cx, cy, rad, dx, dy, reach, lx, ly, qx, qy, ex, ey
    for i in range(nc):
        cx = circles[i, 0]
        cy = circles[i, 1]
        rad = circles[i, 2]
        dx = cx - x
        dy = cy - y
        reach = rad + circ_r
        if dx * dx + dy * dy > reach * reach:
            continue
        lx = dx * c + dy * s
        ly = -dx * s + dy * c
        qx = lx
        if qx < -rear:
            qx = -rear
        elif qx > front:
            qx = front
        qy = ly
        if qy < -half_w:
            qy = -half_w
        elif qy > half_w:
            qy = half_w
        ex = lx - qx
        ey = ly - qy
        if ex * ex + ey * ey <= rad * rad:
            return True
    cdef Py_ssize_t nr = obst_rects.shape[0]
    for i in range(nr):
        if _rects_overlap(corners, &obst_rects[i, 0]):
            return True
    cdef Py_ssize_t na = avoid_rects.shape[0]
    for i in range(na):
        if _rects_overlap(corners, &avoid_rects[i, 0]):
            return True
    return False


def pose_blocked(double x, double y, double yaw, double front, double rear, double half_w,
                 double circ_r, double xmin, double xmax, double ymin, double ymax,
                 double[:, ::1] circles, double[:, ::1] obst_rects, double[:, ::1] avoid_rects):
    """True if the pose leaves the workspace or its body hits any obstacle/rect."""
    return _pose_blocked(x, y, yaw, front, rear, half_w, circ_r,
                         xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects)


def integrate_steps(double x, double y, double yaw, double v, double omega, double dt, int n):
    """Chain n discrete motion updates (constant controls); yaw wrapped each step."""
    cdef int i
    for i in range(n):
        x = x + dt * v * cos(yaw)
        y = y + dt * v * sin(yaw)
        yaw = _norm(yaw + dt * omega)
    return x, y, yaw


def motion_blocked(double x, double y, double yaw, double v, double omega, double dt, int n_check,
                   double front, double rear, double half_w, double circ_r,
                   double xmin, double xmax, double ymin, double ymax,
                   double[:, ::1] circles, double[:, ::1] obst_rects, double[:, ::1] avoid_rects):
    """One discrete motion update with collision checks along the swept segment."""
    cdef double dxv = dt * v * cos(yaw)
    cdef double dyv = dt * v * sin(yaw)
    cdef double dw = dt * omega
    cdef bint blocked = False
    cdef int k
    cdef double f, px, py, pyaw
    for k in range(1, n_check + 1):
        f = (<double> k) / (<double> n_check)
        px = x + f * dxv
        py = y + f * dyv
        pyaw = _norm(yaw + f * dw)
        if _pose_blocked(px, py, pyaw, front, rear, half_w, circ_r,
                         xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects):
            blocked = True
            break
    cdef double nx = x + dxv
    cdef double ny = y + dyv
    cdef double nyaw = _norm(yaw + dw)
    return blocked, nx, ny, nyaw


# ---------------------------------------------------------------------------
# Minimum-turning-radius distance metric (radius-1 units), mirroring the
# twelve solution families and symmetries in scmp._kernels_py.
# ---------------------------------------------------------------------------


cdef inline double _wrap(double theta) nogil:
    theta = fmod(theta, TWO_PI)
    if theta < -PI:
        theta += TWO_PI
    elif theta >= PI:
        theta -= TWO_PI
    return theta


cdef inline double _hypot(double x, double y) nogil:
    return sqrt(x * x + y * y)


cdef double _csc_same(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double u = _hypot(xi, eta)
    cdef double t = atan2(eta, xi)
    cdef double v = _wrap(phi - t)
    return fabs(t) + fabs(u) + fabs(v)


cdef double _csc_opp(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho * rho < 4.0:
        return INF
    cdef double u = sqrt(rho * rho - 4.0)
    cdef double t = _wrap(atan2(eta, xi) + atan2(2.0, u))
    cdef double v = _wrap(t - phi)
    return fabs(t) + fabs(u) + fabs(v)


cdef double _ccc(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho > 4.0:
        return INF
    cdef double a = acos(rho / 4.0)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
    cdef double u = _wrap(PI - 2.0 * a)
    cdef double v = _wrap(phi - t - u)
    return fabs(t) + fabs(u) + fabs(v)


cdef double _ccc_back(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho > 4.0:
        return INF
    cdef double a = acos(rho / 4.0)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
    cdef double u = _wrap(PI - 2.0 * a)
    cdef double v = _wrap(t + u - phi)
    return fabs(t) + fabs(u) + fabs(v)


cdef double _cc_c(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho > 4.0 or rho == 0.0:
        return INF
    cdef double u = acos(1.0 - rho * rho / 8.0)
    cdef double arg = 2.0 * sin(u) / rho
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    cdef double a = asin(arg)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI - a)
    cdef double v = _wrap(t - u - phi)
    return fabs(t) + fabs(u) + fabs(v)


cdef double _ccuc(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho > 4.0:
        return INF
    cdef double a, t, u, v
    if rho <= 2.0:
        a = acos((rho + 2.0) / 4.0)
        t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
        u = _wrap(a)
        v = _wrap(phi - t + 2.0 * u)
    else:
        a = acos((rho - 2.0) / 4.0)
        t = _wrap(atan2(eta, xi) + 0.5 * PI - a)
        u = _wrap(PI - a)
        v = _wrap(phi - t + 2.0 * u)
    return fabs(t) + fabs(u) + fabs(u) + fabs(v)


cdef double _c_cucu_c(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho > 6.0 or rho == 0.0:
        return INF
    cdef double u1 = (20.0 - rho * rho) / 16.0
    if u1 < 0.0 or u1 > 1.0:
        return INF
    cdef double u = acos(u1)
    cdef double arg = 2.0 * sin(u) / rho
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    cdef double a = asin(arg)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
    cdef double v = _wrap(t - phi)
    return fabs(t) + fabs(u) + fabs(u) + fabs(v)


cdef double _c_c90sc(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho < 2.0:
        return INF
    cdef double u = sqrt(rho * rho - 4.0) - 2.0
    cdef double a = atan2(2.0, u + 2.0)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
    cdef double v = _wrap(t - phi + 0.5 * PI)
    return fabs(t) + 0.5 * PI + fabs(u) + fabs(v)


cdef double _csc90_c(double x, double y, double phi) nogil:
    cdef double xi = x - sin(phi)
    cdef double eta = y - 1.0 + cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho < 2.0:
        return INF
    cdef double u = sqrt(rho * rho - 4.0) - 2.0
    cdef double a = atan2(u + 2.0, 2.0)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI - a)
    cdef double v = _wrap(t - phi - 0.5 * PI)
    return fabs(t) + fabs(u) + 0.5 * PI + fabs(v)


cdef double _c_c90sc_same(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho < 2.0:
        return INF
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI)
    cdef double u = rho - 2.0
    cdef double v = _wrap(phi - t - 0.5 * PI)
    return fabs(t) + 0.5 * PI + fabs(u) + fabs(v)


cdef double _csc90_c_same(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho < 2.0:
        return INF
    cdef double t = _wrap(atan2(eta, xi))
    cdef double u = rho - 2.0
    cdef double v = _wrap(phi - t - 0.5 * PI)
    return fabs(t) + fabs(u) + 0.5 * PI + fabs(v)


cdef double _c_c90sc90_c(double x, double y, double phi) nogil:
    cdef double xi = x + sin(phi)
    cdef double eta = y - 1.0 - cos(phi)
    cdef double rho = _hypot(xi, eta)
    if rho < 4.0:
        return INF
    cdef double u = sqrt(rho * rho - 4.0) - 4.0
    cdef double a = atan2(2.0, u + 4.0)
    cdef double t = _wrap(atan2(eta, xi) + 0.5 * PI + a)
    cdef double v = _wrap(t - phi)
    return fabs(t) + 0.5 * PI + fabs(u) + 0.5 * PI + fabs(v)


ctypedef double (*rs_fn)(double, double, double) nogil


cdef rs_fn _RS_FAMILIES[12]
_RS_FAMILIES[0] = _csc_same
_RS_FAMILIES[1] = _csc_opp
_RS_FAMILIES[2] = _ccc
_RS_FAMILIES[3] = _ccc_back
_RS_FAMILIES[4] = _cc_c
_RS_FAMILIES[5] = _ccuc
_RS_FAMILIES[6] = _c_cucu_c
_RS_FAMILIES[7] = _c_c90sc
_RS_FAMILIES[8] = _csc90_c
_RS_FAMILIES[9] = _c_c90sc_same
_RS_FAMILIES[10] = _csc90_c_same
_RS_FAMILIES[11] = _c_c90sc90_c


def rs_length(double x, double y, double phi):
    """Length of the shortest bounded-curvature path to (x, y, phi), radius 1."""
    cdef double best = INF
    cdef double d
    cdef int i
    for i in range(12):
        d = _RS_FAMILIES[i](x, y, phi)
        if d < best:
            best = d
        d = _RS_FAMILIES[i](-x, y, -phi)
        if d < best:
            best = d
        d = _RS_FAMILIES[i](x, -y, -phi)
        if d < best:
            best = d
        d = _RS_FAMILIES[i](-x, -y, phi)
        if d < best:
            best = d
    return best
