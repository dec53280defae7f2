"""Pure-Python geometry/integration kernels.

Reference implementation of the hot inner loops: oriented-rectangle
collision tests, workspace queries, discrete-time motion integration and
the minimum-turning-radius distance metric.  scmp._kernels (Cython) mirrors
this module function-for-function with identical arithmetic order, so the
two backends are interchangeable; scmp.kernels picks one at import.

Conventions: angles in radians, poses are rear-axle (x, y, yaw), rectangle
corners are flat (x0, y0, ..., x3, y3) in counterclockwise order.  Overlap
tests are closed (touching counts as overlap); workspace containment is
closed on the boundary.
"""

import math

TWO_PI = 2.0 * math.pi


def normalize_angle(a):
    """Wrap an angle to [-pi, pi). Idempotent for already-wrapped inputs."""
    return a - TWO_PI * math.floor((a + math.pi) / TWO_PI)


def rect_corners(x, y, yaw, front, rear, half_w):
    """Corners of a body rectangle: rear axle at (x, y), long axis along yaw.

    front/rear are the distances from the axle to the front/rear edge.
    Returns (x0, y0, x1, y1, x2, y2, x3, y3), counterclockwise from
    rear-right.
    """
    c = math.cos(yaw)
    s = math.sin(yaw)
    return (
        x - rear * c + half_w * s,
        y - rear * s - half_w * c,
        x + front * c + half_w * s,
        y + front * s - half_w * c,
        x + front * c - half_w * s,
        y + front * s + half_w * c,
        x - rear * c - half_w * s,
        y - rear * s + half_w * c,
    )


def _project_gap(ax, ay, r1, r2):
    """True if axis (ax, ay) strictly separates the two corner tuples."""
    lo1 = hi1 = r1[0] * ax + r1[1] * ay
    lo2 = hi2 = r2[0] * ax + r2[1] * ay
    for k in (2, 4, 6):
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


def rects_overlap(r1, r2):
    """Closed overlap test between two oriented rectangles (separating axes)."""
    if _project_gap(r1[2] - r1[0], r1[3] - r1[1], r1, r2):
        return False
    if _project_gap(r1[6] - r1[0], r1[7] - r1[1], r1, r2):
        return False
    if _project_gap(r2[2] - r2[0], r2[3] - r2[1], r1, r2):
        return False
    if _project_gap(r2[6] - r2[0], r2[7] - r2[1], r1, r2):
        return False
    return True


def rect_circle_overlap(r, cx, cy, rad):
    """Closed overlap test between an oriented rectangle and a circle."""
    ex = r[2] - r[0]
    ey = r[3] - r[1]
    fx = r[6] - r[0]
    fy = r[7] - r[1]
    e2 = ex * ex + ey * ey
    f2 = fx * fx + fy * fy
    # circle center in the rectangle's edge frame, clamped to the rectangle
    dx = cx - r[0]
    dy = cy - r[1]
    u = (dx * ex + dy * ey) / e2
    v = (dx * fx + dy * fy) / f2
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    if v < 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    qx = r[0] + u * ex + v * fx
    qy = r[1] + u * ey + v * fy
    ddx = cx - qx
    ddy = cy - qy
    return ddx * ddx + ddy * ddy <= rad * rad


def poses_overlap(x1, y1, yaw1, front1, rear1, halfw1, x2, y2, yaw2, front2, rear2, halfw2):
    """Closed body-body overlap between two rear-axle poses."""
    return rects_overlap(
        rect_corners(x1, y1, yaw1, front1, rear1, halfw1),
        rect_corners(x2, y2, yaw2, front2, rear2, halfw2),
    )


def pose_overlaps_any(x, y, yaw, front, rear, half_w, rects):
    """True if the body rectangle at the pose overlaps any row of rects (n, 8)."""
    n = rects.shape[0]
    if n == 0:
        return False
    me = rect_corners(x, y, yaw, front, rear, half_w)
    for i in range(n):
        row = rects[i]
        if rects_overlap(me, (row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7])):
            return True
    return False


def _pose_blocked(x, y, yaw, front, rear, half_w, circ_r, xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects):
    c = math.cos(yaw)
    s = math.sin(yaw)
    corners = (
        x - rear * c + half_w * s,
        y - rear * s - half_w * c,
        x + front * c + half_w * s,
        y + front * s - half_w * c,
        x + front * c - half_w * s,
        y + front * s + half_w * c,
        x - rear * c - half_w * s,
        y - rear * s + half_w * c,
    )
    for k in (0, 2, 4, 6):
        px = corners[k]
        py = corners[k + 1]
        if px < xmin or px > xmax or py < ymin or py > ymax:
            return True
    nc = circles.shape[0]
    for i in range(nc):
        cx = circles[i, 0]
        cy = circles[i, 1]
        rad = circles[i, 2]
        dx = cx - x
        dy = cy - y
        reach = rad + circ_r
        if dx * dx + dy * dy > reach * reach:
            continue
        # circle center in the body frame, clamped to the body rectangle
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
    nr = obst_rects.shape[0]
    for i in range(nr):
        row = obst_rects[i]
        if rects_overlap(corners, (row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7])):
            return True
    na = avoid_rects.shape[0]
    for i in range(na):
        row = avoid_rects[i]
        if rects_overlap(corners, (row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7])):
            return True
    return False


def pose_blocked(x, y, yaw, front, rear, half_w, circ_r, xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects):
    """True if the pose leaves the workspace or its body hits any obstacle/rect."""
    return _pose_blocked(
        x, y, yaw, front, rear, half_w, circ_r, xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects
    )


def integrate_steps(x, y, yaw, v, omega, dt, n):
    """Chain n discrete motion updates (constant controls); yaw wrapped each step."""
    for _ in range(n):
        x = x + dt * v * math.cos(yaw)
        y = y + dt * v * math.sin(yaw)
        yaw = normalize_angle(yaw + dt * omega)
    return x, y, yaw


def motion_blocked(
    x,
    y,
    yaw,
    v,
    omega,
    dt,
    n_check,
    front,
    rear,
    half_w,
    circ_r,
    xmin,
    xmax,
    ymin,
    ymax,
    circles,
    obst_rects,
    avoid_rects,
):
    """One discrete motion update with collision checks along the swept segment.

    Checks n_check interpolated poses at fractions k/n_check of the update
    (the last one is the exact endpoint).  Returns (blocked, nx, ny, nyaw);
    the endpoint matches integrate_steps(..., n=1) bit-for-bit.
    """
    dxv = dt * v * math.cos(yaw)
    dyv = dt * v * math.sin(yaw)
    dw = dt * omega
    blocked = False
    for k in range(1, n_check + 1):
        f = k / n_check
        px = x + f * dxv
        py = y + f * dyv
        pyaw = normalize_angle(yaw + f * dw)
        if _pose_blocked(
            px, py, pyaw, front, rear, half_w, circ_r, xmin, xmax, ymin, ymax, circles, obst_rects, avoid_rects
        ):
            blocked = True
            break
    nx = x + dxv
    ny = y + dyv
    nyaw = normalize_angle(yaw + dw)
    return blocked, nx, ny, nyaw


# ---------------------------------------------------------------------------
# Minimum-turning-radius (forward/backward arcs + straights) distance metric.
# Targets are given in the start frame, scaled so the turning radius is 1.
# Twelve base solution families plus the timeflip/reflect symmetries.
# ---------------------------------------------------------------------------


def _wrap(theta):
    theta = math.fmod(theta, TWO_PI)
    if theta < -math.pi:
        theta += TWO_PI
    elif theta >= math.pi:
        theta -= TWO_PI
    return theta


def _hypot(x, y):
    # explicit form so the compiled backend (libc) matches bit for bit
    return math.sqrt(x * x + y * y)


def _csc_same(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u = _hypot(xi, eta)
    t = math.atan2(eta, xi)
    v = _wrap(phi - t)
    return abs(t) + abs(u) + abs(v)


def _csc_opp(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho * rho < 4.0:
        return math.inf
    u = math.sqrt(rho * rho - 4.0)
    t = _wrap(math.atan2(eta, xi) + math.atan2(2.0, u))
    v = _wrap(t - phi)
    return abs(t) + abs(u) + abs(v)


def _ccc(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = _hypot(xi, eta)
    if rho > 4.0:
        return math.inf
    a = math.acos(rho / 4.0)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
    u = _wrap(math.pi - 2.0 * a)
    v = _wrap(phi - t - u)
    return abs(t) + abs(u) + abs(v)


def _ccc_back(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = _hypot(xi, eta)
    if rho > 4.0:
        return math.inf
    a = math.acos(rho / 4.0)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
    u = _wrap(math.pi - 2.0 * a)
    v = _wrap(t + u - phi)
    return abs(t) + abs(u) + abs(v)


def _cc_c(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = _hypot(xi, eta)
    if rho > 4.0:
        return math.inf
    u = math.acos(1.0 - rho * rho / 8.0)
    su = math.sin(u)
    if rho == 0.0:
        return math.inf
    arg = 2.0 * su / rho
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    a = math.asin(arg)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi - a)
    v = _wrap(t - u - phi)
    return abs(t) + abs(u) + abs(v)


def _ccuc(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho > 4.0:
        return math.inf
    if rho <= 2.0:
        a = math.acos((rho + 2.0) / 4.0)
        t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
        u = _wrap(a)
        v = _wrap(phi - t + 2.0 * u)
    else:
        a = math.acos((rho - 2.0) / 4.0)
        t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi - a)
        u = _wrap(math.pi - a)
        v = _wrap(phi - t + 2.0 * u)
    return abs(t) + abs(u) + abs(u) + abs(v)


def _c_cucu_c(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho > 6.0 or rho == 0.0:
        return math.inf
    u1 = (20.0 - rho * rho) / 16.0
    if u1 < 0.0 or u1 > 1.0:
        return math.inf
    u = math.acos(u1)
    arg = 2.0 * math.sin(u) / rho
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    a = math.asin(arg)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
    v = _wrap(t - phi)
    return abs(t) + abs(u) + abs(u) + abs(v)


def _c_c90sc(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = _hypot(xi, eta)
    if rho < 2.0:
        return math.inf
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(2.0, u + 2.0)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
    v = _wrap(t - phi + 0.5 * math.pi)
    return abs(t) + 0.5 * math.pi + abs(u) + abs(v)


def _csc90_c(x, y, phi):
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho = _hypot(xi, eta)
    if rho < 2.0:
        return math.inf
    u = math.sqrt(rho * rho - 4.0) - 2.0
    a = math.atan2(u + 2.0, 2.0)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi - a)
    v = _wrap(t - phi - 0.5 * math.pi)
    return abs(t) + abs(u) + 0.5 * math.pi + abs(v)


def _c_c90sc_same(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho < 2.0:
        return math.inf
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi)
    u = rho - 2.0
    v = _wrap(phi - t - 0.5 * math.pi)
    return abs(t) + 0.5 * math.pi + abs(u) + abs(v)


def _csc90_c_same(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho < 2.0:
        return math.inf
    t = _wrap(math.atan2(eta, xi))
    u = rho - 2.0
    v = _wrap(phi - t - 0.5 * math.pi)
    return abs(t) + abs(u) + 0.5 * math.pi + abs(v)


def _c_c90sc90_c(x, y, phi):
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = _hypot(xi, eta)
    if rho < 4.0:
        return math.inf
    u = math.sqrt(rho * rho - 4.0) - 4.0
    a = math.atan2(2.0, u + 4.0)
    t = _wrap(math.atan2(eta, xi) + 0.5 * math.pi + a)
    v = _wrap(t - phi)
    return abs(t) + 0.5 * math.pi + abs(u) + 0.5 * math.pi + abs(v)


_RS_FAMILIES = (
    _csc_same,
    _csc_opp,
    _ccc,
    _ccc_back,
    _cc_c,
    _ccuc,
    _c_cucu_c,
    _c_c90sc,
    _csc90_c,
    _c_c90sc_same,
    _csc90_c_same,
    _c_c90sc90_c,
)


def rs_length(x, y, phi):
    """Length of the shortest bounded-curvature path to (x, y, phi), radius 1.

    Considers forward and backward arcs and straight segments; the four
    start-frame symmetries (time flip, reflection, both) of each family are
    evaluated explicitly.
    """
    best = math.inf
    for fam in _RS_FAMILIES:
        d = fam(x, y, phi)
        if d < best:
            best = d
        d = fam(-x, y, -phi)
        if d < best:
            best = d
        d = fam(x, -y, -phi)
        if d < best:
            best = d
        d = fam(-x, -y, phi)
        if d < best:
            best = d
    return best
