"""Attractive/repulsive force generation from closest features.

The repulsion law is inverse-distance: ``F = k / d`` along the feature's
repulsion direction, active only below the activation radius and clamped near
contact.  Rectangles (and cylinder caps) additionally apply a trap-correction
heuristic: when the straight robot-goal stretch pierces the obstacle's
interior, the repulsion is redirected parallel to the surface toward the
nearest edge so attraction cannot cancel it.

All term generators share the scalar kernels from :mod:`geopf.queries`; the
public functions wrap them in numpy vectors, the simulator consumes the raw
scalar variants.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import CollisionSignal
from .primitives import DEGENERACY_EPS, Cube, Cylinder, RectPlane, as_vec3, unit3
from .queries import (
    ClosestFeature,
    FeatureKind,
    _cube_kernel,
    _cylinder_kernel,
    _kernel_for,
    _plane_inside_kernel,
    _plane_kernel,
    _segment_kernel,
)

# Repulsion magnitude is clamped to k / D_MIN below this distance.
D_MIN = 1e-4
# Two feature distances within this margin count as an exact tie.
TIE_EPS = 1e-12
# Magnitude of the random nudge used to break exact ties.
TIE_NOISE = 1e-9


@dataclass(frozen=True)
class Gains:
    """Planner gains: goal attraction, default repulsion, activation radius."""

    k_attr: float = 1.0
    k_rep: float = 0.1
    activation_radius: float = 0.3

    def __post_init__(self):
        for name in ("k_attr", "k_rep", "activation_radius"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ValueError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class ForceBreakdown:
    """Resultant force and its terms.

    ``resultant`` equals ``attractive``, plus the per-obstacle terms in list
    order, plus ``boundary``, summed left to right -- bit-for-bit.
    """

    attractive: np.ndarray
    per_obstacle: list
    boundary: np.ndarray
    resultant: np.ndarray


def attractive_force(robot, goal, gains: Gains) -> np.ndarray:
    """Constant-magnitude pull toward the goal: k_attr * unit(goal - robot).

    Returns the zero vector when the robot sits on the goal (termination is
    handled before force evaluation).
    """
    r = as_vec3(robot)
    g = as_vec3(goal)
    d = g - r
    n = math.sqrt(float(d @ d))
    if n <= DEGENERACY_EPS:
        return np.zeros(3)
    return (gains.k_attr / n) * d


def repulsive_force(feature: ClosestFeature, k: float, activation: float) -> np.ndarray:
    """Inverse-distance repulsion along the feature direction.

    Zero at or beyond the activation radius; magnitude clamped to
    ``k / D_MIN`` near contact.

    Raises:
        CollisionSignal: when the feature distance is <= 0 (penetration is
            expected to be handled upstream).
    """
    d = feature.distance
    if d <= 0.0:
        raise CollisionSignal(None, d)
    if d >= activation:
        return np.zeros(3)
    return (k / max(d, D_MIN)) * feature.direction


# ---------------------------------------------------------------------------
# Trap-correction heuristic
# ---------------------------------------------------------------------------


def _nearest_edge(rx, ry, rz, plane: RectPlane, rng):
    """Index and query result of the rectangle edge nearest to the robot.

    Exact ties (within TIE_EPS) are broken by nudging the evaluation point by
    TIE_NOISE toward an RNG-chosen corner and re-measuring.
    """
    results = [_segment_kernel(rx, ry, rz, e) for e in plane.edges]
    order = sorted(range(4), key=lambda i: results[i][0])
    if results[order[1]][0] - results[order[0]][0] >= TIE_EPS or rng is None:
        return order[0], results[order[0]]
    vx, vy, vz = plane._vs[int(rng.integers(0, 4))]
    dx, dy, dz = vx - rx, vy - ry, vz - rz
    m = math.sqrt(dx * dx + dy * dy + dz * dz)
    if m <= DEGENERACY_EPS:
        return order[0], results[order[0]]
    nx = rx + TIE_NOISE * dx / m
    ny = ry + TIE_NOISE * dy / m
    nz = rz + TIE_NOISE * dz / m
    nudged = [_segment_kernel(nx, ny, nz, e) for e in plane.edges]
    k = min(range(4), key=lambda i: nudged[i][0])
    return k, results[k]


def _correction_direction(rx, ry, rz, gx, gy, gz, plane: RectPlane, inside_test, rng):
    """Surface-parallel corrected direction, or None when no trap is present.

    The robot-goal stretch must pierce the supporting plane at a point
    accepted by ``inside_test``; the returned unit direction is parallel to
    the surface, perpendicular to the nearest edge, signed toward it.
    """
    nx, ny, nz = plane._n
    v1x, v1y, v1z = plane._vs[0]
    off = (rx - v1x) * nx + (ry - v1y) * ny + (rz - v1z) * nz
    dxg, dyg, dzg = rx - gx, ry - gy, rz - gz
    glen = math.sqrt(dxg * dxg + dyg * dyg + dzg * dzg)
    if glen <= DEGENERACY_EPS:
        return None
    ux, uy, uz = dxg / glen, dyg / glen, dzg / glen  # unit goal -> robot
    denom = ux * nx + uy * ny + uz * nz
    if abs(denom) < 1e-9:
        return None  # line parallel to the plane
    d_inter = off / denom
    if d_inter <= 0.0 or d_inter > glen:
        return None  # the plane is not between robot and goal
    px, py, pz = rx - d_inter * ux, ry - d_inter * uy, rz - d_inter * uz
    if not inside_test(px, py, pz):
        return None
    k, edge_res = _nearest_edge(rx, ry, rz, plane, rng)
    ex, ey, ez = plane.edges[k]._u
    cx = ny * ez - nz * ey
    cy = nz * ex - nx * ez
    cz = nx * ey - ny * ex
    # Robot-to-edge direction decides the sign toward the nearest edge.
    tx, ty, tz = edge_res[4] - rx, edge_res[5] - ry, edge_res[6] - rz
    s = cx * tx + cy * ty + cz * tz
    if s < 0.0:
        return (-cx, -cy, -cz)
    return (cx, cy, cz)


def _plane_term(rx, ry, rz, gx, gy, gz, plane, k, activation, rng, correction):
    """Scalar force term and distance for a rectangle obstacle."""
    kern = _plane_kernel(rx, ry, rz, plane)
    d = kern[0]
    if d <= 0.0 or d >= activation:
        return 0.0, 0.0, 0.0, d
    if correction:

        def inside(px, py, pz):
            return _plane_inside_kernel(px, py, pz, plane)

        corr = _correction_direction(rx, ry, rz, gx, gy, gz, plane, inside, rng)
        if corr is not None:
            mag = k / max(d, D_MIN)
            return mag * corr[0], mag * corr[1], mag * corr[2], d
    mag = k / max(d, D_MIN)
    return mag * kern[1], mag * kern[2], mag * kern[3], d


def _cap_square(cyl: Cylinder, kind: FeatureKind, rx, ry, rz, rng):
    """Inscribed square spanning the cap facing the robot.

    The square's corners sit on the cap rim along the radial direction to the
    robot and its in-plane perpendicular; for an on-axis robot the radial
    direction is drawn from the RNG (or a fixed fallback axis).
    """
    ux, uy, uz = cyl._axis
    if kind is FeatureKind.CAP_TOP:
        ccx, ccy, ccz = cyl._p2
    else:
        ccx, ccy, ccz = cyl._p1
    wx, wy, wz = rx - ccx, ry - ccy, rz - ccz
    t = wx * ux + wy * uy + wz * uz
    qx, qy, qz = wx - t * ux, wy - t * uy, wz - t * uz
    qn = math.sqrt(qx * qx + qy * qy + qz * qz)
    if qn <= DEGENERACY_EPS:
        # Radial direction undefined: pick one in the cap plane.
        seed = (1.0, 0.0, 0.0) if abs(ux) < 0.9 else (0.0, 1.0, 0.0)
        bx, by, bz = seed
        dot = bx * ux + by * uy + bz * uz
        b1 = unit3(bx - dot * ux, by - dot * uy, bz - dot * uz)
        b2 = (
            uy * b1[2] - uz * b1[1],
            uz * b1[0] - ux * b1[2],
            ux * b1[1] - uy * b1[0],
        )
        ang = float(rng.uniform(0.0, 2.0 * math.pi)) if rng is not None else 0.0
        ca, sa = math.cos(ang), math.sin(ang)
        nq = (
            ca * b1[0] + sa * b2[0],
            ca * b1[1] + sa * b2[1],
            ca * b1[2] + sa * b2[2],
        )
    else:
        nq = (qx / qn, qy / qn, qz / qn)
    # In-plane direction perpendicular to nq.
    na = (
        uy * nq[2] - uz * nq[1],
        uz * nq[0] - ux * nq[2],
        ux * nq[1] - uy * nq[0],
    )
    r = cyl.radius
    c = np.array((ccx, ccy, ccz))
    e1 = c + r * np.array(na)
    e2 = c + r * np.array(nq)
    e3 = c - r * np.array(na)
    e4 = c - r * np.array(nq)
    return RectPlane(e1, e2, e3, e4), (ccx, ccy, ccz)


def _cylinder_term(rx, ry, rz, gx, gy, gz, cyl, k, activation, rng, correction):
    """Scalar force term and distance for a cylinder obstacle."""
    kern = _cylinder_kernel(rx, ry, rz, cyl)
    d = kern[0]
    if d <= 0.0 or d >= activation:
        return 0.0, 0.0, 0.0, d
    if correction and kern[7] in (FeatureKind.CAP_TOP, FeatureKind.CAP_BOTTOM):
        square, center = _cap_square(cyl, kern[7], rx, ry, rz, rng)
        rr = cyl.radius

        def inside(px, py, pz):
            dx, dy, dz = px - center[0], py - center[1], pz - center[2]
            return dx * dx + dy * dy + dz * dz <= rr * rr

        corr = _correction_direction(rx, ry, rz, gx, gy, gz, square, inside, rng)
        if corr is not None:
            mag = k / max(d, D_MIN)
            return mag * corr[0], mag * corr[1], mag * corr[2], d
    mag = k / max(d, D_MIN)
    return mag * kern[1], mag * kern[2], mag * kern[3], d


def _cube_term(rx, ry, rz, gx, gy, gz, cube, k, activation, rng, correction):
    """Scalar force term and distance for a box obstacle.

    Each face acts as an individual rectangle, so when the nearest feature is
    a face interior the rectangle trap correction applies to that face.
    """
    kern = _cube_kernel(rx, ry, rz, cube)
    d = kern[0]
    if d <= 0.0 or d >= activation:
        return 0.0, 0.0, 0.0, d
    if correction and kern[7] is FeatureKind.FACE:
        face = cube.faces[kern[8][0] - 1]

        def inside(px, py, pz):
            return _plane_inside_kernel(px, py, pz, face)

        corr = _correction_direction(rx, ry, rz, gx, gy, gz, face, inside, rng)
        if corr is not None:
            mag = k / max(d, D_MIN)
            return mag * corr[0], mag * corr[1], mag * corr[2], d
    mag = k / max(d, D_MIN)
    return mag * kern[1], mag * kern[2], mag * kern[3], d


def _generic_term(rx, ry, rz, prim, k, activation):
    """Scalar force term and distance for spheres and segments."""
    kern = _kernel_for(prim)(rx, ry, rz, prim)
    d = kern[0]
    if d <= 0.0 or d >= activation:
        return 0.0, 0.0, 0.0, d
    mag = k / max(d, D_MIN)
    return mag * kern[1], mag * kern[2], mag * kern[3], d


def obstacle_force_term(rx, ry, rz, gx, gy, gz, prim, k, activation, rng, correction):
    """Dispatch the scalar force term for one primitive.

    Returns (fx, fy, fz, distance); the force is zero outside the activation
    radius and the caller is responsible for reacting to distance <= 0.
    """
    if isinstance(prim, RectPlane):
        return _plane_term(rx, ry, rz, gx, gy, gz, prim, k, activation, rng, correction)
    if isinstance(prim, Cylinder):
        return _cylinder_term(rx, ry, rz, gx, gy, gz, prim, k, activation, rng, correction)
    if isinstance(prim, Cube):
        return _cube_term(rx, ry, rz, gx, gy, gz, prim, k, activation, rng, correction)
    return _generic_term(rx, ry, rz, prim, k, activation)


def plane_force_with_correction(
    robot, goal, plane: RectPlane, gains: Gains, rng=None, k=None, correction=True
) -> np.ndarray:
    """Repulsive force of a rectangle including the trap correction.

    When the robot-goal stretch pierces the rectangle's interior, the force
    direction is replaced by the surface-parallel direction toward the
    nearest edge (magnitude still k/d); otherwise the ordinary orthogonal or
    side repulsion applies.

    Raises:
        CollisionSignal: when the robot touches the rectangle.
    """
    r = as_vec3(robot)
    g = as_vec3(goal)
    krep = gains.k_rep if k is None else float(k)
    fx, fy, fz, d = _plane_term(
        r[0], r[1], r[2], g[0], g[1], g[2], plane, krep, gains.activation_radius, rng, correction
    )
    if d <= 0.0:
        raise CollisionSignal(None, d)
    return np.array((fx, fy, fz))


def cylinder_cap_correction(
    robot, goal, cyl: Cylinder, gains: Gains, rng=None, k=None
) -> np.ndarray:
    """Repulsive force of a cylinder with the circular-cap trap correction.

    Applies when the closest feature is a cap: the cap is spanned by an
    inscribed square whose rim corners face the robot, the rectangle
    correction logic runs against it, and the piercing test uses the radial
    distance from the cap center instead of the four-indicator test.

    Raises:
        CollisionSignal: when the robot touches the cylinder.
    """
    r = as_vec3(robot)
    g = as_vec3(goal)
    krep = gains.k_rep if k is None else float(k)
    fx, fy, fz, d = _cylinder_term(
        r[0], r[1], r[2], g[0], g[1], g[2], cyl, krep, gains.activation_radius, rng, True
    )
    if d <= 0.0:
        raise CollisionSignal(None, d)
    return np.array((fx, fy, fz))


def resultant_force(robot, goal, scene, rng=None, correction=True) -> ForceBreakdown:
    """Aggregate the attractive, per-obstacle and boundary forces of a scene.

    Obstacles are evaluated in scene order, boundary walls last; the
    breakdown lists one term per obstacle within its activation radius.

    Raises:
        CollisionSignal: when any obstacle or wall is touched or penetrated,
            carrying its identifier.
    """
    r = as_vec3(robot)
    g = as_vec3(goal)
    rx, ry, rz = float(r[0]), float(r[1]), float(r[2])
    gx, gy, gz = float(g[0]), float(g[1]), float(g[2])
    gains = scene.gains
    act = gains.activation_radius

    attractive = attractive_force(r, g, gains)
    per_obstacle = []
    for i, obs in enumerate(scene.obstacles):
        k = obs.gain if obs.gain is not None else gains.k_rep
        fx, fy, fz, d = obstacle_force_term(
            rx, ry, rz, gx, gy, gz, obs.primitive, k, act, rng, correction
        )
        if d <= 0.0:
            raise CollisionSignal(f"obstacle[{i}]", d)
        if d < act:
            per_obstacle.append((f"obstacle[{i}]", np.array((fx, fy, fz))))
    bx = by = bz = 0.0
    for j, wall in enumerate(scene.boundary):
        fx, fy, fz, d = _plane_term(
            rx, ry, rz, gx, gy, gz, wall, gains.k_rep, act, rng, correction
        )
        if d <= 0.0:
            raise CollisionSignal(f"boundary[{j}]", d)
        bx += fx
        by += fy
        bz += fz
    boundary = np.array((bx, by, bz))

    resultant = attractive
    for _, term in per_obstacle:
        resultant = resultant + term
    resultant = resultant + boundary
    return ForceBreakdown(
        attractive=attractive,
        per_obstacle=per_obstacle,
        boundary=boundary,
        resultant=resultant,
    )
