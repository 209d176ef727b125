"""Scene generation, dynamic drift and scene-file (de)serialization.

A scene holds start/goal, an ordered obstacle list (each with an optional
gain override and drift velocity), the boundary walls of the corridor
workspace, planner gains, integration parameters and the seed that makes
everything reproducible.

The randomized benchmark classes place obstacles in the transit corridor
between start (0, 1, 0) and goal (0, -1, 0); "longer" variants move the goal
50% farther out.  Drifting obstacles translate at constant velocity and
reflect off a containment box so they never reach the start/goal regions.
"""

from dataclasses import dataclass, field
from enum import Enum
import json
import math

import numpy as np

from .errors import GenerationFailure, SceneSchemaError
from .forces import Gains
from .primitives import (
    Cube,
    Cylinder,
    Primitive,
    RectPlane,
    Segment,
    Sphere,
    as_vec3,
    translated,
)
from .queries import distance
from .seeding import generation_rng
from .sim import SimParams

SCENE_FORMAT = "geopf-scene-v1"

# Workspace corridor: |x|,|z| up to the wall coordinate, y spans past the
# endpoints by a margin.  Obstacles are sampled inside a smaller band so the
# start and goal regions stay clear.
WALL_XZ = 0.5
WALL_Y_MARGIN = 0.2
OBSTACLE_BAND_XZ = 0.45
OBSTACLE_BAND_Y = 0.6
# Clearance used while sampling (the guaranteed invariant is >= 0.05 m).
GENERATION_CLEARANCE = 0.2
MIN_CLEARANCE = 0.05
MAX_DRIFT_SPEED = 0.05
MAX_REJECTIONS = 10_000

START = (0.0, 1.0, 0.0)
GOAL = (0.0, -1.0, 0.0)


class SceneClass(Enum):
    LINE_EASY = "line_easy"
    LINE_HARD = "line_hard"
    PLANE_EASY = "plane_easy"
    PLANE_EASY_LONGER = "plane_easy_longer"
    PLANE_HARD = "plane_hard"
    PLANE_HARD_LONGER = "plane_hard_longer"
    MAZE = "maze"
    COMPLEX = "complex"
    DYNAMIC_EASY = "dynamic_easy"
    DYNAMIC_HARD = "dynamic_hard"


@dataclass(frozen=True)
class Obstacle:
    """A primitive plus optional per-obstacle gain and drift velocity."""

    primitive: Primitive
    gain: float | None = None
    drift: np.ndarray | None = None

    def __post_init__(self):
        if self.gain is not None:
            object.__setattr__(self, "gain", float(self.gain))
            if self.gain <= 0:
                raise ValueError("obstacle gain override must be > 0")
        if self.drift is not None:
            object.__setattr__(self, "drift", as_vec3(self.drift))


def _warm(prim: Primitive):
    """Populate lazy caches so the timed force path never computes them."""
    prim.bounding_sphere
    if isinstance(prim, Segment):
        prim._u
    elif isinstance(prim, RectPlane):
        prim._n
    elif isinstance(prim, Cylinder):
        prim._axis
    elif isinstance(prim, Cube):
        for face in prim.faces:
            face._n
        prim._outward


def _fold(x0: float, v: float, t: float, lo: float, hi: float) -> float:
    """Triangle-wave reflection of x0 + v*t inside [lo, hi]."""
    span = hi - lo
    if span <= 0.0 or v == 0.0 or t == 0.0:
        return x0
    u = (x0 - lo + v * t) % (2.0 * span)
    return lo + (u if u <= span else 2.0 * span - u)


@dataclass
class Scene:
    """Everything needed to reproduce one trial."""

    start: np.ndarray
    goal: np.ndarray
    obstacles: list
    boundary: list
    gains: Gains = field(default_factory=Gains)
    sim: SimParams = field(default_factory=SimParams)
    seed: int = 0
    scene_class: str = "custom"
    drift_bounds: tuple | None = None

    def __post_init__(self):
        self.start = as_vec3(self.start)
        self.goal = as_vec3(self.goal)
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.drift_bounds is not None:
            lo, hi = self.drift_bounds
            self.drift_bounds = (as_vec3(lo), as_vec3(hi))
        self._static = [obs.primitive for obs in self.obstacles]
        for prim in self._static:
            _warm(prim)
        for wall in self.boundary:
            _warm(wall)
        self._dynamic = [
            i for i, obs in enumerate(self.obstacles) if obs.drift is not None
        ]

    @property
    def has_dynamic(self) -> bool:
        return bool(self._dynamic) and self.drift_bounds is not None

    def obstacle_offset(self, index: int, t: float) -> tuple:
        """Rigid translation of obstacle ``index`` at obstacle time ``t``."""
        obs = self.obstacles[index]
        if obs.drift is None or self.drift_bounds is None:
            return (0.0, 0.0, 0.0)
        lo, hi = self.drift_bounds
        cx, cy, cz, r = obs.primitive.bounding_sphere
        centers = (cx, cy, cz)
        out = []
        for k in range(3):
            out.append(
                _fold(centers[k], float(obs.drift[k]), t, float(lo[k]) + r, float(hi[k]) - r)
                - centers[k]
            )
        return tuple(out)

    def primitives_at_step(self, step: int) -> list:
        """Obstacle primitives advanced to the step's obstacle time.

        Obstacles move before each force evaluation, so step ``i`` sees the
        obstacles at time ``(i + 1) * dt``.  Static scenes return a shared
        list.
        """
        if not self.has_dynamic:
            return self._static
        t = (step + 1) * self.sim.dt
        prims = list(self._static)
        for i in self._dynamic:
            off = self.obstacle_offset(i, t)
            if off != (0.0, 0.0, 0.0):
                prim = translated(self.obstacles[i].primitive, off)
                _warm(prim)
                prims[i] = prim
        return prims


def corridor_boundary(y_min: float, y_max: float, half_xz: float = WALL_XZ) -> list:
    """Six rectangle walls enclosing the corridor box."""
    x0, x1 = -half_xz, half_xz
    z0, z1 = -half_xz, half_xz
    y0, y1 = y_min, y_max

    def plane(a, b, c, d):
        return RectPlane(np.array(a), np.array(b), np.array(c), np.array(d))

    return [
        plane((x0, y0, z0), (x0, y0, z1), (x0, y1, z1), (x0, y1, z0)),  # x = -half
        plane((x1, y0, z0), (x1, y0, z1), (x1, y1, z1), (x1, y1, z0)),  # x = +half
        plane((x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0)),  # z = -half
        plane((x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)),  # z = +half
        plane((x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1)),  # y = y_min
        plane((x0, y1, z0), (x1, y1, z0), (x1, y1, z1), (x0, y1, z1)),  # y = y_max
    ]


# ---------------------------------------------------------------------------
# Randomized generation
# ---------------------------------------------------------------------------


def _random_basis(rng) -> tuple:
    """Uniformly random right-handed orthonormal basis."""
    while True:
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        na = np.linalg.norm(a)
        if na < 1e-9:
            continue
        e1 = a / na
        b = b - (b @ e1) * e1
        nb = np.linalg.norm(b)
        if nb < 1e-9:
            continue
        e2 = b / nb
        return e1, e2, np.cross(e1, e2)


def _sample_center(rng, y_lo, y_hi):
    return np.array(
        (
            rng.uniform(-OBSTACLE_BAND_XZ, OBSTACLE_BAND_XZ),
            rng.uniform(y_lo, y_hi),
            rng.uniform(-OBSTACLE_BAND_XZ, OBSTACLE_BAND_XZ),
        )
    )


def _sample_primitive(rng, kind: str, center) -> Primitive:
    e1, e2, e3 = _random_basis(rng)
    if kind == "segment":
        length = rng.uniform(0.2, 0.4)
        return Segment(center - 0.5 * length * e1, center + 0.5 * length * e1)
    if kind == "plane":
        a = rng.uniform(0.1, 0.3)
        b = rng.uniform(0.1, 0.3)
        ha, hb = 0.5 * a * e1, 0.5 * b * e2
        return RectPlane(center + ha + hb, center - ha + hb, center - ha - hb, center + ha - hb)
    if kind == "cube":
        a = rng.uniform(0.08, 0.2)
        b = rng.uniform(0.08, 0.2)
        c = rng.uniform(0.08, 0.2)
        ha, hb, hc = 0.5 * a * e1, 0.5 * b * e2, 0.5 * c * e3
        bottom = [
            center + ha + hb - hc,
            center - ha + hb - hc,
            center - ha - hb - hc,
            center + ha - hb - hc,
        ]
        top = [v + 2.0 * hc for v in bottom]
        return Cube(*bottom, *top)
    if kind == "cylinder":
        radius = rng.uniform(0.03, 0.08)
        length = rng.uniform(0.1, 0.3)
        return Cylinder(center - 0.5 * length * e1, center + 0.5 * length * e1, radius)
    raise ValueError(f"unknown primitive kind {kind!r}")


def _inside_box(prim: Primitive, lo, hi) -> bool:
    cx, cy, cz, r = prim.bounding_sphere
    return (
        lo[0] + r <= cx <= hi[0] - r
        and lo[1] + r <= cy <= hi[1] - r
        and lo[2] + r <= cz <= hi[2] - r
    )


_CLASS_COUNTS = {
    SceneClass.LINE_EASY: {"segment": (5, 10)},
    SceneClass.LINE_HARD: {"segment": (10, 50)},
    SceneClass.PLANE_EASY: {"plane": (2, 8)},
    SceneClass.PLANE_EASY_LONGER: {"plane": (2, 8)},
    SceneClass.PLANE_HARD: {"plane": (10, 40)},
    SceneClass.PLANE_HARD_LONGER: {"plane": (10, 40)},
}

_LONGER = {SceneClass.PLANE_EASY_LONGER, SceneClass.PLANE_HARD_LONGER}
# Type mix for the dynamic classes (segment-heavy like the composite scenes).
_MIX = ("segment", "segment", "plane", "cube", "cylinder")


def generate(scene_class: SceneClass, seed: int) -> Scene:
    """Deterministically generate a randomized scene of the given class.

    Raises:
        GenerationFailure: when placement constraints reject 10^4 candidates.
    """
    scene_class = SceneClass(scene_class)
    if scene_class is SceneClass.MAZE:
        return maze_scene(seed=seed)

    rng = generation_rng(seed)
    start = np.array(START)
    goal = np.array(GOAL)
    if scene_class in _LONGER:
        goal = start + 1.5 * (goal - start)

    band_lo = (-OBSTACLE_BAND_XZ, -OBSTACLE_BAND_Y, -OBSTACLE_BAND_XZ)
    band_hi = (OBSTACLE_BAND_XZ, OBSTACLE_BAND_Y, OBSTACLE_BAND_XZ)

    kinds: list = []
    if scene_class in _CLASS_COUNTS:
        for kind, (lo, hi) in _CLASS_COUNTS[scene_class].items():
            kinds.extend([kind] * int(rng.integers(lo, hi + 1)))
    elif scene_class is SceneClass.COMPLEX:
        kinds.extend(["segment"] * int(rng.integers(5, 11)))
        kinds.extend(["plane"] * int(rng.integers(2, 6)))
        kinds.extend(
            [("cube" if rng.random() < 0.5 else "cylinder") for _ in range(int(rng.integers(2, 4)))]
        )
    elif scene_class is SceneClass.DYNAMIC_EASY:
        kinds.extend(_MIX[int(rng.integers(0, len(_MIX)))] for _ in range(int(rng.integers(5, 11))))
    elif scene_class is SceneClass.DYNAMIC_HARD:
        kinds.extend(_MIX[int(rng.integers(0, len(_MIX)))] for _ in range(int(rng.integers(10, 21))))
    else:
        raise ValueError(f"no generator for scene class {scene_class}")

    rejections = 0
    primitives = []
    for kind in kinds:
        while True:
            center = _sample_center(rng, -OBSTACLE_BAND_Y + 0.1, OBSTACLE_BAND_Y - 0.1)
            prim = _sample_primitive(rng, kind, center)
            ok = (
                _inside_box(prim, band_lo, band_hi)
                and distance(start, prim) >= GENERATION_CLEARANCE
                and distance(goal, prim) >= GENERATION_CLEARANCE
            )
            if ok:
                primitives.append(prim)
                break
            rejections += 1
            if rejections >= MAX_REJECTIONS:
                raise GenerationFailure(
                    f"{scene_class.value} seed {seed}: {rejections} rejected placements"
                )

    dynamic_count = 0
    if scene_class is SceneClass.DYNAMIC_EASY:
        dynamic_count = round(len(primitives) / 3)
    elif scene_class is SceneClass.DYNAMIC_HARD:
        dynamic_count = round(len(primitives) / 2)
    drifting = set()
    if dynamic_count:
        drifting = set(rng.choice(len(primitives), size=dynamic_count, replace=False).tolist())

    obstacles = []
    for i, prim in enumerate(primitives):
        drift = None
        if i in drifting:
            direction = _random_basis(rng)[0]
            drift = rng.uniform(0.01, MAX_DRIFT_SPEED) * direction
        obstacles.append(Obstacle(prim, drift=drift))

    y_min = min(float(goal[1]), float(start[1])) - WALL_Y_MARGIN
    y_max = max(float(goal[1]), float(start[1])) + WALL_Y_MARGIN
    return Scene(
        start=start,
        goal=goal,
        obstacles=obstacles,
        boundary=corridor_boundary(y_min, y_max),
        gains=Gains(),
        sim=SimParams(),
        seed=seed,
        scene_class=scene_class.value,
        drift_bounds=(np.array(band_lo), np.array(band_hi)) if drifting else None,
    )


def maze_scene(seed: int = 0) -> Scene:
    """Fixed trap scene: a frontal wall with a duct-shaped tunnel off-axis.

    The straight start-goal line pierces the central wall; the only passage
    is the rectangular duct between x = 0.15 and the x = +0.5 boundary wall.
    """

    def plane(a, b, c, d):
        return RectPlane(np.array(a), np.array(b), np.array(c), np.array(d))

    x_in, x_out = 0.15, WALL_XZ
    z_half = 0.15
    y_half = 0.25
    walls = [
        # Frontal wall at y = 0 left of the duct opening.
        plane((-0.5, 0, -0.5), (x_in, 0, -0.5), (x_in, 0, 0.5), (-0.5, 0, 0.5)),
        # Frontal wall pieces above and below the opening.
        plane((x_in, 0, z_half), (x_out, 0, z_half), (x_out, 0, 0.5), (x_in, 0, 0.5)),
        plane((x_in, 0, -0.5), (x_out, 0, -0.5), (x_out, 0, -z_half), (x_in, 0, -z_half)),
        # Duct walls along y.
        plane((x_in, -y_half, z_half), (x_out, -y_half, z_half), (x_out, y_half, z_half), (x_in, y_half, z_half)),
        plane((x_in, -y_half, -z_half), (x_out, -y_half, -z_half), (x_out, y_half, -z_half), (x_in, y_half, -z_half)),
        plane((x_in, -y_half, -z_half), (x_in, -y_half, z_half), (x_in, y_half, z_half), (x_in, y_half, -z_half)),
    ]
    return Scene(
        start=np.array(START),
        goal=np.array(GOAL),
        obstacles=[Obstacle(w) for w in walls],
        boundary=corridor_boundary(GOAL[1] - WALL_Y_MARGIN, START[1] + WALL_Y_MARGIN),
        gains=Gains(),
        sim=SimParams(),
        seed=seed,
        scene_class=SceneClass.MAZE.value,
    )


# ---------------------------------------------------------------------------
# Scene files
# ---------------------------------------------------------------------------


def _vec_list(v) -> list:
    return [float(x) for x in v]


def _encode_primitive(prim: Primitive) -> dict:
    if isinstance(prim, Sphere):
        return {"type": "sphere", "center": _vec_list(prim.center), "radius": prim.radius}
    if isinstance(prim, Segment):
        return {"type": "segment", "p1": _vec_list(prim.p1), "p2": _vec_list(prim.p2)}
    if isinstance(prim, RectPlane):
        return {"type": "plane", "corners": [_vec_list(v) for v in prim.corners]}
    if isinstance(prim, Cube):
        return {"type": "cube", "corners": [_vec_list(v) for v in prim.corners]}
    if isinstance(prim, Cylinder):
        return {
            "type": "cylinder",
            "a1": _vec_list(prim.a1),
            "a2": _vec_list(prim.a2),
            "radius": prim.radius,
        }
    raise TypeError(f"unsupported primitive type: {type(prim).__name__}")


def scene_to_document(scene: Scene) -> dict:
    """Canonical JSON-ready document for a scene."""
    obstacles = []
    for obs in scene.obstacles:
        entry = _encode_primitive(obs.primitive)
        if obs.gain is not None:
            entry["gain"] = obs.gain
        if obs.drift is not None:
            entry["drift"] = _vec_list(obs.drift)
        obstacles.append(entry)
    doc = {
        "format": SCENE_FORMAT,
        "class": scene.scene_class,
        "seed": scene.seed,
        "start": _vec_list(scene.start),
        "goal": _vec_list(scene.goal),
        "gains": {
            "k_attr": scene.gains.k_attr,
            "k_rep": scene.gains.k_rep,
            "activation_radius": scene.gains.activation_radius,
        },
        "sim": {
            "mass": scene.sim.mass,
            "dt": scene.sim.dt,
            "damping": scene.sim.damping,
            "max_speed": scene.sim.max_speed,
            "goal_radius": scene.sim.goal_radius,
            "max_steps": scene.sim.max_steps,
        },
        "drift_bounds": None
        if scene.drift_bounds is None
        else [_vec_list(scene.drift_bounds[0]), _vec_list(scene.drift_bounds[1])],
        "boundary": [[_vec_list(v) for v in wall.corners] for wall in scene.boundary],
        "obstacles": obstacles,
    }
    return doc


def save_scene(scene: Scene, path):
    """Write the scene file (stable bytes for identical scenes)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_document(scene), fh, indent=2)
        fh.write("\n")


class _Reader:
    """Strict traversal of a scene document with field-path diagnostics."""

    def __init__(self, doc, path=""):
        if not isinstance(doc, dict):
            raise SceneSchemaError("expected an object", path or "<root>")
        self.doc = doc
        self.path = path
        self.seen = set()

    def _label(self, key):
        return f"{self.path}.{key}" if self.path else key

    def get(self, key, kind, required=True):
        self.seen.add(key)
        if key not in self.doc:
            if required:
                raise SceneSchemaError("missing required field", self._label(key))
            return None
        value = self.doc[key]
        if kind == "number":
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise SceneSchemaError("expected a finite number", self._label(key))
            return float(value)
        if kind == "int":
            if not isinstance(value, int) or isinstance(value, bool):
                raise SceneSchemaError("expected an integer", self._label(key))
            return value
        if kind == "string":
            if not isinstance(value, str):
                raise SceneSchemaError("expected a string", self._label(key))
            return value
        if kind == "vec3":
            if (
                not isinstance(value, list)
                or len(value) != 3
                or not all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)
                    for x in value
                )
            ):
                raise SceneSchemaError("expected [x, y, z] numbers", self._label(key))
            return np.array([float(x) for x in value])
        if kind == "list":
            if not isinstance(value, list):
                raise SceneSchemaError("expected a list", self._label(key))
            return value
        if kind == "object":
            return _Reader(value, self._label(key))
        if kind == "raw":
            return value
        raise AssertionError(kind)

    def finish(self):
        unknown = set(self.doc) - self.seen
        if unknown:
            name = sorted(unknown)[0]
            raise SceneSchemaError("unknown field", self._label(name))


def _decode_corners(raw, path, count):
    if not isinstance(raw, list) or len(raw) != count:
        raise SceneSchemaError(f"expected {count} corners", path)
    out = []
    for i, v in enumerate(raw):
        if (
            not isinstance(v, list)
            or len(v) != 3
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in v)
        ):
            raise SceneSchemaError("expected [x, y, z] numbers", f"{path}[{i}]")
        out.append(np.array([float(x) for x in v]))
    return out


def _decode_primitive(reader: _Reader) -> Primitive:
    kind = reader.get("type", "string")
    try:
        if kind == "sphere":
            return Sphere(reader.get("center", "vec3"), reader.get("radius", "number"))
        if kind == "segment":
            return Segment(reader.get("p1", "vec3"), reader.get("p2", "vec3"))
        if kind == "plane":
            corners = _decode_corners(
                reader.get("corners", "raw"), reader._label("corners"), 4
            )
            return RectPlane(*corners)
        if kind == "cube":
            corners = _decode_corners(
                reader.get("corners", "raw"), reader._label("corners"), 8
            )
            return Cube(*corners)
        if kind == "cylinder":
            return Cylinder(
                reader.get("a1", "vec3"), reader.get("a2", "vec3"), reader.get("radius", "number")
            )
    except ValueError as exc:
        raise SceneSchemaError(str(exc), reader.path) from exc
    raise SceneSchemaError(f"unknown primitive type {kind!r}", reader._label("type"))


def document_to_scene(doc) -> Scene:
    """Validate a scene document and build the Scene (strict: unknown fields
    and malformed values are rejected with their field path)."""
    root = _Reader(doc)
    fmt = root.get("format", "string")
    if fmt != SCENE_FORMAT:
        raise SceneSchemaError(f"unsupported format {fmt!r}", "format")
    scene_class = root.get("class", "string")
    seed = root.get("seed", "int")
    start = root.get("start", "vec3")
    goal = root.get("goal", "vec3")

    gains_r = root.get("gains", "object")
    try:
        gains = Gains(
            k_attr=gains_r.get("k_attr", "number"),
            k_rep=gains_r.get("k_rep", "number"),
            activation_radius=gains_r.get("activation_radius", "number"),
        )
    except ValueError as exc:
        raise SceneSchemaError(str(exc), "gains") from exc
    gains_r.finish()

    sim_r = root.get("sim", "object")
    try:
        sim = SimParams(
            mass=sim_r.get("mass", "number"),
            dt=sim_r.get("dt", "number"),
            damping=sim_r.get("damping", "number"),
            max_speed=sim_r.get("max_speed", "number"),
            goal_radius=sim_r.get("goal_radius", "number"),
            max_steps=sim_r.get("max_steps", "int"),
        )
    except ValueError as exc:
        raise SceneSchemaError(str(exc), "sim") from exc
    sim_r.finish()

    drift_bounds = None
    raw_bounds = root.get("drift_bounds", "raw")
    if raw_bounds is not None:
        bounds = _decode_corners(raw_bounds, "drift_bounds", 2)
        drift_bounds = (bounds[0], bounds[1])

    boundary = []
    for j, raw in enumerate(root.get("boundary", "list")):
        corners = _decode_corners(raw, f"boundary[{j}]", 4)
        try:
            boundary.append(RectPlane(*corners))
        except ValueError as exc:
            raise SceneSchemaError(str(exc), f"boundary[{j}]") from exc

    obstacles = []
    for i, raw in enumerate(root.get("obstacles", "list")):
        reader = _Reader(raw, f"obstacles[{i}]")
        prim = _decode_primitive(reader)
        gain = reader.get("gain", "number", required=False)
        drift_raw = reader.get("drift", "raw", required=False)
        drift = None
        if drift_raw is not None:
            drift = _decode_corners([drift_raw], reader._label("drift"), 1)[0]
        reader.finish()
        try:
            obstacles.append(Obstacle(prim, gain=gain, drift=drift))
        except ValueError as exc:
            raise SceneSchemaError(str(exc), f"obstacles[{i}]") from exc

    root.finish()
    return Scene(
        start=start,
        goal=goal,
        obstacles=obstacles,
        boundary=boundary,
        gains=gains,
        sim=sim,
        seed=seed,
        scene_class=scene_class,
        drift_bounds=drift_bounds,
    )


def load_scene(path) -> Scene:
    """Load and validate a scene file.

    Raises:
        SceneSchemaError: on malformed JSON or schema violations.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneSchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return document_to_scene(doc)
