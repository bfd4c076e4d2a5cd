"""Domain model for localization instances.

An instance holds m anchors with known coordinates, n sensors with unknown
coordinates (optionally with ground truth attached), and a list of measured
distances on sensor-sensor and anchor-sensor pairs.  Anchor-anchor pairs are
never stored: both endpoints are known, so the measurement carries no
information.

Instances are immutable after construction and all operations here are pure
functions, so they are safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SS",
    "AS",
    "EdgeMeasurement",
    "NetworkInstance",
    "InstanceFormatError",
    "build_unit_disk_instance",
    "residual_error",
    "rmsd",
    "save_instance",
    "load_instance",
]

SS = "ss"  # sensor-sensor edge
AS = "as"  # anchor-sensor edge

# Tolerance used to cross-check stored distances against ground truth.
TRUTH_TOLERANCE = 1e-12


class InstanceFormatError(ValueError):
    """Raised for malformed instance files; the message names the bad field."""


@dataclass(frozen=True)
class EdgeMeasurement:
    """One measured distance.

    For kind "ss" both i and j index sensors; for kind "as", i indexes
    anchors and j indexes sensors.  Indices are 0-based.
    """

    kind: str
    i: int
    j: int
    dist: float

    def key(self):
        """Canonical identity of the edge (sensor pairs are unordered)."""
        if self.kind == SS:
            return (SS, min(self.i, self.j), max(self.i, self.j))
        return (AS, self.i, self.j)


def _as_points(arr, name) -> np.ndarray:
    pts = np.asarray(arr, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array of coordinates, got shape {pts.shape}")
    return pts


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """A localization problem instance.

    anchors has shape (m, d) with m >= d + 1; sensor_truth, when present,
    has shape (n_sensors, d) and every stored distance must match it.
    """

    dimension: int
    anchors: np.ndarray
    n_sensors: int
    edges: tuple[EdgeMeasurement, ...]
    sensor_truth: np.ndarray | None = None

    def __post_init__(self):
        d = self.dimension
        if d < 1:
            raise ValueError("dimension must be a positive integer")
        anchors = _as_points(self.anchors, "anchors")
        if anchors.shape[1] != d:
            raise ValueError(f"anchors have dimension {anchors.shape[1]}, expected {d}")
        m = anchors.shape[0]
        if m < d + 1:
            raise ValueError(f"need at least d+1 = {d + 1} anchors, got {m}")
        if self.n_sensors < 1:
            raise ValueError("n_sensors must be positive")
        anchors.setflags(write=False)
        object.__setattr__(self, "anchors", anchors)

        truth = self.sensor_truth
        if truth is not None:
            truth = _as_points(truth, "sensor_truth")
            if truth.shape != (self.n_sensors, d):
                raise ValueError(
                    f"sensor_truth has shape {truth.shape}, expected {(self.n_sensors, d)}"
                )
            truth.setflags(write=False)
            object.__setattr__(self, "sensor_truth", truth)

        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            if e.kind not in (SS, AS):
                raise ValueError(f"unknown edge kind {e.kind!r}")
            if e.dist < 0:
                raise ValueError(f"edge {e.key()} has negative distance {e.dist}")
            if e.kind == SS:
                if e.i == e.j:
                    raise ValueError(f"sensor-sensor edge with equal endpoints {e.i}")
                if not (0 <= e.i < self.n_sensors and 0 <= e.j < self.n_sensors):
                    raise ValueError(f"sensor index out of range in edge {e.key()}")
            else:
                if not (0 <= e.i < m):
                    raise ValueError(f"anchor index {e.i} out of range")
                if not (0 <= e.j < self.n_sensors):
                    raise ValueError(f"sensor index {e.j} out of range")
            k = e.key()
            if k in seen:
                raise ValueError(f"duplicate edge {k}")
            seen.add(k)

        if truth is not None:
            for e in self.edges:
                if e.kind == SS:
                    actual = float(np.linalg.norm(truth[e.i] - truth[e.j]))
                else:
                    actual = float(np.linalg.norm(anchors[e.i] - truth[e.j]))
                if abs(actual - e.dist) > TRUTH_TOLERANCE:
                    raise ValueError(
                        f"edge {e.key()} distance {e.dist} disagrees with ground truth {actual}"
                    )

    @property
    def n_anchors(self) -> int:
        return self.anchors.shape[0]

    def sensor_edges(self):
        return [e for e in self.edges if e.kind == SS]

    def anchor_edges(self):
        return [e for e in self.edges if e.kind == AS]

    def __eq__(self, other):
        if not isinstance(other, NetworkInstance):
            return NotImplemented
        if self.dimension != other.dimension or self.n_sensors != other.n_sensors:
            return False
        if not np.array_equal(self.anchors, other.anchors):
            return False
        if (self.sensor_truth is None) != (other.sensor_truth is None):
            return False
        if self.sensor_truth is not None and not np.array_equal(
            self.sensor_truth, other.sensor_truth
        ):
            return False
        return self.edges == other.edges


def build_unit_disk_instance(anchor_points, sensor_points, radius) -> NetworkInstance:
    """Build an instance whose edges are exactly the pairs closer than radius.

    Edge membership uses strict inequality (distance < radius); ties at
    exactly the radius are excluded.  Every edge carries the exact Euclidean
    distance, and sensor_truth is set to the given sensor coordinates.
    """
    anchors = _as_points(anchor_points, "anchor_points")
    sensors = _as_points(sensor_points, "sensor_points")
    if anchors.shape[1] != sensors.shape[1]:
        raise ValueError(
            f"anchor dimension {anchors.shape[1]} != sensor dimension {sensors.shape[1]}"
        )
    if radius <= 0:
        raise ValueError("radius must be positive")
    d = anchors.shape[1]
    n = sensors.shape[0]

    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            dist = float(np.linalg.norm(sensors[i] - sensors[j]))
            if dist < radius:
                edges.append(EdgeMeasurement(SS, i, j, dist))
    for k in range(anchors.shape[0]):
        for j in range(n):
            dist = float(np.linalg.norm(anchors[k] - sensors[j]))
            if dist < radius:
                edges.append(EdgeMeasurement(AS, k, j, dist))

    return NetworkInstance(
        dimension=d,
        anchors=anchors,
        n_sensors=n,
        edges=tuple(edges),
        sensor_truth=sensors,
    )


def residual_error(instance: NetworkInstance, positions, squared: bool = False) -> float:
    """Total edge-length error of candidate sensor positions.

    Default is the L1 sum of absolute differences of edge lengths.  With
    squared=True the differences of squared lengths are summed instead,
    which weights long edges more heavily (useful for sensitivity studies).
    """
    pos = _as_points(positions, "positions")
    if pos.shape != (instance.n_sensors, instance.dimension):
        raise ValueError(
            f"positions have shape {pos.shape}, expected {(instance.n_sensors, instance.dimension)}"
        )
    total = 0.0
    for e in instance.edges:
        if e.kind == SS:
            length = float(np.linalg.norm(pos[e.i] - pos[e.j]))
        else:
            length = float(np.linalg.norm(instance.anchors[e.i] - pos[e.j]))
        if squared:
            total += abs(length * length - e.dist * e.dist)
        else:
            total += abs(length - e.dist)
    return total


def rmsd(positions, reference) -> float:
    """Root-mean-square deviation between two point sets of equal shape."""
    a = np.asarray(positions, dtype=float)
    b = np.asarray(reference, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1))))


def _instance_to_dict(instance: NetworkInstance) -> dict:
    out = {
        "dimension": instance.dimension,
        "anchors": instance.anchors.tolist(),
        "n_sensors": instance.n_sensors,
        "edges": [
            {"kind": e.kind, "i": e.i, "j": e.j, "dist": e.dist} for e in instance.edges
        ],
    }
    if instance.sensor_truth is not None:
        out["sensors"] = instance.sensor_truth.tolist()
    return out


def save_instance(instance: NetworkInstance, destination, extra: dict | None = None):
    """Write an instance as JSON.  Floats round-trip exactly.

    extra, when given, is merged into the top-level object (unknown keys are
    ignored by load_instance); used e.g. to attach triangulation metadata.
    """
    payload = _instance_to_dict(instance)
    if extra:
        payload.update(extra)
    text = json.dumps(payload, indent=2)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text)


def _require(obj: dict, key: str, kinds, where="instance"):
    if key not in obj:
        raise InstanceFormatError(f"{where} is missing required field '{key}'")
    value = obj[key]
    if not isinstance(value, kinds):
        raise InstanceFormatError(f"field '{key}' has wrong type {type(value).__name__}")
    return value


def load_instance(source) -> NetworkInstance:
    """Read an instance from JSON (path, file object, or JSON string).

    Unknown top-level keys are ignored so files may carry extra metadata.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        p = Path(source)
        if p.exists():
            text = p.read_text()
        else:
            text = str(source)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InstanceFormatError("top-level JSON value must be an object")

    dimension = _require(obj, "dimension", int)
    anchors = _require(obj, "anchors", list)
    n_sensors = _require(obj, "n_sensors", int)
    edges_raw = _require(obj, "edges", list)

    edges = []
    for idx, e in enumerate(edges_raw):
        if not isinstance(e, dict):
            raise InstanceFormatError(f"edges[{idx}] must be an object")
        kind = _require(e, "kind", str, where=f"edges[{idx}]")
        i = _require(e, "i", int, where=f"edges[{idx}]")
        j = _require(e, "j", int, where=f"edges[{idx}]")
        dist = _require(e, "dist", (int, float), where=f"edges[{idx}]")
        edges.append(EdgeMeasurement(kind, i, j, float(dist)))

    sensors = obj.get("sensors")
    truth = None
    if sensors is not None:
        if not isinstance(sensors, list):
            raise InstanceFormatError("field 'sensors' has wrong type")
        truth = np.asarray(sensors, dtype=float)

    return NetworkInstance(
        dimension=dimension,
        anchors=np.asarray(anchors, dtype=float),
        n_sensors=n_sensors,
        edges=tuple(edges),
        sensor_truth=truth,
    )
