"""Closed-path geometry: solid angles, windings and line integrals.

Paths are polylines (``ClosedPath``/``OpenPath``) or exact circles
(``Circle``). Line integrals are taken over the true geometry of each:
straight chords for polylines, the arc itself for circles.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .core import FOUR_PI, TWO_PI, as_vector
from .errors import AxisCrossingError, QuadratureError, SingularPointError, ValidationError

VectorField = Callable[[np.ndarray], np.ndarray]

# angular distance treated as "on the axis / string"
AXIS_CUTOFF = 1e-6

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(7)


def _check_vertices(vertices, minimum: int, closed: bool) -> np.ndarray:
    v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValidationError(f"vertices must be an (N, 3) array, got shape {v.shape}")
    if v.shape[0] < minimum:
        raise ValidationError(f"need at least {minimum} vertices, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("vertices must be finite")
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0.0):
        raise SingularPointError("path vertex at the origin")
    ends = np.roll(v, -1, axis=0) if closed else v[1:]
    starts = v if closed else v[:-1]
    seg = ends - starts
    seglen = np.linalg.norm(seg, axis=1)
    if np.any(seglen == 0.0):
        raise ValidationError("consecutive vertices must be distinct")
    # closest approach of every chord to the origin
    t = np.clip(-np.einsum("ij,ij->i", starts, seg) / seglen**2, 0.0, 1.0)
    closest = np.linalg.norm(starts + t[:, None] * seg, axis=1)
    if np.any(closest <= 1e-12 * np.max(norms)):
        raise SingularPointError("path segment passes through the origin")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class ClosedPath:
    """Polyline loop; the last vertex connects back to the first."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _check_vertices(self.vertices, 3, closed=True))

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def reversed(self) -> "ClosedPath":
        return ClosedPath(self.vertices[::-1].copy())

    def scaled(self, factor: float) -> "ClosedPath":
        return ClosedPath(self.vertices * float(factor))

    def refined(self, times: int = 2) -> "ClosedPath":
        """Insert ``times - 1`` points along every chord (same geometry)."""
        a, b = self.segments()
        frac = np.arange(times) / times
        pts = a[:, None, :] + frac[None, :, None] * (b - a)[:, None, :]
        return ClosedPath(pts.reshape(-1, 3))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "z"])
            for x, y, z in self.vertices:
                writer.writerow([repr(float(x)), repr(float(y)), repr(float(z))])

    @classmethod
    def from_csv(cls, path) -> "ClosedPath":
        """Load one vertex per row from a CSV with columns x, y, z."""
        path = Path(path)
        with open(path, newline="") as fh:
            reader = csv.DictReader(row for row in fh if not row.startswith("#"))
            if reader.fieldnames is None or not {"x", "y", "z"} <= set(reader.fieldnames):
                raise ValidationError(f"{path}: expected columns x, y, z")
            try:
                rows = [[float(r["x"]), float(r["y"]), float(r["z"])] for r in reader]
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{path}: non-numeric vertex ({exc})") from exc
        return cls(np.array(rows))


@dataclass(frozen=True)
class OpenPath:
    """Polyline from the first vertex to the last."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _check_vertices(self.vertices, 2, closed=False))

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices[:-1], self.vertices[1:]

    def reflected(self) -> "OpenPath":
        """Point reflection through the origin."""
        return OpenPath(-self.vertices)


def _orthonormal_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - axis * np.dot(helper, axis)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


@dataclass(frozen=True)
class Circle:
    """Exact circle of colatitude ``theta`` about ``axis`` on a sphere.

    ``turns`` counts windings; a negative value runs clockwise when seen
    from the ``axis`` side.
    """

    theta: float
    axis: np.ndarray = np.array([0.0, 0.0, 1.0])
    radius: float = 1.0
    turns: int = 1

    def __post_init__(self):
        axis = as_vector(self.axis, "axis")
        norm = float(np.linalg.norm(axis))
        if norm == 0.0:
            raise ValidationError("circle axis must be non-zero")
        axis = axis / norm
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        if not 0.0 < float(self.theta) < math.pi:
            raise ValidationError(f"theta must lie in (0, pi), got {self.theta!r}")
        if not float(self.radius) > 0.0:
            raise ValidationError("radius must be positive")
        if int(self.turns) == 0:
            raise ValidationError("turns must be non-zero")

    def _frame(self):
        return _orthonormal_frame(self.axis)

    def point(self, t) -> np.ndarray:
        """Position at parameter ``t`` in [0, 1] (one full traversal)."""
        t = np.asarray(t, dtype=float)
        e1, e2 = self._frame()
        phi = TWO_PI * self.turns * t
        rs = self.radius * math.sin(self.theta)
        rc = self.radius * math.cos(self.theta)
        return (rs * np.cos(phi))[..., None] * e1 + (rs * np.sin(phi))[..., None] * e2 + rc * self.axis

    def velocity(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        e1, e2 = self._frame()
        phi = TWO_PI * self.turns * t
        rs = self.radius * math.sin(self.theta) * TWO_PI * self.turns
        return (-rs * np.sin(phi))[..., None] * e1 + (rs * np.cos(phi))[..., None] * e2

    def polyline(self, n_vertices: int = 360) -> ClosedPath:
        """Inscribed polygon with ``n_vertices`` per turn."""
        total = int(n_vertices) * abs(int(self.turns))
        return ClosedPath(self.point(np.arange(total) / total))


def cap_loop(theta: float, n_vertices: int = 360, axis=(0.0, 0.0, 1.0), radius: float = 1.0,
             turns: int = 1) -> ClosedPath:
    """Polygon on the circle of colatitude ``theta``, counterclockwise about ``axis``."""
    return Circle(theta, np.asarray(axis, dtype=float), radius, turns).polyline(n_vertices)


def equator(n_vertices: int = 360, radius: float = 1.0, turns: int = 1) -> ClosedPath:
    return cap_loop(math.pi / 2, n_vertices, radius=radius, turns=turns)


def figure_eight(n_vertices: int = 180, theta_a: float = math.pi / 3, theta_b: float = 2 * math.pi / 3) -> ClosedPath:
    """Counterclockwise circle at ``theta_a`` followed by a clockwise one at ``theta_b``.

    Both are started at azimuth 0 and joined by straight chords.
    """
    upper = Circle(theta_a).point(np.arange(n_vertices) / n_vertices)
    lower = Circle(theta_b, turns=-1).point(np.arange(n_vertices) / n_vertices)
    return ClosedPath(np.vstack([upper, upper[:1], lower, lower[:1]])[:-1])


# --------------------------------------------------------------------------
# solid angle
# --------------------------------------------------------------------------


class SolidAngleResult(NamedTuple):
    omega: float
    complement: float


def _fan_pivot(units: np.ndarray) -> np.ndarray:
    area = np.sum(np.cross(units, np.roll(units, -1, axis=0)), axis=0)
    norm = float(np.linalg.norm(area))
    if norm > 1e-12 * units.shape[0]:
        return area / norm
    mean = units.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm > 1e-12:
        return mean / norm
    return np.array([0.0, 0.0, 1.0])


def solid_angle(path: ClosedPath, apex=(0.0, 0.0, 0.0), pivot: str = "area",
                degenerate_tol: float = 1e-9) -> SolidAngleResult:
    """Signed solid angle subtended by ``path`` at ``apex``.

    Vertices are projected onto the unit sphere about the apex and the
    signed angles of the triangle fan (pivot, v_i, v_i+1) are summed.
    ``pivot="area"`` fans from the direction of the loop's vector area,
    which sits inside the counterclockwise cap for simple loops;
    ``pivot="first"`` fans from the first vertex.

    Branch: a simple loop returns the cap on the side from which it runs
    counterclockwise, in [0, 4*pi). Fan sums beyond (-2*pi, 2*pi] (multiply
    wound or self-intersecting loops) are returned as accumulated.
    """
    apex = as_vector(apex, "apex")
    rel = path.vertices - apex
    norms = np.linalg.norm(rel, axis=1)
    if np.any(norms == 0.0):
        raise SingularPointError("apex lies on the path")
    units = np.ascontiguousarray(rel / norms[:, None])
    if pivot == "area":
        p = _fan_pivot(units)
    elif pivot == "first":
        p = units[0].copy()
    else:
        raise ValidationError(f"pivot must be 'area' or 'first', got {pivot!r}")
    total = float(kernels.solid_angle_fan(units, np.ascontiguousarray(p)))
    if -TWO_PI - degenerate_tol <= total < -degenerate_tol:
        total += FOUR_PI
    return SolidAngleResult(total, total - FOUR_PI)


# --------------------------------------------------------------------------
# winding number
# --------------------------------------------------------------------------


class Winding(NamedTuple):
    number: int
    residual: float


def _as_polyline(path) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(path, Circle):
        path = path.polyline(720)
    return path.segments()


def winding_number(path, axis=(0.0, 0.0, 1.0), cutoff: float = AXIS_CUTOFF) -> Winding:
    """Net number of turns of ``path`` about the line through the origin along ``axis``."""
    axis = as_vector(axis, "axis")
    axis = axis / np.linalg.norm(axis)
    e1, e2 = _orthonormal_frame(axis)
    a, b = _as_polyline(path)
    pa = np.stack([a @ e1, a @ e2], axis=1)
    pb = np.stack([b @ e1, b @ e2], axis=1)
    d = pb - pa
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0.0, np.clip(-np.einsum("ij,ij->i", pa, d) / dd, 0.0, 1.0), 0.0)
    rho = np.linalg.norm(pa + t[:, None] * d, axis=1)
    reach = np.linalg.norm(a + t[:, None] * (b - a), axis=1)
    bad = rho <= math.sin(cutoff) * reach
    if np.any(bad):
        i = int(np.argmax(bad))
        raise AxisCrossingError(f"segment {i} passes within {cutoff:g} rad of the axis {axis}")
    cross = pa[:, 0] * pb[:, 1] - pa[:, 1] * pb[:, 0]
    dot = np.einsum("ij,ij->i", pa, pb)
    turns = float(np.sum(np.arctan2(cross, dot))) / TWO_PI
    number = int(round(turns))
    return Winding(number, turns - number)


# --------------------------------------------------------------------------
# adaptive line integral
# --------------------------------------------------------------------------


def _geometry(path):
    """Return (n_pieces, geom) with geom(s) -> (points, tangents), s in [0, n_pieces]."""
    if isinstance(path, Circle):
        n = 8 * abs(int(path.turns))

        def geom(s):
            return path.point(s / n), path.velocity(s / n) / n

        return n, geom
    if isinstance(path, (ClosedPath, OpenPath)):
        a, b = path.segments()
        n = a.shape[0]

        def geom(s):
            idx = np.minimum(np.floor(s).astype(int), n - 1)
            local = s - idx
            return a[idx] + local[:, None] * (b[idx] - a[idx]), b[idx] - a[idx]

        return n, geom
    raise ValidationError(f"unsupported path type {type(path).__name__}")


def _gauss(field: VectorField, geom, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).reshape(-1)
    pts, tan = geom(s)
    vals = np.asarray(field(pts), dtype=float)
    if vals.shape != pts.shape:
        raise ValidationError(f"field returned shape {vals.shape} for {pts.shape} points")
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmax(~np.all(np.isfinite(vals), axis=1)))
        raise QuadratureError(f"non-finite field sample at {pts[bad]}")
    integrand = np.einsum("ij,ij->i", vals, tan).reshape(lo.shape[0], -1)
    return half * (integrand @ _GL_WEIGHTS)


def line_integral(field: VectorField, path, tol: float = 1e-10, max_depth: int = 20) -> float:
    """Integrate ``field . dr`` along ``path`` with adaptive 7-point Gauss.

    Every piece (chord or arc) is bisected until the two-half estimate
    differs from the whole by less than its share of ``tol``.
    ``field`` maps an (M, 3) array of points to an (M, 3) array.
    """
    n, geom = _geometry(path)
    lo = np.arange(n, dtype=float)
    hi = lo + 1.0
    whole = _gauss(field, geom, lo, hi)
    tols = np.full(n, float(tol))
    total = 0.0
    for _ in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        left = _gauss(field, geom, lo, mid)
        right = _gauss(field, geom, mid, hi)
        halves = left + right
        done = np.abs(halves - whole) < tols
        total += float(np.sum(halves[done]))
        if np.all(done):
            return total
        keep = ~done
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        left, right, tols = left[keep], right[keep], tols[keep]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        whole = np.concatenate([left, right])
        tols = np.concatenate([tols, tols]) * 0.5
    raise QuadratureError(
        f"line integral not converged after {max_depth} bisections "
        f"({lo.shape[0]} pieces left, worst near s={float(lo[0]):.6g})"
    )


# --------------------------------------------------------------------------
# random loops
# --------------------------------------------------------------------------


def _angle_to(points: np.ndarray, direction: np.ndarray) -> np.ndarray:
    cross = np.linalg.norm(np.cross(points, direction), axis=-1)
    return np.arctan2(cross, points @ direction)


def random_loop(rng: np.random.Generator, n_vertices: tuple[int, int] = (4, 8),
                radii: tuple[float, float] = (0.5, 2.0), avoid=((0.0, 0.0, -1.0),),
                min_angle: float = 0.1, min_origin_fraction: float = 0.2,
                max_tries: int = 10_000) -> ClosedPath:
    """Random polygon with vertices drawn uniformly from a spherical shell.

    Candidates are rejected when any chord comes within ``min_angle`` of a
    half-line in ``avoid`` or closer to the origin than
    ``min_origin_fraction * radii[0]``.
    """
    avoid = [as_vector(d) / np.linalg.norm(d) for d in avoid]
    lo, hi = radii
    probe = np.linspace(0.0, 1.0, 65)
    for _ in range(max_tries):
        k = int(rng.integers(n_vertices[0], n_vertices[1] + 1))
        direction = rng.normal(size=(k, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        r = (lo**3 + (hi**3 - lo**3) * rng.random(k)) ** (1.0 / 3.0)
        verts = direction * r[:, None]
        nxt = np.roll(verts, -1, axis=0)
        pts = verts[:, None, :] + probe[None, :, None] * (nxt - verts)[:, None, :]
        if np.min(np.linalg.norm(pts, axis=-1)) < min_origin_fraction * lo:
            continue
        if any(np.min(_angle_to(pts, d)) < min_angle for d in avoid):
            continue
        return ClosedPath(verts)
    raise ValidationError("random_loop: no admissible loop found; relax the constraints")
