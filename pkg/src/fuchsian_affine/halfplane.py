"""Upper half-plane geometry.

Points are plain Python/numpy complex numbers with positive imaginary part.
Tangent vectors are complex numbers ``dz``; their coordinate in the global
unit frame ``e(z) = Im(z) d/dx`` is ``dz / Im(z)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class HalfPlaneError(ValueError):
    """A point or element violates a half-plane precondition."""


class CoincidentPointsError(HalfPlaneError):
    pass


class NotHyperbolicError(HalfPlaneError):
    pass


DET_TOL = 1e-12


@dataclass(frozen=True)
class MoebiusElement:
    """An element of SL(2,R) acting by z -> (az+b)/(cz+d)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = max(1.0, self.a**2 + self.b**2 + self.c**2 + self.d**2)
        if abs(det - 1.0) > DET_TOL * scale:
            raise HalfPlaneError(f"determinant {det!r} is not 1")

    @classmethod
    def from_matrix(cls, m) -> "MoebiusElement":
        """Build from a 2x2 array with positive determinant, renormalizing to det 1."""
        m = np.asarray(m, dtype=float)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0:
            raise HalfPlaneError("matrix must have positive determinant")
        m = m / np.sqrt(det)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> "MoebiusElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    def inverse(self) -> "MoebiusElement":
        return MoebiusElement(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MoebiusElement") -> "MoebiusElement":
        return MoebiusElement.from_matrix(self.matrix @ other.matrix)

    def __call__(self, z):
        return moebius_act(self, z)

    def derivative(self, z):
        return 1.0 / (self.c * z + self.d) ** 2

    def is_hyperbolic(self, tol: float = 1e-10) -> bool:
        return abs(self.trace) > 2.0 + tol


@dataclass(frozen=True)
class UnitTangent:
    """A unit tangent vector: base point and direction in the unit frame."""

    base: complex
    dir: complex

    def __post_init__(self):
        _check_point(self.base)
        if abs(abs(self.dir) - 1.0) > 1e-12:
            raise HalfPlaneError("direction must have modulus 1")


def _check_point(z):
    if np.any(np.imag(z) <= 0):
        raise HalfPlaneError("point must lie in the upper half-plane")


def moebius_act(g: MoebiusElement, z):
    _check_point(z)
    return (g.a * z + g.b) / (g.c * z + g.d)


def frame_cocycle(g: MoebiusElement, z):
    """Unit complex number by which g acts on the unit-frame coordinate of T_z.

    The action on the L_k coordinate is multiplication by the k-th power.
    """
    _check_point(z)
    w = g.c * z + g.d
    return np.conj(w) / w


def distance(z, w):
    """Hyperbolic distance, using the asinh form for accuracy at short range."""
    _check_point(z)
    _check_point(w)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(np.imag(z) * np.imag(w))))


def to_disk(z):
    """Cayley transform H^2 -> unit disk, i -> 0."""
    return (z - 1j) / (z + 1j)


def from_disk(w):
    return 1j * (1 + w) / (1 - w)


def rotation_about(z0: complex, theta: float) -> MoebiusElement:
    """Elliptic element fixing z0 whose derivative at z0 is exp(i*theta)."""
    _check_point(z0)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    r = np.array([[c, s], [-s, c]])
    return MoebiusElement.from_matrix(_to_point(z0) @ r @ np.linalg.inv(_to_point(z0)))


def translation_along_imaginary_axis(length: float) -> MoebiusElement:
    """z -> exp(length) z, translating i upward by ``length``."""
    return MoebiusElement(np.exp(length / 2), 0.0, 0.0, np.exp(-length / 2))


def _to_point(z0, dtype=float) -> np.ndarray:
    # upper-triangular element sending i to z0
    y = np.sqrt(dtype(np.imag(z0)))
    return np.array([[y, dtype(np.real(z0)) / y], [dtype(0), 1 / y]], dtype=dtype)


class Geodesic:
    """Unit-speed geodesic segment c(t), t in [0, length].

    The segment is stored as c(t) = h(i e^t) for a matrix h in SL(2,R).
    Passing ``dtype=np.longdouble`` evaluates the path in extended precision.
    """

    def __init__(self, h: np.ndarray, length, dtype=float):
        self.dtype = dtype
        self.h = np.asarray(h, dtype=dtype)
        self.length = dtype(length)

    @property
    def param_length(self):
        return self.length

    @property
    def hyperbolic_length(self) -> float:
        return float(self.length)

    def point(self, t):
        z, _ = self.point_and_velocity(t)
        return z

    def point_and_velocity(self, t):
        h = self.h
        cdtype = np.clongdouble if self.dtype is np.longdouble else complex
        u = cdtype(1j) * np.exp(np.asarray(t, dtype=self.dtype))
        den = h[1, 0] * u + h[1, 1]
        return (h[0, 0] * u + h[0, 1]) / den, u / den**2

    def frame_velocity(self, t):
        z, dz = self.point_and_velocity(t)
        return dz / z.imag

    @property
    def start(self):
        return self.point(self.dtype(0))

    @property
    def end(self):
        return self.point(self.length)

    def reverse(self) -> "Geodesic":
        # t -> L - t: i e^{L-t} = (rotation by pi)(i e^{t-L})
        L = self.length
        flip = np.array([[0, 1], [-1, 0]], dtype=self.dtype)
        shift = np.array([[np.exp(-L / 2), 0], [0, np.exp(L / 2)]], dtype=self.dtype)
        return Geodesic(self.h @ flip @ shift, L, self.dtype)

    def shifted(self, offset) -> "Geodesic":
        """Same geodesic line, parametrized from c(offset)."""
        o = self.dtype(offset)
        s = np.array([[np.exp(o / 2), 0], [0, np.exp(-o / 2)]], dtype=self.dtype)
        return Geodesic(self.h @ s, self.length, self.dtype)


def geodesic(z0, z1, dtype=float) -> Geodesic:
    """Unit-speed geodesic from z0 to z1."""
    _check_point(z0)
    _check_point(z1)
    if abs(z0 - z1) <= 1e-15 * max(1.0, abs(z0)):
        raise CoincidentPointsError("geodesic endpoints coincide")
    cdtype = np.clongdouble if dtype is np.longdouble else complex
    h1 = _to_point(z0, dtype)
    z1 = cdtype(z1)
    # h1^{-1} z1
    w = (h1[1, 1] * z1 - h1[0, 1]) / (h1[0, 0])
    wd = (w - cdtype(1j)) / (w + cdtype(1j))
    r = np.abs(wd)
    ang = np.arctan2(wd.imag, wd.real)
    c, s = np.cos(ang / 2), np.sin(ang / 2)
    rot = np.array([[c, s], [-s, c]], dtype=dtype)
    return Geodesic(h1 @ rot, 2 * np.arctanh(r), dtype)


class PiecewisePath:
    """Concatenation of paths; parameter runs through each piece in turn."""

    def __init__(self, pieces):
        self.pieces = list(pieces)
        self.dtype = self.pieces[0].dtype if self.pieces else float

    @property
    def hyperbolic_length(self) -> float:
        return sum(p.hyperbolic_length for p in self.pieces)

    @property
    def start(self):
        return self.pieces[0].start

    @property
    def end(self):
        return self.pieces[-1].end

    def reverse(self) -> "PiecewisePath":
        return PiecewisePath([p.reverse() for p in reversed(self.pieces)])

    def is_closed(self, tol: float = 1e-12) -> bool:
        return abs(complex(self.start) - complex(self.end)) <= tol * max(1.0, abs(complex(self.start)))


class LinePath:
    """Euclidean straight segment z0 -> z1 with parameter in [0, 1] (not unit speed)."""

    def __init__(self, z0, z1, dtype=float):
        _check_point(z0)
        _check_point(z1)
        cdtype = np.clongdouble if dtype is np.longdouble else complex
        self.dtype = dtype
        self.z0, self.z1 = cdtype(z0), cdtype(z1)
        self.param_length = dtype(1)

    @property
    def hyperbolic_length(self) -> float:
        # length of the coordinate segment in the hyperbolic metric
        y0, y1 = float(self.z0.imag), float(self.z1.imag)
        dist = abs(complex(self.z1 - self.z0))
        if abs(y1 - y0) < 1e-14:
            return dist / y0
        return dist * abs(np.log(y1 / y0)) / abs(y1 - y0)

    def point_and_velocity(self, t):
        t = np.asarray(t, dtype=self.dtype)
        return self.z0 + t * (self.z1 - self.z0), (self.z1 - self.z0) + 0 * t

    @property
    def start(self):
        return self.z0

    @property
    def end(self):
        return self.z1

    def reverse(self) -> "LinePath":
        return LinePath(self.z1, self.z0, self.dtype)


def geodesic_polygon(vertices, dtype=float) -> PiecewisePath:
    """Closed geodesic polygon through the given vertices."""
    vs = list(vertices)
    return PiecewisePath(geodesic(vs[k], vs[(k + 1) % len(vs)], dtype) for k in range(len(vs)))


def regular_polygon_vertices(center: complex, side: float, sides: int = 4, phase: float = np.pi / 4):
    """Vertices of the regular geodesic polygon with given side length about ``center``."""
    circum = np.arcsinh(np.sinh(side / 2) / np.sin(np.pi / sides))
    g = _to_point(center)
    out = []
    for k in range(sides):
        w = np.tanh(circum / 2) * np.exp(1j * (phase + 2 * np.pi * k / sides))
        z = from_disk(w)
        out.append((g[0, 0] * z + g[0, 1]) / g[1, 1])
    return out


def geodesic_square(center: complex, side: float, dtype=float) -> PiecewisePath:
    return geodesic_polygon(regular_polygon_vertices(center, side, 4), dtype)


def regular_polygon_area(side: float, sides: int = 4) -> float:
    """Hyperbolic area of a regular polygon with the given side length."""
    # right triangle with legs (half side, inradius): cos(pi/sides) = cosh(side/2) sin(beta)
    beta = np.arcsin(np.cos(np.pi / sides) / np.cosh(side / 2))
    return float((sides - 2) * np.pi - sides * 2 * beta)


@dataclass(frozen=True)
class AxisData:
    """Axis of a hyperbolic element.

    ``repelling``/``attracting`` are boundary fixed points (``np.inf`` allowed).
    ``conjugator`` h satisfies h^{-1} g h = +-diag(l, 1/l) with l > 1, so the axis
    is h(i e^t) traversed in the translation direction.
    """

    repelling: float
    attracting: float
    translation_length: float
    conjugator: np.ndarray

    def geodesic(self, start_near: complex = 1j, length: float | None = None, offset: float = 0.0) -> Geodesic:
        """Axis segment starting at the foot of the perpendicular from ``start_near``."""
        h = self.conjugator
        w = (h[1, 1] * start_near - h[0, 1]) / (-h[1, 0] * start_near + h[0, 0])
        t0 = np.log(abs(w)) + offset
        shift = np.array([[np.exp(t0 / 2), 0], [0, np.exp(-t0 / 2)]])
        L = self.translation_length if length is None else length
        return Geodesic(h @ shift, L)


def _fixed_point(v) -> float:
    return np.inf if abs(v[1]) < 1e-300 else float(v[0] / v[1])


def axis_data(g: MoebiusElement) -> AxisData:
    tr = g.trace
    if abs(tr) <= 2.0 + 1e-10:
        raise NotHyperbolicError(f"|trace| = {abs(tr)} <= 2")
    vals, vecs = np.linalg.eig(g.matrix)
    vals, vecs = vals.real, vecs.real
    order = np.argsort(-np.abs(vals))
    att, rep = vecs[:, order[0]], vecs[:, order[1]]
    h = np.column_stack([att, rep])
    det = np.linalg.det(h)
    if det < 0:
        h[:, 0] *= -1
        det = -det
    h = h / np.sqrt(det)
    ell = 2.0 * np.arccosh(abs(tr) / 2.0)
    return AxisData(_fixed_point(rep), _fixed_point(att), float(ell), h)


def translation_length(g: MoebiusElement) -> float:
    return axis_data(g).translation_length


def random_moebius(rng: np.random.Generator, scale: float = 1.0) -> MoebiusElement:
    """Random SL(2,R) element, exp of a Gaussian sl(2) element of the given scale."""
    from scipy.linalg import expm

    x, y, z = rng.normal(scale=scale, size=3)
    return MoebiusElement.from_matrix(expm(np.array([[x, y], [z, -x]])))


def random_hyperbolic(rng: np.random.Generator, min_length: float = 0.3, max_length: float = 4.0,
                      scale: float = 1.0) -> MoebiusElement:
    """Random hyperbolic element with translation length in the given range.

    The axis is moved by a random conjugator of the given scale.
    """
    ell = rng.uniform(min_length, max_length)
    h = random_moebius(rng, scale)
    d = translation_along_imaginary_axis(ell)
    g = h @ d @ h.inverse()
    # -g is the same isometry; sample both signs of the trace
    return g if rng.random() < 0.5 else MoebiusElement.from_matrix(-g.matrix)
