"""The flat bundle E = R + L_1 + ... + L_n over the upper half-plane.

Sections are written in the global unit frame e(z) = Im(z) d/dx: the L_k
component is the complex number y_k with Y_k = y_k e^k. Real state vectors are
laid out as [Y_0, Re y_1, Im y_1, ..., Re y_n, Im y_n].

With x = dz / Im z the frame coordinate of a tangent vector, the connection is

    (D_X Y)_0 = dY_0(X) + (n+1)/2 Re(x conj y_1)
    (D_X Y)_k = dy_k(X) + i k Re(x) y_k + (n-k+1) x y_{k-1} + (n+k+1)/4 conj(x) y_{k+1}

(with y_0 = Y_0), so a parallel section obeys dY/dt = -A(z, z') Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np
from scipy.linalg import expm

from .halfplane import (
    Geodesic,
    HalfPlaneError,
    MoebiusElement,
    PiecewisePath,
    frame_cocycle,
    geodesic,
    moebius_act,
    rotation_about,
)
from .symrep import RepMatrix


class OpenLoopError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


def dim(n: int) -> int:
    return 2 * n + 1


# ---------------------------------------------------------------- metric


@dataclass(frozen=True)
class MetricWeights:
    n: int
    a: tuple

    def __post_init__(self):
        a = self.a
        if len(a) != self.n + 1 or abs(a[0] - 1.0) > 0 or any(x <= 0 for x in a):
            raise ValueError("weights must be positive with a[0] = 1")
        for k in range(self.n):
            # the R factor pairs with L_1 through <X, Y_1>/2, hence the extra 2 at k = 0
            ratio = (self.n + k + 1) / ((2.0 if k == 0 else 4.0) * (self.n - k))
            if abs(a[k + 1] / a[k] - ratio) > 1e-12 * ratio:
                raise ValueError(f"weight ratio a[{k + 1}]/a[{k}] is off")


def metric_weights(n: int) -> MetricWeights:
    """a_0 = 1, a_{k+1} = 2^-(2k+1) prod_{j<=k} (n+j+1)/(n-j)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = [1.0]
    for k in range(n):
        a.append(2.0 ** -(2 * k + 1) * prod((n + j + 1) / (n - j) for j in range(k + 1)))
    return MetricWeights(n, tuple(a))


@dataclass(frozen=True)
class SectionCoords:
    """Fiber coordinates: real Y_0 and complex y_1..y_n in the unit frame."""

    n: int
    c0: float
    ck: tuple

    def __post_init__(self):
        if len(self.ck) != self.n:
            raise DimensionMismatchError(f"expected {self.n} complex coordinates, got {len(self.ck)}")

    def to_vector(self) -> np.ndarray:
        v = np.empty(dim(self.n))
        v[0] = self.c0
        ck = np.asarray(self.ck, dtype=complex)
        v[1::2] = ck.real
        v[2::2] = ck.imag
        return v

    @classmethod
    def from_vector(cls, v) -> "SectionCoords":
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or len(v) % 2 != 1:
            raise DimensionMismatchError("state vector must have odd length")
        n = len(v) // 2
        return cls(n, float(v[0]), tuple(complex(r, i) for r, i in zip(v[1::2], v[2::2])))

    @classmethod
    def zero(cls, n: int) -> "SectionCoords":
        return cls(n, 0.0, (0j,) * n)


def bundle_gram(n: int) -> np.ndarray:
    """Gram matrix of the bundle metric in real coordinates."""
    a = metric_weights(n).a
    diag = [-1.0]
    for k in range(1, n + 1):
        diag += [(-1) ** (k + 1) * a[k]] * 2
    return np.diag(diag)


def bundle_metric(Y: SectionCoords, Z: SectionCoords) -> float:
    """-Y_0 Z_0 + sum_k (-1)^(k+1) a_k Re(y_k conj z_k)."""
    if Y.n != Z.n:
        raise DimensionMismatchError("sections of different rank")
    a = metric_weights(Y.n).a
    out = -Y.c0 * Z.c0
    for k in range(1, Y.n + 1):
        out += (-1) ** (k + 1) * a[k] * (Y.ck[k - 1] * np.conj(Z.ck[k - 1])).real
    return float(out)


# ---------------------------------------------------------------- connection


def _mul(x):
    # real 2x2 matrix of multiplication by the complex number x
    return np.array([[x.real, -x.imag], [x.imag, x.real]])


def connection_matrix(n: int, z, dz, dtype=float, levi_civita_only: bool = False) -> np.ndarray:
    """A(z, dz) with D_X Y = dY(X) + A Y in real coordinates."""
    N = dim(n)
    A = np.zeros((N, N), dtype=dtype)
    y = z.imag
    xr, xi = dz.real / y, dz.imag / y
    for k in range(1, n + 1):
        r, i = 2 * k - 1, 2 * k
        A[r, i] = -k * xr
        A[i, r] = k * xr
    if levi_civita_only:
        return A
    A[0, 1] = 0.5 * (n + 1) * xr
    A[0, 2] = 0.5 * (n + 1) * xi
    A[1, 0] = n * xr
    A[2, 0] = n * xi
    for k in range(2, n + 1):
        c = n - k + 1
        r, i, pr, pi = 2 * k - 1, 2 * k, 2 * k - 3, 2 * k - 2
        A[r, pr] = c * xr
        A[r, pi] = -c * xi
        A[i, pr] = c * xi
        A[i, pi] = c * xr
    for k in range(1, n):
        c = 0.25 * (n + k + 1)
        r, i, nr, ni = 2 * k - 1, 2 * k, 2 * k + 1, 2 * k + 2
        A[r, nr] = c * xr
        A[r, ni] = c * xi
        A[i, nr] = -c * xi
        A[i, ni] = c * xr
    return A


def geodesic_generator(n: int) -> np.ndarray:
    """Constant matrix M with eta' = -M eta along a unit-speed geodesic.

    Here y_k = x^k eta_k, where x is the (unit) frame velocity.
    """
    N = dim(n)
    M = np.zeros((N, N))
    M[0, 1] = 0.5 * (n + 1)
    M[1, 0] = n
    for k in range(2, n + 1):
        M[2 * k - 1, 2 * k - 3] = M[2 * k, 2 * k - 2] = n - k + 1
    for k in range(1, n):
        M[2 * k - 1, 2 * k + 1] = M[2 * k, 2 * k + 2] = 0.25 * (n + k + 1)
    return M


def frame_rotation(n: int, u) -> np.ndarray:
    """Multiplication by u^k on L_k (identity on the R factor)."""
    D = np.zeros((dim(n), dim(n)))
    D[0, 0] = 1.0
    for k in range(1, n + 1):
        D[2 * k - 1 : 2 * k + 1, 2 * k - 1 : 2 * k + 1] = _mul(complex(u) ** k)
    return D


fiber_action = frame_rotation


# ---------------------------------------------------------------- transport


@dataclass(frozen=True)
class PathTransport:
    """A path with its RK4 step size (in hyperbolic length)."""

    path: object
    stepsize: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if self.order != 4:
            raise ValueError("only the classical RK4 integrator is provided")
        L = self.path.hyperbolic_length
        if L > 0 and self.stepsize > 1e-2 * L:
            raise ValueError(f"step {self.stepsize} exceeds 1e-2 x path length {L}")


def _pieces(path):
    return path.pieces if isinstance(path, PiecewisePath) else [path]


def _check_inside(z):
    if np.any(np.asarray(z).imag <= 0):
        raise HalfPlaneError("path leaves the upper half-plane")


def rk4_transport(n: int, path, step: float = 1e-3, dtype=float, levi_civita_only: bool = False) -> np.ndarray:
    """Transport matrix along ``path`` by classical RK4.

    The number of steps on each piece is ceil(hyperbolic length / step), so the
    step is measured in hyperbolic length. ``dtype=np.longdouble`` runs the
    whole computation (path and state) in extended precision.
    """
    N = dim(n)
    P = np.eye(N, dtype=dtype)
    for piece in _pieces(path):
        L = piece.hyperbolic_length
        if L == 0:
            continue
        m = max(1, int(np.ceil(L / step)))
        T = piece.param_length
        h = dtype(T) / m

        def A(t):
            z, dz = piece.point_and_velocity(t)
            _check_inside(z)
            return connection_matrix(n, z, dz, dtype, levi_civita_only)

        a0 = A(dtype(0))
        for j in range(m):
            t = j * h
            am = A(t + h / 2)
            a1 = A(t + h)
            k1 = -a0 @ P
            k2 = -am @ (P + h / 2 * k1)
            k3 = -am @ (P + h / 2 * k2)
            k4 = -a1 @ (P + h * k3)
            P = P + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            a0 = a1
    return P


def exact_geodesic_transport(n: int, geo: Geodesic) -> np.ndarray:
    """Transport along a geodesic from the constant-coefficient form of the equation."""
    x0 = complex(geo.frame_velocity(0.0))
    x1 = complex(geo.frame_velocity(geo.length))
    L = float(geo.length)
    return frame_rotation(n, x1) @ expm(-L * geodesic_generator(n)) @ frame_rotation(n, np.conj(x0))


def transport_matrix(n: int, path, step: float = 1e-3, method: str = "rk4", dtype=float) -> np.ndarray:
    """Transport matrix along a path (maps the fiber at the start to the fiber at the end)."""
    if method == "rk4":
        return rk4_transport(n, path, step, dtype)
    if method == "exact":
        P = np.eye(dim(n))
        for piece in _pieces(path):
            if not isinstance(piece, Geodesic):
                raise TypeError("exact transport needs geodesic pieces")
            P = exact_geodesic_transport(n, piece) @ P
        return P
    raise ValueError(f"unknown method {method!r}")


def parallel_transport(n: int, path: PathTransport, Y: SectionCoords) -> SectionCoords:
    if Y.n != n:
        raise DimensionMismatchError("section rank does not match n")
    P = rk4_transport(n, path.path, path.stepsize)
    return SectionCoords.from_vector(P @ Y.to_vector())


def flatness_residual(n: int, loop, step: float = 1e-3, dtype=float, levi_civita_only: bool = False) -> float:
    """Operator norm of (holonomy - I) around a closed path."""
    if not loop.is_closed():
        raise OpenLoopError("path is not closed")
    P = rk4_transport(n, loop, step, dtype, levi_civita_only)
    if levi_civita_only:
        # only the L_1 block is meaningful for the control experiment
        P = P[1:3, 1:3]
    # subtract I before rounding to double so extended precision survives
    D = P - np.eye(P.shape[0], dtype=P.dtype)
    return float(np.linalg.norm(np.asarray(D, dtype=float), 2))


# ---------------------------------------------------------------- holonomy


def holonomy_rep(g: MoebiusElement, n: int, basepoint: complex = 1j, method: str = "exact", step: float = 1e-3) -> RepMatrix:
    """Action of g on the fiber at ``basepoint``: push by g, then transport back.

    The push multiplies L_k by frame_cocycle(g, basepoint)^k; the transport runs
    along the geodesic from g(basepoint) to basepoint.
    """
    z0 = complex(basepoint)
    push = frame_rotation(n, frame_cocycle(g, z0))
    gz = complex(moebius_act(g, z0))
    if abs(gz - z0) <= 1e-14 * max(1.0, abs(z0)):
        return RepMatrix(n, push)
    geo = geodesic(gz, z0)
    if method == "exact":
        P = exact_geodesic_transport(n, geo)
    else:
        P = rk4_transport(n, geo, min(step, 1e-2 * geo.hyperbolic_length))
    return RepMatrix(n, P @ push)


def circle_weights(theta: float, n: int, x0: complex = 1j) -> np.ndarray:
    """Eigenvalues of the holonomy of the rotation by theta about x0."""
    m = holonomy_rep(rotation_about(x0, theta), n, x0).entries
    return np.linalg.eigvals(m)


# ---------------------------------------------------------------- neutral section


def geodesic_neutral_eta(n: int) -> np.ndarray:
    """Kernel vector of the geodesic generator (unnormalized, real coordinates).

    Odd n: eta_{2k+1} = i b_k, b_0 = 1, b_k = -4 (n-2k+1)/(n+2k+1) b_{k-1}, even slots 0.
    Even n: Y_0 = 1, eta_{2j} = r_j real, r_j = -4 (n-2j+2)/(n+2j) r_{j-1}, odd slots 0.
    """
    v = np.zeros(dim(n))
    if n % 2 == 1:
        b = 1.0
        for k in range((n - 1) // 2 + 1):
            if k > 0:
                b *= -4.0 * (n - 2 * k + 1) / (n + 2 * k + 1)
            v[2 * (2 * k + 1)] = b  # imaginary part of L_{2k+1}
    else:
        v[0] = 1.0
        r = 1.0
        for j in range(1, n // 2 + 1):
            r *= -4.0 * (n - 2 * j + 2) / (n + 2 * j)
            v[2 * (2 * j) - 1] = r  # real part of L_{2j}
    return v


def normalized_neutral_eta(n: int) -> np.ndarray:
    """geodesic_neutral_eta scaled so that |<v, v>| = 1."""
    v = geodesic_neutral_eta(n)
    return v / np.sqrt(abs(v @ bundle_gram(n) @ v))


def geodesic_neutral(n: int, geo: Geodesic, t: float = 0.0, epsilon: int = 1) -> np.ndarray:
    """The parallel section along a geodesic, at parameter t, in the unit frame."""
    x = complex(geo.frame_velocity(t))
    return epsilon * frame_rotation(n, x) @ normalized_neutral_eta(n)
