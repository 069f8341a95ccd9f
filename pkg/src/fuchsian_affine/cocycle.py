"""Holomorphic q-differentials, the bundle-valued 1-forms they define, affine
holonomy, Margulis invariants as line integrals, and the sign survey.

A q-differential is written w = phi(z) dz^q on the upper half-plane. It is
built as a truncated Poincare series, transported from the disk by the Cayley
map C(z) = (z - i)/(z + i):

    phi(z) = sum_{|g| <= depth} (C(g z) - w0)^m (C o g)'(z)^q.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from ._kernels import poincare_sum
from .flatbundle import (
    SectionCoords,
    bundle_gram,
    connection_matrix,
    dim,
    frame_rotation,
    geodesic_generator,
    geodesic_neutral,
    holonomy_rep,
    normalized_neutral_eta,
)
from .fuchsian import (
    GroupBall,
    GroupPresentation,
    Word,
    evaluate,
    group_ball,
    iter_conjugacy_classes,
    reduce_to_dirichlet,
)
from .halfplane import (
    Geodesic,
    MoebiusElement,
    NotHyperbolicError,
    PiecewisePath,
    UnitTangent,
    axis_data,
    from_disk,
    geodesic,
    moebius_act,
)
from .margulis import AffineIsometry, HolonomyModel, margulis_invariant


class WeightMismatchError(ValueError):
    pass


class EvenRankError(ValueError):
    pass


class SeriesDivergenceWarning(RuntimeWarning):
    pass


# ---------------------------------------------------------------- q-differentials

_BALLS: dict = {}


def _ball(grp: GroupPresentation, depth: int) -> GroupBall:
    key = (grp.to_json(), depth)
    if key not in _BALLS:
        _BALLS[key] = group_ball(grp, depth)
    return _BALLS[key]


@dataclass
class QDifferential:
    """Truncated Poincare series of weight q over a Fuchsian group.

    Calling the object evaluates the raw truncated series (holomorphic).
    ``automorphic`` first moves the point toward the center of the Dirichlet
    domain and uses w(hz) h'(z)^q = w(z), which keeps the truncation error
    uniform over the plane.
    """

    grp: GroupPresentation
    q: int
    seed_degree: int
    depth: int
    seed_center: complex = 0j
    coefficient: complex = 1.0
    ball: GroupBall | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if self.seed_degree < 0:
            raise ValueError("seed degree must be >= 0")
        if self.ball is None:
            self.ball = _ball(self.grp, self.depth)
        m = self.ball.matrices
        self._A = m[:, 0, 0] + 1j * m[:, 1, 0]
        self._B = m[:, 0, 1] + 1j * m[:, 1, 1]
        self._counts = np.searchsorted(self.ball.lengths, np.arange(self.depth + 1), side="right")

    def __call__(self, z, depth: int | None = None):
        z = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(z).ravel()
        if self.coefficient == 0:
            out = np.zeros(flat.shape, dtype=complex)
        else:
            k = self._counts[min(self.depth, self.depth if depth is None else depth)]
            A, B = self._A[:k], self._B[:k]
            w0 = complex(self.seed_center)
            sr, si = poincare_sum(flat.real.copy(), flat.imag.copy(), A.real.copy(), A.imag.copy(),
                                  B.real.copy(), B.imag.copy(), int(self.q), int(self.seed_degree), w0.real, w0.imag)
            out = (sr + 1j * si) * (2j) ** self.q * self.coefficient
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def automorphic(self, z):
        z = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(z).ravel()
        key = flat.tobytes()
        cached = getattr(self, "_last", None)
        if cached is not None and cached[0] == key:
            out = cached[1]
        else:
            zr, H = reduce_to_dirichlet(self.grp, flat)
            deriv = 1.0 / (H[:, 1, 0] * flat + H[:, 1, 1]) ** 2
            out = self(zr) * deriv**self.q
            # the survey evaluates f and the Margulis integrand on the same nodes
            self._last = (key, out)
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def disk_value(self, w):
        """Coefficient of the same differential in the disk coordinate."""
        z = from_disk(np.asarray(w, dtype=complex))
        dC = 2j / (z + 1j) ** 2
        return self(z) * dC ** (-self.q)

    def equivariance_residual(self, z: complex = 1j, depth: int | None = None, relative: bool = True) -> float:
        """max over generators g^{+-1} of |phi(gz) g'(z)^q - phi(z)| (divided by |phi(z)|)."""
        base = self(z, depth)
        worst = 0.0
        for x in list(range(1, self.grp.rank + 1)) + list(range(-1, -self.grp.rank - 1, -1)):
            g = self.grp.letter(x)
            val = self(moebius_act(g, z), depth) * g.derivative(z) ** self.q
            worst = max(worst, abs(val - base))
        return worst / abs(base) if relative and base != 0 else worst

    def cr_residual(self, z: complex = 1j, h: float = 1e-4) -> float:
        """Relative Cauchy-Riemann defect |phi_y - i phi_x| / |phi_x| by central differences."""
        fx = (self(z + h) - self(z - h)) / (2 * h)
        fy = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        return float(abs(fy - 1j * fx) / max(abs(fx), 1e-300))

    def scaled(self, c: complex) -> "QDifferential":
        return QDifferential(self.grp, self.q, self.seed_degree, self.depth, self.seed_center,
                             self.coefficient * c, self.ball)


def poincare_qdiff(
    grp: GroupPresentation,
    q: int,
    seed_degree: int = 0,
    depth: int = 6,
    seed_center: complex = 0j,
    check: bool = True,
) -> QDifferential:
    """Poincare series sum over |g| <= depth of (g.w - w0)^m (g'(w))^q, read in the half-plane.

    Warns with SeriesDivergenceWarning when the equivariance residual at i
    grows from depth - 1 to depth.
    """
    omega = QDifferential(grp, q, seed_degree, depth, seed_center)
    if check and grp.rank > 0 and depth >= 2:
        r1 = omega.equivariance_residual(1j, depth - 1)
        r2 = omega.equivariance_residual(1j, depth)
        if r2 > r1:
            warnings.warn(f"equivariance residual grew from {r1:.3g} to {r2:.3g}", SeriesDivergenceWarning)
    return omega


def zero_qdiff(grp: GroupPresentation, q: int) -> QDifferential:
    return QDifferential(grp, q, 0, 0, 0j, 0.0)


# ---------------------------------------------------------------- bundle-valued 1-forms


@dataclass(frozen=True)
class BundleOneForm:
    """E-valued 1-form: evaluator(z, dz) -> real fiber coordinates (K, 2n+1)."""

    n: int
    evaluator: Callable
    closed: bool = True

    def __call__(self, z, dz) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        dz = np.broadcast_to(np.asarray(dz, dtype=complex), z.shape)
        out = self.evaluator(np.atleast_1d(z).ravel(), np.atleast_1d(dz).ravel())
        return out[0] if z.ndim == 0 else out.reshape(z.shape + (dim(self.n),))

    def section(self, z: complex, dz: complex) -> SectionCoords:
        return SectionCoords.from_vector(self(z, dz))

    def __add__(self, other: "BundleOneForm") -> "BundleOneForm":
        if other.n != self.n:
            raise ValueError("rank mismatch")
        f, g = self.evaluator, other.evaluator
        return BundleOneForm(self.n, lambda z, dz: f(z, dz) + g(z, dz), self.closed and other.closed)

    def __rmul__(self, c: float) -> "BundleOneForm":
        f = self.evaluator
        return BundleOneForm(self.n, lambda z, dz: c * f(z, dz), self.closed)


def zero_form(n: int) -> BundleOneForm:
    return BundleOneForm(n, lambda z, dz: np.zeros((len(z), dim(n))))


def phi_map(omega: QDifferential, n: int, automorphic: bool = True) -> BundleOneForm:
    """The L_n-valued 1-form attached to a q-differential with q = n + 1.

    In the unit frame its L_n coordinate on X is conj(x * phi(z) * Im(z)^q),
    x = dz / Im z; every other slot vanishes.
    """
    if omega.q != n + 1:
        raise WeightMismatchError(f"q = {omega.q} does not match n + 1 = {n + 1}")
    ev = omega.automorphic if automorphic else omega

    def evaluator(z, dz):
        y = z.imag
        c = np.conj(dz / y * ev(z) * y**omega.q)
        out = np.zeros((len(z), dim(n)))
        out[:, 2 * n - 1] = c.real
        out[:, 2 * n] = c.imag
        return out

    return BundleOneForm(n, evaluator)


def exact_form(n: int, u: Callable, h: float = 1e-5) -> BundleOneForm:
    """d u for a section u(z) -> real fiber vector, with central differences."""

    def evaluator(z, dz):
        out = np.empty((len(z), dim(n)))
        for k in range(len(z)):
            du = (np.asarray(u(z[k] + h * dz[k])) - np.asarray(u(z[k] - h * dz[k]))) / (2 * h)
            out[k] = du + connection_matrix(n, z[k], dz[k]) @ np.asarray(u(z[k]))
        return out

    return BundleOneForm(n, evaluator)


def closedness_residual(alpha: BundleOneForm, z: complex = 1j, h: float = 1e-3) -> float:
    """Norm of (d alpha)(d/dx, d/dy) with covariant corrections, by central differences.

    d alpha(X, Y) = X(alpha(Y)) - Y(alpha(X)) + A(X) alpha(Y) - A(Y) alpha(X)
    for the commuting coordinate fields X = d/dx, Y = d/dy.
    """
    n = alpha.n
    dx_ay = (alpha(z + h, 1j) - alpha(z - h, 1j)) / (2 * h)
    dy_ax = (alpha(z + 1j * h, 1.0) - alpha(z - 1j * h, 1.0)) / (2 * h)
    corr = connection_matrix(n, z, 1.0) @ alpha(z, 1j) - connection_matrix(n, z, 1j) @ alpha(z, 1.0)
    return float(np.linalg.norm(dx_ay - dy_ax + corr))


# ---------------------------------------------------------------- affine transport and holonomy


def _pieces(path):
    return path.pieces if isinstance(path, PiecewisePath) else [path]


def affine_transport(alpha: BundleOneForm, path, lam: float, V: SectionCoords, step: float = 1e-3):
    """Parallel transport for the affine connection (lam, V) -> (d lam, lam alpha + D V).

    lam is constant; V obeys V' = -A V - lam alpha(c') and is solved by RK4.
    """
    n = alpha.n
    v = V.to_vector().astype(float)
    for piece in _pieces(path):
        L = piece.hyperbolic_length
        if L == 0:
            continue
        m = max(1, int(np.ceil(L / step)))
        h = piece.param_length / m
        t = np.arange(2 * m + 1) * (h / 2)
        zs, dzs = piece.point_and_velocity(t)
        zs, dzs = np.asarray(zs, dtype=complex), np.asarray(dzs, dtype=complex)
        forcing = lam * alpha(zs, dzs)
        As = [connection_matrix(n, zs[j], dzs[j]) for j in range(2 * m + 1)]
        for j in range(m):
            a0, am, a1 = As[2 * j], As[2 * j + 1], As[2 * j + 2]
            f0, fm, f1 = forcing[2 * j], forcing[2 * j + 1], forcing[2 * j + 2]
            k1 = -a0 @ v - f0
            k2 = -am @ (v + h / 2 * k1) - fm
            k3 = -am @ (v + h / 2 * k2) - fm
            k4 = -a1 @ (v + h * k3) - f1
            v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return lam, SectionCoords.from_vector(v)


_EIG: dict = {}


def _generator_eig(n: int):
    if n not in _EIG:
        lam, S = np.linalg.eig(geodesic_generator(n))
        _EIG[n] = (lam.real, S.real, np.linalg.inv(S.real))
    return _EIG[n]


def exact_affine_defect(alpha: BundleOneForm, geo: Geodesic, panel: float = 0.25, order: int = 10) -> np.ndarray:
    """V at the end of ``geo`` for V(0) = 0, lam = 1, using the exact propagator.

    V(L) = -int_0^L D(x_L) exp(-(L-s) M) D(x_s)^{-1} alpha(c'(s)) ds, with the
    integral done by composite Gauss-Legendre.
    """
    n = alpha.n
    L = float(geo.length)
    lam, S, Si = _generator_eig(n)
    npan = max(1, int(np.ceil(L / panel)))
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, L, npan + 1)
    s = ((edges[:-1, None] + edges[1:, None]) / 2 + (edges[1:, None] - edges[:-1, None]) / 2 * xg).ravel()
    w = (np.diff(edges)[:, None] / 2 * wg).ravel()
    z, dz = geo.point_and_velocity(s)
    vals = alpha(z, dz)
    x = dz / z.imag
    acc = np.zeros(dim(n))
    for j in range(len(s)):
        eta = frame_rotation(n, np.conj(x[j])) @ vals[j]
        acc += w[j] * np.exp(-(L - s[j]) * lam) * (Si @ eta)
    xL = complex(geo.frame_velocity(L))
    return -(frame_rotation(n, xL) @ (S @ acc))


def affine_holonomy(
    word: Sequence[int],
    grp: GroupPresentation,
    alpha: BundleOneForm,
    n: int | None = None,
    basepoint: complex = 1j,
    method: str = "exact",
    step: float = 1e-3,
) -> AffineIsometry:
    """Affine holonomy of the closed affine connection at ``basepoint``.

    Linear part: holonomy_rep of the group element. Translation: the V-part of
    the flat affine section started at (1, 0) over g(basepoint) and carried back
    to the base point along the geodesic.
    """
    n = alpha.n if n is None else n
    g = evaluate(word, grp)
    model = HolonomyModel(n, basepoint)
    lin = holonomy_rep(g, n, basepoint).entries
    z0 = complex(basepoint)
    gz = complex(moebius_act(g, z0))
    if abs(gz - z0) <= 1e-14:
        tau = np.zeros(dim(n))
    else:
        geo = geodesic(gz, z0)
        if method == "exact":
            tau = exact_affine_defect(alpha, geo)
        elif method == "rk4":
            tau = affine_transport(alpha, geo, 1.0, SectionCoords.zero(n), step)[1].to_vector()
        else:
            raise ValueError(f"unknown method {method!r}")
    return AffineIsometry(lin, tau, None, g, model)


def generator_translations(grp: GroupPresentation, alpha: BundleOneForm, basepoint: complex = 1j) -> list:
    return [affine_holonomy((i,), grp, alpha, basepoint=basepoint).translation for i in range(1, grp.rank + 1)]


# ---------------------------------------------------------------- neutral section and integral formula


def neutral_coefficients(n: int, rule: str = "recurrence") -> np.ndarray:
    """b_k with (w_c)_{2k+1} = i b_k, k = 0..p, for odd n = 2p + 1.

    rule="recurrence": b_k = -4 (n-2k+1)/(n+2k+1) b_{k-1}, the parallel solution.
    rule="printed-product": b_k = (-4)^k prod_{l<=k} (p-l)/(p+l+1), kept to show
    that it is not parallel for p >= 1.
    """
    if n % 2 == 0:
        raise EvenRankError("the odd-slot neutral section needs odd n")
    p = (n - 1) // 2
    b = np.ones(p + 1)
    for k in range(1, p + 1):
        if rule == "recurrence":
            b[k] = -4.0 * (n - 2 * k + 1) / (n + 2 * k + 1) * b[k - 1]
        elif rule == "printed-product":
            b[k] = -4.0 * (p - k) / (p + k + 1) * b[k - 1]
        else:
            raise ValueError(f"unknown rule {rule!r}")
    return b


def neutral_eta(n: int, rule: str = "recurrence") -> np.ndarray:
    """Real state vector with i b_k in the L_{2k+1} slots (frame where c' = 1)."""
    b = neutral_coefficients(n, rule)
    v = np.zeros(dim(n))
    for k, bk in enumerate(b):
        v[2 * (2 * k + 1)] = bk
    return v


def neutral_section(geo: Geodesic, n: int, t: float = 0.0, rule: str = "recurrence", normalize: bool = True) -> SectionCoords:
    """w_c at c(t) in the unit frame: slot 2k+1 holds i b_k c'^(2k+1), even slots 0.

    With ``normalize`` the result is divided by sqrt(<w_c, w_c>) (sign +1).
    """
    eta = neutral_eta(n, rule)
    if normalize:
        eta = eta / np.sqrt(eta @ bundle_gram(n) @ eta)
    x = complex(geo.frame_velocity(t))
    return SectionCoords.from_vector(frame_rotation(n, x) @ eta)


def axis_geodesic(g: MoebiusElement, offset: float = 0.0, start_near: complex = 1j) -> Geodesic:
    """One period of the axis of g, from the foot of the perpendicular from ``start_near``."""
    return axis_data(g).geodesic(start_near, offset=offset)


def _simpson_nodes(length: float, per_unit: int) -> np.ndarray:
    m = max(2, int(np.ceil(length * per_unit)))
    m += m % 2
    return np.linspace(0.0, length, m + 1)


def margulis_via_integral(
    word: Sequence[int],
    grp: GroupPresentation,
    alpha: BundleOneForm,
    n: int | None = None,
    offset: float = 0.0,
    nodes_per_unit: int = 1000,
    start_near: complex = 1j,
) -> float:
    """int over one period of the axis of <alpha(c'), v_c>, by composite Simpson."""
    n = alpha.n if n is None else n
    g = evaluate(word, grp)
    if not g.is_hyperbolic():
        raise NotHyperbolicError("word is not hyperbolic")
    geo = axis_geodesic(g, offset, start_near)
    t = _simpson_nodes(float(geo.length), nodes_per_unit)
    z, dz = geo.point_and_velocity(t)
    vals = alpha(z, dz)
    G = bundle_gram(n)
    eta = normalized_neutral_eta(n)
    x = dz / z.imag
    integrand = np.array([vals[j] @ G @ (frame_rotation(n, x[j]) @ eta) for j in range(len(t))])
    return float(simpson(integrand, x=t))


def margulis_direct(word: Sequence[int], grp: GroupPresentation, alpha: BundleOneForm, basepoint: complex = 1j,
                    method: str = "exact") -> float:
    """Margulis invariant of the affine holonomy, fuchsian-geodesic convention."""
    return margulis_invariant(affine_holonomy(word, grp, alpha, basepoint=basepoint, method=method))


# ---------------------------------------------------------------- the observable f


def _check_even_weight(omega: QDifferential):
    if omega.q % 2 != 0:
        raise WeightMismatchError(f"q = {omega.q} is not of the form 2p + 2")


def f_values(omega: QDifferential, z, direction, automorphic: bool = True) -> np.ndarray:
    """Im w(u, ..., u) for unit tangents (z, direction), direction in the unit frame."""
    _check_even_weight(omega)
    z = np.asarray(z, dtype=complex)
    phi = omega.automorphic(z) if automorphic else omega(z)
    return np.imag(phi * (np.asarray(direction) * z.imag) ** omega.q)


def f_observable(omega: QDifferential, u: UnitTangent) -> float:
    return float(f_values(omega, u.base, u.dir))


def beta(u: UnitTangent, q: int) -> UnitTangent:
    """Rotate the direction by pi/q."""
    return UnitTangent(u.base, u.dir * np.exp(1j * np.pi / q))


def dirichlet_radius(grp: GroupPresentation) -> float:
    """Circumradius of the Dirichlet domain at i (octagon group only)."""
    if grp.kind != "genus2-cocompact":
        raise ValueError("only the cocompact octagon group has a bounded domain here")
    return float(np.arccosh(1.0 / np.tan(np.pi / 8) ** 2))


def sample_unit_tangents(grp: GroupPresentation, rng: np.random.Generator, size: int):
    """Uniform samples of the unit tangent bundle of the quotient (Liouville measure).

    Points: uniform by hyperbolic area in the disk of the circumradius, kept when
    no generator move brings them closer to i. Directions: uniform angle.
    """
    R = dirichlet_radius(grp)
    pts = []
    need = size
    while need > 0:
        k = int(need * 1.6) + 16
        r = np.arccosh(1 + rng.random(k) * (np.cosh(R) - 1))
        th = rng.random(k) * 2 * np.pi
        z = from_disk(np.tanh(r / 2) * np.exp(1j * th))
        zr, H = reduce_to_dirichlet(grp, z)
        inside = np.all(np.abs(H - np.eye(2)) == 0, axis=(1, 2))
        pts.append(z[inside][:need])
        need -= len(pts[-1])
    z = np.concatenate(pts)
    dirs = np.exp(1j * rng.random(size) * 2 * np.pi)
    return z, dirs


def monte_carlo_mean(omega: QDifferential, rng: np.random.Generator, size: int = 100_000):
    """(mean, standard error) of f over uniform samples of the unit tangent bundle."""
    z, dirs = sample_unit_tangents(omega.grp, rng, size)
    f = f_values(omega, z, dirs, automorphic=False)
    return float(np.mean(f)), float(np.std(f, ddof=1) / np.sqrt(size))


# ---------------------------------------------------------------- closed-geodesic survey


@dataclass
class GeodesicLoopReport:
    word: Word
    length: float
    integral_f: float
    mu_direct: float
    mu_integral: float

    def row(self) -> list:
        return [" ".join(str(x) for x in self.word), repr(self.length), repr(self.integral_f),
                repr(self.mu_direct), repr(self.mu_integral)]


CSV_COLUMNS = ["word", "length", "integral_f", "mu_direct", "mu_integral"]


def reports_to_csv(reports: Sequence[GeodesicLoopReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_to_json(reports: Sequence[GeodesicLoopReport]) -> str:
    return json.dumps([{**asdict(r), "word": list(r.word)} for r in reports], indent=2)


def integral_f(word: Sequence[int], grp: GroupPresentation, omega: QDifferential, nodes_per_unit: int = 1000,
               offset: float = 0.0) -> float:
    """int over one period of the axis of f(c'), by composite Simpson."""
    g = evaluate(word, grp)
    geo = axis_geodesic(g, offset)
    t = _simpson_nodes(float(geo.length), nodes_per_unit)
    z, dz = geo.point_and_velocity(t)
    return float(simpson(f_values(omega, z, dz / z.imag), x=t))


def loop_report(word: Sequence[int], grp: GroupPresentation, omega: QDifferential, n: int,
                nodes_per_unit: int = 1000, with_mu: bool = True) -> GeodesicLoopReport:
    alpha = phi_map(omega, n)
    g = evaluate(word, grp)
    ell = axis_data(g).translation_length
    f_int = integral_f(word, grp, omega, nodes_per_unit)
    if with_mu:
        mu_d = margulis_direct(word, grp, alpha)
        mu_i = margulis_via_integral(word, grp, alpha, nodes_per_unit=nodes_per_unit)
    else:
        mu_d = mu_i = float("nan")
    return GeodesicLoopReport(tuple(word), float(ell), f_int, mu_d, mu_i)


@dataclass
class SurveyResult:
    reports: list
    both_signs: bool
    positive_word: Word | None
    negative_word: Word | None
    exhausted: bool


def geodesic_sign_survey(
    grp: GroupPresentation,
    omega: QDifferential,
    n: int,
    maxlen: int,
    stop_when_both_signs: bool = False,
    with_mu: bool = True,
    nodes_per_unit: int = 1000,
    max_words: int | None = None,
    sign_tol: float = 1e-12,
) -> SurveyResult:
    """Closed-geodesic integrals of f over conjugacy classes, shortest first.

    With ``stop_when_both_signs`` the scan stops at the first class that
    completes a pair of opposite signs (|integral| > sign_tol).
    """
    reports = []
    pos = neg = None
    exhausted = True
    for w in iter_conjugacy_classes(grp, maxlen):
        if max_words is not None and len(reports) >= max_words:
            exhausted = False
            break
        r = loop_report(w, grp, omega, n, nodes_per_unit, with_mu)
        reports.append(r)
        if r.integral_f > sign_tol and pos is None:
            pos = tuple(w)
        if r.integral_f < -sign_tol and neg is None:
            neg = tuple(w)
        if stop_when_both_signs and pos is not None and neg is not None:
            exhausted = False
            break
    return SurveyResult(reports, pos is not None and neg is not None, pos, neg, exhausted)
