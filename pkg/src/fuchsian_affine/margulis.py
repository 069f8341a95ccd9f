"""Loxodromic elements, neutral vectors, Margulis invariants and the
opposite-sign obstruction to properness.

Two linear models of the same representation are provided: ``HolonomyModel``
(fiber of the flat bundle at a base point, bundle metric) and
``SymPowerModel`` (even symmetric power, invariant pairing). They are related
by an explicit intertwiner that is an isometry of the forms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np
from scipy.linalg import null_space, schur

from .flatbundle import (
    bundle_gram,
    dim,
    exact_geodesic_transport,
    geodesic_neutral,
    holonomy_rep,
)
from .fuchsian import GroupPresentation, Word, evaluate, reduce_word
from .halfplane import MoebiusElement, axis_data, geodesic, rotation_about, translation_along_imaginary_axis
from .symrep import InvariantForm, pairing_gram, sym_power_matrix

EIG_ONE_TOL = 1e-8
EIG_GAP_TOL = 1e-6
FORM_TOL = 1e-8

CONVENTIONS = ("lightcone3d", "fuchsian-geodesic")


class NotLoxodromicError(ValueError):
    pass


class ConventionError(ValueError):
    pass


# ---------------------------------------------------------------- models


class HolonomyModel:
    """Holonomy of the flat bundle on the fiber over ``basepoint``."""

    def __init__(self, n: int, basepoint: complex = 1j, method: str = "exact"):
        self.n = n
        self.basepoint = complex(basepoint)
        self.method = method
        e0 = np.zeros(dim(n))
        e0[0] = 1.0
        self.form = InvariantForm(bundle_gram(n), n, e0)

    def matrix(self, g: MoebiusElement) -> np.ndarray:
        return holonomy_rep(g, self.n, self.basepoint, self.method).entries

    def geodesic_neutral(self, g: MoebiusElement, epsilon: int = 1) -> np.ndarray:
        """Parallel neutral section along the axis of g, read at the base point.

        The axis is oriented in the direction g translates; the section is
        evaluated at the foot of the perpendicular from the base point and
        carried back along that perpendicular.
        """
        geo = axis_data(g).geodesic(self.basepoint)
        v = geodesic_neutral(self.n, geo, 0.0, epsilon)
        foot = complex(geo.start)
        if abs(foot - self.basepoint) <= 1e-14 * max(1.0, abs(foot)):
            return v
        return exact_geodesic_transport(self.n, geodesic(foot, self.basepoint)) @ v


class SymPowerModel:
    """Even symmetric power with the pairing form rescaled to match the bundle metric.

    ``intertwiner`` T maps the bundle fiber at i to polynomials with
    T hol(g) = sym(g) T and T^T form T = bundle metric. T sends the R factor to a
    positive multiple of (x^2 + y^2)^n.
    """

    def __init__(self, n: int):
        self.n = n
        self.bundle = HolonomyModel(n, 1j)
        T = _intertwiner(n, self.bundle)
        B = pairing_gram(2 * n)
        c = (T.T @ B @ T)[0, 0] / self.bundle.form.gram[0, 0]
        T = T / np.sqrt(abs(c))
        self.sign = float(np.sign(c))
        self.intertwiner = T
        self.form = InvariantForm(self.sign * B, n, T[:, 0])

    def matrix(self, g: MoebiusElement) -> np.ndarray:
        return sym_power_matrix(g, 2 * self.n)

    def geodesic_neutral(self, g: MoebiusElement, epsilon: int = 1) -> np.ndarray:
        return self.intertwiner @ self.bundle.geodesic_neutral(g, epsilon)


def _intertwiner(n: int, bundle: HolonomyModel) -> np.ndarray:
    N = dim(n)
    rows = []
    for g in (translation_along_imaginary_axis(0.7), rotation_about(1j, 1.1)):
        H, S = bundle.matrix(g), sym_power_matrix(g, 2 * n)
        # vec(T H - S T) with column-major vec: (H^T kron I - I kron S) vec(T)
        rows.append(np.kron(H.T, np.eye(N)) - np.kron(np.eye(N), S))
    ns = null_space(np.vstack(rows), rcond=1e-10)
    if ns.shape[1] != 1:
        raise RuntimeError(f"intertwiner space has dimension {ns.shape[1]}")
    T = ns[:, 0].reshape(N, N, order="F")
    if T[0, 0] < 0:
        T = -T
    return T


# ---------------------------------------------------------------- affine maps


@dataclass(frozen=True)
class AffineIsometry:
    """x -> linear x + translation, linear part preserving ``form``."""

    linear: np.ndarray
    translation: np.ndarray
    form: InvariantForm | None = None
    moebius: MoebiusElement | None = None
    model: object | None = None

    def __post_init__(self):
        A = np.asarray(self.linear, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        object.__setattr__(self, "linear", A)
        object.__setattr__(self, "translation", t)
        if A.shape != (len(t), len(t)):
            raise ValueError("linear part and translation have mismatched sizes")
        if self.form is not None:
            res = self.form.invariance_residual(A)
            if res > FORM_TOL:
                raise ValueError(f"linear part does not preserve the form (residual {res:.2e})")

    @property
    def dim(self) -> int:
        return len(self.translation)

    def __call__(self, x):
        return self.linear @ np.asarray(x) + self.translation

    def __matmul__(self, other: "AffineIsometry") -> "AffineIsometry":
        mob = None
        if self.moebius is not None and other.moebius is not None:
            mob = self.moebius @ other.moebius
        return AffineIsometry(
            self.linear @ other.linear,
            self.translation + self.linear @ other.translation,
            self.form,
            mob,
            self.model,
        )

    def inverse(self) -> "AffineIsometry":
        if self.form is not None:
            G = self.form.gram
            Ainv = np.linalg.solve(G, self.linear.T @ G)
        else:
            Ainv = np.linalg.inv(self.linear)
        mob = None if self.moebius is None else self.moebius.inverse()
        return AffineIsometry(Ainv, -Ainv @ self.translation, self.form, mob, self.model)

    def power(self, k: int) -> "AffineIsometry":
        if k < 0:
            return self.inverse().power(-k)
        out = AffineIsometry(np.eye(self.dim), np.zeros(self.dim), self.form,
                             MoebiusElement.identity() if self.moebius is not None else None, self.model)
        for _ in range(k):
            out = out @ self
        return out


def affine_fixed_point(phi: AffineIsometry) -> np.ndarray:
    """The unique solution of phi(x) = x when 1 is not an eigenvalue of the linear part."""
    return np.linalg.solve(np.eye(phi.dim) - phi.linear, phi.translation)


# ---------------------------------------------------------------- loxodromic data


@dataclass(frozen=True)
class LoxodromicData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, matching eigenvalues
    neutral_index: int | None
    null_residual: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def neutral(self) -> np.ndarray:
        return self.eigenvectors[:, self.neutral_index]

    def expanding(self) -> np.ndarray:
        return self.eigenvectors[:, np.abs(self.eigenvalues) > 1 + EIG_ONE_TOL]

    def contracting(self) -> np.ndarray:
        return self.eigenvectors[:, np.abs(self.eigenvalues) < 1 - EIG_ONE_TOL]


def loxodromic_data(A, form: InvariantForm | None = None, require_neutral: bool = True) -> LoxodromicData:
    """Real eigen-decomposition of a matrix with simple real spectrum.

    Eigenvalues come from the real Schur form; a 2x2 block (complex pair) or
    two eigenvalues closer than 1e-6 (relative) raise NotLoxodromicError.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    T, _ = schur(A, output="real")
    scale = max(1.0, float(np.max(np.abs(np.diag(T)))))
    sub = np.abs(np.diag(T, -1))
    if np.any(sub > 1e-12 * scale):
        raise NotLoxodromicError("spectrum has a complex pair")
    lam = np.sort(np.diag(T))
    gaps = np.diff(lam) / np.maximum(1.0, np.maximum(np.abs(lam[1:]), np.abs(lam[:-1])))
    if N > 1 and np.min(gaps) < EIG_GAP_TOL:
        raise NotLoxodromicError("repeated eigenvalue")
    near = np.abs(lam - 1.0)
    ones = np.nonzero(near <= EIG_ONE_TOL * scale)[0]
    if require_neutral and len(ones) != 1:
        raise NotLoxodromicError(f"expected one eigenvalue at 1, found {len(ones)}")
    idx = int(ones[0]) if len(ones) == 1 else None
    vecs = np.empty((N, N))
    for j, l in enumerate(lam):
        l = 1.0 if j == idx else l
        _, _, vt = np.linalg.svd(A - l * np.eye(N))
        e = vt[-1]
        k = int(np.argmax(np.abs(e)))
        vecs[:, j] = e if e[k] > 0 else -e
    nres = 0.0
    if form is not None:
        for j in range(N):
            if j != idx:
                e = vecs[:, j]
                nres = max(nres, abs(form.norm2(e)) / (e @ e))
    return LoxodromicData(lam, vecs, idx, float(nres))


def _orth(M: np.ndarray) -> np.ndarray:
    if M.shape[1] == 0:
        return M
    q, _ = np.linalg.qr(M)
    return q


def _decomposition(d: LoxodromicData) -> dict:
    v = d.neutral[:, None]
    ep, em = d.expanding(), d.contracting()
    return {
        "v": v,
        "E+": ep,
        "E-": em,
        "v+E+": np.hstack([v, ep]),
        "v+E-": np.hstack([v, em]),
        "E++E-": np.hstack([ep, em]),
    }


def general_position_margin(d1: LoxodromicData, d2: LoxodromicData) -> float:
    """Smallest singular value that decides the intersection dimensions.

    For every pair (U from the first, V from the second) the stacked
    orthonormal bases [U V] have rank min(N, dim U + dim V) exactly when
    dim(U cap V) is minimal; the margin is the smallest such relevant
    singular value (0 when some pair is degenerate).
    """
    if d1.dim != d2.dim:
        raise ValueError("dimension mismatch")
    N = d1.dim
    s1, s2 = _decomposition(d1), _decomposition(d2)
    margin = np.inf
    for U in s1.values():
        for V in s2.values():
            r = min(N, U.shape[1] + V.shape[1])
            sv = np.linalg.svd(np.hstack([_orth(U), _orth(V)]), compute_uv=False)
            margin = min(margin, sv[r - 1] if r > 0 else np.inf)
    return float(margin)


def general_position(d1: LoxodromicData, d2: LoxodromicData, tol: float = 1e-8) -> bool:
    return general_position_margin(d1, d2) > tol


# ---------------------------------------------------------------- neutral vectors


def _future(e: np.ndarray, form: InvariantForm) -> np.ndarray:
    t = form.time_direction
    if np.sign(form.pair(e, t)) != np.sign(form.norm2(t)):
        return -e
    return e


def neutral_vector(
    A,
    form: InvariantForm,
    convention: str = "fuchsian-geodesic",
    epsilon: int = 1,
    moebius: MoebiusElement | None = None,
    model=None,
    data: LoxodromicData | None = None,
) -> np.ndarray:
    """Fixed vector of A normalized to |<v,v>| = 1, with sign set by ``convention``.

    lightcone3d: with e1 (largest eigenvalue) and e2 (smallest) null
    eigenvectors on the future side of the time direction, (v, e1, e2) is a
    positively oriented basis. fuchsian-geodesic: v is the parallel section
    along the oriented axis of ``moebius`` in ``model``.
    Both are multiplied by ``epsilon``.
    """
    if convention not in CONVENTIONS:
        raise ConventionError(f"unknown convention {convention!r}")
    A = np.asarray(A, dtype=float)
    if convention == "lightcone3d":
        if A.shape[0] != 3:
            raise ConventionError("lightcone3d applies only in dimension 3")
        d = data or loxodromic_data(A, form)
        v = d.neutral / np.sqrt(abs(form.norm2(d.neutral)))
        e1 = _future(d.eigenvectors[:, -1], form)
        e2 = _future(d.eigenvectors[:, 0], form)
        if np.linalg.det(np.column_stack([v, e1, e2])) < 0:
            v = -v
        return epsilon * v
    if moebius is None or model is None:
        raise ConventionError("fuchsian-geodesic needs the Moebius element and its model")
    v = model.geodesic_neutral(moebius, epsilon)
    return v


def margulis_invariant(
    phi: AffineIsometry,
    convention: str = "fuchsian-geodesic",
    epsilon: int = 1,
    x=None,
) -> float:
    """<phi(x) - x, v> for the neutral vector v of the linear part (x = 0 by default)."""
    form = phi.form if phi.form is not None else getattr(phi.model, "form", None)
    if form is None:
        raise ValueError("affine map carries no invariant form")
    if convention == "lightcone3d":
        data = loxodromic_data(phi.linear, form)
    else:
        if phi.moebius is None or not phi.moebius.is_hyperbolic():
            raise NotLoxodromicError("linear part is not loxodromic")
        data = None
    v = neutral_vector(phi.linear, form, convention, epsilon, phi.moebius, phi.model, data)
    disp = phi.translation if x is None else phi(x) - np.asarray(x)
    return float(form.pair(disp, v))


# ---------------------------------------------------------------- affine deformations of a group


def generator_affine_maps(grp: GroupPresentation, model, translations: Sequence) -> dict:
    if len(translations) != grp.rank:
        raise IndexError(f"{len(translations)} translations for {grp.rank} generators")
    out = {}
    for i, (g, t) in enumerate(zip(grp.generators, translations), start=1):
        phi = AffineIsometry(model.matrix(g), np.asarray(t, dtype=float), model.form, g, model)
        out[i] = phi
        out[-i] = phi.inverse()
    return out


def cocycle_extend(grp: GroupPresentation, model, translations: Sequence, w: Sequence[int], maps: dict | None = None) -> AffineIsometry:
    """Image of w under the affine extension with the given generator translations.

    tau(ab) = tau(a) + rho(a) tau(b).
    """
    maps = maps or generator_affine_maps(grp, model, translations)
    N = dim(model.n)
    A = np.eye(N)
    t = np.zeros(N)
    for x in reduce_word(w):
        if abs(x) > grp.rank:
            raise IndexError(f"letter {x} out of range")
        phi = maps[x]
        t = t + A @ phi.translation
        A = A @ phi.linear
    return AffineIsometry(A, t, None, evaluate(w, grp), model)


@dataclass
class ObstructionCertificate:
    word1: Word
    word2: Word
    mu1: float
    mu2: float
    general_position: bool
    verdict: str
    convention: str = "fuchsian-geodesic"
    epsilon: int = 1
    margin: float = 0.0
    tolerances: dict = field(default_factory=lambda: {"general_position": 1e-8, "eigenvalue_one": EIG_ONE_TOL})

    def __post_init__(self):
        expect = "obstructed" if (self.general_position and self.mu1 * self.mu2 <= 0) else "inconclusive"
        if self.verdict != expect:
            raise ValueError(f"verdict {self.verdict!r} inconsistent with data")

    def to_dict(self) -> dict:
        return {
            "word1": list(self.word1),
            "word2": list(self.word2),
            "mu1": self.mu1,
            "mu2": self.mu2,
            "general_position": self.general_position,
            "verdict": self.verdict,
            "convention": self.convention,
            "epsilon": self.epsilon,
            "margin": self.margin,
            "tolerances": self.tolerances,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def properness_obstruction(
    grp: GroupPresentation,
    translations: Sequence,
    words: Sequence[Sequence[int]],
    convention: str = "fuchsian-geodesic",
    model=None,
    epsilon: int = 1,
    tol: float = 1e-8,
) -> ObstructionCertificate | None:
    """First pair (in list order) in general position with mu1 * mu2 <= 0.

    None means no obstruction was found among the words, which does not prove
    the action proper.
    """
    if model is None:
        model = SymPowerModel(len(translations[0]) // 2)
    maps = generator_affine_maps(grp, model, translations)
    mus, datas = [], []
    for w in words:
        phi = cocycle_extend(grp, model, translations, w, maps)
        mus.append(margulis_invariant(phi, convention, epsilon))
        datas.append(loxodromic_data(phi.linear, model.form))
    for i, j in combinations(range(len(words)), 2):
        if mus[i] * mus[j] > 0:
            continue
        margin = general_position_margin(datas[i], datas[j])
        gp = margin > tol
        if gp:
            return ObstructionCertificate(tuple(words[i]), tuple(words[j]), mus[i], mus[j], True, "obstructed",
                                          convention, epsilon, margin, {"general_position": tol, "eigenvalue_one": EIG_ONE_TOL})
    return None


# ---------------------------------------------------------------- extended precision


def _sym_power_mp(m, degree: int, mp):
    # same convention as symrep.sym_power_matrix, in mpmath arithmetic
    a, b, c, d = m
    u, v = [d, -b], [-c, a]

    def conv(p, q):
        out = [mp.mpf(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return out

    upow, vpow = [[mp.mpf(1)]], [[mp.mpf(1)]]
    for _ in range(degree):
        upow.append(conv(upow[-1], u))
        vpow.append(conv(vpow[-1], v))
    M = mp.matrix(degree + 1, degree + 1)
    for j in range(degree + 1):
        col = conv(upow[degree - j], vpow[j])
        for i in range(degree + 1):
            M[i, j] = col[i]
    return M


def margulis_invariant_hp(
    grp: GroupPresentation,
    translations: Sequence,
    w: Sequence[int],
    model: SymPowerModel,
    epsilon: int = 1,
    dps: int = 60,
) -> float:
    """Margulis invariant of a word in the symmetric-power model, in mpmath arithmetic.

    Pairing the translation with the neutral vector cancels entries of size
    about exp(n * length); composing the word with ``dps`` digits removes that
    loss. Each generator is rescaled to determinant exactly 1 first, the neutral
    vector is found by inverse iteration, and its sign is taken from the
    fuchsian-geodesic vector of the double-precision model.
    """
    import mpmath

    mp = mpmath.mp
    n = model.n
    N = dim(n)
    w = reduce_word(w)
    with mpmath.workdps(dps):
        gens = {}
        for i, (g, t) in enumerate(zip(grp.generators, translations), start=1):
            a, b, c, d = (mp.mpf(float(x)) for x in (g.a, g.b, g.c, g.d))
            s = mp.sqrt(a * d - b * c)
            a, b, c, d = a / s, b / s, c / s, d / s
            R = _sym_power_mp((a, b, c, d), 2 * n, mp)
            Rinv = _sym_power_mp((d, -b, -c, a), 2 * n, mp)
            tau = mp.matrix([mp.mpf(float(x)) for x in t])
            gens[i] = (R, tau)
            gens[-i] = (Rinv, -(Rinv * tau))
        A = mp.eye(N)
        tau = mp.matrix(N, 1)
        for x in w:
            R, t = gens[x]
            tau = tau + A * t
            A = A * R
        # the pairing form with exact rational entries, so that A^T G A = G holds to dps digits
        G = mp.matrix(N, N)
        for i in range(N):
            G[i, N - 1 - i] = mp.mpf(int(model.sign) * (-1) ** i) / comb(2 * n, i)
        guess = model.geodesic_neutral(evaluate(w, grp), epsilon)
        x = mp.matrix([mp.mpf(float(y)) for y in guess])
        shift = 1 + mp.mpf(10) ** (-(dps // 2))
        for _ in range(2):
            x = mp.lu_solve(A - shift * mp.eye(N), x)
            x = x / mp.norm(x)
        xx = (x.T * G * x)[0]
        x = x / mp.sqrt(abs(xx))
        # <x, guess> has the sign of <x, x> when they point the same way
        if (x.T * G * mp.matrix([mp.mpf(float(y)) for y in guess]))[0] * xx < 0:
            x = -x
        return float((tau.T * G * x)[0])
