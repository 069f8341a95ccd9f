"""Finitely generated Fuchsian groups: words, Schottky groups, the genus-2 octagon group.

Words are tuples of nonzero ints; ``k`` stands for the k-th generator (1-based)
and ``-k`` for its inverse.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .halfplane import (
    MoebiusElement,
    axis_data,
    rotation_about,
    to_disk,
    translation_along_imaginary_axis,
)

Word = tuple


class PingPongError(ValueError):
    """Ping-pong half-disks overlap, so freeness/discreteness is not certified."""


class WordIndexError(IndexError):
    pass


def reduce_word(letters: Sequence[int]) -> Word:
    """Free reduction: cancel adjacent ``k, -k`` pairs."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise WordIndexError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def inverse_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = list(reduce_word(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def letter_key(x: int) -> tuple[int, int]:
    """Letter order used everywhere: 1 < -1 < 2 < -2 < ..."""
    return (abs(x), 1 if x < 0 else 0)


def word_key(w: Sequence[int]) -> tuple:
    return tuple(letter_key(x) for x in w)


def is_proper_power(w: Sequence[int]) -> bool:
    n = len(w)
    for d in range(1, n // 2 + 1):
        if n % d == 0 and tuple(w[:d]) * (n // d) == tuple(w):
            return True
    return False


def random_reduced_word(rng: np.random.Generator, rank: int, length: int) -> Word:
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    out: list[int] = []
    while len(out) < length:
        x = letters[rng.integers(len(letters))]
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class PingPongCertificate:
    """Boundary arcs (disk-model angles) of the ping-pong half-disks.

    ``arcs[(i, s)]`` is ``(start, extent)`` for generator i, side s = +1 (attracting)
    or -1 (repelling). ``holds`` is True when all arcs are pairwise disjoint.
    """

    arcs: dict
    min_gap: float
    mapping_residual: float

    @property
    def holds(self) -> bool:
        return self.min_gap > 0 and self.mapping_residual < 1e-8


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    kind: str
    relator: Word | None = None
    parameters: dict = field(default_factory=dict)
    certificate: PingPongCertificate | None = None

    def __post_init__(self):
        for g in self.generators:
            if not g.is_hyperbolic():
                raise ValueError("generators must be hyperbolic")
        if self.kind == "genus2-cocompact" and self.relation_residual() > 1e-8:
            raise ValueError("surface relation does not hold")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter(self, x: int) -> MoebiusElement:
        if x == 0 or abs(x) > self.rank:
            raise WordIndexError(f"letter {x} out of range for rank {self.rank}")
        g = self.generators[abs(x) - 1]
        return g if x > 0 else g.inverse()

    def relation_residual(self) -> float:
        """min ||R -+ I|| for the stored relator R (0 when there is none)."""
        if self.relator is None:
            return 0.0
        m = evaluate(self.relator, self, reduce=False).matrix
        return float(min(np.linalg.norm(m - np.eye(2)), np.linalg.norm(m + np.eye(2))))

    def to_json(self) -> str:
        def fmt(x):
            return format(x, ".17g")

        doc = {
            "kind": self.kind,
            "generators": [[fmt(g.a), fmt(g.b), fmt(g.c), fmt(g.d)] for g in self.generators],
            "relator": None if self.relator is None else list(self.relator),
            "parameters": self.parameters,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GroupPresentation":
        doc = json.loads(text)
        gens = tuple(MoebiusElement(*(float(s) for s in row)) for row in doc["generators"])
        rel = doc.get("relator")
        cert = ping_pong_certificate(gens) if doc["kind"] == "free-schottky" else None
        return cls(gens, doc["kind"], None if rel is None else tuple(rel), doc.get("parameters", {}), cert)


def evaluate(word: Sequence[int], grp: GroupPresentation, reduce: bool = True) -> MoebiusElement:
    """Ordered product of the word's letters; the empty word gives the identity."""
    w = reduce_word(word) if reduce else tuple(word)
    m = np.eye(2)
    for x in w:
        m = m @ grp.letter(x).matrix
    return MoebiusElement.from_matrix(m)


def trivial_group() -> GroupPresentation:
    return GroupPresentation((), "trivial")


def _circle_angle(x) -> float:
    # boundary point of H^2 (real or inf) -> angle on the unit circle
    if np.isinf(x):
        return 0.0
    return float(np.angle(to_disk(complex(x))) % (2 * np.pi))


def _moebius_boundary(m: np.ndarray, x: float) -> float:
    den = m[1, 0] * x + m[1, 1]
    if abs(den) < 1e-300:
        return np.inf
    return (m[0, 0] * x + m[0, 1]) / den


def ping_pong_certificate(generators: Sequence[MoebiusElement], center: complex = 1j) -> PingPongCertificate:
    """Ping-pong half-disks bounded by perpendiculars to each axis at +-l/2.

    Each generator g maps the complement of its repelling half-disk onto the
    closure of its attracting one; disjointness of all 2k half-disks certifies
    that the group is free on the generators and discrete.
    """
    arcs = {}
    mapping = 0.0
    for i, g in enumerate(generators, start=1):
        ax = axis_data(g)
        h = ax.geodesic(center).h  # h(i) is the foot of the perpendicular from center
        r, R = np.exp(-ax.translation_length / 2), np.exp(ax.translation_length / 2)
        for s, (lo, hi) in {-1: (-r, r), 1: (R, -R)}.items():
            a0 = _circle_angle(_moebius_boundary(h, lo))
            a1 = _circle_angle(_moebius_boundary(h, hi))
            arcs[(i, s)] = (a0, (a1 - a0) % (2 * np.pi))
        gm = g.matrix
        for x in (-r, r):
            image = _circle_angle(_moebius_boundary(gm, _moebius_boundary(h, x)))
            target = _circle_angle(_moebius_boundary(h, x * R * R))
            d = abs((image - target + np.pi) % (2 * np.pi) - np.pi)
            mapping = max(mapping, d)
    keys = list(arcs)
    gap = np.inf
    for p in range(len(keys)):
        for q in range(p + 1, len(keys)):
            a, alpha = arcs[keys[p]]
            b, beta = arcs[keys[q]]
            gap = min(gap, ((b - a) % (2 * np.pi)) - alpha, ((a - b) % (2 * np.pi)) - beta)
    return PingPongCertificate(arcs, float(gap), float(mapping))


def schottky_group(t: float, separation: float = 1.0, t2: float | None = None, center: float = 0.0) -> GroupPresentation:
    """Two-generator Schottky group.

    Generator 1 translates along the imaginary axis by ``t``; generator 2 translates
    by ``t2`` (default ``t``) along the geodesic with endpoints center - separation
    and center + separation. With center 0 the two axes are perpendicular.
    Raises PingPongError when the ping-pong half-disks overlap.
    """
    if t <= 0 or separation <= 0:
        raise ValueError("t and separation must be positive")
    t2 = t if t2 is None else t2
    a = translation_along_imaginary_axis(t)
    s = separation
    conj = MoebiusElement.from_matrix(np.array([[s - center, s + center], [-1.0, 1.0]]))
    b = conj @ translation_along_imaginary_axis(t2) @ conj.inverse()
    cert = ping_pong_certificate([a, b])
    if not cert.holds:
        raise PingPongError(f"ping-pong half-disks overlap (gap {cert.min_gap:.3g})")
    return GroupPresentation((a, b), "free-schottky", None, {"t": t, "separation": s, "t2": t2, "center": center}, cert)


GENUS2_RELATOR: Word = (1, -2, 3, -4, -1, 2, -3, 4)


def genus2_group() -> GroupPresentation:
    """Side pairings of the regular octagon with angles pi/4 centered at i.

    g_k = R(k pi/4) T R(k pi/4)^{-1}, k = 0..3, with T the translation of length
    l, cosh(l/2) = 1 + sqrt(2), pairing opposite sides. The surface relation
    satisfied by these generators is ``GENUS2_RELATOR``.
    """
    ell = 2 * np.arccosh(1 + np.sqrt(2))
    tr = translation_along_imaginary_axis(ell)
    gens = []
    for k in range(4):
        r = rotation_about(1j, k * np.pi / 4)
        gens.append(r @ tr @ r.inverse())
    return GroupPresentation(tuple(gens), "genus2-cocompact", GENUS2_RELATOR, {"translation_length": ell})


@dataclass
class GroupBall:
    """Distinct group elements of word length <= depth (BFS order)."""

    words: list
    matrices: np.ndarray  # (K, 2, 2)
    lengths: np.ndarray


def _matrix_keys(mats: np.ndarray) -> np.ndarray:
    # +-g are the same isometry; pick the sign with nonnegative trace
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    s = np.where(tr < 0, -1.0, 1.0)
    return (mats * s[:, None, None]).reshape(len(mats), 4)


def group_ball(grp: GroupPresentation, depth: int, tol: float = 1e-6) -> GroupBall:
    """Distinct group elements of word length <= depth, shortest words first.

    Elements reached by several words are identified when their sign-normalized
    matrices agree to ``tol``. In a torsion-free Fuchsian group distinct elements
    differ by at least about 2/||g|| in this norm, far above rounding.
    """
    letters = [i for i in range(1, grp.rank + 1)] + [-i for i in range(1, grp.rank + 1)]
    gm = {x: grp.letter(x).matrix for x in letters}
    words: list[Word] = [()]
    mats = [np.eye(2)]
    lengths = [0]
    known = _matrix_keys(np.eye(2)[None])
    frontier = [((), np.eye(2))]
    for level in range(1, depth + 1):
        cand_w, cand_m = [], []
        for w, m in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                cand_w.append(w + (x,))
                cand_m.append(m @ gm[x])
        if not cand_m:
            break
        cm = np.array(cand_m)
        co = _matrix_keys(cm)
        dist, _ = cKDTree(known).query(co)
        idx = np.nonzero(dist > tol)[0]
        co = co[idx]
        drop = set()
        if len(idx) > 1:
            for p, q in cKDTree(co).query_pairs(tol):
                drop.add(max(p, q))
        keep = [j for j in range(len(idx)) if j not in drop]
        frontier = [(cand_w[idx[j]], cand_m[idx[j]]) for j in keep]
        for w, m in frontier:
            words.append(w)
            mats.append(m)
            lengths.append(level)
        known = np.vstack([known, co[keep]])
    return GroupBall(words, np.array(mats), np.array(lengths))


def iter_conjugacy_classes(grp: GroupPresentation, maxlen: int, include_powers: bool = True) -> Iterator[Word]:
    """Cyclically reduced representatives, one per cyclic class, shortest first.

    Classes are those of the free group on the generators: a word and its
    rotations are identified, but a word and its inverse are listed separately.
    The representative is the rotation that is least in ``word_key`` order, and
    output is ordered by length then ``word_key``. For a surface group two listed
    words of length >= half the relator length may still be conjugate.
    """
    if maxlen < 1:
        raise ValueError("maxlen must be >= 1")
    letters = sorted([i for i in range(1, grp.rank + 1)] + [-i for i in range(1, grp.rank + 1)], key=letter_key)

    def extend(prefix: list[int], length: int):
        if len(prefix) == length:
            if prefix[0] == -prefix[-1] and length > 1:
                return
            w = tuple(prefix)
            k = word_key(w)
            if any(word_key(w[j:] + w[:j]) < k for j in range(1, length)):
                return
            if not include_powers and is_proper_power(w):
                return
            yield w
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            # rotation-minimal words start with their least letter
            if prefix and letter_key(x) < letter_key(prefix[0]):
                continue
            prefix.append(x)
            yield from extend(prefix, length)
            prefix.pop()

    for length in range(1, maxlen + 1):
        yield from extend([], length)


def enumerate_conjugacy_classes(grp: GroupPresentation, maxlen: int, include_powers: bool = True) -> list[Word]:
    return list(iter_conjugacy_classes(grp, maxlen, include_powers))


def reduce_to_dirichlet(grp: GroupPresentation, z, center: complex = 1j, max_steps: int = 10_000):
    """Move points into the Dirichlet domain of ``center`` by greedy letter moves.

    Each step applies the letter that brings the point closest to ``center``,
    while that strictly decreases the distance. For the octagon group this
    lands in the octagon, whose side pairings are the generators.
    Returns (reduced points, matrices h with h(z) = reduced point).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    K = len(z)
    H = np.tile(np.eye(2), (K, 1, 1))
    if grp.rank == 0:
        return z, H
    letters = [grp.letter(x).matrix for x in range(1, grp.rank + 1)]
    letters += [grp.letter(-x).matrix for x in range(1, grp.rank + 1)]
    L = np.array(letters)

    def cosh_dist(w):
        # monotone in the distance to center
        return np.abs(w - center) ** 2 / (w.imag * center.imag)

    active = np.ones(K, dtype=bool)
    for _ in range(max_steps):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        w = z[idx]
        cur = cosh_dist(w)
        imgs = (L[:, 0, 0, None] * w + L[:, 0, 1, None]) / (L[:, 1, 0, None] * w + L[:, 1, 1, None])
        dists = cosh_dist(imgs)
        best = np.argmin(dists, axis=0)
        bd = dists[best, np.arange(len(idx))]
        move = bd < cur * (1 - 1e-13)
        mi = idx[move]
        z[mi] = imgs[best[move], np.nonzero(move)[0]]
        H[mi] = L[best[move]] @ H[mi]
        active[idx[~move]] = False
    else:
        raise RuntimeError("domain reduction did not terminate")
    return z, H
