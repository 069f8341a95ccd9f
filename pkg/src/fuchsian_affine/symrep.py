"""Symmetric powers of the standard representation of SL(2,R).

Polynomials of degree d in (x, y) are stored in the monomial basis
x^(d-j) y^j, j = 0..d, and g acts by P -> P o g^{-1}. The even powers
d = 2n give the irreducible (2n+1)-dimensional representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .halfplane import MoebiusElement, NotHyperbolicError

REP_TOL = 1e-8


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, MoebiusElement):
        return g.matrix
    return np.asarray(g, dtype=float)


def sym_power_matrix(g, degree: int) -> np.ndarray:
    """Matrix of P -> P o g^{-1} on homogeneous polynomials of the given degree."""
    m = _as_matrix(g)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    det = a * d - b * c
    # g^{-1}(x, y) = (d x - b y, -c x + a y) / det
    u = np.array([d, -b]) / det  # coefficients of the first coordinate in (x, y)
    v = np.array([-c, a]) / det
    N = degree + 1
    upow = [np.array([1.0])]
    vpow = [np.array([1.0])]
    for _ in range(degree):
        upow.append(np.convolve(upow[-1], u))
        vpow.append(np.convolve(vpow[-1], v))
    out = np.zeros((N, N))
    for j in range(N):
        # image of x^(d-j) y^j; coefficient index = power of y
        out[:, j] = np.convolve(upow[degree - j], vpow[j])
    return out


@dataclass(frozen=True)
class RepMatrix:
    """Image of a group element in the (2n+1)-dimensional representation."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (2 * self.n + 1, 2 * self.n + 1):
            raise ValueError(f"expected a {2 * self.n + 1}-square matrix, got {e.shape}")
        object.__setattr__(self, "entries", e)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __matmul__(self, other):
        return self.entries @ np.asarray(other)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))

    def det_residual(self) -> float:
        return abs(np.linalg.det(self.entries) - 1.0)

    def form_residual(self, form: "InvariantForm") -> float:
        """Relative defect of A^T B A = B."""
        A, B = self.entries, form.gram
        return float(np.linalg.norm(A.T @ B @ A - B) / (np.linalg.norm(A) ** 2 * np.linalg.norm(B)))


def sym_power_rep(g, n: int) -> RepMatrix:
    if n < 1:
        raise ValueError("n must be >= 1")
    return RepMatrix(n, sym_power_matrix(g, 2 * n))


@dataclass(frozen=True)
class InvariantForm:
    """A nondegenerate bilinear form, with an optional time direction.

    ``time_direction`` is a vector t with nonzero norm used to split the light
    cone into future and past halves (only meaningful when the negative part
    or the positive part of the signature is one-dimensional).
    """

    gram: np.ndarray
    n: int | None = None
    time_direction: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        object.__setattr__(self, "gram", g)
        if self.time_direction is not None:
            object.__setattr__(self, "time_direction", np.asarray(self.time_direction, dtype=float))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def pair(self, u, v):
        return np.asarray(u) @ self.gram @ np.asarray(v)

    def norm2(self, u) -> float:
        return float(self.pair(u, u))

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.gram, self.gram.T, atol=1e-14))

    def signature(self) -> tuple[int, int]:
        """(number of positive, number of negative) eigenvalues."""
        w = np.linalg.eigvalsh(self.gram)
        return int(np.sum(w > 0)), int(np.sum(w < 0))

    def invariance_residual(self, A) -> float:
        A = np.asarray(A)
        return float(np.linalg.norm(A.T @ self.gram @ A - self.gram) / (np.linalg.norm(A) ** 2 * np.linalg.norm(self.gram)))


def pairing_gram(degree: int) -> np.ndarray:
    """Form induced by the area form of R^2 on degree-d polynomials.

    Symmetric for even degree, antisymmetric for odd degree.
    """
    N = degree + 1
    B = np.zeros((N, N))
    for i in range(N):
        B[i, degree - i] = (-1) ** i / comb(degree, i)
    return B


def invariant_form(n: int) -> InvariantForm:
    """Invariant symmetric form on the (2n+1)-dimensional representation.

    The time direction is the rotation-invariant polynomial (x^2 + y^2)^n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = np.array([comb(n, j // 2) if j % 2 == 0 else 0.0 for j in range(2 * n + 1)], dtype=float)
    return InvariantForm(pairing_gram(2 * n), n, t)


def hyperbolic_eigenvalue(g: MoebiusElement) -> float:
    """The eigenvalue a > 1 of +-g."""
    tr = abs(g.trace)
    if tr <= 2.0 + 1e-10:
        raise NotHyperbolicError(f"|trace| = {tr} <= 2")
    return (tr + np.sqrt(tr * tr - 4.0)) / 2.0


def character(g: MoebiusElement, n: int) -> float:
    """Trace of the (2n+1)-dimensional representation: sum of a^(2j), |j| <= n."""
    a = hyperbolic_eigenvalue(g)
    j = np.arange(-n, n + 1)
    return float(np.sum(a ** (2.0 * j)))
