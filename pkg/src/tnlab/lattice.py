"""Finite-dimensional weighted l_p sequence lattices and their duals.

A :class:`SequenceSpace` with exponent ``p`` and weights ``w`` carries the norm

    ||x|| = (sum_i w_i |x_i|^p)^(1/p)        (p finite)
    ||x|| = max_i w_i |x_i|                  (p = inf)

Both cases are ``||s * x||_p`` for the per-coordinate scale ``s`` returned by
:attr:`SequenceSpace.scale`, so the dual space is the l_q space with scale
``1 / s``.  The order is coordinatewise, which makes the unit vectors a
1-unconditional basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

INF = math.inf

# Ball-membership slack for DualPoint.in_ball.
BALL_TOL = 1e-12


def parse_exponent(p) -> float:
    """Accept a number, ``math.inf`` or the strings ``"inf"``/``"∞"``."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return INF
        p = float(s)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p) -> float:
    """Return q with 1/p + 1/q = 1, using the conventions 1 <-> inf."""
    p = parse_exponent(p)
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def format_exponent(p: float) -> str:
    return "inf" if p == INF else f"{p:g}"


def signed_power(a, p: float):
    """``sign(a) * |a|**p`` coordinatewise."""
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.abs(a) ** p


def lp_norm(x, p: float) -> float:
    """Unweighted l_p norm with exact handling of p = 1, 2, inf."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0:
        return 0.0
    if p == INF:
        return float(x.max())
    if p == 1:
        return float(x.sum())
    if p == 2:
        return float(np.sqrt(np.dot(x, x)))
    top = x.max()
    if top == 0:
        return 0.0
    # rescale to avoid overflow for large p
    return float(top * np.sum((x / top) ** p) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class SequenceSpace:
    """Weighted l_p on ``dim`` coordinates."""

    dim: int
    exponent: float = 2.0
    weights: tuple[float, ...] | None = None
    _dual: SequenceSpace | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "exponent", parse_exponent(self.exponent))
        w = (1.0,) * self.dim if self.weights is None else tuple(float(v) for v in self.weights)
        if len(w) != self.dim:
            raise ValueError(f"expected {self.dim} weights, got {len(w)}")
        if not all(v > 0 and math.isfinite(v) for v in w):
            raise ValueError("weights must be finite and strictly positive")
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, SequenceSpace):
            return NotImplemented
        return (self.dim, self.exponent, self.weights) == (other.dim, other.exponent, other.weights)

    def __hash__(self):
        return hash((self.dim, self.exponent, self.weights))

    @property
    def unit_weights(self) -> bool:
        return all(v == 1.0 for v in self.weights)

    @property
    def scale(self) -> np.ndarray:
        w = np.asarray(self.weights)
        if self.exponent == INF or self.exponent == 1:
            s = w.copy()
        else:
            s = w ** (1.0 / self.exponent)
        s.flags.writeable = False
        return s

    @property
    def conjugate(self) -> float:
        return conjugate_exponent(self.exponent)

    def dual(self) -> SequenceSpace:
        """The dual space; ``S.dual().dual() is S``."""
        if self._dual is None:
            p = self.exponent
            w = np.asarray(self.weights)
            if p == 1 or p == INF:
                dw = 1.0 / w
            else:
                dw = w ** (1.0 - conjugate_exponent(p))
            d = SequenceSpace(self.dim, conjugate_exponent(p), tuple(dw))
            object.__setattr__(d, "_dual", self)
            object.__setattr__(self, "_dual", d)
        return self._dual

    def norm(self, coords) -> float:
        x = self._check(coords)
        return lp_norm(self.scale * x, self.exponent)

    def dual_norm(self, coords) -> float:
        """Norm of ``coords`` read as a functional on this space."""
        x = self._check(coords)
        return lp_norm(x / self.scale, self.conjugate)

    def vector(self, coords) -> Vector:
        return Vector(self._check(coords), self)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def _check(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x

    def __str__(self):
        tag = f"l_{format_exponent(self.exponent)}^{self.dim}"
        return tag if self.unit_weights else f"{tag}(w={list(self.weights)})"


def _frozen(x) -> np.ndarray:
    a = np.array(x, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Vector:
    coords: np.ndarray
    space: SequenceSpace

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.space._check(self.coords)))

    def norm(self) -> float:
        return self.space.norm(self.coords)

    def abs(self) -> Vector:
        return Vector(np.abs(self.coords), self.space)

    def meet(self, other: Vector) -> Vector:
        if other.space != self.space:
            raise ValueError("meet of vectors from different spaces")
        return Vector(np.minimum(self.coords, other.coords), self.space)

    def join(self, other: Vector) -> Vector:
        if other.space != self.space:
            raise ValueError("join of vectors from different spaces")
        return Vector(np.maximum(self.coords, other.coords), self.space)

    def __le__(self, other: Vector) -> bool:
        return bool(np.all(self.coords <= other.coords))


@dataclass(frozen=True, eq=False)
class DualPoint:
    """A functional on ``space.dual()``; ``space`` is the dual space itself."""

    coords: np.ndarray
    space: SequenceSpace

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.space._check(self.coords)))

    @property
    def norm(self) -> float:
        return self.space.norm(self.coords)

    @property
    def positive(self) -> bool:
        return bool(np.all(self.coords >= 0))

    def in_ball(self, tol: float = BALL_TOL) -> bool:
        return self.norm <= 1 + tol

    def __call__(self, x) -> float:
        if isinstance(x, Vector):
            x = x.coords
        return float(np.dot(self.coords, x))

    def to_list(self) -> list[float]:
        return [float(v) for v in self.coords]


def norm(x: Vector) -> float:
    return x.norm()


def _normalized_linear_max(d: np.ndarray, r: float, positive: bool) -> tuple[float, np.ndarray]:
    """Maximize <d, z> over the unweighted unit l_r ball (or its positive part)."""
    m = d.size
    z = np.zeros(m)
    if positive:
        if r == INF:
            z[d >= 0] = 1.0
            return float(np.sum(np.maximum(d, 0.0))), z
        d = np.maximum(d, 0.0)
    if r == INF:
        z = np.where(d >= 0, 1.0, -1.0)
        return float(np.sum(np.abs(d))), z
    if r == 1:
        j = int(np.argmax(np.abs(d)))
        if positive and d[j] <= 0:
            return 0.0, z
        z[j] = 1.0 if d[j] >= 0 else -1.0
        return float(abs(d[j])), z
    rc = conjugate_exponent(r)
    value = lp_norm(d, rc)
    if value == 0:
        return 0.0, z
    z = np.sign(d) * (np.abs(d) / value) ** (rc - 1.0)
    return value, z


def linear_max_over_ball(c, ball: SequenceSpace, positive: bool = False) -> tuple[float, DualPoint]:
    """Maximize ``<c, x>`` over the unit ball of ``ball``.

    Returns the value together with an attaining point.  With
    ``positive=True`` the maximization runs over the positive part of the
    ball, so only the positive part of ``c`` contributes.

    Ties are broken deterministically: for an l_inf ball the attainer is
    ``sign(c_i)`` with ``sign(0) = +1`` (``1`` or ``0`` in the positive case);
    for an l_1 ball the smallest index among the maximal ``|c_i|`` wins.
    """
    c = ball._check(c)
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    s = ball.scale
    value, z = _normalized_linear_max(c / s, ball.exponent, positive)
    return value, DualPoint(z / s, ball)


def holder_mean_functional(points: Sequence[DualPoint]) -> DualPoint:
    """Coordinatewise geometric mean ``prod_k (x*_k)_i ** (1/n)`` of positive functionals."""
    if len(points) == 0:
        raise ValueError("need at least one functional")
    space = points[0].space
    if any(p.space != space for p in points):
        raise ValueError("all functionals must live in the same dual space")
    stack = np.array([p.coords for p in points])
    if np.any(stack < 0):
        raise ValueError("geometric mean needs positive functionals")
    n = len(points)
    if n == 1:
        return DualPoint(stack[0], space)
    return DualPoint(np.prod(stack ** (1.0 / n), axis=0), space)


class HolderResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def holder_check(vectors: Sequence, exponents: Sequence, tol: float = 1e-12) -> HolderResult:
    """Evaluate both sides of the generalized Hölder inequality."""
    if len(vectors) == 0 or len(vectors) != len(exponents):
        raise ValueError("need one exponent per vector and at least one vector")
    ps = [parse_exponent(p) for p in exponents]
    if abs(sum(0.0 if p == INF else 1.0 / p for p in ps) - 1.0) > 1e-12:
        raise ValueError(f"exponents {ps} are not conjugate: sum of reciprocals must be 1")
    bs = np.array([np.asarray(b, dtype=float) for b in vectors])
    lhs = float(np.sum(np.abs(np.prod(bs, axis=0))))
    rhs = float(np.prod([lp_norm(b, p) for b, p in zip(bs, ps)]))
    return HolderResult(lhs, rhs, lhs <= rhs + tol)


def sample_ball(rng: np.random.Generator, dim: int, r: float, size: int | None = None,
                positive: bool = False) -> np.ndarray:
    """Uniform samples from the unweighted unit l_r ball.

    Uses the generalized-Gaussian construction: ``g / (||g||_r^r + E)^(1/r)``
    with ``|g_i|^r ~ Gamma(1/r)`` and ``E ~ Exp(1)``.
    """
    shape = (dim,) if size is None else (size, dim)
    if r == INF:
        z = rng.uniform(-1.0, 1.0, shape)
    else:
        g = rng.gamma(1.0 / r, 1.0, shape) ** (1.0 / r)
        g *= rng.choice([-1.0, 1.0], shape)
        e = rng.exponential(1.0, shape[:-1] + (1,))
        z = g / (np.sum(np.abs(g) ** r, axis=-1, keepdims=True) + e) ** (1.0 / r)
    return np.abs(z) if positive else z
