"""Dense full and symmetric tensors over a :class:`SequenceSpace` basis.

Coefficients are stored as an ``n``-way array ``b`` with
``u = sum b[i1, ..., in] e_i1 (x) ... (x) e_in``.  Symmetric tensors keep the
canonical coefficients at nonincreasing multi-indices ``i1 >= ... >= in``; the
canonical coefficient equals the full-array entry (it is *not* multiplied by
the size of the permutation orbit).
"""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .lattice import DualPoint, SequenceSpace, Vector

MAX_RADEMACHER_TERMS = 20


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _coords(x, dim: int) -> np.ndarray:
    if isinstance(x, (Vector, DualPoint)):
        x = x.coords
    a = np.asarray(x, dtype=float)
    if a.shape != (dim,):
        raise ValueError(f"dimension mismatch: expected length {dim}, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class FullTensor:
    space: SequenceSpace
    coeffs: np.ndarray

    def __post_init__(self):
        b = _frozen(self.coeffs)
        m = self.space.dim
        if b.ndim < 1 or any(k != m for k in b.shape):
            raise ValueError(f"coefficient array must have shape ({m},)*n, got {b.shape}")
        object.__setattr__(self, "coeffs", b)

    @property
    def order(self) -> int:
        return self.coeffs.ndim

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def is_symmetric(self) -> bool:
        return is_symmetric_array(self.coeffs)

    @property
    def is_diagonal(self) -> bool:
        return is_diagonal_array(self.coeffs)

    def digest(self) -> str:
        return array_digest(self.coeffs)

    def __repr__(self):
        return f"FullTensor(order={self.order}, space={self.space})"


def nonincreasing_indices(m: int, n: int) -> list[tuple[int, ...]]:
    """Multi-indices ``i1 >= ... >= in`` over ``range(m)`` in lexicographic order."""
    return [tuple(reversed(c)) for c in itertools.combinations_with_replacement(range(m), n)]


def orbit_size(idx: Sequence[int]) -> int:
    """Number of distinct permutations of ``idx``."""
    counts = {}
    for i in idx:
        counts[i] = counts.get(i, 0) + 1
    size = math.factorial(len(idx))
    for c in counts.values():
        size //= math.factorial(c)
    return size


def is_symmetric_array(b: np.ndarray, atol: float = 1e-12) -> bool:
    for perm in itertools.permutations(range(b.ndim)):
        if not np.allclose(b, np.transpose(b, perm), rtol=0, atol=atol):
            return False
    return True


def is_diagonal_array(b: np.ndarray) -> bool:
    return bool(np.all(diagonal_mask(b.shape[0], b.ndim) | (b == 0)))


def diagonal_mask(m: int, n: int) -> np.ndarray:
    mask = np.zeros((m,) * n, dtype=bool)
    mask[(np.arange(m),) * n] = True
    return mask


def array_digest(b: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(b.shape).encode())
    h.update(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class SymmetricTensor:
    """Symmetric tensor with canonical coefficients and a cached full array.

    Build with :meth:`from_array` or :meth:`from_coefficients` rather than the
    constructor.
    """

    space: SequenceSpace
    order: int
    coeffs: dict
    full: np.ndarray

    @classmethod
    def from_array(cls, space: SequenceSpace, b, atol: float = 1e-12) -> SymmetricTensor:
        b = np.asarray(b, dtype=float)
        FullTensor(space, b)  # shape validation
        if not is_symmetric_array(b, atol):
            raise ValueError("coefficient array is not permutation-invariant")
        n = b.ndim
        coeffs = {idx: float(b[idx]) for idx in nonincreasing_indices(space.dim, n)}
        return cls.from_coefficients(space, n, coeffs)

    @classmethod
    def from_coefficients(cls, space: SequenceSpace, order: int, coeffs: dict) -> SymmetricTensor:
        if order < 1:
            raise ValueError("order must be at least 1")
        m = space.dim
        canon = {idx: 0.0 for idx in nonincreasing_indices(m, order)}
        for idx, v in coeffs.items():
            key = tuple(sorted((int(i) for i in idx), reverse=True))
            if len(key) != order or any(not 0 <= i < m for i in key):
                raise ValueError(f"bad multi-index {idx}")
            canon[key] = float(v)
        full = np.zeros((m,) * order)
        for idx, v in canon.items():
            if v:
                for perm in set(itertools.permutations(idx)):
                    full[perm] = v
        return cls(space, order, canon, _frozen(full))

    @property
    def dim(self) -> int:
        return self.space.dim

    def to_full(self) -> FullTensor:
        return FullTensor(self.space, self.full)

    def monomial_coefficients(self) -> dict:
        """Coefficient of ``x_i1 * ... * x_in`` in the associated polynomial."""
        return {idx: orbit_size(idx) * v for idx, v in self.coeffs.items() if v}

    @property
    def is_diagonal(self) -> bool:
        return all(v == 0 or len(set(idx)) == 1 for idx, v in self.coeffs.items())

    def digest(self) -> str:
        return array_digest(self.full)

    def __repr__(self):
        return f"SymmetricTensor(order={self.order}, space={self.space})"


@dataclass(frozen=True, eq=False)
class RankOneSum:
    """``sum_k scalars[k] * factors[k, 0] (x) ... (x) factors[k, n-1]``."""

    space: SequenceSpace
    scalars: np.ndarray
    factors: np.ndarray  # shape (K, n, m)

    def __post_init__(self):
        f = _frozen(self.factors)
        s = _frozen(self.scalars)
        if f.ndim != 3 or f.shape[2] != self.space.dim:
            raise ValueError(f"factors must have shape (K, n, {self.space.dim}), got {f.shape}")
        if s.shape != (f.shape[0],):
            raise ValueError("need one scalar per term")
        object.__setattr__(self, "factors", f)
        object.__setattr__(self, "scalars", s)

    @classmethod
    def from_terms(cls, space: SequenceSpace, terms: Iterable[Sequence], scalars=None) -> RankOneSum:
        factors = np.array([[_coords(x, space.dim) for x in term] for term in terms], dtype=float)
        if factors.size == 0:
            raise ValueError("empty rank-one sum")
        if scalars is None:
            scalars = np.ones(len(factors))
        return cls(space, np.asarray(scalars, dtype=float), factors)

    @property
    def order(self) -> int:
        return self.factors.shape[1]

    @property
    def terms(self) -> int:
        return self.factors.shape[0]

    @property
    def is_symmetric_form(self) -> bool:
        return bool(np.all(self.factors == self.factors[:, :1, :]))

    def expand(self) -> FullTensor:
        n = self.order
        letters = "abcdefgh"[:n]
        spec = ",".join(f"k{c}" for c in letters)
        args = [self.factors[:, j, :] for j in range(n)]
        b = np.einsum(f"k,{spec}->{letters}", self.scalars, *args)
        return FullTensor(self.space, b)

    def evaluate(self, *duals) -> float:
        """Sum over terms of ``scalar * prod_j x*_j(x_{j,k})``, no expansion."""
        if len(duals) != self.order:
            raise ValueError(f"expected {self.order} dual arguments, got {len(duals)}")
        ys = np.array([_coords(d, self.space.dim) for d in duals])
        pairings = np.einsum("knm,nm->kn", self.factors, ys)
        return float(np.dot(self.scalars, np.prod(pairings, axis=1)))


def diagonal_tensor(space: SequenceSpace, a, order: int) -> FullTensor:
    """``sum_i a_i e_i (x) ... (x) e_i``."""
    a = _coords(a, space.dim)
    b = np.zeros((space.dim,) * order)
    b[(np.arange(space.dim),) * order] = a
    return FullTensor(space, b)


def diagonal_symmetric(space: SequenceSpace, a, order: int) -> SymmetricTensor:
    a = _coords(a, space.dim)
    return SymmetricTensor.from_coefficients(space, order, {(i,) * order: a[i] for i in range(space.dim)})


def basis_tensor(space: SequenceSpace, idx: Sequence[int]) -> FullTensor:
    b = np.zeros((space.dim,) * len(idx))
    b[tuple(idx)] = 1.0
    return FullTensor(space, b)


def rank_one(space: SequenceSpace, vectors: Sequence) -> FullTensor:
    b = np.ones(())
    for x in vectors:
        b = np.multiply.outer(b, _coords(x, space.dim))
    return FullTensor(space, b)


def _dual_args(u_dim: int, order: int, duals) -> np.ndarray:
    if len(duals) != order:
        raise ValueError(f"expected {order} dual arguments, got {len(duals)}")
    return np.array([_coords(d, u_dim) for d in duals])


def evaluate_multilinear(u: FullTensor, *duals) -> float:
    """``T_u(x*_1, ..., x*_n) = sum b[i1..in] x*_1[i1] ... x*_n[in]``."""
    if isinstance(u, SymmetricTensor):
        u = u.to_full()
    zs = _dual_args(u.dim, u.order, duals)
    return kernels.contract(u.coeffs, zs)


def evaluate_polynomial(u: SymmetricTensor, dual) -> float:
    """``P_u(x*) = T_u(x*, ..., x*)``."""
    z = _coords(dual, u.dim)
    return kernels.contract(u.full, np.tile(z, (u.order, 1)))


def symmetrize(u: FullTensor) -> SymmetricTensor:
    """Average of the coefficient array over all axis permutations."""
    b = u.coeffs
    perms = list(itertools.permutations(range(b.ndim)))
    s = sum(np.transpose(b, p) for p in perms) / len(perms)
    # from_array rebuilds the full array from canonical entries, so the
    # result is exactly permutation-invariant despite summation-order rounding
    return SymmetricTensor.from_array(u.space, s, atol=1e-9)


def polarization_expand(vectors: Sequence, space: SequenceSpace | None = None) -> RankOneSum:
    """Signed sum of tensor powers equal to the symmetrization of ``x_1 (x) ... (x) x_n``.

    Each of the ``2**n`` sign patterns ``d`` contributes
    ``d_1...d_n / (2**n n!) * (sum_i d_i x_i)^(x)n``.
    """
    if space is None:
        if not vectors or not isinstance(vectors[0], Vector):
            raise ValueError("pass a space or Vector inputs")
        space = vectors[0].space
    xs = np.array([_coords(x, space.dim) for x in vectors])
    n = len(xs)
    if n == 0:
        raise ValueError("need at least one vector")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    scalars = np.prod(signs, axis=1) / (2.0**n * math.factorial(n))
    bases = signs @ xs
    factors = np.repeat(bases[:, None, :], n, axis=1)
    return RankOneSum(space, scalars, factors)


def diagonal_project(u):
    """Keep the main-diagonal coefficients, zero the rest.

    Accepts a :class:`FullTensor` (the projection Q) or a
    :class:`SymmetricTensor` (its symmetric counterpart).
    """
    if isinstance(u, SymmetricTensor):
        keep = {idx: v for idx, v in u.coeffs.items() if len(set(idx)) == 1}
        return SymmetricTensor.from_coefficients(u.space, u.order, keep)
    return FullTensor(u.space, np.where(diagonal_mask(u.dim, u.order), u.coeffs, 0.0))


def _check_signs(theta, m: int) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if t.shape != (m,) or not np.all(np.abs(t) == 1):
        raise ValueError("theta must be a vector of +1/-1 entries of length dim")
    return t


def sign_flip(u, theta, factor: int = 0):
    """Apply ``sum a_i e_i -> sum theta_i a_i e_i`` to one tensor factor.

    For a diagonal tensor this maps ``a_i -> theta_i a_i`` on the diagonal.
    Symmetric tensors are accepted only when diagonal, where the result stays
    symmetric.
    """
    t = _check_signs(theta, u.dim)
    if isinstance(u, SymmetricTensor):
        if not u.is_diagonal:
            raise ValueError("a one-factor sign flip breaks symmetry unless the tensor is diagonal")
        coeffs = {idx: t[idx[0]] * v for idx, v in u.coeffs.items()}
        return SymmetricTensor.from_coefficients(u.space, u.order, coeffs)
    if not 0 <= factor < u.order:
        raise ValueError(f"factor must be in [0, {u.order})")
    shape = [1] * u.order
    shape[factor] = u.dim
    return FullTensor(u.space, u.coeffs * t.reshape(shape))


def coefficient_sign_flip(u: FullTensor, signs) -> FullTensor:
    """Multiply each coefficient ``b[idx]`` by ``signs[idx]`` in {+1, -1}."""
    s = np.asarray(signs, dtype=float)
    if s.shape != u.coeffs.shape or not np.all(np.abs(s) == 1):
        raise ValueError("signs must be a +1/-1 array shaped like the coefficients")
    return FullTensor(u.space, u.coeffs * s)


RADEMACHER_SCHEMES = ("shared", "product")


def rademacher_average(terms: RankOneSum, scheme: str = "shared") -> FullTensor:
    """Exact average of products of Rademacher sums over every sign pattern.

    ``scheme="shared"`` uses one sign sequence ``r`` for all factors:
    the average of ``(sum_k r_k x_{1,k}) (x) ... (x) (sum_k r_k x_{n,k})``.
    That reproduces ``terms.expand()`` only for order 2; for odd orders every
    odd moment of ``r`` vanishes and the average is 0.

    ``scheme="product"`` draws independent sequences ``r^(1..n-1)`` for the
    first n-1 factors and weights the last factor by ``r^(1)_k ... r^(n-1)_k``.
    Then ``E[r^(1)_{k_1} ... r^(n-1)_{k_{n-1}} r^(1)_{k_n} ... r^(n-1)_{k_n}]``
    vanishes unless all ``k_j`` agree, so the average equals ``terms.expand()``
    for every order.

    The scalar of each term is folded into its first factor.
    """
    if scheme not in RADEMACHER_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {RADEMACHER_SCHEMES}")
    K, n = terms.terms, terms.order
    blocks = 1 if scheme == "shared" or n == 1 else n - 1
    if K * blocks > MAX_RADEMACHER_TERMS:
        raise ValueError(f"{K * blocks} sign variables exceed the 2^K enumeration guard of {MAX_RADEMACHER_TERMS}")
    f = np.array(terms.factors)
    f[:, 0, :] *= terms.scalars[:, None]
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=K * blocks))).reshape(-1, blocks, K)
    if scheme == "shared":
        per_factor = [signs[:, 0, :]] * n
    else:
        per_factor = [signs[:, min(j, blocks - 1), :] for j in range(n - 1)]
        # empty product for n = 1: the last factor carries no signs
        per_factor.append(np.prod(signs, axis=1) if n > 1 else np.ones_like(signs[:, 0, :]))
    sums = [per_factor[j] @ f[:, j, :] for j in range(n)]  # each (patterns, m)
    letters = "abcdefgh"[:n]
    b = np.einsum(",".join(f"t{c}" for c in letters) + "->" + letters, *sums) / len(signs)
    return FullTensor(terms.space, b)


def modulus(u):
    """Coefficientwise absolute value."""
    if isinstance(u, SymmetricTensor):
        return SymmetricTensor.from_coefficients(u.space, u.order, {k: abs(v) for k, v in u.coeffs.items()})
    return FullTensor(u.space, np.abs(u.coeffs))


def coordinate_multiply(u: FullTensor, multipliers: Sequence) -> FullTensor:
    """Apply the diagonal operator ``diag(t_j)`` to factor ``j`` for each j."""
    b = np.array(u.coeffs)
    for j, t in enumerate(multipliers):
        t = _coords(t, u.dim)
        shape = [1] * u.order
        shape[j] = u.dim
        b = b * t.reshape(shape)
    return FullTensor(u.space, b)
