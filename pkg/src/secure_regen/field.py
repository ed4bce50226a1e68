"""Prime-field arithmetic and dense linear algebra over F_q.

Matrices are plain ``numpy.int64`` arrays whose entries live in [0, q); the
modulus travels alongside them as a :class:`PrimeField`.  Elimination is
exact (first-nonzero pivoting, eager reduction) and is delegated to the
kernels in :mod:`secure_regen._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import FieldError, ParameterError, SingularMatrixError

# (p - 1) * (p - 1) + (p - 1) must stay below 2**63.
MAX_MODULUS = 2**31 - 1


@lru_cache(maxsize=256)
def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def next_prime(at_least: int) -> int:
    q = max(2, at_least)
    while not is_prime(q):
        q += 1
    return q


@dataclass(frozen=True)
class FieldElement:
    """A single element of F_q.  Mostly useful at API edges; bulk data uses arrays."""

    value: int
    q: int

    def __post_init__(self):
        check_modulus(self.q)
        if not 0 <= self.value < self.q:
            raise FieldError(f"{self.value} is not reduced mod {self.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise FieldError("mixed moduli")
            return other.value
        return int(other) % self.q

    def __add__(self, other):
        return FieldElement((self.value + self._coerce(other)) % self.q, self.q)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement((self.value - self._coerce(other)) % self.q, self.q)

    def __mul__(self, other):
        return FieldElement((self.value * self._coerce(other)) % self.q, self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement((-self.value) % self.q, self.q)

    def inverse(self) -> "FieldElement":
        return FieldElement(ff_inv(self.value, self.q), self.q)

    def __int__(self):
        return self.value


def check_modulus(q: int) -> int:
    q = int(q)
    if not is_prime(q):
        raise ParameterError(f"field modulus {q} is not prime")
    if q > MAX_MODULUS:
        raise ParameterError(f"field modulus {q} exceeds {MAX_MODULUS}")
    return q


def ff_inv(a: int, q: int) -> int:
    """Multiplicative inverse of ``a`` in F_q."""
    check_modulus(q)
    a = int(a) % q
    if a == 0:
        raise FieldError("no inverse: zero has no multiplicative inverse")
    return pow(a, q - 2, q)


def as_matrix(entries, q: int) -> np.ndarray:
    """Coerce nested sequences to a reduced int64 matrix (always 2-D)."""
    m = np.asarray(entries, dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1) if m.size else m.reshape(0, 0)
    if m.ndim != 2:
        raise ParameterError("matrix must be two-dimensional")
    return np.mod(m, q)


def mat_rank(m, q: int) -> int:
    """Rank over F_q; 0 for empty matrices."""
    check_modulus(q)
    m = as_matrix(m, q)
    if m.size == 0:
        return 0
    return _kernels.rank_mod(m, q)


def mat_solve(a, y, q: int) -> np.ndarray:
    """Unique ``x`` with ``a @ x == y`` over F_q for square invertible ``a``."""
    check_modulus(q)
    a = as_matrix(a, q)
    y = np.mod(np.asarray(y, dtype=np.int64).ravel(), q)
    if a.shape[0] != a.shape[1]:
        raise ParameterError(f"mat_solve needs a square matrix, got {a.shape}")
    if a.shape[0] != y.shape[0]:
        raise ParameterError("right-hand side length does not match matrix")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    x = _kernels.solve_mod(a, y, q)
    if x.size and x[0] == _kernels.SINGULAR:
        raise SingularMatrixError("singular matrix over F_%d" % q)
    return x


def mat_mul(a, b, q: int) -> np.ndarray:
    """Product mod q, accumulated row-by-row so partial sums never overflow."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = a.ndim == 1
    a2 = a.reshape(1, -1) if vec else a
    out = np.zeros((a2.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a2.shape[1]):
        out = (out + np.outer(a2[:, i], b[i])) % q
    return out[0] if vec else out


class PrimeField:
    """Convenience wrapper binding the free functions to one modulus."""

    def __init__(self, q: int):
        self.q = check_modulus(q)

    def __repr__(self):
        return f"PrimeField({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("PrimeField", self.q))

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.q, self.q)

    def inv(self, a: int) -> int:
        return ff_inv(a, self.q)

    def rank(self, m) -> int:
        return mat_rank(m, self.q)

    def solve(self, a, y) -> np.ndarray:
        return mat_solve(a, y, self.q)

    def matmul(self, a, b) -> np.ndarray:
        return mat_mul(a, b, self.q)

    def random(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)
