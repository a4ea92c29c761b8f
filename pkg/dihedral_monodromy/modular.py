"""Reduction of Q(zeta_n) linear algebra modulo a prime p = 1 (mod n).

zeta is sent to a primitive n-th root of unity r in F_p. On elements whose denominators are
prime to p this is a ring homomorphism, so every rank computed here is a lower bound for the
exact rank, and full rank mod p certifies full exact rank.
"""

from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import nextprime, primefactors, primitive_root

from .constants import MODULAR_ACCUMULATE_BITS, MODULAR_PRIME_LIMIT, MODULAR_PRIME_START
from .exactmath import CycMatrix, CycScalar
from .logger import Logger

logger = Logger("modular")


@lru_cache(maxsize=None)
def _prime_and_root(n: int, start: int) -> Tuple[int, int]:
    p = nextprime(start)
    while p % n != 1:
        p = nextprime(p)
    if p >= MODULAR_PRIME_LIMIT:
        raise ValueError(f"No prime = 1 mod {n} between {start} and 2^25")
    r = pow(primitive_root(p), (p - 1) // n, p)
    for q in primefactors(n):
        if pow(r, n // q, p) == 1:
            raise ArithmeticError(f"{r} is not a primitive {n}-th root of unity mod {p}")
    return int(p), int(r)


class ModularField:
    """
    F_p together with the image r of zeta_n.

    Attributes:
        n: Order of the root of unity
        p: Prime with p = 1 (mod n)
        r: Primitive n-th root of unity mod p
    """

    def __init__(self, n: int, start: int = MODULAR_PRIME_START):
        self.n = n
        self.start = start
        self.p, self.r = _prime_and_root(n, start)
        self._powers = [pow(self.r, k, self.p) for k in range(n)]
        self.chunk = max(1, 1 << (MODULAR_ACCUMULATE_BITS - 2 * self.p.bit_length()))

    def next_field(self) -> "ModularField":
        """The field for the next admissible prime, used when a denominator vanishes mod p."""
        return ModularField(self.n, self.p + 1)

    def reduce_scalar(self, a: CycScalar) -> int:
        """
        Image of an exact scalar in F_p.

        Raises:
            ZeroDivisionError: If p divides a denominator of `a`
        """
        total = 0
        for k, c in enumerate(a.coeffs):
            if not c:
                continue
            num, den = int(c.numerator), int(c.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"Denominator {den} vanishes mod {self.p}")
            total += num * pow(den, -1, self.p) * self._powers[k]
        return total % self.p

    def reduce_matrix(self, M: CycMatrix) -> np.ndarray:
        out = np.zeros((M.nrows, M.ncols), dtype=np.int64)
        for i, row in enumerate(M.rows):
            for j, a in enumerate(row):
                if not a.is_zero():
                    out[i, j] = self.reduce_scalar(a)
        return out

    def reduce_vector(self, v: Sequence[CycScalar]) -> np.ndarray:
        return np.array([self.reduce_scalar(a) for a in v], dtype=np.int64)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """A @ B mod p with the inner dimension split so int64 partial sums never overflow."""
        inner = A.shape[-1]
        if inner <= self.chunk:
            return (A @ B) % self.p
        out = None
        for s in range(0, inner, self.chunk):
            part = (A[..., s : s + self.chunk] @ B[..., s : s + self.chunk, :]) % self.p
            out = part if out is None else (out + part) % self.p
        return out

    def inverse(self, a: int) -> int:
        return pow(int(a), -1, self.p)


class ModularEchelon:
    """
    Incrementally maintained reduced row echelon basis of a subspace of F_p^dim.

    Every stored row has a 1 in its pivot column and zeros in all other pivot columns, so the
    coordinates of a vector of the span are its entries at the pivot columns.
    """

    def __init__(self, field: ModularField, dim: int):
        self.field = field
        self.dim = dim
        self.rows = np.zeros((0, dim), dtype=np.int64)
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.field.p
        if not self.pivots:
            return v
        coeffs = v[self.pivots]
        return (v - self.field.matmul(coeffs[None, :], self.rows)[0]) % self.field.p

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v).any()

    def insert(self, v: np.ndarray) -> bool:
        """Adds v to the span; returns False when v was already in it."""
        p = self.field.p
        r = self.reduce(v)
        nonzero = np.flatnonzero(r)
        if nonzero.size == 0:
            return False
        piv = int(nonzero[0])
        r = (r * self.field.inverse(r[piv])) % p
        if self.pivots:
            column = self.rows[:, piv].copy()
            self.rows = (self.rows - np.outer(column, r) % p) % p
        self.rows = np.vstack([self.rows, r[None, :]])
        self.pivots.append(piv)
        return True

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of a vector of the span with respect to the stored rows."""
        return np.asarray(v, dtype=np.int64)[self.pivots] % self.field.p


def rref_mod(M: np.ndarray, field: ModularField) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form of an integer matrix mod p.

    Args:
        M: 2-D integer array
        field: Modulus holder

    Returns:
        (reduced matrix, pivot columns)
    """
    p = field.p
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.flatnonzero(A[r:, c])
        if candidates.size == 0:
            continue
        k = r + int(candidates[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * field.inverse(A[r, c])) % p
        factors = A[:, c].copy()
        factors[r] = 0
        nz = np.flatnonzero(factors)
        if nz.size:
            A[nz] = (A[nz] - np.outer(factors[nz], A[r]) % p) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod(M: np.ndarray, field: ModularField) -> int:
    if M.size == 0:
        return 0
    return len(rref_mod(M, field)[1])


def independent_rows(M: np.ndarray, field: ModularField) -> List[int]:
    """Indices of the first maximal set of linearly independent rows of M, in order."""
    if M.size == 0:
        return []
    return rref_mod(M.T, field)[1]


def exact_rank_lower_bound(M: CycMatrix, field: Optional[ModularField] = None) -> Tuple[int, int]:
    """
    Rank of an exact matrix mod p, retrying with the next prime when a denominator vanishes.

    Returns:
        (rank lower bound, prime used)
    """
    field = field or ModularField(M.n)
    while True:
        try:
            return rank_mod(field.reduce_matrix(M), field), field.p
        except ZeroDivisionError as e:
            logger.warning(f"{str(e)}; retrying with the next prime")
            field = field.next_field()


def reduce_all(
    field: ModularField, matrices: Sequence[CycMatrix]
) -> Tuple[ModularField, List[np.ndarray]]:
    """Reduce every matrix with one prime, moving to the next prime if a denominator vanishes."""
    while True:
        try:
            return field, [field.reduce_matrix(M) for M in matrices]
        except ZeroDivisionError as e:
            logger.warning(f"{str(e)}; retrying with the next prime")
            field = field.next_field()
