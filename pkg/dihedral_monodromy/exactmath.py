"""Exact arithmetic in the cyclotomic field Q(zeta_n) and dense linear algebra over it.

Scalars wrap elements of sympy's ``QQ.cyclotomic_field(n)``: polynomials in zeta reduced
modulo the n-th cyclotomic polynomial, so equal field elements carry identical
representations. Matrices wrap dense ``DomainMatrix`` objects over the same field, which
supply elimination, determinants, inverses and characteristic polynomials.
"""

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import QQ, Poly, Symbol, cyclotomic_poly
from sympy.polys.domains import AlgebraicField
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.polyclasses import ANP, DMP

from .logger import Logger

logger = Logger("exactmath")

_X = Symbol("x")


class FieldMismatchError(ValueError):
    """Operands live in cyclotomic fields (or groups) of different order n."""


def _to_qq(value: Any):
    """Coerce ints, Fractions, sympy Rationals, QQ elements and "num/den" strings to QQ."""
    if isinstance(value, str):
        frac = Fraction(value)
        return QQ(frac.numerator, frac.denominator)
    if isinstance(value, int):
        return QQ(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return QQ(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"Cannot interpret {value!r} as a rational number")


def _qq_str(value) -> str:
    return f"{int(value.numerator)}/{int(value.denominator)}"


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> Poly:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return Poly(cyclotomic_poly(n, _X), _X, domain=QQ)


@lru_cache(maxsize=None)
def field_degree(n: int) -> int:
    return cyclotomic_polynomial(n).degree()


@lru_cache(maxsize=None)
def cyclotomic_field(n: int) -> AlgebraicField:
    """Q(zeta_n) with generator zeta = exp(2 pi i / n)."""
    if n < 3:
        raise ValueError(f"Cyclotomic fields are built for n >= 3, got {n}")
    logger.debug(f"Building Q(zeta_{n})")
    return QQ.cyclotomic_field(n)


@lru_cache(maxsize=None)
def _modulus(n: int) -> DMP:
    return DMP([QQ.convert(c) for c in cyclotomic_field(n).mod.to_list()], QQ)


def _element(n: int, coeffs: Sequence[Any]) -> ANP:
    """Field element sum c_k zeta^k from coefficients listed lowest power first."""
    K = cyclotomic_field(n)
    rep = DMP([_to_qq(c) for c in reversed(list(coeffs))] or [QQ.zero], QQ)
    return K.new(rep.rem(_modulus(n)))


@dataclass(frozen=True, eq=False)
class CycScalar:
    """
    Element of Q(zeta_n).

    Attributes:
        n: Order of the root of unity
        value: The element of sympy's cyclotomic field
    """

    n: int
    value: ANP

    @classmethod
    def from_coeffs(cls, n: int, coeffs: Iterable[Any]) -> "CycScalar":
        """Build from an arbitrary-length coefficient list of a polynomial in zeta."""
        return cls(n, _element(n, list(coeffs)))

    @classmethod
    def rational(cls, n: int, value: Any) -> "CycScalar":
        return cls(n, cyclotomic_field(n).new([_to_qq(value)]))

    @classmethod
    def zero(cls, n: int) -> "CycScalar":
        return cls(n, cyclotomic_field(n).zero)

    @classmethod
    def one(cls, n: int) -> "CycScalar":
        return cls(n, cyclotomic_field(n).one)

    @classmethod
    def zeta_power(cls, n: int, k: int) -> "CycScalar":
        """zeta^k for any integer k."""
        return _zeta_power(n, k % n)

    @property
    def coeffs(self) -> Tuple[Any, ...]:
        """Coefficients of zeta^0 .. zeta^(deg Phi_n - 1)."""
        rep = list(reversed(self.value.to_list()))
        return tuple(rep) + (QQ.zero,) * (field_degree(self.n) - len(rep))

    def is_zero(self) -> bool:
        return self.value.is_zero

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return self.value.is_ground

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        c = self.coeffs[0]
        return Fraction(int(c.numerator), int(c.denominator))

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CycScalar):
            return NotImplemented
        return self.n == other.n and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.n, self.value.to_tuple()))

    def __reduce__(self):
        return (CycScalar.from_json, (self.n, self.to_json()))

    def _coerce(self, other: Any) -> "CycScalar":
        if isinstance(other, CycScalar):
            if other.n != self.n:
                raise FieldMismatchError(f"Q(zeta_{self.n}) and Q(zeta_{other.n}) do not mix")
            return other
        return CycScalar.rational(self.n, other)

    def __add__(self, other: Any) -> "CycScalar":
        return CycScalar(self.n, self.value + self._coerce(other).value)

    __radd__ = __add__

    def __neg__(self) -> "CycScalar":
        return CycScalar(self.n, -self.value)

    def __sub__(self, other: Any) -> "CycScalar":
        return CycScalar(self.n, self.value - self._coerce(other).value)

    def __rsub__(self, other: Any) -> "CycScalar":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "CycScalar":
        return CycScalar(self.n, self.value * self._coerce(other).value)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse in Q(zeta_n)")
        return CycScalar(self.n, self.value**-1)

    def __truediv__(self, other: Any) -> "CycScalar":
        return self * self._coerce(other).inverse()

    def __pow__(self, exponent: int) -> "CycScalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return CycScalar(self.n, self.value**exponent)

    def conj(self) -> "CycScalar":
        return cyc_conj(self)

    def to_complex(self) -> complex:
        total = 0j
        for k, c in enumerate(self.coeffs):
            if c:
                total += (int(c.numerator) / int(c.denominator)) * cmath.exp(
                    2j * cmath.pi * k / self.n
                )
        return total

    def to_json(self) -> List[str]:
        return [_qq_str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, n: int, data: Sequence[str]) -> "CycScalar":
        return cls.from_coeffs(n, data)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            coeff = _qq_str(c) if c.denominator != 1 else str(int(c.numerator))
            terms.append(coeff if k == 0 else f"{coeff}*z^{k}")
        return f"CycScalar[{self.n}](" + (" + ".join(terms) or "0") + ")"


Scalar = Union[CycScalar, int]


@lru_cache(maxsize=None)
def _zeta_power(n: int, k: int) -> CycScalar:
    return CycScalar(n, cyclotomic_field(n).unit ** k)


def cyc_mul(a: CycScalar, b: CycScalar) -> CycScalar:
    """
    Multiply two elements of Q(zeta_n).

    Raises:
        FieldMismatchError: If the two factors have different n
    """
    if a.n != b.n:
        raise FieldMismatchError(f"Q(zeta_{a.n}) and Q(zeta_{b.n}) do not mix")
    return CycScalar(a.n, a.value * b.value)


def cyc_conj(a: CycScalar) -> CycScalar:
    """Image of `a` under the automorphism zeta -> zeta^(n-1) (complex conjugation)."""
    inverse_zeta = _zeta_power(a.n, a.n - 1).value.to_DMP()
    image = a.value.to_DMP().compose(inverse_zeta).rem(_modulus(a.n))
    return CycScalar(a.n, cyclotomic_field(a.n).new(image))


def _as_element(n: int, entry: Any) -> ANP:
    if isinstance(entry, CycScalar):
        if entry.n != n:
            raise FieldMismatchError(f"Entry from Q(zeta_{entry.n}) in a Q(zeta_{n}) matrix")
        return entry.value
    return cyclotomic_field(n).new([_to_qq(entry)])


@dataclass(frozen=True, eq=False)
class CycMatrix:
    """
    Dense matrix over Q(zeta_n).

    Attributes:
        n: Order of the root of unity
        dm: Dense DomainMatrix over ``cyclotomic_field(n)``
    """

    n: int
    dm: DomainMatrix

    def __post_init__(self):
        if self.dm.rep.fmt != "dense":
            object.__setattr__(self, "dm", self.dm.to_dense())

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[Any]], ncols: Optional[int] = None):
        built = [[_as_element(n, e) for e in row] for row in rows]
        width = ncols if ncols is not None else (len(built[0]) if built else 0)
        if any(len(row) != width for row in built):
            raise ValueError("Ragged matrix rows")
        return cls(n, DomainMatrix(built, (len(built), width), cyclotomic_field(n)))

    @classmethod
    def zeros(cls, n: int, nrows: int, ncols: int) -> "CycMatrix":
        return cls(n, DomainMatrix.zeros((nrows, ncols), cyclotomic_field(n), fmt="dense"))

    @classmethod
    def identity(cls, n: int, size: int) -> "CycMatrix":
        return cls(n, DomainMatrix.eye(size, cyclotomic_field(n)))

    @classmethod
    def column(cls, n: int, values: Sequence[Scalar]) -> "CycMatrix":
        return cls.from_rows(n, [[v] for v in values], ncols=1)

    @property
    def nrows(self) -> int:
        return self.dm.shape[0]

    @property
    def ncols(self) -> int:
        return self.dm.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.dm.shape

    @property
    def rows(self) -> Tuple[Tuple[CycScalar, ...], ...]:
        return tuple(tuple(CycScalar(self.n, e) for e in row) for row in self.dm.to_list())

    def __getitem__(self, index: Tuple[int, int]) -> CycScalar:
        return CycScalar(self.n, self.dm[index].element)

    def col(self, j: int) -> List[CycScalar]:
        return [CycScalar(self.n, row[j]) for row in self.dm.to_list()]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CycMatrix):
            return NotImplemented
        return self.n == other.n and self.shape == other.shape and self.dm == other.dm

    def __hash__(self) -> int:
        return hash((self.n, self.shape, tuple(e.to_tuple() for e in self.dm.flat())))

    def __reduce__(self):
        return (CycMatrix.from_json, (self.n, self.to_json()))

    def _check(self, other: "CycMatrix"):
        if other.n != self.n:
            raise FieldMismatchError(f"Q(zeta_{self.n}) and Q(zeta_{other.n}) matrices do not mix")

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if other.shape != self.shape:
            raise ValueError(f"Shape mismatch {self.shape} + {other.shape}")
        return CycMatrix(self.n, self.dm + other.dm)

    def __neg__(self) -> "CycMatrix":
        return CycMatrix(self.n, -self.dm)

    def __sub__(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if other.shape != self.shape:
            raise ValueError(f"Shape mismatch {self.shape} - {other.shape}")
        return CycMatrix(self.n, self.dm - other.dm)

    def scale(self, factor: Scalar) -> "CycMatrix":
        return CycMatrix(self.n, self.dm.scalarmul(_as_element(self.n, factor)))

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"Shape mismatch {self.shape} @ {other.shape}")
        return CycMatrix(self.n, self.dm.matmul(other.dm))

    def apply(self, vector: Sequence[CycScalar]) -> List[CycScalar]:
        """Matrix times a coordinate vector given as a list of scalars."""
        if len(vector) != self.ncols:
            raise ValueError(f"Vector of length {len(vector)} for a {self.shape} matrix")
        return (self @ CycMatrix.column(self.n, vector)).col(0)

    def transpose(self) -> "CycMatrix":
        return CycMatrix(self.n, self.dm.transpose())

    @property
    def T(self) -> "CycMatrix":
        return self.transpose()

    def conj(self) -> "CycMatrix":
        return CycMatrix.from_rows(
            self.n, [[cyc_conj(a) for a in row] for row in self.rows], ncols=self.ncols
        )

    def trace(self) -> CycScalar:
        total = cyclotomic_field(self.n).zero
        for e in self.dm.diagonal():
            total += e
        return CycScalar(self.n, total)

    def is_zero(self) -> bool:
        return self.dm.is_zero_matrix

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == CycMatrix.identity(self.n, self.nrows)

    def hstack(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if self.nrows != other.nrows:
            raise ValueError("hstack needs equal row counts")
        return CycMatrix(self.n, self.dm.hstack(other.dm))

    def vstack(self, other: "CycMatrix") -> "CycMatrix":
        self._check(other)
        if self.ncols != other.ncols:
            raise ValueError("vstack needs equal column counts")
        return CycMatrix(self.n, self.dm.vstack(other.dm))

    def extract(self, rows: Iterable[int], cols: Iterable[int]) -> "CycMatrix":
        return CycMatrix(self.n, self.dm.extract(list(rows), list(cols)))

    def select_rows(self, indices: Sequence[int]) -> "CycMatrix":
        return self.extract(indices, range(self.ncols))

    def __pow__(self, exponent: int) -> "CycMatrix":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return CycMatrix(self.n, self.dm**exponent)

    def rank(self) -> int:
        return self.dm.rank()

    def determinant(self) -> CycScalar:
        return determinant(self)

    def inverse(self) -> "CycMatrix":
        if self.nrows != self.ncols:
            raise ValueError(f"Cannot invert a {self.shape} matrix")
        try:
            return CycMatrix(self.n, self.dm.inv())
        except DMNonInvertibleMatrixError as e:
            raise ZeroDivisionError("Matrix is singular") from e

    def to_json(self) -> List[List[List[str]]]:
        return [[a.to_json() for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, n: int, data: Sequence[Sequence[Sequence[str]]]) -> "CycMatrix":
        return cls.from_rows(n, [[CycScalar.from_json(n, e) for e in r] for r in data])

    def to_complex(self):
        import numpy as np

        return np.array([[a.to_complex() for a in r] for r in self.rows], dtype=complex).reshape(
            self.nrows, self.ncols
        )


class SolveResult(NamedTuple):
    rank: int
    solution: Optional[CycMatrix]
    kernel: CycMatrix


def echelon(M: CycMatrix) -> Tuple[CycMatrix, List[int]]:
    """Reduced row echelon form of M and its pivot columns."""
    rref, pivots = M.dm.rref()
    return CycMatrix(M.n, rref), list(pivots)


def rank_and_solve(M: CycMatrix, rhs: Optional[CycMatrix] = None) -> SolveResult:
    """
    Exact rank, particular solution and kernel of M over Q(zeta_n).

    Args:
        M: Coefficient matrix
        rhs: Optional right-hand sides, one per column

    Returns:
        (rank, solution, kernel). The solution is None when rhs is absent or inconsistent.
        The kernel is a cols x (cols - rank) matrix whose columns span {x : Mx = 0}.
    """
    width = M.ncols
    if rhs is not None:
        if rhs.n != M.n:
            raise FieldMismatchError("rhs lives in a different cyclotomic field")
        if rhs.nrows != M.nrows:
            raise ValueError(f"rhs has {rhs.nrows} rows, matrix has {M.nrows}")
        reduced, pivots = echelon(M.hstack(rhs))
    else:
        reduced, pivots = echelon(M)

    coefficient_pivots = [c for c in pivots if c < width]
    rank = len(coefficient_pivots)

    solution = None
    if rhs is not None:
        if len(pivots) == rank:
            reduced_rows = reduced.dm.to_list()
            values = CycMatrix.zeros(M.n, width, rhs.ncols).dm.to_list()
            for r, c in enumerate(coefficient_pivots):
                values[c] = reduced_rows[r][width:]
            solution = CycMatrix(M.n, DomainMatrix(values, (width, rhs.ncols), M.dm.domain))
        else:
            logger.debug(f"Inconsistent system: rank {rank}, {M.nrows}x{width}")

    if rank == width:
        kernel = CycMatrix.zeros(M.n, width, 0)
    elif M.nrows == 0:
        kernel = CycMatrix.identity(M.n, width)
    else:
        kernel = CycMatrix(M.n, M.dm.nullspace().transpose())
    return SolveResult(rank, solution, kernel)


def determinant(M: CycMatrix) -> CycScalar:
    if M.nrows != M.ncols:
        raise ValueError(f"Determinant of a non-square {M.shape} matrix")
    return CycScalar(M.n, M.dm.det())


# Polynomials over Q(zeta_n) are coefficient lists, lowest degree first.
CycPoly = List[CycScalar]


def poly_trim(p: CycPoly) -> CycPoly:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def poly_degree(p: CycPoly) -> int:
    return len(poly_trim(p)) - 1


def poly_eval_complex(p: CycPoly, z: complex) -> complex:
    total = 0j
    for c in reversed(p):
        total = total * z + c.to_complex()
    return total


def _to_poly(n: int, p: CycPoly) -> Poly:
    return Poly.from_list([c.value for c in reversed(poly_trim(p))], _X, domain=cyclotomic_field(n))


def _from_poly(n: int, poly: Poly) -> CycPoly:
    return [CycScalar(n, c) for c in reversed(poly.rep.to_list())]


def poly_gcd(a: CycPoly, b: CycPoly) -> CycPoly:
    """Monic gcd over Q(zeta_n); the zero polynomial is []."""
    if not a and not b:
        return []
    n = (a or b)[0].n
    g = _to_poly(n, a).gcd(_to_poly(n, b))
    if g.is_zero:
        return []
    return _from_poly(n, g.monic())


def charpoly(M: CycMatrix) -> CycPoly:
    """
    Characteristic polynomial det(x - M), monic, lowest coefficient first.

    Args:
        M: Square matrix

    Returns:
        deg+1 coefficients over Q(zeta_n)
    """
    if M.nrows != M.ncols:
        raise ValueError(f"Characteristic polynomial of a non-square {M.shape} matrix")
    return [CycScalar(M.n, c) for c in reversed(M.dm.charpoly())]


class ExactEchelon:
    """
    Reduced row echelon basis of a subspace of Q(zeta_n)^dim, grown one vector at a time.

    Rows carry a 1 at their pivot and 0 at every other pivot, so a vector of the span has
    its entries at the pivot columns as coordinates.
    """

    def __init__(self, n: int, dim: int):
        self.n = n
        self.dim = dim
        self.basis = DomainMatrix.zeros((0, dim), cyclotomic_field(n), fmt="dense")
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def rows(self) -> List[List[CycScalar]]:
        return [[CycScalar(self.n, e) for e in row] for row in self.basis.to_list()]

    def _residual(self, v: Sequence[CycScalar]) -> DomainMatrix:
        row = CycMatrix.from_rows(self.n, [list(v)], ncols=self.dim).dm
        if not self.pivots:
            return row
        return row - row.extract([0], self.pivots).matmul(self.basis)

    def reduce(self, v: Sequence[CycScalar]) -> List[CycScalar]:
        return [CycScalar(self.n, e) for e in self._residual(v).to_list()[0]]

    def contains(self, v: Sequence[CycScalar]) -> bool:
        return self._residual(v).is_zero_matrix

    def insert(self, v: Sequence[CycScalar]) -> bool:
        r = self._residual(v)
        entries = r.to_list()[0]
        piv = next((k for k, a in enumerate(entries) if a), None)
        if piv is None:
            return False
        r = r.scalarmul(entries[piv] ** -1)
        if self.pivots:
            self.basis = self.basis - self.basis.extract(list(range(self.rank)), [piv]).matmul(r)
        self.basis = self.basis.vstack(r)
        self.pivots.append(piv)
        return True

    def coordinates(self, v: Sequence[CycScalar]) -> List[CycScalar]:
        return [v[piv] for piv in self.pivots]
