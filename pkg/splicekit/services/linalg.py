"""Exact integer and rational linear algebra.

Everything here works on `fractions.Fraction` entries and hands the heavy lifting to
sympy's `DomainMatrix` over ZZ (fraction-free Bareiss elimination, Smith normal form)
or QQ. No floating point is used anywhere in splicekit.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from math import gcd, lcm, prod

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .errors import ContinuedFractionError, InputError

logger = getLogger(__name__)

Number = int | Fraction


@dataclass(frozen=True)
class ExactMatrix:
    """A dense matrix of exact rationals."""

    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Number]], ncols: int | None = None) -> "ExactMatrix":
        """Build a matrix from nested iterables of ints or Fractions.

        Args:
            rows: Row-major entries
            ncols: Column count, required when there are no rows

        Raises:
            InputError: If the rows are ragged
        """
        materialized = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(materialized[0]) if materialized else 0
        if any(len(row) != ncols for row in materialized):
            raise InputError("Matrix rows must all have the same length")
        return cls(materialized, ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.nrows) for j in range(i + 1, self.ncols)
        )

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.rows[i][j]

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(tuple(tuple(-x for x in row) for row in self.rows), self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix.from_rows(([self.rows[i][j] for j in cols] for i in rows), ncols=len(cols))

    def minor(self, row: int, col: int) -> "ExactMatrix":
        """The matrix with one row and one column deleted."""
        return self.submatrix(
            [i for i in range(self.nrows) if i != row],
            [j for j in range(self.ncols) if j != col],
        )

    def with_column(self, column: Sequence[Number], position: int | None = None) -> "ExactMatrix":
        if len(column) != self.nrows:
            raise InputError("Column length does not match the row count")
        at = self.ncols if position is None else position
        return ExactMatrix.from_rows(
            (list(row[:at]) + [Fraction(column[i])] + list(row[at:]) for i, row in enumerate(self.rows)),
            ncols=self.ncols + 1,
        )

    def to_domain(self) -> DomainMatrix:
        """Convert to a sympy DomainMatrix over ZZ when possible, QQ otherwise."""
        if self.is_integer():
            return DomainMatrix([[ZZ(int(x)) for x in row] for row in self.rows], self.shape, ZZ)
        return DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in self.rows], self.shape, QQ)


@dataclass(frozen=True)
class HomologySummary:
    """Cokernel of an integer matrix viewed as a map Z^cols -> Z^rows.

    `invariant_factors` has one entry per row generator: the Smith normal form diagonal
    followed by zeros for the free part, so each factor divides the next.
    """

    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        """Free rank of the cokernel."""
        return sum(1 for f in self.invariant_factors if f == 0)

    @property
    def torsion_order(self) -> int:
        return prod(f for f in self.invariant_factors if f != 0)

    @property
    def order(self) -> int:
        """Order of the cokernel, 0 when it is infinite."""
        return 0 if self.rank else self.torsion_order


@dataclass(frozen=True)
class ContinuedFraction:
    """A Hirzebruch-Jung continued fraction [x_1, ..., x_m] = x_1 - 1/[x_2, ..., x_m]."""

    terms: tuple[int, ...]

    @property
    def value(self) -> Fraction | None:
        """Exact value, or None for the empty fraction."""
        return cf_eval(self.terms)

    @property
    def numerator(self) -> int:
        return continuant(self.terms)

    @property
    def denominator(self) -> int:
        return continuant(self.terms[1:])

    def reciprocal(self) -> Fraction:
        """1/[x_1, ..., x_m], with 1/[] taken as 0."""
        value = self.value
        if value is None:
            return Fraction(0)
        if value == 0:
            raise ContinuedFractionError(f"Continued fraction {list(self.terms)} evaluates to 0")
        return 1 / value


def det_exact(m: ExactMatrix) -> Fraction:
    """Exact determinant of a square matrix.

    Integer matrices go through sympy's fraction-free Bareiss elimination over ZZ so the
    result is an integer-valued Fraction.

    Raises:
        InputError: If `m` is not square
    """
    if not m.is_square():
        raise InputError(f"Determinant needs a square matrix, got {m.nrows}x{m.ncols}")
    if m.nrows == 0:
        return Fraction(1)
    domain_matrix = m.to_domain()
    value = domain_matrix.det()
    if domain_matrix.domain == ZZ:
        return Fraction(int(value))
    return Fraction(int(value.numerator), int(value.denominator))


def det_int(m: ExactMatrix) -> int:
    value = det_exact(m)
    if value.denominator != 1:
        raise InputError("Expected an integer determinant")
    return value.numerator


def _divisibility_chain(factors: Sequence[int]) -> list[int]:
    chain = list(factors)
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            a, b = chain[i], chain[j]
            chain[i], chain[j] = gcd(a, b), lcm(a, b)
    return chain


def smith_invariants(m: ExactMatrix) -> HomologySummary:
    """Invariant factors of the cokernel of an integer matrix.

    Raises:
        InputError: If `m` has non-integer entries
    """
    if not m.is_integer():
        raise InputError("Smith normal form needs an integer matrix")
    nrows, ncols = m.shape
    if nrows == 0:
        return HomologySummary(())
    if ncols == 0:
        return HomologySummary((0,) * nrows)
    diagonal = [abs(int(x)) for x in invariant_factors(m.to_domain())]
    nonzero = sorted(f for f in diagonal if f != 0)
    free = nrows - len(nonzero)
    return HomologySummary(tuple(_divisibility_chain(nonzero)) + (0,) * free)


def cokernel_order(m: ExactMatrix) -> int:
    return smith_invariants(m).order


def element_order(m: ExactMatrix, vector: Sequence[Number]) -> int:
    """Order of the class of `vector` in coker(m), 0 if that order is infinite."""
    base = smith_invariants(m)
    extended = smith_invariants(m.with_column(vector))
    if extended.rank != base.rank:
        return 0
    order, remainder = divmod(base.torsion_order, extended.torsion_order)
    if remainder:
        raise InputError("Torsion orders are not compatible; vector must be integral")
    return order


def continuant(terms: Sequence[int]) -> int:
    """Numerator of [x_1, ..., x_m] via N_k = x_k N_{k-1} - N_{k-2}, N_0 = 1, N_{-1} = 0."""
    previous, current = 0, 1
    for x in terms:
        previous, current = current, x * current - previous
    return current


def cf_eval(terms: Sequence[int]) -> Fraction | None:
    """Evaluate [x_1, ..., x_m] = x_1 - 1/(x_2 - 1/(...)).

    Returns:
        The reduced value, or None for the empty list (its reciprocal counts as 0)

    Raises:
        ContinuedFractionError: If an intermediate tail evaluates to 0
    """
    if not terms:
        return None
    value = Fraction(terms[-1])
    for x in reversed(terms[:-1]):
        if value == 0:
            raise ContinuedFractionError(f"Continued fraction {list(terms)} divides by zero")
        value = x - 1 / value
    return value


def leading_minors(m: ExactMatrix) -> list[Fraction]:
    return [det_exact(m.submatrix(range(k), range(k))) for k in range(1, m.nrows + 1)]


def is_positive_definite(m: ExactMatrix) -> bool:
    """Sylvester's criterion: every leading principal minor is strictly positive.

    Raises:
        InputError: If `m` is not symmetric
    """
    if not m.is_symmetric():
        raise InputError("Definiteness is only defined here for symmetric matrices")
    return all(minor > 0 for minor in leading_minors(m))


def symmetric_pivots(m: ExactMatrix) -> list[Fraction]:
    """Pivots of symmetric Gaussian elimination in natural order.

    Stops after the first zero pivot, so a short list means the elimination broke down.
    """
    work = [list(row) for row in m.rows]
    pivots: list[Fraction] = []
    n = m.nrows
    for k in range(n):
        pivot = work[k][k]
        pivots.append(pivot)
        if pivot == 0:
            break
        for i in range(k + 1, n):
            factor = work[i][k] / pivot
            if factor:
                for j in range(k, n):
                    work[i][j] -= factor * work[k][j]
    return pivots
