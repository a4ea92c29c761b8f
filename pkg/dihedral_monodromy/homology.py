"""Twisted first homology H_1(X_o, W) through loop-like chains v L_ij.

A chain v L_ij carries v on its U-half and P_c(i) v on its D-half; it is a cycle when the
loop monodromy fixes v. Two loops meet at a shared endpoint (one point, U-values paired) or,
when their intervals interleave, once on each sheet. Nested and disjoint loops do not meet.
"""

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .certificate import Certificate, status_from_bool
from .constants import CHECK_DIMENSION, CHECK_SPAN
from .curve import (
    BranchConfig,
    LocalSystem,
    LoopSpec,
    all_loops,
    canonical_loop,
    cut_of,
    fixed_vector,
    local_system,
)
from .exactmath import CycMatrix, CycScalar, determinant, rank_and_solve
from .logger import Logger
from .modular import ModularField, independent_rows, rank_mod
from .reps import CharOrbit
from .utils import timed

logger = Logger("homology")

Vector = Tuple[CycScalar, ...]


@dataclass(frozen=True)
class TwistedCycle:
    """
    Finite sum of chains w L with M_L w = w.

    Attributes:
        terms: (U-value w, loop) pairs
        coords: Coordinates in a fixed HomologyBasis, when known
    """

    terms: Tuple[Tuple[Vector, LoopSpec], ...]
    coords: Optional[Tuple[CycScalar, ...]] = field(default=None, compare=False)

    @classmethod
    def single(cls, vector: Sequence[CycScalar], loop: LoopSpec) -> "TwistedCycle":
        return cls(((tuple(vector), loop),))

    def __add__(self, other: "TwistedCycle") -> "TwistedCycle":
        return TwistedCycle(self.terms + other.terms)

    def scale(self, factor: CycScalar) -> "TwistedCycle":
        return TwistedCycle(tuple((tuple(w_k * factor for w_k in w), L) for w, L in self.terms))

    def is_cycle(self, ls: LocalSystem) -> bool:
        for w, L in self.terms:
            M = ls.monodromy(L.i, L.j).matrix
            if tuple(M.apply(list(w))) != tuple(w):
                return False
        return True

    def to_json(self) -> List[Dict]:
        return [{"i": L.i, "j": L.j, "vector": [c.to_json() for c in w]} for w, L in self.terms]

    def label(self) -> str:
        return " + ".join(f"{list(map(repr, w))}L({L.i},{L.j})" for w, L in self.terms)


def loop_intersection_signs(first: LoopSpec, second: LoopSpec) -> Tuple[int, int]:
    """
    Signs (on U, on D) with which two canonical loops meet.

    A shared endpoint gives one intersection weighted on U. Interleaved intervals give one
    intersection on each sheet with the same sign.
    """
    i, j = first.i, first.j
    k, l = second.i, second.j
    if (i, j) == (k, l):
        return 0, 0
    if i == k:
        return (-1 if j < l else 1), 0
    if j == l:
        return (-1 if i < k else 1), 0
    if j == k:
        return -1, 0
    if i == l:
        return 1, 0
    if i < k < j < l:
        return -1, -1
    if k < i < l < j:
        return 1, 1
    return 0, 0


def intersection_pairing(x: TwistedCycle, y: TwistedCycle, ls: LocalSystem) -> CycScalar:
    """
    Twisted intersection number <x, y>, antisymmetric.

    Args:
        x: First cycle
        y: Second cycle
        ls: Local system both cycles live in

    Returns:
        Sum over intersection points of sign * Q(value of x, value of y)
    """
    total = CycScalar.zero(ls.n)
    for w, L in x.terms:
        for v, K in y.terms:
            s_up, s_down = loop_intersection_signs(L, K)
            if s_up:
                total = total + ls.pair(w, v) * s_up
            if s_down:
                total = total + ls.pair(ls.d_value(L.i, w), ls.d_value(K.i, v)) * s_down
    return total


def candidate_cycles(ls: LocalSystem) -> List[TwistedCycle]:
    """Every v L_ij with v running over a basis of the fixed vectors of M_ij."""
    cycles = []
    for loop in all_loops(ls.g):
        space = fixed_vector(ls.monodromy(loop.i, loop.j))
        for v in space.vectors:
            cycles.append(TwistedCycle.single(v, loop))
    return cycles


def _expand_terms(cycles: Sequence[TwistedCycle]):
    terms = []
    owner = []
    for idx, cycle in enumerate(cycles):
        for w, L in cycle.terms:
            terms.append((w, L))
            owner.append(idx)
    return terms, owner


def _form_values(field_: ModularField, ls: LocalSystem, vectors_a, vectors_b) -> np.ndarray:
    Q = field_.reduce_matrix(ls.form)
    A = np.array([field_.reduce_vector(v) for v in vectors_a], dtype=np.int64).reshape(
        len(vectors_a), ls.rank
    )
    B = np.array([field_.reduce_vector(v) for v in vectors_b], dtype=np.int64).reshape(
        len(vectors_b), ls.rank
    )
    return field_.matmul(field_.matmul(A, Q), B.T)


def pairing_matrix_mod(
    ls: LocalSystem,
    rows: Sequence[TwistedCycle],
    cols: Sequence[TwistedCycle],
    field_: Optional[ModularField] = None,
) -> np.ndarray:
    """
    Matrix of <rows[a], cols[b]> reduced mod p, vectorised over all pairs.

    Args:
        ls: Local system
        rows: Cycles indexing the rows
        cols: Cycles indexing the columns
        field_: Modulus, a fresh ModularField(n) by default
    """
    field_ = field_ or ModularField(ls.n)
    p = field_.p
    row_terms, row_owner = _expand_terms(rows)
    col_terms, col_owner = _expand_terms(cols)
    if not row_terms or not col_terms:
        return np.zeros((len(rows), len(cols)), dtype=np.int64)

    sign_up = np.zeros((len(row_terms), len(col_terms)), dtype=np.int64)
    sign_down = np.zeros_like(sign_up)
    for a, (_, L) in enumerate(row_terms):
        for b, (_, K) in enumerate(col_terms):
            sign_up[a, b], sign_down[a, b] = loop_intersection_signs(L, K)

    up = _form_values(field_, ls, [w for w, _ in row_terms], [v for v, _ in col_terms])
    down = _form_values(
        field_,
        ls,
        [ls.d_value(L.i, w) for w, L in row_terms],
        [ls.d_value(K.i, v) for v, K in col_terms],
    )
    term_matrix = (sign_up * up + sign_down * down) % p

    row_mix = np.zeros((len(rows), len(row_terms)), dtype=np.int64)
    row_mix[row_owner, np.arange(len(row_terms))] = 1
    col_mix = np.zeros((len(col_terms), len(cols)), dtype=np.int64)
    col_mix[np.arange(len(col_terms)), col_owner] = 1
    return field_.matmul(field_.matmul(row_mix, term_matrix), col_mix)


def cycle_span_rank(ls: LocalSystem, cycles: Sequence[TwistedCycle]) -> int:
    """
    Lower bound for the dimension of the span of `cycles` in homology.

    Cycles are compared through their pairings with all candidate cycles; by
    nondegeneracy this is their rank whenever the candidates span.
    """
    field_ = ModularField(ls.n)
    return rank_mod(pairing_matrix_mod(ls, cycles, candidate_cycles(ls), field_), field_)


class ChainComplexDimensions(NamedTuple):
    h0: int
    h1: int
    h2: int


def _boundary_matrices(ls: LocalSystem) -> Tuple[CycMatrix, CycMatrix]:
    """
    Boundary maps of the cellular chain complex of the cover with coefficients.

    Cells: the N branch points; arcs s_k = [k, k+1] (s_N runs from N through infinity back
    to 1) on each sheet; the upper and lower half-planes of each sheet. Values on D-cells are
    in the D trivialisation; a vertex reads them through P_c(b)^-1.
    """
    n, r = ls.n, ls.rank
    N = 2 * ls.g + 2
    zero = CycScalar.zero(n)
    d1 = [[zero] * (2 * N * r) for _ in range(N * r)]
    d2 = [[zero] * (4 * r) for _ in range(2 * N * r)]
    eye = CycMatrix.identity(n, r)
    inverse_cuts = [M.inverse() for M in ls.cut_matrices]

    def edge(k: int, sheet: int) -> int:
        return ((k - 1) * 2 + sheet) * r

    def add_block(target, row0: int, col0: int, block: CycMatrix, sign: int):
        for a in range(r):
            for b in range(r):
                if not block[a, b].is_zero():
                    target[row0 + a][col0 + b] = target[row0 + a][col0 + b] + block[a, b] * sign

    def to_vertex(sheet: int, point: int) -> CycMatrix:
        return eye if sheet == 0 else inverse_cuts[cut_of(point) - 1]

    for k in range(1, N + 1):
        start, end = k, (k % N) + 1
        for sheet in (0, 1):
            add_block(d1, (end - 1) * r, edge(k, sheet), to_vertex(sheet, end), 1)
            add_block(d1, (start - 1) * r, edge(k, sheet), to_vertex(sheet, start), -1)

    for sheet in (0, 1):
        upper, lower = sheet, 2 + sheet
        for k in range(1, N + 1):
            add_block(d2, edge(k, sheet), upper * r, eye, 1)
            if k % 2 == 1 and k < N:
                # across a cut the lower half-plane of one sheet borders the other sheet
                m = cut_of(k)
                phi = ls.cut_matrix(m) if sheet == 0 else inverse_cuts[m - 1]
                add_block(d2, edge(k, 1 - sheet), lower * r, phi, -1)
            else:
                add_block(d2, edge(k, sheet), lower * r, eye, -1)

    return (
        CycMatrix.from_rows(n, d1, ncols=2 * N * r),
        CycMatrix.from_rows(n, d2, ncols=4 * r),
    )


def chain_complex_dimensions(config: BranchConfig, u: CharOrbit) -> ChainComplexDimensions:
    ls = local_system(config, u)
    d1, d2 = _boundary_matrices(ls)
    rank1 = rank_and_solve(d1).rank
    rank2 = rank_and_solve(d2).rank
    h0 = d1.nrows - rank1
    h1 = d1.ncols - rank1 - rank2
    h2 = d2.ncols - rank2
    logger.debug(f"Oracle u=({u.b},{u.c}): ranks {rank1}, {rank2} -> h = ({h0}, {h1}, {h2})")
    return ChainComplexDimensions(h0, h1, h2)


def dimension_oracle(config: BranchConfig, u: CharOrbit) -> Tuple[int, int]:
    """(h0, h1) of the cover with coefficients in the local system of u, from cellular chains."""
    dims = chain_complex_dimensions(config, u)
    return dims.h0, dims.h1


def expected_h1(g: int, u: CharOrbit) -> int:
    return 2 * g if u.is_trivial else 4 * g - 4


@dataclass
class HomologyBasis:
    """
    Cycles forming a basis of H_1 together with their Gram matrix.

    Attributes:
        ls: Local system
        basis: Basis cycles b_1 .. b_d
        gram: gram[k][m] = <b_k, b_m>
    """

    ls: LocalSystem
    basis: List[TwistedCycle]
    gram: CycMatrix
    _gram_inverse: Optional[CycMatrix] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.ls.n

    @property
    def gram_inverse(self) -> CycMatrix:
        if self._gram_inverse is None:
            self._gram_inverse = self.gram.inverse()
        return self._gram_inverse

    def pairings_with(self, x: TwistedCycle) -> List[CycScalar]:
        return [intersection_pairing(b, x, self.ls) for b in self.basis]

    def coordinates(self, x: TwistedCycle) -> List[CycScalar]:
        """Coordinates c of x, from gram . c = (<b_k, x>)_k."""
        return self.gram_inverse.apply(self.pairings_with(x))

    def with_coordinates(self, x: TwistedCycle) -> TwistedCycle:
        return TwistedCycle(x.terms, tuple(self.coordinates(x)))

    def pair_coordinates(self, c1: Sequence[CycScalar], c2: Sequence[CycScalar]) -> CycScalar:
        total = CycScalar.zero(self.n)
        image = self.gram.apply(list(c2))
        for a, b in zip(c1, image):
            total = total + a * b
        return total

    def to_json(self) -> Dict:
        return {
            "orbit": [self.ls.u.b, self.ls.u.c],
            "cycles": [c.to_json() for c in self.basis],
            "gram": self.gram.to_json(),
        }


class BasisRankError(ValueError):
    """Candidate cycles do not reach the expected homology dimension."""

    def __init__(self, achieved: int, expected: int):
        super().__init__(f"Candidate cycles reach rank {achieved}, expected {expected}")
        self.achieved = achieved
        self.expected = expected


def gram_matrix(ls: LocalSystem, cycles: Sequence[TwistedCycle]) -> CycMatrix:
    rows = [[intersection_pairing(x, y, ls) for y in cycles] for x in cycles]
    return CycMatrix.from_rows(ls.n, rows, ncols=len(cycles))


def basis_from_cycles(ls: LocalSystem, cycles: Sequence[TwistedCycle]) -> HomologyBasis:
    """
    Basis made of explicitly given cycles.

    Raises:
        ValueError: If a chain is not a cycle or the Gram matrix is singular
    """
    for cycle in cycles:
        if not cycle.is_cycle(ls):
            raise ValueError(f"{cycle.label()} is not a cycle")
    gram = gram_matrix(ls, cycles)
    if determinant(gram).is_zero():
        raise ValueError(f"Gram matrix of {len(cycles)} cycles is singular")
    return HomologyBasis(ls, list(cycles), gram)


def _select_independent(ls: LocalSystem, candidates: List[TwistedCycle]) -> Tuple[List[int], int]:
    field_ = ModularField(ls.n)
    pairing = pairing_matrix_mod(ls, candidates, candidates, field_)
    return independent_rows(pairing, field_), field_.p


def build_basis(config: BranchConfig, u: CharOrbit) -> HomologyBasis:
    """
    Basis of H_1 chosen among the candidate cycles v L_ij.

    Candidates are taken in loop order; those whose pairing rows are independent mod p are
    kept, and the exact Gram matrix of the selection is checked for invertibility.

    Raises:
        BasisRankError: If the candidates reach less than the oracle dimension
    """
    ls = local_system(config, u)
    candidates = candidate_cycles(ls)
    selected, prime = _select_independent(ls, candidates)
    expected = dimension_oracle(config, u)[1]
    if len(selected) < expected:
        logger.warning(f"Basis for u=({u.b},{u.c}) stops at rank {len(selected)} < {expected}")
        raise BasisRankError(len(selected), expected)
    basis = basis_from_cycles(ls, [candidates[k] for k in selected])
    logger.debug(f"Basis for u=({u.b},{u.c}): {basis.size} cycles (p={prime})")
    return basis


def standard_chain_basis(config: BranchConfig) -> HomologyBasis:
    """Untwisted basis a_1 .. a_2g with a_k = L_(k, k+1), in the trivial local system."""
    u = CharOrbit.of(config.n, 0, 0)
    ls = local_system(config, u)
    one = (CycScalar.one(config.n),)
    cycles = [
        TwistedCycle.single(one, canonical_loop(config.g, k, k + 1))
        for k in range(1, 2 * config.g + 1)
    ]
    return basis_from_cycles(ls, cycles)


def dimension_certificate(config: BranchConfig, u: CharOrbit) -> Certificate:
    """Candidate rank and cellular oracle agree with the expected dim H_1."""
    with timed() as clock:
        dims = chain_complex_dimensions(config, u)
        ls = local_system(config, u)
        selected, prime = _select_independent(ls, candidate_cycles(ls))
        expected = expected_h1(config.g, u)
        expected_h0 = 1 if u.is_trivial else 0
        ok = dims.h1 == expected and len(selected) == expected and dims.h0 == expected_h0
    return Certificate(
        check=CHECK_DIMENSION,
        params=_params(config, u),
        status=status_from_bool(ok),
        witness={
            "oracle": {"h0": dims.h0, "h1": dims.h1, "h2": dims.h2},
            "candidate_rank": len(selected),
            "expected_h1": expected,
            "prime": prime,
        },
        runtime_ms=clock["runtime_ms"],
    )


def span_certificate(config: BranchConfig, u: CharOrbit) -> Certificate:
    """
    Certify that all candidate cycles v L_ij together span H_1.

    The rank of their pairing matrix mod p is a lower bound for the rank of their span, which
    is at most h1; equality with the oracle h1 is therefore exact.
    """
    with timed() as clock:
        ls = local_system(config, u)
        candidates = candidate_cycles(ls)
        selected, prime = _select_independent(ls, candidates)
        h0, h1 = dimension_oracle(config, u)
        ok = len(selected) == h1
    if not ok:
        logger.warning(f"Span check u=({u.b},{u.c}): rank {len(selected)} of {h1}")
    return Certificate(
        check=CHECK_SPAN,
        params=_params(config, u),
        status=status_from_bool(ok),
        witness={
            "rank": len(selected),
            "oracle_h1": h1,
            "oracle_h0": h0,
            "num_candidates": len(candidates),
            "independent": [candidates[k].to_json() for k in selected],
            "prime": prime,
        },
        runtime_ms=clock["runtime_ms"],
    )


def _params(config: BranchConfig, u: CharOrbit) -> Dict:
    return {"genus": config.g, "n": config.n, "preset": config.preset_name, "orbit": [u.b, u.c]}
