"""Dehn twists along the canonical loops, acting on twisted homology in a fixed basis."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .certificate import Certificate, status_from_bool
from .constants import CHECK_BRAID, CHECK_JORDAN, CHECK_SYMPLECTIC
from .curve import (
    IDENTITY,
    REFLECTION,
    ROTATION,
    BranchConfig,
    all_loops,
    canonical_loop,
    fixed_vector,
)
from .exactmath import CycMatrix, CycScalar
from .heisenberg import identity
from .homology import HomologyBasis, TwistedCycle, standard_chain_basis
from .logger import Logger
from .modular import ModularField, rank_mod, reduce_all
from .utils import timed

logger = Logger("twist")


@dataclass(frozen=True)
class TwistOperator:
    """
    Matrix of D_ij^power in the coordinates of a HomologyBasis.

    Attributes:
        i: First branch point
        j: Second branch point
        power: 1 or 2
        matrix: Action on coordinate vectors
        orbit: (b, c) of the local system
        monodromy: Trichotomy class of M_ij
    """

    i: int
    j: int
    power: int
    matrix: CycMatrix
    orbit: Tuple[int, int]
    monodromy: str

    @property
    def nilpotent(self) -> CycMatrix:
        """D - 1; for power 2 this is A_ij."""
        return self.matrix - CycMatrix.identity(self.matrix.n, self.matrix.nrows)

    @property
    def key(self) -> str:
        return f"({self.i},{self.j},{self.power},{self.orbit[0]},{self.orbit[1]})"


def dehn_twist_matrix(
    config: BranchConfig, u, basis: HomologyBasis, i: int, j: int, power: int
) -> TwistOperator:
    """
    Twisted Picard-Lefschetz transformation of the loop L_ij.

    D^k x = x + k * sum_{a,b} <x, f_a L> (q^-1)_ab f_b L, where f_a span the vectors fixed by
    M_ij and q_ab = Q(f_a, f_b). This is the rule x + sum_p sign(p) (sum_t M^t w_p) L with the
    sum over t collapsed to k times the Q-orthogonal projection onto the fixed vectors.

    Args:
        config: Group-level config
        u: Character orbit of the local system (must match basis)
        basis: Basis the matrix is written in
        i: First branch point
        j: Second branch point
        power: 1 (needs M_ij = I) or 2 (needs M_ij = I or a reflection)

    Raises:
        ValueError: For rotations, for power 1 on a reflection, or for other powers
    """
    ls = basis.ls
    if u != ls.u or config != ls.config:
        raise ValueError("Basis was built for a different config or orbit")
    mc = ls.monodromy(i, j)
    if mc.kind == ROTATION:
        raise ValueError(f"M_({i},{j}) is a {ROTATION} P^{mc.power}; no power of D_({i},{j}) acts")
    if power not in (1, 2):
        raise ValueError(f"Only powers 1 and 2 are exposed, got {power}")
    if power == 1 and mc.kind != IDENTITY:
        raise ValueError(f"M_({i},{j}) is a {mc.kind}; only D_({i},{j})^2 acts")

    n = ls.n
    loop = canonical_loop(ls.g, i, j)
    fixed = fixed_vector(mc).vectors
    q = CycMatrix.from_rows(n, [[ls.pair(fa, fb) for fb in fixed] for fa in fixed])
    q_inv = q.inverse()

    cycles = [TwistedCycle.single(f, loop) for f in fixed]
    # F: columns are coordinates of f_b L; pair_rows[a][m] = <b_m, f_a L>
    F = CycMatrix.from_rows(
        n, [list(col) for col in zip(*[basis.coordinates(c) for c in cycles])], ncols=len(fixed)
    )
    pair_rows = CycMatrix.from_rows(n, [basis.pairings_with(c) for c in cycles], ncols=basis.size)
    nilpotent = (F @ q_inv.T @ pair_rows).scale(power)
    matrix = CycMatrix.identity(n, basis.size) + nilpotent
    return TwistOperator(i, j, power, matrix, (u.b, u.c), mc.kind)


def admissible_loops(basis: HomologyBasis) -> List[Tuple[int, int]]:
    """Loops whose monodromy is not a rotation, in (i, j) order."""
    return [
        (L.i, L.j)
        for L in all_loops(basis.ls.g)
        if basis.ls.monodromy(L.i, L.j).kind != ROTATION
    ]


def squared_twists(basis: HomologyBasis) -> Dict[Tuple[int, int], TwistOperator]:
    ls = basis.ls
    return {
        key: dehn_twist_matrix(ls.config, ls.u, basis, key[0], key[1], 2)
        for key in admissible_loops(basis)
    }


def admissible_nilpotents(basis: HomologyBasis) -> Dict[Tuple[int, int], CycMatrix]:
    """A_ij = D_ij^2 - 1 for every loop whose monodromy is not a rotation."""
    return {key: op.nilpotent for key, op in squared_twists(basis).items()}


def preserves_form(D: CycMatrix, gram: CycMatrix) -> bool:
    """D^T gram D == gram."""
    return D.T @ gram @ D == gram


def apply_word(
    ops: Sequence[Union[TwistOperator, CycMatrix]], x: Sequence[CycScalar]
) -> List[CycScalar]:
    """
    Apply a word of operators to a coordinate vector, rightmost first.

    Args:
        ops: TwistOperators (their matrices) or plain matrices such as A_ij
        x: Coordinate vector

    Raises:
        ValueError: On a dimension mismatch
    """
    result = list(x)
    for op in reversed(list(ops)):
        M = op.matrix if isinstance(op, TwistOperator) else op
        if M.ncols != len(result):
            raise ValueError(
                f"Operator of shape {M.shape} applied to a vector of length {len(result)}"
            )
        result = M.apply(result)
    return result


def untwisted_config(g: int, n: int = 3) -> BranchConfig:
    """All-identity config used only for the trivial local system; any g >= 2."""
    return BranchConfig(g, n, tuple(identity(n) for _ in range(g + 1)), "untwisted")


def braid_generators(g: int, n: int = 3) -> List[TwistOperator]:
    """
    Twists T_1 .. T_(2g+1) along L_(k, k+1) on untwisted homology, in the basis a_1 .. a_2g.

    Raises:
        ValueError: If g < 2
    """
    if g < 2:
        raise ValueError(f"braid generators need g >= 2, got {g}")
    config = untwisted_config(g, n)
    basis = standard_chain_basis(config)
    return [
        dehn_twist_matrix(config, basis.ls.u, basis, k, k + 1, 1) for k in range(1, 2 * g + 2)
    ]


def braid_certificate(g: int) -> Certificate:
    """Braid relations, distant commutation and form preservation of the untwisted generators."""
    with timed() as clock:
        gens = braid_generators(g)
        basis = standard_chain_basis(untwisted_config(g))
        mats = [op.matrix for op in gens]
        braid_ok = all(
            mats[k] @ mats[k + 1] @ mats[k] == mats[k + 1] @ mats[k] @ mats[k + 1]
            for k in range(len(mats) - 1)
        )
        commute_ok = all(
            mats[a] @ mats[b] == mats[b] @ mats[a]
            for a in range(len(mats))
            for b in range(a + 2, len(mats))
        )
        form_ok = all(preserves_form(M, basis.gram) for M in mats)
    return Certificate(
        check=CHECK_BRAID,
        params={"genus": g},
        status=status_from_bool(braid_ok and commute_ok and form_ok),
        witness={
            "generators": len(mats),
            "dimension": basis.size,
            "braid_relations": braid_ok,
            "distant_commutation": commute_ok,
            "preserves_form": form_ok,
        },
        runtime_ms=clock["runtime_ms"],
    )


def _params(basis: HomologyBasis) -> Dict:
    ls = basis.ls
    return {
        "genus": ls.g,
        "n": ls.n,
        "preset": ls.config.preset_name,
        "orbit": [ls.u.b, ls.u.c],
    }


def jordan_certificate(
    basis: HomologyBasis, twists: Optional[Dict[Tuple[int, int], TwistOperator]] = None
) -> Certificate:
    """
    A_ij^2 = 0 exactly, and rank A_ij = 2 for identity monodromy, 1 for reflections.

    The rank mod p is a lower bound and the number of fixed vectors an upper bound, so
    agreement with the expected value is exact.
    """
    with timed() as clock:
        twists = twists if twists is not None else squared_twists(basis)
        field_, reduced = reduce_all(
            ModularField(basis.n), [op.nilpotent for op in twists.values()]
        )
        identity_rank = basis.ls.rank
        ranks = {}
        failures = []
        for ((i, j), op), A_mod in zip(twists.items(), reduced):
            A = op.nilpotent
            square_zero = (A @ A).is_zero()
            rank = rank_mod(A_mod, field_)
            expected = identity_rank if op.monodromy == IDENTITY else 1
            ranks[f"{i},{j}"] = rank
            if not square_zero or rank != expected:
                failures.append(
                    {"loop": [i, j], "rank": rank, "expected": expected, "square_zero": square_zero}
                )
    return Certificate(
        check=CHECK_JORDAN,
        params=_params(basis),
        status=status_from_bool(not failures),
        witness={
            "ranks": ranks,
            "identity_loops": sum(1 for op in twists.values() if op.monodromy == IDENTITY),
            "reflection_loops": sum(1 for op in twists.values() if op.monodromy == REFLECTION),
            "failures": failures,
            "prime": field_.p,
        },
        runtime_ms=clock["runtime_ms"],
    )


def symplectic_certificate(
    basis: HomologyBasis, twists: Optional[Dict[Tuple[int, int], TwistOperator]] = None
) -> Certificate:
    with timed() as clock:
        twists = twists if twists is not None else squared_twists(basis)
        bad = [
            [i, j] for (i, j), op in twists.items() if not preserves_form(op.matrix, basis.gram)
        ]
    return Certificate(
        check=CHECK_SYMPLECTIC,
        params=_params(basis),
        status=status_from_bool(not bad),
        witness={"operators": len(twists), "violations": bad},
        runtime_ms=clock["runtime_ms"],
    )
