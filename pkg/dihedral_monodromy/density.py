"""Certificates about the Lie algebra generated by the squared twists A_ij and its orbits.

The heavy linear algebra runs modulo a prime p = 1 (mod n). Ranks found there are lower
bounds for the exact ranks, so a full rank or a full symplectic dimension mod p is exact.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import iv
from sympy import Poly, Symbol

from .certificate import Certificate, status_from_bool
from .constants import (
    CHECK_IRREDUCIBILITY,
    CHECK_LIE_CLOSURE,
    CHECK_NO_CHARACTERS,
    CHECK_NONCOMPACTNESS,
    CHECK_OPEN_ORBIT,
    CHECK_SEPARATION,
    DEFAULT_SEED,
    ENGINE_EXACT,
    ENGINE_MODULAR,
    INTERVAL_PRECISION_BITS,
    NUMERIC_UNIT_TOLERANCE,
    RANDOM_COEFF_RANGE,
    SEARCH_SAMPLES_PER_LENGTH,
    SEPARATION_PAIRS,
    SEPARATION_TRACE_DIVISOR,
    START_LOOP,
    STATUS_FAIL,
    STATUS_INCONCLUSIVE,
    STATUS_PASS,
)
from .curve import (
    ROTATION,
    BranchConfig,
    all_loops,
    canonical_loop,
    fixed_vector,
    loop_group_monodromy,
)
from .exactmath import (
    CycMatrix,
    CycPoly,
    CycScalar,
    ExactEchelon,
    charpoly,
    poly_degree,
    poly_gcd,
    poly_trim,
)
from .homology import HomologyBasis, TwistedCycle, build_basis
from .logger import Logger
from .modular import ModularEchelon, ModularField, rank_mod, reduce_all
from .reps import CharOrbit, all_orbits
from .twist import TwistOperator, squared_twists
from .utils import make_rng, random_int_vector, timed

logger = Logger("density")

LoopKey = Tuple[int, int]


def sp_dimension(d: int) -> int:
    """Dimension of the symplectic Lie algebra of a d-dimensional space."""
    return d * (d + 1) // 2


def bracket(X: CycMatrix, Y: CycMatrix) -> CycMatrix:
    return X @ Y - Y @ X


def is_symplectic_element(X: CycMatrix, gram: CycMatrix) -> bool:
    """X^T gram + gram X == 0."""
    return (X.T @ gram + gram @ X).is_zero()


def _bracket_mod(field_: ModularField, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return (field_.matmul(X, Y) - field_.matmul(Y, X)) % field_.p


def _flatten(X: CycMatrix) -> List[CycScalar]:
    return [a for row in X.rows for a in row]


def _unflatten(n: int, d: int, values: Sequence[CycScalar]) -> CycMatrix:
    return CycMatrix.from_rows(n, [list(values[r * d : (r + 1) * d]) for r in range(d)], ncols=d)


@dataclass
class LieAlgebraBasis:
    """
    Bracket closure of a set of generators inside gl(d).

    Element k of the closure is either a generator (words[k] = (g, None)) or the bracket
    [element parent, generator g] (words[k] = (g, parent)). The echelon holds the span of all
    elements, flattened row by row.

    Attributes:
        n: Order of the root of unity of the coefficient field
        dim_ambient: d
        engine: "modular" or "exact"
        generators: Generators that were independent when inserted, in insertion order
        generated_from: Labels of those generators
        words: How each element was produced
        echelon: Reduced span of the elements
        prime_field: Prime field of the modular engine
    """

    n: int
    dim_ambient: int
    engine: str
    generators: List[CycMatrix]
    generated_from: List[str]
    words: List[Tuple[int, Optional[int]]]
    echelon: Union[ModularEchelon, ExactEchelon] = field(repr=False)
    prime_field: Optional[ModularField] = field(default=None, repr=False)
    elements: List[Union[np.ndarray, CycMatrix]] = field(default_factory=list, repr=False)

    @property
    def dim(self) -> int:
        return self.echelon.rank

    @property
    def target_dim(self) -> int:
        return sp_dimension(self.dim_ambient)

    @property
    def is_full_sp(self) -> bool:
        return self.dim == self.target_dim

    @property
    def prime(self) -> Optional[int]:
        return self.prime_field.p if self.prime_field is not None else None

    def word_label(self, k: int) -> str:
        """Nested bracket expression of element k, e.g. "[[A(1,2), A(2,3)], A(1,2)]"."""
        chain = []
        while k is not None:
            g, parent = self.words[k]
            chain.append(g)
            k = parent
        label = self.generated_from[chain.pop()]
        while chain:
            label = f"[{label}, {self.generated_from[chain.pop()]}]"
        return label

    def exact_elements(self) -> List[CycMatrix]:
        """The closure elements as exact matrices, rebuilt from their words."""
        if self.engine == ENGINE_EXACT:
            return list(self.elements)
        out: List[CycMatrix] = []
        for g, parent in self.words:
            G = self.generators[g]
            out.append(G if parent is None else bracket(out[parent], G))
        return out

    def basis_mod(self, field_: Optional[ModularField] = None) -> Tuple[ModularField, np.ndarray]:
        """
        A basis of the closure mod p as an array of shape (dim, d, d).

        Args:
            field_: Prime field to use for an exact closure; ignored for a modular one

        Returns:
            (field, basis)
        """
        d = self.dim_ambient
        if self.engine == ENGINE_MODULAR:
            return self.prime_field, self.echelon.rows.reshape(-1, d, d)
        field_, reduced = reduce_all(field_ or ModularField(self.n), self.exact_elements())
        if not reduced:
            return field_, np.zeros((0, d, d), dtype=np.int64)
        return field_, np.stack(reduced)

    def contains(self, X: CycMatrix) -> bool:
        if self.engine == ENGINE_MODULAR:
            return self.echelon.contains(self.prime_field.reduce_matrix(X).reshape(-1))
        return self.echelon.contains(_flatten(X))

    def is_bracket_closed(self) -> bool:
        """Every bracket of two basis elements lies in the span."""
        if self.engine == ENGINE_EXACT:
            basis = [_unflatten(self.n, self.dim_ambient, row) for row in self.echelon.rows]
            return all(
                self.echelon.contains(_flatten(bracket(basis[a], basis[b])))
                for a in range(len(basis))
                for b in range(a + 1, len(basis))
            )
        field_ = self.prime_field
        Y = self.echelon.rows.reshape(-1, self.dim_ambient, self.dim_ambient)
        pivots = self.echelon.pivots
        for a in range(len(Y) - 1):
            B = _bracket_mod(field_, Y[a][None], Y[a + 1 :]).reshape(len(Y) - a - 1, -1)
            residual = (B - field_.matmul(B[:, pivots], self.echelon.rows)) % field_.p
            if residual.any():
                return False
        return True

    def to_json(self) -> Dict:
        return {
            "dim": self.dim,
            "target_dim": self.target_dim,
            "dim_ambient": self.dim_ambient,
            "engine": self.engine,
            "prime": self.prime,
            "generated_from": list(self.generated_from),
            "num_elements": len(self.words),
        }


def lie_closure(
    generators: Sequence[CycMatrix],
    gram: CycMatrix,
    engine: str = ENGINE_MODULAR,
    labels: Optional[Sequence[str]] = None,
    field_: Optional[ModularField] = None,
) -> LieAlgebraBasis:
    """
    Smallest bracket-closed subspace containing the generators.

    Generators are inserted in the given order; then elements are taken FIFO and bracketed
    with every generator. Left-normed brackets of generators span the generated algebra, so
    the queue empties exactly at the closure. The loop stops early once the dimension of
    the full symplectic algebra is reached.

    Args:
        generators: Matrices X with X^T gram + gram X = 0
        gram: Invariant antisymmetric form
        engine: "modular" (ranks mod p) or "exact" (over Q(zeta_n))
        labels: Names recorded as generated_from; defaults to X0, X1, ...
        field_: Prime field for the modular engine

    Raises:
        ValueError: For an empty generator list, a non-symplectic generator or an unknown engine
    """
    generators = list(generators)
    if not generators:
        raise ValueError("lie_closure needs at least one generator")
    labels = list(labels) if labels is not None else [f"X{k}" for k in range(len(generators))]
    if len(labels) != len(generators):
        raise ValueError(f"{len(labels)} labels for {len(generators)} generators")
    d = gram.nrows
    for label, X in zip(labels, generators):
        if X.shape != (d, d) or not is_symplectic_element(X, gram):
            logger.error(f"Generator {label} is not in the symplectic Lie algebra of the form")
            raise ValueError(f"Generator {label} does not satisfy X^T G + G X = 0")
    if engine == ENGINE_MODULAR:
        return _closure_modular(generators, labels, gram, field_)
    if engine == ENGINE_EXACT:
        return _closure_exact(generators, labels, gram)
    raise ValueError(f"Unknown engine {engine!r}; expected {ENGINE_MODULAR} or {ENGINE_EXACT}")


def _closure_modular(
    generators: List[CycMatrix], labels: List[str], gram: CycMatrix, field_: Optional[ModularField]
) -> LieAlgebraBasis:
    n, d = gram.n, gram.nrows
    field_, reduced = reduce_all(field_ or ModularField(n), generators)
    target = sp_dimension(d)
    echelon = ModularEchelon(field_, d * d)
    closure = LieAlgebraBasis(n, d, ENGINE_MODULAR, [], [], [], echelon, field_)
    kept = []
    for X, label, Xm in zip(generators, labels, reduced):
        if echelon.insert(Xm.reshape(-1)):
            closure.words.append((len(kept), None))
            closure.generators.append(X)
            closure.generated_from.append(label)
            closure.elements.append(Xm)
            kept.append(Xm)

    queue = deque(range(len(closure.elements)))
    while queue and echelon.rank < target:
        k = queue.popleft()
        for g, G in enumerate(kept):
            B = _bracket_mod(field_, closure.elements[k], G)
            if echelon.insert(B.reshape(-1)):
                closure.words.append((g, k))
                closure.elements.append(B)
                queue.append(len(closure.elements) - 1)
                logger.progress("lie_closure", echelon.rank, target)
                if echelon.rank == target:
                    break
    logger.debug(f"Lie closure: dim {echelon.rank} of {target} (p={field_.p})")
    return closure


def _closure_exact(
    generators: List[CycMatrix], labels: List[str], gram: CycMatrix
) -> LieAlgebraBasis:
    n, d = gram.n, gram.nrows
    target = sp_dimension(d)
    echelon = ExactEchelon(n, d * d)
    closure = LieAlgebraBasis(n, d, ENGINE_EXACT, [], [], [], echelon)
    for X, label in zip(generators, labels):
        if echelon.insert(_flatten(X)):
            closure.words.append((len(closure.generators), None))
            closure.generators.append(X)
            closure.generated_from.append(label)
            closure.elements.append(X)

    queue = deque(range(len(closure.elements)))
    while queue and echelon.rank < target:
        k = queue.popleft()
        for g, G in enumerate(closure.generators):
            B = bracket(closure.elements[k], G)
            if echelon.insert(_flatten(B)):
                closure.words.append((g, k))
                closure.elements.append(B)
                queue.append(len(closure.elements) - 1)
                logger.progress("lie_closure", echelon.rank, target)
                if echelon.rank == target:
                    break
    return closure


def killing_form(closure: LieAlgebraBasis) -> Union[np.ndarray, CycMatrix]:
    """
    Gram matrix K_ab = tr(ad Y_a ad Y_b) in the echelon basis Y of the closure.

    Structure constants are read off at the pivot columns, which is valid because the
    closure is bracket-closed. The modular engine returns K mod p.
    """
    m, d = closure.dim, closure.dim_ambient
    if closure.engine == ENGINE_EXACT:
        n = closure.n
        basis = [_unflatten(n, d, row) for row in closure.echelon.rows]
        # T[a][b] = coordinates of [Y_a, Y_b]
        T = [
            [closure.echelon.coordinates(_flatten(bracket(Ya, Yb))) for Yb in basis] for Ya in basis
        ]
        rows = []
        for a in range(m):
            row = []
            for b in range(m):
                total = CycScalar.zero(n)
                for s in range(m):
                    for t in range(m):
                        if not T[a][s][t].is_zero() and not T[b][t][s].is_zero():
                            total = total + T[a][s][t] * T[b][t][s]
                row.append(total)
            rows.append(row)
        return CycMatrix.from_rows(n, rows, ncols=m)

    field_ = closure.prime_field
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    Y = closure.echelon.rows.reshape(m, d, d)
    pivots = closure.echelon.pivots
    T = np.empty((m, m, m), dtype=np.int64)
    for a in range(m):
        T[a] = _bracket_mod(field_, Y[a][None], Y).reshape(m, d * d)[:, pivots]
        logger.progress("killing_form", a + 1, m)
    # ad(Y_a)[t][s] = T[a][s][t]
    left = T.reshape(m, m * m)
    right = np.ascontiguousarray(T.transpose(0, 2, 1)).reshape(m, m * m)
    return field_.matmul(left, right.T)


def killing_rank(closure: LieAlgebraBasis) -> int:
    K = killing_form(closure)
    if isinstance(K, CycMatrix):
        return K.rank() if K.nrows else 0
    return rank_mod(K, closure.prime_field)


def _generators_traceless(closure: LieAlgebraBasis) -> bool:
    if not all(G.trace().is_zero() for G in closure.generators):
        return False
    if closure.engine == ENGINE_MODULAR and closure.dim:
        Y = closure.echelon.rows.reshape(closure.dim, closure.dim_ambient, closure.dim_ambient)
        return not (np.trace(Y, axis1=1, axis2=2) % closure.prime_field.p).any()
    return True


def no_characters_proxy(closure: LieAlgebraBasis, params: Optional[Dict] = None) -> Certificate:
    """
    Semisimplicity proxy: traceless generators and a nondegenerate Killing form.

    A nondegenerate Killing form makes the algebra semisimple, hence perfect, so the
    connected group has no nontrivial characters.
    """
    with timed() as clock:
        traceless = _generators_traceless(closure)
        rank = killing_rank(closure)
        ok = traceless and closure.dim > 0 and rank == closure.dim
    if not ok:
        logger.warning(f"Killing form rank {rank} on an algebra of dim {closure.dim}")
    return Certificate(
        check=CHECK_NO_CHARACTERS,
        params=dict(params or {}),
        status=status_from_bool(ok),
        witness={
            "dim": closure.dim,
            "killing_rank": rank,
            "traceless": traceless,
            "engine": closure.engine,
            "prime": closure.prime,
        },
        runtime_ms=clock["runtime_ms"],
    )


def lie_closure_certificate(
    closure: LieAlgebraBasis, params: Optional[Dict] = None, runtime_ms: int = 0
) -> Certificate:
    """PASS when the closure is all of sp(d), INCONCLUSIVE with the reached dim otherwise."""
    status = STATUS_PASS if closure.is_full_sp else STATUS_INCONCLUSIVE
    if not closure.is_full_sp:
        logger.info(f"Lie closure reached dim {closure.dim} of {closure.target_dim}")
    return Certificate(
        check=CHECK_LIE_CLOSURE,
        params=dict(params or {}),
        status=status,
        witness=closure.to_json(),
        runtime_ms=runtime_ms,
    )


@dataclass
class Factor:
    """
    One summand H_1(X_o, W_u) of the monodromy representation with its squared twists.

    Attributes:
        orbit: Character orbit u
        basis: Homology basis the operators are written in
        twists: D_ij^2 for every loop whose monodromy is not a rotation
    """

    orbit: CharOrbit
    basis: HomologyBasis
    twists: Dict[LoopKey, TwistOperator]
    nilpotents: Dict[LoopKey, CycMatrix] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.nilpotents:
            self.nilpotents = {key: op.nilpotent for key, op in self.twists.items()}

    @property
    def dim(self) -> int:
        return self.basis.size

    @property
    def gram(self) -> CycMatrix:
        return self.basis.gram

    @property
    def label(self) -> str:
        return self.orbit.label()

    def nilpotent(self, i: int, j: int) -> CycMatrix:
        try:
            return self.nilpotents[(i, j)]
        except KeyError:
            raise ValueError(f"A_({i},{j}) is not defined for u={self.label}: rotation monodromy")

    def generators(self) -> Tuple[List[CycMatrix], List[str]]:
        keys = sorted(self.nilpotents)
        return [self.nilpotents[k] for k in keys], [f"A({i},{j})" for i, j in keys]


def build_factor(config: BranchConfig, u: CharOrbit) -> Factor:
    basis = build_basis(config, u)
    return Factor(u, basis, squared_twists(basis))


def factor_closure(factor: Factor, engine: str = ENGINE_MODULAR) -> LieAlgebraBasis:
    """Lie algebra generated by the A_ij of a factor, generators sorted by (i, j)."""
    generators, labels = factor.generators()
    closure = lie_closure(generators, factor.gram, engine=engine, labels=labels)
    logger.info(f"u={factor.label}: Lie closure dim {closure.dim} of {closure.target_dim}")
    return closure


def _params(config: BranchConfig, orbits: Sequence[CharOrbit]) -> Dict:
    params = {"genus": config.g, "n": config.n, "preset": config.preset_name}
    if len(orbits) == 1:
        params["orbit"] = [orbits[0].b, orbits[0].c]
    else:
        params["orbits"] = [[u.b, u.c] for u in orbits]
    return params


def closure_certificate(
    config: BranchConfig,
    u: CharOrbit,
    factor: Optional[Factor] = None,
    engine: str = ENGINE_MODULAR,
) -> Certificate:
    with timed() as clock:
        factor = factor or build_factor(config, u)
        closure = factor_closure(factor, engine)
    return lie_closure_certificate(closure, _params(config, [u]), clock["runtime_ms"])


def starting_cycle(factor: Factor) -> TwistedCycle:
    """
    Start vector w_0 = v L_ij of the irreducibility check.

    L_(2,11) is tried first, then every other loop in (i, j) order. A loop qualifies when its
    monodromy is not a rotation and a fixed vector v gives a nonzero class v L_ij.

    Raises:
        ValueError: If no loop qualifies
    """
    ls = factor.basis.ls
    keys = [START_LOOP] + [loop.key for loop in all_loops(ls.g) if loop.key != START_LOOP]
    for i, j in keys:
        mc = ls.monodromy(i, j)
        if mc.kind == ROTATION:
            continue
        for v in fixed_vector(mc).vectors:
            cycle = TwistedCycle.single(v, canonical_loop(ls.g, i, j))
            if any(not c.is_zero() for c in factor.basis.coordinates(cycle)):
                if (i, j) != START_LOOP:
                    logger.debug(f"u={factor.label}: starting from L({i},{j})")
                return cycle
    raise ValueError(f"No loop gives a nonzero fixed-vector cycle for u={factor.label}")


def irreducibility_certificate(
    config: BranchConfig,
    u: CharOrbit,
    factor: Optional[Factor] = None,
    seed: Optional[int] = None,
    random_start: bool = False,
    loops: Optional[Sequence[LoopKey]] = None,
) -> Certificate:
    """
    Span of everything reachable from a start vector under the A_ij.

    Vectors are processed FIFO and every A_ij is applied to each newly independent vector,
    so the final span is the submodule generated by the start. PASS when it is everything.

    Args:
        config: Group-level config
        u: Character orbit
        factor: Prebuilt factor for u
        seed: Seed of the random start; defaults to DEFAULT_SEED when random_start is set
        random_start: Start from a seeded random coordinate vector instead of w_0
        loops: Restrict the operators to these loops
    """
    params = _params(config, [u])
    params["random_start"] = random_start
    if random_start and seed is None:
        seed = DEFAULT_SEED
    with timed() as clock:
        factor = factor or build_factor(config, u)
        d = factor.dim
        keys = sorted(factor.nilpotents) if loops is None else [tuple(k) for k in loops]
        operators = [factor.nilpotent(i, j) for i, j in keys]
        n = config.n
        if random_start:
            rng = make_rng(seed)
            start_coords = [
                CycScalar.rational(n, c) for c in random_int_vector(rng, d, RANDOM_COEFF_RANGE)
            ]
            start_label = "random"
        else:
            try:
                w0 = starting_cycle(factor)
            except ValueError as e:
                logger.warning(str(e))
                return Certificate(
                    check=CHECK_IRREDUCIBILITY,
                    params=params,
                    status=STATUS_INCONCLUSIVE,
                    witness={"rank": 0, "dim": d, "reason": str(e)},
                    seed=seed,
                    runtime_ms=clock["runtime_ms"],
                )
            start_coords = factor.basis.coordinates(w0)
            start_label = w0.label()
        field_, reduced = reduce_all(
            ModularField(n), operators + [CycMatrix.column(n, start_coords)]
        )
        start = reduced.pop()[:, 0]

        echelon = ModularEchelon(field_, d)
        vectors: List[np.ndarray] = []
        words: List[Dict] = []
        if echelon.insert(start):
            vectors.append(start)
            words.append({"parent": None, "loop": None})
        queue = deque(range(len(vectors)))
        while queue and echelon.rank < d:
            k = queue.popleft()
            for key, A in zip(keys, reduced):
                w = field_.matmul(A, vectors[k][:, None])[:, 0]
                if echelon.insert(w):
                    vectors.append(w)
                    words.append({"parent": k, "loop": list(key)})
                    queue.append(len(vectors) - 1)
                    if echelon.rank == d:
                        break
    ok = echelon.rank == d
    if not ok:
        logger.warning(f"u={u.label()}: orbit of the start spans rank {echelon.rank} of {d}")
    return Certificate(
        check=CHECK_IRREDUCIBILITY,
        params=params,
        status=status_from_bool(ok),
        witness={
            "rank": echelon.rank,
            "dim": d,
            "start": start_label,
            "operators": len(operators),
            "words": words,
            "prime": field_.p,
        },
        seed=seed,
        runtime_ms=clock["runtime_ms"],
    )


def _scalar_value(a: CycScalar) -> Union[str, List[str]]:
    if a.is_rational():
        value = a.rational_value()
        return str(value.numerator) if value.denominator == 1 else str(value)
    return a.to_json()


def separation_triple(factor: Factor) -> List[Dict]:
    """
    trace(A_(2,i) A_(1,2) A_(2,j) A_(1,2)) for the three separation pairs.

    With x_7 = b, x_9 = c and x_11 = 0 each trace equals SEPARATION_TRACE_DIVISOR times
    2 + gamma^(x_j - x_i) + gamma^(x_i - x_j); the normalised value is the trace divided by it.

    Raises:
        ValueError: For the trivial orbit or when one of the A's is not defined
    """
    u = factor.orbit
    if u.is_trivial:
        raise ValueError("The trivial orbit has no separation triple")
    n = u.n
    x = {7: u.b, 9: u.c, 11: 0}
    scale = CycScalar.rational(n, Fraction(1, SEPARATION_TRACE_DIVISOR))
    A12 = factor.nilpotent(1, 2)
    entries = []
    for i, j in SEPARATION_PAIRS:
        E = factor.nilpotent(2, i) @ A12 @ factor.nilpotent(2, j) @ A12
        trace = E.trace()
        normalised = trace * scale
        formula = (
            CycScalar.rational(n, 2)
            + CycScalar.zeta_power(n, x[j] - x[i])
            + CycScalar.zeta_power(n, x[i] - x[j])
        )
        entries.append(
            {"pair": (i, j), "trace": trace, "normalised": normalised, "formula": formula}
        )
    return entries


def _triple_json(entries: List[Dict]) -> List[Dict]:
    return [
        {
            "pair": list(e["pair"]),
            "trace": _scalar_value(e["trace"]),
            "normalised": _scalar_value(e["normalised"]),
            "formula": _scalar_value(e["formula"]),
            "matches": e["normalised"] == e["formula"],
        }
        for e in entries
    ]


def component_separation(
    config: BranchConfig,
    u: CharOrbit,
    u2: CharOrbit,
    factors: Optional[Dict[CharOrbit, Factor]] = None,
) -> Certificate:
    """
    Compare the separation triples of two orbits.

    PASS when every trace matches the closed formula and the triples coincide exactly when
    the orbits do.
    """
    factors = factors if factors is not None else {}
    params = _params(config, [u, u2])
    with timed() as clock:
        try:
            for v in (u, u2):
                if v not in factors:
                    factors[v] = build_factor(config, v)
            first = separation_triple(factors[u])
            second = separation_triple(factors[u2])
        except ValueError as e:
            logger.warning(f"Separation of {u.label()} and {u2.label()} not computable: {str(e)}")
            return Certificate(
                check=CHECK_SEPARATION,
                params=params,
                status=STATUS_INCONCLUSIVE,
                witness={"reason": str(e)},
                runtime_ms=clock["runtime_ms"],
            )
        formulas_ok = all(e["normalised"] == e["formula"] for e in first + second)
        same = [e["normalised"] for e in first] == [e["normalised"] for e in second]
        ok = formulas_ok and same == (u == u2)
    return Certificate(
        check=CHECK_SEPARATION,
        params=params,
        status=status_from_bool(ok),
        witness={
            "first": _triple_json(first),
            "second": _triple_json(second),
            "formulas_match": formulas_ok,
            "trace_divisor": SEPARATION_TRACE_DIVISOR,
            "separated": not same,
            "same_orbit": u == u2,
        },
        runtime_ms=clock["runtime_ms"],
    )


def _separation_key(factor: Factor) -> Tuple:
    if factor.orbit.is_trivial:
        return ("trivial",)
    return tuple(tuple(e["normalised"].coeffs) for e in separation_triple(factor))


def open_orbit_certificate(
    config: BranchConfig,
    orbits: Optional[Sequence[CharOrbit]] = None,
    factors: Optional[Dict[CharOrbit, Factor]] = None,
    closures: Optional[Dict[CharOrbit, LieAlgebraBasis]] = None,
    seed: Optional[int] = None,
    zero_factor: Optional[CharOrbit] = None,
) -> Certificate:
    """
    Open-orbit criterion for the product of all factors.

    Repeated copies of the same orbit are merged and acted on diagonally by one algebra.
    Different orbits stay separate, and when their separation triples coincide the result is
    at most INCONCLUSIVE. A seeded random vector v with a component in every factor is then
    mapped by the basis of each (merged) algebra, and the ranks of the images are summed. The
    sum reaches sum(dim) exactly when the orbit of v is open.

    Args:
        config: Group-level config
        orbits: Factors in order, repetitions allowed; defaults to all orbits
        factors: Prebuilt factors
        closures: Prebuilt Lie closures
        seed: Seed for v
        zero_factor: Orbit whose component of v is set to zero

    Returns:
        FAIL on a rank deficit, INCONCLUSIVE when the rank is full but a closure is not all of
        sp or two different orbits could not be separated, PASS otherwise
    """
    seed = DEFAULT_SEED if seed is None else seed
    orbits = list(orbits) if orbits is not None else all_orbits(config.n)
    factors = factors if factors is not None else {}
    closures = closures if closures is not None else {}
    params = _params(config, orbits)
    with timed() as clock:
        for u in orbits:
            if u not in factors:
                factors[u] = build_factor(config, u)
            if u not in closures:
                closures[u] = factor_closure(factors[u])

        separated = True
        groups: Dict[Tuple, List[int]] = {}
        for idx, u in enumerate(orbits):
            try:
                key = _separation_key(factors[u])
            except ValueError as e:
                logger.warning(f"No separation triple for u={u.label()}: {str(e)}")
                separated = False
                key = ("orbit", u.canonical)
            groups.setdefault(key, []).append(idx)

        rng = make_rng(seed)
        vectors = []
        for u in orbits:
            v = np.array(random_int_vector(rng, factors[u].dim, RANDOM_COEFF_RANGE), dtype=np.int64)
            vectors.append(np.zeros_like(v) if u == zero_factor else v)

        group_witness = []
        total = 0
        for members in groups.values():
            member_orbits = {orbits[k] for k in members}
            if len(member_orbits) > 1:
                # different orbits with equal triples: no common algebra to act diagonally
                separated = False
                parts = [[k] for k in members]
            else:
                parts = [members]
            for part in parts:
                field_, Y = closures[orbits[part[0]]].basis_mod()
                images = [
                    field_.matmul(Y, (vectors[k] % field_.p)[:, None])[:, :, 0] for k in part
                ]
                rank = rank_mod(np.hstack(images), field_)
                total += rank
                group_witness.append(
                    {
                        "orbits": [orbits[k].label() for k in part],
                        "rank": rank,
                        "dim": sum(factors[orbits[k]].dim for k in part),
                        "prime": field_.p,
                    }
                )

        expected = sum(factors[u].dim for u in orbits)
        full = all(closures[u].is_full_sp for u in orbits)
    if total < expected:
        status = STATUS_FAIL
        logger.warning(f"Open orbit rank {total} of {expected}")
    elif not (full and separated):
        status = STATUS_INCONCLUSIVE
    else:
        status = STATUS_PASS
    return Certificate(
        check=CHECK_OPEN_ORBIT,
        params=params,
        status=status,
        witness={
            "rank": total,
            "expected_rank": expected,
            "deficit": expected - total,
            "factors": [
                {
                    "orbit": u.label(),
                    "dim": factors[u].dim,
                    "closure_dim": closures[u].dim,
                    "target_dim": closures[u].target_dim,
                    "full_sp": closures[u].is_full_sp,
                }
                for u in orbits
            ],
            "groups": group_witness,
            "separated": separated,
            "zero_factor": zero_factor.label() if zero_factor is not None else None,
        },
        seed=seed,
        runtime_ms=clock["runtime_ms"],
    )


# Letters of the noncompactness search: (loop, +1) is D^2, (loop, -1) its inverse 1 - A.
Letter = Tuple[LoopKey, int]


def search_alphabet(config: BranchConfig, factors: Dict[CharOrbit, Factor]) -> List[LoopKey]:
    """
    Loops whose squared twist acts on every factor.

    Their group monodromy is a reflection, or a central element (a = alpha = 0), which acts
    trivially on every W_u.
    """
    keys = []
    for loop in all_loops(config.g):
        m = loop_group_monodromy(config, loop.i, loop.j)
        if m.eps == -1 or (m.a == 0 and m.alpha == 0):
            if all(loop.key in f.nilpotents for f in factors.values()):
                keys.append(loop.key)
    return keys


def _letter_matrix(factor: Factor, letter: Letter) -> CycMatrix:
    key, sign = letter
    if sign > 0:
        return factor.twists[key].matrix
    return CycMatrix.identity(factor.basis.n, factor.dim) - factor.nilpotents[key]


def word_matrix(factor: Factor, word: Sequence[Letter]) -> CycMatrix:
    """Exact product of the letters, leftmost factor first."""
    M = CycMatrix.identity(factor.basis.n, factor.dim)
    for letter in word:
        M = M @ _letter_matrix(factor, letter)
    return M


def _off_circle_numerically(M: np.ndarray) -> bool:
    eigenvalues = np.linalg.eigvals(M)
    return bool(np.max(np.abs(np.abs(eigenvalues) - 1.0)) > NUMERIC_UNIT_TOLERANCE)


def _iv_scalar(a: CycScalar) -> Tuple:
    re, im = iv.mpf(0), iv.mpf(0)
    for k, c in enumerate(a.coeffs):
        if not c:
            continue
        q = iv.mpf(int(c.numerator)) / int(c.denominator)
        angle = 2 * iv.pi * k / a.n
        re = re + q * iv.cos(angle)
        im = im + q * iv.sin(angle)
    return re, im


def _iv_mul(x: Tuple, y: Tuple) -> Tuple:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def _iv_abs(x: Tuple):
    return iv.sqrt(x[0] ** 2 + x[1] ** 2)


def _root_disk_off_circle(chi: CycPoly, z: complex) -> bool:
    """
    Whether the disk |w - z| <= d |chi(z) / chi'(z)|, which always holds a root of chi, lies
    strictly inside or strictly outside the unit circle. Evaluated in interval arithmetic.
    """
    old = iv.prec
    iv.prec = INTERVAL_PRECISION_BITS
    try:
        Z = (iv.mpf(z.real), iv.mpf(z.imag))
        value = (iv.mpf(0), iv.mpf(0))
        deriv = (iv.mpf(0), iv.mpf(0))
        for c in reversed(chi):
            dz = _iv_mul(deriv, Z)
            deriv = (dz[0] + value[0], dz[1] + value[1])
            vz = _iv_mul(value, Z)
            cc = _iv_scalar(c)
            value = (vz[0] + cc[0], vz[1] + cc[1])
        radius = (len(chi) - 1) * _iv_abs(value) / _iv_abs(deriv)
        modulus = _iv_abs(Z)
        return (modulus - radius > 1) is True or (modulus + radius < 1) is True
    finally:
        iv.prec = old


def _conj_reciprocal(chi: CycPoly) -> CycPoly:
    d = len(chi) - 1
    return [chi[d - k].conj() for k in range(d + 1)]


def _has_noncyclotomic_factor(chi: CycPoly) -> bool:
    if not all(c.is_rational() and c.rational_value().denominator == 1 for c in chi):
        return False
    x = Symbol("x")
    poly = Poly([int(c.rational_value()) for c in reversed(chi)], x)
    _, factors = poly.factor_list()
    return any(not f.is_cyclotomic for f, _ in factors)


def certify_off_unit_circle(M: CycMatrix) -> Optional[str]:
    """
    Decide exactly that M has an eigenvalue of modulus != 1.

    Tries, in order: an interval root-inclusion disk around a numerical root, the exact
    test chi != c chi* (all roots on the circle forces chi to be proportional to its
    conjugate-reciprocal), and Kronecker's theorem for monic integer chi.

    Returns:
        "interval", "reciprocal_gcd" or "kronecker"; None when nothing is certified
    """
    chi = poly_trim(charpoly(M))
    d = len(chi) - 1
    if d < 1:
        return None
    roots = np.roots([c.to_complex() for c in reversed(chi)])
    for z in sorted(roots, key=lambda r: -abs(abs(r) - 1.0)):
        if abs(abs(z) - 1.0) <= NUMERIC_UNIT_TOLERANCE:
            break
        if _root_disk_off_circle(chi, complex(z)):
            return "interval"
    if poly_degree(poly_gcd(chi, _conj_reciprocal(chi))) < d:
        return "reciprocal_gcd"
    if _has_noncyclotomic_factor(chi):
        return "kronecker"
    return None


def certify_word(
    factors: Dict[CharOrbit, Factor], word: Sequence[Letter]
) -> Optional[Dict[str, str]]:
    """
    Per-factor certification method when the word has an eigenvalue off the unit circle on
    every factor; None when some factor is not certified.
    """
    methods = {}
    for u, factor in factors.items():
        method = certify_off_unit_circle(word_matrix(factor, word))
        if method is None:
            return None
        methods[u.label()] = method
    return methods


def _word_json(word: Sequence[Letter]) -> List[Dict]:
    return [{"loop": list(key), "power": 2 * sign} for key, sign in word]


def noncompactness_search(
    config: BranchConfig,
    max_word_length: int,
    seed: Optional[int] = None,
    factors: Optional[Dict[CharOrbit, Factor]] = None,
    samples_per_length: int = SEARCH_SAMPLES_PER_LENGTH,
) -> Certificate:
    """
    Seeded search for a product of squared twists with an eigenvalue off the unit circle on
    every factor.

    Words are screened with floating-point eigenvalues and then certified exactly. Not
    finding one within the budget is INCONCLUSIVE.
    """
    seed = DEFAULT_SEED if seed is None else seed
    params = _params(config, all_orbits(config.n))
    params["max_word_length"] = max_word_length
    with timed() as clock:
        if max_word_length < 1:
            return Certificate(
                check=CHECK_NONCOMPACTNESS,
                params=params,
                status=STATUS_INCONCLUSIVE,
                witness={"reason": "max_word_length < 1", "words_tried": 0},
                seed=seed,
                runtime_ms=clock["runtime_ms"],
            )
        if factors is None:
            factors = {u: build_factor(config, u) for u in all_orbits(config.n)}
        alphabet = search_alphabet(config, factors)
        letters: List[Letter] = [(key, sign) for key in alphabet for sign in (1, -1)]
        numeric = {
            u: [_letter_matrix(f, letter).to_complex() for letter in letters]
            for u, f in factors.items()
        }
        rng = make_rng(seed)
        seen = set()
        tried = 0
        found = None
        for length in range(1, max_word_length + 1):
            if not letters:
                break
            for _ in range(samples_per_length):
                indices = tuple(int(k) for k in rng.integers(0, len(letters), size=length))
                if indices in seen:
                    continue
                seen.add(indices)
                tried += 1
                logger.progress("noncompactness_search", tried)
                screened = True
                for u in factors:
                    M = np.eye(factors[u].dim, dtype=complex)
                    for k in indices:
                        M = M @ numeric[u][k]
                    if not _off_circle_numerically(M):
                        screened = False
                        break
                if not screened:
                    continue
                word = [letters[k] for k in indices]
                methods = certify_word(factors, word)
                if methods is not None:
                    found = (word, methods)
                    break
            if found is not None:
                break
    witness = {"alphabet": [list(k) for k in alphabet], "words_tried": tried}
    if found is None:
        logger.info(f"No noncompactness witness up to length {max_word_length}")
        witness["reason"] = "no witness within the word budget"
        status = STATUS_INCONCLUSIVE
    else:
        word, methods = found
        witness.update({"word": _word_json(word), "length": len(word), "certified": methods})
        status = STATUS_PASS
    return Certificate(
        check=CHECK_NONCOMPACTNESS,
        params=params,
        status=status,
        witness=witness,
        seed=seed,
        runtime_ms=clock["runtime_ms"],
    )
