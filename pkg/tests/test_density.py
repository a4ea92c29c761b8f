from fractions import Fraction

import pytest

from dihedral_monodromy.constants import DEFAULT_SEED
from dihedral_monodromy.curve import ROTATION, loop_monodromy, preset_passing
from dihedral_monodromy.density import (
    bracket,
    build_factor,
    certify_off_unit_circle,
    closure_certificate,
    component_separation,
    factor_closure,
    irreducibility_certificate,
    is_symplectic_element,
    killing_form,
    killing_rank,
    lie_closure,
    lie_closure_certificate,
    no_characters_proxy,
    noncompactness_search,
    open_orbit_certificate,
    search_alphabet,
    separation_triple,
    sp_dimension,
    starting_cycle,
    word_matrix,
)
from dihedral_monodromy.exactmath import CycMatrix, CycScalar
from dihedral_monodromy.reps import CharOrbit, all_orbits, nontrivial_orbits

N = 3


def sl2():
    gram = CycMatrix.from_rows(N, [[0, 1], [-1, 0]])
    E = CycMatrix.from_rows(N, [[0, 1], [0, 0]])
    F = CycMatrix.from_rows(N, [[0, 0], [1, 0]])
    return gram, E, F


@pytest.fixture(scope="module")
def factors(irr_config, u10, u01):
    return {u10: build_factor(irr_config, u10), u01: build_factor(irr_config, u01)}


@pytest.fixture(scope="module")
def all_factors(irr_config, factors):
    out = dict(factors)
    for u in all_orbits(N):
        if u not in out:
            out[u] = build_factor(irr_config, u)
    return out


def test_sp_dimension():
    assert [sp_dimension(d) for d in (2, 4, 12, 20)] == [3, 10, 78, 210]


@pytest.mark.parametrize("engine", ["modular", "exact"])
def test_sl2_closure(engine):
    gram, E, F = sl2()
    closure = lie_closure([E, F], gram, engine=engine, labels=["E", "F"])
    assert closure.dim == 3
    assert closure.is_full_sp
    assert closure.word_label(2) == "[E, F]"
    assert closure.contains(bracket(E, F))
    assert closure.is_bracket_closed()
    assert killing_rank(closure) == 3
    assert no_characters_proxy(closure).passed
    assert lie_closure_certificate(closure).passed


def test_exact_killing_form_of_sl2():
    gram, E, F = sl2()
    K = killing_form(lie_closure([E, F], gram, engine="exact"))
    assert isinstance(K, CycMatrix)
    assert K.shape == (3, 3)
    assert K.T == K
    assert not K.determinant().is_zero()


def test_single_nilpotent_is_abelian():
    gram, E, _ = sl2()
    closure = lie_closure([E, E.scale(2)], gram)
    assert closure.dim == 1
    assert closure.generated_from == ["X0"]
    cert = no_characters_proxy(closure)
    assert cert.failed
    assert cert.witness["killing_rank"] == 0
    assert lie_closure_certificate(closure).status == "INCONCLUSIVE"


def test_closure_is_monotone():
    gram, E, F = sl2()
    small = lie_closure([E], gram)
    big = lie_closure([E, F], gram)
    assert small.dim <= big.dim
    assert big.contains(E)
    assert not small.contains(F)


def test_lie_closure_rejects_bad_input():
    gram, E, F = sl2()
    with pytest.raises(ValueError):
        lie_closure([], gram)
    with pytest.raises(ValueError):
        lie_closure([CycMatrix.identity(N, 2)], gram)
    with pytest.raises(ValueError):
        lie_closure([E], gram, labels=["E", "F"])
    with pytest.raises(ValueError):
        lie_closure([E], gram, engine="float")


def test_factor_nilpotents_are_symplectic(factors, u10):
    factor = factors[u10]
    assert factor.dim == 20
    assert factor.label == "1,0"
    for A in list(factor.nilpotents.values())[:10]:
        assert is_symplectic_element(A, factor.gram)
    with pytest.raises(ValueError):
        factor.nilpotent(2, 4)
    _, labels = factor.generators()
    assert labels[0] == "A(1,2)"


def test_factor_closure_is_full(factors, u10):
    closure = factor_closure(factors[u10])
    assert closure.dim == 210
    assert closure.is_full_sp
    assert closure.prime % N == 1


def test_closure_certificate(irr_config, factors, u01):
    cert = closure_certificate(irr_config, u01, factor=factors[u01])
    assert cert.passed
    assert cert.witness["dim"] == 210
    assert cert.params["orbit"] == [0, 1]


def test_separation_triples(factors, u10, u01):
    one, four = CycScalar.rational(N, 1), CycScalar.rational(N, 4)
    first = separation_triple(factors[u10])
    second = separation_triple(factors[u01])
    assert [e["normalised"] for e in first] == [one, four, one]
    assert [e["normalised"] for e in second] == [four, one, one]
    for e in first + second:
        assert e["normalised"] == e["formula"]
        assert e["trace"] == e["normalised"] * 4
    assert [e["pair"] for e in first] == [(11, 7), (11, 9), (9, 7)]


def test_component_separation(irr_config, factors, u10, u01):
    cert = component_separation(irr_config, u10, u01, factors)
    assert cert.passed
    assert cert.witness["separated"]
    assert cert.witness["trace_divisor"] == 4
    assert all(e["matches"] for e in cert.witness["first"])
    same = component_separation(irr_config, u10, u10, factors)
    assert same.passed
    assert not same.witness["separated"]


def test_separation_needs_a_nontrivial_orbit(irr_config, factors, u10):
    trivial = CharOrbit.of(N, 0, 0)
    local = dict(factors)
    local[trivial] = build_factor(irr_config, trivial)
    with pytest.raises(ValueError):
        separation_triple(local[trivial])
    cert = component_separation(irr_config, u10, trivial, local)
    assert cert.status == "INCONCLUSIVE"


def test_irreducibility_from_the_start_cycle(irr_config, factors, u10):
    assert starting_cycle(factors[u10]).terms[0][1].key == (2, 11)
    cert = irreducibility_certificate(irr_config, u10, factor=factors[u10])
    assert cert.passed
    assert cert.witness["rank"] == 20
    assert cert.witness["words"][0] == {"parent": None, "loop": None}
    assert cert.seed is None


def test_irreducibility_skips_rotation_start_loops(span_config, u10):
    assert loop_monodromy(span_config, u10, 2, 11).kind == ROTATION
    factor = build_factor(span_config, u10)
    start = starting_cycle(factor)
    assert start.terms[0][1].key != (2, 11)
    assert loop_monodromy(span_config, u10, *start.terms[0][1].key).kind != ROTATION
    cert = irreducibility_certificate(span_config, u10, factor=factor)
    assert cert.passed
    assert cert.witness["rank"] == 20


def test_irreducibility_from_a_random_start(irr_config, factors, u01):
    cert = irreducibility_certificate(irr_config, u01, factor=factors[u01], random_start=True)
    assert cert.passed
    assert cert.seed == DEFAULT_SEED
    assert cert.witness["start"] == "random"


def test_single_operator_is_not_enough(irr_config, factors, u10):
    cert = irreducibility_certificate(irr_config, u10, factor=factors[u10], loops=[(1, 2)])
    assert cert.failed
    assert cert.witness["rank"] <= 2


def test_certify_off_unit_circle():
    assert certify_off_unit_circle(CycMatrix.identity(N, 2)) is None
    assert certify_off_unit_circle(CycMatrix.from_rows(N, [[1, 1], [0, 1]])) is None
    rotation = CycMatrix.from_rows(
        N, [[CycScalar.zeta_power(N, 1), 0], [0, CycScalar.zeta_power(N, 2)]]
    )
    assert certify_off_unit_circle(rotation) is None
    hyperbolic = CycMatrix.from_rows(N, [[2, 0], [0, Fraction(1, 2)]])
    assert certify_off_unit_circle(hyperbolic) == "interval"
    assert certify_off_unit_circle(CycMatrix.from_rows(N, [[2, 1], [1, 1]])) is not None


def test_search_alphabet(irr_config, factors, u10):
    alphabet = search_alphabet(irr_config, {u10: factors[u10]})
    assert (1, 2) in alphabet
    assert (2, 11) in alphabet
    assert (2, 4) not in alphabet


def test_word_matrix(factors, u10):
    factor = factors[u10]
    D = factor.twists[(1, 2)].matrix
    assert word_matrix(factor, [((1, 2), 1)]) == D
    assert word_matrix(factor, [((1, 2), 1), ((1, 2), -1)]) == CycMatrix.identity(N, 20)
    assert word_matrix(factor, []) == CycMatrix.identity(N, 20)


def test_noncompactness_search_disabled(irr_config):
    cert = noncompactness_search(irr_config, 0)
    assert cert.status == "INCONCLUSIVE"
    assert cert.witness["words_tried"] == 0


@pytest.mark.slow
def test_noncompactness_search_is_deterministic(irr_config, factors, u10):
    local = {u10: factors[u10]}
    first = noncompactness_search(irr_config, 3, seed=3, factors=local)
    second = noncompactness_search(irr_config, 3, seed=3, factors=local)
    assert first == second
    assert first.status in ("PASS", "INCONCLUSIVE")
    if first.passed:
        assert first.witness["length"] <= 3


@pytest.mark.slow
@pytest.mark.parametrize("n, orbits", [(5, [(1, 0), (2, 1)]), (7, [(1, 0), (2, 3), (3, 3)])])
def test_trace_formula_beyond_n3(n, orbits):
    config = preset_passing(6, n, "irr")
    for orbit in orbits:
        for e in separation_triple(build_factor(config, CharOrbit.of(n, *orbit))):
            assert e["normalised"] == e["formula"]
            assert e["trace"] == e["normalised"] * 4


@pytest.mark.slow
def test_trivial_factor_closure(all_factors):
    closure = factor_closure(all_factors[CharOrbit.of(N, 0, 0)])
    assert closure.dim == 78
    assert no_characters_proxy(closure).passed


@pytest.mark.slow
def test_killing_form_of_a_full_factor(factors, u10):
    assert no_characters_proxy(factor_closure(factors[u10])).passed


@pytest.mark.slow
def test_open_orbit(irr_config, all_factors):
    closures = {}
    cert = open_orbit_certificate(irr_config, factors=all_factors, closures=closures)
    assert cert.passed
    assert cert.witness["rank"] == 92
    assert cert.witness["separated"]
    assert [f["closure_dim"] for f in cert.witness["factors"]] == [78, 210, 210, 210, 210]

    zeroed = open_orbit_certificate(
        irr_config, factors=all_factors, closures=closures, zero_factor=CharOrbit.of(N, 1, 0)
    )
    assert zeroed.failed
    assert zeroed.witness["deficit"] == 20


@pytest.mark.slow
def test_repeated_factor_has_no_open_orbit(irr_config, factors, u10):
    cert = open_orbit_certificate(irr_config, orbits=[u10, u10], factors=dict(factors))
    assert cert.failed
    assert cert.witness["deficit"] >= 1


@pytest.mark.slow
@pytest.mark.parametrize("preset", ["span", "span-bc-equal"])
def test_irreducibility_for_every_orbit_of_the_span_presets(preset):
    config = preset_passing(6, N, preset)
    orbits = all_orbits(N)
    if preset == "span-bc-equal":
        orbits = [u for u in orbits if u.b == u.c]
    for u in orbits:
        cert = irreducibility_certificate(config, u)
        assert cert.passed, u


@pytest.mark.slow
def test_separation_is_exhaustive_for_n3(irr_config, all_factors):
    orbits = nontrivial_orbits(N)
    for k, u in enumerate(orbits):
        for v in orbits[k + 1 :]:
            cert = component_separation(irr_config, u, v, all_factors)
            assert cert.passed, (u, v)
            assert cert.witness["separated"], (u, v)


@pytest.mark.slow
def test_separation_is_exhaustive_for_n5():
    config = preset_passing(6, 5, "irr")
    orbits = nontrivial_orbits(5)
    factors = {u: build_factor(config, u) for u in orbits}
    for k, u in enumerate(orbits):
        for v in orbits[k + 1 :]:
            assert component_separation(config, u, v, factors).witness["separated"], (u, v)
