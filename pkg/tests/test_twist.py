import pytest

from dihedral_monodromy.curve import (
    IDENTITY,
    REFLECTION,
    ROTATION,
    canonical_loop,
    fixed_vector,
    loop_monodromy,
    preset_passing,
)
from dihedral_monodromy.exactmath import CycMatrix, CycScalar
from dihedral_monodromy.homology import TwistedCycle, build_basis
from dihedral_monodromy.modular import ModularField
from dihedral_monodromy.reps import CharOrbit, all_orbits
from dihedral_monodromy.twist import (
    admissible_loops,
    admissible_nilpotents,
    apply_word,
    braid_certificate,
    braid_generators,
    dehn_twist_matrix,
    jordan_certificate,
    preserves_form,
    squared_twists,
    symplectic_certificate,
)


@pytest.fixture(scope="module")
def basis10(irr_config, u10):
    return build_basis(irr_config, u10)


@pytest.fixture(scope="module")
def twists10(basis10):
    return squared_twists(basis10)


@pytest.mark.parametrize("g", [2, 3, 6])
def test_braid_relations(g):
    cert = braid_certificate(g)
    assert cert.passed
    assert cert.witness["generators"] == 2 * g + 1
    assert cert.witness["dimension"] == 2 * g


def test_braid_generators_need_genus_two():
    with pytest.raises(ValueError):
        braid_generators(1)


def test_untwisted_twist_is_a_transvection():
    T = braid_generators(2)[0]
    N = T.nilpotent
    assert not N.is_zero()
    assert (N @ N).is_zero()
    assert N.rank() == 1


def test_square_of_twist(irr_config, u10, basis10):
    D = dehn_twist_matrix(irr_config, u10, basis10, 1, 2, 1)
    D2 = dehn_twist_matrix(irr_config, u10, basis10, 1, 2, 2)
    assert D.monodromy == IDENTITY
    assert D.matrix @ D.matrix == D2.matrix
    assert preserves_form(D.matrix, basis10.gram)


def test_rotation_loops_have_no_twist(irr_config, u10, basis10):
    assert loop_monodromy(irr_config, u10, 2, 4).kind == ROTATION
    with pytest.raises(ValueError):
        dehn_twist_matrix(irr_config, u10, basis10, 2, 4, 2)
    assert (2, 4) not in admissible_loops(basis10)


def test_reflection_loops_only_have_squares(irr_config, u10, basis10):
    assert loop_monodromy(irr_config, u10, 2, 11).kind == REFLECTION
    with pytest.raises(ValueError):
        dehn_twist_matrix(irr_config, u10, basis10, 2, 11, 1)
    op = dehn_twist_matrix(irr_config, u10, basis10, 2, 11, 2)
    assert op.monodromy == REFLECTION
    assert op.key == "(2,11,2,1,0)"


def test_other_powers_and_bases_are_rejected(irr_config, u10, basis10):
    with pytest.raises(ValueError):
        dehn_twist_matrix(irr_config, u10, basis10, 1, 2, 3)
    with pytest.raises(ValueError):
        dehn_twist_matrix(irr_config, CharOrbit.of(3, 0, 1), basis10, 1, 2, 2)


def test_jordan_structure(basis10, twists10):
    cert = jordan_certificate(basis10, twists10)
    assert cert.passed
    assert cert.witness["ranks"]["1,2"] == 2
    assert cert.witness["ranks"]["2,11"] == 1
    assert cert.witness["reflection_loops"] > 0


def test_twists_are_symplectic(basis10, twists10):
    cert = symplectic_certificate(basis10, twists10)
    assert cert.passed
    assert cert.witness["operators"] == len(admissible_loops(basis10))


def test_nilpotents_match_twists(basis10, twists10):
    nilpotents = admissible_nilpotents(basis10)
    assert set(nilpotents) == set(twists10)
    eye = CycMatrix.identity(3, basis10.size)
    assert nilpotents[(1, 2)] == twists10[(1, 2)].matrix - eye


def test_apply_word(basis10, twists10):
    D = twists10[(1, 2)]
    one, zero = CycScalar.one(3), CycScalar.zero(3)
    x = [one] + [zero] * (basis10.size - 1)
    assert apply_word([D, D], x) == (D.matrix @ D.matrix).apply(x)
    assert apply_word([], x) == x
    with pytest.raises(ValueError):
        apply_word([D], x[:-1])


@pytest.mark.parametrize(
    "first, second",
    [((1, 2), (3, 4)), ((1, 2), (5, 6)), ((3, 4), (5, 6)), ((1, 2), (12, 13)), ((2, 11), (12, 13))],
)
def test_disjoint_squared_twists_commute(twists10, first, second):
    D, E = twists10[first].matrix, twists10[second].matrix
    assert D @ E == E @ D


@pytest.mark.parametrize("loop, rank", [((1, 2), 2), ((2, 11), 1)])
def test_twist_image_lies_in_the_loop_cycles(irr_config, u10, basis10, twists10, loop, rank):
    i, j = loop
    L = canonical_loop(irr_config.g, i, j)
    columns = [
        basis10.coordinates(TwistedCycle.single(v, L))
        for v in fixed_vector(loop_monodromy(irr_config, u10, i, j)).vectors
    ]
    F = CycMatrix.from_rows(3, [list(row) for row in zip(*columns)])
    A = twists10[loop].nilpotent
    assert A.rank() == rank
    assert F.rank() == rank
    assert A.hstack(F).rank() == rank


def test_jordan_moves_to_the_next_prime(monkeypatch, basis10, twists10):
    class UnluckyField(ModularField):
        def reduce_matrix(self, M):
            raise ZeroDivisionError(f"Denominator vanishes mod {self.p}")

    monkeypatch.setattr("dihedral_monodromy.twist.ModularField", UnluckyField)
    cert = jordan_certificate(basis10, twists10)
    assert cert.passed
    assert cert.witness["prime"] > ModularField(3).p


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 5])
def test_jordan_and_symplectic_for_every_orbit(n):
    config = preset_passing(6, n, "irr")
    for u in all_orbits(n):
        basis = build_basis(config, u)
        twists = squared_twists(basis)
        assert jordan_certificate(basis, twists).passed, u
        assert symplectic_certificate(basis, twists).passed, u
