import pytest

from dihedral_monodromy.exactmath import CycMatrix, CycScalar
from dihedral_monodromy.heisenberg import (
    DihedralElement,
    all_elements,
    random_element,
    sigma,
)
from dihedral_monodromy.reps import (
    CharOrbit,
    ad_regular_decomposition,
    all_orbits,
    character_eigenvector,
    character_line,
    commutant_dimension,
    dihedral_schrodinger_matrix,
    dihedral_schrodinger_representation,
    heisenberg_comparison_certificate,
    heisenberg_restriction,
    invariant_forms,
    nontrivial_orbits,
    p_matrix,
    r_matrix,
    schrodinger_matrix,
    schrodinger_representation,
    simultaneous_conjugacy,
    w_u_matrices,
    w_u_matrix,
)


def test_orbits_are_canonical():
    assert CharOrbit.of(3, 2, 0) == CharOrbit.of(3, 1, 0)
    assert CharOrbit.of(3, 2, 1).canonical == (1, 2)
    assert [u.canonical for u in all_orbits(3)] == [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)]
    assert len(all_orbits(5)) == 13
    assert len(nontrivial_orbits(7)) == 24
    assert CharOrbit.of(5, 0, 0).is_trivial


def test_translation_is_cyclic_shift():
    n = 5
    M = schrodinger_matrix(DihedralElement.of(n, 1, 0, 1, 0).h)
    for j in range(n):
        column = M.col(j)
        assert column[(j - 1) % n] == CycScalar.one(n)
        assert sum(1 for a in column if not a.is_zero()) == 1


@pytest.mark.parametrize("n", [3, 5])
def test_schrodinger_is_a_homomorphism(n, rng):
    for _ in range(100):
        x, y = random_element(n, rng), random_element(n, rng)
        assert dihedral_schrodinger_matrix(x * y) == (
            dihedral_schrodinger_matrix(x) @ dihedral_schrodinger_matrix(y)
        )
        if x.eps == 1 and y.eps == 1:
            product = schrodinger_matrix(x.h) @ schrodinger_matrix(y.h)
            assert schrodinger_matrix(x.h * y.h) == product


def test_central_character_is_tautological():
    n = 3
    M = schrodinger_matrix(DihedralElement.of(n, 1, 1, 0, 0).h)
    assert M == CycMatrix.identity(n, n).scale(CycScalar.zeta_power(n, 1))


def test_matrix_of_agrees_with_closed_form():
    n = 3
    rep = dihedral_schrodinger_representation(n)
    for x in all_elements(n):
        assert rep.matrix_of(x) == dihedral_schrodinger_matrix(x)


@pytest.mark.parametrize("n", [3, 5])
def test_schrodinger_is_irreducible(n):
    assert commutant_dimension(schrodinger_representation(n)) == 1
    assert commutant_dimension(dihedral_schrodinger_representation(n)) == 1


@pytest.mark.slow
def test_schrodinger_is_irreducible_n7():
    assert commutant_dimension(schrodinger_representation(7)) == 1


def test_w_u_closed_form():
    n = 3
    u = CharOrbit.of(n, 1, 0)
    W = w_u_matrices(u)
    assert W.generators["a"] == p_matrix(n, 1)
    assert W.generators["alpha"] == CycMatrix.identity(n, 2)
    assert W.generators["sigma"] == r_matrix(n)
    assert w_u_matrix(u, sigma(n)) == r_matrix(n)


def test_w_u_is_a_representation(rng):
    n = 5
    u = CharOrbit.of(n, 2, 3)
    W = w_u_matrices(u)
    for _ in range(100):
        x, y = random_element(n, rng), random_element(n, rng)
        assert w_u_matrix(u, x * y) == w_u_matrix(u, x) @ w_u_matrix(u, y)
        assert W.matrix_of(x) == w_u_matrix(u, x)


def test_p_has_odd_order_and_is_never_minus_identity():
    n = 5
    minus_identity = CycMatrix.identity(n, 2).scale(-1)
    for k in range(n):
        assert p_matrix(n, k) ** n == CycMatrix.identity(n, 2)
        assert p_matrix(n, k) != minus_identity


def test_trivial_orbit_has_no_w_u():
    with pytest.raises(ValueError):
        w_u_matrices(CharOrbit.of(3, 0, 0))


def test_w_u_isomorphism_classes():
    n = 3
    orbits = nontrivial_orbits(n)
    for u in orbits:
        for v in orbits:
            iso, X = simultaneous_conjugacy(w_u_matrices(u), w_u_matrices(v))
            assert iso == (u == v)
            if iso:
                assert X.rank() == 2
    # (b, c) and (-b, -c) give isomorphic representations
    opposite = w_u_matrices(CharOrbit(3, 2, 0))
    iso, _ = simultaneous_conjugacy(opposite, w_u_matrices(CharOrbit(3, 1, 0)))
    assert iso


def test_character_eigenvectors():
    n = 5
    rep = schrodinger_representation(n)
    A, Al = rep.generators["a"], rep.generators["alpha"]
    for s in range(n):
        for x in range(n):
            E = character_eigenvector(n, s, x)
            assert A @ E @ A.inverse() == E.scale(CycScalar.zeta_power(n, s))
            assert Al @ E @ Al.inverse() == E.scale(CycScalar.zeta_power(n, x))


@pytest.mark.parametrize("n", [3, 5])
def test_ad_is_the_regular_representation(n):
    cert = ad_regular_decomposition(n)
    assert cert.passed
    assert cert.witness["total_dimension"] == n * n
    assert set(cert.witness["multiplicities"].values()) == {1}
    assert all(cert.witness["orbit_isomorphic_to_w_u"].values())


@pytest.mark.slow
def test_ad_is_the_regular_representation_n7():
    assert ad_regular_decomposition(7).passed


@pytest.mark.parametrize("n", [3, 5, 7])
def test_plain_heisenberg_restriction_splits(n):
    for u in nontrivial_orbits(n):
        cert = heisenberg_comparison_certificate(u)
        assert cert.passed, u
        assert cert.witness["dihedral_commutant"] == 1
        assert cert.witness["heisenberg_commutant"] == 2
        assert cert.witness["dihedral_invariant_forms"] == 1
        assert cert.witness["heisenberg_invariant_forms"] == 2


def test_character_lines_are_isotropic_and_dual():
    n = 5
    u = CharOrbit.of(n, 1, 2)
    plain = heisenberg_restriction(u)
    assert set(plain.generators) == {"a", "alpha"}
    plus = character_line(plain, 1, 2)
    minus = character_line(plain, -1, -2)
    assert plain.generators["a"] @ plus == plus.scale(CycScalar.zeta_power(n, 1))
    assert plain.generators["alpha"] @ minus == minus.scale(CycScalar.zeta_power(n, -2))
    assert character_line(plain, 1, 1) is None

    (Q,) = invariant_forms(w_u_matrices(u))
    assert Q.T == Q
    assert (plus.T @ Q @ plus).is_zero()
    assert (minus.T @ Q @ minus).is_zero()
    assert not (plus.T @ Q @ minus).is_zero()


def test_trivial_orbit_has_no_comparison():
    with pytest.raises(ValueError):
        heisenberg_comparison_certificate(CharOrbit.of(3, 0, 0))
