import pytest

from dihedral_monodromy.curve import all_loops, canonical_loop, local_system, preset_passing
from dihedral_monodromy.exactmath import CycScalar
from dihedral_monodromy.homology import (
    TwistedCycle,
    basis_from_cycles,
    build_basis,
    candidate_cycles,
    cycle_span_rank,
    dimension_certificate,
    dimension_oracle,
    expected_h1,
    intersection_pairing,
    loop_intersection_signs,
    span_certificate,
    standard_chain_basis,
)
from dihedral_monodromy.reps import CharOrbit, all_orbits


def test_expected_dimensions():
    assert expected_h1(6, CharOrbit.of(3, 1, 0)) == 20
    assert expected_h1(6, CharOrbit.of(3, 0, 0)) == 12
    assert expected_h1(7, CharOrbit.of(5, 2, 1)) == 24


def test_intersection_signs_are_antisymmetric():
    loops = all_loops(6)
    for L in loops:
        for K in loops:
            up, down = loop_intersection_signs(L, K)
            assert loop_intersection_signs(K, L) == (-up, -down)


def test_intersection_sign_cases():
    L = canonical_loop
    assert loop_intersection_signs(L(6, 1, 2), L(6, 2, 3)) == (-1, 0)
    assert loop_intersection_signs(L(6, 1, 3), L(6, 2, 4)) == (-1, -1)
    assert loop_intersection_signs(L(6, 1, 4), L(6, 2, 3)) == (0, 0)
    assert loop_intersection_signs(L(6, 1, 2), L(6, 3, 4)) == (0, 0)


def test_candidates_are_cycles(irr_config, u10):
    ls = local_system(irr_config, u10)
    candidates = candidate_cycles(ls)
    assert candidates
    assert all(c.is_cycle(ls) for c in candidates)


def test_pairing_is_antisymmetric(irr_config, u10):
    ls = local_system(irr_config, u10)
    candidates = candidate_cycles(ls)[:25]
    for x in candidates:
        for y in candidates:
            assert intersection_pairing(x, y, ls) == -intersection_pairing(y, x, ls)


@pytest.mark.parametrize("orbit, h1", [((1, 0), 20), ((1, 2), 20), ((0, 0), 12)])
def test_dimension_oracle(irr_config, orbit, h1):
    u = CharOrbit.of(3, *orbit)
    h0, got = dimension_oracle(irr_config, u)
    assert got == h1
    assert h0 == (1 if u.is_trivial else 0)


def test_build_basis(irr_config, u10):
    basis = build_basis(irr_config, u10)
    assert basis.size == 20
    assert basis.gram.T == basis.gram.scale(-1)
    assert not basis.gram.determinant().is_zero()


def test_coordinates_of_basis_cycles(irr_config):
    basis = build_basis(irr_config, CharOrbit.of(3, 0, 0))
    assert basis.size == 12
    one, zero = CycScalar.one(3), CycScalar.zero(3)
    for k in (0, 5, 11):
        expected = [one if m == k else zero for m in range(basis.size)]
        assert basis.coordinates(basis.basis[k]) == expected


@pytest.mark.parametrize("orbit", [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2)])
def test_candidates_span_for_irr(irr_config, orbit):
    cert = span_certificate(irr_config, CharOrbit.of(3, *orbit))
    assert cert.passed
    assert cert.witness["rank"] == cert.witness["oracle_h1"]


def test_candidates_span_for_span_preset(span_config, u01):
    assert span_certificate(span_config, u01).passed
    assert cycle_span_rank(
        local_system(span_config, u01), candidate_cycles(local_system(span_config, u01))
    ) == 20


def test_candidates_span_when_b_equals_c():
    config = preset_passing(6, 3, "span-bc-equal")
    cert = span_certificate(config, CharOrbit.of(3, 1, 1))
    assert cert.passed
    assert cert.witness["rank"] == 20


def test_dimension_certificate(irr_config, u10):
    cert = dimension_certificate(irr_config, u10)
    assert cert.passed
    assert cert.witness["oracle"]["h1"] == 20


def test_standard_chain_basis(irr_config):
    basis = standard_chain_basis(irr_config)
    assert basis.size == 12
    assert basis.gram[0, 1] == -CycScalar.one(3)
    assert basis.gram[1, 0] == CycScalar.one(3)


def test_non_cycle_is_rejected(irr_config, u10):
    ls = local_system(irr_config, u10)
    one, zero = CycScalar.one(3), CycScalar.zero(3)
    # L_(2,11) has monodromy R, which moves (1, 0)
    chain = TwistedCycle.single((one, zero), canonical_loop(6, 2, 11))
    assert not chain.is_cycle(ls)
    with pytest.raises(ValueError):
        basis_from_cycles(ls, [chain])


def random_scalar(rng, n):
    return CycScalar.from_coeffs(n, [int(v) for v in rng.integers(-3, 4, size=n - 1)])


def test_pairing_is_bilinear(irr_config, u10, rng):
    ls = local_system(irr_config, u10)
    candidates = candidate_cycles(ls)
    for _ in range(30):
        x, y, w = (candidates[int(k)] for k in rng.integers(0, len(candidates), size=3))
        s, t = random_scalar(rng, 3), random_scalar(rng, 3)
        combined = x.scale(s) + y.scale(t)
        assert intersection_pairing(combined, w, ls) == (
            intersection_pairing(x, w, ls) * s + intersection_pairing(y, w, ls) * t
        )
        assert intersection_pairing(w, combined, ls) == (
            intersection_pairing(w, x, ls) * s + intersection_pairing(w, y, ls) * t
        )


@pytest.mark.parametrize(
    "g, n, orbit, h1",
    [(7, 3, (1, 0), 24), (7, 3, (0, 0), 14), (6, 5, (1, 2), 20), (7, 5, (2, 1), 24)],
)
def test_candidates_span_beyond_the_smallest_case(g, n, orbit, h1):
    config = preset_passing(g, n, "irr")
    u = CharOrbit.of(n, *orbit)
    cert = span_certificate(config, u)
    assert cert.passed
    assert cert.witness["rank"] == h1
    assert build_basis(config, u).size == h1


@pytest.mark.slow
@pytest.mark.parametrize("g, n", [(6, 5), (7, 3), (7, 5)])
def test_candidates_span_for_every_orbit(g, n):
    config = preset_passing(g, n, "irr")
    for u in all_orbits(n):
        cert = span_certificate(config, u)
        assert cert.passed, u
        assert cert.witness["rank"] == expected_h1(g, u)
