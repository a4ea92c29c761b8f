import cmath
import pickle
from fractions import Fraction

import pytest

from dihedral_monodromy.exactmath import (
    CycMatrix,
    CycScalar,
    ExactEchelon,
    FieldMismatchError,
    charpoly,
    cyclotomic_field,
    cyclotomic_polynomial,
    determinant,
    field_degree,
    poly_degree,
    poly_gcd,
    rank_and_solve,
)


def z(n, k):
    return CycScalar.zeta_power(n, k)


def test_cyclotomic_degrees():
    assert [field_degree(n) for n in (3, 5, 7, 9, 15)] == [2, 4, 6, 6, 8]
    assert cyclotomic_polynomial(3).all_coeffs() == [1, 1, 1]


def test_zeta_powers_reduce():
    assert z(3, 3) == CycScalar.one(3)
    assert z(3, 2) == -CycScalar.one(3) - z(3, 1)
    assert z(3, -1) == z(3, 2)
    assert z(5, 7) == z(5, 2)


def test_sum_of_roots_of_unity_vanishes():
    for n in (3, 5, 7):
        total = CycScalar.zero(n)
        for k in range(n):
            total = total + z(n, k)
        assert total.is_zero()


def test_field_axioms_on_random_samples(rng):
    n = 5
    for _ in range(1000):
        a, b, c = (
            CycScalar.from_coeffs(n, [int(v) for v in rng.integers(-4, 5, size=4)])
            for _ in range(3)
        )
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if not a.is_zero():
            assert a * a.inverse() == CycScalar.one(n)
            assert (b / a) * a == b


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        CycScalar.zero(3).inverse()


def test_rational_helpers():
    half = CycScalar.rational(3, Fraction(1, 2))
    assert half.is_rational()
    assert half.rational_value() == Fraction(1, 2)
    assert (half * 2) == CycScalar.one(3)
    assert not z(3, 1).is_rational()
    with pytest.raises(ValueError):
        z(3, 1).rational_value()


def test_conjugation_is_complex_conjugation():
    a = CycScalar.from_coeffs(7, [1, 2, 0, -3, 0, 1])
    assert cmath.isclose(a.conj().to_complex(), a.to_complex().conjugate(), abs_tol=1e-9)
    assert a.conj().conj() == a
    assert z(3, 1).conj() == z(3, 2)


def test_to_complex_matches_exponential():
    assert cmath.isclose(z(5, 2).to_complex(), cmath.exp(4j * cmath.pi / 5), abs_tol=1e-12)


def test_json_round_trip_uses_fraction_strings():
    a = CycScalar.from_coeffs(3, [Fraction(1, 2), -3])
    assert a.to_json() == ["1/2", "-3/1"]
    assert CycScalar.from_json(3, a.to_json()) == a


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        z(3, 1) + z(5, 1)
    with pytest.raises(FieldMismatchError):
        CycMatrix.identity(3, 2) @ CycMatrix.identity(5, 2)


def test_matrix_arithmetic():
    n = 3
    P = CycMatrix.from_rows(n, [[z(n, 1), 0], [0, z(n, 2)]])
    R = CycMatrix.from_rows(n, [[0, 1], [1, 0]])
    assert P ** 3 == CycMatrix.identity(n, 2)
    assert R @ R == CycMatrix.identity(n, 2)
    assert R @ P @ R == P.inverse()
    assert P.trace() == -CycScalar.one(n)
    assert (P - P).is_zero()
    assert P.T == P
    assert P.conj() == P.inverse()
    assert P ** -1 == P ** 2


def test_rank_solve_and_kernel():
    n = 3
    M = CycMatrix.from_rows(n, [[1, z(n, 1), 0], [2, 2 * z(n, 1), 0], [0, 0, 1]])
    result = rank_and_solve(M)
    assert result.rank == 2
    assert result.kernel.shape == (3, 1)
    assert (M @ result.kernel).is_zero()

    rhs = CycMatrix.column(n, [1, 2, 5])
    solved = rank_and_solve(M, rhs)
    assert M @ solved.solution == rhs

    inconsistent = rank_and_solve(M, CycMatrix.column(n, [1, 0, 0]))
    assert inconsistent.solution is None


def test_determinant_and_inverse():
    n = 5
    M = CycMatrix.from_rows(n, [[z(n, 1), 1, 0], [0, 2, z(n, 3)], [1, 0, 1]])
    assert not determinant(M).is_zero()
    assert M @ M.inverse() == CycMatrix.identity(n, 3)
    singular = CycMatrix.from_rows(n, [[1, 2], [2, 4]])
    assert determinant(singular).is_zero()
    with pytest.raises(ZeroDivisionError):
        singular.inverse()


def test_charpoly_of_companion_like_matrices():
    n = 3
    P = CycMatrix.from_rows(n, [[z(n, 1), 0], [0, z(n, 2)]])
    # (x - zeta)(x - zeta^2) = x^2 + x + 1
    assert charpoly(P) == [CycScalar.one(n), CycScalar.one(n), CycScalar.one(n)]
    M = CycMatrix.from_rows(n, [[1, 2, 0], [0, 1, 3], [4, 0, 1]])
    chi = charpoly(M)
    assert chi[-1] == CycScalar.one(n)
    assert chi[0] == -determinant(M)
    assert chi[2] == -M.trace()


def test_poly_gcd():
    n = 3
    one = CycScalar.one(n)
    # (x - 1)(x - 2) and (x - 1)(x + 5)
    a = [one * 2, -one * 3, one]
    b = [-one * 5, one * 4, one]
    assert poly_gcd(a, b) == [-one, one]
    assert poly_degree(poly_gcd([one * 2, one], [one * 3, one])) == 0


def test_exact_echelon_insertion():
    n = 3
    ech = ExactEchelon(n, 3)
    v1 = [z(n, 1), CycScalar.one(n), CycScalar.zero(n)]
    v2 = [CycScalar.zero(n), CycScalar.one(n), CycScalar.one(n)]
    assert ech.insert(v1)
    assert ech.insert(v2)
    assert not ech.insert([a + b for a, b in zip(v1, v2)])
    assert ech.rank == 2
    assert ech.contains([a * 3 for a in v2])
    assert not ech.contains([CycScalar.zero(n), CycScalar.zero(n), CycScalar.one(n)])


def test_values_live_in_the_sympy_cyclotomic_field():
    n = 5
    a = z(n, 1) + CycScalar.rational(n, Fraction(2, 3))
    assert not a.value.is_ground
    assert (a - z(n, 1)).rational_value() == Fraction(2, 3)
    M = CycMatrix.from_rows(n, [[a, 1], [0, z(n, 2)]])
    assert M.dm.domain == cyclotomic_field(n)
    assert pickle.loads(pickle.dumps(a)) == a
    assert pickle.loads(pickle.dumps(M)) == M
