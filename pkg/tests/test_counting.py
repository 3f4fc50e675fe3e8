from math import factorial

import pytest
import sympy

from isospectral.counting import (
    complex_face_count,
    euler_characteristic,
    eulerian_numbers,
    eulerian_polynomial,
    ordered_bell,
    permutahedron_face_count,
    stirling2,
    tangent_number,
    tanh_coefficient_scaled,
    zigzag_numbers,
)


def tanh_oracle(dmax):
    x = sympy.symbols("x")
    series = sympy.series(sympy.tanh(x), x, 0, dmax + 1).removeO()
    return [sympy.Integer(factorial(d)) * series.coeff(x, d) for d in range(1, dmax + 1)]


def test_stirling_matches_sympy():
    from sympy.functions.combinatorial.numbers import stirling

    for n in range(0, 12):
        for k in range(0, n + 1):
            assert stirling2(n, k) == stirling(n, k, kind=2)


def test_ordered_bell():
    assert [ordered_bell(d) for d in range(0, 7)] == [1, 1, 3, 13, 75, 541, 4683]


def test_face_counts():
    assert [permutahedron_face_count(3, n) for n in range(3)] == [6, 6, 1]
    assert permutahedron_face_count(4, 1) == 36
    assert all(permutahedron_face_count(d, d - 1) == 1 for d in range(1, 12))
    assert [complex_face_count(3, n) for n in range(3)] == [6, 12, 4]
    with pytest.raises(ValueError):
        permutahedron_face_count(3, 3)


def test_euler_values():
    assert euler_characteristic(2) == 0
    assert euler_characteristic(3) == -2
    assert euler_characteristic(5) == 16
    assert euler_characteristic(7) == -272


def test_tanh_identity_through_d10():
    oracle = tanh_oracle(10)
    got = [euler_characteristic(d) for d in range(1, 11)]
    assert got == oracle == [1, 0, -2, 0, 16, 0, -272, 0, 7936, 0]
    assert [tanh_coefficient_scaled(d) for d in range(1, 11)] == got


def test_eulerian_route():
    assert eulerian_numbers(4) == (1, 11, 11, 1)
    assert all(sum(eulerian_numbers(d)) == factorial(d) for d in range(1, 9))
    for d in range(1, 16):
        assert euler_characteristic(d) == -eulerian_polynomial(d, -1)


def test_tangent_numbers():
    assert zigzag_numbers(9) == [1, 1, 1, 2, 5, 16, 61, 272, 1385, 7936]
    x = sympy.symbols("x")
    series = sympy.series(sympy.tan(x), x, 0, 14).removeO()
    for n in range(1, 14):
        assert tangent_number(n) == factorial(n) * series.coeff(x, n)


def test_large_d_is_exact():
    # integers beyond float precision stay exact
    assert tanh_coefficient_scaled(41) == euler_characteristic(41)
