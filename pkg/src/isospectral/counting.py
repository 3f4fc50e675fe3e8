"""Exact integer counting: Stirling numbers, ordered Bell numbers, tangent numbers.

Everything here is pure ``int`` arithmetic.  Three independent routes lead to
the Euler characteristics of the sign-glued complexes:

* the alternating face count ``sum_q (-2)^(d-q) q! S(d, q)``;
* ``-A_d(-1)`` for the Eulerian polynomial ``A_d``, built from the Eulerian
  number recurrence;
* ``d! [x^d] tanh x`` from the tangent numbers (boustrophedon table).
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, ``S(n, k) = k S(n-1, k) + S(n-1, k-1)``."""
    if n < 0 or k < 0:
        raise ValueError("arguments must be nonnegative")
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def ordered_bell(d: int) -> int:
    """Number of ordered partitions of a d-element set."""
    return sum(factorial(q) * stirling2(d, q) for q in range(0, d + 1))


def permutahedron_face_count(d: int, n: int) -> int:
    """Number of n-dimensional faces of the d-permutahedron: ``(d-n)! S(d, d-n)``."""
    if d < 1:
        raise ValueError("d must be positive")
    if not 0 <= n <= d - 1:
        raise ValueError(f"face dimension must be in 0..{d - 1}, got {n}")
    return factorial(d - n) * stirling2(d, d - n)


def complex_face_count(d: int, n: int) -> int:
    """Number of n-faces of the sign-glued complex: ``2^n`` copies of each."""
    return 2 ** n * permutahedron_face_count(d, n)


def euler_characteristic(d: int) -> int:
    """``sum_{q=1}^{d} (-2)^(d-q) q! S(d, q)``."""
    if d < 1:
        raise ValueError("d must be positive")
    return sum((-2) ** (d - q) * factorial(q) * stirling2(d, q) for q in range(1, d + 1))


@lru_cache(maxsize=None)
def eulerian_numbers(d: int) -> tuple[int, ...]:
    """Coefficients ``A(d, 1..d)`` of the Eulerian polynomial ``A_d(u) = sum_k A(d,k) u^k``."""
    if d < 1:
        raise ValueError("d must be positive")
    row = [1]
    for n in range(2, d + 1):
        prev = [0] + row + [0]
        row = [k * prev[k] + (n - k + 1) * prev[k - 1] for k in range(1, n + 1)]
    return tuple(row)


def eulerian_polynomial(d: int, u: int) -> int:
    return sum(a * u ** k for k, a in enumerate(eulerian_numbers(d), start=1))


def zigzag_numbers(nmax: int) -> list[int]:
    """Euler zigzag numbers ``E_0..E_nmax`` (alternating permutations), boustrophedon table."""
    out = [1]
    row = [1]
    for n in range(1, nmax + 1):
        new = [0]
        for k in range(n):
            new.append(new[-1] + row[n - 1 - k])
        row = new
        out.append(row[-1])
    return out


def tangent_number(n: int) -> int:
    """``n! [x^n] tan x``: zero for even n, the zigzag number for odd n."""
    if n < 1:
        raise ValueError("n must be positive")
    return zigzag_numbers(n)[n] if n % 2 else 0


def tanh_coefficient_scaled(d: int) -> int:
    """``d! [x^d] tanh x``, exactly, via ``tanh x = -i tan(ix)``."""
    t = tangent_number(d)
    return t if d % 4 == 1 else -t if d % 4 == 3 else 0
