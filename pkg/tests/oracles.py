"""Brute-force oracles, deliberately independent of the library's algorithms.

Nothing here calls Smith/Hermite forms or the model builders; the checks use
Leibniz determinants, modular enumeration, Fraction elimination and direct
multilinear expansion.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import reduce
from math import gcd


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
            if not prod:
                break
        total += -prod if inversions % 2 else prod
    return total


def minors(a, k):
    rows, cols = len(a), len(a[0]) if a else 0
    for ri in itertools.combinations(range(rows), k):
        for ci in itertools.combinations(range(cols), k):
            yield leibniz_det([[a[i][j] for j in ci] for i in ri])


def determinantal_divisors(a):
    """d_k = gcd of all k x k minors, for k = 1 .. min(shape); stops at the first zero."""
    out = []
    for k in range(1, min(len(a), len(a[0]) if a else 0) + 1):
        d = reduce(gcd, (abs(x) for x in minors(a, k)), 0)
        if d == 0:
            break
        out.append(d)
    return out


def invariant_factors_by_minors(a):
    ds = determinantal_divisors(a)
    return [ds[0]] + [ds[i] // ds[i - 1] for i in range(1, len(ds))] if ds else []


def prime_factors(n):
    n, p, out = abs(n), 2, set()
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return sorted(out)


def cokernel_oracle(a):
    """(injective, primitive) for a: Z^n -> Z^m by enumeration modulo primes.

    Injective iff some n x n minor is nonzero.  For injective a, the cokernel
    has an element of order p iff some y in (Z/p)^n, y != 0, has a y = 0 mod p;
    only primes dividing a nonzero maximal minor can occur.
    """
    m = len(a)
    n = len(a[0]) if a else 0
    if n == 0:
        return True, True
    if n > m:
        return False, False
    nonzero = [x for x in minors(a, n) if x]
    if not nonzero:
        return False, False
    delta = min(nonzero, key=abs)
    for p in prime_factors(delta):
        for y in itertools.product(range(p), repeat=n):
            if any(y) and all(sum(a[i][j] * y[j] for j in range(n)) % p == 0 for i in range(m)):
                return True, False
    return True, True


def rational_solve(columns, v):
    """Unique rational c with sum c_j columns_j = v, or None; columns must be independent."""
    if not columns:
        return [] if not any(v) else None
    m, n = len(v), len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(m)]
    row = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(row, m) if aug[i][c] != 0), None)
        if piv is None:
            raise ValueError("columns are dependent")
        aug[row], aug[piv] = aug[piv], aug[row]
        p = aug[row][c]
        aug[row] = [x / p for x in aug[row]]
        for i in range(m):
            if i != row and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(c)
        row += 1
    if any(aug[i][n] != 0 for i in range(row, m)):
        return None
    return [aug[i][n] for i in range(n)]


def in_integer_span(columns, v):
    c = rational_solve(columns, v)
    return c is not None and all(x.denominator == 1 for x in c)


# --- blow-up expansion ---------------------------------------------------------

def _primitive_triple(x, y, z, h3):
    # basis symbols: "fh" for f*h, integers i >= 1 for the exceptional planes e_i
    syms = (x, y, z)
    if all(s == "fh" for s in syms):
        return Fraction(h3)
    if "fh" in syms:
        return Fraction(0)  # f*h . e_i = 0
    if x == y == z:
        return Fraction(4)
    return Fraction(0)  # e_i . e_j = 0 for i != j


def expand_triple(u, v, w, h3):
    """Triple product of classes given as {symbol: coefficient} in the (f*h, e_i) presentation."""
    return sum((Fraction(a) * Fraction(b) * Fraction(c) * _primitive_triple(x, y, z, h3)
                for x, a in u.items() for y, b in v.items() for z, c in w.items()), Fraction(0))


def blowup_basis_in_primitives(n):
    """B0 = f*h - 1/2 sum e_i, then e_1..e_N."""
    b0 = {"fh": Fraction(1), **{i: Fraction(-1, 2) for i in range(1, n + 1)}}
    return [b0] + [{i: Fraction(1)} for i in range(1, n + 1)]
