"""Independent brute-force oracles used as ground truth by the tests.

Nothing here imports library internals beyond the plain data types; expected
values asserted in the tests are computed by these routines (or were frozen
from their output), so the oracles must stay independent of the code paths
they check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def popcount(m: int) -> int:
    return bin(m).count("1")


def naive_mobius(values, n):
    """coeff[T] = sum over S subset of T of (-1)^(|T|-|S|) f(S); 3^n work."""
    coeffs = {}
    for t in range(1 << n):
        acc = Fraction(0)
        s = t
        while True:
            sign = -1 if (popcount(t) - popcount(s)) % 2 else 1
            acc += sign * values[s]
            if s == 0:
                break
            s = (s - 1) & t
        if acc:
            coeffs[t] = acc
    return coeffs


def eval_poly(terms, z: int) -> Fraction:
    """Direct definition: sum of coefficients over supports inside z."""
    total = Fraction(0)
    for m, c in terms.items():
        if m & ~z == 0:
            total += c
    return total


def flip_family(values, n: int, z: int):
    """All w in the complement of z with f(z | w) != f(z)."""
    comp = ((1 << n) - 1) & ~z
    base = values[z]
    out = []
    w = comp
    while True:
        if w and values[z | w] != base:
            out.append(w)
        if w == 0:
            break
        w = (w - 1) & comp
    return out


def minimal_members(family):
    fam = sorted(set(family), key=popcount)
    out = []
    for m in fam:
        if not any(r & m == r for r in out):
            out.append(m)
    return sorted(out)


def brute_pack(sets) -> int:
    """Maximum pairwise-disjoint subfamily by exhaustive recursion."""
    sets = list(sets)

    def go(i: int, used: int) -> int:
        if i == len(sets):
            return 0
        best = go(i + 1, used)
        if not sets[i] & used:
            best = max(best, 1 + go(i + 1, used | sets[i]))
        return best

    return go(0, 0)


def brute_cover(sets, n: int) -> int:
    """Minimum hitting set size by subset enumeration in size order."""
    sets = list(sets)
    if not sets:
        return 0
    union = 0
    for m in sets:
        union |= m
    elements = [i for i in range(n) if union >> i & 1]
    for size in range(0, len(elements) + 1):
        for combo in combinations(elements, size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if all(m & mask for m in sets):
                return size
    raise AssertionError("unreachable: the union itself is a hitting set")


def solve_linear(rows, rhs):
    """Exact Gaussian solve; returns None for singular systems."""
    d = len(rhs)
    M = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(d):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][d] for i in range(d)]


def cover_lp_vertex_enumeration(sets, n: int) -> Fraction:
    """min sum b_i, sum_{i in w} b_i >= 1, b >= 0, by enumerating vertices.

    Every vertex is the solution of d tight constraints chosen among the set
    rows and the nonnegativity rows; infeasible intersections are skipped.
    """
    sets = list(sets)
    union = 0
    for m in sets:
        union |= m
    elements = [i for i in range(n) if union >> i & 1]
    d = len(elements)
    rows = []
    rhs = []
    for m in sets:
        rows.append([1 if m >> i & 1 else 0 for i in elements])
        rhs.append(1)
    for k in range(d):
        rows.append([1 if j == k else 0 for j in range(d)])
        rhs.append(0)
    best = None
    for combo in combinations(range(len(rows)), d):
        sol = solve_linear([rows[i] for i in combo], [rhs[i] for i in combo])
        if sol is None:
            continue
        if any(v < 0 for v in sol):
            continue
        feasible = True
        for row in rows[: len(sets)]:
            if sum(a * v for a, v in zip(row, sol)) < 1:
                feasible = False
                break
        if not feasible:
            continue
        value = sum(sol, Fraction(0))
        if best is None or value < best:
            best = value
    assert best is not None, "cover LP is always feasible"
    return best


def pack_lp_vertex_enumeration(sets, n: int) -> Fraction:
    """max sum a_w, marginals <= 1, a >= 0, by enumerating vertices."""
    sets = list(sets)
    r = len(sets)
    union = 0
    for m in sets:
        union |= m
    elements = [i for i in range(n) if union >> i & 1]
    rows = []
    rhs = []
    for i in elements:
        rows.append([1 if m >> i & 1 else 0 for m in sets])
        rhs.append(1)
    for k in range(r):
        rows.append([1 if j == k else 0 for j in range(r)])
        rhs.append(0)
    best = Fraction(0)
    for combo in combinations(range(len(rows)), r):
        sol = solve_linear([rows[i] for i in combo], [rhs[i] for i in combo])
        if sol is None:
            continue
        if any(v < 0 for v in sol):
            continue
        feasible = True
        for row, bound in zip(rows[: len(elements)], rhs[: len(elements)]):
            if sum(a * v for a, v in zip(row, sol)) > bound:
                feasible = False
                break
        if not feasible:
            continue
        value = sum(sol, Fraction(0))
        if value > best:
            best = value
    return best
