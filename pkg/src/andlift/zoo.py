"""Generators for the named example families, the finite-range collapse,
and the hitting-set / disjoint-sets dichotomy for arbitrary set systems.

Families and their parameters:

  projective_plane m   OR over the lines of the order-m plane; m prime,
                       n = m^2 + m + 1
  majority n           1 iff at least n/2 ones; n even
  and_or k             AND over k clauses (x_j OR y_j); n = 2k
  redundant_indexing k n = 2^k + k; sparsity exactly 2k
  threshold n          1 iff at least n-1 ones; sparsity n + 1
  first_zero_gap n     the bit after the first zero (1 on 1^n and 1^(n-1)0)
  or n / and n         the n-bit OR / AND
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from .errors import check_capacity
from .measures import GLOBAL_SCAN_GUARD, _local_family
from .optkern import GreedyStep, HittingSet, SetSystem, greedy_cover
from .poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    mobius_invert,
    popcount,
    to_table,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)

FAMILIES = (
    "projective_plane",
    "majority",
    "and_or",
    "redundant_indexing",
    "threshold",
    "first_zero_gap",
    "or",
    "and",
)


@dataclass(frozen=True)
class FamilySpec:
    """A named example family with its single integer parameter."""

    family: str
    param: int


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    for d in range(2, int(math.isqrt(m)) + 1):
        if m % d == 0:
            return False
    return True


def projective_plane_lines(m: int) -> tuple[int, tuple[int, ...]]:
    """Point/line incidence of the order-m plane over F_m (m prime).

    Points and lines are both the projective classes of F_m^3 \\ {0};
    incidence is orthogonality of representative vectors.  Returns
    (n, line masks) with n = m^2 + m + 1 points.
    """
    if not _is_prime(m):
        raise ValueError(f"projective plane needs a prime order, got {m}")
    reps = []
    seen = set()
    for x in range(m):
        for y in range(m):
            for z in range(m):
                v = (x, y, z)
                if v == (0, 0, 0) or v in seen:
                    continue
                for s in range(1, m):
                    seen.add(((s * x) % m, (s * y) % m, (s * z) % m))
                reps.append(v)
    n = m * m + m + 1
    assert len(reps) == n
    lines = []
    for line in reps:
        mask = 0
        for idx, point in enumerate(reps):
            if sum(a * b for a, b in zip(line, point)) % m == 0:
                mask |= 1 << idx
        assert popcount(mask) == m + 1
        lines.append(mask)
    return n, tuple(lines)


def _table(n: int, pred) -> TruthTable:
    return TruthTable.from_values(n, [1 if pred(z) else 0 for z in range(1 << n)])


def and_or_closed_form(k: int) -> MultilinearPoly:
    """Product over clauses of (x_j + y_j - x_j y_j); the x block occupies
    variables 1..k and the y block variables k+1..2k."""
    n = 2 * k
    terms = {0: _ONE}
    for j in range(k):
        xbit = 1 << j
        ybit = 1 << (k + j)
        new: dict[int, Fraction] = {}
        for m, c in terms.items():
            for add, factor in ((xbit, c), (ybit, c), (xbit | ybit, -c)):
                key = m | add
                new[key] = new.get(key, _ZERO) + factor
        terms = {m: c for m, c in new.items() if c != 0}
    return MultilinearPoly(n, terms)


def redundant_indexing_closed_form(k: int) -> MultilinearPoly:
    """Sum over i of (prod_{S : i in S} x_S)(1 - y_i)(prod_{j != i} y_j).

    Variables 1..2^k are x_S in subset-mask order; variables 2^k+1..2^k+k
    are y_1..y_k.  Exactly 2k monomials survive.
    """
    n = (1 << k) + k
    terms: dict[int, Fraction] = {}
    y_all = ((1 << k) - 1) << (1 << k)
    for i in range(k):
        xs = 0
        for s in range(1 << k):
            if s >> i & 1:
                xs |= 1 << s
        y_except = y_all & ~(1 << ((1 << k) + i))
        terms[xs | y_except] = terms.get(xs | y_except, _ZERO) + 1
        terms[xs | y_all] = terms.get(xs | y_all, _ZERO) - 1
    return MultilinearPoly(n, {m: c for m, c in terms.items() if c != 0})


def generate(spec: FamilySpec) -> MultilinearPoly:
    """Build the family member as an exact multilinear polynomial."""
    fam, p = spec.family, spec.param
    if fam == "projective_plane":
        n, lines = projective_plane_lines(p)
        check_capacity(n, 24, "projective_plane")
        return mobius_invert(_table(n, lambda z: any(z & L == L for L in lines)))
    if fam == "majority":
        if p < 2 or p % 2:
            raise ValueError("majority needs an even n >= 2")
        return mobius_invert(_table(p, lambda z: popcount(z) >= p // 2))
    if fam == "and_or":
        if p < 1:
            raise ValueError("and_or needs at least one clause")
        return and_or_closed_form(p)
    if fam == "redundant_indexing":
        if p < 1:
            raise ValueError("redundant_indexing needs k >= 1")
        return redundant_indexing_closed_form(p)
    if fam == "threshold":
        if p < 2:
            raise ValueError("threshold needs n >= 2")
        return mobius_invert(_table(p, lambda z: popcount(z) >= p - 1))
    if fam == "first_zero_gap":
        if p < 2:
            raise ValueError("first_zero_gap needs n >= 2")

        def val(z: int) -> bool:
            for i in range(p):
                if not z >> i & 1:
                    return bool(z >> (i + 1) & 1) if i + 1 < p else True
            return True

        return mobius_invert(_table(p, val))
    if fam == "or":
        if p < 1:
            raise ValueError("or needs n >= 1")
        return mobius_invert(_table(p, lambda z: z != 0))
    if fam == "and":
        if p < 1:
            raise ValueError("and needs n >= 1")
        return MultilinearPoly.from_terms(p, {(1 << p) - 1: 1})
    raise ValueError(f"unknown family {fam!r}; choose one of {', '.join(FAMILIES)}")


# ---------------------------------------------------------------------------
# Finite-range collapse: compose with the Lagrange indicator of one value
# ---------------------------------------------------------------------------


def function_range(f: MultilinearPoly) -> tuple[Fraction, ...]:
    """The distinct values of f over {0,1}^n, ascending (full scan)."""
    check_capacity(f.n, GLOBAL_SCAN_GUARD, "function_range")
    return tuple(sorted(set(to_table(f).values)))


def range_collapse(f: MultilinearPoly, a: Fraction | int) -> MultilinearPoly:
    """The boolean indicator g(z) = [f(z) = a] via Lagrange interpolation.

    p interpolates 1 at a and 0 at the rest of the range (degree |range|-1),
    and g = p o f.  The non-constant monomials of g are unions of at most
    |range|-1 monomials of f, so |mon(g)| <= spar(f)^(|range|-1); sparsity
    itself can exceed that by exactly the constant term (e.g. f = x1, a = 0
    gives g = 1 - x1), so the asserted bound carries the +1.
    """
    a = Fraction(a)
    rng = function_range(f)
    if a not in rng:
        raise ValueError(f"value {a} is not attained by the function")
    table = to_table(f)
    values = []
    for v in table.values:
        prod = _ONE
        for b in rng:
            if b != a:
                prod *= (v - b) / (a - b)
        values.append(prod)
    g = mobius_invert(TruthTable(f.n, tuple(values)))
    if not all(v in (0, 1) for v in values):
        raise AssertionError("range collapse produced a non-boolean function")
    cap = f.spar ** (len(rng) - 1)
    if g.n_monomials > cap or g.spar > cap + 1:
        raise AssertionError("range collapse exceeded its sparsity cap")
    return g


# ---------------------------------------------------------------------------
# Set-system dichotomy: small hitting set or many disjoint residual sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DichotomyResult:
    """Exactly one of the two branches is populated.

    hitting branch: greedy hitting set (with trace) for the whole family.
    disjoint branch: the removed part T plus pairwise-disjoint residual sets
    S_i \\ T, at least m of them.
    """

    kind: str  # "hitting" | "disjoint"
    mbs: int
    hitting_set: HittingSet | None = None
    greedy_steps: tuple[GreedyStep, ...] | None = None
    t_mask: BitVec | None = None
    disjoint_sets: tuple[BitVec, ...] | None = None


def dichotomy(s: SetSystem, m: int) -> DichotomyResult:
    """Decide which side of the structure theorem the system lies on.

    The all-ones-coefficient polynomial of the family (coefficients merge
    additively under restriction and never cancel) has its global MBS
    scanned; below m the greedy hitting set is returned, otherwise the
    smallest maximizing point T and the disjoint residual sets.  Both
    branch outputs are re-verified before returning.
    """
    if m < 1:
        raise ValueError("dichotomy needs m >= 1")
    check_capacity(s.n, GLOBAL_SCAN_GUARD, "dichotomy")
    if not s.sets:
        raise ValueError("dichotomy needs a nonempty family")
    f = MultilinearPoly.from_terms(s.n, {mask: 1 for mask in s.sets})

    best = -1
    best_z = 0
    best_blocks: tuple[int, ...] = ()
    for zmask in range(1 << s.n):
        fam = _local_family(f, zmask)
        if fam.mbs > best:
            best, best_z, best_blocks = fam.mbs, zmask, fam.pack_blocks

    if best >= m:
        t = best_z
        residual = {mask & ~t for mask in s.sets if mask & ~t}
        taken = 0
        for blk in best_blocks:
            if blk & taken or blk not in residual:
                raise AssertionError("disjoint branch failed re-verification")
            taken |= blk
        if len(best_blocks) < m:
            raise AssertionError("disjoint branch lost blocks")
        return DichotomyResult(
            kind="disjoint",
            mbs=best,
            t_mask=BitVec(s.n, t),
            disjoint_sets=tuple(BitVec(s.n, b) for b in best_blocks),
        )

    hs, steps = greedy_cover(s)
    if not hs.verify(s.sets):
        raise AssertionError("hitting branch failed re-verification")
    return DichotomyResult(
        kind="hitting", mbs=best, hitting_set=hs, greedy_steps=steps
    )
