"""Exact optimization kernel over set systems.

Everything here runs on fractions.Fraction: the simplex solver performs exact
rational pivots (Bland's rule, so cycling is impossible), every LpResult is
certified at construction time (primal feasible, dual feasible, primal value
equal to dual value), and the integral solvers re-verify their witnesses
before returning them.

Set systems are families of nonempty subsets of [n]; sets are encoded as
bitmasks with variable i at bit i-1, matching the conventions of
:mod:`andlift.poly`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import FormatError, InfeasibleError, UnboundedError
from .poly import BitVec, format_index_set, parse_index_set, popcount

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class SetSystem:
    """A family of distinct nonempty subsets of [n], kept in input order."""

    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        seen = set()
        for m in self.sets:
            if m == 0:
                raise ValueError("empty set not allowed (covering would be infeasible)")
            if not 0 < m < (1 << self.n):
                raise ValueError(f"set mask {m} out of range for n={self.n}")
            if m in seen:
                raise ValueError(f"duplicate set {format_index_set(m)}")
            seen.add(m)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[int | BitVec]) -> "SetSystem":
        masks = tuple(s.mask if isinstance(s, BitVec) else s for s in sets)
        return cls(n, masks)

    def __len__(self) -> int:
        return len(self.sets)

    def union_mask(self) -> int:
        u = 0
        for m in self.sets:
            u |= m
        return u

    def elements(self) -> tuple[int, ...]:
        """1-based indices that occur in at least one set, ascending."""
        u = self.union_mask()
        return tuple(i + 1 for i in range(self.n) if u >> i & 1)

    def members(self) -> tuple[BitVec, ...]:
        return tuple(BitVec(self.n, m) for m in self.sets)


@dataclass(frozen=True)
class PackingWitness:
    """Pairwise disjoint blocks, optionally anchored at a base point."""

    n: int
    blocks: tuple[int, ...]
    base: int = 0

    @property
    def size(self) -> int:
        return len(self.blocks)

    def block_vecs(self) -> tuple[BitVec, ...]:
        return tuple(BitVec(self.n, b) for b in self.blocks)

    def base_vec(self) -> BitVec:
        return BitVec(self.n, self.base)

    def verify(self, family: Sequence[int] | None = None) -> bool:
        """Pairwise disjoint, disjoint from the base, all drawn from family."""
        acc = self.base
        for b in self.blocks:
            if b == 0 or b & acc:
                return False
            acc |= b
        if family is not None:
            pool = set(family)
            if any(b not in pool for b in self.blocks):
                return False
        return True


@dataclass(frozen=True)
class HittingSet:
    """A set of indices meeting every member of a family."""

    n: int
    mask: int

    @property
    def size(self) -> int:
        return popcount(self.mask)

    def indices(self) -> tuple[int, ...]:
        return BitVec(self.n, self.mask).indices()

    def verify(self, family: Sequence[int]) -> bool:
        return all(m & self.mask for m in family)


@dataclass(frozen=True)
class LpResult:
    """Certified optimum: primal and dual solutions with equal objective value.

    Keys of ``primal``/``dual`` depend on the producing operation; zero
    entries are omitted.  Certification happens in the solver before the
    result is handed out.
    """

    value: Fraction
    primal: dict[int, Fraction]
    dual: dict[int, Fraction]


# ---------------------------------------------------------------------------
# Exact two-phase simplex
# ---------------------------------------------------------------------------

Row = tuple[Sequence[Fraction | int], str, Fraction | int]

_REL = {"<=", ">=", "=="}


def simplex_solve(sense: str, objective: Sequence[Fraction | int], rows: Sequence[Row]) -> LpResult:
    """Solve max/min c.x subject to the given rows and x >= 0, exactly.

    Each row is (coefficients, relation, rhs) with relation one of
    '<=', '>=', '=='.  Returns a certified LpResult; raises InfeasibleError
    or UnboundedError otherwise.  Dual values are keyed by row position and
    follow the textbook sign convention for the stated sense.
    """
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    nvars = len(objective)
    c_orig = [Fraction(v) for v in objective]
    parsed: list[tuple[list[Fraction], str, Fraction]] = []
    for coeffs, rel, rhs in rows:
        if rel == "=":
            rel = "=="
        if rel not in _REL:
            raise ValueError(f"bad relation {rel!r}")
        coeffs = list(coeffs)
        if len(coeffs) != nvars:
            raise ValueError("row length does not match objective length")
        parsed.append(([Fraction(v) for v in coeffs], rel, Fraction(rhs)))

    x, y_internal, sigma, mrows = _two_phase(sense, c_orig, parsed)

    primal = {j: v for j, v in enumerate(x) if v != 0}
    duals: dict[int, Fraction] = {}
    for j in range(mrows):
        yv = y_internal[j] * sigma[j]
        if sense == "max":
            yv = -yv
        if yv != 0:
            duals[j] = yv
    value = _ZERO
    for j, v in primal.items():
        value += c_orig[j] * v
    _certify(sense, c_orig, parsed, x, value, duals)
    return LpResult(value, primal, duals)


def _two_phase(sense, c_orig, parsed):
    m = len(parsed)
    nvars = len(c_orig)
    sigma = []
    # standardized rows: equality form with slack/surplus, rhs >= 0
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    rels = []
    for coeffs, rel, rhs in parsed:
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
            sigma.append(Fraction(-1))
        else:
            sigma.append(_ONE)
        A.append(list(coeffs))
        b.append(rhs)
        rels.append(rel)

    ncols = nvars
    slack_col = {}
    for i, rel in enumerate(rels):
        if rel == "<=":
            slack_col[i] = ncols
            ncols += 1
        elif rel == ">=":
            slack_col[i] = ncols
            ncols += 1
    art_col = {}
    for i, rel in enumerate(rels):
        if rel != "<=":
            art_col[i] = ncols
            ncols += 1

    for i in range(m):
        row = A[i]
        row.extend([_ZERO] * (ncols - nvars))
        rel = rels[i]
        if rel == "<=":
            row[slack_col[i]] = _ONE
        elif rel == ">=":
            row[slack_col[i]] = -_ONE
        if i in art_col:
            row[art_col[i]] = _ONE

    basis = []
    for i in range(m):
        basis.append(art_col[i] if i in art_col else slack_col[i])
    artificials = set(art_col.values())

    A0 = [list(row) for row in A]  # pristine copy for the dual solve

    if artificials:
        cost1 = [_ZERO] * ncols
        for j in artificials:
            cost1[j] = _ONE
        val = _run_simplex(A, b, basis, cost1, banned=frozenset())
        if val != 0:
            raise InfeasibleError("phase-1 optimum is positive")
        _pivot_out_artificials(A, b, basis, artificials)

    # phase 2: internal minimization of c (or -c for a max problem)
    cost2 = [(-v if sense == "max" else v) for v in c_orig] + [_ZERO] * (ncols - nvars)
    _run_simplex(A, b, basis, cost2, banned=frozenset(artificials))

    x = [_ZERO] * nvars
    for i, j in enumerate(basis):
        if j < nvars:
            x[j] = b[i]

    y = _dual_from_basis(A0, basis, cost2, m)
    return x, y, sigma, m


def _run_simplex(A, b, basis, cost, banned):
    """Bland-rule minimization on the tableau; returns the objective value."""
    m = len(A)
    ncols = len(cost)
    # reduced-cost row for the current basis
    red = list(cost)
    for i, bj in enumerate(basis):
        cb = cost[bj]
        if cb != 0:
            row = A[i]
            for j in range(ncols):
                if row[j]:
                    red[j] -= cb * row[j]

    guard = max(10000, 50 * ncols * (m + 1))
    iters = 0
    while True:
        enter = -1
        for j in range(ncols):
            if j in banned:
                continue
            if red[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        # ratio test (Bland tie-break: smallest basic variable index)
        leave = -1
        best_ratio = None
        for i in range(m):
            a = A[i][enter]
            if a > 0:
                ratio = b[i] / a
                if best_ratio is None or ratio < best_ratio or (
                    ratio == best_ratio and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise UnboundedError("no blocking row for the entering column")
        _pivot(A, b, red, basis, leave, enter)
        iters += 1
        if iters > guard:
            raise AssertionError("simplex cycling guard tripped despite Bland's rule")

    value = _ZERO
    for i, bj in enumerate(basis):
        if cost[bj] != 0:
            value += cost[bj] * b[i]
    return value


def _pivot(A, b, red, basis, row, col):
    prow = A[row]
    piv = prow[col]
    if piv != 1:
        inv = _ONE / piv
        A[row] = prow = [v * inv for v in prow]
        b[row] = b[row] * inv
    m = len(A)
    for i in range(m):
        if i == row:
            continue
        f = A[i][col]
        if f:
            arow = A[i]
            A[i] = [av - f * pv if pv else av for av, pv in zip(arow, prow)]
            if b[row]:
                b[i] = b[i] - f * b[row]
    f = red[col]
    if f:
        for j in range(len(red)):
            if prow[j]:
                red[j] = red[j] - f * prow[j]
    basis[row] = col


def _pivot_out_artificials(A, b, basis, artificials):
    m = len(A)
    for i in range(m):
        if basis[i] in artificials:
            row = A[i]
            col = next(
                (j for j in range(len(row)) if j not in artificials and row[j] != 0),
                None,
            )
            if col is not None:
                # degenerate pivot: b[i] == 0 after a zero-value phase 1
                red = [_ZERO] * len(row)
                _pivot(A, b, red, basis, i, col)
            # else: the row is redundant; the artificial stays basic at zero
            # and can never change because every real column there is zero


def _dual_from_basis(A0, basis, cost, m):
    """Solve B^T y = c_B exactly for the final basis."""
    if m == 0:
        return []
    mat = [[A0[i][basis[k]] for i in range(m)] for k in range(m)]  # rows: basis vars
    rhs = [cost[basis[k]] for k in range(m)]
    return _solve_square(mat, rhs)


def _solve_square(mat, rhs):
    n = len(mat)
    M = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise AssertionError("singular basis matrix in dual solve")
        M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = _ONE / prow[col]
        M[col] = prow = [v * inv for v in prow]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [av - f * pv if pv else av for av, pv in zip(M[r], prow)]
    return [M[i][n] for i in range(n)]


def _certify(sense, c, parsed, x, value, duals):
    """Strong-duality certificate; raises AssertionError on any failure."""
    for coeffs, rel, rhs in parsed:
        lhs = _ZERO
        for a, v in zip(coeffs, x):
            if a and v:
                lhs += a * v
        ok = lhs <= rhs if rel == "<=" else lhs >= rhs if rel == ">=" else lhs == rhs
        if not ok:
            raise AssertionError("primal solution violates a constraint")
    if any(v < 0 for v in x):
        raise AssertionError("primal solution violates nonnegativity")
    dual_value = _ZERO
    for j, (coeffs, rel, rhs) in enumerate(parsed):
        y = duals.get(j, _ZERO)
        if sense == "max":
            if rel == "<=" and y < 0:
                raise AssertionError("dual sign violated on a <= row")
            if rel == ">=" and y > 0:
                raise AssertionError("dual sign violated on a >= row")
        else:
            if rel == "<=" and y > 0:
                raise AssertionError("dual sign violated on a <= row")
            if rel == ">=" and y < 0:
                raise AssertionError("dual sign violated on a >= row")
        dual_value += y * rhs
    for i, ci in enumerate(c):
        col = _ZERO
        for j, (coeffs, _, _) in enumerate(parsed):
            y = duals.get(j)
            if y and coeffs[i]:
                col += y * coeffs[i]
        if sense == "max":
            if col < ci:
                raise AssertionError("dual solution violates a column constraint")
        else:
            if col > ci:
                raise AssertionError("dual solution violates a column constraint")
    if dual_value != value:
        raise AssertionError("strong duality violated: primal != dual value")


# ---------------------------------------------------------------------------
# Fractional covering and packing
# ---------------------------------------------------------------------------


def _minimal_masks(masks: Sequence[int]) -> tuple[int, ...]:
    """Inclusion-minimal members of a family, ascending."""
    by_size = sorted(set(masks), key=popcount)
    out: list[int] = []
    for m in by_size:
        if not any(r & m == r for r in out):
            out.append(m)
    out.sort()
    return tuple(out)


def fractional_cover(s: SetSystem) -> LpResult:
    """min sum b_i with sum_{i in w} b_i >= 1 per set w; b >= 0.

    Primal is keyed by 1-based element index, dual by set position.  Two
    reductions keep big instances exact and fast without changing the
    program: the b_i <= 1 bounds are dropped (with 0/1 coefficients any
    optimum can be clipped to [0,1], so they are never active), and only
    inclusion-minimal sets enter as rows (a superset's constraint is implied
    term by term).  The returned weights are re-verified against the whole
    family; duals on dominated sets are zero.
    """
    if not s.sets:
        raise ValueError("fractional_cover needs a nonempty family")
    minimal = _minimal_masks(s.sets)
    elements = s.elements()
    pos = {e: k for k, e in enumerate(elements)}
    rows = []
    for m in minimal:
        coeffs = [0] * len(elements)
        mm = m
        while mm:
            low = mm & -mm
            coeffs[pos[low.bit_length()]] = 1
            mm ^= low
        rows.append((coeffs, ">=", 1))
    res = simplex_solve("min", [1] * len(elements), rows)
    primal = {elements[k]: v for k, v in res.primal.items()}
    for m in s.sets:
        covered = _ZERO
        mm = m
        while mm:
            low = mm & -mm
            covered += primal.get(low.bit_length(), _ZERO)
            mm ^= low
        if covered < 1:
            raise AssertionError("cover weights miss a dominated set")
    index_of = {m: j for j, m in enumerate(s.sets)}
    dual = {index_of[minimal[k]]: v for k, v in res.dual.items()}
    return LpResult(res.value, primal, dual)


def fractional_pack(s: SetSystem) -> LpResult:
    """max sum a_w with sum_{w : i in w} a_w <= 1 per element i; a >= 0.

    Primal is keyed by set position, dual by 1-based element index.  The
    a_w <= 1 bounds are implied by the element constraints (sets are
    nonempty).  Weight only ever needs to sit on inclusion-minimal sets
    (pushing weight down a chain keeps every marginal), so dominated sets
    are dropped before solving; the dual cover weights are re-verified
    against every set of the family.
    """
    if not s.sets:
        return LpResult(_ZERO, {}, {})
    minimal = _minimal_masks(s.sets)
    elements = s.elements()
    rows = []
    for e in elements:
        bit = 1 << (e - 1)
        rows.append(([1 if m & bit else 0 for m in minimal], "<=", 1))
    res = simplex_solve("max", [1] * len(minimal), rows)
    dual = {elements[j]: v for j, v in res.dual.items()}
    for m in s.sets:
        covered = _ZERO
        mm = m
        while mm:
            low = mm & -mm
            covered += dual.get(low.bit_length(), _ZERO)
            mm ^= low
        if covered < 1:
            raise AssertionError("pack duals miss a dominated set")
    index_of = {m: j for j, m in enumerate(s.sets)}
    primal = {index_of[minimal[k]]: v for k, v in res.primal.items()}
    return LpResult(res.value, primal, dual)


@lru_cache(maxsize=1 << 16)
def _pack_value(masks: frozenset[int]) -> Fraction:
    if not masks:
        return _ZERO
    n = max(masks).bit_length()
    return fractional_pack(SetSystem(n, tuple(sorted(masks)))).value


@lru_cache(maxsize=1 << 16)
def _cover_value(masks: frozenset[int]) -> Fraction:
    if not masks:
        return _ZERO
    n = max(masks).bit_length()
    return fractional_cover(SetSystem(n, tuple(sorted(masks)))).value


# ---------------------------------------------------------------------------
# Exact integral packing and covering
# ---------------------------------------------------------------------------

_ENUM_GROUND_LIMIT = 20


def integral_pack(s: SetSystem) -> tuple[int, PackingWitness]:
    """Maximum pairwise-disjoint subfamily, exact via branch and bound.

    Branching is on a maximum-degree element: either one of the sets through
    it is in the packing, or none is.  The fractional LP value prunes from
    above; a greedy packing seeds the incumbent.
    """
    if not s.sets:
        return 0, PackingWitness(s.n, ())

    best: list[int] = []
    taken = 0
    for m in s.sets:
        if not m & taken:
            best.append(m)
            taken |= m
    best_tuple = tuple(best)

    def bound(avail: tuple[int, ...]) -> int:
        if len(avail) >= 8:
            return math.floor(_pack_value(frozenset(avail)))
        return len(avail)

    def bb(avail: tuple[int, ...], chosen: list[int]):
        nonlocal best_tuple
        if len(chosen) > len(best_tuple):
            best_tuple = tuple(chosen)
        if not avail:
            return
        if len(chosen) + bound(avail) <= len(best_tuple):
            return
        degree: dict[int, int] = {}
        for m in avail:
            mm = m
            while mm:
                low = mm & -mm
                degree[low] = degree.get(low, 0) + 1
                mm ^= low
        ebit = max(degree, key=lambda k: (degree[k], -k))
        through = [m for m in avail if m & ebit]
        for m in through:
            chosen.append(m)
            bb(tuple(x for x in avail if not x & m), chosen)
            chosen.pop()
        bb(tuple(x for x in avail if not x & ebit), chosen)

    bb(s.sets, [])
    witness = PackingWitness(s.n, best_tuple)
    if not witness.verify(s.sets):
        raise AssertionError("integral_pack produced an invalid witness")
    return len(best_tuple), witness


def integral_cover(s: SetSystem) -> tuple[int, HittingSet]:
    """Minimum hitting set, exact.

    For ground sets of at most 20 occurring elements the search enumerates
    candidate hitting sets in increasing size between the LP lower bound and
    the greedy upper bound; larger grounds fall back to branch and bound on
    maximum-degree elements.
    """
    if not s.sets:
        return 0, HittingSet(s.n, 0)
    greedy_hs, _ = greedy_cover(s)
    lb = math.ceil(fractional_cover(s).value)
    if greedy_hs.size == lb:
        return greedy_hs.size, greedy_hs
    bits = [1 << (e - 1) for e in s.elements()]
    if len(bits) <= _ENUM_GROUND_LIMIT:
        for size in range(lb, greedy_hs.size):
            for combo in combinations(bits, size):
                mask = 0
                for b in combo:
                    mask |= b
                if all(m & mask for m in s.sets):
                    return size, HittingSet(s.n, mask)
        return greedy_hs.size, greedy_hs

    best_mask = greedy_hs.mask
    best_size = greedy_hs.size

    def bb(remaining: tuple[int, ...], allowed: int, chosen_mask: int, chosen: int):
        nonlocal best_mask, best_size
        if not remaining:
            if chosen < best_size:
                best_size, best_mask = chosen, chosen_mask
            return
        if any(not m & allowed for m in remaining):
            return
        lp = _cover_value(frozenset(m & allowed for m in remaining))
        if chosen + math.ceil(lp) >= best_size:
            return
        degree: dict[int, int] = {}
        for m in remaining:
            mm = m & allowed
            while mm:
                low = mm & -mm
                degree[low] = degree.get(low, 0) + 1
                mm ^= low
        ebit = max(degree, key=lambda k: (degree[k], -k))
        bb(
            tuple(m for m in remaining if not m & ebit),
            allowed,
            chosen_mask | ebit,
            chosen + 1,
        )
        bb(remaining, allowed & ~ebit, chosen_mask, chosen)

    bb(s.sets, s.union_mask(), 0, 0)
    witness = HittingSet(s.n, best_mask)
    if not witness.verify(s.sets):
        raise AssertionError("integral_cover produced an invalid witness")
    return best_size, witness


@dataclass(frozen=True)
class GreedyStep:
    """One greedy pick: the chosen index and how many sets remain after it."""

    index: int
    remaining: int


def greedy_cover(s: SetSystem) -> tuple[HittingSet, tuple[GreedyStep, ...]]:
    """Greedy hitting set: always the index meeting the most remaining sets.

    Ties break to the lowest index, so runs are deterministic.  Returns the
    hitting set together with the full step trace.
    """
    remaining = list(s.sets)
    chosen = 0
    steps = []
    while remaining:
        counts: dict[int, int] = {}
        for m in remaining:
            mm = m
            while mm:
                low = mm & -mm
                counts[low] = counts.get(low, 0) + 1
                mm ^= low
        ebit = max(counts, key=lambda k: (counts[k], -k))
        chosen |= ebit
        remaining = [m for m in remaining if not m & ebit]
        steps.append(GreedyStep(ebit.bit_length(), len(remaining)))
    witness = HittingSet(s.n, chosen)
    if not witness.verify(s.sets):
        raise AssertionError("greedy_cover produced an invalid hitting set")
    return witness, tuple(steps)


# ---------------------------------------------------------------------------
# Set-system file format: header n=<int>, then one {i,j,...} line per set
# ---------------------------------------------------------------------------


def parse_set_system(text: str) -> SetSystem:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise FormatError("empty set-system file")
    lineno, header = lines[0]
    if not header.startswith("n="):
        raise FormatError("expected header 'n=<int>'", lineno)
    try:
        n = int(header[2:])
    except ValueError:
        raise FormatError(f"bad ground-set size {header[2:]!r}", lineno) from None
    masks = []
    for ln, line in lines[1:]:
        mask = parse_index_set(line, n, ln)
        if mask == 0:
            raise FormatError("empty set not allowed", ln)
        masks.append(mask)
    try:
        return SetSystem(n, tuple(masks))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_set_system(s: SetSystem) -> str:
    lines = [f"n={s.n}"]
    lines.extend(format_index_set(m) for m in s.sets)
    return "\n".join(lines) + "\n"
