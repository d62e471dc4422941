"""Decision trees with 0-depth accounting and AND-decision trees.

A standard tree queries one variable per node; its 0-depth is the largest
number of 0-answered queries on any root-to-leaf path.  An AND tree queries
the conjunction of an arbitrary variable subset per node.  The two models
are connected constructively in both directions here:

  build_zero_dt    greedy zero-DT for a boolean polynomial
  zero_dt_to_adt   binary search over the all-ones path, depth
                   <= zero_depth * ceil(log2(n+1))
  adt_to_dt        query the bits of each AND one at a time (at most one
                   0-answer per AND node), zero_depth <= ADT depth
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import FormatError, check_capacity
from .poly import (
    BitVec,
    MultilinearPoly,
    evaluate_mask,
    format_index_set,
    parse_index_set,
    popcount,
    restrict_ones_mask,
    restrict_zero,
    to_table,
)

TREE_BUILD_GUARD = 20


@dataclass(frozen=True)
class DTLeaf:
    value: Fraction


@dataclass(frozen=True)
class DTNode:
    index: int  # queried variable, 1-based
    low: "DecisionTree"  # taken when the variable reads 0
    high: "DecisionTree"


DecisionTree = Union[DTLeaf, DTNode]


@dataclass(frozen=True)
class ADTLeaf:
    value: Fraction


@dataclass(frozen=True)
class ADTNode:
    query: int  # mask of the conjunction's support
    low: "AndDecisionTree"  # conjunction evaluated to 0
    high: "AndDecisionTree"


AndDecisionTree = Union[ADTLeaf, ADTNode]


def dt_depth(t: DecisionTree) -> int:
    if isinstance(t, DTLeaf):
        return 0
    return 1 + max(dt_depth(t.low), dt_depth(t.high))


def dt_zero_depth(t: DecisionTree) -> int:
    """Largest number of 0-edges on any root-to-leaf path."""
    if isinstance(t, DTLeaf):
        return 0
    return max(1 + dt_zero_depth(t.low), dt_zero_depth(t.high))


def dt_evaluate(t: DecisionTree, z: BitVec) -> Fraction:
    return dt_evaluate_mask(t, z.mask)


def dt_evaluate_mask(t: DecisionTree, zmask: int) -> Fraction:
    while isinstance(t, DTNode):
        t = t.high if zmask >> (t.index - 1) & 1 else t.low
    return t.value


def dt_paths_distinct(t: DecisionTree, seen: int = 0) -> bool:
    """Check the tree never re-queries a variable along a path."""
    if isinstance(t, DTLeaf):
        return True
    bit = 1 << (t.index - 1)
    if seen & bit:
        return False
    return dt_paths_distinct(t.low, seen | bit) and dt_paths_distinct(t.high, seen | bit)


def adt_depth(t: AndDecisionTree) -> int:
    if isinstance(t, ADTLeaf):
        return 0
    return 1 + max(adt_depth(t.low), adt_depth(t.high))


def adt_evaluate(t: AndDecisionTree, z: BitVec) -> Fraction:
    return adt_evaluate_mask(t, z.mask)


def adt_evaluate_mask(t: AndDecisionTree, zmask: int) -> Fraction:
    while isinstance(t, ADTNode):
        t = t.high if t.query & ~zmask == 0 else t.low
    return t.value


def adt_verify(t: AndDecisionTree, f: MultilinearPoly) -> bool:
    """Exhaustive equality of the tree and the polynomial on all 2^n inputs."""
    check_capacity(f.n, TREE_BUILD_GUARD, "adt_verify")
    table = to_table(f)
    return all(
        adt_evaluate_mask(t, z) == table.values[z] for z in range(1 << f.n)
    )


# ---------------------------------------------------------------------------
# Greedy zero-DT builder
# ---------------------------------------------------------------------------


def build_zero_dt(f: MultilinearPoly) -> DecisionTree:
    """Greedy decision tree for a boolean-valued polynomial.

    Each node queries the variable occurring in the most remaining monomials
    (ties to the lowest index); the 0-branch drops every monomial through
    it, the 1-branch substitutes the variable away, and a leaf is emitted as
    soon as the restriction is constant.  A variable is never re-queried
    because both restrictions remove it entirely.
    """
    check_capacity(f.n, TREE_BUILD_GUARD, "build_zero_dt")

    def build(p: MultilinearPoly) -> DecisionTree:
        if p.is_constant():
            return DTLeaf(p.constant_term)
        counts: dict[int, int] = {}
        for m in p.terms:
            mm = m
            while mm:
                low = mm & -mm
                counts[low] = counts.get(low, 0) + 1
                mm ^= low
        bit = max(counts, key=lambda k: (counts[k], -k))
        index = bit.bit_length()
        return DTNode(
            index,
            build(restrict_zero(p, index)),
            build(restrict_ones_mask(p, bit)),
        )

    return build(f)


# ---------------------------------------------------------------------------
# Zero-DT -> ADT conversion (binary search over the all-ones path)
# ---------------------------------------------------------------------------


def zero_dt_to_adt(t: DecisionTree, n: int) -> AndDecisionTree:
    """Convert a standard tree to an AND tree, materialized explicitly.

    Walk the all-ones path of the current subtree; it visits queries
    q_1..q_m and ends at a leaf.  Which of the m+1 outcomes (first 0 at
    position j, or no 0 at all) an input realizes is located by binary
    search with prefix-AND queries, then the construction recurses into the
    0-subtree reached, whose 0-depth dropped by one.  The resulting depth is
    at most zero_depth(t) * ceil(log2(n+1)).
    """

    def convert(node: DecisionTree) -> AndDecisionTree:
        if isinstance(node, DTLeaf):
            return ADTLeaf(node.value)
        queries: list[int] = []
        subs: list[DecisionTree] = []
        cur = node
        while isinstance(cur, DTNode):
            queries.append(cur.index)
            subs.append(cur.low)
            cur = cur.high
        final_value = cur.value
        m = len(queries)

        def search(lo: int, hi: int) -> AndDecisionTree:
            # options lo..hi; option j <= m: first zero at path position j;
            # option m+1: the all-ones path ran to its leaf
            if lo == hi:
                if lo == m + 1:
                    return ADTLeaf(final_value)
                return convert(subs[lo - 1])
            leaf_vals = set()
            for j in range(lo, min(hi, m) + 1):
                s = subs[j - 1]
                if not isinstance(s, DTLeaf):
                    leaf_vals = None
                    break
                leaf_vals.add(s.value)
            if leaf_vals is not None and len(leaf_vals) == 1:
                v = next(iter(leaf_vals))
                if hi <= m or final_value == v:
                    return ADTLeaf(v)
                # one query settles it: all remaining zeros give v
                mask = 0
                for j in range(lo, m + 1):
                    mask |= 1 << (queries[j - 1] - 1)
                return ADTNode(mask, ADTLeaf(v), ADTLeaf(final_value))
            mid = (lo + hi) // 2
            mask = 0
            for j in range(lo, mid + 1):
                mask |= 1 << (queries[j - 1] - 1)
            return ADTNode(mask, search(lo, mid), search(mid + 1, hi))

        return search(1, m + 1)

    return convert(t)


def ceil_log2(m: int) -> int:
    """Exact ceil(log2(m)) for m >= 1."""
    return (m - 1).bit_length()


# ---------------------------------------------------------------------------
# ADT -> standard DT simulation
# ---------------------------------------------------------------------------


def adt_to_dt(t: AndDecisionTree, n: int) -> DecisionTree:
    """Simulate each AND by querying its unknown bits one at a time.

    At most one 0 is read per AND node, so the zero-depth of the result is
    bounded by the ADT depth.  Bits already fixed along the path are skipped,
    which keeps every root-to-leaf path free of repeated queries.
    """

    def expand(node: AndDecisionTree, known0: int, known1: int) -> DecisionTree:
        if isinstance(node, ADTLeaf):
            return DTLeaf(node.value)
        if node.query & known0:
            return expand(node.low, known0, known1)
        unknown = node.query & ~known1

        def chain(rest: int, k0: int, k1: int) -> DecisionTree:
            if rest == 0:
                return expand(node.high, k0, k1)
            bit = rest & -rest
            return DTNode(
                bit.bit_length(),
                expand(node.low, k0 | bit, k1),
                chain(rest ^ bit, k0, k1 | bit),
            )

        return chain(unknown, known0, known1)

    return expand(t, 0, 0)


# ---------------------------------------------------------------------------
# Randomized AND tree for the threshold |x| >= n-1
# ---------------------------------------------------------------------------


@dataclass
class RandomizedAndDT:
    """One-trial randomized ADT: sample S uniformly, answer
    (AND of S) OR (AND of the complement).  Never errs when |x| >= n-1."""

    n: int
    rng: random.Random

    def sample_subset(self) -> int:
        return self.rng.randrange(1 << self.n)

    def query(self, subset: int, x: BitVec) -> int:
        full = (1 << self.n) - 1
        inside = subset & ~x.mask == 0
        outside = (full ^ subset) & ~x.mask == 0
        return 1 if inside or outside else 0

    def evaluate_once(self, x: BitVec) -> int:
        return self.query(self.sample_subset(), x)


def threshold_randomized_adt(n: int, seed: int = 0) -> RandomizedAndDT:
    if n < 2:
        raise ValueError("the threshold family needs n >= 2")
    return RandomizedAndDT(n, random.Random(seed))


def threshold_error(n: int) -> Fraction:
    """Exact one-trial error of the randomized ADT on the threshold family.

    Enumerates every (input, sampled subset) pair: inputs of weight >= n-1
    must never err (checked here), and the returned value is the worst
    acceptance probability over inputs of weight <= n-2.
    """
    if n < 2:
        raise ValueError("the threshold family needs n >= 2")
    check_capacity(n, TREE_BUILD_GUARD, "threshold_error")
    size = 1 << n
    full = size - 1
    worst = Fraction(0)
    for x in range(size):
        accepted = 0
        for s in range(size):
            inside = s & ~x == 0
            outside = (full ^ s) & ~x == 0
            if inside or outside:
                accepted += 1
        prob = Fraction(accepted, size)
        if popcount(x) >= n - 1:
            if prob != 1:
                raise AssertionError("threshold query erred on a heavy input")
        else:
            if prob > worst:
                worst = prob
    return worst


# ---------------------------------------------------------------------------
# Text serialization: nested (query=... 0:(...) 1:(...)) / leaf=<rational>
# ---------------------------------------------------------------------------


def format_dt(t: DecisionTree) -> str:
    if isinstance(t, DTLeaf):
        return f"leaf={t.value}"
    return f"(query={t.index} 0:{format_dt(t.low)} 1:{format_dt(t.high)})"


def format_adt(t: AndDecisionTree) -> str:
    if isinstance(t, ADTLeaf):
        return f"leaf={t.value}"
    return (
        f"(query={format_index_set(t.query)} "
        f"0:{format_adt(t.low)} 1:{format_adt(t.high)})"
    )


_TOKEN = re.compile(r"\(|\)|0:|1:|query=\{[^}]*\}|query=\d+|leaf=[^\s()]+")


def _tokenize(text: str) -> list[str]:
    tokens = _TOKEN.findall(text)
    if re.sub(r"\s+", "", "".join(tokens)) != re.sub(r"\s+", "", text):
        raise FormatError("unrecognized characters in tree text")
    return tokens


def parse_tree(text: str, n: int) -> DecisionTree | AndDecisionTree:
    """Parse either tree flavor; queries of the form {i,j} produce an ADT."""
    tokens = _tokenize(text)
    pos = 0

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise FormatError("unexpected end of tree text")
        tok = tokens[pos]
        pos += 1
        if expected is not None and tok != expected:
            raise FormatError(f"expected {expected!r}, got {tok!r}")
        return tok

    def node():
        tok = take()
        if tok.startswith("leaf="):
            try:
                return DTLeaf(Fraction(tok[5:]))
            except (ValueError, ZeroDivisionError):
                raise FormatError(f"bad leaf value {tok[5:]!r}") from None
        if tok != "(":
            raise FormatError(f"expected '(' or leaf, got {tok!r}")
        qtok = take()
        if not qtok.startswith("query="):
            raise FormatError(f"expected query=..., got {qtok!r}")
        body = qtok[6:]
        take("0:")
        low = node()
        take("1:")
        high = node()
        take(")")
        if body.startswith("{"):
            return ADTNode(parse_index_set(body, n), _as_adt(low), _as_adt(high))
        index = int(body)
        if not 1 <= index <= n:
            raise FormatError(f"query index {index} outside [1, {n}]")
        return DTNode(index, _as_dt(low), _as_dt(high))

    tree = node()
    if pos != len(tokens):
        raise FormatError("trailing tokens after tree")
    return tree


def _as_adt(t):
    if isinstance(t, DTLeaf):
        return ADTLeaf(t.value)
    if isinstance(t, DTNode):
        raise FormatError("mixed plain and AND queries in one tree")
    return t


def _as_dt(t):
    if isinstance(t, ADTLeaf):
        return DTLeaf(t.value)
    if isinstance(t, ADTNode):
        raise FormatError("mixed plain and AND queries in one tree")
    return t
