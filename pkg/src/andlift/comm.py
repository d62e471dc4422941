"""Communication matrix of f(x AND y): exact rank, protocol simulation,
unique-disjointness embeddings, and the end-to-end pipeline reports.

The matrix rank is computed by fraction-free integer elimination on the
materialized 2^n x 2^n matrix; it deliberately shares no machinery with the
sparsity count it is compared against, so rank == spar is a genuine check
rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import check_capacity
from .measures import MeasureReport, global_measures
from .optkern import PackingWitness, greedy_cover, SetSystem
from .poly import BitVec, MultilinearPoly, evaluate_mask, l1_norm, popcount, to_table
from .trees import (
    AndDecisionTree,
    ADTLeaf,
    ADTNode,
    adt_depth,
    adt_evaluate_mask,
    adt_verify,
    build_zero_dt,
    ceil_log2,
    dt_zero_depth,
    zero_dt_to_adt,
)

RANK_GUARD = 10
_ZERO = Fraction(0)


@dataclass(frozen=True)
class CommMatrix:
    """Dense communication matrix M[x][y] = f(x AND y), little-endian indices."""

    n: int
    rows: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_poly(cls, f: MultilinearPoly) -> "CommMatrix":
        check_capacity(f.n, RANK_GUARD, "communication matrix")
        values = to_table(f).values
        size = 1 << f.n
        rows = tuple(
            tuple(values[x & y] for y in range(size)) for x in range(size)
        )
        return cls(f.n, rows)


def comm_rank(f: MultilinearPoly) -> int:
    """Exact rank over Q of the communication matrix of f(x AND y).

    Rows are scaled to integers, duplicate rows and columns are removed
    (plain linear algebra: duplicates never add rank), and the rank is read
    off a fraction-free integer elimination with per-row gcd reduction.
    """
    check_capacity(f.n, RANK_GUARD, "comm_rank")
    values = to_table(f).values
    size = 1 << f.n
    denom = 1
    for v in values:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    ints = [int(v * denom) for v in values]

    seen_rows = {}
    for x in range(size):
        row = tuple(ints[x & y] for y in range(size))
        seen_rows.setdefault(row, x)
    rows = list(seen_rows)
    cols = sorted({tuple(r[y] for r in rows) for y in range(size)})
    matrix = [list(c) for c in cols]  # transpose is rank-neutral
    return _int_rank(matrix)


def _int_rank(matrix: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination: cross-multiplication row updates
    with gcd normalization keep every entry an exact integer."""
    if not matrix:
        return 0
    nrows = len(matrix)
    ncols = len(matrix[0])
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = None
        pivot_val = 0
        for r in range(rank, nrows):
            v = matrix[r][col]
            if v and (pivot is None or abs(v) < abs(pivot_val)):
                pivot, pivot_val = r, v
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        prow = matrix[rank]
        for r in range(rank + 1, nrows):
            row = matrix[r]
            v = row[col]
            if not v:
                continue
            new = [pivot_val * a - v * p for a, p in zip(row, prow)]
            g = 0
            for a in new:
                if a:
                    g = math.gcd(g, a)
                    if g == 1:
                        break
            if g > 1:
                new = [a // g for a in new]
            matrix[r] = new
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Protocol simulation: two players evaluate an ADT on x AND y
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolTranscript:
    """Bit exchange of the ADT simulation: 2 bits per visited node."""

    bits: tuple[tuple[str, int], ...]  # (speaker, bit), speakers 'A' and 'B'
    output: Fraction

    @property
    def cost(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        rounds = [
            f"A:{self.bits[i][1]} B:{self.bits[i + 1][1]}"
            for i in range(0, len(self.bits), 2)
        ]
        return " | ".join(rounds) if rounds else "(no communication)"


def simulate_protocol(t: AndDecisionTree, x: BitVec, y: BitVec) -> ProtocolTranscript:
    """Each node: Alice sends AND of her bits on S, Bob his, branch on a&b."""
    if x.n != y.n:
        raise ValueError("players' inputs over different ground sets")
    bits: list[tuple[str, int]] = []
    node = t
    while isinstance(node, ADTNode):
        a = 1 if node.query & ~x.mask == 0 else 0
        b = 1 if node.query & ~y.mask == 0 else 0
        bits.append(("A", a))
        bits.append(("B", b))
        node = node.high if a & b else node.low
    return ProtocolTranscript(tuple(bits), node.value)


# ---------------------------------------------------------------------------
# Unique-disjointness embedding from an MBS witness
# ---------------------------------------------------------------------------


def udisj_value(a: int, b: int) -> int | None:
    """UDISJ on index sets: 1 if disjoint, 0 if they share exactly one
    element, undefined otherwise."""
    inter = popcount(a & b)
    if inter == 0:
        return 1
    if inter == 1:
        return 0
    return None


@dataclass(frozen=True)
class UdisjEmbedding:
    """Maps a, b in {0,1}^k into inputs of f(x AND y) realizing UDISJ_k."""

    f: MultilinearPoly
    k: int
    base: int
    blocks: tuple[int, ...]
    flip: int  # c; 1 exactly when f(base) = 0

    def x_of(self, a: int) -> BitVec:
        m = self.base
        for i in range(self.k):
            if a >> i & 1:
                m |= self.blocks[i]
        return BitVec(self.f.n, m)

    def y_of(self, b: int) -> BitVec:
        return self.x_of(b)

    def check(self, a: int, b: int) -> bool:
        expected = udisj_value(a, b)
        if expected is None:
            return True
        got = evaluate_mask(self.f, self.x_of(a).mask & self.y_of(b).mask)
        if got not in (0, 1):
            return False
        return expected == int(got) ^ self.flip


_EMBED_CHECK_LIMIT = 12


def udisj_embedding(f: MultilinearPoly, witness: PackingWitness) -> UdisjEmbedding:
    """Build the sub-matrix embedding from k disjoint flipping blocks.

    x(a) = base OR the blocks picked by a (same for y); the flip bit is set
    exactly when f(base) = 0.  For k <= 12 every defined pair (a, b) with
    |a AND b| <= 1 is checked before the embedding is returned.
    """
    if witness.n != f.n:
        raise ValueError("witness over a different ground set")
    if not witness.verify():
        raise ValueError("witness blocks are not disjoint")
    base_val = evaluate_mask(f, witness.base)
    if base_val not in (0, 1):
        raise ValueError("embedding needs a boolean-valued function")
    for blk in witness.blocks:
        if evaluate_mask(f, witness.base | blk) == base_val:
            raise ValueError("witness block does not flip the function")
    emb = UdisjEmbedding(
        f, len(witness.blocks), witness.base, witness.blocks, int(base_val == 0)
    )
    if emb.k <= _EMBED_CHECK_LIMIT:
        for a, b in iter_udisj_pairs(emb.k):
            if not emb.check(a, b):
                raise AssertionError("embedding violates the UDISJ identity")
    return emb


def iter_udisj_pairs(k: int):
    """All (a, b) with |a AND b| <= 1, without scanning all 4^k pairs."""
    disjoint = [(0, 0)]
    for i in range(k):
        bit = 1 << i
        disjoint = [
            p
            for a, b in disjoint
            for p in ((a, b), (a | bit, b), (a, b | bit))
        ]
    yield from disjoint
    for i in range(k):
        bit = 1 << i
        rest = [(0, 0)]
        for j in range(k):
            if j == i:
                continue
            bj = 1 << j
            rest = [
                p
                for a, b in rest
                for p in ((a, b), (a | bj, b), (a, b | bj))
            ]
        for a, b in rest:
            yield a | bit, b | bit


# ---------------------------------------------------------------------------
# End-to-end pipelines
# ---------------------------------------------------------------------------


@dataclass
class PipelineReport:
    """Everything the constructive pipeline produces for one function.

    Exact bounds carry their margins; the asymptotic statements of the
    theory appear only as ratio entries, never as assertions.
    """

    n: int
    spar: int
    n_monomials: int
    l1: Fraction
    measures: MeasureReport
    zero_depth: int
    zero_depth_bound: int
    adt_depth: int
    adt_depth_bound: int
    greedy_size: int
    greedy_bound: int
    protocol_cost: int
    protocol_cost_bound: int
    protocol_pairs_checked: int
    protocol_exhaustive: bool
    rank: int | None
    spar_cap: int  # 3^adt_depth
    ratios: dict[str, float] = field(default_factory=dict)
    udisj_k: int | None = None

    def sparsity_bounds_hold(self) -> bool:
        return self.spar <= self.spar_cap and self.l1 <= self.spar_cap


@lru_cache(maxsize=1 << 14)
def ceil_mul_log(coeff: Fraction, r: int) -> int:
    """Exact ceil(coeff * ln r) for r >= 1.

    ln r is irrational for integer r >= 2, so a 60-digit evaluation decides
    the ceiling exactly; r = 1 is the only rational case and returns 0.
    """
    if r < 1:
        raise ValueError("log bound needs r >= 1")
    if r == 1 or coeff == 0:
        return 0
    import mpmath

    with mpmath.workdps(60):
        val = mpmath.mpf(coeff.numerator) / coeff.denominator * mpmath.log(r)
        return int(mpmath.ceil(val))


@lru_cache(maxsize=1 << 14)
def floor_mul_log(coeff: Fraction, r: int) -> int:
    if r < 1:
        raise ValueError("log bound needs r >= 1")
    if r == 1 or coeff == 0:
        return 0
    import mpmath

    with mpmath.workdps(60):
        val = mpmath.mpf(coeff.numerator) / coeff.denominator * mpmath.log(r)
        return int(mpmath.floor(val))


_PROTOCOL_EXHAUSTIVE_LIMIT = 8


def _pipeline(
    f: MultilinearPoly,
    protocol_samples: int = 2000,
    seed: int = 0,
    with_rank: bool = True,
) -> tuple[AndDecisionTree, PipelineReport]:
    check_capacity(f.n, 20, "pipeline")
    report_measures = global_measures(f)
    tree = build_zero_dt(f)
    adt = zero_dt_to_adt(tree, f.n)
    if not adt_verify(adt, f):
        raise AssertionError("pipeline ADT fails to compute the function")

    zero_depth = dt_zero_depth(tree)
    spar = f.spar
    fhsc = report_measures.fhsc
    zero_bound = ceil_mul_log(2 * fhsc, max(spar, 1)) + 1
    depth = adt_depth(adt)
    depth_bound = zero_depth * ceil_log2(f.n + 1)

    mon = f.monomials()
    if mon:
        hs, _ = greedy_cover(SetSystem(f.n, mon))
        from .optkern import fractional_cover

        local_k = fractional_cover(SetSystem(f.n, mon)).value
        greedy_size = hs.size
        greedy_bound = floor_mul_log(local_k, len(mon)) + 1
    else:
        greedy_size, greedy_bound = 0, 1

    table = to_table(f)
    size = 1 << f.n
    cost_max = 0
    exhaustive = f.n <= _PROTOCOL_EXHAUSTIVE_LIMIT
    if exhaustive:
        pairs = ((x, y) for x in range(size) for y in range(size))
        npairs = size * size
    else:
        import random

        rng = random.Random(seed)
        sampled = [(rng.randrange(size), rng.randrange(size)) for _ in range(protocol_samples)]
        pairs = iter(sampled)
        npairs = protocol_samples
    for x, y in pairs:
        tr = simulate_protocol(adt, BitVec(f.n, x), BitVec(f.n, y))
        if tr.output != table.values[x & y]:
            raise AssertionError("protocol output disagrees with f(x AND y)")
        if tr.cost > cost_max:
            cost_max = tr.cost

    rank = comm_rank(f) if with_rank and f.n <= RANK_GUARD else None
    cap = 3 ** depth

    ratios: dict[str, float] = {}
    if report_measures.mbs > 0:
        ratios["fmbs_over_mbs_sq"] = float(
            Fraction(report_measures.fmbs) / report_measures.mbs**2
        )
    if spar > 1:
        log_spar = math.log(spar)
        ratios["mbs_over_log2_spar"] = report_measures.mbs / log_spar**2
        ratios["hsc_over_fhsc_log_spar"] = float(report_measures.hsc) / (
            float(report_measures.fhsc) * log_spar
        ) if report_measures.fhsc > 0 else 0.0

    rep = PipelineReport(
        n=f.n,
        spar=spar,
        n_monomials=f.n_monomials,
        l1=l1_norm(f),
        measures=report_measures,
        zero_depth=zero_depth,
        zero_depth_bound=zero_bound,
        adt_depth=depth,
        adt_depth_bound=depth_bound,
        greedy_size=greedy_size,
        greedy_bound=greedy_bound,
        protocol_cost=cost_max,
        protocol_cost_bound=2 * depth,
        protocol_pairs_checked=npairs,
        protocol_exhaustive=exhaustive,
        rank=rank,
        spar_cap=cap,
        ratios=ratios,
    )
    return adt, rep


def logrank_pipeline(f: MultilinearPoly, seed: int = 0) -> tuple[AndDecisionTree, PipelineReport]:
    """measures -> zero-DT -> ADT -> protocol, with every margin recorded."""
    return _pipeline(f, seed=seed)


def lifting_report(f: MultilinearPoly, seed: int = 0) -> PipelineReport:
    """The pipeline report extended with the UDISJ side of the lifting story:
    the MBS witness is embedded and its size reported next to the cost of the
    constructed protocol (no constant between them is asserted)."""
    adt, rep = _pipeline(f, seed=seed)
    witness = rep.measures.mbs_witness
    if witness.size > 0 and to_table(f).is_boolean():
        emb = udisj_embedding(f, witness)
        rep.udisj_k = emb.k
    else:
        rep.udisj_k = 0
    return rep
