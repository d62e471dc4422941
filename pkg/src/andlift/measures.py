"""The four complexity measures and their witnesses.

Local measures at a point z are computed on the family of minimal flipping
blocks, which by the monomial-lattice characterization equals the set of
minimal monomials of the restriction of f to the ones of z.  Blocks are
therefore extracted from the sparse polynomial, never by scanning all 2^n
inputs; that is what keeps global scans at n <= 20 feasible.

All four measures depend only on the block family, so results are memoized
per family and shared across points and functions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DisjointifyError, check_capacity
from .optkern import (
    HittingSet,
    LpResult,
    PackingWitness,
    SetSystem,
    fractional_cover,
    fractional_pack,
    integral_cover,
    integral_pack,
)
from .poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    evaluate_mask,
    popcount,
    restrict_ones_mask,
)

GLOBAL_SCAN_GUARD = 20

_ZERO = Fraction(0)
_ONE = Fraction(1)


def minimal_sets(masks) -> tuple[int, ...]:
    """Minimal elements of a family of masks under set inclusion, sorted."""
    by_size = sorted(set(masks), key=popcount)
    out: list[int] = []
    for m in by_size:
        if not any(r & m == r for r in out):
            out.append(m)
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class SensitiveFamily:
    """Minimal blocks flipping f at the base point; blocks avoid the base."""

    base: BitVec
    blocks: SetSystem

    def __post_init__(self):
        if self.blocks.n != self.base.n:
            raise ValueError("blocks over a different ground set")
        for m in self.blocks.sets:
            if m & self.base.mask:
                raise ValueError("block intersects the base point")


def sensitive_family(f: MultilinearPoly, z: BitVec) -> SensitiveFamily:
    """Minimal flipping blocks at z, read off the restricted polynomial.

    Every returned block is re-verified to flip the function value at z.
    The family is empty iff f is constant above z.
    """
    if z.n != f.n:
        raise ValueError("point over a different ground set")
    restricted = restrict_ones_mask(f, z.mask)
    blocks = minimal_sets(m for m in restricted.terms if m)
    base_value = evaluate_mask(f, z.mask)
    for b in blocks:
        if evaluate_mask(f, z.mask | b) == base_value:
            raise AssertionError(
                "minimal monomial does not flip the function; "
                "the polynomial representation is inconsistent"
            )
    return SensitiveFamily(z, SetSystem(f.n, blocks))


@dataclass(frozen=True)
class SmoothDistribution:
    """A distribution over blocks; smoothness = its largest coordinate marginal."""

    n: int
    support: tuple[tuple[int, Fraction], ...]
    smoothness: Fraction

    @classmethod
    def from_weights(cls, n: int, weights) -> "SmoothDistribution":
        items = tuple((m, Fraction(p)) for m, p in weights)
        if not items:
            raise ValueError("a distribution needs at least one atom")
        total = _ZERO
        seen = set()
        for m, p in items:
            if not 0 <= m < (1 << n):
                raise ValueError(f"block mask {m} out of range for n={n}")
            if m in seen:
                raise ValueError("repeated block in support")
            seen.add(m)
            if p <= 0:
                raise ValueError("probabilities must be positive")
            total += p
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        p_max = _ZERO
        for i in range(n):
            bit = 1 << i
            marginal = _ZERO
            for m, p in items:
                if m & bit:
                    marginal += p
            if marginal > p_max:
                p_max = marginal
        return cls(n, items, p_max)

    @classmethod
    def uniform(cls, n: int, masks) -> "SmoothDistribution":
        masks = tuple(masks)
        w = Fraction(1, len(masks))
        return cls.from_weights(n, [(m, w) for m in masks])

    def support_vecs(self) -> tuple[tuple[BitVec, Fraction], ...]:
        return tuple((BitVec(self.n, m), p) for m, p in self.support)


@dataclass(frozen=True)
class _FamilyMeasures:
    """Measures of one block family; n-free, shared across points."""

    mbs: int
    pack_blocks: tuple[int, ...]
    fmbs: Fraction
    pack_weights: tuple[tuple[int, Fraction], ...]
    fhsc: Fraction
    cover_weights: tuple[tuple[int, Fraction], ...]
    hsc: int
    hitting_mask: int


_EMPTY_MEASURES = _FamilyMeasures(0, (), _ZERO, (), _ZERO, (), 0, 0)


@lru_cache(maxsize=1 << 18)
def _family_measures(blocks: frozenset[int]) -> _FamilyMeasures:
    if not blocks:
        return _EMPTY_MEASURES
    n = max(blocks).bit_length()
    system = SetSystem(n, tuple(sorted(blocks)))
    mbs, pack_witness = integral_pack(system)
    pack = fractional_pack(system)
    cover = fractional_cover(system)
    hsc, hitting = integral_cover(system)
    pack_weights = tuple(
        (system.sets[j], w) for j, w in sorted(pack.primal.items()) if w
    )
    cover_weights = tuple(sorted(cover.primal.items()))
    return _FamilyMeasures(
        mbs,
        pack_witness.blocks,
        pack.value,
        pack_weights,
        cover.value,
        cover_weights,
        hsc,
        hitting.mask,
    )


@dataclass(frozen=True)
class MeasureReport:
    """The four measures at one point (or their maxima over all points).

    The chain mbs <= fmbs = fhsc <= hsc is asserted at construction.  For a
    global report ``point`` is None and ``argmax`` records, per measure, the
    first point (smallest index) attaining the maximum.
    """

    point: BitVec | None
    mbs: int
    fmbs: Fraction
    fhsc: Fraction
    hsc: int
    mbs_witness: PackingWitness
    hsc_witness: HittingSet
    fmbs_distribution: SmoothDistribution | None
    fhsc_weights: tuple[tuple[int, Fraction], ...]
    argmax: dict[str, BitVec] | None = None

    def __post_init__(self):
        if not (self.mbs <= self.fmbs == self.fhsc <= self.hsc):
            raise AssertionError(
                f"measure chain violated: MBS={self.mbs} FMBS={self.fmbs} "
                f"FHSC={self.fhsc} HSC={self.hsc}"
            )

    def to_json(self) -> dict:
        from .report import measure_report_to_json

        return measure_report_to_json(self)


def _report_from_family(n: int, point: BitVec | None, zmask: int, fam: _FamilyMeasures,
                        argmax: dict[str, BitVec] | None = None) -> MeasureReport:
    dist = None
    if fam.fmbs > 0:
        total = fam.fmbs
        dist = SmoothDistribution.from_weights(
            n, [(m, w / total) for m, w in fam.pack_weights]
        )
    return MeasureReport(
        point=point,
        mbs=fam.mbs,
        fmbs=fam.fmbs,
        fhsc=fam.fhsc,
        hsc=fam.hsc,
        mbs_witness=PackingWitness(n, fam.pack_blocks, zmask),
        hsc_witness=HittingSet(n, fam.hitting_mask),
        fmbs_distribution=dist,
        fhsc_weights=fam.cover_weights,
        argmax=argmax,
    )


def local_measures(f: MultilinearPoly, z: BitVec) -> MeasureReport:
    """MBS, FMBS, FHSC and HSC of f at z, with verified witnesses."""
    family = sensitive_family(f, z)
    fam = _family_measures(frozenset(family.blocks.sets))
    return _report_from_family(f.n, z, z.mask, fam)


def _local_family(f: MultilinearPoly, zmask: int) -> _FamilyMeasures:
    restricted = restrict_ones_mask(f, zmask)
    blocks = minimal_sets(m for m in restricted.terms if m)
    return _family_measures(frozenset(blocks))


def global_measures(f: MultilinearPoly) -> MeasureReport:
    """Maximum of each local measure over all 2^n points.

    Points whose restriction is constant contribute zero and are skipped.
    Ties resolve to the smallest point index, so reports are reproducible.
    """
    check_capacity(f.n, GLOBAL_SCAN_GUARD, "global_measures")
    best = {"mbs": -1, "fmbs": None, "fhsc": None, "hsc": -1}
    arg = {}
    fams = {}
    for zmask in range(1 << f.n):
        fam = _local_family(f, zmask)
        for key, value in (
            ("mbs", fam.mbs),
            ("fmbs", fam.fmbs),
            ("fhsc", fam.fhsc),
            ("hsc", fam.hsc),
        ):
            if best[key] is None or value > best[key]:
                best[key] = value
                arg[key] = zmask
                fams[key] = fam
    argmax = {k: BitVec(f.n, zm) for k, zm in arg.items()}
    mbs_fam, hsc_fam, fmbs_fam = fams["mbs"], fams["hsc"], fams["fmbs"]
    dist = None
    if fmbs_fam.fmbs > 0:
        dist = SmoothDistribution.from_weights(
            f.n, [(m, w / fmbs_fam.fmbs) for m, w in fmbs_fam.pack_weights]
        )
    return MeasureReport(
        point=None,
        mbs=best["mbs"],
        fmbs=best["fmbs"],
        fhsc=best["fhsc"],
        hsc=best["hsc"],
        mbs_witness=PackingWitness(f.n, mbs_fam.pack_blocks, arg["mbs"]),
        hsc_witness=HittingSet(f.n, hsc_fam.hitting_mask),
        fmbs_distribution=dist,
        fhsc_weights=fams["fhsc"].cover_weights,
        argmax=argmax,
    )


# ---------------------------------------------------------------------------
# Classical query-complexity auxiliaries
# ---------------------------------------------------------------------------


def _require_boolean(t: TruthTable) -> None:
    if not t.is_boolean():
        raise ValueError("this measure is defined for boolean-valued functions only")


def sensitivity(t: TruthTable) -> int:
    """Largest number of single-bit flips changing the value at one point."""
    _require_boolean(t)
    best = 0
    size = 1 << t.n
    vals = t.values
    for z in range(size):
        v = vals[z]
        count = 0
        for i in range(t.n):
            if vals[z ^ (1 << i)] != v:
                count += 1
        if count > best:
            best = count
    return best


def block_sensitivity(t: TruthTable) -> int:
    """Largest number of pairwise disjoint blocks whose XOR flips the value.

    Any flipping block contains a minimal flipping block, so the maximum is
    attained on the minimal flip family, which is handed to the exact packer.
    """
    _require_boolean(t)
    best = 0
    size = 1 << t.n
    vals = t.values
    for z in range(size):
        v = vals[z]
        flips = [w for w in range(1, size) if vals[z ^ w] != v]
        if not flips:
            continue
        blocks = minimal_sets(flips)
        bs, _ = integral_pack(SetSystem(t.n, blocks))
        if bs > best:
            best = bs
    return best


def degree(f: MultilinearPoly) -> int:
    """Largest monomial size with a nonzero coefficient."""
    return f.degree


def block_collapse(f: MultilinearPoly, z: BitVec, blocks: SetSystem) -> MultilinearPoly:
    """Identify the variables inside each block and fix the rest to z.

    Returns g over k = len(blocks) fresh variables with
    g(x) = f(z | union of blocks picked by x).  Monomials touching a
    variable outside z and all blocks are killed (those variables read 0),
    so the sparsity never increases.
    """
    if z.n != f.n or blocks.n != f.n:
        raise ValueError("point or blocks over a different ground set")
    union = 0
    for b in blocks.sets:
        if b & (union | z.mask):
            raise ValueError("blocks and base must be pairwise disjoint")
        union |= b
    k = len(blocks.sets)
    alive = z.mask | union
    out: dict[int, Fraction] = {}
    for m, c in f.terms.items():
        if m & ~alive:
            continue
        key = 0
        for i, b in enumerate(blocks.sets):
            if m & b:
                key |= 1 << i
        acc = out.get(key)
        out[key] = c if acc is None else acc + c
    for key in [kk for kk, c in out.items() if c == 0]:
        del out[key]
    return MultilinearPoly(k, out)


def smooth_flip_probability(
    f: MultilinearPoly, z: BitVec, d: SmoothDistribution
) -> Fraction:
    """Exact probability that a sample from d flips the value at z."""
    if z.n != f.n or d.n != f.n:
        raise ValueError("distribution or point over a different ground set")
    for m, _ in d.support:
        if m & z.mask:
            raise ValueError("distribution support must avoid the base point")
    base = evaluate_mask(f, z.mask)
    total = _ZERO
    for m, p in d.support:
        if evaluate_mask(f, z.mask | m) != base:
            total += p
    return total


# ---------------------------------------------------------------------------
# Randomized disjointification: from a smooth distribution to disjoint blocks
# ---------------------------------------------------------------------------


def _ceil_inv_two_sqrt(p: Fraction) -> int:
    """Smallest integer k with k >= 1/(2*sqrt(p)), i.e. 4*k^2*p >= 1."""
    if p <= 0:
        raise ValueError("smoothness must be positive")
    q = 1 / (4 * p)
    k = max(1, math.isqrt(q.numerator // q.denominator))
    while Fraction(4 * k * k) * p < 1:
        k += 1
    return k


def disjointify(
    f: MultilinearPoly,
    z: BitVec,
    d: SmoothDistribution,
    seed: int = 0,
    max_attempts: int = 20,
) -> PackingWitness:
    """Sampled conversion of a smooth family into disjoint flipping blocks.

    Draws k = ceil(1/(2*sqrt(p))) blocks i.i.d. from d, collects the doubly
    covered elements u, and keeps the attempt when the value at z survives
    adding u and at least ceil(2k/3) sampled blocks still flip after the
    overlap is removed.  On success returns the verified witness anchored at
    z' = z | u; raises DisjointifyError once max_attempts is exhausted.
    """
    if z.n != f.n or d.n != f.n:
        raise ValueError("distribution or point over a different ground set")
    base = evaluate_mask(f, z.mask)
    for m, _ in d.support:
        if m & z.mask:
            raise ValueError("distribution support must avoid the base point")
        if evaluate_mask(f, z.mask | m) == base:
            raise ValueError("distribution support must consist of flipping blocks")
    k = _ceil_inv_two_sqrt(d.smoothness)
    need = -(-2 * k // 3)

    denom = 1
    for _, p in d.support:
        denom = denom * p.denominator // math.gcd(denom, p.denominator)
    weights = []
    acc = 0
    for m, p in d.support:
        acc += int(p * denom)
        weights.append((acc, m))
    assert acc == denom

    rng = random.Random(seed)
    for _ in range(max_attempts):
        samples = []
        for _ in range(k):
            r = rng.randrange(denom)
            for cum, m in weights:
                if r < cum:
                    samples.append(m)
                    break
        u = 0
        seen = 0
        for w in samples:
            u |= seen & w
            seen |= w
        zp = z.mask | u
        if evaluate_mask(f, zp) != base:
            continue
        good = []
        for w in samples:
            if evaluate_mask(f, zp | w) != base:
                wp = w & ~u
                if wp:
                    good.append(wp)
        good = sorted(set(good))
        if len(good) < need:
            continue
        witness = PackingWitness(f.n, tuple(good), zp)
        if not witness.verify():
            raise AssertionError("disjointified blocks are not pairwise disjoint")
        for b in witness.blocks:
            if evaluate_mask(f, zp | b) == evaluate_mask(f, zp):
                raise AssertionError("disjointified block does not flip the value")
        return witness
    raise DisjointifyError(
        f"no verified witness in {max_attempts} attempts (k={k}, need={need})"
    )
