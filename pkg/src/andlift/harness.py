"""Verification harness: brute-force checks of every constructive inequality.

Each check either asserts (and reports a violation count that must be zero)
or measures extremal ratios for the asymptotic statements, never both.  The
whole suite is deterministic given (mode, max_n, samples, seed); per-check
RNGs are derived from the seed and a fixed per-check salt.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator

from . import comm, measures, trees, zoo
from .comm import ceil_mul_log, floor_mul_log
from .errors import DisjointifyError
from .measures import SmoothDistribution, _family_measures, _local_family, minimal_sets
from .optkern import SetSystem, fractional_cover, fractional_pack, greedy_cover
from .poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    evaluate_mask,
    l1_norm,
    mobius_invert,
    popcount,
    restrict_ones_mask,
    restrict_zero,
    to_table,
)
from .report import frac_from_str, frac_to_str
from .trees import adt_depth, adt_to_dt, adt_verify, build_zero_dt, ceil_log2, dt_evaluate_mask, dt_zero_depth, zero_dt_to_adt
from .zoo import FamilySpec, dichotomy, generate

_ZERO = Fraction(0)


@dataclass
class CheckResult:
    """Outcome of one named check: an assertion count or a ratio table."""

    name: str
    instances: int
    violations: int | None = None
    ratios: dict[str, float] | None = None
    seconds: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if (self.violations is None) == (self.ratios is None):
            raise ValueError("a check either asserts or reports ratios, never both")

    @property
    def ok(self) -> bool:
        return self.violations is None or self.violations == 0

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "instances": self.instances,
            "violations": self.violations,
            "ratios": self.ratios,
            "seconds": round(self.seconds, 3),
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CheckResult":
        return cls(
            name=data["name"],
            instances=data["instances"],
            violations=data["violations"],
            ratios=data["ratios"],
            seconds=data["seconds"],
            detail=data.get("detail", ""),
        )


@dataclass
class VerificationReport:
    mode: str
    max_n: int
    samples: int
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "max_n": self.max_n,
            "samples": self.samples,
            "seed": self.seed,
            "ok": self.ok,
            "checks": [c.to_json() for c in self.checks],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "VerificationReport":
        return cls(
            mode=data["mode"],
            max_n=data["max_n"],
            samples=data["samples"],
            seed=data["seed"],
            checks=[CheckResult.from_json(c) for c in data["checks"]],
        )

    def format_text(self) -> str:
        lines = [
            f"verification suite: mode={self.mode} max_n={self.max_n} "
            f"samples={self.samples} seed={self.seed}"
        ]
        for c in self.checks:
            if c.violations is not None:
                status = "PASS" if c.violations == 0 else "FAIL"
                lines.append(
                    f"  [{status}] {c.name}: {c.instances} instances, "
                    f"{c.violations} violations ({c.seconds:.1f}s)"
                )
            else:
                ratios = ", ".join(f"{k}={v:.4f}" for k, v in sorted(c.ratios.items()))
                lines.append(
                    f"  [RATIO] {c.name}: {c.instances} instances, "
                    f"{ratios} ({c.seconds:.1f}s)"
                )
            if c.detail:
                lines.append(f"          {c.detail}")
        lines.append("overall: " + ("OK" if self.ok else "VIOLATIONS FOUND"))
        return "\n".join(lines)


def _rng(seed: int, salt: int, index: int = 0) -> random.Random:
    return random.Random(seed * 1_000_003 + salt * 7_919 + index)


def _random_table(n: int, rng: random.Random) -> TruthTable:
    return TruthTable.from_values(n, [rng.randrange(2) for _ in range(1 << n)])


def _all_tables(n: int) -> Iterator[TruthTable]:
    one = Fraction(1)
    zero = Fraction(0)
    for code in range(1 << (1 << n)):
        yield TruthTable(
            n, tuple(one if code >> j & 1 else zero for j in range(1 << n))
        )


def _corpus(max_n: int, exhaustive: bool, samples: int, seed: int):
    """Functions fed to the per-function checks: all tables on max_n
    variables, or seeded random tables with n <= max_n."""
    if exhaustive:
        for t in _all_tables(max_n):
            yield t
    else:
        for idx in range(samples):
            rng = _rng(seed, 11, idx)
            n = rng.randint(2, max_n)
            yield _random_table(n, rng)


# ---------------------------------------------------------------------------
# The per-function mega-pass: chain, restriction monotonicity, MBS <= bs,
# tree bounds, greedy bound, protocol, ADT simulation, ratio statistics
# ---------------------------------------------------------------------------


def _xor_flip_family(vals, n: int, z: int):
    v = vals[z]
    flips = [w for w in range(1, 1 << n) if vals[z ^ w] != v]
    return minimal_sets(flips)


def _per_function_checks(
    corpus: Iterable[TruthTable], exhaustive: bool
) -> list[CheckResult]:
    t0 = time.perf_counter()
    chain_violations = 0
    chain_instances = 0
    restr_violations = 0
    restr_instances = 0
    bs_violations = 0
    bs_instances = 0
    tree_violations = 0
    tree_instances = 0
    greedy_violations = 0
    greedy_instances = 0
    protocol_violations = 0
    protocol_instances = 0
    sim_violations = 0
    sim_instances = 0

    r_fmbs_mbs = 0.0
    r_mbs_logspar = 0.0
    r_hsc_log = 0.0
    r_sens_deg = 0.0
    ratio_instances = 0

    global_fhsc: dict[tuple[int, tuple], Fraction] = {}
    tables = []

    for table in corpus:
        n = table.n
        size = 1 << n
        f = mobius_invert(table)
        vals = table.values

        fhsc_max = _ZERO
        mbs_max = 0
        hsc_max = 0
        fmbs_max = _ZERO
        bs_max = 0
        for z in range(size):
            fam = _local_family(f, z)
            chain_instances += 1
            if not (fam.mbs <= fam.fmbs == fam.fhsc <= fam.hsc):
                chain_violations += 1
            if fam.fhsc > fhsc_max:
                fhsc_max = fam.fhsc
            if fam.fmbs > fmbs_max:
                fmbs_max = fam.fmbs
            if fam.mbs > mbs_max:
                mbs_max = fam.mbs
            if fam.hsc > hsc_max:
                hsc_max = fam.hsc
            xor_blocks = _xor_flip_family(vals, n, z)
            bs_here = _family_measures(frozenset(xor_blocks)).mbs
            if bs_here > bs_max:
                bs_max = bs_here
            bs_instances += 1
            if fam.mbs > bs_here:
                bs_violations += 1

        tables.append((n, tuple(vals), fhsc_max))
        global_fhsc[(n, tuple(vals))] = fhsc_max

        # ratio statistics for the asymptotic claims (reported, not asserted)
        ratio_instances += 1
        if mbs_max > 0:
            r_fmbs_mbs = max(r_fmbs_mbs, float(fmbs_max) / mbs_max**2)
        if f.spar > 1:
            ls = math.log(f.spar)
            r_mbs_logspar = max(r_mbs_logspar, mbs_max / ls**2)
            if fhsc_max > 0:
                r_hsc_log = max(r_hsc_log, hsc_max / (float(fhsc_max) * ls))
        deg = f.degree
        if deg > 0:
            r_sens_deg = max(r_sens_deg, measures.sensitivity(table) / deg**2)

        # constructive tree pipeline
        tree_instances += 1
        tree = build_zero_dt(f)
        zd = dt_zero_depth(tree)
        tree_ok = all(dt_evaluate_mask(tree, z) == vals[z] for z in range(size))
        spar = f.spar
        zbound = ceil_mul_log(2 * fhsc_max, max(spar, 1)) + 1
        adt = zero_dt_to_adt(tree, n)
        depth = adt_depth(adt)
        adt_ok = all(
            trees.adt_evaluate_mask(adt, z) == vals[z] for z in range(size)
        )
        cap = 3**depth
        if not (
            tree_ok
            and adt_ok
            and zd <= zbound
            and depth <= zd * ceil_log2(n + 1)
            and spar <= cap
            and l1_norm(f) <= cap
        ):
            tree_violations += 1

        mon = f.monomials()
        greedy_instances += 1
        if mon:
            system = SetSystem(n, mon)
            hs, _ = greedy_cover(system)
            k = fractional_cover(system).value
            if hs.size > floor_mul_log(k, len(mon)) + 1:
                greedy_violations += 1

        sim_instances += 1
        sim = adt_to_dt(adt, n)
        sim_ok = all(dt_evaluate_mask(sim, z) == vals[z] for z in range(size))
        if not sim_ok or dt_zero_depth(sim) > depth:
            sim_violations += 1

        for x in range(size):
            for y in range(size):
                tr = comm.simulate_protocol(adt, BitVec(n, x), BitVec(n, y))
                protocol_instances += 1
                if tr.output != vals[x & y] or tr.cost > 2 * depth:
                    protocol_violations += 1

        for i in range(1, n + 1):
            for b in (0, 1):
                restr_instances += 1
                if b == 0:
                    g = restrict_zero(f, i)
                else:
                    g = restrict_ones_mask(f, 1 << (i - 1))
                key_vals = tuple(to_table(g).values)
                cached = global_fhsc.get((n, key_vals))
                if cached is None:
                    cached = _ZERO
                    for z in range(size):
                        v = _local_family(g, z).fhsc
                        if v > cached:
                            cached = v
                    global_fhsc[(n, key_vals)] = cached
                if cached > fhsc_max:
                    restr_violations += 1

    elapsed = time.perf_counter() - t0
    per = elapsed / 8
    return [
        CheckResult("chain_mbs_fmbs_fhsc_hsc", chain_instances, chain_violations, seconds=per),
        CheckResult("fhsc_nonincreasing_under_restriction", restr_instances, restr_violations, seconds=per),
        CheckResult("mbs_le_block_sensitivity", bs_instances, bs_violations, seconds=per),
        CheckResult("zero_dt_and_adt_bounds", tree_instances, tree_violations, seconds=per),
        CheckResult("greedy_cover_ln_bound", greedy_instances, greedy_violations, seconds=per),
        CheckResult("adt_to_dt_zero_depth", sim_instances, sim_violations, seconds=per),
        CheckResult("protocol_cost_and_output", protocol_instances, protocol_violations, seconds=per),
        CheckResult(
            "asymptotic_ratio_table",
            ratio_instances,
            ratios={
                "max_fmbs_over_mbs_sq": r_fmbs_mbs,
                "max_mbs_over_log2_spar": r_mbs_logspar,
                "max_hsc_over_fhsc_ln_spar": r_hsc_log,
                "max_sensitivity_over_deg_sq": r_sens_deg,
            },
            seconds=per,
        ),
    ]


# ---------------------------------------------------------------------------
# Stand-alone checks
# ---------------------------------------------------------------------------


def _check_duality(samples: int, seed: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    count = max(100, samples)
    for idx in range(count):
        rng = _rng(seed, 23, idx)
        n = rng.randint(2, 10)
        r = rng.randint(1, min(12, (1 << n) - 1))
        pool = list(range(1, 1 << n))
        rng.shuffle(pool)
        system = SetSystem(n, tuple(pool[:r]))
        pack = fractional_pack(system)
        cover = fractional_cover(system)
        if pack.value != cover.value:
            violations += 1
        if any(w > 1 for w in cover.primal.values()):
            violations += 1  # dropped b_i <= 1 bounds must never be active
    return CheckResult(
        "lp_strong_duality_random_systems", count, violations,
        seconds=time.perf_counter() - t0,
    )


def _check_rank(exhaustive_n: int, samples: int, seed: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    instances = 0
    for t in _all_tables(min(exhaustive_n, 3)):
        p = mobius_invert(t)
        instances += 1
        if comm.comm_rank(p) != p.spar:
            violations += 1
    for idx in range(max(20, samples // 10)):
        rng = _rng(seed, 31, idx)
        n = rng.randint(2, 6)
        p = mobius_invert(_random_table(n, rng))
        instances += 1
        if comm.comm_rank(p) != p.spar:
            violations += 1
    return CheckResult(
        "rank_equals_sparsity", instances, violations,
        seconds=time.perf_counter() - t0,
    )


def _check_smooth_noise(samples: int, seed: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    count = max(100, samples)
    for idx in range(count):
        rng = _rng(seed, 41, idx)
        n = rng.randint(2, 8)
        table = _random_table(n, rng)
        f = mobius_invert(table)
        z = BitVec(n, rng.randrange(1 << n))
        free = [i for i in range(1, n + 1) if i not in z]
        if not free:
            continue
        support = set()
        for _ in range(rng.randint(1, 6)):
            m = 0
            for i in free:
                if rng.randrange(2):
                    m |= 1 << (i - 1)
            support.add(m)
        weights = [(m, rng.randint(1, 8)) for m in support]
        total = sum(w for _, w in weights)
        d = SmoothDistribution.from_weights(
            n, [(m, Fraction(w, total)) for m, w in weights]
        )
        flip = measures.smooth_flip_probability(f, z, d)
        fmbs = _local_family(f, z.mask).fmbs
        if flip > d.smoothness * fmbs:
            violations += 1
    return CheckResult(
        "smooth_noise_bound", count, violations, seconds=time.perf_counter() - t0
    )


def _disjointify_family(seed: int):
    """Deterministic instances: zoo families plus random monotone DNFs with
    the LP-optimal distribution of their own block family."""
    fano = generate(FamilySpec("projective_plane", 2))
    fano_blocks = minimal_sets(m for m in fano.terms if m)
    yield fano, BitVec.zero(7), SmoothDistribution.uniform(7, fano_blocks)
    for n in (6, 9, 12):
        orf = generate(FamilySpec("or", n))
        yield orf, BitVec.zero(n), SmoothDistribution.uniform(
            n, [1 << i for i in range(n)]
        )
    rng = _rng(seed, 53)
    for _ in range(4):
        n = rng.randint(5, 8)
        terms = set()
        for _ in range(rng.randint(2, 4)):
            m = 0
            while popcount(m) < 2:
                m = rng.randrange(1, 1 << n)
            terms.add(m)
        table = TruthTable.from_values(
            n, [1 if any(z & m == m for m in terms) else 0 for z in range(1 << n)]
        )
        f = mobius_invert(table)
        fam = _local_family(f, 0)
        if fam.fmbs == 0:
            continue
        dist = SmoothDistribution.from_weights(
            f.n, [(m, w / fam.fmbs) for m, w in fam.pack_weights]
        )
        yield f, BitVec.zero(n), dist


def _check_disjointify(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    instances = list(_disjointify_family(seed))
    runs = 100
    successes = 0
    bad_witness = 0
    for run in range(runs):
        f, z, d = instances[run % len(instances)]
        try:
            w = measures.disjointify(f, z, d, seed=seed * 977 + run, max_attempts=20)
        except DisjointifyError:
            continue
        base_val = evaluate_mask(f, w.base)
        if not w.verify() or any(
            evaluate_mask(f, w.base | b) == base_val for b in w.blocks
        ):
            bad_witness += 1
            continue
        successes += 1
    violations = bad_witness + (1 if successes < runs // 2 else 0)
    return CheckResult(
        "disjointify_success_and_validity",
        runs,
        violations,
        seconds=time.perf_counter() - t0,
        detail=f"{successes}/{runs} runs succeeded within 20 attempts",
    )


def _check_udisj(seed: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    instances = 0
    for k in range(1, 9):
        orf = generate(FamilySpec("or", k))
        witness = measures.local_measures(orf, BitVec.zero(k)).mbs_witness
        try:
            emb = comm.udisj_embedding(orf, witness)
        except AssertionError:
            violations += 1
            continue
        for a, b in comm.iter_udisj_pairs(emb.k):
            instances += 1
            if not emb.check(a, b):
                violations += 1
    for idx in range(10):
        rng = _rng(seed, 61, idx)
        n = rng.randint(3, 6)
        table = _random_table(n, rng)
        f = mobius_invert(table)
        rep = measures.global_measures(f)
        if rep.mbs == 0:
            continue
        emb = comm.udisj_embedding(f, rep.mbs_witness)
        for a, b in comm.iter_udisj_pairs(emb.k):
            instances += 1
            if not emb.check(a, b):
                violations += 1
    return CheckResult(
        "udisj_embedding", instances, violations, seconds=time.perf_counter() - t0
    )


def _check_threshold(max_n: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    instances = 0
    for n in range(4, min(max_n + 4, 9)):
        instances += 1
        try:
            err = trees.threshold_error(n)
        except AssertionError:
            violations += 1
            continue
        if err > Fraction(1, 2):
            violations += 1
    return CheckResult(
        "threshold_randomized_adt", instances, violations,
        seconds=time.perf_counter() - t0,
    )


def _check_dichotomy(samples: int, seed: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    count = max(20, samples // 4)
    for idx in range(count):
        rng = _rng(seed, 71, idx)
        n = rng.randint(3, 10)
        r = rng.randint(1, min(20, (1 << n) - 1))
        pool = list(range(1, 1 << n))
        rng.shuffle(pool)
        system = SetSystem(n, tuple(pool[:r]))
        m = rng.randint(1, 4)
        res = dichotomy(system, m)
        if res.kind == "hitting":
            if res.mbs >= m or not res.hitting_set.verify(system.sets):
                violations += 1
        else:
            t = res.t_mask.mask
            residual = {mask & ~t for mask in system.sets if mask & ~t}
            blocks = [b.mask for b in res.disjoint_sets]
            acc = 0
            ok = len(blocks) >= m
            for b in blocks:
                if b & acc or b not in residual:
                    ok = False
                acc |= b
            if not ok:
                violations += 1
    return CheckResult(
        "set_system_dichotomy", count, violations, seconds=time.perf_counter() - t0
    )


def _check_zoo_values(max_n: int) -> CheckResult:
    t0 = time.perf_counter()
    violations = 0
    instances = 0

    def expect(cond: bool):
        nonlocal violations, instances
        instances += 1
        if not cond:
            violations += 1

    fano = generate(FamilySpec("projective_plane", 2))
    rep = measures.local_measures(fano, BitVec.zero(7))
    expect(rep.mbs == 1)
    expect(rep.fmbs == Fraction(7, 3))

    for n in (4, 6):
        maj = generate(FamilySpec("majority", n))
        rep = measures.local_measures(maj, BitVec.zero(n))
        expect(rep.fhsc == 2)
        expect(rep.hsc == n // 2 + 1)

    for k in (2, 3):
        ao = generate(FamilySpec("and_or", k))
        g = measures.global_measures(ao)
        expect(g.hsc == 2)
        expect(g.mbs == 2)

    ri = generate(FamilySpec("redundant_indexing", 2))
    expect(ri.spar == 4)
    expect(measures.global_measures(ri).hsc <= 2)

    for n in (3, 5, 7):
        th = generate(FamilySpec("threshold", n))
        expect(th.spar == n + 1)
        expect(l1_norm(th) >= th.spar)

    for n in (3, 5):
        orf = generate(FamilySpec("or", n))
        expect(measures.global_measures(orf).mbs == n)
        andf = generate(FamilySpec("and", n))
        expect(measures.global_measures(andf).mbs == 1)

    for n in (4, 6):
        gap = generate(FamilySpec("first_zero_gap", n))
        tree = build_zero_dt(gap)
        expect(dt_zero_depth(tree) <= 2)
        adt = zero_dt_to_adt(tree, n)
        expect(3 ** adt_depth(adt) >= gap.spar)

    return CheckResult(
        "zoo_paper_values", instances, violations, seconds=time.perf_counter() - t0
    )


EXHAUSTIVE_MAX_N = 5
SAMPLED_MAX_N = 10


def run_suite(
    max_n: int = 3,
    exhaustive: bool = True,
    samples: int = 200,
    seed: int = 0,
    progress: Callable[[str], None] | None = None,
) -> VerificationReport:
    """Run the whole inequality suite; the CI gate is report.ok."""
    from .errors import CapacityError

    if exhaustive and max_n > EXHAUSTIVE_MAX_N:
        raise CapacityError(f"exhaustive mode is limited to n <= {EXHAUSTIVE_MAX_N}")
    if not exhaustive and max_n > SAMPLED_MAX_N:
        raise CapacityError(f"sampled mode is limited to n <= {SAMPLED_MAX_N}")
    report = VerificationReport(
        mode="exhaustive" if exhaustive else "sampled",
        max_n=max_n,
        samples=samples,
        seed=seed,
    )

    def note(msg: str):
        if progress:
            progress(msg)

    note("per-function checks")
    report.checks.extend(
        _per_function_checks(_corpus(max_n, exhaustive, samples, seed), exhaustive)
    )
    note("lp duality")
    report.checks.append(_check_duality(samples, seed))
    note("rank vs sparsity")
    report.checks.append(_check_rank(max_n, samples, seed))
    note("smooth noise")
    report.checks.append(_check_smooth_noise(samples, seed))
    note("disjointify")
    report.checks.append(_check_disjointify(seed))
    note("udisj embeddings")
    report.checks.append(_check_udisj(seed))
    note("threshold adt")
    report.checks.append(_check_threshold(max_n))
    note("dichotomy")
    report.checks.append(_check_dichotomy(samples, seed))
    note("zoo values")
    report.checks.append(_check_zoo_values(max_n))
    return report
