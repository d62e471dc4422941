import random
from fractions import Fraction

import pytest

from andlift.errors import DisjointifyError
from andlift.measures import (
    MeasureReport,
    SmoothDistribution,
    block_collapse,
    block_sensitivity,
    degree,
    disjointify,
    global_measures,
    local_measures,
    minimal_sets,
    sensitive_family,
    sensitivity,
    smooth_flip_probability,
)
from andlift.optkern import HittingSet, PackingWitness, SetSystem
from andlift.poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    evaluate,
    mobius_invert,
    to_table,
)

from conftest import FANO_MASKS, all_tables, bool_table
from oracles import flip_family, minimal_members


class TestSensitiveFamily:
    def test_or3(self, or3):
        fam = sensitive_family(or3, BitVec.zero(3))
        assert fam.blocks.sets == (1, 2, 4)

    def test_and3(self, and3):
        fam = sensitive_family(and3, BitVec.zero(3))
        assert fam.blocks.sets == (0b111,)

    def test_majority4_at_point_matches_brute_force(self, maj4):
        table = to_table(maj4)
        z = 1  # the point {1}
        fam = sensitive_family(maj4, BitVec(4, z))
        expected = minimal_members(flip_family(table.values, 4, z))
        assert list(fam.blocks.sets) == expected

    def test_matches_brute_force_exhaustive_n3(self):
        for t in all_tables(3):
            p = mobius_invert(t)
            for z in range(8):
                fam = sensitive_family(p, BitVec(3, z))
                expected = minimal_members(flip_family(t.values, 3, z))
                assert list(fam.blocks.sets) == expected

    def test_matches_brute_force_random_n5(self):
        rng = random.Random(12)
        for _ in range(25):
            t = TruthTable.from_values(5, [rng.randrange(2) for _ in range(32)])
            p = mobius_invert(t)
            z = rng.randrange(32)
            fam = sensitive_family(p, BitVec(5, z))
            assert list(fam.blocks.sets) == minimal_members(
                flip_family(t.values, 5, z)
            )

    def test_constant_function_gives_empty_family(self):
        p = MultilinearPoly.constant(4, 1)
        fam = sensitive_family(p, BitVec.zero(4))
        assert fam.blocks.sets == ()

    def test_works_on_rational_valued_functions(self):
        p = MultilinearPoly.from_terms(3, {1: Fraction(1, 2), 6: Fraction(2, 3)})
        fam = sensitive_family(p, BitVec.zero(3))
        assert fam.blocks.sets == (1, 6)


class TestLocalMeasures:
    def test_majority4_at_zero(self, maj4):
        rep = local_measures(maj4, BitVec.zero(4))
        assert (rep.mbs, rep.fmbs, rep.fhsc, rep.hsc) == (2, 2, 2, 3)
        assert rep.mbs_witness.verify()
        assert rep.hsc_witness.size == 3

    def test_fano_at_zero(self, fano_or):
        rep = local_measures(fano_or, BitVec.zero(7))
        assert rep.mbs == 1
        assert rep.fmbs == Fraction(7, 3)
        assert rep.fmbs_distribution.smoothness == Fraction(3, 7)

    def test_constant(self):
        rep = local_measures(MultilinearPoly.constant(5, 0), BitVec.zero(5))
        assert (rep.mbs, rep.fmbs, rep.fhsc, rep.hsc) == (0, 0, 0, 0)
        assert rep.fmbs_distribution is None

    def test_chain_exhaustive_n3(self):
        for t in all_tables(3):
            p = mobius_invert(t)
            for z in range(8):
                rep = local_measures(p, BitVec(3, z))
                assert rep.mbs <= rep.fmbs == rep.fhsc <= rep.hsc


class TestGlobalMeasures:
    def test_and_or_two_clauses(self):
        # AND of (x_j OR y_j), x block then y block
        f = mobius_invert(
            bool_table(4, lambda z: all(z >> j & 1 or z >> (2 + j) & 1 for j in range(2)))
        )
        rep = global_measures(f)
        assert rep.hsc == 2 and rep.mbs == 2

    def test_or_n(self):
        for n in (3, 5):
            f = mobius_invert(bool_table(n, lambda z: z != 0))
            rep = global_measures(f)
            assert rep.mbs == n and rep.hsc == n
            assert rep.argmax["mbs"].mask == 0

    def test_argmax_is_smallest_index(self, maj4):
        rep = global_measures(maj4)
        # maj4 restricted above any single 1 becomes a 3-bit OR-like function
        assert rep.mbs == 3
        assert rep.argmax["mbs"].mask == 1


class TestAuxiliaries:
    def test_sensitivity_examples(self):
        for n in (3, 5):
            and_t = bool_table(n, lambda z: z == (1 << n) - 1)
            assert sensitivity(and_t) == n
        assert sensitivity(bool_table(3, lambda z: z != 0)) == 3

    def test_degree_majority4(self, maj4):
        assert degree(maj4) == 4

    def test_rejects_non_boolean(self):
        t = TruthTable.from_values(2, [0, 2, 0, 1])
        with pytest.raises(ValueError):
            sensitivity(t)
        with pytest.raises(ValueError):
            block_sensitivity(t)

    def test_block_sensitivity_vs_sensitivity(self):
        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(2, 4)
            t = TruthTable.from_values(n, [rng.randrange(2) for _ in range(1 << n)])
            assert block_sensitivity(t) >= sensitivity(t)

    def test_mbs_bounded_by_block_sensitivity_exhaustive_n3(self):
        for t in all_tables(3):
            p = mobius_invert(t)
            bs = block_sensitivity(t)
            for z in range(8):
                assert local_measures(p, BitVec(3, z)).mbs <= bs


class TestBlockCollapse:
    def test_identity_collapse(self, or3):
        blocks = SetSystem(3, (1, 2, 4))
        g = block_collapse(or3, BitVec.zero(3), blocks)
        assert g == or3

    def test_merge_two_variables(self, or3):
        g = block_collapse(or3, BitVec.zero(3), SetSystem(3, (0b011, 0b100)))
        or2 = mobius_invert(bool_table(2, lambda z: z != 0))
        assert g == or2
        # oracle: evaluate on all 4 collapsed inputs
        for x in range(4):
            lifted = (0b011 if x & 1 else 0) | (0b100 if x & 2 else 0)
            assert evaluate(g, BitVec(2, x)) == evaluate(or3, BitVec(3, lifted))

    def test_and3_with_base(self, and3):
        g = block_collapse(and3, BitVec.from_indices(3, [3]), SetSystem(3, (1, 2)))
        assert dict(g.terms) == {0b11: Fraction(1)}

    def test_overlap_rejected(self, or3):
        with pytest.raises(ValueError):
            block_collapse(or3, BitVec.zero(3), SetSystem(3, (0b011, 0b010)))
        with pytest.raises(ValueError):
            block_collapse(or3, BitVec.from_indices(3, [1]), SetSystem(3, (0b001,)))

    def test_collapse_of_mbs_witness_has_full_sensitivity(self):
        rng = random.Random(31)
        for _ in range(20):
            n = rng.randint(2, 4)
            t = TruthTable.from_values(n, [rng.randrange(2) for _ in range(1 << n)])
            p = mobius_invert(t)
            rep = global_measures(p)
            if rep.mbs == 0:
                continue
            w = rep.mbs_witness
            g = block_collapse(
                p, BitVec(n, w.base), SetSystem(n, w.blocks)
            )
            assert g.spar <= p.spar
            gt = to_table(g)
            k = len(w.blocks)
            flips = sum(gt.values[1 << i] != gt.values[0] for i in range(k))
            assert flips == k  # S(g) >= k at the all-zeros point


class TestSmoothDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            SmoothDistribution.from_weights(3, [])
        with pytest.raises(ValueError):
            SmoothDistribution.from_weights(3, [(1, Fraction(1, 2))])
        with pytest.raises(ValueError):
            SmoothDistribution.from_weights(3, [(1, Fraction(1, 2)), (1, Fraction(1, 2))])

    def test_smoothness_is_max_marginal(self):
        d = SmoothDistribution.from_weights(
            3, [(0b011, Fraction(1, 2)), (0b110, Fraction(1, 2))]
        )
        assert d.smoothness == 1  # variable 2 occurs in both atoms


class TestSmoothFlip:
    def test_point_masses(self, or3):
        z = BitVec.zero(3)
        flip = SmoothDistribution.from_weights(3, [(1, Fraction(1))])
        assert smooth_flip_probability(or3, z, flip) == 1
        stay = SmoothDistribution.from_weights(3, [(0, Fraction(1))])
        assert smooth_flip_probability(or3, z, stay) == 0

    def test_or3_uniform_singletons(self, or3):
        z = BitVec.zero(3)
        d = SmoothDistribution.uniform(3, [1, 2, 4])
        assert d.smoothness == Fraction(1, 3)
        flip = smooth_flip_probability(or3, z, d)
        assert flip == 1
        fmbs = local_measures(or3, z).fmbs
        assert fmbs == 3
        assert flip <= d.smoothness * fmbs

    def test_bound_random(self):
        rng = random.Random(77)
        for _ in range(150):
            n = rng.randint(2, 6)
            t = TruthTable.from_values(n, [rng.randrange(2) for _ in range(1 << n)])
            p = mobius_invert(t)
            zmask = rng.randrange(1 << n)
            comp = ((1 << n) - 1) & ~zmask
            support = {rng.randrange(1 << n) & comp for _ in range(rng.randint(1, 5))}
            weights = [(m, rng.randint(1, 6)) for m in support]
            total = sum(w for _, w in weights)
            d = SmoothDistribution.from_weights(
                n, [(m, Fraction(w, total)) for m, w in weights]
            )
            z = BitVec(n, zmask)
            flip = smooth_flip_probability(p, z, d)
            assert flip <= d.smoothness * local_measures(p, z).fmbs

    def test_support_must_avoid_point(self, or3):
        d = SmoothDistribution.from_weights(3, [(1, Fraction(1))])
        with pytest.raises(ValueError):
            smooth_flip_probability(or3, BitVec.from_indices(3, [1]), d)


class TestDisjointify:
    def test_or9_uniform_singletons(self):
        n = 9
        orn = mobius_invert(bool_table(n, lambda z: z != 0))
        d = SmoothDistribution.uniform(n, [1 << i for i in range(n)])
        w = disjointify(orn, BitVec.zero(n), d, seed=3)
        assert w.size >= 1 and w.verify()

    def test_fano_uniform_lines(self, fano_or):
        d = SmoothDistribution.uniform(7, FANO_MASKS)
        # p = 3/7 gives k = 1: a single sampled line is already a witness
        w = disjointify(fano_or, BitVec.zero(7), d, seed=0)
        assert w.size == 1
        assert w.blocks[0] in FANO_MASKS

    def test_witness_always_verifies(self, fano_or):
        d = SmoothDistribution.uniform(7, FANO_MASKS)
        for seed in range(25):
            w = disjointify(fano_or, BitVec.zero(7), d, seed=seed)
            assert w.verify()
            base_val = evaluate(fano_or, BitVec(7, w.base))
            for b in w.blocks:
                assert evaluate(fano_or, BitVec(7, w.base | b)) != base_val

    def test_exhausted_attempts_raise(self, or3):
        d = SmoothDistribution.uniform(3, [1, 2, 4])
        with pytest.raises(DisjointifyError):
            disjointify(or3, BitVec.zero(3), d, seed=0, max_attempts=0)

    def test_rejects_non_flipping_support(self, and3):
        d = SmoothDistribution.uniform(3, [1])  # {1} does not flip AND_3 at 0
        with pytest.raises(ValueError):
            disjointify(and3, BitVec.zero(3), d, seed=0)


class TestMeasureReport:
    def test_chain_asserted_at_construction(self):
        with pytest.raises(AssertionError):
            MeasureReport(
                point=BitVec.zero(2),
                mbs=3,
                fmbs=Fraction(2),
                fhsc=Fraction(2),
                hsc=2,
                mbs_witness=PackingWitness(2, ()),
                hsc_witness=HittingSet(2, 0),
                fmbs_distribution=None,
                fhsc_weights=(),
            )


class TestMinimalSets:
    def test_filters_supersets(self):
        assert minimal_sets([0b111, 0b011, 0b101, 0b001]) == (0b001,)
        assert minimal_sets([0b011, 0b101, 0b111]) == (0b011, 0b101)
        assert minimal_sets([]) == ()
