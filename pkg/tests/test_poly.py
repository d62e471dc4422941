import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from andlift.errors import CapacityError, FormatError
from andlift.poly import (
    BitVec,
    MultilinearPoly,
    TruthTable,
    evaluate,
    format_poly,
    format_table,
    l1_norm,
    load_poly,
    mobius_invert,
    parse_function,
    restrict_ones,
    restrict_zero,
    to_table,
)

from conftest import FANO_MASKS, all_tables, bool_table
from oracles import eval_poly, naive_mobius


class TestBitVec:
    def test_set_operations(self):
        a = BitVec.from_indices(5, [1, 3])
        b = BitVec.from_indices(5, [3, 4])
        assert (a | b).indices() == (1, 3, 4)
        assert (a & b).indices() == (3,)
        assert (a - b).indices() == (1,)
        assert a.issubset(a | b)
        assert not a.issubset(b)
        assert a.isdisjoint(BitVec.from_indices(5, [2, 5]))
        assert 3 in a and 2 not in a
        assert str(a) == "{1,3}"
        assert a.weight == 2

    def test_mismatched_ground_sets_rejected(self):
        with pytest.raises(ValueError):
            BitVec(3, 1) | BitVec(4, 1)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            BitVec(2, 4)
        with pytest.raises(ValueError):
            BitVec.from_indices(2, [3])


class TestMobius:
    def test_or2(self):
        p = mobius_invert(TruthTable.from_values(2, [0, 1, 1, 1]))
        assert p.spar == 3
        assert p.coefficient(0b11) == -1
        table = TruthTable.from_values(2, [0, 1, 1, 1])
        for z in range(4):
            assert evaluate(p, BitVec(2, z)) == table.values[z]

    def test_constant_zero(self):
        p = mobius_invert(TruthTable.from_values(2, [0, 0, 0, 0]))
        assert p.spar == 0 and p.terms == {}

    def test_and3(self):
        p = mobius_invert(bool_table(3, lambda z: z == 0b111))
        assert dict(p.terms) == {0b111: Fraction(1)}

    def test_matches_naive_transform_small(self):
        for n in range(3):
            for t in all_tables(n):
                assert dict(mobius_invert(t).terms) == naive_mobius(t.values, n)
        for t in all_tables(3):
            assert dict(mobius_invert(t).terms) == naive_mobius(t.values, 3)

    def test_matches_naive_on_random_rational_n4(self):
        rng = random.Random(42)
        for _ in range(50):
            vals = [
                Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(16)
            ]
            t = TruthTable.from_values(4, vals)
            assert dict(mobius_invert(t).terms) == naive_mobius(vals, 4)

    def test_capacity_guard(self, monkeypatch):
        monkeypatch.setenv("ANDLIFT_CAPACITY", "4")
        with pytest.raises(CapacityError):
            mobius_invert(TruthTable.from_values(5, [0] * 32))
        monkeypatch.delenv("ANDLIFT_CAPACITY")
        mobius_invert(TruthTable.from_values(5, [0] * 32))

    def test_round_trip_exhaustive_n3(self):
        for t in all_tables(3):
            assert to_table(mobius_invert(t)) == t

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_round_trip_random_rational(self, data):
        n = data.draw(st.integers(min_value=0, max_value=6))
        vals = data.draw(
            st.lists(
                st.fractions(min_value=-5, max_value=5, max_denominator=7),
                min_size=1 << n,
                max_size=1 << n,
            )
        )
        t = TruthTable.from_values(n, vals)
        assert to_table(mobius_invert(t)) == t

    def test_round_trip_random_rational_n8(self):
        rng = random.Random(7)
        vals = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(256)]
        t = TruthTable.from_values(8, vals)
        assert to_table(mobius_invert(t)) == t


class TestEvaluate:
    def test_or2_at_singleton(self):
        p = MultilinearPoly.from_terms(2, {1: 1, 2: 1, 3: -1})
        assert evaluate(p, BitVec.from_indices(2, [1])) == 1

    def test_empty_point_gives_constant(self):
        p = MultilinearPoly.from_terms(3, {0: Fraction(5, 3), 0b101: 2})
        assert evaluate(p, BitVec.zero(3)) == Fraction(5, 3)

    def test_majority4_at_pair(self, maj4):
        # oracle: the defining threshold test
        assert evaluate(maj4, BitVec.from_indices(4, [1, 2])) == 1

    def test_against_direct_sum_oracle(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(1, 6)
            terms = {
                rng.randrange(1 << n): Fraction(rng.randint(-4, 4))
                for _ in range(rng.randint(0, 8))
            }
            p = MultilinearPoly.from_terms(n, terms)
            for z in range(1 << n):
                assert evaluate(p, BitVec(n, z)) == eval_poly(dict(p.terms), z)


class TestRestrict:
    def test_restrict_monomial(self):
        p = MultilinearPoly.from_terms(2, {0b11: 1})
        q = restrict_ones(p, BitVec.from_indices(2, [1]))
        assert dict(q.terms) == {0b10: Fraction(1)}

    def test_restrict_or2_cancels(self):
        p = MultilinearPoly.from_terms(2, {1: 1, 2: 1, 3: -1})
        q = restrict_ones(p, BitVec.from_indices(2, [1]))
        assert dict(q.terms) == {0: Fraction(1)}
        # oracle: evaluate both sides on w in {empty, {2}}
        for w in (0, 2):
            assert eval_poly(dict(q.terms), w) == eval_poly(dict(p.terms), 1 | w)

    def test_restrict_by_empty_is_identity(self, maj4):
        assert restrict_ones(maj4, BitVec.zero(4)) == maj4

    def test_restriction_identity_exhaustive_n6(self):
        rng = random.Random(9)
        terms = {
            rng.randrange(64): Fraction(rng.randint(-3, 3)) for _ in range(12)
        }
        p = MultilinearPoly.from_terms(6, terms)
        for z in range(64):
            q = restrict_ones(p, BitVec(6, z))
            w = (~z) & 63
            sub = w
            while True:
                assert evaluate(q, BitVec(6, sub)) == evaluate(p, BitVec(6, z | sub))
                if sub == 0:
                    break
                sub = (sub - 1) & w

    def test_restrict_zero_drops_monomials(self):
        p = MultilinearPoly.from_terms(2, {1: 1, 2: 1, 3: -1})
        q = restrict_zero(p, 1)
        assert dict(q.terms) == {2: Fraction(1)}
        assert restrict_zero(MultilinearPoly.from_terms(2, {3: 1}), 2).spar == 0

    def test_fano_sum_poly_point_restriction(self):
        # the all-ones polynomial of the Fano lines: 7 monomials, and each
        # point lies on exactly 3 lines, so setting it to 0 keeps 4
        p = MultilinearPoly.from_terms(7, {m: 1 for m in FANO_MASKS})
        for i in range(1, 8):
            assert restrict_zero(p, i).spar == 4

    def test_spar_never_increases(self):
        rng = random.Random(17)
        for _ in range(40):
            n = rng.randint(1, 7)
            terms = {
                rng.randrange(1 << n): Fraction(rng.randint(-3, 3))
                for _ in range(rng.randint(1, 10))
            }
            p = MultilinearPoly.from_terms(n, terms)
            z = rng.randrange(1 << n)
            assert restrict_ones(p, BitVec(n, z)).spar <= p.spar
            i = rng.randint(1, n)
            assert restrict_zero(p, i).spar <= p.spar


class TestL1:
    def test_examples(self):
        p = MultilinearPoly.from_terms(2, {1: 1, 2: 1, 3: -1})
        assert l1_norm(p) == 3
        assert l1_norm(MultilinearPoly.zero(3)) == 0

    def test_threshold3(self):
        # |x| >= 2 on three variables; sparsity n + 1 = 4
        p = mobius_invert(bool_table(3, lambda z: bin(z).count("1") >= 2))
        assert p.spar == 4
        assert l1_norm(p) >= p.spar


class TestBooleanCoefficients:
    def test_integer_coefficients_exhaustive_n3(self):
        for t in all_tables(3):
            p = mobius_invert(t)
            assert all(c.denominator == 1 for c in p.terms.values())


class TestSparMonCount:
    def test_spar_vs_mon(self):
        p = MultilinearPoly.from_terms(2, {0: 1, 1: 1})
        assert p.spar == 2 and p.n_monomials == 1
        q = MultilinearPoly.from_terms(2, {1: 1})
        assert q.spar == 1 and q.n_monomials == 1


class TestFileFormat:
    def test_poly_round_trip(self, maj4):
        assert parse_function(format_poly(maj4)) == maj4

    def test_table_round_trip(self):
        t = TruthTable.from_values(2, [0, Fraction(1, 3), 1, Fraction(-2, 7)])
        assert parse_function(format_table(t)) == t

    def test_load_poly_inverts_tables(self):
        text = "n=2\ntable\n0 1 1 1\n"
        p = load_poly(text)
        assert p.spar == 3

    def test_comments_and_blank_lines(self):
        text = "# a function\nn=2\n\npoly\n{1}: 1  # the first variable\n"
        p = parse_function(text)
        assert dict(p.terms) == {1: Fraction(1)}

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(FormatError, match="line 1"):
            parse_function("m=2\npoly\n")
        with pytest.raises(FormatError, match="line 3"):
            parse_function("n=2\npoly\n{9}: 1\n")
        with pytest.raises(FormatError, match="bad rational"):
            parse_function("n=2\npoly\n{1}: x\n")
        with pytest.raises(FormatError):
            parse_function("n=2\ntable\n0 1 1\n")
        with pytest.raises(FormatError):
            parse_function("")

    def test_duplicate_monomial_rejected(self):
        with pytest.raises(FormatError, match="repeated"):
            parse_function("n=2\npoly\n{1}: 1\n{1}: 2\n")
