import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from andlift.poly import MultilinearPoly, TruthTable, mobius_invert


def bool_table(n, pred):
    return TruthTable.from_values(n, [1 if pred(z) else 0 for z in range(1 << n)])


def all_tables(n):
    for code in range(1 << (1 << n)):
        yield TruthTable.from_values(n, [code >> j & 1 for j in range(1 << n)])


FANO_LINES = [(1, 2, 3), (2, 4, 6), (3, 4, 5), (1, 4, 7), (2, 5, 7), (3, 6, 7), (1, 5, 6)]
FANO_MASKS = tuple(sum(1 << (i - 1) for i in line) for line in FANO_LINES)


@pytest.fixture(scope="session")
def or3():
    return mobius_invert(bool_table(3, lambda z: z != 0))


@pytest.fixture(scope="session")
def and3():
    return MultilinearPoly.from_terms(3, {0b111: 1})


@pytest.fixture(scope="session")
def maj4():
    return mobius_invert(bool_table(4, lambda z: bin(z).count("1") >= 2))


@pytest.fixture(scope="session")
def fano_or():
    return mobius_invert(
        bool_table(7, lambda z: any(z & m == m for m in FANO_MASKS))
    )
