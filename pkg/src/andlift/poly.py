"""Exact representations of functions f : {0,1}^n -> Q.

Two interchangeable forms are provided:

  TruthTable       dense vector of 2^n rational values
  MultilinearPoly  sparse map {monomial support -> nonzero coefficient}

Conventions used across the whole package (and fixed in the file format):

  * Variables are 1-indexed: x_1 .. x_n.
  * A point z in {0,1}^n is identified with the subset {i : z_i = 1} and
    encoded as an integer bitmask in which variable i occupies bit i-1.
  * Truth tables are indexed little-endian: entry j holds the value at the
    point whose bitmask is j.
  * Monomial supports inside MultilinearPoly.terms use the same bitmask
    encoding; BitVec wraps a mask whenever a value crosses the public API.
  * All coefficients and values are fractions.Fraction - exact, never float.

The unique multilinear polynomial with f(z) = sum of coeff[S] over S subset
of z is obtained from a table by the in-place subset Mobius transform and
inverted by the subset zeta transform (both n * 2^n steps).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import FormatError, check_capacity

RationalLike = Fraction | int

DENSE_TABLE_GUARD = 24  # 2^24 rationals is the most a dense table may hold

_ZERO = Fraction(0)


def _as_fraction(v: RationalLike) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True, slots=True)
class BitVec:
    """A subset of [n], stored as a bitmask (variable i at bit i-1)."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} out of range for n={self.n}")

    @classmethod
    def zero(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "BitVec":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "BitVec":
        mask = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"index {i} outside [1, {n}]")
            mask |= 1 << (i - 1)
        return cls(n, mask)

    def _check(self, other: "BitVec") -> None:
        if self.n != other.n:
            raise ValueError(f"mixed ground sets: n={self.n} vs n={other.n}")

    def __or__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.mask | other.mask)

    def __and__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.mask & other.mask)

    def __sub__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.n, self.mask & ~other.mask)

    def issubset(self, other: "BitVec") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "BitVec") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def __le__(self, other: "BitVec") -> bool:
        return self.issubset(other)

    def __contains__(self, index: int) -> bool:
        return 1 <= index <= self.n and bool(self.mask >> (index - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def indices(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def __str__(self) -> str:
        return format_index_set(self.mask)


def popcount(mask: int) -> int:
    return mask.bit_count()


def format_index_set(mask: int) -> str:
    """Render a mask as ``{i,j,...}`` with 1-based indices (``{}`` if empty)."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(str(i))
        mask >>= 1
        i += 1
    return "{" + ",".join(out) + "}"


def parse_index_set(text: str, n: int | None = None, line: int | None = None) -> int:
    """Parse ``{i,j,...}`` into a mask, validating indices against n if given."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise FormatError(f"expected an index set like {{1,3}}, got {text!r}", line)
    body = text[1:-1].strip()
    mask = 0
    if body:
        for part in body.split(","):
            try:
                i = int(part)
            except ValueError:
                raise FormatError(f"bad index {part!r} in {text!r}", line) from None
            if i < 1 or (n is not None and i > n):
                raise FormatError(f"index {i} outside [1, {n}]", line)
            bit = 1 << (i - 1)
            if mask & bit:
                raise FormatError(f"repeated index {i} in {text!r}", line)
            mask |= bit
    return mask


@dataclass(frozen=True)
class TruthTable:
    """Dense vector of 2^n values; entry j is the value at point with mask j."""

    n: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError(
                f"table for n={self.n} needs {1 << self.n} values, got {len(self.values)}"
            )

    @classmethod
    def from_values(cls, n: int, values: Iterable[RationalLike]) -> "TruthTable":
        return cls(n, tuple(_as_fraction(v) for v in values))

    def is_boolean(self) -> bool:
        return all(v == 0 or v == 1 for v in self.values)

    def value_at(self, z: BitVec) -> Fraction:
        if z.n != self.n:
            raise ValueError("point over a different ground set")
        return self.values[z.mask]


@dataclass(frozen=True)
class MultilinearPoly:
    """Sparse multilinear polynomial: terms maps support masks to coefficients.

    Invariants: no stored coefficient is zero and every mask fits in n bits.
    spar counts all terms including the constant; mon / n_monomials exclude it.
    Instances are immutable by convention - never mutate ``terms``.
    """

    n: int
    terms: Mapping[int, Fraction]

    @classmethod
    def from_terms(
        cls, n: int, terms: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]]
    ) -> "MultilinearPoly":
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, Fraction] = {}
        for mask, coeff in items:
            if not 0 <= mask < (1 << n):
                raise ValueError(f"monomial mask {mask} out of range for n={n}")
            c = _as_fraction(coeff)
            if c != 0:
                clean[mask] = clean.get(mask, _ZERO) + c
        for mask in [m for m, c in clean.items() if c == 0]:
            del clean[mask]
        return cls(n, clean)

    @classmethod
    def zero(cls, n: int) -> "MultilinearPoly":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, value: RationalLike) -> "MultilinearPoly":
        return cls.from_terms(n, {0: value})

    @property
    def spar(self) -> int:
        """Number of nonzero coefficients, constant term included."""
        return len(self.terms)

    @property
    def n_monomials(self) -> int:
        """|mon|: nonzero non-constant monomials (constant excluded)."""
        return len(self.terms) - (1 if 0 in self.terms else 0)

    def monomials(self) -> tuple[int, ...]:
        """Support masks of the non-constant monomials, ascending."""
        return tuple(sorted(m for m in self.terms if m))

    def coefficient(self, support: BitVec | int) -> Fraction:
        mask = support.mask if isinstance(support, BitVec) else support
        return self.terms.get(mask, _ZERO)

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(0, _ZERO)

    def is_constant(self) -> bool:
        return self.n_monomials == 0

    def is_boolean(self) -> bool:
        """True if every coefficient is an integer and all values are 0/1.

        Cheap necessary check first; the full check scans all 2^n values.
        """
        if any(c.denominator != 1 for c in self.terms.values()):
            return False
        return to_table(self).is_boolean()

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.terms), default=0)


def mobius_invert(t: TruthTable) -> MultilinearPoly:
    """Coefficients from values: the in-place subset Mobius transform.

    coeff[T] = sum over S subset of T of (-1)^(|T|-|S|) value[S]; the returned
    polynomial evaluates identically to the table on every point.
    """
    check_capacity(t.n, DENSE_TABLE_GUARD, "mobius_invert")
    n = t.n
    size = 1 << n
    if all(v.denominator == 1 for v in t.values):
        vals: list = [v.numerator for v in t.values]
    else:
        vals = list(t.values)
    for i in range(n):
        bit = 1 << i
        for mask in range(size):
            if mask & bit:
                vals[mask] = vals[mask] - vals[mask ^ bit]
    return MultilinearPoly.from_terms(n, ((m, v) for m, v in enumerate(vals) if v))


def to_table(p: MultilinearPoly) -> TruthTable:
    """Values from coefficients: the subset zeta transform (inverse of Mobius)."""
    check_capacity(p.n, DENSE_TABLE_GUARD, "to_table")
    n = p.n
    size = 1 << n
    vals: list = [0] * size
    for m, c in p.terms.items():
        vals[m] = vals[m] + c
    for i in range(n):
        bit = 1 << i
        for mask in range(size):
            if mask & bit:
                vals[mask] = vals[mask] + vals[mask ^ bit]
    return TruthTable(n, tuple(_as_fraction(v) for v in vals))


def evaluate(p: MultilinearPoly, z: BitVec) -> Fraction:
    """Value at z: the sum of coefficients of supports contained in z."""
    if z.n != p.n:
        raise ValueError("point over a different ground set")
    return evaluate_mask(p, z.mask)


def evaluate_mask(p: MultilinearPoly, zmask: int) -> Fraction:
    total = _ZERO
    for m, c in p.terms.items():
        if m & ~zmask == 0:
            total += c
    return total


def restrict_ones(p: MultilinearPoly, z: BitVec) -> MultilinearPoly:
    """Fix every variable of z to 1.

    The result lives over the same index space but never mentions variables
    of z; for any w disjoint from z it satisfies result(w) = p(z | w).
    Supports map to S \\ z with colliding coefficients summed exactly.
    """
    if z.n != p.n:
        raise ValueError("point over a different ground set")
    return restrict_ones_mask(p, z.mask)


def restrict_ones_mask(p: MultilinearPoly, zmask: int) -> MultilinearPoly:
    if zmask == 0:
        return p
    keep = ~zmask
    out: dict[int, Fraction] = {}
    for m, c in p.terms.items():
        key = m & keep
        acc = out.get(key)
        out[key] = c if acc is None else acc + c
    for key in [k for k, c in out.items() if c == 0]:
        del out[key]
    return MultilinearPoly(p.n, out)


def restrict_zero(p: MultilinearPoly, i: int) -> MultilinearPoly:
    """Fix variable i to 0: every monomial containing i is dropped."""
    if not 1 <= i <= p.n:
        raise ValueError(f"variable {i} outside [1, {p.n}]")
    bit = 1 << (i - 1)
    return MultilinearPoly(p.n, {m: c for m, c in p.terms.items() if not m & bit})


def l1_norm(p: MultilinearPoly) -> Fraction:
    """Sum of absolute coefficient values."""
    total = _ZERO
    for c in p.terms.values():
        total += abs(c)
    return total


# ---------------------------------------------------------------------------
# Function file format (the interchange for every CLI subcommand)
#
#   # comment lines start with '#'
#   n=<int>
#   table
#   <2^n whitespace-separated rationals in index order>
# or
#   n=<int>
#   poly
#   {i,j,...}: <rational>     one line per monomial; {} is the constant term
# ---------------------------------------------------------------------------


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _parse_rational(token: str, line: int | None = None) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational {token!r}", line) from None


def parse_function(text: str) -> TruthTable | MultilinearPoly:
    """Parse the function file format; returns whichever form the file holds."""
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty function file")
    lineno, header = lines[0]
    if not header.startswith("n="):
        raise FormatError("expected header 'n=<int>'", lineno)
    try:
        n = int(header[2:])
    except ValueError:
        raise FormatError(f"bad variable count {header[2:]!r}", lineno) from None
    if n < 0:
        raise FormatError("variable count must be nonnegative", lineno)
    if len(lines) < 2:
        raise FormatError("missing 'table' or 'poly' section", lineno)
    lineno, kind = lines[1]
    if kind == "table":
        check_capacity(n, DENSE_TABLE_GUARD, "table file")
        tokens: list[tuple[int, str]] = []
        for ln, line in lines[2:]:
            tokens.extend((ln, tok) for tok in line.split())
        if len(tokens) != 1 << n:
            raise FormatError(
                f"table for n={n} needs {1 << n} values, got {len(tokens)}", lineno
            )
        return TruthTable(n, tuple(_parse_rational(tok, ln) for ln, tok in tokens))
    if kind == "poly":
        terms: dict[int, Fraction] = {}
        for ln, line in lines[2:]:
            if ":" not in line:
                raise FormatError("expected '{i,j,...}: <rational>'", ln)
            left, right = line.split(":", 1)
            mask = parse_index_set(left, n, ln)
            if mask in terms:
                raise FormatError(f"repeated monomial {left.strip()}", ln)
            coeff = _parse_rational(right.strip(), ln)
            if coeff != 0:
                terms[mask] = coeff
        return MultilinearPoly(n, terms)
    raise FormatError(f"expected 'table' or 'poly', got {kind!r}", lineno)


def load_poly(text: str) -> MultilinearPoly:
    """Parse a function file and return it as a polynomial (tables inverted)."""
    f = parse_function(text)
    if isinstance(f, TruthTable):
        return mobius_invert(f)
    return f


def format_table(t: TruthTable) -> str:
    lines = [f"n={t.n}", "table"]
    row = 1 << min(t.n, 3)
    vals = [str(v) for v in t.values]
    lines.extend(" ".join(vals[i : i + row]) for i in range(0, len(vals), row))
    return "\n".join(lines) + "\n"


def format_poly(p: MultilinearPoly) -> str:
    lines = [f"n={p.n}", "poly"]
    for mask in sorted(p.terms):
        lines.append(f"{format_index_set(mask)}: {p.terms[mask]}")
    return "\n".join(lines) + "\n"
