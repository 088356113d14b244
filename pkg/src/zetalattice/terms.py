"""Lattice zeta terms: interval 0/1 matrices with column exponents.

A *pattern* is a d x w matrix of 0/1 entries whose every row is a contiguous
run of 1s (an interval [a, b] inside [1, w]), whose every column is covered by
at least one row, and whose rows are linearly independent over the rationals.
Attaching one summation variable n_i > 0 to each row, every column c gives a
positive linear form

    L_c(n) = sum of n_i over the rows covering c,

and a *term* is a rational multiple of the lattice sum

    coefficient * sum over n in N^d of  prod_c L_c(n) ** (-k_c),

with one positive integer exponent k_c per column.  The weight (sum of all
exponents) equals the width of the fully expanded matrix; the depth is the
number of rows.  Nested row supports make the sum a multiple zeta value; the
engine in ``engine.py`` rewrites every term into those.

Words here follow the convention that the first entry is the exponent of the
*largest* summation variable, so zeta(2,1) = sum over m > n >= 1 of
1/(m^2 n) and a word is admissible (convergent) iff its first part is >= 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import (
    MalformedInterval,
    NotChain,
    ParseError,
    RankDeficient,
    ZeroColumn,
    IntervalBroken,
)
from . import linalg

Rat = Fraction
Word = tuple[int, ...]
MZVCombination = dict[Word, Rat]


# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class Pattern:
    """Row intervals over a fixed number of columns.  Rows are (start, end),
    1-based inclusive, in no particular order until canonicalized."""

    width: int
    rows: tuple[tuple[int, int], ...]

    @property
    def depth(self) -> int:
        return len(self.rows)

    def covers(self, row: int, col: int) -> bool:
        a, b = self.rows[row]
        return a <= col <= b

    def column_vector(self, col: int) -> tuple[int, ...]:
        """0/1 flags over the rows, for the 1-based column ``col``."""
        return tuple(1 if self.covers(i, col) else 0 for i in range(self.depth))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column_vector(c) for c in range(1, self.width + 1)]

    def row_starts(self) -> list[int]:
        return [a for a, _ in self.rows]


def validate_pattern(rows: Sequence[Sequence[int]], width: int) -> Pattern:
    """Full well-formedness check; raises MalformedInterval / ZeroColumn /
    RankDeficient.  Returns the pattern with rows in the given order."""
    if width < 1:
        raise MalformedInterval(f"width must be >= 1, got {width}")
    if not rows:
        raise MalformedInterval("a pattern needs at least one row")
    rr = []
    for r in rows:
        if len(r) != 2:
            raise MalformedInterval(f"row {r!r} is not a (start, end) pair")
        a, b = int(r[0]), int(r[1])
        if not (1 <= a <= b <= width):
            raise MalformedInterval(f"row ({a},{b}) out of bounds for width {width}")
        rr.append((a, b))
    pat = Pattern(width, tuple(rr))
    for c in range(1, width + 1):
        if all(not pat.covers(i, c) for i in range(pat.depth)):
            raise ZeroColumn(c)
    if linalg.rank(pat.columns()) != pat.depth:
        raise RankDeficient(f"rows {rr} are linearly dependent")
    return pat


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Term:
    pattern: Pattern
    exponents: tuple[int, ...]
    coefficient: Rat

    @property
    def depth(self) -> int:
        return self.pattern.depth

    @property
    def width(self) -> int:
        return self.pattern.width

    @property
    def weight(self) -> int:
        return sum(self.exponents)

    def with_coefficient(self, c: Rat) -> "Term":
        return replace(self, coefficient=Rat(c))

    def scaled(self, c: Rat) -> "Term":
        return replace(self, coefficient=self.coefficient * Rat(c))

    def __str__(self) -> str:
        rows = ",".join(f"({a},{b})" for a, b in self.pattern.rows)
        return f"Term[{self.coefficient} * rows {rows}; k={list(self.exponents)}]"


def term(
    rows: Sequence[Sequence[int]],
    exponents: Sequence[int],
    coefficient: Union[Rat, int, str] = 1,
    width: Optional[int] = None,
) -> Term:
    """Validating constructor.  Width defaults to the number of exponents."""
    if width is None:
        width = len(exponents)
    pat = validate_pattern(rows, width)
    exps = tuple(int(k) for k in exponents)
    if len(exps) != width:
        raise MalformedInterval(
            f"{len(exps)} exponents for width {width}"
        )
    if any(k < 1 for k in exps):
        raise MalformedInterval(f"exponents must be positive, got {exps}")
    return Term(pat, exps, _as_rat(coefficient))


def _as_rat(x) -> Rat:
    if isinstance(x, str):
        try:
            return Rat(x)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"bad rational {x!r}: {e}") from None
    return Rat(x)


# ---------------------------------------------------------------------------
# canonical form

# Two columns are mergeable iff they are covered by the same set of rows; any
# row straddling the gap between two such copies would have to cover both, so
# pulling the later copy next to the earlier one keeps every row contiguous.


def canonical_term(t: Term) -> Term:
    """Sort rows by (start, end), merge duplicate columns into exponents,
    keep the surviving column order as the interval-structure witness."""
    order = sorted(range(t.depth), key=lambda i: t.pattern.rows[i])
    rows = [t.pattern.rows[i] for i in order]
    pat = Pattern(t.width, tuple(rows))
    cover = [
        frozenset(i for i in range(pat.depth) if pat.covers(i, c))
        for c in range(1, pat.width + 1)
    ]
    exps = list(t.exponents)
    cols = list(range(pat.width))  # permutation of original 0-based positions

    merged = True
    while merged:
        merged = False
        for p in range(len(cols)):
            for q in range(p + 1, len(cols)):
                if cover[cols[p]] != cover[cols[q]]:
                    continue
                if q == p + 1:
                    exps[cols[p]] += exps[cols[q]]
                    del cols[q]
                else:
                    cols.insert(p + 1, cols.pop(q))
                merged = True
                break
            if merged:
                break

    new_exps = tuple(exps[c] for c in cols)
    if any(k < 1 for k in new_exps):
        raise IntervalBroken("zero-exponent column survived canonicalization")
    new_rows = []
    for i in range(pat.depth):
        pos = [j + 1 for j, c in enumerate(cols) if i in cover[c]]
        if not pos or pos != list(range(pos[0], pos[-1] + 1)):
            raise IntervalBroken(f"row {i} lost contiguity during column merge")
        new_rows.append((pos[0], pos[-1]))
    return Term(Pattern(len(cols), tuple(new_rows)), new_exps, t.coefficient)


def term_key(t: Term):
    """Canonical identity of a term's kernel: the sorted multiset of
    (column vector over sorted rows, total exponent).  Coefficient excluded."""
    ct = t if _is_sorted(t) else canonical_term(t)
    pairs = sorted(zip(ct.pattern.columns(), ct.exponents))
    return (ct.depth, tuple(pairs))


def _is_sorted(t: Term) -> bool:
    rows = t.pattern.rows
    if any(rows[i] > rows[i + 1] for i in range(len(rows) - 1)):
        return False
    seen = set()
    for v in t.pattern.columns():
        if v in seen:
            return False
        seen.add(v)
    return True


# ---------------------------------------------------------------------------
# elementary operations


def expand(t: Term) -> Pattern:
    """The fully expanded 0/1 matrix: column c repeated k_c times.  Width
    equals the weight; rows stay intervals."""
    new_rows = []
    offsets = [0]
    for k in t.exponents:
        offsets.append(offsets[-1] + k)
    for a, b in t.pattern.rows:
        new_rows.append((offsets[a - 1] + 1, offsets[b]))
    return Pattern(t.weight, tuple(new_rows))


def converges(t: Term) -> bool:
    """True iff the lattice sum is finite: for every nonempty set S of rows,
    the total exponent of the columns covered by S must exceed |S|.

    Sending the S-variables to ~R with the rest bounded, the kernel decays as
    R^-K(S) over ~R^|S| lattice points, so K(S) > |S| is necessary; summing
    the dyadic sectors shows it is sufficient.  Single rows give the familiar
    "at least two units per expanded row" test, which settles depth <= 2 but
    misses joint blowup of several rows: rows (1,2),(1,3),(2,3) with unit
    exponents pass every row test yet diverge like log B on the diagonal."""
    d = t.depth
    rows = t.pattern.rows
    for mask in range(1, 1 << d):
        covered = [False] * t.width
        size = 0
        for r in range(d):
            if mask >> r & 1:
                size += 1
                a, b = rows[r]
                for c in range(a - 1, b):
                    covered[c] = True
        k = sum(k_c for c, k_c in enumerate(t.exponents) if covered[c])
        if k <= size:
            return False
    return True


def reflect(t: Term) -> Term:
    """Reverse the column order: row (a, b) -> (w+1-b, w+1-a), exponents
    reversed.  The value is unchanged (the product over columns is
    order-insensitive)."""
    w = t.width
    rows = tuple((w + 1 - b, w + 1 - a) for a, b in t.pattern.rows)
    return canonical_term(
        Term(Pattern(w, rows), tuple(reversed(t.exponents)), t.coefficient)
    )


def direct_sum(t1: Term, t2: Term) -> Term:
    """Block-diagonal join; the series factorizes, so the value is the
    product and the coefficients multiply."""
    w1 = t1.width
    rows = list(t1.pattern.rows) + [(a + w1, b + w1) for a, b in t2.pattern.rows]
    pat = Pattern(w1 + t2.width, tuple(rows))
    return canonical_term(
        Term(pat, t1.exponents + t2.exponents, t1.coefficient * t2.coefficient)
    )


def kernel_at(t: Term, point: Sequence[Rat]) -> Rat:
    """Exact kernel value coefficient * prod_c L_c(z)^(-k_c) at a rational
    point z (one value per row, in the term's row order)."""
    if len(point) != t.depth:
        raise ValueError(f"point has {len(point)} entries for depth {t.depth}")
    val = Rat(t.coefficient)
    for c in range(1, t.width + 1):
        form = sum(
            (point[i] for i in range(t.depth) if t.pattern.covers(i, c)),
            start=Rat(0),
        )
        val /= form ** t.exponents[c - 1]
    return val


# ---------------------------------------------------------------------------
# chains <-> multiple zeta words


def is_chain(t: Term) -> bool:
    """True iff the row supports are totally (and strictly) ordered by
    inclusion.  Ordering the rows outermost first, the form of a column
    covered by exactly j rows is the sum of the j outermost variables, so the
    distinct forms are the prefix sums of the variables and the term is a
    nested zeta sum read off by to_mzv."""
    rows = sorted(t.pattern.rows, key=lambda r: (r[0], -r[1]))
    for i in range(len(rows) - 1):
        (a0, b0), (a1, b1) = rows[i], rows[i + 1]
        if not (a0 <= a1 and b1 <= b0) or (a0, b0) == (a1, b1):
            return False
    return True


def is_staircase(t: Term) -> bool:
    """The chain normal form: a square pattern whose row m covers columns
    m..d, so column c is literally the c-th partial sum."""
    d = t.depth
    if t.width != d:
        return False
    rows = sorted(t.pattern.rows)
    return all(rows[m] == (m + 1, d) for m in range(d))


def to_mzv(t: Term) -> tuple[Word, Rat]:
    """Read the multiple zeta word off a chain term.  A column covered by
    exactly j rows carries the j-th prefix sum (outermost first); the prefix
    sums increase strictly, and the word lists the exponent of the largest
    form first, so the entry at position i collects the exponents of the
    columns covered by exactly d+1-i rows.  On a staircase this is the
    reversed exponent tuple."""
    if not is_chain(t):
        raise NotChain(str(t))
    d = t.depth
    word = [0] * d
    for c in range(1, t.width + 1):
        covering = sum(1 for i in range(d) if t.pattern.covers(i, c))
        word[d - covering] += t.exponents[c - 1]
    assert all(k >= 1 for k in word)
    return tuple(word), t.coefficient


def from_mzv(word: Sequence[int]) -> Term:
    """The staircase term whose value is zeta(word): row m covers columns
    m..d, column exponents (k_d, ..., k_1)."""
    w = tuple(int(k) for k in word)
    if not w or any(k < 1 for k in w):
        raise ParseError(f"not a composition: {word!r}")
    d = len(w)
    rows = [(m, d) for m in range(1, d + 1)]
    return term(rows, tuple(reversed(w)))


def word_weight(word: Word) -> int:
    return sum(word)


def is_admissible(word: Word) -> bool:
    return bool(word) and word[0] >= 2


# ---------------------------------------------------------------------------
# derivative action: one exponent bump per support column of the chosen row


def apply_derivative(t: Term, row: int) -> "Expression":
    """d/dz_row of the kernel:  sum over support columns c of
    (-k_c) * (same term with k_c + 1).  Raises IndexError on a bad row."""
    if not 0 <= row < t.depth:
        raise IndexError(f"row {row} out of range for depth {t.depth}")
    out = Expression()
    a, b = t.pattern.rows[row]
    for c in range(a, b + 1):
        k = t.exponents[c - 1]
        exps = list(t.exponents)
        exps[c - 1] = k + 1
        out.add(Term(t.pattern, tuple(exps), t.coefficient * Rat(-k)))
    return out


# ---------------------------------------------------------------------------
# expressions: rational combinations keyed by canonical term identity


class Expression:
    """A finite QQ-linear combination of terms, merged eagerly by canonical
    key.  All member terms must share one weight."""

    def __init__(self, terms: Iterable[Term] = ()):
        self._terms: dict = {}
        self.weight: Optional[int] = None
        for t in terms:
            self.add(t)

    def add(self, t: Term) -> None:
        ct = canonical_term(t)
        if ct.coefficient == 0:
            return
        if self.weight is None:
            self.weight = ct.weight
        elif ct.weight != self.weight:
            raise ValueError(
                f"mixed weights in expression: {ct.weight} vs {self.weight}"
            )
        key = term_key(ct)
        old = self._terms.get(key)
        if old is None:
            self._terms[key] = ct
        else:
            c = old.coefficient + ct.coefficient
            if c == 0:
                del self._terms[key]
            else:
                self._terms[key] = old.with_coefficient(c)

    def extend(self, terms: Iterable[Term]) -> None:
        for t in terms:
            self.add(t)

    def terms(self) -> list[Term]:
        return [self._terms[k] for k in sorted(self._terms)]

    def pop_smallest(self) -> Term:
        key = min(self._terms)
        return self._terms.pop(key)

    def coefficient_of(self, t: Term) -> Rat:
        got = self._terms.get(term_key(t))
        return got.coefficient if got is not None else Rat(0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expression):
            return NotImplemented
        return {k: t.coefficient for k, t in self._terms.items()} == {
            k: t.coefficient for k, t in other._terms.items()
        }


# ---------------------------------------------------------------------------
# word combinations and the quasi-shuffle (stuffle) product


def comb_add(dst: MZVCombination, word: Word, coeff: Rat) -> None:
    c = dst.get(word, Rat(0)) + coeff
    if c == 0:
        dst.pop(word, None)
    else:
        dst[word] = c


def comb_scale(comb: MZVCombination, c: Rat) -> MZVCombination:
    return {w: x * c for w, x in comb.items()} if c != 0 else {}


def stuffle_words(u: Sequence[int], v: Sequence[int]) -> MZVCombination:
    """Quasi-shuffle product of two words (empty word = unit):
    u * v = u1.(u' * v) + v1.(u * v') + (u1+v1).(u' * v')."""
    u = tuple(int(x) for x in u)
    v = tuple(int(x) for x in v)
    memo: dict = {}

    def rec(a: Word, b: Word) -> MZVCombination:
        if not a:
            return {b: Rat(1)}
        if not b:
            return {a: Rat(1)}
        key = (a, b)
        if key in memo:
            return memo[key]
        out: MZVCombination = {}
        for head, tail in (
            (a[0], rec(a[1:], b)),
            (b[0], rec(a, b[1:])),
            (a[0] + b[0], rec(a[1:], b[1:])),
        ):
            for w, c in tail.items():
                comb_add(out, (head,) + w, c)
        memo[key] = out
        return out

    return rec(u, v)


def render_combination(comb: MZVCombination) -> str:
    """Compact human rendering, e.g. 'ζ(2,1) + ζ(3)'."""
    if not comb:
        return "0"
    bits = []
    for word in sorted(comb):
        c = comb[word]
        z = "ζ(" + ",".join(str(k) for k in word) + ")"
        if c == 1:
            s = z
        elif c == -1:
            s = "-" + z
        else:
            s = f"{c}*{z}"
        bits.append(s)
    out = bits[0]
    for s in bits[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


# ---------------------------------------------------------------------------
# JSON round-trips (the documented external formats)


def term_to_json(t: Term) -> dict:
    return {
        "rows": [[a, b] for a, b in t.pattern.rows],
        "exponents": list(t.exponents),
        "coefficient": str(t.coefficient),
    }


def parse_term(source: Union[str, dict]) -> Term:
    """Parse the documented term JSON; raises ParseError on anything bad."""
    if isinstance(source, str):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as e:
            raise ParseError(f"bad JSON: {e}") from None
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ParseError("term JSON must be an object")
    try:
        rows = obj["rows"]
        exps = obj["exponents"]
    except (KeyError, TypeError):
        raise ParseError("term JSON needs 'rows' and 'exponents'") from None
    coeff = obj.get("coefficient", "1")
    try:
        return term(rows, exps, coeff)
    except (MalformedInterval, ZeroColumn, RankDeficient):
        raise
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad term JSON: {e}") from None


def combination_to_json(comb: MZVCombination) -> dict:
    return {
        "mzv": [
            {"word": list(w), "coeff": str(comb[w])} for w in sorted(comb)
        ]
    }


def parse_word(text: str) -> Word:
    """Parse '2,1' (or '2 1') into a word."""
    parts = text.replace(",", " ").split()
    if not parts:
        raise ParseError("empty word")
    try:
        word = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad word {text!r}") from None
    if any(k < 1 for k in word):
        raise ParseError(f"word parts must be positive: {text!r}")
    return word
