"""Floating-point evaluation and independent verification.

Two kinds of checks live here, at different levels of trust:

* whole-value checks: brute-force partial sums of a term's lattice series,
  extrapolated in the cutoff, against the evaluated word combination the
  engine produced.  Approximate, tolerance-based.
* per-step checks: every recorded rewrite is re-verified on its own, either as
  an exact rational-function identity sampled at random positive points
  (partial fractions, auxiliary columns) or as an explicit bijection between
  truncated lattices with exact kernel matching (harmonic splits).

The extrapolation model is value + (a + b*log N + c*log^2 N)/N fitted at
N/8, N/4, N/2, N, which covers the full leading tail of these series
through depth 3 and leaves an O(log^3 N / N^2) residual.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CheckFailed, DivergentSeries, DivergentWord, ParseError
from .moves import TraceRecord
from .terms import (
    MZVCombination,
    Rat,
    Term,
    Word,
    converges,
    is_admissible,
    kernel_at,
    to_mzv,
)

DEPTH_CUTOFFS = {1: 1_000_000, 2: 3000, 3: 600}
_CHUNK = 512


def default_cutoff(depth: int) -> int:
    return DEPTH_CUTOFFS.get(depth, 25)


@dataclass
class EvalReport:
    value: float
    cutoff: int
    extrapolated: bool
    estimated_error: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "cutoff": self.cutoff,
            "extrapolated": self.extrapolated,
            "estimated_error": self.estimated_error,
        }


def _extrapolate(ns: Sequence[int], vals: Sequence[float]) -> tuple[float, float]:
    """Fit value + (a + b*log n + c*log^2 n)/n through four partial sums
    (three nodes drop the log^2 term).  The error estimate compares against
    the next-lower model solved on the tail nodes."""
    basis = [
        lambda n: 1.0,
        lambda n: 1.0 / n,
        lambda n: math.log(n) / n,
        lambda n: math.log(n) ** 2 / n,
    ][: len(ns)]
    A = np.array([[f(n) for f in basis] for n in ns])
    full = float(np.linalg.solve(A, np.array(vals, dtype=float))[0])
    A2 = np.array([[f(n) for f in basis[:-1]] for n in ns[1:]])
    rough = float(np.linalg.solve(A2, np.array(vals[1:], dtype=float))[0])
    err = abs(full - rough) + 1e-12 * (1.0 + abs(full))
    return full, err


# ---------------------------------------------------------------------------
# term evaluation: brute multi-sum over [1, N]^depth


def _partial_sum(t: Term, N: int) -> float:
    d, w = t.depth, t.width
    cover = [
        tuple(i for i in range(d) if t.pattern.covers(i, c))
        for c in range(1, w + 1)
    ]
    ks = t.exponents
    coeff = float(t.coefficient)
    if d == 1:
        n = np.arange(1.0, N + 1.0)
        block = n ** float(-sum(ks))
        return coeff * float(block.sum())

    pieces = []
    y = np.arange(1.0, N + 1.0)[None, :]
    for prefix in itertools.product(range(1, N + 1), repeat=d - 2):
        for lo in range(1, N + 1, _CHUNK):
            hi = min(lo + _CHUNK - 1, N)
            x = np.arange(float(lo), hi + 1.0)[:, None]
            block = np.ones((hi - lo + 1, N))
            for c in range(w):
                L = float(sum(prefix[i] for i in cover[c] if i < d - 2))
                if d - 2 in cover[c]:
                    L = L + x
                if d - 1 in cover[c]:
                    L = L + y
                block = block * np.power(L, float(-ks[c]))
            pieces.append(float(block.sum()))
    return coeff * math.fsum(pieces)


def eval_term(t: Term, N: Optional[int] = None) -> EvalReport:
    """Extrapolated numeric value of a convergent term's lattice series."""
    if not converges(t):
        raise DivergentSeries(
            f"{t} diverges: some set of rows carries no more exponent "
            "mass than its own size"
        )
    if N is None:
        N = default_cutoff(t.depth)
    if N < 16:
        v = _partial_sum(t, N)
        return EvalReport(v, N, False, float("inf"))
    ns = [N // 8, N // 4, N // 2, N] if N >= 128 else [N // 4, N // 2, N]
    vals = [_partial_sum(t, n) for n in ns]
    value, err = _extrapolate(ns, vals)
    return EvalReport(value, N, True, err)


# ---------------------------------------------------------------------------
# word evaluation: nested cumulative sums, O(N * depth)


def _word_partials(word: Word, cutoffs: Sequence[int]) -> list[float]:
    N = max(cutoffs)
    n = np.arange(1.0, N + 1.0)
    cum = None
    for k in reversed(word):
        f = n ** float(-k)
        if cum is not None:
            shifted = np.empty_like(cum)
            shifted[0] = 0.0
            shifted[1:] = cum[:-1]
            f = f * shifted
        cum = np.cumsum(f)
    return [float(cum[c - 1]) for c in cutoffs]


def eval_mzv(word: Sequence[int], N: int = 100_000) -> EvalReport:
    """Extrapolated numeric zeta(word); the first part must be >= 2."""
    w = tuple(int(k) for k in word)
    if not w or any(k < 1 for k in w):
        raise ParseError(f"not a composition: {word!r}")
    if not is_admissible(w):
        raise DivergentWord(f"zeta{w} diverges (first part < 2)")
    if N < 16:
        v = _word_partials(w, [N])[0]
        return EvalReport(v, N, False, float("inf"))
    ns = [N // 8, N // 4, N // 2, N] if N >= 128 else [N // 4, N // 2, N]
    vals = _word_partials(w, ns)
    value, err = _extrapolate(ns, vals)
    return EvalReport(value, N, True, err)


# ---------------------------------------------------------------------------
# whole-reduction check


@dataclass
class CheckReport:
    passed: bool
    series_value: float
    words_value: float
    difference: float
    tol: float
    series: EvalReport

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "series_value": self.series_value,
            "words_value": self.words_value,
            "difference": self.difference,
            "tol": self.tol,
        }


def check_reduction(
    t: Term,
    combination: MZVCombination,
    tol: float = 1e-3,
    N: Optional[int] = None,
    word_N: int = 100_000,
) -> CheckReport:
    """Compare the term's own series against the claimed word combination."""
    bad = [w for w, c in combination.items() if c != 0 and not is_admissible(w)]
    if bad:
        raise CheckFailed(f"combination contains divergent words {bad}")
    series = eval_term(t, N)
    words_value = 0.0
    for w in sorted(combination):
        words_value += float(combination[w]) * eval_mzv(w, word_N).value
    diff = abs(series.value - words_value)
    return CheckReport(diff <= tol, series.value, words_value, diff, tol, series)


# ---------------------------------------------------------------------------
# per-step checks


def step_check_rational(rec: TraceRecord, rng, points: int = 10) -> None:
    """Exact identity kernel(input) == sum of kernel(output) at random
    positive rational points.  Valid for moves that keep the summation
    variables in place: partial fractions and auxiliary-column insertion."""
    if rec.move == "emit":
        word, coeff = to_mzv(rec.input)
        if list(word) != list(rec.params["word"]) or coeff != Rat(
            rec.params["coeff"]
        ):
            raise CheckFailed(f"emit record disagrees with its chain: {rec}")
        return
    if rec.move not in ("pf_step", "insert_aux"):
        raise ValueError(f"no rational check for move {rec.move!r}")
    d = rec.input.depth
    for _ in range(points):
        z = [Rat(rng.randint(1, 24), rng.randint(1, 24)) for _ in range(d)]
        lhs = kernel_at(rec.input, z)
        rhs = sum((kernel_at(o, z) for o in rec.outputs), start=Rat(0))
        if lhs != rhs:
            raise CheckFailed(
                f"{rec.move}: kernel identity fails at {z}: {lhs} != {rhs}"
            )


def step_check_lattice(rec: TraceRecord, bound: int = 6) -> None:
    """Exact check of a harmonic split on the truncated lattice [1,B]^d: the
    three case substitutions must biject onto the three output lattices with
    exact kernel equality point by point.  Inverse splits are checked through
    their forward reformulation (first output as the split term)."""
    if rec.move == "forward_hp":
        src = rec.input
        outs = list(rec.outputs)
    elif rec.move == "inverse_hp":
        o1, o2, o3 = rec.outputs
        src = o1
        outs = [rec.input, o2.scaled(-1), o3.scaled(-1)]
    else:
        raise ValueError(f"no lattice check for move {rec.move!r}")
    a, b = rec.params["a"], rec.params["b"]
    d = src.depth
    images: list[set] = [set(), set(), set()]
    for x in itertools.product(range(1, bound + 1), repeat=d):
        n, m = x[a], x[b]
        y = list(x)
        if n > m:
            idx = 0
            y[a], y[b] = m, n - m
        elif n < m:
            idx = 1
            y[a], y[b] = n, m - n
        else:
            idx = 2
            y[a] = n
            del y[b]
        ky = tuple(y)
        if ky in images[idx]:
            raise CheckFailed(f"lattice map repeats image point {ky}")
        images[idx].add(ky)
        zx = [Rat(v) for v in x]
        zy = [Rat(v) for v in ky]
        lhs = kernel_at(src, zx)
        rhs = kernel_at(outs[idx], zy)
        if lhs != rhs:
            raise CheckFailed(
                f"{rec.move}: kernel mismatch at {x} -> case {idx}, {ky}: "
                f"{lhs} != {rhs}"
            )
    full = set(itertools.product(range(1, bound + 1), repeat=d))
    split_box = {y for y in full if y[a] + y[b] <= bound}
    merged_box = set(itertools.product(range(1, bound + 1), repeat=d - 1))
    for idx, want in ((0, split_box), (1, split_box), (2, merged_box)):
        if images[idx] != want:
            raise CheckFailed(
                f"{rec.move}: case {idx} covers {len(images[idx])} points, "
                f"expected {len(want)}"
            )


def check_comp_words(rec: TraceRecord) -> None:
    """Re-derive the boundary-constant words attached to a harmonic split
    and compare them, as exact rationals, with what the record claims.

    The constant of a compensated split is zeta(2) times the value of the
    leftover kernel on the rows and columns the split pair does not touch,
    negatively oriented for a forward split of the record input, positively
    for an inverse split (whose forward source is the first output)."""
    from .engine import _comp_subterm, reduce_to_mzv
    from .terms import comb_add, stuffle_words

    a, b = rec.params["a"], rec.params["b"]
    if rec.move == "forward_hp":
        src, sign = rec.input, -1
    else:
        src, sign = rec.outputs[0], 1
    sub = _comp_subterm(src, a, b)
    if sub is None:
        raise CheckFailed(
            f"compensated split of {rec.input} has no constant boundary"
        )
    words: MZVCombination = {}
    for w, c in reduce_to_mzv(sub).combination.items():
        for sw, m in stuffle_words((2,), w).items():
            comb_add(words, sw, sign * rec.input.coefficient * c * m)
    recorded = {}
    for wl, cs in rec.params["comp_words"]:
        comb_add(recorded, tuple(wl), Rat(cs))
    if recorded != words:
        raise CheckFailed(
            f"compensation words of {rec.input} do not re-derive: "
            f"recorded {recorded}, expected {words}"
        )


def check_record(
    rec: TraceRecord, rng=None, lattice_bound: int = 6, points: int = 10
) -> None:
    """Dispatch one trace record to its appropriate exact check."""
    if rec.move in ("pf_step", "insert_aux", "emit"):
        if rng is None:
            import random

            rng = random.Random(0)
        step_check_rational(rec, rng, points)
    elif rec.move in ("forward_hp", "inverse_hp"):
        step_check_lattice(rec, lattice_bound)
        if rec.params.get("comp_words") is not None:
            check_comp_words(rec)
    else:
        raise ValueError(f"unknown move {rec.move!r}")


def verify_trace(records, seed: int = 0, lattice_bound: int = 6, points: int = 10) -> int:
    """Run every record of a trace (or iterable of records) through its
    exact check.  Returns the number of records checked."""
    import random

    rng = random.Random(seed)
    recs = getattr(records, "records", records)
    count = 0
    for rec in recs:
        check_record(rec, rng, lattice_bound, points)
        count += 1
    return count
