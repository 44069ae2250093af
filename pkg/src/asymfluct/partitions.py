"""Pair partitions, crossings, Catalan numbers and index-tuple decompositions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

ENUMERATION_CAP = 8
ENUMERATION_BUDGET = 10**7
CATALAN_CAP = 30


class SizeGuardError(ValueError):
    """Raised when an exhaustive enumeration would exceed its configured budget."""


@dataclass(frozen=True)
class PairPartition:
    """Pairs (alpha_j, beta_j) with alpha_j < beta_j covering {1..2n} once.

    The tuple order of ``pairs`` carries the labelling: the j-th pair gets label j.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        points = sorted(p for pair in self.pairs for p in pair)
        if points != list(range(1, 2 * len(self.pairs) + 1)):
            raise ValueError(f"{self.pairs!r} does not cover 1..{2 * len(self.pairs)} exactly once")
        if any(a >= b for a, b in self.pairs):
            raise ValueError(f"{self.pairs!r} has a pair with alpha >= beta")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def is_ordered(self) -> bool:
        alphas = [a for a, _ in self.pairs]
        return alphas == sorted(alphas)

    def label_map(self) -> tuple[int, ...]:
        """nu(1..2n) with nu(alpha_j) = nu(beta_j) = j."""
        nu = [0] * (2 * self.n)
        for j, (a, b) in enumerate(self.pairs, start=1):
            nu[a - 1] = nu[b - 1] = j
        return tuple(nu)

    def __str__(self):
        return "[" + ",".join(f"({a},{b})" for a, b in self.pairs) + "]"


def _pairings(points: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield [(first, other)] + tail


def enumerate_pair_partitions(n: int, ordered: bool = True, cap: int = ENUMERATION_CAP) -> list[PairPartition]:
    """All pair partitions of {1..2n}.

    ``ordered=True`` gives each pairing once with alpha_1 < ... < alpha_n
    ((2n-1)!! of them).  ``ordered=False`` gives every labelling of every
    pairing by {1..n} ((2n)!/2^n of them).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise SizeGuardError(f"n={n} exceeds the enumeration cap {cap}")
    count = pair_partition_count(n, ordered)
    if count > ENUMERATION_BUDGET:
        raise SizeGuardError(f"{count} pair partitions of {2 * n} points exceed the budget {ENUMERATION_BUDGET}")
    base = [PairPartition(tuple(p)) for p in _pairings(list(range(1, 2 * n + 1)))]
    if ordered:
        return base
    return [
        PairPartition(tuple(p.pairs[i] for i in perm))
        for p in base
        for perm in itertools.permutations(range(n))
    ]


def pair_partition_count(n: int, ordered: bool = True) -> int:
    """(2n-1)!! ordered pairings, (2n)!/2^n labelled ones."""
    if ordered:
        return double_factorial(2 * n - 1)
    return math.factorial(2 * n) // 2**n


def pair_partition_arrays(n: int, cap: int = ENUMERATION_CAP) -> tuple[np.ndarray, np.ndarray]:
    """All ordered pairings of {1..2n} as arrays ``alpha, beta`` of shape (count, n).

    Row i is one pairing; alpha is increasing along each row.  Built by decoding
    every mixed-radix code (c_1..c_n), c_k choosing the partner of the smallest
    unpaired point among the 2(n-k)+1 remaining ones.
    """
    if n > cap:
        raise SizeGuardError(f"n={n} exceeds the enumeration cap {cap}")
    if n == 0:
        return np.zeros((1, 0), dtype=np.int16), np.zeros((1, 0), dtype=np.int16)
    radices = [2 * (n - k) + 1 for k in range(1, n + 1)]
    codes = np.indices(radices).reshape(n, -1).T
    count = codes.shape[0]
    remaining = np.tile(np.arange(1, 2 * n + 1, dtype=np.int16), (count, 1))
    alpha = np.empty((count, n), dtype=np.int16)
    beta = np.empty((count, n), dtype=np.int16)
    for k in range(n):
        m = remaining.shape[1]
        partner_col = codes[:, k] + 1
        alpha[:, k] = remaining[:, 0]
        beta[:, k] = remaining[np.arange(count), partner_col]
        cols = np.arange(m)
        keep = (cols[None, :] != 0) & (cols[None, :] != partner_col[:, None])
        remaining = remaining[keep].reshape(count, m - 2)
    return alpha, beta


def crossing_counts(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Vectorised crossing number of each row of an ordered pairing array."""
    n = alpha.shape[1]
    out = np.zeros(alpha.shape[0], dtype=np.int32)
    for j, k in itertools.combinations(range(n), 2):
        out += (alpha[:, k] < beta[:, j]) & (beta[:, j] < beta[:, k])
    return out


def crossing_number(p: PairPartition) -> int:
    count = 0
    for (a1, b1), (a2, b2) in itertools.combinations(p.pairs, 2):
        if a1 < a2 < b1 < b2 or a2 < a1 < b2 < b1:
            count += 1
    return count


def is_noncrossing(p: PairPartition) -> bool:
    return crossing_number(p) == 0


def double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def catalan(n: int) -> int:
    """C_n from C_0 = 1, C_n = sum_{k=1}^n C_{k-1} C_{n-k}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > CATALAN_CAP:
        raise SizeGuardError(f"catalan({n}) exceeds the guarded range n <= {CATALAN_CAP}")
    return _catalan_table(n)[n]


@lru_cache(maxsize=None)
def _catalan_table(n: int) -> tuple[int, ...]:
    c = [1]
    for m in range(1, n + 1):
        c.append(sum(c[k - 1] * c[m - k] for k in range(1, m + 1)))
    return tuple(c)


def catalan_closed_form(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def catalan_audit(n_max: int = ENUMERATION_CAP) -> list[dict]:
    """Recursion, closed form and exhaustive counts for n = 0..n_max.

    Exhaustive counts come from the full ordered-pairing array: its row count
    is compared with (2n-1)!! and its crossing-free rows with C_n.
    """
    rows = []
    for n in range(n_max + 1):
        alpha, beta = pair_partition_arrays(n)
        crossings = crossing_counts(alpha, beta)
        row = {
            "n": n,
            "recursion": catalan(n),
            "closed_form": catalan_closed_form(n),
            "noncrossing_count": int(np.count_nonzero(crossings == 0)),
            "ordered_count": int(alpha.shape[0]),
            "double_factorial": double_factorial(2 * n - 1),
        }
        row["ok"] = (
            row["recursion"] == row["closed_form"] == row["noncrossing_count"]
            and row["ordered_count"] == row["double_factorial"]
        )
        rows.append(row)
    return rows


def decompose_index_tuple(k: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Write k = theta o nu with theta strictly increasing.

    nu labels the blocks of equal entries by the rank of their value, theta
    lists the distinct values in increasing order.
    """
    theta = tuple(sorted(set(k)))
    rank = {v: i for i, v in enumerate(theta, start=1)}
    return tuple(rank[v] for v in k), theta


def compose(theta: Sequence[int], nu: Sequence[int]) -> tuple[int, ...]:
    return tuple(theta[j - 1] for j in nu)


def surjections(r: int, s: int) -> Iterator[tuple[int, ...]]:
    """Maps {1..r} -> {1..s} attaining every value."""
    for nu in itertools.product(range(1, s + 1), repeat=r):
        if len(set(nu)) == s:
            yield nu


def count_multiplicity_bounded_maps(r: int, s: int) -> int:
    """A_s: surjections {1..r} -> {1..s} with every value attained at least twice.

    Counted as multinomials over compositions of r into s parts of size >= 2.
    """
    if s < 1 or r < 2 * s:
        return 0
    total = 0
    for parts in _compositions(r, s, minimum=2):
        total += math.factorial(r) // math.prod(math.factorial(p) for p in parts)
    return total


def _compositions(total: int, parts: int, minimum: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest
