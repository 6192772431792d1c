"""Catalog enumeration for admissible weight systems under a denominator bound.

For each denominator d up to the bound, non-increasing numerator tuples
summing to 2d are generated depth-first.  Integrality of a pair depends only
on the two entries, so every new numerator is tested against the already
placed prefix and bad branches die immediately.  Only tuples whose least
common denominator is exactly d are kept, which makes the catalog
duplicate-free across denominators.

``enumerate_catalog_naive`` is an independent reference path with no pruning
and no numerator tables; it filters complete tuples through the predicate
functions of :mod:`forgetmaps.weights` only.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Sequence

from .weights import (
    SymmetryPartition,
    WeightSystem,
    check_int,
    finest_partition,
    is_cocompact,
)

MODE_INT = "int"
MODE_HALF = "half"
MODES = (MODE_INT, MODE_HALF)


@dataclass(frozen=True)
class CatalogEntry:
    """A canonical (non-increasing) admissible weight system with its
    precomputed classification flags."""

    weights: WeightSystem
    lcd: int
    cocompact: bool
    satisfies_int: bool
    finest: SymmetryPartition

    @property
    def k(self) -> int:
        return self.weights.k

    @property
    def dimension(self) -> int:
        return self.weights.dimension

    def numerators(self) -> tuple[int, ...]:
        return self.weights.numerators()


def canonicalize(mu: WeightSystem) -> WeightSystem:
    """Sort the weights non-increasing; idempotent and permutation-invariant."""
    return WeightSystem(tuple(sorted(mu.weights, reverse=True)))


def _entry_from(mu: WeightSystem) -> CatalogEntry:
    finest = finest_partition(mu)
    assert finest is not None, "catalog entries are admissible by construction"
    return CatalogEntry(
        weights=mu,
        lcd=mu.lcd,
        cocompact=is_cocompact(mu),
        satisfies_int=check_int(mu),
        finest=finest,
    )


def _pair_tables(den: int, mode: str) -> tuple[list[bool], list[bool]]:
    """For numerator pair sums s < den: whether den/(den-s) is an integer
    (cross table) and whether it is a half-integer (equal-value table)."""
    cross = [False] * den
    equal = [False] * den
    for s in range(den):
        g = den - s
        cross[s] = den % g == 0
        equal[s] = cross[s] if mode == MODE_INT else (2 * den) % g == 0
    return cross, equal


def _search_shard(k: int, den: int, first: int, mode: str) -> list[tuple[int, ...]]:
    """All admissible non-increasing numerator tuples for denominator ``den``
    that start with ``first``.  Exact-lcd filtering happens in the caller."""
    cross, equal = _pair_tables(den, mode)
    out: list[tuple[int, ...]] = []
    nums = [0] * k
    nums[0] = first

    def place(pos: int, remaining: int, cap: int) -> None:
        if pos == k:
            if remaining == 0:
                out.append(tuple(nums))
            return
        slots_after = k - pos - 1
        hi = min(cap, remaining - slots_after)
        lo = -(-remaining // (slots_after + 1))  # ceil: later slots are <= value
        for value in range(hi, lo - 1, -1):
            ok = True
            for prev in nums[:pos]:
                s = prev + value
                if s < den and not (equal[s] if prev == value else cross[s]):
                    ok = False
                    break
            if ok:
                nums[pos] = value
                place(pos + 1, remaining - value, value)
        nums[pos] = 0

    place(1, 2 * den - first, first)
    return out


def _shards(k: int, max_den: int) -> list[tuple[int, int]]:
    shards = []
    for den in range(2, max_den + 1):
        total = 2 * den
        # first numerator: at least the average, at most den-1
        lo = -(-total // k)
        for first in range(lo, den):
            shards.append((den, first))
    return shards


def enumerate_catalog(
    k: int, max_den: int, mode: str = MODE_HALF, workers: int = 1
) -> list[CatalogEntry]:
    """The complete duplicate-free catalog of canonical weight systems of
    length ``k`` with least common denominator at most ``max_den``.

    ``mode == "int"`` keeps systems satisfying INT; ``mode == "half"`` keeps
    systems admitting at least one half-INT symmetry partition.  Results are
    sorted by (lcd, numerators) and do not depend on the worker count.
    """
    if k < 4:
        raise ValueError(f"need at least 4 points, got {k}")
    if max_den < 2:
        raise ValueError(f"need a denominator bound of at least 2, got {max_den}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    shards = _shards(k, max_den)
    tuples: list[tuple[int, tuple[int, ...]]] = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [pool.submit(_search_shard, k, den, first, mode) for den, first in shards]
            for (den, _), job in zip(shards, jobs):
                tuples.extend((den, nums) for nums in job.result())
    else:
        for den, first in shards:
            tuples.extend((den, nums) for nums in _search_shard(k, den, first, mode))
    entries = []
    for den, nums in tuples:
        if gcd(*nums, den) != 1:
            continue  # lcd below den: already seen at the smaller denominator
        entries.append(_entry_from(WeightSystem.from_numerators(nums, den)))
    entries.sort(key=lambda e: (e.lcd, e.numerators()))
    return entries


def _noninc_tuples(k: int, total: int, cap: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        if total == 0:
            yield ()
        return
    for value in range(min(cap, total - (k - 1)), 0, -1):
        if value * k < total:
            break
        for rest in _noninc_tuples(k - 1, total - value, value):
            yield (value,) + rest


def enumerate_catalog_naive(k: int, max_den: int, mode: str = MODE_HALF) -> list[CatalogEntry]:
    """Reference enumerator: every non-increasing tuple is generated without
    pruning and tested through the weight-system predicates directly."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    entries = []
    for den in range(2, max_den + 1):
        for nums in _noninc_tuples(k, 2 * den, den - 1):
            if gcd(*nums, den) != 1:
                continue
            mu = WeightSystem.from_numerators(nums, den)
            if mode == MODE_INT:
                if not check_int(mu):
                    continue
            elif finest_partition(mu) is None:
                continue
            entries.append(_entry_from(mu))
    entries.sort(key=lambda e: (e.lcd, e.numerators()))
    return entries


def verify_lcd_bound(catalog: Sequence[CatalogEntry], bound: int) -> list[CatalogEntry]:
    """Entries whose least common denominator exceeds ``bound``; the list is
    expected to be empty for catalogs of five or more points with bound 42."""
    return [entry for entry in catalog if entry.lcd > bound]
