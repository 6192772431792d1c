"""Exact weight systems on the projective line.

A weight system is an ordered tuple of rationals in (0, 1) summing to 2,
one weight per marked point.  This module holds the pointwise machinery:
orbifold weights (the reciprocals 1/(1 - w_i - w_j)), the INT and half-INT
integrality conditions, stability of coincidence patterns, contractions,
duality for four points, and the symmetry partitions forced by pairs whose
orbifold weight is a half-integer but not an integer.

All arithmetic is exact (``fractions.Fraction``); no floats anywhere.
Indices are 1-based throughout, matching the usual tuple notation
(3,3,3,3,3,1)/8 with points numbered 1..k.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Iterator, Optional, Sequence, Union

ONE = Fraction(1)
TWO = Fraction(2)


class WeightSystemError(ValueError):
    """Invalid weight-system data or an operation precondition failure."""


class BadSubsetError(WeightSystemError):
    """Contraction subset has fewer than two indices or is out of range."""


class NotHyperbolicError(WeightSystemError):
    """Contraction subset whose weights sum to 1 or more."""


class NotFourPointsError(WeightSystemError):
    """Duality is only defined for systems with exactly four points."""


class NotARefinementError(WeightSystemError):
    """The first partition does not refine the second."""


class Infinite(Enum):
    """The value 1/0; arises exactly when a weight pair sums to 1."""

    INFINITY = "infinity"

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "INFINITY"


INFINITY = Infinite.INFINITY

#: A finite exact rational or the point at infinity.
ExtValue = Union[Fraction, Infinite]


def reciprocal(x: Fraction) -> ExtValue:
    """Return 1/x, with 1/0 = INFINITY."""
    if x == 0:
        return INFINITY
    return ONE / x


def is_infinite(value: ExtValue) -> bool:
    return value is INFINITY


def is_integral(value: ExtValue) -> bool:
    """True for a finite value that is an integer (possibly negative)."""
    return isinstance(value, Fraction) and value.denominator == 1


def is_half_integral(value: ExtValue) -> bool:
    """True for a finite value in (1/2)Z, i.e. reduced denominator 1 or 2."""
    return isinstance(value, Fraction) and value.denominator in (1, 2)


def is_strict_half(value: ExtValue) -> bool:
    """True for a finite value in (1/2)Z but not in Z."""
    return isinstance(value, Fraction) and value.denominator == 2


def doubled(value: ExtValue) -> ExtValue:
    if value is INFINITY:
        return INFINITY
    return 2 * value


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise WeightSystemError(f"expected an exact rational, got {x!r}")


@dataclass(frozen=True)
class WeightSystem:
    """An ordered tuple of k >= 4 rational weights in (0,1) summing to 2."""

    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        ws = tuple(_as_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) < 4:
            raise WeightSystemError(f"need at least 4 weights, got {len(ws)}")
        for w in ws:
            if not (0 < w < 1):
                raise WeightSystemError(f"weight {w} outside the open interval (0,1)")
        total = sum(ws)
        if total != 2:
            raise WeightSystemError(f"weights must sum to 2, got {total}")

    @classmethod
    def from_numerators(cls, numerators: Sequence[int], denominator: int) -> "WeightSystem":
        if denominator <= 0:
            raise WeightSystemError("denominator must be positive")
        return cls(tuple(Fraction(n, denominator) for n in numerators))

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def dimension(self) -> int:
        """Dimension of the associated moduli space: k - 3."""
        return self.k - 3

    @cached_property
    def lcd(self) -> int:
        """Least common denominator of the weights."""
        return reduce(lambda a, b: a * b // gcd(a, b), (w.denominator for w in self.weights))

    def numerators(self) -> tuple[int, ...]:
        """Numerators of the weights over the least common denominator."""
        d = self.lcd
        return tuple(int(w * d) for w in self.weights)

    def __getitem__(self, i: int) -> Fraction:
        """1-based access: system[i] is the weight of point i."""
        self._check_index(i)
        return self.weights[i - 1]

    def _check_index(self, i: int) -> None:
        if not (1 <= i <= self.k):
            raise WeightSystemError(f"index {i} out of range 1..{self.k}")

    def __repr__(self) -> str:
        return f"WeightSystem(({','.join(map(str, self.numerators()))})/{self.lcd})"


def _normalise_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    norm = tuple(tuple(sorted(set(b))) for b in blocks)
    return tuple(sorted((b for b in norm if b), key=lambda b: b[0]))


@dataclass(frozen=True)
class SymmetryPartition:
    """An ordered partition of {1..k}; its group is the product of the
    full symmetric groups on the blocks.

    Blocks are stored sorted ascending, ordered by smallest element, so
    equal partitions compare and hash equal.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = _normalise_blocks(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen: set[int] = set()
        for b in blocks:
            for i in b:
                if i in seen:
                    raise WeightSystemError(f"index {i} appears in two blocks")
                seen.add(i)
        k = len(seen)
        if seen != set(range(1, k + 1)):
            raise WeightSystemError(f"blocks must cover 1..{k} exactly, got {sorted(seen)}")

    @classmethod
    def singletons(cls, k: int) -> "SymmetryPartition":
        return cls(tuple((i,) for i in range(1, k + 1)))

    @classmethod
    def from_blocks(cls, k: int, blocks: Iterable[Iterable[int]]) -> "SymmetryPartition":
        """Build a partition of {1..k} from its non-singleton blocks only."""
        given = _normalise_blocks(blocks)
        covered = {i for b in given for i in b}
        rest = tuple((i,) for i in range(1, k + 1) if i not in covered)
        return cls(given + rest)

    @property
    def k(self) -> int:
        return sum(len(b) for b in self.blocks)

    @cached_property
    def _block_index(self) -> dict[int, int]:
        return {i: n for n, b in enumerate(self.blocks) for i in b}

    def block_of(self, i: int) -> tuple[int, ...]:
        return self.blocks[self._block_index[i]]

    def same_block(self, i: int, j: int) -> bool:
        return self._block_index[i] == self._block_index[j]

    def is_trivial(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def group_order(self) -> int:
        order = 1
        for b in self.blocks:
            order *= factorial(len(b))
        return order

    def refines(self, coarser: "SymmetryPartition") -> bool:
        """True if every block of self is contained in a block of coarser."""
        if self.k != coarser.k:
            return False
        return all(set(b) <= set(coarser.block_of(b[0])) for b in self.blocks)

    def valid_for(self, mu: WeightSystem) -> bool:
        """Blocks must carry constant weight and cover exactly {1..k}."""
        if self.k != mu.k:
            return False
        return all(len({mu[i] for i in b}) == 1 for b in self.blocks)

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"SymmetryPartition({inner})"


@dataclass(frozen=True)
class CoincidencePattern:
    """A set partition of {1..k} whose non-singleton blocks mark points
    that have been allowed to coalesce."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        # reuse the partition validation
        part = SymmetryPartition(self.blocks)
        object.__setattr__(self, "blocks", part.blocks)

    @classmethod
    def from_coalesced(cls, k: int, blocks: Iterable[Iterable[int]]) -> "CoincidencePattern":
        return cls(SymmetryPartition.from_blocks(k, blocks).blocks)

    def coalesced_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) > 1)


class Stability(Enum):
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly_semistable"
    UNSTABLE = "unstable"


def orbifold_weight(mu: WeightSystem, i: int, j: int) -> ExtValue:
    """The reciprocal 1/(1 - w_i - w_j), exactly.

    INFINITY iff the pair sums to 1; negative iff the pair sums above 1.
    """
    mu._check_index(i)
    mu._check_index(j)
    if i == j:
        raise WeightSystemError("orbifold weight needs two distinct indices")
    return reciprocal(ONE - mu[i] - mu[j])


def orbifold_weight_sym(mu: WeightSystem, sigma: SymmetryPartition, i: int, j: int) -> ExtValue:
    """Orbifold weight adjusted for symmetry: doubled when i and j lie in
    the same block of sigma (a half twist winds around the divisor once)."""
    value = orbifold_weight(mu, i, j)
    if sigma.same_block(i, j):
        return doubled(value)
    return value


def check_int(mu: WeightSystem) -> bool:
    """Integrality condition INT: every pair with weight sum below 1 has an
    integral orbifold weight."""
    for i, j in combinations(range(1, mu.k + 1), 2):
        if mu[i] + mu[j] < 1 and not is_integral(orbifold_weight(mu, i, j)):
            return False
    return True


def check_half_int(mu: WeightSystem, sigma: SymmetryPartition) -> bool:
    """Condition half-INT for the pair (mu, sigma): pairs with weight sum
    below 1 must have integral orbifold weight across blocks, and
    half-integral (integer allowed) weight inside a block."""
    if not sigma.valid_for(mu):
        raise WeightSystemError("partition blocks must carry constant weight")
    for i, j in combinations(range(1, mu.k + 1), 2):
        if mu[i] + mu[j] >= 1:
            continue
        value = orbifold_weight(mu, i, j)
        if sigma.same_block(i, j):
            if not is_half_integral(value):
                return False
        elif not is_integral(value):
            return False
    return True


def is_cocompact(mu: WeightSystem) -> bool:
    """True iff no subset of the weights sums to exactly 1.

    Subset sums are evaluated exactly over the integer numerators at the
    common denominator, via a bitset sweep.
    """
    d = mu.lcd
    sums = 1  # bit s set <=> some subset of the scanned numerators sums to s
    for n in mu.numerators():
        sums |= sums << n
    return not (sums >> d) & 1


def stability_class(mu: WeightSystem, pattern) -> Stability:
    """Classify a coincidence pattern: stable when every coalesced group has
    weight sum < 1, strictly semistable when all sums are <= 1 with equality
    achieved, unstable otherwise."""
    if not isinstance(pattern, CoincidencePattern):
        pattern = CoincidencePattern.from_coalesced(mu.k, pattern)
    if pattern.blocks and SymmetryPartition(pattern.blocks).k != mu.k:
        raise WeightSystemError("pattern must partition the index set of mu")
    semistable = False
    for block in pattern.coalesced_blocks():
        total = sum(mu[i] for i in block)
        if total > 1:
            return Stability.UNSTABLE
        if total == 1:
            semistable = True
    return Stability.STRICTLY_SEMISTABLE if semistable else Stability.STABLE


def contract(mu: WeightSystem, subset: Iterable[int]) -> WeightSystem:
    """Merge the weights indexed by ``subset`` into a single weight, placed
    last; the untouched weights keep their original order.

    Only hyperbolic contractions are allowed: the merged weights must sum
    to strictly less than 1.
    """
    I = sorted(set(subset))
    if len(I) < 2:
        raise BadSubsetError(f"need at least two indices to contract, got {I}")
    if mu.k - len(I) + 1 < 4:
        raise BadSubsetError(f"contracting {len(I)} of {mu.k} points drops below four points")
    for i in I:
        mu._check_index(i)
    merged = sum(mu[i] for i in I)
    if merged >= 1:
        raise NotHyperbolicError(f"subset weight sum {merged} is not below 1")
    kept = tuple(mu[i] for i in range(1, mu.k + 1) if i not in set(I))
    return WeightSystem(kept + (merged,))


def dual(mu: WeightSystem) -> WeightSystem:
    """For four points: the weight system (1-w_1, ..., 1-w_4), which has an
    isomorphic moduli space."""
    if mu.k != 4:
        raise NotFourPointsError(f"duality needs exactly 4 points, got {mu.k}")
    return WeightSystem(tuple(ONE - w for w in mu.weights))


class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {i: i for i in items}

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in self.parent:
            out.setdefault(self.find(i), []).append(i)
        return [sorted(g) for g in sorted(out.values(), key=min)]


def finest_partition(mu: WeightSystem) -> Optional[SymmetryPartition]:
    """The finest partition under which (mu, partition) satisfies half-INT.

    Pairs with weight sum below 1 whose orbifold weight is a half-integer
    but not an integer force their endpoints into a common block; the
    returned partition is the transitive closure of those forced pairs.
    Returns None when no admissible partition exists: some constrained pair
    falls outside (1/2)Z, or a forced pair has unequal weights.
    """
    uf = _UnionFind(range(1, mu.k + 1))
    for i, j in combinations(range(1, mu.k + 1), 2):
        if mu[i] + mu[j] >= 1:
            continue
        value = orbifold_weight(mu, i, j)
        if not is_half_integral(value):
            return None
        if is_strict_half(value):
            if mu[i] != mu[j]:
                return None
            uf.union(i, j)
    return SymmetryPartition(tuple(tuple(g) for g in uf.groups()))


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items``, in a deterministic order."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        yield [[first]] + sub
        for n in range(len(sub)):
            yield sub[:n] + [[first] + sub[n]] + sub[n + 1 :]


def admissible_partitions(mu: WeightSystem) -> list[SymmetryPartition]:
    """All partitions with constant-weight blocks that coarsen the finest
    partition and satisfy half-INT; empty iff no partition is admissible.

    Blocks can only merge atoms of equal weight, so the coarsenings factor
    through the weight values: the result is the product, over values, of
    the set partitions of that value's atoms.
    """
    finest = finest_partition(mu)
    if finest is None:
        return []
    by_value: dict[Fraction, list[tuple[int, ...]]] = {}
    for atom in finest.blocks:
        by_value.setdefault(mu[atom[0]], []).append(atom)
    partitions = [[]]
    for value in sorted(by_value):
        atoms = by_value[value]
        extended = []
        for grouping in set_partitions(atoms):
            merged = [tuple(sorted(i for atom in group for i in atom)) for group in grouping]
            for prefix in partitions:
                extended.append(prefix + merged)
        partitions = extended
    result = [SymmetryPartition(tuple(blocks)) for blocks in partitions]
    result = [p for p in result if check_half_int(mu, p)]
    result.sort(key=lambda p: p.blocks)
    return result


def commensurability_index(fine: SymmetryPartition, coarse: SymmetryPartition) -> int:
    """Index of the fine partition's group inside the coarse partition's
    group; defined whenever fine refines coarse."""
    if not fine.refines(coarse):
        raise NotARefinementError(f"{fine} does not refine {coarse}")
    num, den = coarse.group_order(), fine.group_order()
    if num % den:  # Lagrange: cannot happen for genuine refinements
        raise NotARefinementError(f"group order {num} not divisible by {den}")
    return num // den
