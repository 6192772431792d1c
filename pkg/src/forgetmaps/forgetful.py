"""Forgetful maps between weighted moduli data and their classification.

A candidate map drops some marked points of a source weight system and
matches the survivors with the slots of a target weight system.  Whether the
candidate induces a map of the orbifold quotients is decided in three
stages:

1. symmetry compatibility: each source symmetry block is either entirely
   forgotten or carried injectively into a single target block;
2. smooth locus: the configurations removed downstream (codimension-one
   fixed loci of the target symmetry group) must be matched by removed
   configurations upstream;
3. divisibility: for every surviving pair constrained upstream, the target
   orbifold weight divides the source orbifold weight, with the factor 2
   bookkeeping for half twists inside symmetry blocks.

``scan`` runs the pipeline over whole catalogs.  Alignments are enumerated
as assignment matrices between weight-value classes (merging alignments
related by weight-preserving relabelings), dead branches are cut by a
per-pair necessary test, and for surviving alignments the admissible
symmetry partitions on both sides are resolved by constraint propagation.
Every emitted combination is re-checked through the direct per-candidate
path, so the two routes cannot silently disagree.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial
from typing import Iterator, Optional, Sequence, Union

from .enumeration import CatalogEntry, canonicalize
from .weights import (
    INFINITY,
    ExtValue,
    Infinite,
    ONE,
    SymmetryPartition,
    WeightSystem,
    WeightSystemError,
    _UnionFind,
    admissible_partitions,
    dual,
    orbifold_weight,
    orbifold_weight_sym,
    reciprocal,
    set_partitions,
)

STAGE_DIVISIBILITY = "divisibility"
STAGE_FULL = "full"
STAGES = (STAGE_DIVISIBILITY, STAGE_FULL)

STRICT_BULLETS = "bullets"
STRICT_LITERAL = "literal"
STRICTNESS_MODES = (STRICT_BULLETS, STRICT_LITERAL)

#: Default divisibility mode.  The symmetry-adjusted weights must divide
#: directly ("literal").  The per-orbit relaxation ("bullets") weakens the
#: mixed case (same target orbit, split source orbit) to t | 2s; a full
#: twist upstream maps to the square of a half twist downstream, so the
#: kernel containment actually needs 2t | 2s there, and the relaxation
#: admits maps whose point relabeling exchanges unequal weights (for
#: example a self-map of (3,3,3,3,3,1)/8 moving the 1 onto a 3) that do
#: not lift.  The relaxed mode is kept for comparison runs.
DEFAULT_STRICTNESS = STRICT_LITERAL


class PreconditionViolated(ValueError):
    """An operation was called outside its stated precondition."""


class DegenerateConfiguration(ValueError):
    """Three or more of the four cross-ratio points coincide."""


#: A permutation that is a product of disjoint transpositions, stored as a
#: sorted tuple of sorted 2-cycles, e.g. ((1,2),(3,4)).
Involution = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ForgetfulCandidate:
    """A source system with symmetry, a target system with symmetry, and an
    injective alignment of target slots onto surviving source indices.

    ``alignment[t-1]`` is the source index feeding target slot ``t``.  The
    weights at matched positions need not agree.
    """

    source: WeightSystem
    sigma: SymmetryPartition
    target: WeightSystem
    tau: SymmetryPartition

    alignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alignment", tuple(self.alignment))
        if self.target.k > self.source.k:
            raise PreconditionViolated("target has more points than the source")
        if not self.sigma.valid_for(self.source):
            raise PreconditionViolated("sigma is not a constant-weight partition of the source")
        if not self.tau.valid_for(self.target):
            raise PreconditionViolated("tau is not a constant-weight partition of the target")
        if len(self.alignment) != self.target.k:
            raise PreconditionViolated("alignment must assign every target slot")
        if len(set(self.alignment)) != len(self.alignment):
            raise PreconditionViolated("alignment must be injective")
        for x in self.alignment:
            self.source._check_index(x)

    @property
    def survivors(self) -> frozenset[int]:
        return frozenset(self.alignment)

    @property
    def forgotten(self) -> tuple[int, ...]:
        img = self.survivors
        return tuple(x for x in range(1, self.source.k + 1) if x not in img)

    def slot_of(self, source_index: int) -> int:
        """The target slot fed by a surviving source index."""
        return self.alignment.index(source_index) + 1


#: A classification witness: (stage name, offending block, element or pair).
Witness = tuple[str, tuple]


@dataclass(frozen=True)
class ClassificationVerdict:
    """Stage-by-stage outcome for one candidate.

    When symmetry compatibility fails the two gated stages are reported
    failed without witnesses of their own; otherwise every failed stage
    contributes at least one witness.
    """

    symmetry_compatible: bool
    smooth_locus_ok: bool
    divisibility_ok: bool
    witnesses: tuple[Witness, ...]
    is_orbifold_map: bool


# ---------------------------------------------------------------------------
# stage 1: symmetry compatibility


def _symmetry_violations(cand: ForgetfulCandidate) -> list[tuple[int, ...]]:
    img = cand.survivors
    inv = {x: slot for slot, x in enumerate(cand.alignment, start=1)}
    bad = []
    for block in cand.sigma.blocks:
        surviving = [x for x in block if x in img]
        if not surviving:
            continue
        if len(surviving) != len(block):
            bad.append(block)  # block split between kept and forgotten points
            continue
        slots = [inv[x] for x in block]
        if any(not cand.tau.same_block(slots[0], s) for s in slots[1:]):
            bad.append(block)
    return bad


def check_symmetry_compat(cand: ForgetfulCandidate) -> bool:
    """True iff every sigma block is entirely forgotten, or survives as a
    whole into a single tau block."""
    return not _symmetry_violations(cand)


# ---------------------------------------------------------------------------
# stage 2: smooth locus


def codim1_fixed_elements(
    k: int, partition: SymmetryPartition, include_k4_transpositions: bool = True
) -> list[Involution]:
    """Elements of the partition's group whose fixed locus has codimension
    one inside the distinct-point configuration space.

    Five points: products of two disjoint transpositions.  Six points:
    products of three disjoint transpositions.  Four points: single
    transpositions (isolated fixed points of the one-dimensional moduli
    space; double transpositions act trivially on the cross-ratio and are
    excluded).  Any other number of points: none.
    """
    if partition.k != k:
        raise WeightSystemError(f"partition covers {partition.k} indices, expected {k}")
    pairs = [
        (i, j)
        for i, j in combinations(range(1, k + 1), 2)
        if partition.same_block(i, j)
    ]
    if k == 4 and include_k4_transpositions:
        return [(p,) for p in pairs]
    if k == 5:
        count = 2
    elif k == 6:
        count = 3
    else:
        return []
    elements = []
    for combo in combinations(pairs, count):
        touched = [x for p in combo for x in p]
        if len(set(touched)) == 2 * count:
            elements.append(tuple(sorted(combo)))
    return sorted(elements)


def _conjugate(element: Involution, alignment: tuple[int, ...]) -> Involution:
    """Push a target-side involution through the alignment to the source."""
    return tuple(
        sorted(tuple(sorted((alignment[p - 1], alignment[q - 1]))) for p, q in element)
    )


def _smooth_locus_violations(
    cand: ForgetfulCandidate, k4_fixed_points: bool = True
) -> list[Involution]:
    if not check_symmetry_compat(cand):
        raise PreconditionViolated("smooth-locus check requires symmetry compatibility")
    elements = codim1_fixed_elements(cand.target.k, cand.tau, k4_fixed_points)
    if cand.source.k > cand.target.k:
        # A forgotten coordinate moves freely over the preimage of any
        # fixed locus downstream, so nothing upstream can cover it: the
        # check fails exactly when the downstream list is non-empty.
        return list(elements)
    violations = []
    for element in elements:
        mapped = _conjugate(element, cand.alignment)
        if any(not cand.sigma.same_block(p, q) for p, q in mapped):
            violations.append(element)
    return violations


def check_smooth_locus(cand: ForgetfulCandidate, k4_fixed_points: bool = True) -> bool:
    """True iff the downstream codimension-one fixed loci are matched by
    removed loci upstream: for equal point counts each element must
    correspond under the alignment to an element of sigma's group, and with
    strictly fewer target points the downstream list must be empty."""
    return not _smooth_locus_violations(cand, k4_fixed_points)


# ---------------------------------------------------------------------------
# stage 3: divisibility


def _as_integer(value: ExtValue) -> Optional[int]:
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return None


def _doubled(value: ExtValue) -> ExtValue:
    return INFINITY if value is INFINITY else 2 * value


def _pair_divisible(
    s: Fraction, t: ExtValue, same_sigma: bool, same_tau: bool, strictness: str
) -> bool:
    """Divisibility test for one constrained pair.

    ``s`` is the raw source value (finite, positive), ``t`` the raw target
    value.  In ``bullets`` mode the three orbit combinations are tested as
    t | s, t | 2s and 2t | 2s; in ``literal`` mode the symmetry-adjusted
    values are divided directly.  Signs are ignored; a non-integer on either
    side of the relation, or an infinite target, fails.
    """
    if strictness == STRICT_BULLETS:
        if not same_tau:
            vt, vs = t, s
        elif same_sigma:
            vt, vs = _doubled(t), 2 * s
        else:
            vt, vs = t, 2 * s
    elif strictness == STRICT_LITERAL:
        vt = _doubled(t) if same_tau else t
        vs = 2 * s if same_sigma else s
    else:
        raise ValueError(f"strictness must be one of {STRICTNESS_MODES}, got {strictness!r}")
    if vt is INFINITY:
        return False
    it, is_ = _as_integer(vt), _as_integer(vs)
    if it is None or is_ is None:
        return False
    return is_ % it == 0


def _value_str(value: ExtValue) -> str:
    return "inf" if value is INFINITY else str(value)


def _divisibility_violations(
    cand: ForgetfulCandidate, strictness: str = DEFAULT_STRICTNESS
) -> list[tuple]:
    if not check_symmetry_compat(cand):
        raise PreconditionViolated("divisibility check requires symmetry compatibility")
    mu, nu = cand.source, cand.target
    bad = []
    for i, j in combinations(range(1, nu.k + 1), 2):
        x, y = cand.alignment[i - 1], cand.alignment[j - 1]
        if mu[x] + mu[y] >= 1:
            continue  # the pair contributes no relation upstream
        same_sigma = cand.sigma.same_block(x, y)
        same_tau = cand.tau.same_block(i, j)
        # under compatibility a surviving block lands inside one tau block
        assert not (same_sigma and not same_tau), "split image of a sigma block"
        s = ONE / (ONE - mu[x] - mu[y])
        t = orbifold_weight(nu, i, j)
        if not _pair_divisible(s, t, same_sigma, same_tau, strictness):
            bad.append((i, j, _value_str(t), _value_str(s)))
    return bad


def check_divisibility(cand: ForgetfulCandidate, strictness: str = DEFAULT_STRICTNESS) -> bool:
    """True iff every target pair whose aligned source pair sums below 1
    passes the divisibility test in the requested mode."""
    return not _divisibility_violations(cand, strictness)


def classify_candidate(
    cand: ForgetfulCandidate,
    strictness: str = DEFAULT_STRICTNESS,
    k4_fixed_points: bool = True,
) -> ClassificationVerdict:
    """Run the three stages.  Symmetry compatibility gates the other two;
    when it holds, the smooth-locus and divisibility stages are evaluated
    independently so the verdict reports both."""
    sym = _symmetry_violations(cand)
    if sym:
        witnesses = tuple(("symmetry", block) for block in sym)
        return ClassificationVerdict(False, False, False, witnesses, False)
    smooth = _smooth_locus_violations(cand, k4_fixed_points)
    divis = _divisibility_violations(cand, strictness)
    witnesses = tuple(("smooth_locus", e) for e in smooth) + tuple(
        ("divisibility", v) for v in divis
    )
    ok = not smooth and not divis
    return ClassificationVerdict(True, not smooth, not divis, witnesses, ok)


# ---------------------------------------------------------------------------
# candidate generation


def _compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not caps:
        if total == 0:
            yield ()
        return
    for v in range(min(total, caps[0]), -1, -1):
        for rest in _compositions(total - v, caps[1:]):
            yield (v,) + rest


def _assignment_matrices(
    row_sums: Sequence[int], col_caps: Sequence[int]
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All non-negative integer matrices with the given row sums and with
    column sums bounded by the given capacities."""

    def rows(r: int, caps: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if r == len(row_sums):
            yield ()
            return
        for row in _compositions(row_sums[r], caps):
            rest_caps = tuple(c - v for c, v in zip(caps, row))
            for rest in rows(r + 1, rest_caps):
                yield (row,) + rest

    yield from rows(0, tuple(col_caps))


def _interchange_classes(blocks, weights: WeightSystem) -> list[list[int]]:
    """Indices of blocks grouped by (size, weight); blocks within a group
    can be swapped by weight-preserving relabelings."""
    groups: dict[tuple, list[int]] = {}
    for n, block in enumerate(blocks):
        groups.setdefault((len(block), weights[block[0]]), []).append(n)
    return [groups[key] for key in sorted(groups, key=lambda t: (t[0], str(t[1])))]


def _sorted_within_classes(rows: tuple, classes: list[list[int]]) -> tuple:
    out = list(rows)
    for cls in classes:
        vectors = sorted(rows[i] for i in cls)
        for pos, vec in zip(sorted(cls), vectors):
            out[pos] = vec
    return tuple(out)


def _class_permutations(classes: list[list[int]], n: int) -> Iterator[tuple[int, ...]]:
    perm = list(range(n))
    pools = [permutations(cls) for cls in classes]
    for choice in product(*pools):
        for cls, image in zip(classes, choice):
            for src, dst in zip(cls, image):
                perm[src] = dst
        yield tuple(perm)


def _transpose(matrix: tuple) -> tuple:
    return tuple(zip(*matrix))


def _canonical_matrix(matrix, row_classes, col_classes):
    """Lexicographic minimum of the matrix over row permutations within row
    classes and column permutations within column classes.

    The cheaper side is enumerated; the other side is normalised by
    sorting, which realises the minimum over its permutations.
    """
    cost_rows = 1
    for cls in row_classes:
        cost_rows *= factorial(len(cls))
    cost_cols = 1
    for cls in col_classes:
        cost_cols *= factorial(len(cls))
    best = None
    if cost_cols <= cost_rows:
        for perm in _class_permutations(col_classes, len(matrix[0]) if matrix else 0):
            moved = tuple(tuple(row[perm[c]] for c in range(len(row))) for row in matrix)
            key = _sorted_within_classes(moved, row_classes)
            if best is None or key < best:
                best = key
    else:
        transposed = _transpose(matrix)
        for perm in _class_permutations(row_classes, len(transposed[0]) if transposed else 0):
            moved = tuple(tuple(col[perm[r]] for r in range(len(col))) for col in transposed)
            key = _sorted_within_classes(moved, col_classes)
            if best is None or key < best:
                best = key
    return best


def _materialize_alignment(tgt_blocks, src_blocks, matrix) -> tuple[int, ...]:
    """A concrete alignment realising an assignment matrix: slots of each
    target block, ascending, draw the lowest unused indices of each source
    block in column order."""
    used = [0] * len(src_blocks)
    size = sum(len(b) for b in tgt_blocks)
    alignment = [0] * size
    for r, block in enumerate(tgt_blocks):
        chosen: list[int] = []
        for c, count in enumerate(matrix[r]):
            pool = src_blocks[c]
            chosen.extend(pool[used[c] : used[c] + count])
            used[c] += count
        for slot, x in zip(sorted(block), chosen):
            alignment[slot - 1] = x
    return tuple(alignment)


def generate_candidates(
    source: WeightSystem,
    sigma: SymmetryPartition,
    target: WeightSystem,
    tau: SymmetryPartition,
) -> list[ForgetfulCandidate]:
    """One representative per equivalence class of alignments, where two
    alignments are equivalent when related by a weight- and block-preserving
    relabeling of the source composed with one of the target."""
    if target.k > source.k:
        return []
    src_blocks, tgt_blocks = sigma.blocks, tau.blocks
    row_classes = _interchange_classes(tgt_blocks, target)
    col_classes = _interchange_classes(src_blocks, source)
    row_sums = [len(b) for b in tgt_blocks]
    col_caps = [len(b) for b in src_blocks]
    seen: dict[tuple, tuple] = {}
    for matrix in _assignment_matrices(row_sums, col_caps):
        key = _canonical_matrix(matrix, row_classes, col_classes)
        if key not in seen:
            seen[key] = matrix
    out = []
    for key in sorted(seen):
        alignment = _materialize_alignment(tgt_blocks, src_blocks, seen[key])
        out.append(ForgetfulCandidate(source, sigma, target, tau, alignment))
    return out


# ---------------------------------------------------------------------------
# cross-ratio and divisor fates

Point = Union[int, Fraction, Infinite]


def _homogeneous(x: Point) -> tuple[Fraction, Fraction]:
    if x is INFINITY:
        return (ONE, Fraction(0))
    return (Fraction(x), ONE)


def cross_ratio(x1: Point, x2: Point, x3: Point, x4: Point) -> ExtValue:
    """The exact cross-ratio ((x3-x2)(x4-x1)) / ((x3-x1)(x4-x2)), evaluated
    projectively so the point at infinity needs no special casing.  Raises
    ``DegenerateConfiguration`` when three of the points coincide."""
    p1, p2, p3, p4 = (_homogeneous(x) for x in (x1, x2, x3, x4))

    def det(p, q):
        return p[0] * q[1] - q[0] * p[1]

    num = det(p3, p2) * det(p4, p1)
    den = det(p3, p1) * det(p4, p2)
    if num == 0 and den == 0:
        raise DegenerateConfiguration("three of the four points coincide")
    if den == 0:
        return INFINITY
    return num / den


@dataclass(frozen=True)
class DivisorFate:
    """Image of a source coincidence divisor under the forgetful map."""

    kind: str  # surjective | onto_divisor | contracted_to | extension_determined
    pair: Optional[tuple[int, int]] = None  # target pair, when meaningful


def divisor_fate(cand: ForgetfulCandidate, i: int, j: int) -> DivisorFate:
    """Where the source divisor {x_i = x_j} goes.

    A pair with a forgotten member surjects onto the target.  A surviving
    pair maps onto the matching target divisor when the target pair sum is
    below 1, and is contracted to the boundary point of the complementary
    pair for four-point targets when the sum exceeds 1; remaining cases are
    left to the extension of the map.
    """
    mu, nu = cand.source, cand.target
    mu._check_index(i)
    mu._check_index(j)
    if i == j or mu[i] + mu[j] >= 1:
        raise PreconditionViolated("need a coincidence divisor: distinct indices, weight sum below 1")
    img = cand.survivors
    if i not in img or j not in img:
        return DivisorFate("surjective")
    p, q = sorted((cand.slot_of(i), cand.slot_of(j)))
    pair_sum = nu[p] + nu[q]
    if pair_sum < 1:
        return DivisorFate("onto_divisor", (p, q))
    if pair_sum > 1 and nu.k == 4:
        rest = tuple(t for t in range(1, 5) if t not in (p, q))
        return DivisorFate("contracted_to", rest)
    return DivisorFate("extension_determined", (p, q))


# ---------------------------------------------------------------------------
# catalog scan


@dataclass(frozen=True)
class ScanFilters:
    """Which catalog pairs to classify and at what stage.

    ``stage="divisibility"`` requires symmetry compatibility plus
    divisibility; ``stage="full"`` adds the smooth-locus stage.  The
    reported verdicts always carry all three flags.
    """

    source_dim: Optional[int] = None
    target_dim: Optional[int] = None
    cocompact_only: bool = False
    require_noncompact_side: bool = False
    stage: str = STAGE_DIVISIBILITY
    strictness: str = DEFAULT_STRICTNESS
    k4_fixed_points: bool = True

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}, got {self.stage!r}")
        if self.strictness not in STRICTNESS_MODES:
            raise ValueError(
                f"strictness must be one of {STRICTNESS_MODES}, got {self.strictness!r}"
            )


@dataclass(frozen=True)
class ComboReport:
    """One passing choice of symmetry partitions for an alignment class."""

    sigma: SymmetryPartition
    tau: SymmetryPartition
    verdict: ClassificationVerdict


@dataclass(frozen=True)
class PairMap:
    """One alignment class together with every passing partition pair."""

    alignment: tuple[int, ...]
    combos: tuple[ComboReport, ...]


@dataclass(frozen=True)
class ScanRecord:
    """All passing forgetful maps between one source and one target system."""

    source: CatalogEntry
    target: CatalogEntry
    maps: tuple[PairMap, ...]
    dual_partner: Optional[tuple[tuple[int, ...], int]] = None  # (numerators, lcd)


@lru_cache(maxsize=None)
def _admissible_cached(mu: WeightSystem) -> tuple[SymmetryPartition, ...]:
    return tuple(admissible_partitions(mu))


def _value_classes(entry: CatalogEntry) -> list[tuple[int, ...]]:
    """Runs of equal weights in the canonical (non-increasing) order."""
    ws = entry.weights
    classes: list[list[int]] = []
    for i in range(1, ws.k + 1):
        if classes and ws[classes[-1][0]] == ws[i]:
            classes[-1].append(i)
        else:
            classes.append([i])
    return [tuple(c) for c in classes]


def _forced_classes(entry: CatalogEntry, classes: list[tuple[int, ...]]) -> list[bool]:
    """Whether each value class is glued into a single block of the finest
    partition (an all-or-nothing property of the weight value)."""
    finest_blocks = set(entry.finest.blocks)
    flags = []
    for cls in classes:
        if len(cls) >= 2 and cls in finest_blocks:
            flags.append(True)
        else:
            # the class must then be atomised into singletons
            assert all((i,) in finest_blocks for i in cls), "value class split by gluing"
            flags.append(False)
    return flags


def _identity_matrix_pattern(
    classes_s: list[tuple[int, ...]], classes_t: list[tuple[int, ...]]
) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(len(row) if r == c else 0 for c in range(len(classes_s)))
        for r, row in enumerate(classes_t)
    )


def _scan_pair(src: CatalogEntry, tgt: CatalogEntry, filters: ScanFilters) -> Optional[ScanRecord]:
    mu, nu = src.weights, tgt.weights
    classes_s = _value_classes(src)
    classes_t = _value_classes(tgt)
    forced_s = _forced_classes(src, classes_s)
    forced_t = _forced_classes(tgt, classes_t)
    vs = [mu[c[0]] for c in classes_s]
    vt = [nu[c[0]] for c in classes_t]
    ns, nt = len(classes_s), len(classes_t)

    s_table: list[list[Optional[Fraction]]] = [
        [None if vs[a] + vs[b] >= 1 else ONE / (ONE - vs[a] - vs[b]) for b in range(ns)]
        for a in range(ns)
    ]
    t_table: list[list[ExtValue]] = [[reciprocal(ONE - vt[a] - vt[b]) for b in range(nt)] for a in range(nt)]

    ok_memo: dict[tuple, bool] = {}

    def leg_ok(c1: int, r1: int, c2: int, r2: int) -> bool:
        """Necessary condition for two aligned slots: some orbit combination
        allowed by the forced-gluing structure passes the divisibility test."""
        key = ((c1, r1), (c2, r2)) if (c1, r1) <= (c2, r2) else ((c2, r2), (c1, r1))
        hit = ok_memo.get(key)
        if hit is not None:
            return hit
        s = s_table[c1][c2]
        if s is None:
            ok_memo[key] = True
            return True
        t = t_table[r1][r2]
        if c1 == c2:
            sigma_options = (True,) if forced_s[c1] else (True, False)
        else:
            sigma_options = (False,)
        if r1 == r2:
            tau_options = (True,) if forced_t[r1] else (True, False)
        else:
            tau_options = (False,)
        result = any(
            _pair_divisible(s, t, ss, st, filters.strictness)
            for ss in sigma_options
            for st in tau_options
            if st or not ss
        )
        ok_memo[key] = result
        return result

    row_sums = [len(c) for c in classes_t]
    col_caps = [len(c) for c in classes_s]
    self_pair = mu == nu
    identity = _identity_matrix_pattern(classes_s, classes_t) if self_pair else None

    matrices: list[tuple[tuple[int, ...], ...]] = []

    def legs(row: Sequence[int]) -> list[int]:
        return [c for c, v in enumerate(row) if v]

    def extend(r: int, caps: tuple[int, ...], placed: tuple[tuple[int, ...], ...]) -> None:
        if r == nt:
            matrices.append(placed)
            return
        for row in _compositions(row_sums[r], caps):
            ok = True
            used = legs(row)
            for a_pos in range(len(used)):
                c1 = used[a_pos]
                if row[c1] >= 2 and not leg_ok(c1, r, c1, r):
                    ok = False
                    break
                for c2 in used[a_pos + 1 :]:
                    if not leg_ok(c1, r, c2, r):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                for rp in range(r):
                    for c1 in legs(placed[rp]):
                        if any(not leg_ok(c1, rp, c2, r) for c2 in used):
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                extend(r + 1, tuple(c - v for c, v in zip(caps, row)), placed + (row,))

    extend(0, tuple(col_caps), ())

    maps = []
    for matrix in matrices:
        if identity is not None and matrix == identity:
            continue  # the identity on equal systems: an obvious commensurability
        alignment = _materialize_alignment(classes_t, classes_s, matrix)
        combos = _passing_combos(src, tgt, alignment, filters)
        if combos:
            maps.append(PairMap(alignment, tuple(combos)))
    if not maps:
        return None
    maps.sort(key=lambda m: m.alignment)
    return ScanRecord(src, tgt, tuple(maps))


def _passing_combos(
    src: CatalogEntry, tgt: CatalogEntry, alignment: tuple[int, ...], filters: ScanFilters
) -> list[ComboReport]:
    """All (sigma, tau) pairs under which the alignment passes the requested
    stage, found by constraint propagation over the finest-partition atoms
    and re-validated through the direct candidate path."""
    mu, nu = src.weights, tgt.weights
    img = set(alignment)
    atoms = src.finest.blocks
    atom_of = {i: n for n, atom in enumerate(atoms) for i in atom}
    full = filters.stage == STAGE_FULL
    out: list[ComboReport] = []

    for tau in _admissible_cached(nu):
        if full and mu.k > nu.k and codim1_fixed_elements(nu.k, tau, filters.k4_fixed_points):
            continue
        # cells: the forgotten set plus the preimage of each tau block;
        # any sigma must refine them, so every atom must sit inside one cell
        cell_of = {x: -1 for x in range(1, mu.k + 1) if x not in img}
        for b_idx, block in enumerate(tau.blocks):
            for slot in block:
                cell_of[alignment[slot - 1]] = b_idx
        if any(len({cell_of[i] for i in atom}) != 1 for atom in atoms):
            continue

        uf = _UnionFind(range(len(atoms)))
        must_cross: list[tuple[int, int]] = []
        dead = False
        for i, j in combinations(range(1, nu.k + 1), 2):
            x, y = alignment[i - 1], alignment[j - 1]
            if mu[x] + mu[y] >= 1:
                continue
            s = ONE / (ONE - mu[x] - mu[y])
            t = orbifold_weight(nu, i, j)
            if not tau.same_block(i, j):
                # compatibility forbids a glued source pair here
                if atom_of[x] == atom_of[y] or not _pair_divisible(
                    s, t, False, False, filters.strictness
                ):
                    dead = True
                    break
                continue
            same_atom = atom_of[x] == atom_of[y]
            same_ok = mu[x] == mu[y] and _pair_divisible(s, t, True, True, filters.strictness)
            cross_ok = not same_atom and _pair_divisible(s, t, False, True, filters.strictness)
            if same_atom:
                if not same_ok:
                    dead = True
                    break
            elif same_ok and cross_ok:
                continue
            elif same_ok:
                uf.union(atom_of[x], atom_of[y])
            elif cross_ok:
                must_cross.append((atom_of[x], atom_of[y]))
            else:
                dead = True
                break
        if dead:
            continue

        if full and mu.k == nu.k:
            for element in codim1_fixed_elements(nu.k, tau, filters.k4_fixed_points):
                for p, q in element:
                    x, y = alignment[p - 1], alignment[q - 1]
                    if mu[x] != mu[y]:
                        dead = True
                        break
                    uf.union(atom_of[x], atom_of[y])
                if dead:
                    break
            if dead:
                continue

        group_root = {n: uf.find(n) for n in range(len(atoms))}
        if any(group_root[a] == group_root[b] for a, b in must_cross):
            continue
        groups: dict[int, list[int]] = {}
        for n, root in group_root.items():
            groups.setdefault(root, []).append(n)
        super_atoms = {
            root: tuple(sorted(i for n in members for i in atoms[n]))
            for root, members in groups.items()
        }
        # merged groups are constant-weight and single-cell by construction
        for indices in super_atoms.values():
            assert len({mu[i] for i in indices}) == 1
            assert len({cell_of[i] for i in indices}) == 1
        cross_pairs = {
            tuple(sorted((group_root[a], group_root[b]))) for a, b in must_cross
        }

        for sigma in _sigma_choices(mu, super_atoms, cell_of, cross_pairs):
            cand = ForgetfulCandidate(mu, sigma, nu, tau, alignment)
            verdict = classify_candidate(
                cand, strictness=filters.strictness, k4_fixed_points=filters.k4_fixed_points
            )
            passed = verdict.symmetry_compatible and verdict.divisibility_ok
            if full:
                passed = passed and verdict.smooth_locus_ok
            if not passed:  # the two routes must agree
                raise RuntimeError(
                    f"constraint solver emitted a failing combination: {cand} -> {verdict}"
                )
            out.append(ComboReport(sigma, tau, verdict))
    out.sort(key=lambda combo: (combo.sigma.blocks, combo.tau.blocks))
    return out


def _sigma_choices(
    mu: WeightSystem,
    super_atoms: dict[int, tuple[int, ...]],
    cell_of: dict[int, int],
    cross_pairs: set[tuple[int, int]],
) -> Iterator[SymmetryPartition]:
    """Constant-weight coarsenings of the merged atoms that respect the
    cells and keep every must-cross pair in distinct blocks."""
    buckets: dict[tuple, list[int]] = {}
    for root, indices in super_atoms.items():
        key = (cell_of[indices[0]], mu[indices[0]])
        buckets.setdefault(key, []).append(root)
    bucket_keys = sorted(buckets, key=lambda t: (t[0], str(t[1])))

    per_bucket: list[list[list[list[int]]]] = []
    for key in bucket_keys:
        roots = sorted(buckets[key])
        choices = []
        for grouping in set_partitions(roots):
            if any(
                any(a in blk and b in blk for blk in grouping) for a, b in cross_pairs
            ):
                continue
            choices.append(grouping)
        per_bucket.append(choices)

    for pick in product(*per_bucket):
        blocks = []
        for grouping in pick:
            for blk in grouping:
                blocks.append(tuple(sorted(i for root in blk for i in super_atoms[root])))
        yield SymmetryPartition(tuple(blocks))


def _record_sort_key(record: ScanRecord):
    return (
        record.source.k,
        record.source.lcd,
        record.source.numerators(),
        record.target.k,
        record.target.lcd,
        record.target.numerators(),
    )


def _scan_chunk(
    pairs: list[tuple[CatalogEntry, CatalogEntry]], filters: ScanFilters
) -> list[ScanRecord]:
    out = []
    for src, tgt in pairs:
        record = _scan_pair(src, tgt, filters)
        if record is not None:
            out.append(record)
    return out


def scan(
    sources: Sequence[CatalogEntry],
    targets: Sequence[CatalogEntry],
    filters: ScanFilters = ScanFilters(),
    workers: int = 1,
) -> list[ScanRecord]:
    """Classify every source/target pair admitted by the filters.

    Records are keyed by the (source, target) weight systems; each record
    lists the passing alignment classes with all passing partition pairs.
    For four-point targets the record is cross-linked with the record of the
    dual target when both pass.  Output is deterministic and independent of
    the worker count.
    """
    pairs = []
    for src in sources:
        if filters.source_dim is not None and src.dimension != filters.source_dim:
            continue
        if filters.cocompact_only and not src.cocompact:
            continue
        for tgt in targets:
            if filters.target_dim is not None and tgt.dimension != filters.target_dim:
                continue
            if filters.cocompact_only and not tgt.cocompact:
                continue
            if tgt.k > src.k:
                continue
            if filters.require_noncompact_side and src.cocompact and tgt.cocompact:
                continue
            pairs.append((src, tgt))

    records: list[ScanRecord] = []
    if workers > 1 and len(pairs) > 1:
        chunk = -(-len(pairs) // workers)
        chunks = [pairs[i : i + chunk] for i in range(0, len(pairs), chunk)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_scan_chunk, chunks, [filters] * len(chunks)):
                records.extend(result)
    else:
        records = _scan_chunk(pairs, filters)
    records.sort(key=_record_sort_key)

    by_key = {
        (rec.source.numerators(), rec.source.lcd, rec.target.numerators(), rec.target.lcd): n
        for n, rec in enumerate(records)
    }
    for n, rec in enumerate(records):
        if rec.target.k != 4:
            continue
        partner = canonicalize(dual(rec.target.weights))
        key = (rec.source.numerators(), rec.source.lcd, partner.numerators(), partner.lcd)
        if key in by_key:
            records[n] = replace(rec, dual_partner=(partner.numerators(), partner.lcd))
    return records
