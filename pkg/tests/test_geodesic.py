from forgetmaps.enumeration import MODE_HALF, MODE_INT, canonicalize, enumerate_catalog
from forgetmaps.geodesic import (
    commensurability_classes,
    hyperbolic_contractions,
    inclusion_dag,
)
from forgetmaps.weights import (
    SymmetryPartition,
    WeightSystem,
    admissible_partitions,
    check_int,
    commensurability_index,
)

W = WeightSystem.from_numerators
SP = SymmetryPartition


def test_hyperbolic_contractions_examples():
    rows = hyperbolic_contractions(W((3, 3, 3, 3, 3, 1), 8))
    assert len(rows) == 25
    sizes = sorted(len(subset) for subset, _ in rows)
    assert sizes == [2] * 15 + [3] * 10
    assert len(hyperbolic_contractions(W((2, 2, 2, 2, 2), 5))) == 10
    assert hyperbolic_contractions(W((3, 3, 3, 7), 8)) == []


def test_inclusion_dag_structure():
    catalog = enumerate_catalog(4, 12, MODE_INT) + enumerate_catalog(
        5, 12, MODE_INT
    ) + enumerate_catalog(6, 12, MODE_INT)
    edges = inclusion_dag(catalog)
    assert edges
    for edge in edges:
        assert edge.child.k == edge.parent.k - len(edge.subset) + 1
        assert edge.child.k < edge.parent.k  # acyclic: point count strictly drops
        assert edge.codimension == len(edge.subset) - 1
        assert not edge.heuristic
        assert check_int(edge.child)
        assert edge.child.lcd <= edge.parent.lcd
        assert edge.child_in_catalog  # lcd divides the parent lcd, so always present


def test_inclusion_dag_known_edge():
    mu = W((3, 3, 3, 3, 3, 1), 8)
    child = canonicalize(
        dict(hyperbolic_contractions(mu))[(5, 6)]
    )
    assert child.numerators() == (4, 3, 3, 3, 3)
    assert check_int(child)

    lam = W((2, 2, 2, 2, 2), 5)
    catalog = enumerate_catalog(4, 12, MODE_INT)
    present = {(e.numerators(), e.lcd) for e in catalog}
    for subset, contracted in hyperbolic_contractions(lam):
        canon = canonicalize(contracted)
        assert canon.numerators() == (4, 2, 2, 2)
        assert (canon.numerators(), canon.lcd) in present


def test_heuristic_edges_respect_forced_blocks():
    catalog = enumerate_catalog(6, 10, MODE_HALF)
    proper_half = [e for e in catalog if not e.satisfies_int]
    assert proper_half
    edges = inclusion_dag(proper_half)
    for edge in edges:
        assert edge.heuristic
        entry = next(e for e in proper_half if e.weights == edge.parent)
        chosen = set(edge.subset)
        for block in entry.finest.blocks:
            assert set(block) <= chosen or not (set(block) & chosen)


def test_contraction_commutes_with_canonicalization():
    mu = W((1, 3, 3, 3, 3, 3), 8)  # permuted copy of a catalog entry
    canon = canonicalize(mu)
    # merging the 1 with a 3 in either labeling gives the same canonical child
    child_a = canonicalize(dict(hyperbolic_contractions(mu))[(1, 2)])
    child_b = canonicalize(dict(hyperbolic_contractions(canon))[(5, 6)])
    assert child_a == child_b


def test_commensurability_classes_examples():
    catalog = enumerate_catalog(5, 6, MODE_HALF)
    entry = next(e for e in catalog if e.numerators() == (3, 3, 2, 2, 2))
    lattice = commensurability_classes([entry])[0]
    parts = lattice.partitions
    assert parts == tuple(admissible_partitions(entry.weights))
    trivial = SP.singletons(5)
    s3 = SP.from_blocks(5, [(3, 4, 5)])
    assert trivial in parts and s3 in parts
    index = dict(
        ((a, b), idx) for a, b, idx in lattice.edges
    )
    assert index[(parts.index(trivial), parts.index(s3))] == 6

    k6 = enumerate_catalog(6, 10, MODE_HALF)
    entry6 = next(e for e in k6 if e.numerators() == (6, 3, 3, 3, 3, 2))
    lattice6 = commensurability_classes([entry6])[0]
    assert len(lattice6.partitions) == 1 and lattice6.edges == ()


def test_index_multiplicative_along_chains():
    fine = SP.singletons(5)
    mid = SP.from_blocks(5, [(1, 2)])
    coarse = SP.from_blocks(5, [(1, 2, 3)])
    assert (
        commensurability_index(fine, mid) * commensurability_index(mid, coarse)
        == commensurability_index(fine, coarse)
        == 6
    )
