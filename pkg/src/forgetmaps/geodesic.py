"""Contraction structure over a catalog: totally geodesic inclusion data
and the commensurability relations among admissible symmetry partitions.

Merging a subset of points whose weights sum below 1 produces a smaller
weight system; when the parent satisfies INT so does every such child, and
the child's moduli space sits inside the parent's as a totally geodesic
subspace of codimension |subset| - 1.  ``inclusion_dag`` collects those
edges over a whole catalog.  For systems that are only half-INT admissible
the closure property is not established, so their edges are emitted with a
``heuristic`` marker and restricted to subsets compatible with the forced
block structure.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .enumeration import CatalogEntry, canonicalize
from .weights import (
    SymmetryPartition,
    WeightSystem,
    admissible_partitions,
    commensurability_index,
    contract,
)


@dataclass(frozen=True)
class InclusionEdge:
    """One hyperbolic contraction of a catalog entry."""

    parent: WeightSystem
    subset: tuple[int, ...]
    child: WeightSystem  # canonical form of the contraction
    codimension: int
    heuristic: bool  # parent is only half-INT admissible, not INT
    child_in_catalog: bool


def hyperbolic_contractions(mu: WeightSystem) -> list[tuple[tuple[int, ...], WeightSystem]]:
    """Every subset of at least two indices whose weights sum below 1,
    together with the contracted weight system.

    Subsets are capped at k - 3 indices so the child keeps at least four
    points (a positive-dimensional moduli space); for four points the list
    is therefore always empty.
    """
    out = []
    indices = range(1, mu.k + 1)
    for size in range(2, mu.k - 2):
        for subset in combinations(indices, size):
            if sum(mu[i] for i in subset) < 1:
                out.append((subset, contract(mu, subset)))
    return out


def _respects_blocks(subset: tuple[int, ...], partition: SymmetryPartition) -> bool:
    chosen = set(subset)
    return all(set(b) <= chosen or not (set(b) & chosen) for b in partition.blocks)


def inclusion_dag(catalog: Sequence[CatalogEntry]) -> list[InclusionEdge]:
    """All contraction edges out of the catalog entries.

    Children always have strictly fewer points, so the graph is acyclic.
    Children falling outside the catalog (smaller point count than any
    catalogued entry, or inadmissible) are still emitted, flagged.
    """
    present = {(entry.numerators(), entry.lcd) for entry in catalog}
    edges = []
    for entry in catalog:
        heuristic = not entry.satisfies_int
        for subset, child in hyperbolic_contractions(entry.weights):
            if heuristic and not _respects_blocks(subset, entry.finest):
                continue
            canonical = canonicalize(child)
            edges.append(
                InclusionEdge(
                    parent=entry.weights,
                    subset=subset,
                    child=canonical,
                    codimension=len(subset) - 1,
                    heuristic=heuristic,
                    child_in_catalog=(canonical.numerators(), canonical.lcd) in present,
                )
            )
    return edges


@dataclass(frozen=True)
class PartitionLattice:
    """The admissible symmetry partitions of one weight system with the
    index of each refinement; all of them give commensurable lattices."""

    weights: WeightSystem
    partitions: tuple[SymmetryPartition, ...]
    # (finer index, coarser index, group-index) for every proper refinement
    edges: tuple[tuple[int, int, int], ...]


def commensurability_classes(
    catalog: Sequence[CatalogEntry],
    partitions: Optional[dict[int, Sequence[SymmetryPartition]]] = None,
) -> list[PartitionLattice]:
    """Per entry: the refinement structure of its admissible partitions.

    ``partitions`` optionally supplies precomputed admissible partitions,
    keyed by position in the catalog.
    """
    out = []
    for pos, entry in enumerate(catalog):
        if partitions is not None and pos in partitions:
            parts = tuple(partitions[pos])
        else:
            parts = tuple(admissible_partitions(entry.weights))
        edges = []
        for a, fine in enumerate(parts):
            for b, coarse in enumerate(parts):
                if a != b and fine.refines(coarse):
                    edges.append((a, b, commensurability_index(fine, coarse)))
        out.append(PartitionLattice(entry.weights, parts, tuple(edges)))
    return out
