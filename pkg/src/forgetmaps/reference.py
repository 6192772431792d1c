"""Verification harness: recompute the classification from scratch and
compare against the expected tables embedded in ``fixtures/expected.json``.

The harness is self-contained: it enumerates every catalog it needs (five
or more points up to denominator 42, four points up to 84) and replays the
scans behind each table.  Four-point targets always come in dual pairs
with identical classification data, so tables listing only one member of a
dual pair are compared up to duality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .enumeration import MODE_HALF, CatalogEntry, canonicalize, enumerate_catalog
from .forgetful import (
    DEFAULT_STRICTNESS,
    STAGE_DIVISIBILITY,
    STAGE_FULL,
    ForgetfulCandidate,
    ScanFilters,
    ScanRecord,
    classify_candidate,
    scan,
)
from .weights import SymmetryPartition, WeightSystem, dual

SMALL_MAX_DEN = 42  # systems with five or more points
FOUR_POINT_MAX_DEN = 84  # one-dimensional targets
MAX_DIMENSION = 9

RowKey = tuple[tuple[int, ...], int, tuple[int, ...], int]


def load_expected() -> dict:
    data = resources.files("forgetmaps").joinpath("fixtures/expected.json")
    return json.loads(data.read_text())


@dataclass
class FixtureResult:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)


@dataclass
class VerificationReport:
    strictness: str
    fixtures: list[FixtureResult]

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.fixtures)


def build_catalogs(workers: int = 1) -> dict[int, list[CatalogEntry]]:
    """Every catalog the scans need, keyed by point count."""
    catalogs = {4: enumerate_catalog(4, FOUR_POINT_MAX_DEN, MODE_HALF, workers=workers)}
    for k in range(5, MAX_DIMENSION + 4):
        catalogs[k] = enumerate_catalog(k, SMALL_MAX_DEN, MODE_HALF, workers=workers)
    return catalogs


def _row_key(record: ScanRecord) -> RowKey:
    return (
        record.source.numerators(),
        record.source.lcd,
        record.target.numerators(),
        record.target.lcd,
    )


def _expected_key(row: dict) -> RowKey:
    return (
        tuple(row["source"]["num"]),
        row["source"]["den"],
        tuple(row["target"]["num"]),
        row["target"]["den"],
    )


def _fmt_key(key: RowKey) -> str:
    src_num, src_den, tgt_num, tgt_den = key
    return f"({','.join(map(str, src_num))})/{src_den} -> ({','.join(map(str, tgt_num))})/{tgt_den}"


def _partition(blocks: list[list[int]]) -> SymmetryPartition:
    return SymmetryPartition(tuple(tuple(b) for b in blocks))


def _record_combos(record: ScanRecord) -> set[tuple]:
    return {
        (combo.sigma.blocks, combo.tau.blocks)
        for pair_map in record.maps
        for combo in pair_map.combos
    }


def _check_expected_rows(
    expected_rows: list[dict], records: list[ScanRecord], result: FixtureResult
) -> None:
    """Shared row comparison: every expected row must be computed with its
    alignment (when given) and its partition combination; combos marked
    exact must match the computed combination set exactly."""
    by_key = {_row_key(r): r for r in records}
    for row in expected_rows:
        key = _expected_key(row)
        record = by_key.get(key)
        if record is None:
            result.passed = False
            result.details.append(f"missing: {_fmt_key(key)}")
            continue
        if "alignment" in row:
            alignments = {m.alignment for m in record.maps}
            if tuple(row["alignment"]) not in alignments:
                result.passed = False
                result.details.append(
                    f"{_fmt_key(key)}: alignment {row['alignment']} not among {sorted(alignments)}"
                )
        combos = _record_combos(record)
        wanted = (_partition(row["combo"]["sigma"]).blocks, _partition(row["combo"]["tau"]).blocks)
        if wanted not in combos:
            result.passed = False
            result.details.append(f"{_fmt_key(key)}: partition pair {wanted} not among passing pairs")
        if row.get("combos_exact") and combos != {wanted}:
            result.passed = False
            result.details.append(f"{_fmt_key(key)}: extra partition pairs {sorted(combos - {wanted})}")


def _fixture_cocompact_high_dimension(
    expected: dict, catalogs: dict, strictness: str, workers: int
) -> FixtureResult:
    result = FixtureResult("cocompact_high_dimension", True)
    records: list[ScanRecord] = []
    for m in range(3, MAX_DIMENSION + 1):
        for n in range(1, m + 1):
            filters = ScanFilters(
                source_dim=m,
                target_dim=n,
                cocompact_only=True,
                stage=STAGE_DIVISIBILITY,
                strictness=strictness,
            )
            records.extend(scan(catalogs[m + 3], catalogs[n + 3], filters, workers=workers))
    expected_keys = {_expected_key(row) for row in expected["rows"]}
    computed_keys = {_row_key(r) for r in records}
    for key in sorted(computed_keys - expected_keys):
        result.passed = False
        result.details.append(f"unexpected: {_fmt_key(key)}")
    _check_expected_rows(expected["rows"], records, result)
    return result


def _fixture_full_three_to_one(
    expected: dict, catalogs: dict, strictness: str, workers: int
) -> FixtureResult:
    result = FixtureResult("full_three_to_one", True)
    filters = ScanFilters(
        source_dim=3,
        target_dim=1,
        cocompact_only=True,
        stage=STAGE_FULL,
        strictness=strictness,
    )
    records = scan(catalogs[6], catalogs[4], filters, workers=workers)
    expected_keys = {_expected_key(row) for row in expected["rows"]}
    computed_keys = {_row_key(r) for r in records}
    for key in sorted(computed_keys - expected_keys):
        result.passed = False
        result.details.append(f"unexpected: {_fmt_key(key)}")
    _check_expected_rows(expected["rows"], records, result)
    by_key = {_row_key(r): r for r in records}
    for row in expected["rows"]:
        record = by_key.get(_expected_key(row))
        partner = row.get("dual_partner")
        if record is None or partner is None:
            continue
        want = (tuple(partner["num"]), partner["den"])
        if record.dual_partner != want:
            result.passed = False
            result.details.append(
                f"{_fmt_key(_expected_key(row))}: dual partner {record.dual_partner} != {want}"
            )
    return result


def _fixture_smooth_locus_rejection(expected: dict, strictness: str) -> FixtureResult:
    result = FixtureResult("smooth_locus_rejection", True)
    cand = ForgetfulCandidate(
        source=WeightSystem.from_numerators(expected["source"]["num"], expected["source"]["den"]),
        sigma=_partition(expected["sigma"]),
        target=WeightSystem.from_numerators(expected["target"]["num"], expected["target"]["den"]),
        tau=_partition(expected["tau"]),
        alignment=tuple(expected["alignment"]),
    )
    verdict = classify_candidate(cand, strictness=strictness)
    if not (verdict.symmetry_compatible and verdict.divisibility_ok):
        result.passed = False
        result.details.append("candidate should pass symmetry and divisibility")
    if verdict.smooth_locus_ok or verdict.is_orbifold_map:
        result.passed = False
        result.details.append("candidate should fail the smooth-locus stage")
    witnesses = [w for w in verdict.witnesses if w[0] == "smooth_locus"]
    if not any(len(w[1]) == 2 for w in witnesses):  # a product of two transpositions
        result.passed = False
        result.details.append(f"no double-transposition witness among {witnesses}")
    return result


def _fixture_noncompact(
    expected: dict, catalogs: dict, strictness: str, workers: int
) -> FixtureResult:
    result = FixtureResult("noncompact", True)
    records: list[ScanRecord] = []
    for m in range(2, MAX_DIMENSION + 1):
        for n in range(1, m + 1):
            if not (m > 2 or n > 1):
                continue
            filters = ScanFilters(
                source_dim=m,
                target_dim=n,
                require_noncompact_side=True,
                stage=STAGE_DIVISIBILITY,
                strictness=strictness,
            )
            records.extend(scan(catalogs[m + 3], catalogs[n + 3], filters, workers=workers))
    expected_keys = {_expected_key(row) for row in expected["rows"]}
    # tables list one member of each dual pair of four-point targets
    dual_keys = {}
    for row in expected["rows"]:
        if len(row["target"]["num"]) == 4:
            target = WeightSystem.from_numerators(row["target"]["num"], row["target"]["den"])
            partner = canonicalize(dual(target))
            dual_keys[
                (
                    tuple(row["source"]["num"]),
                    row["source"]["den"],
                    partner.numerators(),
                    partner.lcd,
                )
            ] = _expected_key(row)
    computed_keys = {_row_key(r) for r in records}
    for key in sorted(dual_keys):
        if key not in computed_keys:
            result.passed = False
            result.details.append(f"missing dual partner row: {_fmt_key(key)}")
    for key in sorted(computed_keys - expected_keys - set(dual_keys)):
        result.passed = False
        result.details.append(f"unexpected: {_fmt_key(key)}")
    _check_expected_rows(expected["rows"], records, result)
    return result


def run_verification(
    strictness: str = DEFAULT_STRICTNESS,
    workers: int = 1,
    catalogs: Optional[dict[int, list[CatalogEntry]]] = None,
) -> VerificationReport:
    expected = load_expected()
    if catalogs is None:
        catalogs = build_catalogs(workers=workers)
    fixtures = [
        _fixture_cocompact_high_dimension(
            expected["cocompact_high_dimension"], catalogs, strictness, workers
        ),
        _fixture_full_three_to_one(expected["full_three_to_one"], catalogs, strictness, workers),
        _fixture_smooth_locus_rejection(expected["smooth_locus_rejection"], strictness),
        _fixture_noncompact(expected["noncompact"], catalogs, strictness, workers),
    ]
    return VerificationReport(strictness=strictness, fixtures=fixtures)
