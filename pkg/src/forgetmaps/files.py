"""Line-oriented persistence for catalogs and classification results.

One JSON object per line, keys sorted, compact separators, records in the
library's deterministic order: byte-identical files for identical inputs,
and friendly to diffing and streaming.  Weights are serialized as integer
numerators over a single denominator so parsing is exact.

Schemas for both record shapes live in ``docs/schemas``.
"""
from __future__ import annotations

import json
from typing import Iterable, Sequence, TextIO, Union

from .enumeration import CatalogEntry
from .forgetful import ScanRecord
from .weights import SymmetryPartition, WeightSystem


def _blocks(partition: SymmetryPartition) -> list[list[int]]:
    return [list(b) for b in partition.blocks]


def catalog_record(entry: CatalogEntry) -> dict:
    return {
        "k": entry.k,
        "den": entry.lcd,
        "num": list(entry.numerators()),
        "cocompact": entry.cocompact,
        "int": entry.satisfies_int,
        "finest": _blocks(entry.finest),
    }


def _dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_catalog(entries: Sequence[CatalogEntry], stream: TextIO) -> None:
    ordered = sorted(entries, key=lambda e: (e.k, e.lcd, e.numerators()))
    for entry in ordered:
        stream.write(_dumps(catalog_record(entry)) + "\n")


def parse_catalog_record(line: str) -> CatalogEntry:
    data = json.loads(line)
    weights = WeightSystem.from_numerators(data["num"], data["den"])
    finest = SymmetryPartition(tuple(tuple(b) for b in data["finest"]))
    entry = CatalogEntry(
        weights=weights,
        lcd=data["den"],
        cocompact=data["cocompact"],
        satisfies_int=data["int"],
        finest=finest,
    )
    if entry.k != data["k"] or entry.lcd != data["den"]:
        raise ValueError(f"inconsistent catalog record: {line!r}")
    return entry


def read_catalog(stream: Union[TextIO, Iterable[str]]) -> list[CatalogEntry]:
    return [parse_catalog_record(line) for line in stream if line.strip()]


def result_record(record: ScanRecord) -> dict:
    maps = []
    for pair_map in record.maps:
        combos = []
        for combo in pair_map.combos:
            verdict = combo.verdict
            combos.append(
                {
                    "sigma": _blocks(combo.sigma),
                    "tau": _blocks(combo.tau),
                    "symmetry": verdict.symmetry_compatible,
                    "smooth_locus": verdict.smooth_locus_ok,
                    "divisibility": verdict.divisibility_ok,
                    "witnesses": [[stage, list(detail)] for stage, detail in verdict.witnesses],
                }
            )
        maps.append({"alignment": list(pair_map.alignment), "combos": combos})
    partner = None
    if record.dual_partner is not None:
        partner = {"num": list(record.dual_partner[0]), "den": record.dual_partner[1]}
    return {
        "source": {
            "num": list(record.source.numerators()),
            "den": record.source.lcd,
            "finest": _blocks(record.source.finest),
        },
        "target": {
            "num": list(record.target.numerators()),
            "den": record.target.lcd,
            "finest": _blocks(record.target.finest),
        },
        "maps": maps,
        "dual_partner": partner,
    }


def write_results(records: Sequence[ScanRecord], stream: TextIO) -> None:
    for record in records:
        stream.write(_dumps(result_record(record)) + "\n")


def read_result_records(stream: Union[TextIO, Iterable[str]]) -> list[dict]:
    """Result rows as plain dictionaries (the library types carry computed
    verdicts that plain files cannot faithfully rebuild)."""
    return [json.loads(line) for line in stream if line.strip()]
