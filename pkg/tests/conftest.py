import pytest

from forgetmaps.enumeration import MODE_INT, enumerate_catalog
from forgetmaps.reference import build_catalogs


@pytest.fixture(scope="session")
def catalogs():
    """Half-INT catalogs at the production bounds: k=4 up to lcd 84,
    k=5..12 up to lcd 42."""
    return build_catalogs()


@pytest.fixture(scope="session")
def int_catalogs():
    """INT-only catalogs at the same bounds."""
    out = {4: enumerate_catalog(4, 84, MODE_INT)}
    for k in range(5, 13):
        out[k] = enumerate_catalog(k, 42, MODE_INT)
    return out
