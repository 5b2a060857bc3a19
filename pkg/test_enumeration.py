"""
Test script for the FLM table enumeration: worker pools and the on-disk cache
"""

import pytest

from cornerflm import cache as cache_module
from cornerflm.cache import EnumerationCache
from cornerflm.models import Geometry, LatticeSpec, ModelKind, ModelSpec
from cornerflm.services.enumeration_service import enumeration_service

SQ = Geometry.SQUARE_RECTANGLE


def _same_tables(a, b):
    assert a.keys() == b.keys()
    for key in a:
        assert a[key].q_power == b[key].q_power
        assert a[key].constant == b[key].constant
        assert a[key].first_difference(b[key]) is None, key


@pytest.mark.parametrize("kind, geometry, order", [
    (ModelKind.SQ_SELFDUAL, SQ, 5),
    (ModelKind.ISING_SQ, SQ, 2),
    (ModelKind.TRI_CHROMATIC, Geometry.TRIANGULAR_TRIANGLE, 3),
], ids=lambda v: getattr(v, "value", v))
def test_worker_pool_matches_single_thread(kind, geometry, order):
    model = ModelSpec(kind)
    serial = enumeration_service.enumerate_table(model, geometry, 6, order, threads=1)
    pooled = enumeration_service.enumerate_table(model, geometry, 6, order, threads=2)
    _same_tables(serial, pooled)


@pytest.mark.parametrize("kind, lattice, y_order", [
    (ModelKind.SQ_SELFDUAL, LatticeSpec(SQ, 2, 3), None),
    (ModelKind.ISING_SQ, LatticeSpec(SQ, 3, 3), 6),
    (ModelKind.FPL2, LatticeSpec(Geometry.FPL2_RECTANGLE, 1, 2), None),
], ids=lambda v: getattr(v, "id", getattr(v, "value", v)))
def test_cached_entry_is_identical_to_recomputed(cache_dir, kind, lattice, y_order):
    model = ModelSpec(kind)
    cache_module._memory.clear()
    fresh = enumeration_service.partition(model, lattice, y_order)
    writer = EnumerationCache(str(cache_dir), True)
    stored = enumeration_service.partition(model, lattice, y_order, writer)
    assert writer.misses == 1
    # force the next read to come from disk
    cache_module._memory.clear()
    reader = EnumerationCache(str(cache_dir), True)
    loaded = enumeration_service.partition(model, lattice, y_order, reader)
    assert reader.hits == 1
    assert loaded.to_text() == stored.to_text() == fresh.to_text()
    assert loaded.poly == fresh.poly
    assert loaded.lead_exponent == fresh.lead_exponent


def test_disabled_cache_stores_nothing(cache_dir):
    model = ModelSpec(ModelKind.SQ_SELFDUAL)
    off = EnumerationCache(str(cache_dir), False)
    enumeration_service.partition(model, LatticeSpec(SQ, 2, 2), cache=off)
    assert off.info()["entries"] == 0
    assert off.hits == off.misses == 0
