#!/usr/bin/env python3
"""
Cache warm-up script for cornerflm
Enumerates every lattice an FLM run at the given cutoffs will read, so later runs are cache hits
"""

import os
import sys

import click

# Add the repository root to the path so we can import cornerflm
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from cornerflm.cache import get_cache
from cornerflm.config import settings
from cornerflm.models import BoundarySpec, ModelSpec
from cornerflm.services.enumeration_service import TABLE_DEPTH, enumeration_service
from cornerflm.services.flm_service import flm_service


@click.command()
@click.option("--model", "models", multiple=True, required=True, help="Model id (repeatable).")
@click.option("--cutoff", "cutoffs", multiple=True, type=int, required=True, help="FLM cutoff (repeatable).")
@click.option("--js", "js_values", multiple=True, type=int, help="Also warm the JS tables for r (sq-selfdual).")
@click.option("--cache-dir", default=None)
@click.option("--threads", type=int, default=None)
def build_cache(models, cutoffs, js_values, cache_dir, threads):
    """Pre-populate the enumeration cache."""
    session = get_cache(cache_dir or settings.cache_dir, True)
    cache = next(session)
    try:
        for model_id in models:
            model = ModelSpec.parse(model_id)
            for k in cutoffs:
                for geometry in model.geometries():
                    order = flm_service.guaranteed_order(model.kind, k, geometry)
                    table = enumeration_service.enumerate_table(model, geometry, k, order, cache=cache,
                                                                threads=threads)
                    click.echo(f"{model.id} {geometry.value} k={k}: {len(table)} lattices")
                for r in js_values:
                    order = flm_service.guaranteed_order(model.kind, k)
                    for name in TABLE_DEPTH:
                        if name == "free":
                            continue
                        enumeration_service.enumerate_table(model.with_boundary(BoundarySpec()),
                                                            model.default_geometry(), k, order, table=name,
                                                            r=r, cache=cache, threads=threads)
                    click.echo(f"{model.id} js r={r} k={k}: marked tables done")
        info = cache.info()
        click.echo(f"cache at {info['directory']}: {info['entries']} entries, {info['bytes']} bytes")
    finally:
        session.close()


if __name__ == "__main__":
    build_cache()
