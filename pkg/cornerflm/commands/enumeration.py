import logging

import click

from ..errors import InvalidConfigError
from ..models import Side, Target
from ..services.conjecture_service import conjecture_service
from ..services.enumeration_service import enumeration_service
from ..services.flm_service import flm_service
from ..services.parameterization_service import parameterization_service
from .common import build_run_config, cache_session, handle_errors, model_spec

logger = logging.getLogger(__name__)


def parse_size(text: str):
    """'MxN', or 'M' for triangles and squares."""
    try:
        parts = [int(p) for p in text.lower().split("x")]
    except ValueError as exc:
        raise InvalidConfigError(f"bad lattice size '{text}', expected MxN") from exc
    if len(parts) == 1:
        return parts[0], 0
    if len(parts) != 2:
        raise InvalidConfigError(f"bad lattice size '{text}', expected MxN")
    return parts[0], parts[1]


@click.command("enumerate")
@click.option("--model", required=True)
@click.option("--geometry", default=None)
@click.option("--size", required=True, help="Lattice size MxN (triangle: M).")
@click.option("--js", default=None, help="JS boundary parameter, r=R.")
@click.option("--sides", multiple=True, type=click.Choice([s.value for s in Side]))
@click.option("--order", default=None, help="Exclusive q-order; needed for Ising and generic JS.")
@click.option("--check-cutoff", type=int, default=None,
              help="Also compare with the bulk/surface/corner decomposition assembled at this cutoff.")
@click.option("--cache-dir", default=None)
@click.option("--no-cache", is_flag=True, default=False)
@handle_errors
def enumerate_lattice(model, geometry, size, js, sides, order, check_cutoff, cache_dir, no_cache):
    """Print the normalized partition function of one lattice in canonical text."""
    config = build_run_config(model, geometry, None, js, sides, Target.BULK, "pretty", cache_dir, 1, no_cache,
                              order)
    spec = model_spec(model, js, sides)
    if check_cutoff is not None and not spec.boundary.is_free:
        raise InvalidConfigError("--check-cutoff compares free lattices only")
    m, n = parse_size(size)
    lattice = spec.lattice(m, n, config.geometry)
    with cache_session(config) as cache:
        triple = None
        if check_cutoff is not None:
            triple = conjecture_service.free_energies(spec, config.geometry, check_cutoff, cache, threads=1)
            order = order if order is not None else triple.guaranteed_order
        y_order = enumeration_service.y_order(spec, order) if order is not None else None
        nz = enumeration_service.partition(spec, lattice, y_order, cache)
    click.echo(nz.to_text().rstrip("\n"))
    if triple is not None:
        bound = triple.guaranteed_order
        direct = parameterization_service.to_log_partition(nz, bound)
        first = flm_service.check_decomposition(direct, flm_service.reconstruct(triple, lattice.m, lattice.n), bound)
        if first is None:
            click.echo(f"agrees with the cutoff-{check_cutoff} decomposition through q^{bound}")
        else:
            click.echo(f"departs from the cutoff-{check_cutoff} decomposition at q^{first}")
