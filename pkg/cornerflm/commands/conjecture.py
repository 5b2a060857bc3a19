import logging

import click

from ..models import ModelSpec, Target
from ..schemas import FitFailureReport, ProductFormReport, ProductFormSchema, rational
from ..services.conjecture_service import conjecture_service
from ..services.productize_service import FitFailure
from .common import EXIT_FIT_FAILURE, build_run_config, cache_session, handle_errors, model_spec, render, run_options

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 9


@click.command("conjecture")
@run_options
@click.option("--target", type=click.Choice([t.value for t in Target]), default=Target.CORNER.value,
              show_default=True)
@click.option("--min-repeats", type=int, default=None, help="Observed repeats required per residue.")
@click.pass_context
@handle_errors
def conjecture(ctx, model, geometry, cutoff, js, sides, output_format, cache_dir, threads, no_cache,
               target, min_repeats):
    """Enumerate, assemble and fit a periodic product form."""
    cutoff = cutoff or DEFAULT_CUTOFF
    config = build_run_config(model, geometry, cutoff, js, sides, Target(target), output_format,
                              cache_dir, threads, no_cache)
    spec: ModelSpec = model_spec(model, js, sides)
    with cache_session(config) as cache:
        outcome = conjecture_service.conjecture(spec, config.geometry, config.target, cutoff,
                                                cache=cache, threads=config.threads, min_repeats=min_repeats)
    result = outcome.result
    agrees = outcome.catalog_agrees
    discrepancy = rational(outcome.catalog_first_discrepancy)
    if isinstance(result, FitFailure):
        report = FitFailureReport(
            run=config,
            guaranteed_order=rational(outcome.guaranteed_order),
            reason=result.reason,
            indices_available=result.indices_available,
            indices_needed=result.indices_needed,
            best_period=result.best_period,
            residues_fitted=result.residues_fitted,
            alphas=[rational(a) for a in result.alphas],
            catalog_agrees=agrees,
            catalog_first_discrepancy=discrepancy,
        )
        click.echo(render(report, config.output_format))
        ctx.exit(EXIT_FIT_FAILURE)
    report = ProductFormReport(
        run=config,
        guaranteed_order=rational(outcome.guaranteed_order),
        period=result.period,
        period_q=rational(result.period_q),
        repeats=result.repeats,
        table_period=outcome.hint_period,
        product=ProductFormSchema(**result.to_dict()),
        display=result.pretty(),
        catalog_agrees=agrees,
        catalog_first_discrepancy=discrepancy,
    )
    click.echo(render(report, config.output_format))
