import logging
from fractions import Fraction

import click

from ..config import settings
from ..errors import InvalidConfigError
from ..models import ModelKind, OutputFormat
from ..schemas import IdentityReportSchema, LimitReportSchema, VerifyReport, decimal, rational
from ..services.verification_service import VERIFIABLE_MODELS, verification_service
from .common import handle_errors, render, render_rows

logger = logging.getLogger(__name__)


def parse_family(text: str):
    """'A,c,mu,nu' with rational entries."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise InvalidConfigError(f"bad family '{text}', expected A,c,mu,nu")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidConfigError(f"bad family '{text}': {exc}") from exc


@click.command("verify")
@click.option("--model", default="all", show_default=True,
              help=f"all, or one of {', '.join(m.value for m in VERIFIABLE_MODELS)}.")
@click.option("--order", default="12", show_default=True, help="Exclusive q-order of the comparison.")
@click.option("--family", default=None, help="Also check the log-product identity for A,c,mu,nu.")
@click.option("--limits", is_flag=True, default=False,
              help="Also compare the catalogued closed-form q -> 1 limits with their products.")
@click.option("--limit", "limit_keys", multiple=True, help="Compare only this closed form (repeatable).")
@click.option("--threads", type=int, default=None)
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
              default=OutputFormat.PRETTY.value, show_default=True)
@handle_errors
def verify(model, order, family, limits, limit_keys, threads, output_format):
    """Compare bulk products with the exact analytic free energies, coefficient by coefficient."""
    order = Fraction(order)
    models = VERIFIABLE_MODELS if model == "all" else (ModelKind(model),)
    results = verification_service.check_all(order, models, threads)
    log_ok = None
    if family:
        log_ok = verification_service.check_log_product_identity(*parse_family(family), order)
    limit_results = []
    if limits or limit_keys:
        limit_results = verification_service.check_limits(limit_keys or None)
    schemas = [IdentityReportSchema(model=r.model.value, max_order_checked=rational(r.max_order_checked),
                                    agree=r.agree, first_discrepancy=rational(r.first_discrepancy),
                                    phase_note=r.phase_note)
               for r in results]
    digits = min(settings.precision_digits, 20)
    limit_schemas = [LimitReportSchema(key=r.key, expression=r.expression,
                                       closed_value=decimal(r.closed_value, digits),
                                       product_value=decimal(r.product_value, digits),
                                       agree=r.agree, reproduced=r.reproduced, note=r.note)
                     for r in limit_results]
    output_format = OutputFormat(output_format)
    if output_format == OutputFormat.JSON:
        click.echo(render(VerifyReport(order=rational(order), reports=schemas, log_product_identity=log_ok,
                                       limits=limit_schemas), output_format))
    else:
        click.echo(render_rows([s.model_dump() for s in schemas], output_format))
        if log_ok is not None:
            click.echo(f"log-product identity: {'holds' if log_ok else 'fails'}")
        if limit_schemas:
            click.echo(render_rows([s.model_dump() for s in limit_schemas], output_format))
    # printed closed forms known to be off are reported, not counted as failures
    unexpected = [r.key for r in limit_results if r.agree != r.reproduced]
    if unexpected:
        logger.warning("closed forms disagreeing with expectations: %s", ", ".join(unexpected))
    if not all(r.agree for r in results) or log_ok is False or unexpected:
        raise click.ClickException("identity check failed")
