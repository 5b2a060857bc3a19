import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

import click

from ..config import settings
from ..errors import InvalidConfigError
from ..models import CornerAngle, ModelSpec, OutputFormat, Target
from ..schemas import AsymptoticProfileReport, decimal, rational
from ..services.asymptotics_service import asymptotics_service, parse_corners
from ..services.catalog_service import catalog_service
from ..services.conjecture_service import DELTA_TARGETS, conjecture_service
from ..services.productize_service import FitFailure, ProductForm, productize_service
from .common import (EXIT_FIT_FAILURE, build_run_config, cache_session, handle_errors, model_spec, parse_js,
                     render)

logger = logging.getLogger(__name__)


def load_product(path: str) -> ProductForm:
    """A ProductForm from a saved conjecture report or a bare product dict."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "product" in data:
        data = data["product"]
    try:
        return ProductForm.from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidConfigError(f"{path} does not hold a product form: {exc}") from exc


def quoted_product(model: str, target: Target, geometry: Optional[str], angle: Optional[str],
                   js: Optional[str]) -> Tuple[ProductForm, str]:
    marked, r = parse_js(js)
    if marked:
        if target not in DELTA_TARGETS:
            raise InvalidConfigError(f"--js needs one of the {', '.join(t.value for t in DELTA_TARGETS)} targets")
        return catalog_service.js_form(target, r), "q"
    spec = ModelSpec.parse(model)
    resolved = conjecture_service.resolve_geometry(spec, geometry) if geometry else None
    entry = catalog_service.entry(spec.kind, target, resolved, CornerAngle(angle) if angle else None)
    return entry.form, entry.variable


@click.command("asympt")
@click.option("--product", "product_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Saved product form (JSON) instead of a model.")
@click.option("--model", default=None, help="Model id; uses the quoted product unless --cutoff is given.")
@click.option("--target", type=click.Choice([t.value for t in Target]), default=Target.CORNER.value,
              show_default=True)
@click.option("--geometry", default=None)
@click.option("--angle", type=click.Choice([a.value for a in CornerAngle]), default=None,
              help="Single-corner product of one angle.")
@click.option("--js", default=None, help="JS boundary parameter, r=R or r=inf.")
@click.option("--cutoff", type=int, default=None, help="Conjecture afresh at this FLM cutoff.")
@click.option("--central-charge", default=None, help="Bulk central charge c, e.g. 1 or -2.")
@click.option("--corners", default=None, help="Corner set, e.g. 4xpi/2 or 3xpi/3.")
@click.option("--by-angle", is_flag=True, default=False,
              help="Report the correlation length from each single-angle corner product.")
@click.option("--raw-variable", is_flag=True, default=False,
              help="Keep products quoted in x instead of mapping x = -q^2.")
@click.option("--no-numeric", is_flag=True, default=False, help="Skip the numeric q-ladder.")
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
              default=OutputFormat.PRETTY.value, show_default=True)
@click.option("--cache-dir", default=None)
@click.option("--threads", type=int, default=None)
@click.option("--no-cache", is_flag=True, default=False)
@click.pass_context
@handle_errors
def asympt(ctx, product_path, model, target, geometry, angle, js, cutoff, central_charge, corners, by_angle,
           raw_variable, no_numeric, output_format, cache_dir, threads, no_cache):
    """Classify the q -> 1 limit of a product form and extract its constants."""
    target = Target(target)
    variable = "q"
    if product_path:
        form = load_product(product_path)
    elif model is None:
        raise InvalidConfigError("give either --product or --model")
    elif cutoff:
        config = build_run_config(model, geometry, cutoff, js, (), target, output_format,
                                  cache_dir, threads, no_cache)
        spec = model_spec(model, js)
        with cache_session(config) as cache:
            outcome = conjecture_service.conjecture(spec, config.geometry, target, cutoff,
                                                    cache=cache, threads=config.threads)
        if isinstance(outcome.result, FitFailure):
            click.echo(f"no periodic product at cutoff {cutoff}: {outcome.result.reason}; "
                       f"{outcome.result.indices_needed} more exponents needed", err=True)
            ctx.exit(EXIT_FIT_FAILURE)
        form = outcome.result
    else:
        form, variable = quoted_product(model, target, geometry, angle, js)
    if variable == "x" and not raw_variable:
        form = productize_service.x_to_q_form(form)

    c = Fraction(central_charge) if central_charge is not None else None
    corner_list = parse_corners(corners) if corners else []
    profile = asymptotics_service.profile(form, c, corner_list, numeric=not no_numeric)

    xi_prefactor = None
    if profile.xi_coefficient is not None and profile.prefactor_A is not None:
        xi_prefactor = asymptotics_service.correlation_prefactor(profile.prefactor_A, corner_list, c)

    by_angle_values = {}
    if by_angle:
        if model is None or c is None:
            raise InvalidConfigError("--by-angle needs --model and --central-charge")
        kind = ModelSpec.parse(model).kind
        forms = {}
        for a in (CornerAngle.ACUTE, CornerAngle.OBTUSE):
            entry = catalog_service.entry(kind, Target.CORNER, angle=a)
            keep = entry.variable == "q" or raw_variable
            forms[a] = entry.form if keep else productize_service.x_to_q_form(entry.form)
        by_angle_values = {a.value: rational(v)
                           for a, v in asymptotics_service.xi_by_angle(forms, c).items()}

    digits = min(settings.precision_digits, 30)
    numeric = profile.numeric_A
    report = AsymptoticProfileReport(
        classification=profile.classification,
        C_over_pi2=rational(profile.expansion.pi2_coeff),
        zeta3_coeff=rational(profile.expansion.zeta3_coeff),
        a_log=rational(profile.expansion.a_log),
        finite_value=decimal(profile.finite_value, digits),
        prefactor_A=decimal(profile.prefactor_A, digits),
        numeric_A=decimal(numeric.value, 12) if numeric else None,
        numeric_A_error=decimal(numeric.error, 3) if numeric else None,
        central_charge=rational(c),
        corners=[a.value for a in corner_list],
        xi_coefficient_over_pi2=rational(profile.xi_coefficient),
        xi_prefactor=decimal(xi_prefactor, digits),
        xi_by_angle=by_angle_values,
    )
    click.echo(render(report, OutputFormat(output_format)))
