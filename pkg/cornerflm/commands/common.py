import functools
import json
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import click
import pandas as pd
from pydantic import BaseModel

from ..cache import EnumerationCache, get_cache
from ..config import settings
from ..errors import CornerFLMError, InvalidConfigError
from ..models import BoundarySpec, ModelSpec, OutputFormat, Side, Target
from ..schemas import RunConfig
from ..services.conjecture_service import conjecture_service

# exit status for a run that finished but found no periodic product
EXIT_FIT_FAILURE = 2


class CommandError(click.ClickException):
    """A CornerFLMError surfaced to the command line; exits with status 1."""

    exit_code = 1

    @classmethod
    def wrap(cls, exc: CornerFLMError) -> "CommandError":
        return cls(f"{type(exc).__name__}: {exc}")


def parse_js(text: Optional[str]) -> Tuple[bool, Optional[int]]:
    """'r=R' -> (True, R); 'r=inf' -> (True, None); no flag -> (False, None)."""
    if text is None:
        return False, None
    value = text.strip()
    if value.startswith("r="):
        value = value[2:]
    if value in ("inf", "infinity"):
        return True, None
    try:
        r = int(value)
    except ValueError as exc:
        raise InvalidConfigError(f"bad JS parameter '{text}', expected r=R or r=inf") from exc
    if r < 0:
        raise InvalidConfigError(f"JS parameter must be non-negative, got r={r}")
    return True, r


def model_spec(model: str, js: Optional[str], sides: Tuple[str, ...] = ()) -> ModelSpec:
    spec = ModelSpec.parse(model)
    marked, r = parse_js(js)
    if not marked:
        return spec
    if r is None:
        raise InvalidConfigError("r=inf has no finite-lattice enumeration; use the asympt command")
    return spec.with_boundary(BoundarySpec(r, frozenset(Side(s) for s in (sides or (Side.LEFT.value,)))))


def run_options(func):
    """Flags shared by every command that enumerates."""
    options = [
        click.option("--model", "model", required=True, help="Model id, e.g. sq-selfdual or ising-tri."),
        click.option("--geometry", default=None, help="rectangle, triangle or a full geometry id."),
        click.option("--cutoff", type=int, default=None, help="FLM cutoff k (lattices with m+n <= k)."),
        click.option("--js", default=None, help="JS boundary parameter, r=R."),
        click.option("--sides", multiple=True, type=click.Choice([s.value for s in Side]),
                     help="Marked sides for --js (repeatable)."),
        click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
                     default=OutputFormat.PRETTY.value, show_default=True),
        click.option("--cache-dir", default=None, help="Enumeration cache directory."),
        click.option("--threads", type=int, default=None, help="Parallel enumeration workers."),
        click.option("--no-cache", is_flag=True, default=False, help="Bypass the enumeration cache."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_run_config(model: str, geometry: Optional[str], cutoff: Optional[int], js: Optional[str],
                     sides: Tuple[str, ...], target: Target, output_format: str, cache_dir: Optional[str],
                     threads: Optional[int], no_cache: bool, order=None) -> RunConfig:
    spec = model_spec(model, js, sides)
    return RunConfig(
        model=spec.kind.value,
        geometry=conjecture_service.resolve_geometry(spec, geometry),
        cutoff=cutoff,
        boundary=spec.boundary.id,
        target=target,
        order=None if order is None else str(Fraction(order)),
        output_format=OutputFormat(output_format),
        cache_dir=cache_dir or settings.cache_dir,
        use_cache=settings.use_cache and not no_cache,
        threads=threads or settings.threads,
    )


@contextmanager
def cache_session(config: RunConfig) -> Iterator[EnumerationCache]:
    session = get_cache(config.cache_dir, config.use_cache)
    cache = next(session)
    try:
        yield cache
    finally:
        session.close()


def handle_errors(func):
    """Turn library errors into exit status 1 with a one-line message."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CornerFLMError as exc:
            raise CommandError.wrap(exc) from exc

    return wrapper


def _flatten(data, prefix: str = "") -> List[Tuple[str, str]]:
    rows: List[Tuple[str, str]] = []
    if isinstance(data, dict):
        for key, value in data.items():
            rows.extend(_flatten(value, f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(data, list):
        if all(not isinstance(v, (dict, list)) for v in data):
            rows.append((prefix, ",".join("" if v is None else str(v) for v in data)))
        else:
            for i, value in enumerate(data):
                rows.extend(_flatten(value, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, "" if data is None else str(data)))
    return rows


def render(report: BaseModel, output_format: OutputFormat) -> str:
    """JSON dump, or a field/value table for tsv and pretty output."""
    output_format = OutputFormat(output_format)
    data = report.model_dump(mode="json")
    if output_format == OutputFormat.JSON:
        return json.dumps(data, indent=2, sort_keys=False)
    rows = _flatten(data)
    frame = pd.DataFrame(rows, columns=["field", "value"])
    if output_format == OutputFormat.TSV:
        return frame.to_csv(sep="\t", index=False).rstrip("\n")
    return frame.to_string(index=False, justify="left")


def render_rows(rows: List[Dict[str, object]], output_format: OutputFormat) -> str:
    """One row per record, for list-shaped reports."""
    frame = pd.DataFrame(rows)
    output_format = OutputFormat(output_format)
    if output_format == OutputFormat.JSON:
        return frame.to_json(orient="records", indent=2)
    if output_format == OutputFormat.TSV:
        return frame.to_csv(sep="\t", index=False).rstrip("\n")
    return frame.to_string(index=False)
