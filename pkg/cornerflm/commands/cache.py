import click

from ..cache import EnumerationCache
from ..models import OutputFormat
from ..schemas import CacheInfo
from .common import render


@click.group("cache")
def cache():
    """Inspect or clear the enumeration cache."""


@cache.command("info")
@click.option("--cache-dir", default=None)
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
              default=OutputFormat.PRETTY.value, show_default=True)
def info(cache_dir, output_format):
    click.echo(render(CacheInfo(**EnumerationCache(cache_dir).info()), OutputFormat(output_format)))


@cache.command("clear")
@click.option("--cache-dir", default=None)
@click.confirmation_option(prompt="Remove every cached enumeration?")
def clear(cache_dir):
    removed = EnumerationCache(cache_dir).clear()
    click.echo(f"removed {removed} entries")
