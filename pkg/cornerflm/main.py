import logging

import click

from . import __version__
from .commands import asympt, cache, conjecture, enumeration, verify
from .commands.common import CommandError
from .config import settings

logger = logging.getLogger(__name__)


def configure_logging(verbose: int) -> None:
    level = {0: settings.log_level.upper(), 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


class CornerFLMGroup(click.Group):
    """Unexpected exceptions become one-line errors unless --verbose was given."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except Exception as exc:
            if ctx.obj and ctx.obj.get("verbose"):
                raise
            raise CommandError(f"unexpected {type(exc).__name__}: {exc} (rerun with -v for a traceback)") from exc


@click.group(cls=CornerFLMGroup)
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logging.")
@click.version_option(__version__, prog_name="cornerflm")
@click.pass_context
def cli(ctx, verbose):
    """Corner free energies of 2D lattice models by the finite lattice method."""
    configure_logging(verbose)
    ctx.obj = {"verbose": verbose}


cli.add_command(conjecture.conjecture)
cli.add_command(asympt.asympt)
cli.add_command(verify.verify)
cli.add_command(enumeration.enumerate_lattice)
cli.add_command(cache.cache)


def main():
    cli(prog_name="cornerflm")


if __name__ == "__main__":
    main()
