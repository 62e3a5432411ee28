from typing import List, Optional
import logging
import sys

import click

from globalmap import __version__
from globalmap.config import settings
from globalmap.commands import (
    simulate,
    build,
    evaluate,
    rasterize,
    render,
    sweep
)
from globalmap.utils.exceptions import GlobalMapError

logger = logging.getLogger("globalmap")


def configure_logging(verbose: bool = False):
    """Log to stderr only; stdout carries command results"""
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, stream=sys.stderr, force=True)


@click.group()
@click.version_option(__version__, prog_name="globalmap")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def cli(verbose: bool):
    """
    Build, evaluate, rasterize and render vectorized global HD maps
    """
    configure_logging(verbose)
    logger.debug(f"Environment: {settings.ENVIRONMENT}")


# Register subcommands
cli.add_command(simulate)
cli.add_command(build)
cli.add_command(evaluate)
cli.add_command(rasterize)
cli.add_command(render)
cli.add_command(sweep)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Entry point returning the process exit code

    0 success, 2 argument errors, 3 invalid input files, 1 anything else.
    """
    try:
        result = cli.main(args=argv, prog_name="globalmap", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except GlobalMapError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        click.echo(f"Error: {e.detail}", err=True)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        click.echo(f"Error: {e}", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run())
