import logging
import os

import click

from commands.convex_command import verify_convex
from commands.demo_command import demo
from commands.field_command import verify_field
from commands.solve_command import solve

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def configure_logging():
    level = os.environ.get("PVI_LOG", "WARNING").upper()
    if level not in LOG_LEVELS:
        level = "WARNING"
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@click.group()
@click.version_option("1.0.0", prog_name="pvi-lab")
@click.pass_context
def cli(ctx):
    """Laboratório numérico de inequações variacionais parabólicas."""
    ctx.ensure_object(dict)
    configure_logging()


cli.add_command(solve)
cli.add_command(verify_convex)
cli.add_command(verify_field)
cli.add_command(demo)


if __name__ == "__main__":
    cli()
