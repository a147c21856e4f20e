# commands/solve_command.py
import click

from commands.common import echo_outcome, exit_codes, get_run_service, overrides_from, run_options


@click.command("solve")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Configuração JSON")
@run_options
@click.pass_context
def solve(ctx, config_path, **flags):
    """
    Avalia u(t, x) na malha configurada e grava o CSV do campo.
    """
    with exit_codes(ctx):
        outcome = get_run_service().solve(config_path, overrides_from(**flags))
        echo_outcome(outcome)
        ctx.exit(outcome.exit_code)
