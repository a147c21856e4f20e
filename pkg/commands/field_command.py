# commands/field_command.py
import click

from commands.common import echo_outcome, exit_codes, get_run_service, overrides_from, run_options


@click.command("verify-field")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Configuração JSON")
@click.option("--field", "field_csv", required=True, type=click.Path(dir_okay=False), help="CSV do campo")
@run_options
@click.pass_context
def verify_field(ctx, config_path, field_csv, **flags):
    """Verificações de consistência de um campo gravado."""
    with exit_codes(ctx):
        outcome = get_run_service().verify_field(config_path, field_csv, overrides_from(**flags))
        echo_outcome(outcome)
        ctx.exit(outcome.exit_code)
