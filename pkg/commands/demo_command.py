# commands/demo_command.py
import click

from commands.common import echo_outcome, echo_table, exit_codes, get_run_service, overrides_from, run_options


@click.command("demo")
@click.argument("name")
@run_options
@click.pass_context
def demo(ctx, name, **flags):
    """
    Executa um problema empacotado de ponta a ponta (solve + verify-field)
    e imprime a tabela de aceitação.
    """
    with exit_codes(ctx):
        outcome = get_run_service().demo(name, overrides_from(**flags))
        echo_outcome(outcome)
        echo_table(outcome)
        agreement = outcome.checks.get("backend_agreement")
        if agreement is not None:
            click.echo(f"concordância reticulado × regressão: {agreement['metrics']}")
        ctx.exit(outcome.exit_code)
