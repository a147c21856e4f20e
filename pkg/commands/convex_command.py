# commands/convex_command.py
import click

from commands.common import echo_outcome, exit_codes, get_run_service, overrides_from, run_options


@click.command("verify-convex")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Configuração JSON")
@run_options
@click.pass_context
def verify_convex(ctx, config_path, **flags):
    """
    Executa a bateria de leis convexas sobre a φ da configuração.

    ctx.obj["phi_override"] substitui a φ configurada (injeção de falhas nos testes).
    """
    phi_override = (ctx.obj or {}).get("phi_override")
    with exit_codes(ctx):
        outcome = get_run_service().verify_convex(config_path, overrides_from(**flags), phi_override)
        echo_outcome(outcome)
        for violation in outcome.checks["convex_laws"]["violations"]:
            click.echo(f"violação: {violation}", err=True)
        ctx.exit(outcome.exit_code)
