# commands/common.py
import json
import logging
from contextlib import contextmanager

import click
from pydantic import ValidationError

from models.exceptions import ConfigError, SolverError
from services.run_service import EXIT_CONFIG, EXIT_SOLVER, RunOutcome, RunService

logger = logging.getLogger(__name__)


# Dependências
def get_run_service() -> RunService:
    return RunService()


def run_options(func):
    """Flags que sobrescrevem valores da configuração."""
    options = [
        click.option("--out", "out", type=click.Path(file_okay=False), default=None, help="Diretório de saída"),
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Semente mestre"),
        click.option("--paths", type=click.IntRange(min=1), default=None, help="Trajetórias por nó"),
        click.option("--steps", type=click.IntRange(min=1), default=None, help="Passos em [0, T]"),
        click.option("--backend", type=click.Choice(["regression", "lattice"]), default=None),
        click.option("--workers", type=click.IntRange(min=1), default=None, help="Limite de paralelismo"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def overrides_from(**kwargs):
    return {key: value for key, value in kwargs.items() if value is not None}


@contextmanager
def exit_codes(ctx: click.Context):
    """Traduz exceções dos serviços em códigos de saída, com diagnóstico em stderr."""
    try:
        yield
    except ValidationError as e:
        click.echo(f"Erro de configuração:\n{e}", err=True)
        ctx.exit(EXIT_CONFIG)
    except ConfigError as e:
        click.echo(f"Erro de configuração: {e}", err=True)
        ctx.exit(EXIT_CONFIG)
    except SolverError as e:
        click.echo(f"Falha do solver: {e}", err=True)
        ctx.exit(EXIT_SOLVER)
    except OSError as e:
        click.echo(f"Erro de E/S: {e}", err=True)
        ctx.exit(EXIT_CONFIG)


def echo_outcome(outcome: RunOutcome):
    report = {
        "command": outcome.command,
        "exit_code": outcome.exit_code,
        "checks": outcome.checks,
        "outputs": outcome.outputs,
        "manifest": outcome.manifest_path,
    }
    click.echo(json.dumps(report, indent=2, sort_keys=True, default=str))
    for name in outcome.failed_checks:
        detail = outcome.checks[name].get("detail") or ""
        click.echo(f"FALHA {name}: {detail}".rstrip(), err=True)


def echo_table(outcome: RunOutcome):
    if not outcome.table:
        return
    click.echo(f"{'t':>8} {'x':>20} {'u':>24} {'referência':>24} {'erro':>11} {'tol':>11}  ok")
    for row in outcome.table:
        click.echo(
            f"{row['t']:>8.4g} {str(row['x']):>20} {str([round(v, 6) for v in row['u']]):>24} "
            f"{str([round(v, 6) for v in row['reference']]):>24} {row['error']:>11.3e} "
            f"{row['tolerance']:>11.3e}  {'sim' if row['ok'] else 'NÃO'}"
        )
