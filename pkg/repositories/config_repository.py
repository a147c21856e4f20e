# repositories/config_repository.py
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from models.exceptions import ConfigError
from schemas.run_config_schema import RunConfigSchema

DEMOS_DIR = Path(__file__).resolve().parent.parent / "config" / "demos"


class ConfigRepository:
    """Carrega configurações de execução (JSON) e os demos empacotados."""

    def __init__(self, demos_dir: Union[str, Path] = DEMOS_DIR):
        self.demos_dir = Path(demos_dir)

    def read_json(self, path: Union[str, Path]) -> Dict[str, Any]:
        """
        Raises:
            ConfigError: Se o arquivo não existe ou não é JSON válido.
        """
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"Arquivo de configuração não encontrado: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Erro ao decodificar {path}: {e}") from e

    def load_run_config(self, path: Union[str, Path]) -> RunConfigSchema:
        """Lê e valida; erros de validação do pydantic são propagados."""
        return RunConfigSchema.model_validate(self.read_json(path))

    def list_demos(self) -> List[str]:
        return sorted(p.stem for p in self.demos_dir.glob("*.json"))

    def demo_path(self, name: str) -> Path:
        """
        Raises:
            ConfigError: Se o demo não existe, listando os disponíveis.
        """
        path = self.demos_dir / f"{name}.json"
        if not path.is_file():
            raise ConfigError(f"Demo desconhecido: {name}. Disponíveis: {', '.join(self.list_demos())}")
        return path
