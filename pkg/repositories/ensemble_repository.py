# repositories/ensemble_repository.py
import csv
from pathlib import Path
from typing import Union

from models.path_ensemble import PathEnsemble
from repositories.field_repository import format_number


class EnsembleRepository:
    """Despejo de trajetórias para depuração (path_id, step, x1..xd); formato não estável."""

    def dump_csv(self, ensemble: PathEnsemble, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            with open(path, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(["path_id", "step"] + [f"x{j + 1}" for j in range(ensemble.d)])
                for path_id, trajectory in enumerate(ensemble.paths):
                    for step, state in enumerate(trajectory):
                        writer.writerow([path_id, step] + [format_number(v) for v in state])
        except OSError as e:
            raise OSError(f"Erro ao escrever o ensemble em {path}: {e}") from e
        return path
