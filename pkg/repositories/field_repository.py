# repositories/field_repository.py
import csv
from pathlib import Path
from typing import List, Union

import numpy as np

from models.exceptions import ConfigError
from models.solution_field import SolutionField

FORMAT_LINE = "# pvi-field v1"


def format_number(value: float) -> str:
    return format(float(value), ".17g")


class FieldRepository:
    """Leitura e escrita do CSV versionado de campos u(t, x)."""

    @staticmethod
    def header(d: int, k: int) -> List[str]:
        return (["t"] + [f"x{j + 1}" for j in range(d)] + [f"u{j + 1}" for j in range(k)]
                + [f"se{j + 1}" for j in range(k)])

    def export_csv(self, field: SolutionField, path: Union[str, Path]) -> Path:
        """
        Escreve uma linha por nó, em ordem tempo-maior e lexicográfica em x,
        com 17 algarismos significativos.

        Raises:
            OSError: Com o caminho do arquivo no contexto.
        """
        path = Path(path)
        try:
            with open(path, "w", newline="", encoding="utf-8") as f:
                f.write(FORMAT_LINE + "\n")
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(self.header(field.d, field.k))
                for i, t in enumerate(field.times):
                    for j, x in enumerate(field.points):
                        row = [t, *x, *field.values[i, j], *field.stderr[i, j]]
                        writer.writerow([format_number(v) for v in row])
        except OSError as e:
            raise OSError(f"Erro ao escrever o campo em {path}: {e}") from e
        return path

    def import_csv(self, path: Union[str, Path]) -> SolutionField:
        """
        Reconstrói o campo a partir do CSV.

        Raises:
            ConfigError: Se o arquivo não existe ou não segue o formato.
        """
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                lines = [line for line in f if line.strip() and not line.startswith("#")]
        except OSError as e:
            raise ConfigError(f"Não foi possível ler o campo {path}: {e}") from e
        rows = list(csv.reader(lines))
        if not rows:
            raise ConfigError(f"Arquivo de campo vazio: {path}")
        header = rows[0]
        d = sum(1 for name in header if name.startswith("x"))
        k = sum(1 for name in header if name.startswith("u"))
        if header != self.header(d, k) or k == 0:
            raise ConfigError(f"Cabeçalho inválido em {path}: {','.join(header)}")
        try:
            data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
        except ValueError as e:
            raise ConfigError(f"Valor não numérico em {path}: {e}") from e
        if data.size == 0 or data.shape[1] != len(header):
            raise ConfigError(f"Linhas incompletas em {path}.")

        times = np.unique(data[:, 0])
        points = np.unique(data[:, 1:1 + d], axis=0)
        values = np.full((times.size, points.shape[0], k), np.nan)
        stderr = np.zeros_like(values)
        for row in data:
            i = int(np.searchsorted(times, row[0]))
            j = int(np.flatnonzero(np.all(points == row[1:1 + d], axis=1))[0])
            values[i, j] = row[1 + d:1 + d + k]
            stderr[i, j] = row[1 + d + k:]
        if np.any(np.isnan(values)):
            raise ConfigError(f"Campo em {path} não cobre todos os pares (t, x).")
        return SolutionField(times, points, values, stderr, {"source": str(path)})
