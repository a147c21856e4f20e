# repositories/viscosity_report_repository.py
import csv
from pathlib import Path
from typing import Union

from models.reports import ViscosityReport
from repositories.field_repository import format_number


class ViscosityReportRepository:
    """Exporta a tabela de resíduos de viscosidade."""

    def export_csv(self, report: ViscosityReport, path: Union[str, Path], d: int, k: int) -> Path:
        """
        Cabeçalho `t,x...,z...,res_super,res_sub,fit_residual,flag`; resíduos
        infinitos são escritos como inf/-inf e ausentes (abstenção) como nan.

        Raises:
            OSError: Com o caminho do arquivo no contexto.
        """
        path = Path(path)
        header = (["t"] + [f"x{j + 1}" for j in range(d)] + [f"z{j + 1}" for j in range(k)]
                  + ["res_super", "res_sub", "fit_residual", "flag"])
        try:
            with open(path, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in report.rows:
                    residuals = ["nan" if r is None else str(r) for r in (row.res_super, row.res_sub)]
                    writer.writerow(
                        [format_number(row.t)] + [format_number(v) for v in row.x]
                        + [format_number(v) for v in row.z] + residuals
                        + [format_number(row.fit_residual), row.flag]
                    )
        except OSError as e:
            raise OSError(f"Erro ao escrever o relatório de viscosidade em {path}: {e}") from e
        return path
