# repositories/run_repository.py
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from database.connection import SQLiteConnection
from database.setup import create_tables


class RunRepository:
    """Manifesto JSON de cada execução e registro SQLite (tabelas run e run_check)."""

    def __init__(self, database_file: Optional[Union[str, Path]] = None):
        if database_file is not None:
            SQLiteConnection.configure(database_file)
        self.conn, self.cursor = SQLiteConnection.get_connection()
        create_tables()

    @staticmethod
    def write_manifest(manifest: Dict[str, Any], path: Union[str, Path]) -> Path:
        """
        Raises:
            OSError: Com o caminho do arquivo no contexto.
        """
        path = Path(path)
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(manifest, f, indent=2, ensure_ascii=False, sort_keys=True, default=str)
                f.write("\n")
        except OSError as e:
            raise OSError(f"Erro ao escrever o manifesto em {path}: {e}") from e
        return path

    @staticmethod
    def read_manifest(path: Union[str, Path]) -> Dict[str, Any]:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def create(self, command: str, config_path: Optional[str], seed: Optional[int], wall_time: float,
               status: str, exit_code: int, manifest_path: Optional[str]) -> int:
        """
        Registra uma execução.

        Returns:
            Identificador da execução.

        Raises:
            ValueError: Se ocorrer erro ao salvar.
        """
        sql = """
            INSERT INTO run(command, config_path, seed, wall_time, status, exit_code, manifest_path)
            VALUES (?, ?, ?, ?, ?, ?, ?)
        """
        try:
            self.cursor.execute(sql, (command, config_path, seed, wall_time, status, exit_code, manifest_path))
            self.conn.commit()
            return int(self.cursor.lastrowid)
        except Exception as e:
            self.conn.rollback()
            raise ValueError(f"Erro ao registrar execução: {str(e)}")

    def add_check(self, run_id: int, name: str, passed: bool, detail: str = "") -> None:
        sql = "INSERT INTO run_check(run_id, name, passed, detail) VALUES (?, ?, ?, ?)"
        try:
            self.cursor.execute(sql, (run_id, name, bool(passed), detail))
            self.conn.commit()
        except Exception as e:
            self.conn.rollback()
            raise ValueError(f"Erro ao registrar verificação {name}: {str(e)}")

    def get_by_id(self, run_id: int) -> Optional[Dict[str, Any]]:
        self.cursor.execute("SELECT * FROM run WHERE id = ?;", (run_id,))
        row = self.cursor.fetchone()
        return dict(row) if row is not None else None

    def get_checks(self, run_id: int) -> List[Dict[str, Any]]:
        self.cursor.execute("SELECT name, passed, detail FROM run_check WHERE run_id = ? ORDER BY id;", (run_id,))
        return [dict(row) for row in self.cursor.fetchall()]

    def list_runs(self) -> List[Dict[str, Any]]:
        self.cursor.execute("SELECT * FROM run ORDER BY id;")
        return [dict(row) for row in self.cursor.fetchall()]
