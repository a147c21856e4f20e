import logging

from database.connection import SQLiteConnection

logger = logging.getLogger(__name__)


def create_tables() -> bool:
    connection, cursor = SQLiteConnection.get_connection()

    run_table = """
    CREATE TABLE IF NOT EXISTS run (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        command TEXT NOT NULL,
        config_path TEXT,
        seed INTEGER,
        started_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
        wall_time REAL,
        status TEXT NOT NULL,
        exit_code INTEGER NOT NULL,
        manifest_path TEXT
    );
    """

    run_check_table = """
    CREATE TABLE IF NOT EXISTS run_check (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_id INTEGER NOT NULL,
        name TEXT NOT NULL,
        passed BOOLEAN NOT NULL,
        detail TEXT,
        FOREIGN KEY(run_id) REFERENCES run(id) ON DELETE CASCADE
    );
    """

    run_check_index = """
    CREATE INDEX IF NOT EXISTS idx_run_check_run_id ON run_check(run_id);
    """

    try:
        cursor.execute(run_table)
        cursor.execute(run_check_table)
        cursor.execute(run_check_index)
        connection.commit()
        logger.debug("Tabelas do registro de execuções prontas em %s.", SQLiteConnection.database_file())
        return True
    except Exception as e:
        logger.error("Erro ao criar as tabelas do registro: %s", e)
        return False
