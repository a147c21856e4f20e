import pytest

from repositories.run_repository import RunRepository


@pytest.fixture
def repo(tmp_path):
    # Cria um registro novo para cada teste
    return RunRepository(tmp_path / "runs.db")


def test_registrar_e_buscar_execucao(repo):
    run_id = repo.create("solve", "config.json", 42, 0.5, "ok", 0, "manifest.json")
    run = repo.get_by_id(run_id)
    assert run is not None
    assert run["command"] == "solve"
    assert run["seed"] == 42
    assert run["exit_code"] == 0
    assert run["started_at"] is not None


def test_registrar_verificacoes(repo):
    run_id = repo.create("verify-field", "config.json", 1, 0.1, "failed", 5, None)
    repo.add_check(run_id, "terminal_identity", False, "u(T, x) ≠ h(x) em x = [1.0]")
    repo.add_check(run_id, "domain", True)
    checks = repo.get_checks(run_id)
    assert [c["name"] for c in checks] == ["terminal_identity", "domain"]
    assert checks[0]["passed"] == 0
    assert checks[1]["passed"] == 1


def test_verificacao_de_execucao_inexistente(repo):
    with pytest.raises(ValueError):
        repo.add_check(9999, "domain", True)


def test_listar_execucoes(repo):
    repo.create("solve", None, None, 0.0, "ok", 0, None)
    repo.create("demo", None, None, 0.0, "failed", 5, None)
    runs = repo.list_runs()
    assert [r["command"] for r in runs[-2:]] == ["solve", "demo"]


def test_buscar_execucao_inexistente(repo):
    assert repo.get_by_id(9999) is None


def test_manifesto_ida_e_volta(tmp_path):
    path = RunRepository.write_manifest({"seed": 3, "validation": {"domain": {"passed": True}}}, tmp_path / "m.json")
    assert RunRepository.read_manifest(path) == {"seed": 3, "validation": {"domain": {"passed": True}}}


def test_manifesto_em_diretorio_inexistente(tmp_path):
    with pytest.raises(OSError, match="m.json"):
        RunRepository.write_manifest({}, tmp_path / "falta" / "m.json")
