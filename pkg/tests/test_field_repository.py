import numpy as np
import pytest

from models.exceptions import ConfigError
from models.solution_field import SolutionField
from repositories.field_repository import FORMAT_LINE, FieldRepository

repository = FieldRepository()


def _linhas_de_dados(path):
    return [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]


def test_export_um_no(tmp_path):
    field = SolutionField([0.0], [[0.0]], [[[1.5]]])
    path = repository.export_csv(field, tmp_path / "campo.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == FORMAT_LINE
    assert lines[1:] == ["t,x1,u1,se1", "0,0,1.5,0"]


def test_export_malha_3x3_em_ordem(tmp_path):
    xs = np.array([1.0, -1.0, 0.0])
    values = np.array([[t + x for x in xs] for t in (1.0, 0.0, 0.5)])
    field = SolutionField([1.0, 0.0, 0.5], xs.reshape(-1, 1), values)
    lines = _linhas_de_dados(repository.export_csv(field, tmp_path / "campo.csv"))
    assert len(lines) == 10
    assert [line.split(",")[:2] for line in lines[1:4]] == [["0", "-1"], ["0", "0"], ["0", "1"]]
    assert lines[-1].split(",")[:3] == ["1", "1", "2"]


def test_export_import_preserva_bits(tmp_path):
    rng = np.random.default_rng(5)
    points = np.array([[a, b] for a in (-0.3, 0.1) for b in (2.0, 1.0 / 3.0)])
    field = SolutionField([0.0, 0.1, 1.0], points, rng.normal(size=(3, 4, 2)), rng.random(size=(3, 4, 2)))
    path = repository.export_csv(field, tmp_path / "campo.csv")
    lido = repository.import_csv(path)
    np.testing.assert_array_equal(lido.times, field.times)
    np.testing.assert_array_equal(lido.points, field.points)
    np.testing.assert_array_equal(lido.values, field.values)
    np.testing.assert_array_equal(lido.stderr, field.stderr)
    assert lido.d == 2 and lido.k == 2


def test_header():
    assert FieldRepository.header(2, 1) == ["t", "x1", "x2", "u1", "se1"]


def test_import_arquivo_inexistente(tmp_path):
    with pytest.raises(ConfigError):
        repository.import_csv(tmp_path / "nao_existe.csv")


@pytest.mark.parametrize("conteudo", [
    "",
    "t,y1,u1,se1\n0,0,1,0\n",
    "t,x1,u1,se1\n0,0,abc,0\n",
    "t,x1,u1,se1\n0,0,1\n",
    "t,x1,u1,se1\n0,0,1,0\n1,1,1,0\n",
])
def test_import_formato_invalido(tmp_path, conteudo):
    path = tmp_path / "campo.csv"
    path.write_text(conteudo, encoding="utf-8")
    with pytest.raises(ConfigError):
        repository.import_csv(path)


def test_export_diretorio_inexistente(tmp_path):
    with pytest.raises(OSError, match="campo.csv"):
        repository.export_csv(SolutionField([0.0], [[0.0]], [[[1.0]]]), tmp_path / "falta" / "campo.csv")
