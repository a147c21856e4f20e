import numpy as np
import pytest

from models.coefficient_field import CoefficientField
from models.exceptions import StencilError
from models.generator import Generator
from models.indicator_functions import IndicatorBox
from models.jet import DirectionProbe, Stencil
from models.norm_functions import Zero
from models.problem_spec import ProblemSpec
from models.run_settings import LatticeSettings, MonteCarloSettings
from models.solution_field import SolutionField
from models.terminal_map import TerminalMap
from repositories.viscosity_report_repository import ViscosityReportRepository
from services.solution_field_service import SolutionFieldService
from services.viscosity_checker_service import ViscosityCheckerService

checker = ViscosityCheckerService()

CALOR = CoefficientField(1, diffusion_kind="constant", diffusion_matrix=[[1.0]])
QUADRADO = TerminalMap("polynomial", 1, coefficients=[[0.0, 0.0, 1.0]])
PROBLEMA_CALOR = ProblemSpec(1, 1, 1.0, CALOR, Generator("zero", 1, 1), QUADRADO, Zero(1))
PROBLEMA_FORCADO = ProblemSpec(1, 1, 1.0, CALOR, Generator("constant", 1, 1, constant=[1.0]), QUADRADO, Zero(1))
PROBLEMA_REFLETIDO = ProblemSpec(
    1, 1, 1.0, CALOR, Generator("constant", 1, 1, constant=[-1.0]),
    TerminalMap("positive_part", 1), IndicatorBox([0.0], [np.inf], 1),
)
PARA_CIMA = DirectionProbe([1.0])
PARA_BAIXO = DirectionProbe([-1.0])

TEMPOS = np.round(np.arange(6) * 0.1, 12)
PONTOS = np.arange(-2.0, 2.25, 0.5)


def _campo(func, times=TEMPOS, xs=PONTOS):
    values = np.array([[func(t, x) for x in xs] for t in times])
    return SolutionField(times, np.asarray(xs).reshape(-1, 1), values)


def _calor(t, x):
    return x ** 2 + (1.0 - t)


def test_fit_jet_quadratico_exato():
    field = _campo(_calor)
    jet = checker.fit_jet(field, (0.2, [1.0]), PARA_CIMA, T=1.0)
    assert jet.p == pytest.approx(-1.0, abs=1e-9)
    assert jet.q[0] == pytest.approx(2.0, abs=1e-9)
    assert jet.X[0, 0] == pytest.approx(2.0, abs=1e-9)
    assert jet.fit_residual == pytest.approx(0.0, abs=1e-9)


def test_fit_jet_direcao_negativa_troca_sinal():
    field = _campo(_calor)
    jet = checker.fit_jet(field, (0.2, [1.0]), PARA_BAIXO, T=1.0)
    assert jet.p == pytest.approx(1.0, abs=1e-9)
    assert jet.X[0, 0] == pytest.approx(-2.0, abs=1e-9)


def test_fit_jet_campo_constante_e_afim():
    constante = checker.fit_jet(_campo(lambda t, x: 3.0), (0.2, [0.0]), PARA_CIMA, T=1.0)
    assert constante.p == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(constante.q, 0.0, atol=1e-9)
    np.testing.assert_allclose(constante.X, 0.0, atol=1e-9)

    afim = checker.fit_jet(_campo(lambda t, x: 2.0 * t - x), (0.3, [0.5]), PARA_CIMA, T=1.0)
    assert afim.p == pytest.approx(2.0, abs=1e-9)
    assert afim.q[0] == pytest.approx(-1.0, abs=1e-9)
    np.testing.assert_allclose(afim.X, 0.0, atol=1e-9)


def test_fit_jet_na_borda_desloca_janela():
    jet = checker.fit_jet(_campo(_calor), (0.0, [-2.0]), PARA_CIMA, T=1.0)
    assert jet.q[0] == pytest.approx(-4.0, abs=1e-9)
    assert jet.X[0, 0] == pytest.approx(2.0, abs=1e-9)


def test_fit_jet_rejeita_no_terminal_e_eixo_curto():
    field = _campo(_calor, times=[0.0, 0.5, 1.0])
    with pytest.raises(StencilError):
        checker.fit_jet(field, (1.0, [0.0]), PARA_CIMA, T=1.0)
    curto = _campo(_calor, xs=[0.0, 1.0])
    with pytest.raises(StencilError):
        checker.fit_jet(curto, (0.0, [0.0]), PARA_CIMA, T=1.0)
    with pytest.raises(StencilError):
        checker.fit_jet(field, (0.25, [0.0]), PARA_CIMA, T=1.0)


def test_residuos_nulos_no_calor():
    field = _campo(_calor)
    node = (0.2, [0.5])
    for z in (PARA_CIMA, PARA_BAIXO):
        jet = checker.fit_jet(field, node, z, T=1.0)
        assert float(checker.supersolution_residual(PROBLEMA_CALOR, field, node, z, jet)) == pytest.approx(0.0, abs=1e-8)
        assert float(checker.subsolution_residual(PROBLEMA_CALOR, field, node, z, jet)) == pytest.approx(0.0, abs=1e-8)


def test_gerador_injetado_desloca_residuo():
    field = _campo(_calor)
    node = (0.2, [0.5])
    jet = checker.fit_jet(field, node, PARA_CIMA, T=1.0)
    assert float(checker.supersolution_residual(PROBLEMA_FORCADO, field, node, PARA_CIMA, jet)) == pytest.approx(1.0, abs=1e-8)
    assert float(checker.subsolution_residual(PROBLEMA_FORCADO, field, node, PARA_CIMA, jet)) == pytest.approx(-1.0, abs=1e-8)


def test_sweep_sem_violacoes_no_campo_exato():
    report = checker.sweep(PROBLEMA_CALOR, _campo(_calor))
    assert report.rows
    assert report.passed
    assert not report.abstentions
    assert report.truncation_estimate == pytest.approx(0.0, abs=1e-9)


def test_sweep_marca_no_perturbado():
    field = _campo(_calor)
    values = np.array(field.values)
    i, j = field.time_index(0.2), field.point_index([0.0])
    values[i, j, 0] += 0.1
    report = checker.sweep(PROBLEMA_CALOR, field.replace_values(values), directions=[PARA_CIMA, PARA_BAIXO])
    assert not report.passed
    assert any(abs(t - 0.2) < 1e-12 and x == (0.0,) for t, x in report.flagged_nodes())
    assert report.summary()["violations"] == len(report.violations)


def test_sweep_sem_nos_retorna_relatorio_vazio():
    report = checker.sweep(PROBLEMA_CALOR, _campo(_calor), nodes=[])
    assert report.rows == []
    assert report.passed


def test_sweep_abstem_se_em_estencil_misto():
    field = _campo(lambda t, x: max(x, 0.0))
    report = checker.sweep(PROBLEMA_REFLETIDO, field, nodes=[(0.2, np.array([0.0]))], directions=[PARA_CIMA])
    assert len(report.rows) == 1
    assert report.rows[0].flag == "abstain"
    assert "não lisa" in report.rows[0].reason


def test_sweep_abstem_se_em_no_invalido():
    report = checker.sweep(PROBLEMA_CALOR, _campo(_calor), nodes=[(0.25, np.array([0.0]))], directions=[PARA_CIMA])
    assert [row.flag for row in report.rows] == ["abstain"]


def test_sweep_deterministico_com_workers():
    field = _campo(_calor)
    sequencial = checker.sweep(PROBLEMA_CALOR, field, seed=3)
    paralelo = checker.sweep(PROBLEMA_CALOR, field, seed=3, workers=2)
    assert [row.z for row in sequencial.rows] == [row.z for row in paralelo.rows]


def test_probe_directions_unitarias():
    probes = checker.probe_directions(2, np.random.default_rng(0))
    assert len(probes) == 8
    for probe in probes:
        assert np.linalg.norm(probe.z) == pytest.approx(1.0)


def test_stencil_invalido():
    with pytest.raises(ValueError):
        Stencil(n_space=0)
    with pytest.raises(ValueError):
        Stencil(radius=0.0)


def test_export_csv_do_relatorio(tmp_path):
    report = checker.sweep(PROBLEMA_CALOR, _campo(_calor, times=[0.0, 0.1]), directions=[PARA_CIMA])
    path = ViscosityReportRepository().export_csv(report, tmp_path / "visc.csv", 1, 1)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,x1,z1,res_super,res_sub,fit_residual,flag"
    assert len(lines) == 1 + len(report.rows)


def test_interior_nodes_filtra_regiao_de_contato():
    field = _campo(lambda t, x: max(x, 0.0) + (1.0 - t))
    todos = checker.interior_nodes(PROBLEMA_REFLETIDO, field)
    assert len(todos) == TEMPOS.size * PONTOS.size
    interiores = checker.interior_nodes(PROBLEMA_REFLETIDO, field, min_value=1.0)
    assert interiores
    assert all(float(x[0]) + (1.0 - t) > 1.0 for t, x in interiores)
    assert len(interiores) < len(todos)


def test_sweep_refletido_no_reticulado_dentro_da_tolerancia():
    """No interior estrito (u > 0.1) do caso refletido os dois resíduos ficam dentro de τ."""
    pontos = [[x] for x in np.arange(1.5, 4.25, 0.25)]
    field = SolutionFieldService().evaluate_u(
        PROBLEMA_REFLETIDO, TEMPOS, pontos, MonteCarloSettings(n_paths=10, n_steps=10, seed=0),
        backend="lattice", lattice=LatticeSettings((-8.0, 8.0), 321, 800),
    )
    nodes = checker.interior_nodes(PROBLEMA_REFLETIDO, field, min_value=0.1)
    assert len(nodes) == TEMPOS.size * len(pontos)
    report = checker.sweep(PROBLEMA_REFLETIDO, field, nodes)
    assert report.passed
    assert report.abstentions == []
    ok = [row for row in report.rows if row.flag == "ok"]
    assert len(ok) == len(report.rows) > 0
    for row in ok:
        assert float(row.res_super) >= -row.tau
        assert float(row.res_sub) >= -row.tau
