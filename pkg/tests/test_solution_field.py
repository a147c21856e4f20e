import numpy as np
import pytest

from models.coefficient_field import CoefficientField
from models.exceptions import ConfigError
from models.generator import Generator
from models.indicator_functions import IndicatorBox
from models.norm_functions import Zero
from models.problem_spec import ProblemSpec
from models.run_settings import LatticeSettings, MonteCarloSettings
from models.solution_field import SolutionField
from models.terminal_map import TerminalMap
from services.solution_field_service import SolutionFieldService, node_seed, sort_grid

service = SolutionFieldService()

CALOR = CoefficientField(1, diffusion_kind="constant", diffusion_matrix=[[1.0]])
QUADRADO = TerminalMap("polynomial", 1, coefficients=[[0.0, 0.0, 1.0]])
PROBLEMA_CALOR = ProblemSpec(1, 1, 1.0, CALOR, Generator("zero", 1, 1), QUADRADO, Zero(1))
PROBLEMA_REFLETIDO = ProblemSpec(
    1, 1, 1.0, CALOR, Generator("constant", 1, 1, constant=[-1.0]),
    TerminalMap("positive_part", 1), IndicatorBox([0.0], [np.inf], 1),
)
MC = MonteCarloSettings(n_paths=2000, n_steps=20, seed=11)


def _campo_fechado(times, xs, func=lambda t, x: x ** 2 + (1.0 - t), stderr=0.0):
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    values = np.array([[func(t, x) for x in xs] for t in times])
    return SolutionField(times, xs.reshape(-1, 1), values, np.full_like(values, stderr))


def test_sort_grid_ordena_instantes_e_pontos():
    times, points = sort_grid([1.0, 0.0, 0.5], [[1.0, 0.0], [-1.0, 2.0], [-1.0, 1.0]])
    np.testing.assert_array_equal(times, [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(points, [[-1.0, 1.0], [-1.0, 2.0], [1.0, 0.0]])


def test_node_seed_deterministica_e_distinta():
    assert node_seed(7, 3) == node_seed(7, 3)
    assert node_seed(7, 3) != node_seed(7, 4)
    assert node_seed(7, 3) != node_seed(8, 3)


def test_evaluate_u_calor_feynman_kac():
    field = service.evaluate_u(PROBLEMA_CALOR, [0.0, 0.5, 1.0], [[-1.0], [0.0], [1.0]], MC)
    assert field.values.shape == (3, 3, 1)
    for i, t in enumerate(field.times):
        for j, x in enumerate(field.points[:, 0]):
            assert field.values[i, j, 0] == pytest.approx(x ** 2 + 1.0 - t, abs=0.02)


def test_evaluate_u_linha_terminal_exata():
    field = service.evaluate_u(PROBLEMA_CALOR, [1.0, 0.5], [[1.0], [-1.0], [0.0]], MC)
    np.testing.assert_array_equal(field.times, [0.5, 1.0])
    np.testing.assert_array_equal(field.values[-1, :, 0], [1.0, 0.0, 1.0])
    np.testing.assert_array_equal(field.stderr[-1], 0.0)
    assert service.terminal_identity_check(PROBLEMA_CALOR, field).passed


def test_evaluate_u_deterministico_com_workers():
    times, points = [0.0, 0.5], [[-1.0], [1.0]]
    sequencial = service.evaluate_u(PROBLEMA_CALOR, times, points, MC)
    repetido = service.evaluate_u(PROBLEMA_CALOR, times, points, MC)
    paralelo = service.evaluate_u(PROBLEMA_CALOR, times, points, MC, workers=2)
    np.testing.assert_array_equal(sequencial.values, repetido.values)
    np.testing.assert_array_equal(sequencial.values, paralelo.values)


def test_evaluate_u_malha_invalida():
    with pytest.raises(ConfigError):
        service.evaluate_u(PROBLEMA_CALOR, [0.0, 1.5], [[0.0]], MC)
    with pytest.raises(ConfigError):
        service.evaluate_u(PROBLEMA_CALOR, [0.0], [[0.0, 1.0]], MC)
    with pytest.raises(ConfigError):
        service.evaluate_u(PROBLEMA_CALOR, [0.0], [[0.0]], MC, backend="arvore")


def test_evaluate_u_reticulado_calor():
    lattice = LatticeSettings((-6.0, 6.0), 121, 200)
    field = service.evaluate_u(PROBLEMA_CALOR, [0.0, 0.5, 1.0], [[-1.0], [0.0], [1.0]], MC,
                               backend="lattice", lattice=lattice)
    assert field.provenance["backend"] == "lattice"
    for i, t in enumerate(field.times):
        for j, x in enumerate(field.points[:, 0]):
            assert field.values[i, j, 0] == pytest.approx(x ** 2 + 1.0 - t, abs=0.01)
    np.testing.assert_array_equal(field.stderr[-1], 0.0)


def test_evaluate_u_reticulado_exige_secao_e_intervalo():
    with pytest.raises(ConfigError):
        service.evaluate_u(PROBLEMA_CALOR, [0.0], [[0.0]], MC, backend="lattice")
    with pytest.raises(ConfigError):
        service.evaluate_u(PROBLEMA_CALOR, [0.0], [[10.0]], MC, backend="lattice",
                           lattice=LatticeSettings((-6.0, 6.0), 121, 200))


def test_terminal_identity_detecta_divergencia():
    xs = np.array([-1.0, 0.0, 1.0, 2.0])
    values = np.vstack([xs ** 2 + 1.0, QUADRADO.evaluate(xs.reshape(-1, 1))[:, 0]])
    field = SolutionField([0.0, 1.0], xs.reshape(-1, 1), values)
    assert service.terminal_identity_check(PROBLEMA_CALOR, field).passed

    values[1, 2] += 1e-9
    result = service.terminal_identity_check(PROBLEMA_CALOR, field.replace_values(values))
    assert not result.passed
    assert result.metrics["mismatched"] == 1
    assert "[1.0]" in result.detail


def test_terminal_identity_sem_linha_terminal():
    result = service.terminal_identity_check(PROBLEMA_CALOR, _campo_fechado([0.0, 0.5], [0.0, 1.0]))
    assert result.passed
    assert result.metrics["checked"] == 0


def test_domain_check():
    field = _campo_fechado([0.0, 0.5, 1.0], [-1.0, 0.0, 1.0], lambda t, x: max(x, 0.0) + (1.0 - t))
    result = service.domain_check(PROBLEMA_REFLETIDO, field)
    assert result.passed
    assert result.metrics == {"fraction": 1.0, "nodes": 6}

    values = np.array(field.values)
    values[0, 0, 0] = -0.5
    result = service.domain_check(PROBLEMA_REFLETIDO, field.replace_values(values))
    assert not result.passed
    assert result.metrics["fraction"] == pytest.approx(5 / 6)


def test_continuity_proxy():
    result = service.continuity_proxy(_campo_fechado([0.0, 1.0], [-1.0, 0.0, 1.0, 2.0]))
    assert result.passed
    assert result.metrics["max_jump"] == pytest.approx(3.0)
    assert result.metrics["max_jump_over_spacing"] == pytest.approx(3.0)


def test_growth_check_quadratico_estavel():
    field = _campo_fechado([0.0, 1.0], [0.5, 1.0, 10.0, 50.0, 100.0])
    report = service.growth_check(field, 2.0)
    assert report.passed
    assert report.covers_two_decades
    assert report.constant == pytest.approx(1.0, rel=0.5)


def test_growth_check_detecta_tendencia():
    field = _campo_fechado([0.0, 1.0], [0.5, 1.0, 10.0, 50.0, 100.0], lambda t, x: x ** 4)
    report = service.growth_check(field, 2.0)
    assert report.trending_up
    assert not report.passed


def test_growth_check_poucas_decadas():
    report = service.growth_check(_campo_fechado([0.0], [1.0, 2.0, 3.0]), 2.0)
    assert not report.covers_two_decades
    assert report.passed


def test_growth_check_ignora_regiao_de_contato():
    """u = x⁺ cresce linearmente; o nível |x| = 1 com u = 0 não conta como tendência."""
    field = _campo_fechado([0.0, 0.5], [-1.0, 0.5, 2.0], lambda t, x: max(x, 0.0))
    report = service.growth_check(field, 1.0)
    assert not report.trending_up
    assert report.passed
    assert report.exponent is None


def test_growth_check_intervalo_curto_nao_avalia_tendencia():
    report = service.growth_check(_campo_fechado([0.0], [1.5, 2.0], lambda t, x: x ** 6), 1.0)
    assert report.exponent is None
    assert report.passed


def test_growth_check_crescimento_linear_exato():
    field = _campo_fechado([0.0], [-100.0, -10.0, 1.0, 2.0, 4.0, 10.0, 100.0], lambda t, x: max(x, 0.0))
    report = service.growth_check(field, 1.0)
    assert report.exponent == pytest.approx(1.0)
    assert report.passed


def test_interpolation_error():
    assert service.interpolation_error(_campo_fechado([0.0], [-1.0, 0.0, 1.0, 2.0]), 0) == pytest.approx(0.25)
    afim = _campo_fechado([0.0], [-1.0, 0.0, 1.0, 2.0], lambda t, x: 3.0 * x - 1.0)
    assert service.interpolation_error(afim, 0) == pytest.approx(0.0, abs=1e-12)


def test_backend_agreement():
    a = _campo_fechado([0.0, 0.5], [-1.0, 0.0, 1.0], stderr=0.01)
    b = a.replace_values(np.array(a.values) + 0.02)
    result = service.backend_agreement(a, b)
    assert result.passed
    assert result.metrics["compared"] == 6

    c = a.replace_values(np.array(a.values) + 1.0)
    assert not service.backend_agreement(a, c).passed


def test_backend_agreement_sem_nos_comuns():
    a = _campo_fechado([0.0], [0.0, 1.0])
    b = _campo_fechado([0.5], [0.0, 1.0])
    result = service.backend_agreement(a, b)
    assert not result.passed
    assert result.metrics["compared"] == 0


def test_markov_consistency_calor():
    field = _campo_fechado(np.linspace(0.0, 1.0, 5), np.arange(-6.0, 6.25, 0.5))
    report = service.markov_consistency_check(PROBLEMA_CALOR, field, (0.0, [0.0]), 0.5, MC)
    assert report.n_excluded == 0
    assert report.n_used == MC.n_paths
    assert report.interpolation_error == pytest.approx(0.0625)
    assert report.passed


def test_markov_consistency_instante_invalido():
    field = _campo_fechado([0.0, 1.0], [-1.0, 0.0, 1.0])
    with pytest.raises(ConfigError):
        service.markov_consistency_check(PROBLEMA_CALOR, field, (0.0, [0.0]), 1.0, MC)
    with pytest.raises(ConfigError):
        service.markov_consistency_check(PROBLEMA_CALOR, field, (0.0, [0.0]), 0.123, MC)


def test_growth_check_calor_no_reticulado():
    lattice = LatticeSettings((-120.0, 120.0), 2401, 200)
    field = service.evaluate_u(PROBLEMA_CALOR, [0.0, 0.5], [[1.0], [10.0], [100.0]], MC,
                               backend="lattice", lattice=lattice)
    report = service.growth_check(field, 2.0)
    assert report.constant <= (1.0 + PROBLEMA_CALOR.T) * 1.05
    assert report.covers_two_decades
    assert report.passed
