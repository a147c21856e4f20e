import numpy as np
import pytest

from models.coefficient_field import CoefficientField
from models.exceptions import ConfigError, SolverError
from models.generator import Generator
from models.indicator_functions import IndicatorBox
from models.norm_functions import SeparableAbs, Zero
from models.terminal_map import TerminalMap
from models.time_grid import TimeGrid
from services.bsvi_solver_service import BsviSolverService
from services.forward_sde_service import ForwardSdeService

forward = ForwardSdeService()
solver = BsviSolverService()

CALOR = CoefficientField(1, diffusion_kind="constant", diffusion_matrix=[[1.0]])
QUADRADO = TerminalMap("polynomial", 1, coefficients=[[0.0, 0.0, 1.0]])
IDENTIDADE = TerminalMap("polynomial", 1, coefficients=[[0.0, 1.0]])
PARTE_POSITIVA = TerminalMap("positive_part", 1)
SEM_GERADOR = Generator("zero", 1, 1)


def _ensemble(coeffs, x, n_paths, n_steps, seed=0, t=0.0, T=1.0):
    return forward.simulate(coeffs, (t, [x]), TimeGrid(t, T, n_steps), n_paths, seed,
                            variance_reduction="terminal_matching")


def test_difusao_degenerada_propaga_constante():
    ensemble = _ensemble(CoefficientField(1), 1.5, 20, 10)
    triple = solver.solve(ensemble, SEM_GERADOR, QUADRADO, Zero(1))
    np.testing.assert_allclose(triple.Y, 2.25, atol=1e-12)
    np.testing.assert_array_equal(triple.U, 0.0)


@pytest.mark.parametrize("x", [-1.0, 0.0, 1.0])
def test_feynman_kac_do_calor(x):
    triple = solver.solve(_ensemble(CALOR, x, 10000, 50, seed=21), SEM_GERADOR, QUADRADO, Zero(1))
    assert triple.y0()[0] == pytest.approx(x ** 2 + 1.0, rel=0.02)


def test_zero_igual_ao_esquema_sem_prox():
    ensemble = _ensemble(CALOR, 0.3, 500, 10, seed=2)
    with_prox = solver.solve(ensemble, Generator("linear", 1, 1, gamma=-0.5), QUADRADO, Zero(1))
    plain = solver.solve(ensemble, Generator("linear", 1, 1, gamma=-0.5), QUADRADO, Zero(1), apply_reflection=False)
    np.testing.assert_array_equal(with_prox.Y, plain.Y)
    np.testing.assert_array_equal(with_prox.Z, plain.Z)


@pytest.mark.parametrize("implicit,tolerance", [(False, 0.01), (True, 0.005)])
def test_gerador_linear(implicit, tolerance):
    ensemble = _ensemble(CoefficientField(1), 2.0, 16, 100)
    triple = solver.solve(ensemble, Generator("linear", 1, 1, gamma=-0.5), IDENTIDADE, Zero(1), implicit=implicit)
    assert triple.y0()[0] == pytest.approx(2.0 * np.exp(-0.5), rel=tolerance)


def test_caso_refletido_fica_no_dominio_e_plano():
    ensemble = _ensemble(CALOR, -0.5, 4000, 40, seed=5)
    gen = Generator("constant", 1, 1, constant=[-1.0])
    phi = IndicatorBox(0.0, np.inf, 1)
    triple = solver.solve(ensemble, gen, PARTE_POSITIVA, phi)
    assert np.all(triple.Y >= 0.0)
    assert np.all(triple.U <= 0.0)
    positive = triple.Y[:, :-1, :] > 1e-6
    np.testing.assert_array_equal(triple.U[positive], 0.0)
    report = solver.flatness_check(triple, phi, seed=1)
    assert report.violations == 0
    assert report.domain_fraction == 1.0
    assert report.passed


def test_flatness_valor_absoluto_limita_u():
    ensemble = _ensemble(CALOR, 0.0, 1000, 20, seed=6)
    triple = solver.solve(ensemble, Generator("constant", 1, 1, constant=[0.5]), IDENTIDADE, SeparableAbs(1))
    assert np.abs(triple.U).max() <= 1.0 + 1e-9
    assert solver.flatness_check(triple, SeparableAbs(1)).passed


def test_flatness_zero_passa_trivialmente():
    triple = solver.solve(_ensemble(CALOR, 0.0, 200, 5), SEM_GERADOR, QUADRADO, Zero(1))
    report = solver.flatness_check(triple, Zero(1))
    assert report.max_abs_u == 0.0
    assert report.passed


def test_dimensoes_incompativeis():
    ensemble = _ensemble(CALOR, 0.0, 10, 2)
    with pytest.raises(ConfigError):
        solver.solve(ensemble, SEM_GERADOR, QUADRADO, Zero(2))


def test_iteracao_implicita_divergente():
    ensemble = _ensemble(CoefficientField(1), 1.0, 4, 10)
    with pytest.raises(SolverError):
        solver.solve(ensemble, Generator("linear", 1, 1, gamma=-1000.0), IDENTIDADE, Zero(1), implicit=True)


def test_estabilidade_caso_degenerado():
    triple = solver.solve(_ensemble(CoefficientField(1), 2.0, 5, 10), SEM_GERADOR, QUADRADO, Zero(1))
    report = solver.stability_check(triple, [2.0])
    assert report.ratio == pytest.approx(16.0 / 5.0)
    assert report.energy >= 16.0


def test_estabilidade_sob_refinamento_calor():
    study = solver.stability_refinement_study(CALOR, SEM_GERADOR, QUADRADO, Zero(1), (0.0, [0.5]), 1.0,
                                              [25, 50, 100], 2000, seed=4, forward=forward)
    assert len(study.reports) == 3
    assert not study.growing


def test_erro_de_regressao_nao_negativo():
    triple = solver.solve(_ensemble(CALOR, 0.0, 2000, 10, seed=3), SEM_GERADOR, QUADRADO, Zero(1))
    error = triple.regression_error(0)
    assert error.shape == (1,)
    assert error[0] >= 0.0
