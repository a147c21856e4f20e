import numpy as np
import pytest

from models.coefficient_field import CoefficientField
from models.exceptions import SimulationError
from models.time_grid import TimeGrid
from repositories.ensemble_repository import EnsembleRepository
from services.forward_sde_service import ForwardSdeService, path_generator

forward = ForwardSdeService()
BROWNIANO = CoefficientField(1, diffusion_kind="constant", diffusion_matrix=[[1.0]])


def test_incrementos_tem_media_e_covariancia_corretas():
    grid = TimeGrid(0.0, 1.0, 10)
    dW = forward.brownian_increments(grid, 20000, 2, seed=3)
    assert dW.shape == (20000, 10, 2)
    flat = dW.reshape(-1, 2)
    n = flat.shape[0]
    assert np.all(np.abs(flat.mean(axis=0)) < 4.0 * np.sqrt(grid.h / n))
    cov = np.cov(flat.T)
    assert cov[0, 0] == pytest.approx(grid.h, rel=0.02)
    assert abs(cov[0, 1]) < 4.0 * grid.h / np.sqrt(n)


def test_gerador_por_trajetoria_independe_do_lote():
    grid = TimeGrid(0.0, 1.0, 5)
    full = forward.brownian_increments(grid, 1500, 1, seed=9)
    draws = path_generator(9, 1400).standard_normal((5, 1)) * np.sqrt(grid.h)
    np.testing.assert_array_equal(full[1400], draws)


def test_incrementos_identicos_com_varios_workers():
    grid = TimeGrid(0.0, 1.0, 8)
    one = forward.brownian_increments(grid, 3000, 1, seed=4, workers=1, variance_reduction="terminal_matching")
    many = forward.brownian_increments(grid, 3000, 1, seed=4, workers=4, variance_reduction="terminal_matching")
    np.testing.assert_array_equal(one, many)


def test_casamento_terminal_fixa_momentos():
    grid = TimeGrid(0.25, 1.0, 6)
    dW = forward.brownian_increments(grid, 500, 2, seed=1, variance_reduction="terminal_matching")
    terminal = dW.sum(axis=1)
    np.testing.assert_allclose(terminal.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(terminal.var(axis=0), 0.75, rtol=1e-10)


def test_deriva_constante_sem_ruido_chega_em_c():
    coeffs = CoefficientField(1, drift_kind="constant", drift_vector=[0.7])
    ensemble = forward.simulate(coeffs, (0.0, [0.0]), TimeGrid(0.0, 1.0, 20), 5, seed=0)
    np.testing.assert_allclose(ensemble.paths[:, -1, 0], 0.7, atol=1e-12)


def test_browniano_media_terminal():
    ensemble = forward.simulate(BROWNIANO, (0.0, [5.0]), TimeGrid(0.0, 1.0, 10), 10000, seed=12)
    assert abs(ensemble.paths[:, -1, 0].mean() - 5.0) < 4.0 / np.sqrt(10000)


def test_euler_converge_para_exponencial():
    coeffs = CoefficientField(1, drift_kind="affine", drift_matrix=[[0.1]], drift_vector=[0.0])
    errors = []
    for n_steps in (10, 100, 1000):
        ensemble = forward.simulate(coeffs, (0.0, [1.0]), TimeGrid(0.0, 1.0, n_steps), 1, seed=0)
        errors.append(abs(ensemble.paths[0, -1, 0] - np.exp(0.1)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-4


def test_simulate_rejeita_origem_fora_da_malha():
    with pytest.raises(ValueError):
        forward.simulate(BROWNIANO, (0.5, [0.0]), TimeGrid(0.0, 1.0, 4), 10, seed=0)
    with pytest.raises(ValueError):
        forward.simulate(BROWNIANO, (0.0, [0.0, 1.0]), TimeGrid(0.0, 1.0, 4), 10, seed=0)


def test_simulate_divergencia_levanta_erro():
    coeffs = CoefficientField(1, drift_kind="affine", drift_matrix=[[1e200]], drift_vector=[0.0])
    with pytest.raises(SimulationError):
        forward.simulate(coeffs, (0.0, [1e200]), TimeGrid(0.0, 1.0, 4), 2, seed=0)


def test_ensemble_somente_leitura_e_state_at():
    ensemble = forward.simulate(BROWNIANO, (0.5, [2.0]), TimeGrid(0.5, 1.0, 4), 3, seed=0)
    with pytest.raises(ValueError):
        ensemble.paths[0, 0, 0] = 1.0
    np.testing.assert_array_equal(ensemble.state_at(0.1), np.full((3, 1), 2.0))
    np.testing.assert_array_equal(ensemble.state_at(0.75), ensemble.paths[:, 2, :])


def test_moment_check_trajetoria_constante():
    coeffs = CoefficientField(2)
    ensemble = forward.simulate(coeffs, (0.0, [1.0, 1.0]), TimeGrid(0.0, 1.0, 5), 4, seed=0)
    report = forward.moment_check(ensemble, 4)
    assert report.sup_moment == pytest.approx(4.0)
    assert report.ratio == pytest.approx(4.0 / 5.0)


def test_moment_check_exige_expoente_par():
    ensemble = forward.simulate(BROWNIANO, (0.0, [0.0]), TimeGrid(0.0, 1.0, 5), 4, seed=0)
    with pytest.raises(ValueError):
        forward.moment_check(ensemble, 3)


def test_razao_de_momentos_limitada_em_x():
    coeffs = CoefficientField(1, "affine", [[0.2]], [0.1], "constant", [[0.5]])
    ratios = []
    for x in (0.0, 10.0, 100.0):
        ensemble = forward.simulate(coeffs, (0.0, [x]), TimeGrid(0.0, 1.0, 20), 2000, seed=5)
        ratios.append(forward.moment_check(ensemble, 2).ratio)
    assert max(ratios) < 10.0


def test_estudo_de_refinamento_estavel():
    study = forward.moment_refinement_study(BROWNIANO, (0.0, [0.0]), 1.0, 2, [10, 20, 40], 4000, seed=8)
    assert len(study.reports) == 3
    assert not study.growing


def test_dump_csv_do_ensemble(tmp_path):
    ensemble = forward.simulate(BROWNIANO, (0.0, [0.0]), TimeGrid(0.0, 1.0, 3), 2, seed=0)
    path = EnsembleRepository().dump_csv(ensemble, tmp_path / "ensemble.csv")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "path_id,step,x1"
    assert len(lines) == 1 + 2 * 4
