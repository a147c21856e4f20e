import math

import numpy as np
import pytest
from pydantic import ValidationError

from config.settings import Settings
from models.exceptions import ConfigError
from repositories.config_repository import ConfigRepository
from schemas.problem_schema import ProblemSchema
from schemas.run_config_schema import RunConfigSchema
from services.problem_factory_service import ProblemFactoryService

factory = ProblemFactoryService()
configs = ConfigRepository()

CALOR = {
    "d": 1, "k": 1, "T": 1.0,
    "coeffs": {"diffusion_kind": "constant", "diffusion_matrix": [[1.0]]},
    "term": {"kind": "polynomial", "coefficients": [[0.0, 0.0, 1.0]]},
    "phi": {"kind": "zero", "k": 1},
}


def _run_config(**extra):
    data = {
        "problem": CALOR,
        "grid": {"times": [0.0, 1.0], "points": [[0.0]]},
        "mc": {"n_paths": 10, "n_steps": 5, "seed": 1},
    }
    data.update(extra)
    return data


def test_settings_singleton_e_padroes():
    assert Settings() is Settings()
    assert Settings().regression_degree == 3
    assert Settings().get("markov_error_factor") == 3.0
    with pytest.raises(KeyError):
        Settings().get("inexistente")


def test_settings_update_e_reset():
    settings = Settings()
    settings.update_config({"visc_floor": 1e-3})
    assert settings.visc_floor == 1e-3
    settings.reset()
    assert settings.visc_floor == 1e-6
    with pytest.raises(KeyError):
        settings.update_config({"inexistente": 1})


def test_demos_empacotados_validam_e_montam():
    nomes = configs.list_demos()
    assert nomes == ["2d-box-system", "heat", "linear-generator", "reflected-halfline"]
    for nome in nomes:
        config = configs.load_run_config(configs.demo_path(nome))
        spec = factory.build_problem(config.problem)
        assert spec.d == config.problem.d
        assert spec.k == config.problem.k


def test_build_problem_calcula_constantes():
    spec = factory.build_problem(ProblemSchema.model_validate(CALOR))
    assert spec.constants["p"] == pytest.approx(2.0)
    assert spec.constants["L"] >= 0.0


def test_build_problem_constante_declarada_menor_que_calculada():
    data = dict(CALOR, constants={"p": 1.0})
    with pytest.raises(ConfigError):
        factory.build_problem(ProblemSchema.model_validate(data))


def test_build_problem_terminal_fora_do_dominio():
    data = dict(CALOR, phi={"kind": "indicator_box", "lower": 2.0, "upper": "inf", "k": 1})
    with pytest.raises(ConfigError):
        factory.build_problem(ProblemSchema.model_validate(data))


def test_build_phi_limites_infinitos_e_soma():
    box = factory.build_phi(ProblemSchema.model_validate(
        dict(CALOR, phi={"kind": "indicator_box", "lower": 0.0, "upper": "inf", "k": 1})).phi, 1)
    assert box.values(np.array([[5.0]]))[0] == 0.0
    assert math.isinf(box.values(np.array([[-1.0]]))[0])

    soma = ProblemSchema.model_validate(dict(CALOR, phi={"kind": "scaled_sum", "terms": [
        {"weight": 2.0, "function": {"kind": "separable_abs"}},
        {"weight": 1.0, "function": {"kind": "quadratic", "matrix": [[1.0]]}},
    ]}))
    phi = factory.build_phi(soma.phi, 1)
    assert phi.values(np.array([[-1.0]]))[0] == pytest.approx(2.5)


def test_build_phi_dimensao_incompativel():
    schema = ProblemSchema.model_validate(dict(CALOR, phi={"kind": "quadratic", "matrix": [[1.0, 0.0], [0.0, 1.0]]}))
    with pytest.raises(ConfigError):
        factory.build_phi(schema.phi, 1)


def test_build_phi_quadratica_nao_psd():
    schema = ProblemSchema.model_validate(dict(CALOR, phi={"kind": "quadratic", "matrix": [[-1.0]]}))
    with pytest.raises(ConfigError):
        factory.build_phi(schema.phi, 1)


@pytest.mark.parametrize("problema", [
    dict(CALOR, phi={"kind": "cubica"}),
    dict(CALOR, T=0.0),
    dict(CALOR, constants={"K": 1.0}),
    dict(CALOR, gen={"kind": "linear"}),
    dict(CALOR, phi={"kind": "indicator_box", "lower": "menos", "upper": 1.0}),
])
def test_problema_invalido(problema):
    with pytest.raises(ValidationError):
        ProblemSchema.model_validate(problema)


def test_run_config_rejeita_instante_e_dimensao():
    with pytest.raises(ValidationError, match="grid.times"):
        RunConfigSchema.model_validate(_run_config(grid={"times": [2.0], "points": [[0.0]]}))
    with pytest.raises(ValidationError, match="grid.points"):
        RunConfigSchema.model_validate(_run_config(grid={"times": [0.0], "points": [[0.0, 1.0]]}))
    with pytest.raises(ValidationError):
        RunConfigSchema.model_validate(_run_config(mc={"n_paths": 10, "n_steps": 5}))


def test_run_config_reticulado_exige_secao():
    with pytest.raises(ValidationError, match="lattice"):
        RunConfigSchema.model_validate(_run_config(backend="lattice"))
    config = RunConfigSchema.model_validate(
        _run_config(backend="lattice", lattice={"x_range": [-4.0, 4.0], "n_space": 81, "n_steps": 100}))
    assert factory.build_lattice(config.lattice).n_space == 81


def test_run_config_markov_fora_do_intervalo():
    checks = {"markov": {"origin_x": [0.0], "s": 1.0}}
    with pytest.raises(ValidationError, match="markov"):
        RunConfigSchema.model_validate(_run_config(checks=checks))


def test_run_config_malha_da_viscosidade():
    checks = {"viscosity": {"grid": {"times": [0.0, 0.1], "points": [[1.0], [2.0]]}, "min_value": 0.1}}
    with pytest.raises(ValidationError, match="checks.viscosity.grid"):
        RunConfigSchema.model_validate(_run_config(checks=checks))
    lattice = {"x_range": [-4.0, 4.0], "n_space": 81, "n_steps": 100}
    config = RunConfigSchema.model_validate(_run_config(checks=checks, lattice=lattice))
    assert config.checks.viscosity.min_value == 0.1
    fora = {"viscosity": {"grid": {"times": [2.0], "points": [[1.0]]}}}
    with pytest.raises(ValidationError, match="checks.viscosity.grid.times"):
        RunConfigSchema.model_validate(_run_config(checks=fora, lattice=lattice))


def test_build_mc_e_stencil():
    config = RunConfigSchema.model_validate(_run_config(mc={"n_paths": 10, "n_steps": 8, "seed": 4, "degree": 2}))
    mc = factory.build_mc(config.mc)
    assert (mc.n_paths, mc.n_steps, mc.seed, mc.degree) == (10, 8, 4, 2)
    assert mc.steps_for(0.5, 1.0) == 4
    stencil = factory.build_stencil(config.checks.viscosity)
    assert (stencil.n_space, stencil.n_time, stencil.radius) == (1, 1, 2.0)


def test_configuracao_inexistente_ou_malformada(tmp_path):
    with pytest.raises(ConfigError):
        configs.read_json(tmp_path / "falta.json")
    ruim = tmp_path / "ruim.json"
    ruim.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        configs.read_json(ruim)
    with pytest.raises(ConfigError, match="heat"):
        configs.demo_path("nao-existe")
