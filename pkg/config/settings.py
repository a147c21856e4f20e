import json
from pathlib import Path
from typing import Any, Dict, List

DEFAULT_SETTINGS_FILE = Path(__file__).resolve().parent / "settings.json"


class Settings:
    """
    Gerencia os parâmetros numéricos padrão do laboratório.
    Os valores são carregados de config/settings.json; na ausência do
    arquivo valem os padrões embutidos.
    """

    _instance = None
    _config = None

    _defaults: Dict[str, Any] = {
        "prox_tol": 1e-10,
        "prox_max_iter": 10000,
        "dir_deriv_t0": 1.0,
        "dir_deriv_ratio": 0.5,
        "dir_deriv_steps": 40,
        "dir_deriv_blowup": 1e12,
        "envelope_radii": [1e-1, 1e-2, 1e-3, 1e-4],
        "envelope_samples": 64,
        "envelope_prox_lambda": 1e-12,
        "subdiff_random_directions": 8,
        "subdiff_tol": 1e-6,
        "regression_degree": 3,
        "regression_chunk": 4096,
        "winsor_quantile": 0.0005,
        "implicit_tol": 1e-12,
        "implicit_max_iter": 200,
        "visc_tau_factor": 10.0,
        "visc_floor": 1e-6,
        "markov_error_factor": 3.0,
        "growth_trend_factor": 1.5,
        "refinement_growth_factor": 1.5,
        "convex_suite_samples": 1000,
        "convex_suite_tol": 1e-6,
    }

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Settings, cls).__new__(cls)
            cls._instance._load_config()
        return cls._instance

    def _load_config(self, config_file: Path = DEFAULT_SETTINGS_FILE):
        """Carrega configurações do arquivo JSON, completando com os padrões."""
        self._config = dict(self._defaults)
        try:
            with open(config_file, "r", encoding="utf-8") as f:
                self._config.update(json.load(f))
        except FileNotFoundError:
            pass
        except json.JSONDecodeError as e:
            raise ValueError(f"Erro ao decodificar {config_file}: {e}") from e

    def get(self, key: str) -> Any:
        if key not in self._config:
            raise KeyError(f"Parâmetro desconhecido: {key}")
        return self._config[key]

    @property
    def prox_tol(self) -> float:
        """Tolerância do prox numérico no resíduo de otimalidade."""
        return float(self._config["prox_tol"])

    @property
    def prox_max_iter(self) -> int:
        return int(self._config["prox_max_iter"])

    @property
    def dir_deriv_t0(self) -> float:
        return float(self._config["dir_deriv_t0"])

    @property
    def dir_deriv_ratio(self) -> float:
        return float(self._config["dir_deriv_ratio"])

    @property
    def dir_deriv_steps(self) -> int:
        return int(self._config["dir_deriv_steps"])

    @property
    def dir_deriv_blowup(self) -> float:
        """Limiar acima do qual um quociente ainda crescente é declarado infinito."""
        return float(self._config["dir_deriv_blowup"])

    @property
    def envelope_radii(self) -> List[float]:
        return [float(r) for r in self._config["envelope_radii"]]

    @property
    def envelope_samples(self) -> int:
        return int(self._config["envelope_samples"])

    @property
    def envelope_prox_lambda(self) -> float:
        return float(self._config["envelope_prox_lambda"])

    @property
    def subdiff_random_directions(self) -> int:
        return int(self._config["subdiff_random_directions"])

    @property
    def subdiff_tol(self) -> float:
        return float(self._config["subdiff_tol"])

    @property
    def regression_degree(self) -> int:
        return int(self._config["regression_degree"])

    @property
    def regression_chunk(self) -> int:
        return int(self._config["regression_chunk"])

    @property
    def winsor_quantile(self) -> float:
        return float(self._config["winsor_quantile"])

    @property
    def implicit_tol(self) -> float:
        return float(self._config["implicit_tol"])

    @property
    def implicit_max_iter(self) -> int:
        return int(self._config["implicit_max_iter"])

    @property
    def visc_tau_factor(self) -> float:
        return float(self._config["visc_tau_factor"])

    @property
    def visc_floor(self) -> float:
        return float(self._config["visc_floor"])

    @property
    def markov_error_factor(self) -> float:
        return float(self._config["markov_error_factor"])

    @property
    def growth_trend_factor(self) -> float:
        return float(self._config["growth_trend_factor"])

    @property
    def refinement_growth_factor(self) -> float:
        return float(self._config["refinement_growth_factor"])

    @property
    def convex_suite_samples(self) -> int:
        return int(self._config["convex_suite_samples"])

    @property
    def convex_suite_tol(self) -> float:
        return float(self._config["convex_suite_tol"])

    def update_config(self, new_config: Dict[str, Any]) -> None:
        """Atualiza configurações (chaves desconhecidas são rejeitadas)."""
        unknown = set(new_config) - set(self._defaults)
        if unknown:
            raise KeyError(f"Parâmetros desconhecidos: {sorted(unknown)}")
        self._config.update(new_config)

    def reset(self) -> None:
        """Recarrega o arquivo, descartando atualizações em memória."""
        self._load_config()

    def to_dict(self) -> Dict[str, Any]:
        """Retorna configurações como dicionário."""
        return dict(self._config)
