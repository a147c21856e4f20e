# models/run_settings.py
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

from models.path_ensemble import VARIANCE_REDUCTIONS

BACKENDS = ("regression", "lattice")


@dataclass(frozen=True)
class MonteCarloSettings:
    """Parâmetros de simulação de um campo: trajetórias, passos em [0, T] e semente."""

    n_paths: int
    n_steps: int
    seed: int
    variance_reduction: str = "terminal_matching"
    implicit: bool = False
    degree: Optional[int] = None

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise ValueError("n_paths e n_steps devem ser maiores ou iguais a 1.")
        if self.seed < 0:
            raise ValueError("Semente deve ser não negativa.")
        if self.variance_reduction not in VARIANCE_REDUCTIONS:
            raise ValueError(f"Redução de variância desconhecida: {self.variance_reduction}")

    def steps_for(self, t: float, T: float) -> int:
        """Passos de um nó em t mantendo h = T/n_steps."""
        return max(1, int(round(self.n_steps * (T - t) / T)))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class LatticeSettings:
    x_range: Tuple[float, float]
    n_space: int
    n_steps: int

    def to_dict(self):
        return {"x_range": list(self.x_range), "n_space": self.n_space, "n_steps": self.n_steps}
