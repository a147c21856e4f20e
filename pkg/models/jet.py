# models/jet.py
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Jet:
    """Representante ajustado (p, q, X) de um jato parabólico, com o resíduo do ajuste."""

    p: float
    q: np.ndarray
    X: np.ndarray
    fit_residual: float

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        object.__setattr__(self, "X", 0.5 * (X + X.T))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(-1))


class DirectionProbe:
    """Direção unitária z ∈ ℝᵏ usada nas desigualdades de viscosidade."""

    def __init__(self, z):
        z = np.asarray(z, dtype=float).reshape(-1)
        norm = np.linalg.norm(z)
        if not np.isfinite(norm) or norm == 0:
            raise ValueError("Direção deve ser finita e não nula.")
        self._z = z / norm

    @property
    def z(self) -> np.ndarray:
        return self._z.copy()

    def __neg__(self) -> "DirectionProbe":
        return DirectionProbe(-self._z)

    def __repr__(self) -> str:
        return f"DirectionProbe({self._z.tolist()})"


@dataclass(frozen=True)
class Stencil:
    """
    Vizinhança do ajuste: n_space nós por lado em cada dimensão espacial,
    n_time linhas por lado no tempo, pesos gaussianos de largura radius
    (em unidades de passo da malha).
    """

    n_space: int = 1
    n_time: int = 1
    radius: float = 2.0

    def __post_init__(self):
        if self.n_space < 1 or self.n_time < 1:
            raise ValueError("Estêncil precisa de ao menos um vizinho por lado.")
        if not self.radius > 0:
            raise ValueError("Raio do estêncil deve ser positivo.")
