# models/time_grid.py
import numpy as np


class TimeGrid:
    """
    Malha temporal uniforme tᵢ = t_start + i·h, h = (T − t_start)/n_steps.
    """

    def __init__(self, t_start: float, T: float, n_steps: int):
        """
        Args:
            t_start (float): Instante inicial.
            T (float): Horizonte final.
            n_steps (int): Número de passos (≥ 1).

        Raises:
            ValueError: Se t_start ≥ T ou n_steps < 1.
        """
        if not (np.isfinite(t_start) and np.isfinite(T)) or t_start >= T:
            raise ValueError(f"Malha inválida: t_start={t_start} deve ser menor que T={T}.")
        if int(n_steps) != n_steps or n_steps < 1:
            raise ValueError("Número de passos deve ser um inteiro maior ou igual a 1.")
        self._t_start = float(t_start)
        self._T = float(T)
        self._n_steps = int(n_steps)

    @property
    def t_start(self) -> float:
        return self._t_start

    @property
    def T(self) -> float:
        return self._T

    @property
    def n_steps(self) -> int:
        return self._n_steps

    @property
    def h(self) -> float:
        """Passo constante."""
        return (self._T - self._t_start) / self._n_steps

    @property
    def nodes(self) -> np.ndarray:
        return self._t_start + self.h * np.arange(self._n_steps + 1)

    def index_of(self, s: float, tol: float = 1e-9) -> int:
        """
        Índice do nó igual a s.

        Raises:
            ValueError: Se s não coincide com um nó da malha.
        """
        position = (s - self._t_start) / self.h
        index = int(round(position))
        if index < 0 or index > self._n_steps or abs(position - index) > tol * max(1.0, self._n_steps):
            raise ValueError(f"Instante s={s} não é um nó da malha [{self._t_start}, {self._T}] com {self._n_steps} passos.")
        return index

    def to_dict(self):
        return {"t_start": self._t_start, "T": self._T, "n_steps": self._n_steps}

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeGrid) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"TimeGrid(t_start={self._t_start}, T={self._T}, n_steps={self._n_steps})"
