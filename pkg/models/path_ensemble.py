# models/path_ensemble.py
from typing import Tuple

import numpy as np

from models.time_grid import TimeGrid

VARIANCE_REDUCTIONS = ("none", "terminal_matching")


class PathEnsemble:
    """
    Trajetórias simuladas X_s^{t,x} com seus incrementos brownianos.

    paths: (n_paths, n_steps + 1, d); increments: (n_paths, n_steps, d).
    Os arrays são marcados como somente leitura.
    """

    def __init__(self, paths: np.ndarray, increments: np.ndarray, grid: TimeGrid,
                 origin: Tuple[float, np.ndarray], seed: int):
        if paths.ndim != 3 or increments.ndim != 3:
            raise ValueError("Trajetórias e incrementos devem ser arrays tridimensionais.")
        n, steps_plus_one, d = paths.shape
        if increments.shape != (n, steps_plus_one - 1, d) or steps_plus_one - 1 != grid.n_steps:
            raise ValueError("Formatos de trajetórias, incrementos e malha são incompatíveis.")
        self._paths = paths
        self._increments = increments
        self._paths.setflags(write=False)
        self._increments.setflags(write=False)
        self._grid = grid
        self._origin = (float(origin[0]), np.asarray(origin[1], dtype=float).reshape(-1))
        self._seed = seed

    @property
    def paths(self) -> np.ndarray:
        return self._paths

    @property
    def increments(self) -> np.ndarray:
        return self._increments

    @property
    def grid(self) -> TimeGrid:
        return self._grid

    @property
    def origin(self) -> Tuple[float, np.ndarray]:
        return self._origin

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def n_paths(self) -> int:
        return self._paths.shape[0]

    @property
    def d(self) -> int:
        return self._paths.shape[2]

    def state_at(self, s: float) -> np.ndarray:
        """
        Estado X_s em todas as trajetórias.

        Para s ≤ t o processo está congelado na origem (convenção s∨t).
        """
        t, x = self._origin
        if s <= t:
            return np.tile(x, (self.n_paths, 1))
        return self._paths[:, self._grid.index_of(s), :]

    def __repr__(self) -> str:
        return f"PathEnsemble(n_paths={self.n_paths}, grid={self._grid!r}, seed={self._seed})"
