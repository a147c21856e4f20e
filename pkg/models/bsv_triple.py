# models/bsv_triple.py
import numpy as np

from models.time_grid import TimeGrid


class BsvTriple:
    """
    Tripla discreta (Y, Z, U) por trajetória e passo.

    Y: (n_paths, n_steps + 1, k); Z: (n_paths, n_steps, k, d);
    U: (n_paths, n_steps, k). residual_variance (n_steps, k) guarda a
    variância residual de cada regressão e n_basis (n_steps,) o tamanho
    da base usada em cada passo.
    """

    def __init__(self, Y: np.ndarray, Z: np.ndarray, U: np.ndarray, grid: TimeGrid, backend: str,
                 residual_variance: np.ndarray, n_basis: np.ndarray):
        n, steps_plus_one, k = Y.shape
        if Z.shape[:3] != (n, steps_plus_one - 1, k) or U.shape != (n, steps_plus_one - 1, k):
            raise ValueError("Formatos de Y, Z e U incompatíveis.")
        if residual_variance.shape != (steps_plus_one - 1, k):
            raise ValueError("Variâncias residuais devem ter formato (n_steps, k).")
        self._Y = Y
        self._Z = Z
        self._U = U
        for array in (self._Y, self._Z, self._U):
            array.setflags(write=False)
        self._grid = grid
        self._backend = backend
        self._residual_variance = residual_variance
        self._n_basis = np.asarray(n_basis)

    @property
    def Y(self) -> np.ndarray:
        return self._Y

    @property
    def Z(self) -> np.ndarray:
        return self._Z

    @property
    def U(self) -> np.ndarray:
        return self._U

    @property
    def grid(self) -> TimeGrid:
        return self._grid

    @property
    def backend(self) -> str:
        return self._backend

    @property
    def n_paths(self) -> int:
        return self._Y.shape[0]

    @property
    def residual_variance(self) -> np.ndarray:
        return self._residual_variance

    @property
    def n_basis(self) -> np.ndarray:
        return self._n_basis

    def y0(self) -> np.ndarray:
        """Média de Y no passo 0 (Y_t^{t,x} é determinístico)."""
        return self._Y[:, 0, :].mean(axis=0)

    def regression_error(self, step: int = 0) -> np.ndarray:
        """
        Erro padrão de Y no passo `step` acumulado das regressões posteriores:
        sqrt(Σ_{i ≥ step} n_basis_i · var_res_i / n_paths), por componente.
        """
        weights = self._n_basis[step:, None]
        return np.sqrt((weights * self._residual_variance[step:]).sum(axis=0) / self.n_paths)

    def __repr__(self) -> str:
        return f"BsvTriple(n_paths={self.n_paths}, grid={self._grid!r}, backend={self._backend})"
