# models/lattice_field.py
import numpy as np


class LatticeField:
    """
    Solução em reticulado trinomial (d = 1): values (n_steps + 1, n_space, k)
    nos instantes times e nós xs.
    """

    def __init__(self, times: np.ndarray, xs: np.ndarray, values: np.ndarray):
        if values.shape[:2] != (times.size, xs.size):
            raise ValueError("Formato dos valores do reticulado incompatível com a malha.")
        self._times = times
        self._xs = xs
        self._values = values
        for array in (self._times, self._xs, self._values):
            array.setflags(write=False)

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def xs(self) -> np.ndarray:
        return self._xs

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def k(self) -> int:
        return self._values.shape[2]

    @property
    def dx(self) -> float:
        return float(self._xs[1] - self._xs[0])

    @property
    def h(self) -> float:
        return float(self._times[1] - self._times[0])

    def time_index(self, t: float, tol: float = 1e-9) -> int:
        """
        Raises:
            ValueError: Se t não coincide com um instante do reticulado.
        """
        position = (t - self._times[0]) / self.h
        index = int(round(position))
        if index < 0 or index >= self._times.size or abs(position - index) > tol * self._times.size:
            raise ValueError(f"Instante t={t} não está alinhado com os instantes do reticulado (h={self.h}).")
        return index

    def value_at(self, t: float, x: np.ndarray) -> np.ndarray:
        """Interpolação linear em x no instante t do reticulado; retorna (m, k)."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if np.any(x < self._xs[0]) or np.any(x > self._xs[-1]):
            raise ValueError("Ponto fora do intervalo espacial do reticulado.")
        row = self._values[self.time_index(t)]
        return np.column_stack([np.interp(x, self._xs, row[:, j]) for j in range(self.k)])

    def __repr__(self) -> str:
        return f"LatticeField(n_times={self._times.size}, n_space={self._xs.size}, k={self.k})"
