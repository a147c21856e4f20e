# models/solution_field.py
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator


class SolutionField:
    """
    Campo u(t, x) = Y_t^{t,x} numa malha espaço-temporal explícita.

    values e stderr têm formato (n_times, n_points, k). Os instantes são
    ordenados de forma crescente e os pontos em ordem lexicográfica,
    que é a ordem das linhas do CSV exportado.
    """

    def __init__(self, times, points, values, stderr=None, provenance: Optional[Dict[str, Any]] = None):
        times = np.asarray(times, dtype=float).reshape(-1)
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        values = np.asarray(values, dtype=float)
        if values.ndim == 2:
            values = values[:, :, None]
        stderr = np.zeros_like(values) if stderr is None else np.asarray(stderr, dtype=float).reshape(values.shape)
        if values.shape[:2] != (times.size, points.shape[0]):
            raise ValueError(
                f"Valores com formato {values.shape} incompatíveis com {times.size} instantes e {points.shape[0]} pontos."
            )
        if np.unique(times).size != times.size:
            raise ValueError("Instantes repetidos na malha.")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ValueError("Pontos repetidos na malha.")

        t_order = np.argsort(times, kind="stable")
        p_order = np.lexsort(points.T[::-1])
        self._times = times[t_order]
        self._points = points[p_order]
        self._values = values[t_order][:, p_order]
        self._stderr = stderr[t_order][:, p_order]
        for array in (self._times, self._points, self._values, self._stderr):
            array.setflags(write=False)
        self._provenance = dict(provenance or {})

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def stderr(self) -> np.ndarray:
        return self._stderr

    @property
    def provenance(self) -> Dict[str, Any]:
        return dict(self._provenance)

    @property
    def d(self) -> int:
        return self._points.shape[1]

    @property
    def k(self) -> int:
        return self._values.shape[2]

    def time_index(self, t: float, tol: float = 1e-12) -> int:
        matches = np.flatnonzero(np.abs(self._times - t) <= tol * (1.0 + abs(t)))
        if matches.size == 0:
            raise ValueError(f"Instante t={t} não pertence à malha do campo.")
        return int(matches[0])

    def point_index(self, x, tol: float = 1e-12) -> int:
        x = np.asarray(x, dtype=float).reshape(-1)
        dist = np.abs(self._points - x).max(axis=1)
        matches = np.flatnonzero(dist <= tol * (1.0 + np.abs(x).max()))
        if matches.size == 0:
            raise ValueError(f"Ponto x={x.tolist()} não pertence à malha do campo.")
        return int(matches[0])

    def axes(self) -> List[np.ndarray]:
        return [np.unique(self._points[:, j]) for j in range(self.d)]

    def is_tensor_grid(self) -> bool:
        axes = self.axes()
        if int(np.prod([a.size for a in axes])) != self._points.shape[0]:
            return False
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        return bool(np.array_equal(mesh, self._points))

    def grid_values(self, t_index: int) -> np.ndarray:
        """Valores no instante t_index rearranjados em (n₁, …, n_d, k)."""
        if not self.is_tensor_grid():
            raise ValueError("Os pontos do campo não formam uma malha tensorial.")
        shape = [a.size for a in self.axes()]
        return self._values[t_index].reshape(*shape, self.k)

    def inside_hull(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        lo = self._points.min(axis=0)
        hi = self._points.max(axis=0)
        return np.all((X >= lo) & (X <= hi), axis=1)

    def interpolate(self, s: float, X: np.ndarray) -> np.ndarray:
        """
        u(s, X): multilinear em x, nó mais próximo em t.

        Returns:
            Array (m, k).
        """
        t_index = int(np.argmin(np.abs(self._times - s)))
        X = np.atleast_2d(np.asarray(X, dtype=float))
        axes = self.axes()
        if any(a.size < 2 for a in axes):
            raise ValueError("Interpolação exige ao menos dois nós por dimensão.")
        interpolator = RegularGridInterpolator(
            tuple(axes), self.grid_values(t_index), method="linear", bounds_error=False, fill_value=None
        )
        return interpolator(X)

    def replace_values(self, values: np.ndarray) -> "SolutionField":
        return SolutionField(self._times, self._points, values, self._stderr, self._provenance)

    def __repr__(self) -> str:
        return f"SolutionField(n_times={self._times.size}, n_points={self._points.shape[0]}, d={self.d}, k={self.k})"
