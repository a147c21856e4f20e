# models/regression_basis.py
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Tuple

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)


def total_degree_exponents(n_vars: int, degree: int) -> np.ndarray:
    """Expoentes de todos os monômios em n_vars variáveis com grau total ≤ degree."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=n_vars) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return np.array(exps, dtype=int).reshape(len(exps), n_vars)


class FittedBasis:
    """
    Base polinomial ajustada a uma nuvem de estados: limites de winsorização,
    padronização e expoentes dos monômios nas coordenadas com dispersão.
    """

    def __init__(self, exponents: np.ndarray, dims: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                 mean: np.ndarray, scale: np.ndarray, degree: int, chunk_size: int):
        self._exponents = exponents
        self._dims = dims
        self._lower = lower
        self._upper = upper
        self._mean = mean
        self._scale = scale
        self._degree = degree
        self._chunk_size = chunk_size

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def n_basis(self) -> int:
        return self._exponents.shape[0]

    def design(self, X: np.ndarray) -> np.ndarray:
        """Matriz de desenho Φ(X), formato (n, n_basis)."""
        Z = (np.clip(X, self._lower, self._upper)[:, self._dims] - self._mean) / self._scale
        Phi = np.ones((X.shape[0], self.n_basis))
        for j, exps in enumerate(self._exponents):
            for var, power in enumerate(exps):
                if power:
                    Phi[:, j] *= Z[:, var] ** power
        return Phi

    def _chunk_terms(self, X, B, start) -> Tuple[np.ndarray, np.ndarray]:
        stop = start + self._chunk_size
        Phi = self.design(X[start:stop])
        return Phi.T @ Phi, Phi.T @ B[start:stop]

    def normal_equations(self, X: np.ndarray, B: np.ndarray, workers: int = 1):
        """
        Monta ΦᵀΦ e ΦᵀB por blocos de tamanho fixo somados em ordem fixa,
        de modo que o resultado não depende do número de workers.
        """
        starts = range(0, X.shape[0], self._chunk_size)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda s: self._chunk_terms(X, B, s), starts))
        else:
            parts = [self._chunk_terms(X, B, s) for s in starts]
        gram = np.zeros((self.n_basis, self.n_basis))
        rhs = np.zeros((self.n_basis, B.shape[1]))
        for g, r in parts:
            gram += g
            rhs += r
        return gram, rhs

    def regress(self, X: np.ndarray, B: np.ndarray, workers: int = 1) -> np.ndarray:
        """Valores ajustados de Ê[B | X] por mínimos quadrados, coluna a coluna."""
        gram, rhs = self.normal_equations(X, B, workers)
        coef = linalg.lstsq(gram, rhs)[0]
        return self.design(X) @ coef


class RegressionBasis:
    """
    Família polinomial de grau total D nas coordenadas de X.

    Os estados são winsorizados nos quantis (q, 1 − q) e padronizados antes
    da avaliação. O grau é reduzido automaticamente quando a matriz de
    desenho não tem posto completo na amostra.
    """

    def __init__(self, degree: int = 3, winsor_quantile: float = 0.0005, chunk_size: int = 4096):
        if degree < 0:
            raise ValueError("Grau da base deve ser não negativo.")
        if not 0.0 <= winsor_quantile < 0.5:
            raise ValueError("Quantil de winsorização deve estar em [0, 0.5).")
        if chunk_size < 1:
            raise ValueError("Tamanho de bloco deve ser positivo.")
        self._degree = int(degree)
        self._winsor_quantile = float(winsor_quantile)
        self._chunk_size = int(chunk_size)

    @property
    def degree(self) -> int:
        return self._degree

    def n_functions(self, d: int) -> int:
        return total_degree_exponents(d, self._degree).shape[0]

    def fit(self, X: np.ndarray) -> FittedBasis:
        X = np.atleast_2d(X)
        q = self._winsor_quantile
        lower = np.quantile(X, q, axis=0)
        upper = np.quantile(X, 1.0 - q, axis=0)
        clipped = np.clip(X, lower, upper)
        mean = clipped.mean(axis=0)
        scale = clipped.std(axis=0)
        dims = np.flatnonzero(scale > 1e-12 * (1.0 + np.abs(mean)))

        for degree in range(self._degree if dims.size else 0, -1, -1):
            fitted = FittedBasis(
                total_degree_exponents(dims.size, degree), dims, lower, upper,
                mean[dims], scale[dims], degree, self._chunk_size,
            )
            gram, _ = fitted.normal_equations(X, np.zeros((X.shape[0], 1)))
            if np.linalg.matrix_rank(gram) == fitted.n_basis:
                if degree < self._degree and dims.size:
                    logger.warning(
                        "Regressão com posto deficiente: grau reduzido de %d para %d.", self._degree, degree
                    )
                return fitted
        raise ValueError("Base de regressão degenerada mesmo com grau zero.")

    def to_dict(self):
        return {"degree": self._degree, "winsor_quantile": self._winsor_quantile, "chunk_size": self._chunk_size}
