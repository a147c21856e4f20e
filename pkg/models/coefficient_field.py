# models/coefficient_field.py
from typing import Any, Dict, Optional

import numpy as np

DRIFT_KINDS = ("zero", "constant", "affine")
DIFFUSION_KINDS = ("zero", "constant", "diagonal_affine")


class CoefficientField:
    """
    Coeficientes b(t, x) e σ(t, x) da difusão progressiva.

    Drift: zero, constante c ou afim A·x + c.
    Difusão: zero, matriz constante S (d×d) ou diagonal afim
    σ(x) = diag(s₀ + s₁ ⊙ x). Todos os tipos são globalmente Lipschitz em x,
    uniformemente em t, com constante L calculável.
    """

    def __init__(
        self,
        d: int,
        drift_kind: str = "zero",
        drift_matrix=None,
        drift_vector=None,
        diffusion_kind: str = "zero",
        diffusion_matrix=None,
        diffusion_base=None,
        diffusion_slope=None,
    ):
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ValueError("Dimensão d deve ser um inteiro maior ou igual a 1.")
        if drift_kind not in DRIFT_KINDS:
            raise ValueError(f"Tipo de drift desconhecido: {drift_kind}")
        if diffusion_kind not in DIFFUSION_KINDS:
            raise ValueError(f"Tipo de difusão desconhecido: {diffusion_kind}")
        self._d = int(d)
        self._drift_kind = drift_kind
        self._diffusion_kind = diffusion_kind

        self._A = np.zeros((d, d))
        self._c = np.zeros(d)
        if drift_kind in ("constant", "affine"):
            self._c = self._vector(drift_vector, "drift_vector")
        if drift_kind == "affine":
            self._A = self._matrix(drift_matrix, "drift_matrix")

        self._S = np.zeros((d, d))
        self._s0 = np.zeros(d)
        self._s1 = np.zeros(d)
        if diffusion_kind == "constant":
            self._S = self._matrix(diffusion_matrix, "diffusion_matrix")
        elif diffusion_kind == "diagonal_affine":
            self._s0 = self._vector(diffusion_base, "diffusion_base")
            self._s1 = self._vector(diffusion_slope, "diffusion_slope", default=0.0)

    def _vector(self, value, name, default: Optional[float] = None) -> np.ndarray:
        if value is None:
            if default is None:
                raise ValueError(f"Parâmetro {name} é obrigatório.")
            return np.full(self._d, default)
        vec = np.asarray(value, dtype=float).reshape(-1)
        if vec.size == 1:
            vec = np.full(self._d, vec[0])
        if vec.shape != (self._d,) or not np.all(np.isfinite(vec)):
            raise ValueError(f"Parâmetro {name} deve ser um vetor finito de dimensão {self._d}.")
        return vec

    def _matrix(self, value, name) -> np.ndarray:
        if value is None:
            raise ValueError(f"Parâmetro {name} é obrigatório.")
        mat = np.atleast_2d(np.asarray(value, dtype=float))
        if mat.shape != (self._d, self._d) or not np.all(np.isfinite(mat)):
            raise ValueError(f"Parâmetro {name} deve ser uma matriz finita {self._d}×{self._d}.")
        return mat

    @property
    def d(self) -> int:
        return self._d

    @property
    def drift_kind(self) -> str:
        return self._drift_kind

    @property
    def diffusion_kind(self) -> str:
        return self._diffusion_kind

    def is_affine(self) -> bool:
        """Todos os tipos do registro são afins em x."""
        return True

    def lipschitz_constant(self) -> float:
        """Constante de Lipschitz L de b e σ: máximo entre ‖A‖₂ e ‖diag(s₁)‖_F."""
        return float(max(np.linalg.norm(self._A, 2), np.linalg.norm(self._s1)))

    def drift(self, t: float, X: np.ndarray) -> np.ndarray:
        """b(t, X) para um lote (n, d)."""
        X = np.atleast_2d(X)
        return X @ self._A.T + self._c

    def diffusion(self, t: float, X: np.ndarray) -> np.ndarray:
        """σ(t, X) para um lote (n, d), formato (n, d, d)."""
        X = np.atleast_2d(X)
        n = X.shape[0]
        if self._diffusion_kind == "diagonal_affine":
            diag = self._s0 + self._s1 * X
            out = np.zeros((n, self._d, self._d))
            idx = np.arange(self._d)
            out[:, idx, idx] = diag
            return out
        return np.broadcast_to(self._S, (n, self._d, self._d))

    def covariance(self, t: float, x) -> np.ndarray:
        """(σσ*)(t, x) num único ponto."""
        sigma = self.diffusion(t, np.asarray(x, dtype=float).reshape(1, -1))[0]
        return sigma @ sigma.T

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"d": self._d, "drift_kind": self._drift_kind, "diffusion_kind": self._diffusion_kind}
        if self._drift_kind != "zero":
            data["drift_vector"] = self._c.tolist()
        if self._drift_kind == "affine":
            data["drift_matrix"] = self._A.tolist()
        if self._diffusion_kind == "constant":
            data["diffusion_matrix"] = self._S.tolist()
        if self._diffusion_kind == "diagonal_affine":
            data["diffusion_base"] = self._s0.tolist()
            data["diffusion_slope"] = self._s1.tolist()
        return data

    def __repr__(self) -> str:
        return f"CoefficientField(d={self._d}, drift={self._drift_kind}, diffusion={self._diffusion_kind})"
