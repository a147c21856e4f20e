# models/norm_functions.py
from typing import Optional

import numpy as np

from models.convex_function import ConvexFunction
from models.extended_real import ExtendedReal


def check_side(side: str) -> str:
    if side not in ("minus", "plus"):
        raise ValueError(f"Lado inválido para derivada direcional: {side}")
    return side


class Zero(ConvexFunction):
    """
    φ ≡ 0. Convexa, finita e contínua; prox é a identidade.
    """

    kind = "zero"

    def _finite_values(self, U):
        return np.zeros(U.shape[0])

    def _prox_batch(self, lam, V):
        return V.copy()

    def dir_deriv(self, u, z, side):
        check_side(side)
        return ExtendedReal(0.0)

    def minimal_section(self, u):
        return np.zeros(self.k)


class SeparableAbs(ConvexFunction):
    """
    φ(u) = Σ|uᵢ|.

    Soma de valores absolutos (cada um máximo de duas funções afins),
    portanto convexa, finita e contínua em ℝᵏ.
    """

    kind = "separable_abs"

    def _finite_values(self, U):
        return np.abs(U).sum(axis=1)

    def _prox_batch(self, lam, V):
        # soft-threshold
        return np.sign(V) * np.maximum(np.abs(V) - lam, 0.0)

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        z = np.asarray(z, dtype=float)
        at_kink = u == 0.0
        smooth = np.sign(u[~at_kink]) @ z[~at_kink]
        kink = np.abs(z[at_kink]).sum()
        return ExtendedReal(smooth + kink if side == "plus" else smooth - kink)

    def minimal_section(self, u):
        return np.sign(self.as_point(u))

    def is_smooth_at(self, u):
        return bool(np.all(self.as_point(u) != 0.0))

    def snap(self, u, tol):
        return np.where(np.abs(u) <= tol, 0.0, u)

    def sample_domain(self, rng, n):
        U = rng.normal(scale=2.0, size=(n, self.k))
        U[rng.random(size=U.shape) < 0.3] = 0.0
        return U


class EuclideanNorm(ConvexFunction):
    """
    φ(u) = |u| (norma euclidiana). Norma, logo convexa e contínua;
    prox é o encolhimento em bloco.
    """

    kind = "euclidean_norm"

    def _finite_values(self, U):
        return np.linalg.norm(U, axis=1)

    def _prox_batch(self, lam, V):
        norms = np.linalg.norm(V, axis=1, keepdims=True)
        scale = np.maximum(1.0 - lam / np.where(norms > 0, norms, 1.0), 0.0)
        return V * np.where(norms > 0, scale, 0.0)

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        z = np.asarray(z, dtype=float)
        norm = np.linalg.norm(u)
        if norm > 0:
            return ExtendedReal(u @ z / norm)
        size = np.linalg.norm(z)
        return ExtendedReal(size if side == "plus" else -size)

    def minimal_section(self, u):
        u = self.as_point(u)
        norm = np.linalg.norm(u)
        return u / norm if norm > 0 else np.zeros(self.k)

    def is_smooth_at(self, u):
        return bool(np.linalg.norm(self.as_point(u)) > 0)

    def snap(self, u, tol):
        return np.zeros_like(u) if np.linalg.norm(u) <= tol else u

    def sample_domain(self, rng, n):
        U = rng.normal(scale=2.0, size=(n, self.k))
        U[rng.random(size=n) < 0.2] = 0.0
        return U


class Quadratic(ConvexFunction):
    """
    φ(u) = ½⟨Qu, u⟩ com Q simétrica semidefinida positiva.

    Forma quadrática com Hessiana Q ⪰ 0, portanto convexa e suave.
    O parâmetro check_psd=False existe apenas para injeção de falhas
    nos testes (permite uma "quadrática negada" não convexa).
    """

    kind = "quadratic"

    def __init__(self, matrix, check_psd: bool = True):
        Q = np.atleast_2d(np.asarray(matrix, dtype=float))
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Matriz Q deve ser quadrada.")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Matriz Q deve ser simétrica.")
        if check_psd and np.linalg.eigvalsh(Q).min() < -1e-10:
            raise ValueError("Matriz Q deve ser semidefinida positiva.")
        super().__init__(Q.shape[0])
        self._Q = 0.5 * (Q + Q.T)
        self._check_psd = check_psd

    @property
    def matrix(self) -> np.ndarray:
        return self._Q.copy()

    def _finite_values(self, U):
        return 0.5 * np.einsum("ni,ij,nj->n", U, self._Q, U)

    def _prox_batch(self, lam, V):
        system = np.eye(self.k) + lam * self._Q
        return np.linalg.solve(system, V.T).T

    def dir_deriv(self, u, z, side):
        check_side(side)
        u = self.as_point(u)
        return ExtendedReal((self._Q @ u) @ np.asarray(z, dtype=float))

    def minimal_section(self, u) -> Optional[np.ndarray]:
        return self._Q @ self.as_point(u)

    def params(self):
        return {"matrix": self._Q.tolist()}
