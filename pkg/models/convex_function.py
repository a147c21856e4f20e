# models/convex_function.py
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence

import numpy as np

from models.extended_real import ExtendedReal

# Tolerância relativa usada nos testes de pertinência a fronteiras.
DOMAIN_TOL = 1e-12

# Passos λ da aproximação de Yosida (u − prox(φ, λ, u))/λ.
YOSIDA_LAMBDAS = (1e-4, 1e-5, 1e-6, 1e-7)


def encode_bound(value: float):
    """Serializa limites infinitos como "inf" / "-inf"."""
    if np.isposinf(value):
        return "inf"
    if np.isneginf(value):
        return "-inf"
    return float(value)


class ConvexFunction(ABC):
    """
    Função convexa própria e semicontínua inferiormente φ: ℝᵏ → (−∞, +∞].

    Cada tipo concreto do registro fornece avaliação, predicados de domínio,
    operador proximal, derivadas direcionais em forma fechada e a seção
    mínima de ∂φ. Instâncias são imutáveis após a construção.
    """

    kind = "abstract"

    def __init__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ValueError("Dimensão k deve ser um inteiro maior ou igual a 1.")
        self._k = int(k)

    @property
    def k(self) -> int:
        """Dimensão do espaço de saída."""
        return self._k

    # ------------------------------------------------------------------
    # Avaliação e domínio
    # ------------------------------------------------------------------

    def as_point(self, u) -> np.ndarray:
        """Valida e converte u para um vetor de dimensão k."""
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.shape != (self._k,):
            raise ValueError(f"Ponto com dimensão {u.shape[0]} incompatível com k={self._k}.")
        if not np.all(np.isfinite(u)):
            raise ValueError("Ponto u deve ser finito.")
        return u

    def as_batch(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        if U.ndim == 1:
            U = U.reshape(1, -1)
        if U.ndim != 2 or U.shape[1] != self._k:
            raise ValueError(f"Lote com formato {U.shape} incompatível com k={self._k}.")
        return U

    def value(self, u) -> ExtendedReal:
        """φ(u); +∞ exatamente quando u ∉ Dom(φ)."""
        u = self.as_point(u)
        return ExtendedReal.from_float(self.values(u[None, :])[0])

    def values(self, U) -> np.ndarray:
        """Avaliação em lote; pontos fora do domínio recebem inf do IEEE."""
        U = self.as_batch(U)
        inside = self.in_domain_batch(U)
        out = np.full(U.shape[0], np.inf)
        if np.any(inside):
            out[inside] = self._finite_values(U[inside])
        return out

    def in_domain(self, u) -> bool:
        return bool(self.in_domain_batch(self.as_point(u)[None, :])[0])

    def in_domain_batch(self, U) -> np.ndarray:
        return np.ones(self.as_batch(U).shape[0], dtype=bool)

    def in_dom_subdiff(self, u) -> bool:
        """Dom(∂φ) ⊆ Dom(φ); para os tipos do registro os dois coincidem."""
        return self.in_domain(u)

    def is_smooth_at(self, u) -> bool:
        """True quando φ é diferenciável numa vizinhança de u."""
        return True

    def snap(self, u: np.ndarray, tol: float) -> np.ndarray:
        """Leva u para o ponto de não diferenciabilidade a distância ≤ tol, se houver."""
        return u

    @abstractmethod
    def _finite_values(self, U: np.ndarray) -> np.ndarray:
        """Valores de φ em pontos já sabidamente pertencentes ao domínio."""

    # ------------------------------------------------------------------
    # Operador proximal
    # ------------------------------------------------------------------

    def prox(self, lam: float, v) -> np.ndarray:
        """
        Resolvente (I + λ∂φ)⁻¹: argmin φ(u) + |u − v|²/(2λ).

        Aceita um vetor (k,) ou um lote (n, k) e devolve o mesmo formato.
        """
        if not lam > 0:
            raise ValueError("λ deve ser estritamente positivo.")
        v = np.asarray(v, dtype=float)
        single = v.ndim == 1
        V = self.as_batch(v)
        P = self._prox_batch(float(lam), V)
        return P[0] if single else P

    @abstractmethod
    def _prox_batch(self, lam: float, V: np.ndarray) -> np.ndarray:
        """Prox linha a linha sobre um lote (n, k)."""

    # ------------------------------------------------------------------
    # Derivadas direcionais e seção mínima
    # ------------------------------------------------------------------

    @abstractmethod
    def dir_deriv(self, u: np.ndarray, z: np.ndarray, side: str) -> ExtendedReal:
        """φ'_−(u; z) (side="minus") ou φ'_+(u; z) (side="plus") em forma fechada."""

    def minimal_section(self, u) -> Optional[np.ndarray]:
        """(∂φ)⁰(u), ou None quando ∂φ(u) = ∅."""
        return self.yosida_section(u)

    def yosida_section(self, u, lambdas: Sequence[float] = YOSIDA_LAMBDAS) -> Optional[np.ndarray]:
        """Limite de (u − prox(φ, λ, u))/λ quando λ ↓ 0."""
        u = self.as_point(u)
        if not self.in_dom_subdiff(u):
            return None
        estimate = None
        for lam in lambdas:
            estimate = (u - self.prox(lam, u)) / lam
        return estimate

    # ------------------------------------------------------------------
    # Amostragem e serialização
    # ------------------------------------------------------------------

    def sample_domain(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Amostra n pontos de Dom(φ), incluindo pontos de fronteira quando houver."""
        return rng.normal(scale=2.0, size=(n, self._k))

    def domain_point(self) -> np.ndarray:
        """Um ponto qualquer de Dom(φ) (testemunha de que φ é própria)."""
        return np.zeros(self._k)

    def params(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "k": self._k, **self.params()}

    def __str__(self) -> str:
        return f"{self.kind}(k={self._k})"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params()!r}, k={self._k})"
