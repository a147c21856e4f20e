# models/terminal_map.py
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

TERMINAL_KINDS = ("polynomial", "positive_part", "norm", "named")

NAMED_TERMINALS = {
    "tanh": np.tanh,
}


class TerminalMap:
    """
    Condição terminal h: ℝᵈ → ℝᵏ.

    Tipos: polinômio por componente (numa coordenada de entrada), parte
    positiva (x_i − K)⁺, norma |x| e registro nomeado. A cota
    |h(x)| ≤ M₁(1 + |x|^p) vale por construção com (M₁, p) de
    growth_constants().
    """

    def __init__(self, kind: str, d: int, inputs: Sequence[int] = None,
                 coefficients: Sequence[Sequence[float]] = None,
                 strikes: Sequence[float] = None, name: str = None):
        if kind not in TERMINAL_KINDS:
            raise ValueError(f"Tipo de condição terminal desconhecido: {kind}")
        self._kind = kind
        self._d = int(d)
        self._name = name
        self._coefficients: List[np.ndarray] = []
        self._strikes = None

        if kind == "norm":
            self._inputs = [0]
        else:
            if inputs is None:
                inputs = [0] * len(coefficients or []) if kind == "polynomial" else list(range(d))
            self._inputs = [int(i) for i in inputs]
        if any(i < 0 or i >= d for i in self._inputs):
            raise ValueError(f"Índices de entrada devem estar em [0, {d}).")

        if kind == "polynomial":
            if not coefficients:
                raise ValueError("Condição polinomial exige coeficientes.")
            self._coefficients = [np.asarray(c, dtype=float).reshape(-1) for c in coefficients]
            if len(self._coefficients) != len(self._inputs):
                raise ValueError("Cada componente polinomial precisa de um índice de entrada.")
        elif kind == "positive_part":
            strikes = [0.0] * len(self._inputs) if strikes is None else strikes
            self._strikes = np.asarray(strikes, dtype=float).reshape(-1)
            if self._strikes.size != len(self._inputs):
                raise ValueError("Número de strikes incompatível com as entradas.")
        elif kind == "named" and name not in NAMED_TERMINALS:
            raise ValueError(f"Condição terminal nomeada desconhecida: {name}. Disponíveis: {sorted(NAMED_TERMINALS)}")

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def d(self) -> int:
        return self._d

    @property
    def k(self) -> int:
        return 1 if self._kind == "norm" else len(self._inputs)

    def growth_constants(self) -> Tuple[float, float]:
        """(M₁, p) com |h(x)| ≤ M₁(1 + |x|^p)."""
        if self._kind == "polynomial":
            p = max(c.size - 1 for c in self._coefficients)
            return float(sum(np.abs(c).sum() for c in self._coefficients)), float(p)
        if self._kind == "positive_part":
            return float(np.maximum(1.0, np.abs(self._strikes)).sum()), 1.0
        if self._kind == "norm":
            return 1.0, 1.0
        return float(np.sqrt(self.k)), 0.0

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """h(X) em lote: (n, d) → (n, k)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self._kind == "norm":
            return np.linalg.norm(X, axis=1, keepdims=True)
        cols = X[:, self._inputs]
        if self._kind == "polynomial":
            return np.column_stack([
                np.polynomial.polynomial.polyval(cols[:, j], c) for j, c in enumerate(self._coefficients)
            ])
        if self._kind == "positive_part":
            return np.maximum(cols - self._strikes, 0.0)
        return NAMED_TERMINALS[self._name](cols)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self._kind, "d": self._d, "inputs": self._inputs}
        if self._kind == "polynomial":
            data["coefficients"] = [c.tolist() for c in self._coefficients]
        elif self._kind == "positive_part":
            data["strikes"] = self._strikes.tolist()
        elif self._kind == "named":
            data["name"] = self._name
        return data

    def __repr__(self) -> str:
        return f"TerminalMap(kind={self._kind}, d={self._d}, k={self.k})"
