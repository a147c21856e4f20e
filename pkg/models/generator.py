# models/generator.py
from typing import Any, Dict

import numpy as np

GENERATOR_KINDS = ("zero", "constant", "linear", "affine", "named")

# geradores de teste nomeados: (função, constante de monotonicidade γ)
NAMED_GENERATORS = {
    "cubic_damping": (lambda Y: -Y ** 3, 0.0),
    "sine": (np.sin, 1.0),
}


class Generator:
    """
    Gerador f(t, x, y) da equação retrógrada.

    Tipos: zero, constante c, linear γ·y, afim c + G·x + Γ·y e um registro
    de geradores nomeados. Cada tipo é monótono com a constante γ
    devolvida por monotonicity_constant().
    """

    def __init__(self, kind: str, d: int, k: int, constant=None, gamma: float = None,
                 x_matrix=None, y_matrix=None, name: str = None):
        if kind not in GENERATOR_KINDS:
            raise ValueError(f"Tipo de gerador desconhecido: {kind}")
        if d < 1 or k < 1:
            raise ValueError("Dimensões d e k devem ser positivas.")
        self._kind = kind
        self._d = int(d)
        self._k = int(k)
        self._c = np.zeros(k)
        self._G = np.zeros((k, d))
        self._Gamma = np.zeros((k, k))
        self._name = None

        if kind in ("constant", "affine") and constant is not None:
            c = np.asarray(constant, dtype=float).reshape(-1)
            self._c = np.full(k, c[0]) if c.size == 1 else c
            if self._c.shape != (k,):
                raise ValueError(f"Termo constante do gerador deve ter dimensão k={k}.")
        elif kind == "constant":
            raise ValueError("Gerador constante exige o parâmetro constant.")
        if kind == "linear":
            if gamma is None or not np.isfinite(gamma):
                raise ValueError("Gerador linear exige γ finito.")
            self._Gamma = float(gamma) * np.eye(k)
        if kind == "affine":
            if x_matrix is not None:
                self._G = np.asarray(x_matrix, dtype=float).reshape(k, d)
            if y_matrix is not None:
                self._Gamma = np.asarray(y_matrix, dtype=float).reshape(k, k)
        if kind == "named":
            if name not in NAMED_GENERATORS:
                raise ValueError(f"Gerador nomeado desconhecido: {name}. Disponíveis: {sorted(NAMED_GENERATORS)}")
            self._name = name

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def d(self) -> int:
        return self._d

    @property
    def k(self) -> int:
        return self._k

    def depends_on_y(self) -> bool:
        return self._kind == "named" or bool(np.any(self._Gamma))

    def monotonicity_constant(self) -> float:
        """Constante de monotonicidade γ: ⟨y − ỹ, f(y) − f(ỹ)⟩ ≤ γ|y − ỹ|²."""
        if self._kind == "named":
            return NAMED_GENERATORS[self._name][1]
        sym = 0.5 * (self._Gamma + self._Gamma.T)
        return float(np.linalg.eigvalsh(sym).max())

    def lipschitz_in_y(self) -> float:
        if self._kind == "named":
            return np.inf if self._name == "cubic_damping" else 1.0
        return float(np.linalg.norm(self._Gamma, 2))

    def evaluate(self, t: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """f(t, X, Y) em lote: X (n, d), Y (n, k) → (n, k)."""
        Y = np.atleast_2d(Y)
        if self._kind == "named":
            return NAMED_GENERATORS[self._name][0](Y)
        out = Y @ self._Gamma.T + self._c
        if np.any(self._G):
            out = out + np.atleast_2d(X) @ self._G.T
        return out

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self._kind, "d": self._d, "k": self._k}
        if self._kind == "named":
            data["name"] = self._name
        else:
            data.update(constant=self._c.tolist(), x_matrix=self._G.tolist(), y_matrix=self._Gamma.tolist())
        return data

    def __repr__(self) -> str:
        return f"Generator(kind={self._kind}, γ={self.monotonicity_constant()})"
