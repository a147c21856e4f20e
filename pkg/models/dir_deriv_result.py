# models/dir_deriv_result.py
from dataclasses import dataclass, field
from typing import List

from models.extended_real import ExtendedReal


@dataclass(frozen=True)
class DirDerivResult:
    """
    Derivada direcional unilateral φ'_−(u; z) ou φ'_+(u; z).

    Quando method = "limit_sequence", value é o último elemento de uma
    sequência monótona de quocientes e t_sequence guarda os passos usados.
    """

    value: ExtendedReal
    method: str
    t_sequence: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.method not in ("closed_form", "limit_sequence"):
            raise ValueError(f"Método de derivada direcional desconhecido: {self.method}")

    def to_dict(self):
        return {
            "value": self.value.to_json(),
            "method": self.method,
            "t_sequence": list(self.t_sequence),
        }
