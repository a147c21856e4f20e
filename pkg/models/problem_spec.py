# models/problem_spec.py
from typing import Any, Dict, Optional

import numpy as np

from models.coefficient_field import CoefficientField
from models.convex_function import ConvexFunction
from models.exceptions import ConfigError
from models.generator import Generator
from models.terminal_map import TerminalMap

CONSTANT_NAMES = ("L", "gamma", "M1", "p", "M2", "r")


class ProblemSpec:
    """
    Descrição completa do problema: dimensões, horizonte, coeficientes
    (b, σ), gerador f, condição terminal h, função convexa φ e as
    constantes de Lipschitz, monotonicidade e crescimento.

    As constantes declaradas são conferidas contra as calculadas pelos
    registros; a integrabilidade de φ(h) e a propriedade de φ são testadas em pontos amostrados.
    """

    def __init__(self, d: int, k: int, T: float, coeffs: CoefficientField, gen: Generator,
                 term: TerminalMap, phi: ConvexFunction, constants: Optional[Dict[str, float]] = None,
                 check_seed: int = 0, check_samples: int = 256):
        if not np.isfinite(T) or T <= 0:
            raise ConfigError("Horizonte T deve ser positivo e finito.")
        for name, obj, expected in (("coeffs", coeffs, d), ("gen", gen, d), ("term", term, d)):
            if obj.d != expected:
                raise ConfigError(f"Dimensão d de {name} ({obj.d}) difere de d={d}.")
        for name, obj in (("gen", gen), ("term", term), ("phi", phi)):
            if obj.k != k:
                raise ConfigError(f"Dimensão k de {name} ({obj.k}) difere de k={k}.")
        self._d = int(d)
        self._k = int(k)
        self._T = float(T)
        self._coeffs = coeffs
        self._gen = gen
        self._term = term
        self._phi = phi
        self._constants = self._validate_constants(dict(constants or {}), check_seed, check_samples)

    def _validate_constants(self, declared, seed, samples) -> Dict[str, float]:
        unknown = set(declared) - set(CONSTANT_NAMES)
        if unknown:
            raise ConfigError(f"Constantes desconhecidas: {sorted(unknown)}")
        computed = {
            "L": self._coeffs.lipschitz_constant(),
            "gamma": self._gen.monotonicity_constant(),
        }
        computed["M1"], computed["p"] = self._term.growth_constants()
        for name in ("L", "gamma", "M1", "p"):
            value = declared.get(name)
            if value is not None and value < computed[name] - 1e-12 * (1.0 + abs(computed[name])):
                raise ConfigError(
                    f"Constante declarada {name}={value} é menor que o valor calculado {computed[name]}."
                )

        if not self._phi.in_domain(self._phi.domain_point()):
            raise ConfigError("φ não é própria: nenhum ponto de Dom(φ) encontrado.")

        rng = np.random.default_rng(seed)
        X = np.vstack([np.zeros(self._d), rng.normal(scale=3.0, size=(samples, self._d))])
        phi_h = self._phi.values(self._term.evaluate(X))
        if not np.all(np.isfinite(phi_h)):
            raise ConfigError("φ(h(x)) infinito em pontos amostrados.")
        r = declared.get("r", 2.0 * computed["p"])
        ratio = np.abs(phi_h) / (1.0 + np.linalg.norm(X, axis=1) ** r)
        m2 = declared.get("M2")
        if m2 is not None and np.any(ratio > m2 * (1.0 + 1e-9)):
            raise ConfigError(f"|φ(h(x))| excede M2={m2}·(1 + |x|^{r}).")
        computed["r"] = float(r)
        computed["M2"] = float(m2 if m2 is not None else ratio.max())

        return {name: float(declared.get(name, computed[name])) for name in CONSTANT_NAMES}

    @property
    def d(self) -> int:
        return self._d

    @property
    def k(self) -> int:
        return self._k

    @property
    def T(self) -> float:
        return self._T

    @property
    def coeffs(self) -> CoefficientField:
        return self._coeffs

    @property
    def gen(self) -> Generator:
        return self._gen

    @property
    def term(self) -> TerminalMap:
        return self._term

    @property
    def phi(self) -> ConvexFunction:
        return self._phi

    @property
    def constants(self) -> Dict[str, float]:
        return dict(self._constants)

    def with_generator(self, gen: Generator) -> "ProblemSpec":
        """Cópia com outro gerador (usada para injetar discrepâncias em testes)."""
        declared = {name: value for name, value in self._constants.items() if name != "gamma"}
        return ProblemSpec(self._d, self._k, self._T, self._coeffs, gen, self._term, self._phi, declared)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self._d,
            "k": self._k,
            "T": self._T,
            "coeffs": self._coeffs.to_dict(),
            "gen": self._gen.to_dict(),
            "term": self._term.to_dict(),
            "phi": self._phi.to_dict(),
            "constants": self.constants,
        }

    def __repr__(self) -> str:
        return f"ProblemSpec(d={self._d}, k={self._k}, T={self._T}, phi={self._phi})"
