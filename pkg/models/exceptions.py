# models/exceptions.py


class ConfigError(ValueError):
    """Configuração inválida ou inconsistente (código de saída 2)."""


class DomainError(ValueError):
    """Ponto fora de Dom(φ) onde a operação exige φ(u) < +∞."""


class LatticeStabilityError(ConfigError):
    """Pesos do reticulado trinomial negativos (condição tipo CFL violada)."""


class StencilError(ValueError):
    """Estêncil de ajuste de jato deficiente em posto ou fora do interior da malha."""


class SolverError(RuntimeError):
    """Falha numérica durante a resolução (código de saída 3)."""


class ProxConvergenceError(SolverError):
    """O minimizador numérico do operador proximal não convergiu."""


class SimulationError(SolverError):
    """Avaliação não finita dos coeficientes durante a simulação."""
