import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Settings
from models.coefficient_field import CoefficientField
from models.convex_function import ConvexFunction
from models.exceptions import ConfigError, LatticeStabilityError, SolverError
from models.generator import Generator
from models.lattice_field import LatticeField
from models.terminal_map import TerminalMap

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-14


class LatticeOracleService:
    """
    Oráculo determinístico em d = 1: programação dinâmica num reticulado
    trinomial com pesos que casam os dois primeiros momentos do passo de
    Euler, seguida do mesmo passo proximal do esquema de regressão.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    def transition_weights(self, coeffs: CoefficientField, t: float, xs: np.ndarray, h: float,
                           dx: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Pesos (p_d, p_m, p_u) por nó com média μh e segundo momento σ²h + μ²h².

        Raises:
            LatticeStabilityError: Se algum peso for negativo (h grande demais para Δx).
        """
        X = xs.reshape(-1, 1)
        mu = coeffs.drift(t, X)[:, 0]
        sigma = coeffs.diffusion(t, X)[:, 0, 0]
        a = (sigma ** 2 * h + mu ** 2 * h ** 2) / dx ** 2
        beta = mu * h / dx
        up, down, middle = 0.5 * (a + beta), 0.5 * (a - beta), 1.0 - a
        lowest = min(up.min(), down.min(), middle.min())
        if lowest < -WEIGHT_TOL:
            raise LatticeStabilityError(
                f"Peso negativo {lowest:.3g} no reticulado em t={t}: reduza h={h:.3g} ou aumente Δx={dx:.3g}."
            )
        return np.maximum(down, 0.0), np.maximum(middle, 0.0), np.maximum(up, 0.0)

    def oracle_lattice_solve(self, coeffs: CoefficientField, gen: Generator, term: TerminalMap,
                             phi: ConvexFunction, n_space: int, n_steps: int, x_range: Sequence[float],
                             T: float, t_start: float = 0.0) -> LatticeField:
        """
        y(t_N, ·) = h(·); y(t_i, x) = prox(φ, h, E[y(t_{i+1}, ·) | x] + h·f(t_i, x, E)).

        As extremidades usam nós fantasmas extrapolados linearmente.

        Args:
            n_space: Número de nós espaciais (≥ 3).
            n_steps: Número de passos no tempo.
            x_range: (x_min, x_max).
            T: Horizonte.
            t_start: Instante inicial do reticulado.

        Raises:
            ConfigError: Se d ≠ 1 ou a malha é inválida.
            LatticeStabilityError: Se os pesos de transição forem negativos.
        """
        if coeffs.d != 1 or term.d != 1:
            raise ConfigError("O oráculo em reticulado exige d = 1.")
        if n_space < 3 or n_steps < 1:
            raise ConfigError("Reticulado exige n_space ≥ 3 e n_steps ≥ 1.")
        x_min, x_max = float(x_range[0]), float(x_range[1])
        if not x_min < x_max:
            raise ConfigError(f"Intervalo espacial inválido: [{x_min}, {x_max}].")
        if not t_start < T:
            raise ConfigError(f"Instante inicial {t_start} deve ser menor que T={T}.")

        xs = np.linspace(x_min, x_max, n_space)
        times = np.linspace(t_start, T, n_steps + 1)
        dx = xs[1] - xs[0]
        h = (T - t_start) / n_steps
        k = phi.k
        values = np.empty((n_steps + 1, n_space, k))
        values[-1] = term.evaluate(xs.reshape(-1, 1))
        X = xs.reshape(-1, 1)

        for i in range(n_steps - 1, -1, -1):
            down, middle, up = self.transition_weights(coeffs, times[i], xs, h, dx)
            y = values[i + 1]
            padded = np.vstack([2.0 * y[:1] - y[1:2], y, 2.0 * y[-1:] - y[-2:-1]])
            expected = down[:, None] * padded[:-2] + middle[:, None] * padded[1:-1] + up[:, None] * padded[2:]
            values[i] = phi.prox(h, expected + h * gen.evaluate(times[i], X, expected))
            if not np.all(np.isfinite(values[i])):
                raise SolverError(f"Valores não finitos no reticulado em t={times[i]}.")

        logger.debug("Reticulado resolvido: %d nós, %d passos, Δx=%.3g, h=%.3g.", n_space, n_steps, dx, h)
        return LatticeField(times, xs, values)

    def coarse_resolution(self, n_space: int, n_steps: int) -> Tuple[int, int]:
        """Metade da resolução espacial com a mesma razão h/Δx²."""
        return (n_space + 1) // 2, max(1, int(np.ceil(n_steps / 4)))

    def oracle_error_estimate(self, coeffs: CoefficientField, gen: Generator, term: TerminalMap,
                              phi: ConvexFunction, n_space: int, n_steps: int, x_range: Sequence[float],
                              T: float, times: Sequence[float], points: np.ndarray,
                              t_start: float = 0.0, fine: Optional[LatticeField] = None) -> np.ndarray:
        """
        |fino − grosso| nos nós (t, x) pedidos, formato (n_times, n_points, k).

        Raises:
            ConfigError: Se algum instante não estiver alinhado com os dois reticulados.
        """
        fine = fine or self.oracle_lattice_solve(coeffs, gen, term, phi, n_space, n_steps, x_range, T, t_start)
        coarse_space, coarse_steps = self.coarse_resolution(n_space, n_steps)
        coarse = self.oracle_lattice_solve(coeffs, gen, term, phi, coarse_space, coarse_steps, x_range, T, t_start)
        xs = np.asarray(points, dtype=float).reshape(-1)
        try:
            return np.stack([np.abs(fine.value_at(t, xs) - coarse.value_at(t, xs)) for t in times])
        except ValueError as e:
            raise ConfigError(f"Grade incompatível com o reticulado: {e}") from e
