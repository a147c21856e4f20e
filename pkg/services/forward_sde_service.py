import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Settings
from models.coefficient_field import CoefficientField
from models.exceptions import SimulationError
from models.path_ensemble import VARIANCE_REDUCTIONS, PathEnsemble
from models.reports import MomentReport, RefinementStudy
from models.time_grid import TimeGrid

logger = logging.getLogger(__name__)

PATH_CHUNK = 1024


def path_generator(seed: int, path_id: int) -> np.random.Generator:
    """Gerador Philox com chave (seed, path_id): a sequência de cada trajetória não depende do escalonamento."""
    key = np.array([seed, path_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class ForwardSdeService:
    """
    Simulação de Euler–Maruyama da difusão progressiva X_s^{t,x}
    com armazenamento dos incrementos brownianos.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()

    def _draw_chunk(self, seed: int, start: int, stop: int, n_steps: int, d: int) -> np.ndarray:
        return np.stack([path_generator(seed, path_id).standard_normal((n_steps, d)) for path_id in range(start, stop)])

    def brownian_increments(self, grid: TimeGrid, n_paths: int, d: int, seed: int, workers: int = 1,
                            variance_reduction: str = "none") -> np.ndarray:
        """
        Incrementos ΔWᵢ, formato (n_paths, n_steps, d).

        Com variance_reduction="terminal_matching" os valores terminais W_T
        são ajustados para média amostral 0 e variância amostral T − t por
        coordenada, e cada trajetória é corrigida pela ponte browniana.
        """
        if variance_reduction not in VARIANCE_REDUCTIONS:
            raise ValueError(f"Redução de variância desconhecida: {variance_reduction}")
        if seed < 0:
            raise ValueError("Semente deve ser não negativa.")
        starts = list(range(0, n_paths, PATH_CHUNK))
        draw = lambda s: self._draw_chunk(seed, s, min(s + PATH_CHUNK, n_paths), grid.n_steps, d)
        if workers > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(draw, starts))
        else:
            chunks = [draw(s) for s in starts]
        increments = np.concatenate(chunks, axis=0) * np.sqrt(grid.h)

        if variance_reduction == "terminal_matching":
            if n_paths < 2:
                logger.debug("Casamento de momentos ignorado com uma única trajetória.")
                return increments
            horizon = grid.T - grid.t_start
            terminal = increments.sum(axis=1)
            spread = terminal.std(axis=0)
            if np.any(spread == 0.0):
                return increments
            matched = (terminal - terminal.mean(axis=0)) / spread * np.sqrt(horizon)
            increments = increments + (grid.h / horizon) * (matched - terminal)[:, None, :]
        return increments

    def simulate(self, coeffs: CoefficientField, origin: Tuple[float, Sequence[float]], grid: TimeGrid,
                 n_paths: int, seed: int, workers: int = 1, variance_reduction: str = "none") -> PathEnsemble:
        """
        Esquema de Euler–Maruyama X_{i+1} = X_i + b(t_i, X_i)h + σ(t_i, X_i)ΔW_i.

        Args:
            coeffs: Coeficientes (b, σ).
            origin: (t, x) com t = grid.t_start.
            grid: Malha temporal uniforme.
            n_paths: Número de trajetórias (≥ 1).
            seed: Semente mestre.
            workers: Número de threads na geração dos incrementos.
            variance_reduction: "none" ou "terminal_matching".

        Returns:
            PathEnsemble: Trajetórias e incrementos, somente leitura.

        Raises:
            ValueError: Se a origem não coincide com o início da malha.
            SimulationError: Se algum coeficiente ou estado deixa de ser finito.
        """
        t, x = float(origin[0]), np.asarray(origin[1], dtype=float).reshape(-1)
        if abs(t - grid.t_start) > 1e-12 * (1.0 + abs(t)):
            raise ValueError(f"Origem t={t} difere do início da malha {grid.t_start}.")
        if x.size != coeffs.d:
            raise ValueError(f"Ponto inicial com dimensão {x.size} incompatível com d={coeffs.d}.")
        if n_paths < 1:
            raise ValueError("Número de trajetórias deve ser maior ou igual a 1.")

        dW = self.brownian_increments(grid, n_paths, coeffs.d, seed, workers, variance_reduction)
        paths = np.empty((n_paths, grid.n_steps + 1, coeffs.d))
        paths[:, 0, :] = x
        nodes = grid.nodes
        for i in range(grid.n_steps):
            X = paths[:, i, :]
            drift = coeffs.drift(nodes[i], X)
            sigma = coeffs.diffusion(nodes[i], X)
            if not (np.all(np.isfinite(drift)) and np.all(np.isfinite(sigma))):
                raise SimulationError(f"Coeficientes não finitos no passo {i} (t={nodes[i]}).")
            paths[:, i + 1, :] = X + drift * grid.h + np.einsum("nij,nj->ni", sigma, dW[:, i, :])
            if not np.all(np.isfinite(paths[:, i + 1, :])):
                raise SimulationError(f"Trajetória divergiu no passo {i + 1} (t={nodes[i + 1]}).")

        logger.debug("Simuladas %d trajetórias a partir de (%s, %s).", n_paths, t, x.tolist())
        return PathEnsemble(paths, dW, grid, (t, x), seed)

    def moment_check(self, ensemble: PathEnsemble, p: int) -> MomentReport:
        """𝔼 sup_s |X_s|^p empírico e sua razão para 1 + |x|^p."""
        if p < 2 or p % 2:
            raise ValueError("Expoente p deve ser par e maior ou igual a 2.")
        sup = (np.linalg.norm(ensemble.paths, axis=2) ** p).max(axis=1)
        x = ensemble.origin[1]
        sup_moment = float(sup.mean())
        stderr = float(sup.std() / np.sqrt(sup.size))
        ratio = sup_moment / (1.0 + float(np.linalg.norm(x)) ** p)
        return MomentReport(p=p, n_steps=ensemble.grid.n_steps, sup_moment=sup_moment, stderr=stderr, ratio=ratio)

    def moment_refinement_study(self, coeffs: CoefficientField, origin, T: float, p: int,
                                step_counts: Sequence[int], n_paths: int, seed: int,
                                workers: int = 1) -> RefinementStudy:
        """Repete moment_check refinando a malha; marca razões que crescem além do fator configurado."""
        factor = self.settings.refinement_growth_factor
        reports = []
        for n_steps in sorted(step_counts):
            grid = TimeGrid(origin[0], T, n_steps)
            ensemble = self.simulate(coeffs, origin, grid, n_paths, seed, workers)
            reports.append(self.moment_check(ensemble, p))
        for previous, current in zip(reports, reports[1:]):
            current.growing = current.ratio > factor * previous.ratio
        growing = any(r.growing for r in reports)
        if growing:
            logger.warning("Momento supremo cresce sob refinamento da malha (fator %.2f).", factor)
        return RefinementStudy(reports=reports, growing=growing, factor=factor)
