import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import Settings
from models.exceptions import ConfigError
from models.problem_spec import ProblemSpec
from models.regression_basis import RegressionBasis
from models.reports import CheckResult, GrowthReport, MarkovReport
from models.run_settings import BACKENDS, LatticeSettings, MonteCarloSettings
from models.solution_field import SolutionField
from models.time_grid import TimeGrid
from services.bsvi_solver_service import BsviSolverService
from services.forward_sde_service import ForwardSdeService
from services.lattice_oracle_service import LatticeOracleService

logger = logging.getLogger(__name__)

TIME_TOL = 1e-12

# |u| abaixo desta fração do maior pico conta como região de contato.
ZERO_MAGNITUDE = 1e-12

# Razão mínima entre o maior e o menor |x| usados no ajuste do expoente.
TREND_MIN_SPAN = 2.0


def node_seed(seed: int, node_index: int) -> int:
    """Semente do nó derivada de (seed, índice) por SeedSequence."""
    return int(np.random.SeedSequence([seed, node_index]).generate_state(1, dtype=np.uint64)[0])


def sort_grid(times: Sequence[float], points) -> Tuple[np.ndarray, np.ndarray]:
    """Instantes crescentes e pontos em ordem lexicográfica (a ordem do CSV)."""
    times = np.sort(np.asarray(times, dtype=float).reshape(-1))
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    return times, points[np.lexsort(points.T[::-1])]


class SolutionFieldService:
    """
    Monta o campo u(t, x) = Y_t^{t,x} numa malha explícita e executa as
    verificações de consistência sobre ele.
    """

    def __init__(
        self,
        forward: Optional[ForwardSdeService] = None,
        solver: Optional[BsviSolverService] = None,
        lattice: Optional[LatticeOracleService] = None,
        settings: Optional[Settings] = None,
    ):
        self.settings = settings or Settings()
        self.forward = forward or ForwardSdeService(self.settings)
        self.solver = solver or BsviSolverService(settings=self.settings)
        self.lattice = lattice or LatticeOracleService(self.settings)

    def basis_for(self, mc: MonteCarloSettings) -> RegressionBasis:
        basis = self.solver.default_basis()
        if mc.degree is None:
            return basis
        return RegressionBasis(mc.degree, self.settings.winsor_quantile, self.settings.regression_chunk)

    def _validate_grid(self, spec: ProblemSpec, times: np.ndarray, points: np.ndarray):
        for t in times:
            if t < -TIME_TOL or t > spec.T + TIME_TOL:
                raise ConfigError(f"Instante t={t} fora de [0, T={spec.T}].")
        if points.shape[1] != spec.d:
            raise ConfigError(f"Pontos da malha devem ter d={spec.d} coordenadas (recebido {points.shape[1]}).")

    # ------------------------------------------------------------------
    # Avaliação do campo
    # ------------------------------------------------------------------

    def evaluate_u(self, spec: ProblemSpec, times: Sequence[float], points, mc: MonteCarloSettings,
                   backend: str = "regression", workers: int = 1,
                   lattice: Optional[LatticeSettings] = None) -> SolutionField:
        """
        Avalia u em todos os nós (t, x) da malha.

        No backend de regressão cada nó simula seu próprio ensemble a partir
        de (t, x) com semente derivada de (seed, índice do nó) e toma a média
        de Y no passo 0; no backend de reticulado (d = 1) uma única varredura
        retrógrada preenche todos os nós. A linha t = T recebe h(x) exatamente.

        Raises:
            ConfigError: Se a malha ou o backend são inválidos.
            SolverError: Propagado do nó que falhou; nenhum campo parcial é emitido.
        """
        if backend not in BACKENDS:
            raise ConfigError(f"Backend desconhecido: {backend}. Disponíveis: {list(BACKENDS)}")
        times, points = sort_grid(times, points)
        self._validate_grid(spec, times, points)
        if backend == "lattice":
            return self._evaluate_lattice(spec, times, points, lattice)

        n_times, n_points = times.size, points.shape[0]
        basis = self.basis_for(mc)

        def evaluate_node(index: int):
            t, x = times[index // n_points], points[index % n_points]
            if abs(t - spec.T) <= TIME_TOL:
                return spec.term.evaluate(x[None, :])[0], np.zeros(spec.k)
            grid = TimeGrid(t, spec.T, mc.steps_for(t, spec.T))
            ensemble = self.forward.simulate(
                spec.coeffs, (t, x), grid, mc.n_paths, node_seed(mc.seed, index), 1, mc.variance_reduction
            )
            triple = self.solver.solve(ensemble, spec.gen, spec.term, spec.phi, basis, implicit=mc.implicit)
            return triple.y0(), triple.regression_error(0)

        indices = range(n_times * n_points)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(evaluate_node, indices))
        else:
            results = [evaluate_node(i) for i in indices]

        values = np.array([r[0] for r in results]).reshape(n_times, n_points, spec.k)
        stderr = np.array([r[1] for r in results]).reshape(n_times, n_points, spec.k)
        logger.info("Campo avaliado em %d nós pelo backend de regressão.", n_times * n_points)
        return SolutionField(times, points, values, stderr, {"backend": "regression", "mc": mc.to_dict()})

    def _evaluate_lattice(self, spec: ProblemSpec, times: np.ndarray, points: np.ndarray,
                          lattice: Optional[LatticeSettings]) -> SolutionField:
        if spec.d != 1:
            raise ConfigError("Backend de reticulado exige d = 1.")
        if lattice is None:
            raise ConfigError("Backend de reticulado exige a seção lattice da configuração.")
        xs = points[:, 0]
        if xs.min() < lattice.x_range[0] or xs.max() > lattice.x_range[1]:
            raise ConfigError(f"Pontos da malha fora do intervalo do reticulado {list(lattice.x_range)}.")
        args = (spec.coeffs, spec.gen, spec.term, spec.phi, lattice.n_space, lattice.n_steps, lattice.x_range, spec.T)
        fine = self.lattice.oracle_lattice_solve(*args)
        try:
            values = np.stack([fine.value_at(t, xs) for t in times])
        except ValueError as e:
            raise ConfigError(f"Grade incompatível com o reticulado: {e}") from e
        stderr = self.lattice.oracle_error_estimate(*args, times, xs, fine=fine)
        terminal = np.abs(times - spec.T) <= TIME_TOL
        values[terminal] = spec.term.evaluate(points)
        stderr[terminal] = 0.0
        logger.info("Campo avaliado em %d nós pelo backend de reticulado.", values.shape[0] * values.shape[1])
        return SolutionField(times, points, values, stderr, {"backend": "lattice", "lattice": lattice.to_dict()})

    # ------------------------------------------------------------------
    # Verificações
    # ------------------------------------------------------------------

    def interpolation_error(self, field: SolutionField, t_index: int) -> float:
        """Cota max|Δ²u|/8 do erro da interpolação linear, sobre os eixos da malha."""
        grid = field.grid_values(t_index)
        worst = 0.0
        for axis in range(field.d):
            if grid.shape[axis] >= 3:
                second = np.diff(grid, n=2, axis=axis)
                worst = max(worst, float(np.abs(second).max()) / 8.0)
        return worst

    def markov_consistency_check(self, spec: ProblemSpec, field: SolutionField, origin, s: float,
                                 mc: MonteCarloSettings, workers: int = 1) -> MarkovReport:
        """
        Compara Y_s (solução retrógrada a partir de origin) com u(s, X_s)
        interpolado do campo, trajetória a trajetória.

        Raises:
            ConfigError: Se s ∉ (t, T) ou não é nó da malha de simulação.
        """
        t, x = float(origin[0]), np.asarray(origin[1], dtype=float).reshape(-1)
        if not t < s < spec.T:
            raise ConfigError(f"Instante s={s} deve estar em ({t}, {spec.T}).")
        grid = TimeGrid(t, spec.T, mc.steps_for(t, spec.T))
        try:
            j = grid.index_of(s)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        ensemble = self.forward.simulate(spec.coeffs, (t, x), grid, mc.n_paths, mc.seed, workers, mc.variance_reduction)
        triple = self.solver.solve(ensemble, spec.gen, spec.term, spec.phi, self.basis_for(mc),
                                   implicit=mc.implicit, workers=workers)
        X_s = ensemble.paths[:, j, :]
        Y_s = triple.Y[:, j, :]

        inside = field.inside_hull(X_s)
        n_excluded = int((~inside).sum())
        if n_excluded:
            logger.warning("%d trajetórias fora da envoltória do campo em s=%s foram excluídas.", n_excluded, s)
        if not np.any(inside):
            raise ConfigError(f"Nenhuma trajetória dentro da envoltória do campo em s={s}.")

        u_s = field.interpolate(s, X_s[inside])
        discrepancy = np.linalg.norm(Y_s[inside] - u_s, axis=1)
        t_index = int(np.argmin(np.abs(field.times - s)))
        return MarkovReport(
            origin_t=t,
            s=float(s),
            n_used=int(inside.sum()),
            n_excluded=n_excluded,
            mean_discrepancy=float(discrepancy.mean()),
            regression_error=float(np.linalg.norm(triple.regression_error(j))),
            field_error=float(np.linalg.norm(field.stderr[t_index], axis=1).mean()),
            interpolation_error=self.interpolation_error(field, t_index),
            factor=self.settings.markov_error_factor,
        )

    def growth_check(self, field: SolutionField, p: float) -> GrowthReport:
        """
        C = max |u|/(1 + |x|^p) sobre todos os nós.

        A tendência é julgada pelo expoente q do ajuste log-log de max_t |u|
        contra |x| nos níveis |x| ≥ 1 em que u ≠ 0 (regiões de contato ficam
        de fora). A razão cresce no maior |x| quando q − p supera
        log10(growth_trend_factor), isto é, ganho maior que o fator por década.
        Sem dois níveis utilizáveis cobrindo ao menos um fator TREND_MIN_SPAN em
        |x| a tendência não é avaliada.
        """
        norms = np.linalg.norm(field.points, axis=1)
        magnitude = np.linalg.norm(field.values, axis=2)
        ratios = magnitude / (1.0 + norms ** p)
        nonzero = norms[norms > 0]
        decades = float(np.log10(nonzero.max() / nonzero.min())) if nonzero.size else 0.0

        levels = np.unique(nonzero)
        peaks = np.array([magnitude[:, norms == level].max() for level in levels])
        usable = levels >= 1.0
        if peaks.size:
            usable &= peaks > ZERO_MAGNITUDE * (1.0 + peaks.max())
        exponent = None
        trending = False
        span = levels[usable].max() / levels[usable].min() if usable.any() else 1.0
        if usable.sum() >= 2 and span >= TREND_MIN_SPAN:
            exponent = float(np.polyfit(np.log(levels[usable]), np.log(peaks[usable]), 1)[0])
            trending = exponent - p > np.log10(self.settings.growth_trend_factor)
        else:
            logger.warning("Níveis |x| ≥ 1 com u ≠ 0 insuficientes (razão %.2f); tendência não avaliada.", span)
        if decades < 2.0:
            logger.warning("Malha cobre apenas %.2f décadas em |x|; a verificação de crescimento é fraca.", decades)
        return GrowthReport(p=float(p), constant=float(ratios.max()), decades=decades,
                            covers_two_decades=decades >= 2.0, trending_up=bool(trending), exponent=exponent)

    def terminal_identity_check(self, spec: ProblemSpec, field: SolutionField) -> CheckResult:
        """A linha t = T deve ser igual a h(x) bit a bit."""
        rows = np.flatnonzero(np.abs(field.times - spec.T) <= TIME_TOL)
        if rows.size == 0:
            return CheckResult("terminal_identity", True, {"checked": 0}, "campo sem linha t = T")
        expected = spec.term.evaluate(field.points)
        mismatched = np.flatnonzero(np.any(field.values[rows[0]] != expected, axis=1))
        detail = ""
        if mismatched.size:
            detail = "u(T, x) ≠ h(x) em x = " + ", ".join(str(field.points[i].tolist()) for i in mismatched)
        return CheckResult("terminal_identity", mismatched.size == 0,
                           {"checked": int(field.points.shape[0]), "mismatched": int(mismatched.size)}, detail)

    def domain_check(self, spec: ProblemSpec, field: SolutionField) -> CheckResult:
        """φ(u(t, x)) < +∞ em todo nó com t < T."""
        rows = field.times < spec.T - TIME_TOL
        states = field.values[rows].reshape(-1, spec.k)
        inside = np.isfinite(spec.phi.values(states)) if states.size else np.ones(0, dtype=bool)
        fraction = float(inside.mean()) if inside.size else 1.0
        return CheckResult("domain", bool(np.all(inside)), {"fraction": fraction, "nodes": int(inside.size)},
                           "" if np.all(inside) else f"{int((~inside).sum())} nós fora de Dom(φ)")

    def continuity_proxy(self, field: SolutionField) -> CheckResult:
        """Maior salto entre nós vizinhos e o salto dividido pelo espaçamento, por instante."""
        max_jump = 0.0
        max_slope = 0.0
        if field.is_tensor_grid():
            axes = field.axes()
            for t_index in range(field.times.size):
                grid = field.grid_values(t_index)
                for axis, nodes in enumerate(axes):
                    if nodes.size < 2:
                        continue
                    jumps = np.linalg.norm(np.diff(grid, axis=axis), axis=-1)
                    spacing = np.diff(nodes).reshape([-1 if a == axis else 1 for a in range(field.d)])
                    max_jump = max(max_jump, float(jumps.max()))
                    max_slope = max(max_slope, float((jumps / spacing).max()))
        passed = bool(np.isfinite(max_jump) and np.isfinite(max_slope))
        return CheckResult("continuity_proxy", passed, {"max_jump": max_jump, "max_jump_over_spacing": max_slope})

    def backend_agreement(self, field_a: SolutionField, field_b: SolutionField,
                          factor: Optional[float] = None) -> CheckResult:
        """|u_a − u_b| ≤ factor·(se_a + se_b) nos nós comuns aos dois campos."""
        factor = self.settings.markov_error_factor if factor is None else factor
        worst = 0.0
        failures = []
        compared = 0
        for i, t in enumerate(field_a.times):
            try:
                j = field_b.time_index(t)
            except ValueError:
                continue
            for a_index, x in enumerate(field_a.points):
                try:
                    b_index = field_b.point_index(x)
                except ValueError:
                    continue
                compared += 1
                gap = np.abs(field_a.values[i, a_index] - field_b.values[j, b_index])
                bar = factor * (field_a.stderr[i, a_index] + field_b.stderr[j, b_index])
                worst = max(worst, float((gap / np.maximum(bar, 1e-300)).max()))
                if np.any(gap > bar + 1e-12):
                    failures.append(f"(t={t}, x={x.tolist()})")
        if compared == 0:
            return CheckResult("backend_agreement", False, {"compared": 0}, "nenhum nó em comum")
        return CheckResult("backend_agreement", not failures, {"compared": compared, "worst_ratio": worst},
                           "; ".join(failures))
