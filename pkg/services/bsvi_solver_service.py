import logging
from typing import Optional, Sequence

import numpy as np

from config.settings import Settings
from models.bsv_triple import BsvTriple
from models.coefficient_field import CoefficientField
from models.convex_function import ConvexFunction
from models.exceptions import ConfigError, DomainError, SolverError
from models.extended_real import ExtendedReal
from models.generator import Generator
from models.path_ensemble import PathEnsemble
from models.regression_basis import RegressionBasis
from models.reports import FlatnessReport, RefinementStudy, StabilityReport
from models.terminal_map import TerminalMap
from models.time_grid import TimeGrid
from services.convex_kernel_service import ConvexKernelService
from services.forward_sde_service import ForwardSdeService

logger = logging.getLogger(__name__)


class BsviSolverService:
    """
    Esquema retrógrado de projeção proximal para a equação variacional
    dY + f dt ∈ ∂φ(Y) dt + Z dW com esperanças condicionais por regressão.
    """

    def __init__(self, kernel: Optional[ConvexKernelService] = None, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.kernel = kernel or ConvexKernelService(self.settings)

    def default_basis(self) -> RegressionBasis:
        s = self.settings
        return RegressionBasis(s.regression_degree, s.winsor_quantile, s.regression_chunk)

    def _implicit_step(self, gen: Generator, t: float, X: np.ndarray, c: np.ndarray, h: float) -> np.ndarray:
        """Ponto fixo y = c + h·f(t, X, y)."""
        s = self.settings
        y = c.copy()
        for _ in range(s.implicit_max_iter):
            y_next = c + h * gen.evaluate(t, X, y)
            if not np.all(np.isfinite(y_next)):
                break
            if np.max(np.abs(y_next - y)) <= s.implicit_tol * (1.0 + np.max(np.abs(y_next))):
                return y_next
            y = y_next
        raise SolverError(
            f"Iteração implícita em f não convergiu em t={t} (h·|γ| = {h * gen.lipschitz_in_y():.3g})."
        )

    def solve(self, ensemble: PathEnsemble, gen: Generator, term: TerminalMap, phi: ConvexFunction,
              basis: Optional[RegressionBasis] = None, implicit: bool = False, apply_reflection: bool = True,
              workers: int = 1) -> BsvTriple:
        """
        Recursão retrógrada sobre o ensemble.

        Y_N = h(X_T); para i = N−1, …, 0: c = Ê[Y_{i+1} | X_i],
        ỹ = c + h·f(t_i, X_i, c) (ou o ponto fixo implícito), Y_i = prox(φ, h, ỹ),
        U_i = (ỹ − Y_i)/h e Z_i = Ê[Y_{i+1} ΔW_iᵀ | X_i]/h. As duas
        regressões de cada passo compartilham a mesma matriz de desenho.

        Args:
            apply_reflection: False pula prox e resíduo (esquema BSDE sem ∂φ).

        Raises:
            ConfigError: Se as dimensões de h e φ diferem.
            SolverError: Se o prox ou a iteração implícita falham, ou Y deixa de ser finito.
        """
        if term.k != phi.k or gen.k != phi.k:
            raise ConfigError(f"Dimensões incompatíveis: h tem k={term.k}, f tem k={gen.k}, φ tem k={phi.k}.")
        basis = basis or self.default_basis()
        grid = ensemble.grid
        n, N, d, k = ensemble.n_paths, grid.n_steps, ensemble.d, phi.k
        h = grid.h
        nodes = grid.nodes
        X = ensemble.paths
        dW = ensemble.increments

        Y = np.empty((n, N + 1, k))
        Z = np.zeros((n, N, k, d))
        U = np.zeros((n, N, k))
        residual_variance = np.zeros((N, k))
        n_basis = np.zeros(N, dtype=int)
        Y[:, N, :] = term.evaluate(X[:, N, :])

        for i in range(N - 1, -1, -1):
            X_i = X[:, i, :]
            following = Y[:, i + 1, :]
            fitted = basis.fit(X_i)
            targets = np.hstack([following, (following[:, :, None] * dW[:, i, None, :]).reshape(n, k * d)])
            estimates = fitted.regress(X_i, targets, workers)
            c = estimates[:, :k]
            Z[:, i] = estimates[:, k:].reshape(n, k, d) / h
            residual_variance[i] = np.var(following - c, axis=0)
            n_basis[i] = fitted.n_basis

            if implicit:
                y_tilde = self._implicit_step(gen, nodes[i], X_i, c, h)
            else:
                y_tilde = c + h * gen.evaluate(nodes[i], X_i, c)
            if apply_reflection:
                Y[:, i, :] = phi.prox(h, y_tilde)
                U[:, i, :] = (y_tilde - Y[:, i, :]) / h
            else:
                Y[:, i, :] = y_tilde
            if not np.all(np.isfinite(Y[:, i, :])):
                raise SolverError(f"Valores não finitos de Y no passo {i} (t={nodes[i]}).")

        logger.debug("Solução retrógrada com %d trajetórias e %d passos concluída.", n, N)
        return BsvTriple(Y, Z, U, grid, "regression", residual_variance, n_basis)

    def flatness_check(self, triple: BsvTriple, phi: ConvexFunction, tol: Optional[float] = None,
                       n_samples: int = 200, seed: int = 0) -> FlatnessReport:
        """
        Verifica (Y_i, U_i) ∈ ∂φ em pares (trajetória, passo) sorteados e
        resume o análogo discreto de 𝔼∫φ(Y) < ∞ sobre todos os passos i < N.
        """
        tol = self.settings.subdiff_tol if tol is None else tol
        rng = np.random.default_rng(seed)
        n, N = triple.n_paths, triple.grid.n_steps
        states = triple.Y[:, :N, :].reshape(-1, phi.k)
        phi_values = phi.values(states)
        finite = np.isfinite(phi_values)
        mean_phi = ExtendedReal(float(phi_values.mean())) if np.all(finite) else ExtendedReal.plus_infinity()

        n_checked = min(n_samples, n * N)
        flat = rng.choice(n * N, size=n_checked, replace=False)
        directions = self.kernel.sample_directions(phi.k, rng)
        violations = 0
        for index in flat:
            path, step = divmod(int(index), N)
            y, u = triple.Y[path, step], triple.U[path, step]
            try:
                scaled = tol * (1.0 + float(np.abs(u).max()))
                if not self.kernel.subdiff_contains(phi, y, u, directions, scaled):
                    violations += 1
            except DomainError:
                violations += 1
        return FlatnessReport(
            n_checked=n_checked,
            violations=violations,
            violation_fraction=violations / n_checked if n_checked else 0.0,
            domain_fraction=float(finite.mean()),
            mean_phi=mean_phi,
            max_abs_u=float(np.abs(triple.U).max()) if triple.U.size else 0.0,
        )

    def stability_check(self, triple: BsvTriple, x_origin) -> StabilityReport:
        """𝔼 sup|Y|² e sua razão para 1 + |x|², com a energia 𝔼[sup|Y|² + Σ(|Z_i|² + |U_i|²)h]."""
        x = np.asarray(x_origin, dtype=float).reshape(-1)
        sup = (np.sum(triple.Y ** 2, axis=2)).max(axis=1)
        h = triple.grid.h
        integral = h * (np.sum(triple.Z ** 2, axis=(1, 2, 3)) + np.sum(triple.U ** 2, axis=(1, 2)))
        sup_moment = float(sup.mean())
        return StabilityReport(
            n_steps=triple.grid.n_steps,
            sup_moment=sup_moment,
            ratio=sup_moment / (1.0 + float(x @ x)),
            energy=float((sup + integral).mean()),
        )

    def stability_refinement_study(self, coeffs: CoefficientField, gen: Generator, term: TerminalMap,
                                   phi: ConvexFunction, origin, T: float, step_counts: Sequence[int],
                                   n_paths: int, seed: int, workers: int = 1,
                                   forward: Optional[ForwardSdeService] = None) -> RefinementStudy:
        forward = forward or ForwardSdeService(self.settings)
        factor = self.settings.refinement_growth_factor
        reports = []
        for n_steps in sorted(step_counts):
            grid = TimeGrid(origin[0], T, n_steps)
            ensemble = forward.simulate(coeffs, origin, grid, n_paths, seed, workers, "terminal_matching")
            reports.append(self.stability_check(self.solve(ensemble, gen, term, phi, workers=workers), origin[1]))
        for previous, current in zip(reports, reports[1:]):
            current.growing = current.ratio > factor * previous.ratio
        growing = any(r.growing for r in reports)
        if growing:
            logger.warning("Razão de estabilidade cresce sob refinamento (fator %.2f).", factor)
        return RefinementStudy(reports=reports, growing=growing, factor=factor)
