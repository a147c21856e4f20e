import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Settings
from models.exceptions import DomainError, StencilError
from models.extended_real import ExtendedReal
from models.jet import DirectionProbe, Jet, Stencil
from models.problem_spec import ProblemSpec
from models.reports import ViscosityReport, ViscosityRow
from models.solution_field import SolutionField
from services.convex_kernel_service import ConvexKernelService

logger = logging.getLogger(__name__)


@dataclass
class _StencilData:
    """Nós da vizinhança: deslocamentos (s − t, y − x), pesos, valores e espaçamentos locais."""

    dt: np.ndarray
    dy: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    time_step: float
    space_step: float


class ViscosityCheckerService:
    """
    Ajusta jatos parabólicos locais a um campo calculado e avalia as
    desigualdades de super e subsolução nos pontos em que o campo é liso.
    """

    def __init__(self, kernel: Optional[ConvexKernelService] = None, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.kernel = kernel or ConvexKernelService(self.settings)

    # ------------------------------------------------------------------
    # Estêncil e ajuste
    # ------------------------------------------------------------------

    @staticmethod
    def _window(center: int, size: int, half: int) -> np.ndarray:
        """Janela de 2·half + 1 índices em torno de center, deslocada para caber no eixo."""
        width = min(2 * half + 1, size)
        start = min(max(center - half, 0), size - width)
        return np.arange(start, start + width)

    def _stencil(self, field: SolutionField, node, stencil: Stencil, T: float) -> _StencilData:
        t, x = float(node[0]), np.asarray(node[1], dtype=float).reshape(-1)
        if not field.is_tensor_grid():
            raise StencilError("Ajuste de jato exige pontos em malha tensorial.")
        if t >= T:
            raise StencilError(f"Nó com t={t} não é interior: exige t < T={T}.")
        try:
            i = field.time_index(t)
            p = field.point_index(x)
        except ValueError as e:
            raise StencilError(str(e)) from e
        axes = field.axes()
        if any(a.size < 3 for a in axes):
            raise StencilError("Cada eixo espacial precisa de ao menos três nós para a Hessiana.")
        centers = [int(np.flatnonzero(a == x[j])[0]) for j, a in enumerate(axes)]
        rows = np.arange(max(i - stencil.n_time, 0), min(i + stencil.n_time, field.times.size - 1) + 1)
        if rows.size < 2:
            raise StencilError(f"Nó (t={t}) precisa de ao menos dois instantes no estêncil.")
        windows = [self._window(c, a.size, stencil.n_space) for c, a in zip(centers, axes)]

        shape = [a.size for a in axes]
        dt, dy, dist, values = [], [], [], []
        for r in rows:
            grid = field.values[r].reshape(*shape, field.k)
            for combo in itertools.product(*windows):
                y = np.array([axes[j][c] for j, c in enumerate(combo)])
                dt.append(field.times[r] - t)
                dy.append(y - x)
                dist.append((r - i) ** 2 + sum((c - centers[j]) ** 2 for j, c in enumerate(combo)))
                values.append(grid[combo])
        dist = np.asarray(dist, dtype=float)
        neighbours = rows[rows != i]
        time_step = float(np.min(np.abs(field.times[neighbours] - t)))
        space_step = float(min(
            np.min(np.abs(np.diff(a[w]))) for a, w in zip(axes, windows)
        ))
        return _StencilData(
            dt=np.asarray(dt),
            dy=np.asarray(dy),
            weights=np.exp(-0.5 * dist / stencil.radius ** 2),
            values=np.asarray(values),
            time_step=time_step,
            space_step=space_step,
        )

    def _design(self, data: _StencilData) -> np.ndarray:
        d = data.dy.shape[1]
        columns = [np.ones_like(data.dt), data.dt] + [data.dy[:, a] for a in range(d)]
        for a in range(d):
            for b in range(a, d):
                factor = 0.5 if a == b else 1.0
                columns.append(factor * data.dy[:, a] * data.dy[:, b])
        return np.column_stack(columns)

    def fit_jet(self, field: SolutionField, node, z: DirectionProbe, stencil: Optional[Stencil] = None,
                T: Optional[float] = None) -> Jet:
        """
        Ajuste por mínimos quadrados ponderados de
        ⟨u, z⟩(s, y) ≈ v₀ + p(s − t) + ⟨q, y − x⟩ + ½⟨X(y − x), y − x⟩.

        Args:
            field: Campo calculado.
            node: (t, x), nó da malha com t < T.
            z: Direção de projeção.
            stencil: Vizinhança e largura dos pesos gaussianos (em passos de malha).
            T: Horizonte; por padrão o maior instante do campo.

        Raises:
            StencilError: Se o nó não é interior ou o sistema não tem posto completo.
        """
        stencil = stencil or Stencil()
        T = float(field.times.max()) if T is None else T
        data = self._stencil(field, node, stencil, T)
        return self._fit(data, z)

    def _fit(self, data: _StencilData, z: DirectionProbe) -> Jet:
        A = self._design(data)
        target = data.values @ z.z
        root = np.sqrt(data.weights)
        Aw = A * root[:, None]
        if np.linalg.matrix_rank(Aw) < A.shape[1]:
            raise StencilError(f"Estêncil com posto deficiente ({A.shape[0]} nós, {A.shape[1]} incógnitas).")
        coef = np.linalg.lstsq(Aw, target * root, rcond=None)[0]
        residual = float(np.sqrt(np.mean((A @ coef - target) ** 2)))
        d = data.dy.shape[1]
        X = np.zeros((d, d))
        position = 2 + d
        for a in range(d):
            for b in range(a, d):
                X[a, b] = X[b, a] = coef[position]
                position += 1
        return Jet(p=float(coef[1]), q=coef[2:2 + d], X=X, fit_residual=residual)

    # ------------------------------------------------------------------
    # Resíduos
    # ------------------------------------------------------------------

    def _node_state(self, spec: ProblemSpec, field: SolutionField, node) -> Tuple[float, np.ndarray, np.ndarray]:
        t, x = float(node[0]), np.asarray(node[1], dtype=float).reshape(-1)
        u = field.values[field.time_index(t), field.point_index(x)]
        return t, x, u

    def _lhs(self, spec: ProblemSpec, t: float, x: np.ndarray, u: np.ndarray, z: np.ndarray, jet: Jet) -> float:
        """p + ½Tr(σσ*X) + ⟨b, q⟩ + ⟨f(t, x, u), z⟩."""
        covariance = spec.coeffs.covariance(t, x)
        drift = spec.coeffs.drift(t, x[None, :])[0]
        generator = spec.gen.evaluate(t, x[None, :], u[None, :])[0]
        return float(jet.p + 0.5 * np.trace(covariance @ jet.X) + drift @ jet.q + generator @ z)

    def supersolution_residual(self, spec: ProblemSpec, field: SolutionField, node, z: DirectionProbe,
                               jet: Jet) -> ExtendedReal:
        """
        LHS − φ'_*(u(t, x); z), com LHS = p + ½Tr(σσ*X) + ⟨b, q⟩ + ⟨f(t, x, u), z⟩.

        Raises:
            DomainError: Se u(t, x) ∉ Dom(φ).
        """
        t, x, u = self._node_state(spec, field, node)
        threshold = self.kernel.dir_deriv_liminf(spec.phi, u, z.z)
        return self._lhs(spec, t, x, u, z.z, jet) - threshold

    def subsolution_residual(self, spec: ProblemSpec, field: SolutionField, node, z: DirectionProbe,
                             jet: Jet) -> ExtendedReal:
        """φ'^*(u(t, x); z) − LHS."""
        t, x, u = self._node_state(spec, field, node)
        threshold = self.kernel.dir_deriv_limsup(spec.phi, u, z.z)
        return threshold - self._lhs(spec, t, x, u, z.z, jet)

    # ------------------------------------------------------------------
    # Varredura
    # ------------------------------------------------------------------

    def interior_nodes(self, spec: ProblemSpec, field: SolutionField,
                       min_value: Optional[float] = None) -> List[Tuple[float, np.ndarray]]:
        """
        Nós com t < T; as janelas espaciais são deslocadas nas bordas da malha.
        Com min_value, só entram nós com |u(t, x)| > min_value.
        """
        nodes = []
        for i, t in enumerate(field.times):
            if t >= spec.T:
                continue
            for j, x in enumerate(field.points):
                if min_value is None or np.linalg.norm(field.values[i, j]) > min_value:
                    nodes.append((float(t), x))
        return nodes

    def probe_directions(self, k: int, rng: np.random.Generator) -> List[DirectionProbe]:
        """±eᵢ e 2k direções unitárias aleatórias."""
        axes = [DirectionProbe(e) for e in np.eye(k)] + [DirectionProbe(-e) for e in np.eye(k)]
        return axes + [DirectionProbe(v) for v in rng.normal(size=(2 * k, k))]

    def _tau(self, spec: ProblemSpec, field: SolutionField, node, data: _StencilData, truncation: float) -> float:
        s = self.settings
        t, x, u = self._node_state(spec, field, node)
        stderr = float(np.linalg.norm(field.stderr[field.time_index(t), field.point_index(x)]))
        covariance = spec.coeffs.covariance(t, x)
        drift = spec.coeffs.drift(t, x[None, :])[0]
        scale = 1.0 / data.time_step + np.trace(covariance) / data.space_step ** 2 \
            + np.linalg.norm(drift) / data.space_step
        return s.visc_tau_factor * (truncation + stderr) * scale + s.visc_floor * (1.0 + float(np.linalg.norm(u)))

    def sweep(self, spec: ProblemSpec, field: SolutionField, nodes: Optional[Sequence] = None,
              directions: Optional[Sequence[DirectionProbe]] = None, stencil: Optional[Stencil] = None,
              seed: int = 0, workers: int = 1) -> ViscosityReport:
        """
        Resíduos de super e subsolução em cada (nó, direção).

        Um nó é marcado "abstain" quando o estêncil não pode ser ajustado ou
        mistura valores em que φ é diferenciável com valores em que não é
        (fronteira livre atravessando o estêncil); "violation" quando algum
        resíduo é menor que −τ; "ok" caso contrário. τ escala com a estimativa
        de truncamento (mediana dos resíduos de ajuste) e o erro padrão do nó.
        """
        stencil = stencil or Stencil()
        nodes = self.interior_nodes(spec, field) if nodes is None else list(nodes)
        if not nodes:
            return ViscosityReport()

        def probe(indexed):
            index, node = indexed
            rng = np.random.default_rng([seed, index])
            probes = list(directions) if directions is not None else self.probe_directions(spec.k, rng)
            try:
                data = self._stencil(field, node, stencil, spec.T)
            except StencilError as e:
                return node, probes, None, None, str(e)
            smooth = {spec.phi.is_smooth_at(v) for v in data.values}
            if len(smooth) > 1:
                return node, probes, data, None, "estêncil atravessa região não lisa de φ"
            try:
                return node, probes, data, [self._fit(data, z) for z in probes], ""
            except StencilError as e:
                return node, probes, data, None, str(e)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                fitted = list(pool.map(probe, enumerate(nodes)))
        else:
            fitted = [probe(item) for item in enumerate(nodes)]

        residuals = [jet.fit_residual for _, _, _, jets, _ in fitted if jets for jet in jets]
        truncation = float(np.median(residuals)) if residuals else 0.0
        report = ViscosityReport(truncation_estimate=truncation)

        for node, probes, data, jets, reason in fitted:
            t, x = float(node[0]), np.asarray(node[1], dtype=float).reshape(-1)
            if jets is None:
                logger.warning("Verificador abstém-se no nó (t=%s, x=%s): %s.", t, x.tolist(), reason)
                for z in probes:
                    report.rows.append(ViscosityRow(t, x.tolist(), z.z.tolist(), None, None, float("nan"),
                                                    float("nan"), "abstain", reason))
                continue
            tau = self._tau(spec, field, node, data, truncation)
            for z, jet in zip(probes, jets):
                try:
                    res_super = self.supersolution_residual(spec, field, node, z, jet)
                    res_sub = self.subsolution_residual(spec, field, node, z, jet)
                except DomainError as e:
                    report.rows.append(ViscosityRow(t, x.tolist(), z.z.tolist(), None, None, jet.fit_residual,
                                                    tau, "abstain", str(e)))
                    continue
                flag = "violation" if (res_super < -tau or res_sub < -tau) else "ok"
                report.rows.append(ViscosityRow(t, x.tolist(), z.z.tolist(), res_super, res_sub,
                                                jet.fit_residual, tau, flag))
        logger.info("Varredura de viscosidade: %d linhas, %d violações.", len(report.rows), len(report.violations))
        return report
